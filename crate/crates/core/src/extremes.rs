//! Gumbel utilities, Lambert W and the normalizing constants `(a_m, b_m)`
//! for the maximum of `m` i.i.d. Tracy–Widom (GOE) variables.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::painleve::TracyWidomTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantsMode {
    /// `b_m = F1^{-1}(1 − 1/m)`, `a_m = 1/(m F1'(b_m))` from the table.
    Exact,
    /// Large-`m` closed forms.
    Asymptotic,
}

/// Location/scale pair normalizing the maximum of `m` TW1 variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizingConstants {
    pub m: u64,
    pub a_m: f64,
    pub b_m: f64,
    pub mode: ConstantsMode,
}

/// Which closed form to use for the asymptotic location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LocationForm {
    /// `[(3/4) W(m²/12π)]^{2/3}`
    #[default]
    LambertW,
    /// `[(3/4) log(m²/12π)]^{2/3}`
    Log,
}

/// Principal branch of the Lambert W function.
///
/// Halley iteration from a branch-point series near `−1/e`, `log1p` for
/// moderate arguments and the two-term log expansion for large ones.
pub fn lambert_w0(z: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if z.is_nan() || z < branch {
        return Err(domain(format!("Lambert W0 is defined for z >= -1/e, got {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if z == branch {
        return Ok(-1.0);
    }

    let mut w = if z < -0.25 {
        let p = (2.0 * (E * z + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if z < 3.0 {
        let l = z.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };

    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let dw = f / denom;
        w -= dw;
        if dw.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w.max(-1.0))
}

/// `b_m = F1^{-1}(1 − 1/m)` and `a_m = 1/(m F1'(b_m))`.
pub fn norm_constants_exact(table: &TracyWidomTable, m: u64) -> Result<NormalizingConstants> {
    if m < 2 {
        return Err(domain(format!(
            "exact normalizing constants need m >= 2 (b_1 = F1^-1(0) is -inf), got m = {m}"
        )));
    }
    let mf = m as f64;
    let b_m = table.tw1_quantile(1.0 - 1.0 / mf)?;
    let a_m = 1.0 / (mf * table.tw1_pdf(b_m));
    Ok(NormalizingConstants { m, a_m, b_m, mode: ConstantsMode::Exact })
}

/// Closed-form large-`m` constants:
///
/// ```text
/// a_m = (4/3)^{1/2} (3/4)^{1/6} log^{-1/3}(m²/12π)
/// b_m = [(3/4) W(m²/12π)]^{2/3}        (or the log form)
/// ```
pub fn norm_constants_asymptotic(m: u64, form: LocationForm) -> Result<NormalizingConstants> {
    let mf = m as f64;
    let z = mf * mf / (12.0 * PI);
    if z <= 1.0 {
        return Err(domain(format!(
            "asymptotic constants need m^2/(12 pi) > 1 (m >= 7), got m = {m}"
        )));
    }
    let log_z = z.ln();
    let a_m = (4.0f64 / 3.0).sqrt() * 0.75f64.powf(1.0 / 6.0) * log_z.powf(-1.0 / 3.0);
    let b_m = match form {
        LocationForm::LambertW => (0.75 * lambert_w0(z)?).powf(2.0 / 3.0),
        LocationForm::Log => (0.75 * log_z).powf(2.0 / 3.0),
    };
    Ok(NormalizingConstants { m, a_m, b_m, mode: ConstantsMode::Asymptotic })
}

/// Standard Gumbel distribution function `exp(−e^{−y})`.
pub fn gumbel_cdf(y: f64) -> f64 {
    (-(-y).exp()).exp()
}

/// Standard Gumbel survival function `1 − exp(−e^{−y})`, accurate in the
/// upper tail.
pub fn gumbel_sf(y: f64) -> f64 {
    -(-(-y).exp()).exp_m1()
}

/// `−log(−log u)`.
pub fn gumbel_quantile(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(domain(format!("Gumbel quantile needs u in (0, 1), got {u}")));
    }
    Ok(-(-u.ln()).ln())
}

/// `(max(values) − b_m) / a_m`.
pub fn normalize_max(values: &[f64], consts: &NormalizingConstants) -> Result<f64> {
    let max = values
        .iter()
        .copied()
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
        .ok_or_else(|| domain("cannot normalize the maximum of an empty list"))?;
    if values.len() as u64 != consts.m {
        log::warn!(
            "normalizing a maximum of {} values with constants for m = {}",
            values.len(),
            consts.m
        );
    }
    Ok((max - consts.b_m) / consts.a_m)
}

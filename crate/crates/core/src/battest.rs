//! Batch union-intersection tests built on the greatest root.
//!
//! Each of `m` sub-hypotheses yields a root `θ_k`; the global null is
//! rejected when `max θ_k` exceeds
//!
//! ```text
//! c_α = [1 + exp(σ a_m log(−log(1−α)) − σ b_m − μ)]^{-1}
//! ```
//!
//! i.e. when the normalized maximum of the standardized roots exceeds the
//! Gumbel `1 − α` quantile.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::centering::{pencil_centering, standardize, BetaDims, CenteringScaling};
use crate::error::{domain, Error, Result};
use crate::extremes::{gumbel_quantile, gumbel_sf, normalize_max, NormalizingConstants};
use crate::matvar::{greatest_root, SymMatrix};
use crate::painleve::TracyWidomTable;

/// How the matrices in a [`CovPairSample`] are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovForm {
    /// `S` is a cross-product `XᵀX`; used as-is.
    CrossProduct,
    /// `S` is a mean-normalized covariance; multiplied by its `n`.
    #[default]
    Covariance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovPairSample {
    pub s1: SymMatrix,
    pub s2: SymMatrix,
    pub n1: u64,
    pub n2: u64,
    pub form: CovForm,
}

impl CovPairSample {
    /// Sampling dimensions `(p, n1, n2)`.
    pub fn dims(&self) -> BetaDims {
        BetaDims { p: self.s1.order() as u64, n1: self.n1, n2: self.n2 }
    }

    /// `(A, B) = (n1 S1, n2 S2)`, or the raw matrices in cross-product form.
    pub fn pencil(&self) -> Result<(SymMatrix, SymMatrix)> {
        if self.s1.order() != self.s2.order() {
            return Err(Error::DimensionMismatch { expected: self.s1.order(), found: self.s2.order() });
        }
        Ok(match self.form {
            CovForm::CrossProduct => (self.s1.clone(), self.s2.clone()),
            CovForm::Covariance => (self.s1.scaled(self.n1 as f64), self.s2.scaled(self.n2 as f64)),
        })
    }
}

/// Largest root of `(n1 S1 + n2 S2)^{-1} n2 S2`.
pub fn cov_equality_statistic(pair: &CovPairSample) -> Result<f64> {
    let (a, b) = pair.pencil()?;
    greatest_root(&a, &b)
}

/// `r` groups of `n` observations each; group `l` is an `n × p` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ManovaBatch {
    groups: Vec<DMatrix<f64>>,
}

impl ManovaBatch {
    pub fn new(groups: Vec<DMatrix<f64>>) -> Result<Self> {
        if groups.len() < 2 {
            return Err(domain(format!("MANOVA needs r >= 2 groups, got {}", groups.len())));
        }
        let (n, p) = groups[0].shape();
        if n < 2 || p == 0 {
            return Err(domain(format!("MANOVA needs n >= 2 and p >= 1, got n = {n}, p = {p}")));
        }
        for (l, g) in groups.iter().enumerate() {
            if g.shape() != (n, p) {
                return Err(domain(format!(
                    "group {l} is {}x{}, expected {n}x{p} (balanced design)",
                    g.nrows(),
                    g.ncols()
                )));
            }
        }
        Ok(ManovaBatch { groups })
    }

    pub fn r(&self) -> usize {
        self.groups.len()
    }

    pub fn n(&self) -> usize {
        self.groups[0].nrows()
    }

    pub fn p(&self) -> usize {
        self.groups[0].ncols()
    }

    pub fn groups(&self) -> &[DMatrix<f64>] {
        &self.groups
    }

    /// Sampling dimensions `(p, r(n−1), r−1)` of `(A, B)`.
    pub fn dims(&self) -> BetaDims {
        let (r, n) = (self.r() as u64, self.n() as u64);
        BetaDims { p: self.p() as u64, n1: r * (n - 1), n2: r - 1 }
    }
}

/// Within-group `A` and between-group `B` cross-product matrices.
pub fn manova_matrices(batch: &ManovaBatch) -> Result<(SymMatrix, SymMatrix)> {
    let p = batch.p();
    let means: Vec<DVector<f64>> = batch
        .groups
        .iter()
        .map(|g| g.row_mean().transpose())
        .collect();
    let grand = means.iter().fold(DVector::zeros(p), |acc, m| acc + m) / means.len() as f64;

    let mut a = DMatrix::zeros(p, p);
    for (g, mean) in batch.groups.iter().zip(&means) {
        let mut centered = g.clone();
        for mut row in centered.row_iter_mut() {
            row -= mean.transpose();
        }
        a += centered.tr_mul(&centered);
    }
    let mut b = DMatrix::zeros(p, p);
    for mean in &means {
        let d = mean - &grand;
        b += &d * d.transpose();
    }
    b *= batch.n() as f64;
    Ok((SymMatrix::from_lower(a)?, SymMatrix::from_lower(b)?))
}

/// Roots for a batch of covariance pairs, which must share `(p, n1, n2)`.
pub fn cov_batch_thetas(pairs: &[CovPairSample]) -> Result<(BetaDims, Vec<f64>)> {
    let first = pairs.first().ok_or_else(|| domain("no covariance pairs supplied"))?;
    let dims = first.dims();
    let mut thetas = Vec::with_capacity(pairs.len());
    for (k, pair) in pairs.iter().enumerate() {
        if pair.dims() != dims {
            return Err(domain(format!(
                "pair {k} has dims {} but pair 0 has {dims}; all pairs must share (p, n1, n2)",
                pair.dims()
            )));
        }
        thetas.push(cov_equality_statistic(pair)?);
    }
    Ok((dims, thetas))
}

/// Roots for a list of MANOVA batches, which must share `(p, r, n)`.
pub fn manova_batch_thetas(batches: &[ManovaBatch]) -> Result<(BetaDims, Vec<f64>)> {
    let first = batches.first().ok_or_else(|| domain("no MANOVA batches supplied"))?;
    let dims = first.dims();
    let mut thetas = Vec::with_capacity(batches.len());
    for (k, batch) in batches.iter().enumerate() {
        if batch.dims() != dims {
            return Err(domain(format!(
                "batch {k} has dims {} but batch 0 has {dims}; all batches must share (p, r, n)",
                batch.dims()
            )));
        }
        let (a, b) = manova_matrices(batch)?;
        thetas.push(greatest_root(&a, &b)?);
    }
    Ok((dims, thetas))
}

/// Centering for a batch with the given sampling dimensions.
pub fn batch_centering(sampling: BetaDims) -> Result<CenteringScaling> {
    pencil_centering(sampling)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Critical value on the `θ` scale. Computed as
/// `logit(c_α) = μ + σ (b_m + a_m G^{-1}(1 − α))` and cross-checked against
/// the closed form in the module docs.
pub fn critical_value(alpha: f64, cs: &CenteringScaling, consts: &NormalizingConstants) -> Result<f64> {
    check_alpha(alpha)?;
    let t = critical_logit(alpha, cs, consts)?;
    let c = 1.0 / (1.0 + (-t).exp());

    let closed = 1.0
        / (1.0 + (cs.sigma * consts.a_m * (-(1.0 - alpha).ln()).ln() - cs.sigma * consts.b_m - cs.mu).exp());
    if (c - closed).abs() > 1e-12 {
        return Err(Error::NumericalInstability {
            x: alpha,
            detail: format!("critical value forms disagree: {c} vs {closed}"),
        });
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::NumericalInstability {
            x: alpha,
            detail: format!("critical value {c} (logit {t}) is not inside (0, 1)"),
        });
    }
    Ok(c)
}

/// `logit(c_α)`.
pub fn critical_logit(alpha: f64, cs: &CenteringScaling, consts: &NormalizingConstants) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(cs.mu + cs.sigma * (consts.b_m + consts.a_m * gumbel_quantile(1.0 - alpha)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchTestResult {
    pub thetas: Vec<f64>,
    pub theta_max: f64,
    pub z_score: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub c_alpha: f64,
    pub reject: bool,
    pub consts: NormalizingConstants,
    pub cs: CenteringScaling,
}

pub fn batch_test(
    thetas: &[f64],
    cs: &CenteringScaling,
    consts: &NormalizingConstants,
    alpha: f64,
) -> Result<BatchTestResult> {
    check_alpha(alpha)?;
    if thetas.is_empty() {
        return Err(domain("batch test needs at least one statistic"));
    }
    let mut standardized = Vec::with_capacity(thetas.len());
    for (k, &t) in thetas.iter().enumerate() {
        if !(t > 0.0 && t < 1.0) {
            return Err(domain(format!("statistic {k} is {t}, outside (0, 1)")));
        }
        standardized.push(standardize(t, cs)?);
    }
    let theta_max = thetas.iter().copied().fold(f64::MIN, f64::max);
    let z_score = normalize_max(&standardized, consts)?;
    let mut p_value = gumbel_sf(z_score);
    let c_alpha = critical_value(alpha, cs, consts)?;

    // The θ-scale comparison decides. The p-value can only disagree within
    // rounding of the threshold; it is then snapped to the decided side.
    let reject = theta_max > c_alpha;
    if reject && p_value >= alpha {
        p_value = alpha * (1.0 - f64::EPSILON);
    } else if !reject && p_value < alpha {
        p_value = alpha;
    }

    Ok(BatchTestResult {
        thetas: thetas.to_vec(),
        theta_max,
        z_score,
        p_value,
        alpha,
        c_alpha,
        reject,
        consts: *consts,
        cs: *cs,
    })
}

/// Result of the single-root test, the `m = 1` case where the maximum is
/// the root itself and no Gumbel normalization exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleTestResult {
    pub theta: f64,
    /// `(logit θ − μ)/σ`, compared against TW1.
    pub z_score: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub c_alpha: f64,
    pub reject: bool,
    pub cs: CenteringScaling,
}

/// `c_α = logit^{-1}(μ + σ F1^{-1}(1 − α))`.
pub fn single_critical_value(alpha: f64, cs: &CenteringScaling, table: &TracyWidomTable) -> Result<f64> {
    check_alpha(alpha)?;
    let t = cs.mu + cs.sigma * table.tw1_quantile(1.0 - alpha)?;
    let c = 1.0 / (1.0 + (-t).exp());
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::NumericalInstability {
            x: alpha,
            detail: format!("critical value {c} (logit {t}) is not inside (0, 1)"),
        });
    }
    Ok(c)
}

/// Tracy–Widom test of a single root.
pub fn single_root_test(
    theta: f64,
    cs: &CenteringScaling,
    table: &TracyWidomTable,
    alpha: f64,
) -> Result<SingleTestResult> {
    let c_alpha = single_critical_value(alpha, cs, table)?;
    if !(theta > 0.0 && theta < 1.0) {
        return Err(domain(format!("statistic is {theta}, outside (0, 1)")));
    }
    let z_score = standardize(theta, cs)?;
    let mut p_value = table.tw1_sf(z_score);
    let reject = theta > c_alpha;
    if reject && p_value >= alpha {
        p_value = alpha * (1.0 - f64::EPSILON);
    } else if !reject && p_value < alpha {
        p_value = alpha;
    }
    Ok(SingleTestResult { theta, z_score, p_value, alpha, c_alpha, reject, cs: *cs })
}

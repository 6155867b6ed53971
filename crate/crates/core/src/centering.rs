//! Logit centering and scaling of the greatest root, regime checks and the
//! `(p, n1, n2)` reparametrization.
//!
//! With `N = n1 + n2` the angles are
//!
//! ```text
//! phi   = 2 asin sqrt((2 max(p, n1) − 1) / (2 (N − 1)))
//! gamma = 2 asin sqrt((2 min(p, n1) − 1) / (2 (N − 1)))
//! mu    = 2 log tan((phi + gamma) / 2)
//! sigma^3 = 16 / (N − 1)^2 / (sin^2(phi + gamma) sin(phi) sin(gamma))
//! ```
//!
//! The angle slot `n1` is the one paired with `p` inside `min`/`max`. For the
//! pencil `det[B − θ(A + B)] = 0` that slot must carry the degrees of freedom
//! of `B`; [`pencil_centering`] does that bookkeeping from sampling
//! dimensions.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// `(p, n1, n2)`: dimension and the two Wishart degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BetaDims {
    pub p: u64,
    pub n1: u64,
    pub n2: u64,
}

impl BetaDims {
    pub fn new(p: u64, n1: u64, n2: u64) -> Result<Self> {
        let d = BetaDims { p, n1, n2 };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.n1 == 0 || self.n2 == 0 {
            return Err(domain(format!("dimensions must be positive, got {self}")));
        }
        if self.n1 + self.n2 < self.p {
            return Err(domain(format!("need n1 + n2 >= p for an invertible A + B, got {self}")));
        }
        Ok(())
    }

    /// Dimensions with the two degrees of freedom exchanged.
    pub fn swapped(&self) -> Self {
        BetaDims { p: self.p, n1: self.n2, n2: self.n1 }
    }
}

impl fmt::Display for BetaDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p={}, n1={}, n2={})", self.p, self.n1, self.n2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenteringScaling {
    pub mu: f64,
    pub sigma: f64,
    pub phi: f64,
    pub gamma_angle: f64,
    pub dims: BetaDims,
}

fn angle(k: u64, total: u64, parameter: &'static str) -> Result<f64> {
    let arg = (2.0 * k as f64 - 1.0) / (2.0 * (total as f64 - 1.0));
    if arg > 1.0 {
        return Err(Error::DegenerateRegime {
            parameter,
            detail: format!("asin argument sqrt({arg}) exceeds 1"),
        });
    }
    // 2 asin √a, evaluated in the best-conditioned of three equivalent forms;
    // the middle one makes a = 1/2 give exactly π/2
    let angle = if arg < 0.25 {
        2.0 * arg.sqrt().asin()
    } else if arg <= 0.75 {
        (1.0 - 2.0 * arg).acos()
    } else {
        PI - 2.0 * (1.0 - arg).sqrt().asin()
    };
    Ok(angle)
}

/// Centering and scaling with `n1` in the angle slot, as written.
pub fn centering_scaling(dims: BetaDims) -> Result<CenteringScaling> {
    dims.validate()?;
    let total = dims.n1 + dims.n2;
    if total < 2 {
        return Err(domain(format!("need n1 + n2 >= 2, got {dims}")));
    }
    let (hi, lo) = (dims.p.max(dims.n1), dims.p.min(dims.n1));
    let hi_name = if dims.p >= dims.n1 { "p" } else { "n1" };
    let phi = angle(hi, total, hi_name)?;
    let gamma_angle = angle(lo, total, if hi_name == "p" { "n1" } else { "p" })?;

    let sum = phi + gamma_angle;
    if sum >= PI - 1e-12 {
        return Err(Error::DegenerateRegime {
            parameter: "phi+gamma",
            detail: format!("phi + gamma = {sum} reaches pi, so mu = 2 log tan(pi/2) is infinite for {dims}"),
        });
    }
    let mu = 2.0 * (sum / 2.0).tan().ln();
    let nm1 = total as f64 - 1.0;
    let sigma3 = 16.0 / (nm1 * nm1) / (sum.sin().powi(2) * phi.sin() * gamma_angle.sin());
    let sigma = sigma3.cbrt();
    if !(mu.is_finite() && sigma.is_finite() && sigma > 0.0) {
        return Err(Error::DegenerateRegime {
            parameter: "phi+gamma",
            detail: format!("non-finite centering (mu = {mu}, sigma = {sigma}) for {dims}"),
        });
    }
    Ok(CenteringScaling { mu, sigma, phi, gamma_angle, dims })
}

/// Centering for the root of `det[B − θ(A + B)] = 0` given sampling
/// dimensions `(p, df(A), df(B))`: the angle slot takes `df(B)`.
pub fn pencil_centering(sampling: BetaDims) -> Result<CenteringScaling> {
    centering_scaling(sampling.swapped())
}

/// `log(theta / (1 − theta))`.
pub fn logit(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(domain(format!("logit needs theta in (0, 1), got {theta}")));
    }
    let v = (theta / (1.0 - theta)).ln();
    if !v.is_finite() {
        return Err(domain(format!("logit({theta}) overflows")));
    }
    Ok(v)
}

/// `(logit(theta) − mu) / sigma`.
pub fn standardize(theta: f64, cs: &CenteringScaling) -> Result<f64> {
    Ok((logit(theta)? - cs.mu) / cs.sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeWarning {
    /// `n1 < p`: outside the `n1 >= p` assumption.
    N1BelowP,
    /// `min(p, n1)/(n1 + n2) < 0.05`.
    SmallMinRatio,
    /// `min(p, n2)/(n1 + n2) < 0.05`.
    SmallMinRatioN2,
    /// `p/n2 > 1`.
    PAboveN2,
    /// `m/p^{2/3} > 10`.
    ManyHypotheses,
    /// The approximation is derived for even `p`.
    OddP,
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegimeWarning::N1BelowP => "n1 < p",
            RegimeWarning::SmallMinRatio => "min(p, n1)/(n1 + n2) < 0.05",
            RegimeWarning::SmallMinRatioN2 => "min(p, n2)/(n1 + n2) < 0.05",
            RegimeWarning::PAboveN2 => "p/n2 > 1",
            RegimeWarning::ManyHypotheses => "m/p^(2/3) > 10",
            RegimeWarning::OddP => "p is odd",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeDiagnostics {
    /// `min(p, n1)/(n1 + n2)`
    pub ratio_min: f64,
    /// `min(p, n2)/(n1 + n2)`
    pub ratio_min_n2: f64,
    /// `p/n2`
    pub ratio_pn: f64,
    /// `m/p^{2/3}`
    pub ratio_mp: f64,
    pub flags: Vec<RegimeWarning>,
}

const MIN_RATIO: f64 = 0.05;
const MAX_MP: f64 = 10.0;

/// Computes the regime ratios and flags; never fails.
pub fn validate_regime(dims: BetaDims, m: u64) -> RegimeDiagnostics {
    let total = (dims.n1 + dims.n2) as f64;
    let p = dims.p as f64;
    let ratio_min = dims.p.min(dims.n1) as f64 / total;
    let ratio_min_n2 = dims.p.min(dims.n2) as f64 / total;
    let ratio_pn = p / dims.n2 as f64;
    let ratio_mp = m as f64 / p.powf(2.0 / 3.0);

    let mut flags = Vec::new();
    if dims.n1 < dims.p {
        flags.push(RegimeWarning::N1BelowP);
    }
    if ratio_min < MIN_RATIO {
        flags.push(RegimeWarning::SmallMinRatio);
    }
    if ratio_min_n2 < MIN_RATIO {
        flags.push(RegimeWarning::SmallMinRatioN2);
    }
    if ratio_pn > 1.0 {
        flags.push(RegimeWarning::PAboveN2);
    }
    if ratio_mp > MAX_MP {
        flags.push(RegimeWarning::ManyHypotheses);
    }
    if dims.p % 2 == 1 {
        flags.push(RegimeWarning::OddP);
    }
    for w in &flags {
        log::warn!("regime {dims} with m = {m}: {w}");
    }
    RegimeDiagnostics { ratio_min, ratio_min_n2, ratio_pn, ratio_mp, flags }
}

/// `(p, n1, n2) -> (n2, n1 + n2 − p, p)`, which leaves the law of the
/// greatest root unchanged.
pub fn reparametrize(dims: BetaDims) -> Result<BetaDims> {
    if dims.n1 + dims.n2 < dims.p + 1 {
        return Err(domain(format!("reparametrization needs n1 + n2 - p >= 1, got {dims}")));
    }
    Ok(BetaDims { p: dims.n2, n1: dims.n1 + dims.n2 - dims.p, n2: dims.p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cubic_residual(cs: &CenteringScaling) -> f64 {
        let n = (cs.dims.n1 + cs.dims.n2) as f64 - 1.0;
        let lhs = cs.sigma.powi(3)
            * (cs.phi + cs.gamma_angle).sin().powi(2)
            * cs.phi.sin()
            * cs.gamma_angle.sin();
        (lhs - 16.0 / (n * n)).abs() / (16.0 / (n * n))
    }

    #[test]
    fn small_case_values() {
        let cs = centering_scaling(BetaDims::new(2, 5, 5).unwrap()).unwrap();
        assert_eq!(cs.phi, PI / 2.0);
        // 40-digit evaluation of the closed forms
        assert!((cs.gamma_angle - 0.841068670567930).abs() < 1e-14);
        assert!((cs.mu - 1.924847300238414).abs() < 1e-12);
        assert!((cs.sigma - 0.841688211941774).abs() < 1e-12);
    }

    #[test]
    fn square_case_is_degenerate() {
        for p in [2, 10, 100] {
            match centering_scaling(BetaDims::new(p, p, p).unwrap()) {
                Err(Error::DegenerateRegime { parameter, .. }) => assert_eq!(parameter, "phi+gamma"),
                other => panic!("expected degenerate regime, got {other:?}"),
            }
        }
    }

    #[test]
    fn asin_overflow_names_parameter() {
        match centering_scaling(BetaDims::new(100, 50, 50).unwrap()) {
            Err(Error::DegenerateRegime { parameter, .. }) => assert_eq!(parameter, "p"),
            other => panic!("{other:?}"),
        }
        // n1 alone cannot push the argument past 1 (n2 >= 1); only p = n1 + n2 can
        match centering_scaling(BetaDims::new(10, 5, 5).unwrap()) {
            Err(Error::DegenerateRegime { parameter, .. }) => assert_eq!(parameter, "p"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pencil_centering_swaps_degrees_of_freedom() {
        let a = pencil_centering(BetaDims::new(20, 200, 30).unwrap()).unwrap();
        let b = centering_scaling(BetaDims::new(20, 30, 200).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn logit_values() {
        assert_eq!(logit(0.5).unwrap(), 0.0);
        assert!((logit(0.75).unwrap() - 3.0f64.ln()).abs() < 1e-15);
        // 1 − 1e-16 rounds to 1 − 2^-53: finite, about 36.7
        let near_one = logit(1.0 - 1e-16).unwrap();
        assert!((near_one - 36.7368005696771).abs() < 1e-9);
        assert!(logit(1.0).is_err());
        assert!(logit(1.0 + 1e-15).is_err());
        assert!(logit(0.0).is_err());
        assert!(logit(f64::NAN).is_err());
    }

    #[test]
    fn standardize_centers_and_scales() {
        let cs = centering_scaling(BetaDims::new(2, 5, 5).unwrap()).unwrap();
        let inv = |t: f64| 1.0 / (1.0 + (-t).exp());
        assert!(standardize(inv(cs.mu), &cs).unwrap().abs() < 1e-12);
        assert!((standardize(inv(cs.mu + cs.sigma), &cs).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regime_examples() {
        let d = validate_regime(BetaDims::new(100, 100, 100).unwrap(), 20);
        assert!(d.flags.is_empty(), "{:?}", d.flags);
        assert!((d.ratio_mp - 20.0 / 100f64.powf(2.0 / 3.0)).abs() < 1e-15);
        assert!((d.ratio_mp - 0.928317766722556).abs() < 1e-12);

        let d = validate_regime(BetaDims::new(100, 50, 50).unwrap(), 500);
        assert!(d.flags.contains(&RegimeWarning::N1BelowP));

        let d = validate_regime(BetaDims::new(4, 4, 4).unwrap(), 1_000_000);
        assert!(d.flags.contains(&RegimeWarning::ManyHypotheses));

        let d = validate_regime(BetaDims::new(3, 40, 40).unwrap(), 5);
        assert!(d.flags.contains(&RegimeWarning::OddP));
    }

    #[test]
    fn reparametrize_examples() {
        let d = reparametrize(BetaDims::new(2, 10, 3).unwrap()).unwrap();
        assert_eq!(d, BetaDims { p: 3, n1: 11, n2: 2 });
        // MANOVA: (p, r(n−1), r−1) -> (r−1, rn−1−p, p)
        let (p, r, n) = (30u64, 60u64, 3u64);
        let d = reparametrize(BetaDims::new(p, r * (n - 1), r - 1).unwrap()).unwrap();
        assert_eq!(d, BetaDims { p: r - 1, n1: r * n - 1 - p, n2: p });
        assert!(reparametrize(BetaDims { p: 10, n1: 5, n2: 5 }).is_err());
    }

    #[test]
    fn dims_validation() {
        assert!(BetaDims::new(0, 1, 1).is_err());
        assert!(BetaDims::new(10, 3, 3).is_err());
        assert!(BetaDims::new(6, 3, 3).is_ok());
    }

    proptest! {
        #[test]
        fn cubic_identity_holds(p in 1u64..400, n1 in 1u64..400, n2 in 1u64..400) {
            if let Ok(d) = BetaDims::new(p, n1, n2) {
                if let Ok(cs) = centering_scaling(d) {
                    prop_assert!(cs.sigma > 0.0);
                    prop_assert!(cs.phi >= cs.gamma_angle);
                    prop_assert!(cubic_residual(&cs) < 1e-10);
                }
            }
        }

        #[test]
        fn swapping_p_and_n1_is_harmless(p in 1u64..300, n1 in 1u64..300, total in 2u64..600) {
            // exchange p and n1 while holding n1 + n2 fixed
            prop_assume!(total > p.max(n1));
            let (a, b) = (BetaDims { p, n1, n2: total - n1 }, BetaDims { p: n1, n1: p, n2: total - p });
            if let (Ok(a), Ok(b)) = (BetaDims::new(a.p, a.n1, a.n2), BetaDims::new(b.p, b.n1, b.n2)) {
                match (centering_scaling(a), centering_scaling(b)) {
                    (Ok(x), Ok(y)) => {
                        prop_assert_eq!(x.mu, y.mu);
                        prop_assert_eq!(x.sigma, y.sigma);
                    }
                    (Err(_), Err(_)) => {}
                    (x, y) => prop_assert!(false, "{:?} vs {:?}", x, y),
                }
            }
        }

        #[test]
        fn standardize_is_increasing(t1 in 1e-6f64..0.999999, t2 in 1e-6f64..0.999999) {
            let cs = centering_scaling(BetaDims::new(20, 30, 200).unwrap()).unwrap();
            let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
            prop_assume!(lo < hi);
            prop_assert!(standardize(lo, &cs).unwrap() < standardize(hi, &cs).unwrap());
        }
    }
}

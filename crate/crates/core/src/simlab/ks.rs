//! Kolmogorov–Smirnov statistics with asymptotic p-values.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    /// Sup distance `D`.
    pub statistic: f64,
    pub p_value: f64,
    /// Sample count; for the two-sample test, the combined count.
    pub n: usize,
}

/// `P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let sf = if lambda < 1.18 {
        // theta-function form converges fast for small λ
        let c = -PI * PI / (8.0 * lambda * lambda);
        let mut s = 0.0;
        for k in 1..=20 {
            let j = (2 * k - 1) as f64;
            s += (c * j * j).exp();
        }
        1.0 - (2.0 * PI).sqrt() / lambda * s
    } else {
        let mut s = 0.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            s += if k % 2 == 1 { term } else { -term };
            if term < 1e-300 {
                break;
            }
        }
        2.0 * s
    };
    sf.clamp(0.0, 1.0)
}

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(domain("KS test needs at least one sample"));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(domain("KS test samples contain NaN"));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// One-sample test against a continuous distribution function.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsReport> {
    let xs = sorted(samples)?;
    let n = xs.len();
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        let hi = (i + 1) as f64 / nf;
        let lo = i as f64 / nf;
        d = d.max((hi - f).abs()).max((lo - f).abs());
    }
    Ok(KsReport { statistic: d, p_value: kolmogorov_sf(nf.sqrt() * d), n })
}

/// Two-sample test; the p-value uses `λ = sqrt(nm/(n+m)) D`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsReport> {
    let xa = sorted(a)?;
    let xb = sorted(b)?;
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < na && j < nb {
        let x = xa[i].min(xb[j]);
        while i < na && xa[i] <= x {
            i += 1;
        }
        while j < nb && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let en = (na as f64 * nb as f64 / (na + nb) as f64).sqrt();
    Ok(KsReport { statistic: d, p_value: kolmogorov_sf(en * d), n: na + nb })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremes::{gumbel_cdf, gumbel_quantile};
    use crate::matvar::RngStream;
    use rand::Rng;

    #[test]
    fn kolmogorov_reference_values() {
        // 1 − K(λ) at the classical critical points
        assert!((kolmogorov_sf(1.3580986393225507) - 0.05).abs() < 1e-9);
        assert!((kolmogorov_sf(1.6276236115189504) - 0.01).abs() < 1e-9);
        // both branches agree at the switch point
        let (a, b) = (kolmogorov_sf(1.18 - 1e-12), kolmogorov_sf(1.18 + 1e-12));
        assert!((a - b).abs() < 1e-10);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
        assert!(kolmogorov_sf(10.0) < 1e-80);
    }

    #[test]
    fn single_point_at_median() {
        let r = ks_test(&[0.0], |x| if x < 0.0 { 0.0 } else { 0.5 + 0.0 * x }).unwrap();
        assert_eq!(r.statistic, 0.5);
        assert!(ks_test(&[], |x| x).is_err());
    }

    #[test]
    fn ideal_spacing() {
        let n = 1000;
        let xs: Vec<f64> = (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect();
        let r = ks_test(&xs, |x| x).unwrap();
        assert!((r.statistic - 0.5 / n as f64).abs() < 1e-15);
        assert!(r.p_value > 0.999);
    }

    #[test]
    fn two_sample_basics() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let r = ks_two_sample(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        let b: Vec<f64> = (0..100).map(|i| i as f64 + 1000.0).collect();
        assert_eq!(ks_two_sample(&a, &b).unwrap().statistic, 1.0);
    }

    #[test]
    fn calibrated_under_the_null() {
        // 200 seeds, 2000 Gumbel draws each; rejections at 5% ~ Binomial(200, 0.05)
        let mut rejections = 0;
        for seed in 0..200 {
            let mut rng = RngStream::new(seed, 0).rng();
            let xs: Vec<f64> = (0..2000)
                .map(|_| gumbel_quantile(rng.sample(rand::distr::Open01)).unwrap())
                .collect();
            if ks_test(&xs, gumbel_cdf).unwrap().p_value < 0.05 {
                rejections += 1;
            }
        }
        assert!((2..=22).contains(&rejections), "{rejections} rejections");
    }
}

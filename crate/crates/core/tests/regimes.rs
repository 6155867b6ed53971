//! Distributional checks in well-conditioned designs (n1 + n2 well above p,
//! so the centering constants exist).

use std::sync::OnceLock;

use greatroot::extremes::{gumbel_quantile, norm_constants_exact};
use greatroot::centering::{pencil_centering, standardize, BetaDims};
use greatroot::painleve::{TableParams, TracyWidomTable};
use greatroot::simlab::{global_null_experiment, ks_test, null_roots, power_curve_cov};

fn table() -> &'static TracyWidomTable {
    static T: OnceLock<TracyWidomTable> = OnceLock::new();
    T.get_or_init(|| TracyWidomTable::build(TableParams::default()).unwrap())
}

#[test]
fn standardized_root_is_close_to_tw1() {
    let dims = BetaDims::new(20, 200, 30).unwrap();
    let cs = pencil_centering(dims).unwrap();
    let z: Vec<f64> = null_roots(dims, 3000, 31, 0)
        .unwrap()
        .into_iter()
        .map(|t| standardize(t, &cs).unwrap())
        .collect();
    let r = ks_test(&z, |x| table().tw1_cdf(x)).unwrap();
    assert!(r.p_value > 0.01, "{r:?}");
}

/// Size of the nominal level-α test if each standardized root were exactly
/// TW1: the Gumbel limit is conservative at small m.
fn exact_tw_size(m: u64, alpha: f64) -> f64 {
    let k = norm_constants_exact(table(), m).unwrap();
    let x = k.b_m + k.a_m * gumbel_quantile(1.0 - alpha).unwrap();
    1.0 - table().tw1_cdf(x).powi(m as i32)
}

#[test]
fn nominal_size_is_conservative_at_small_m() {
    // independent evaluation of 1 − F1(b_m + a_m G^{-1}(0.95))^m
    assert!((exact_tw_size(30, 0.05) - 0.0293).abs() < 5e-4);
    assert!((exact_tw_size(100, 0.05) - 0.0342).abs() < 5e-4);
}

#[test]
fn global_null_size_in_a_regular_design() {
    let dims = BetaDims::new(10, 60, 20).unwrap();
    let r = global_null_experiment(dims, 20, 600, 0.05, 32, table(), 0).unwrap();
    let target = exact_tw_size(20, 0.05);
    let se = (target * (1.0 - target) / 600.0).sqrt();
    assert!((r.rejection_rate - target).abs() <= 3.0 * se, "size {} vs {target}", r.rejection_rate);
    // normalized maxima follow the law of the max of m exact TW1 variables
    let k = norm_constants_exact(table(), 20).unwrap();
    let law = |y: f64| table().tw1_cdf(k.b_m + k.a_m * y).powi(20);
    let ks = ks_test(&r.z_scores, law).unwrap();
    assert!(ks.p_value > 0.01, "{ks:?}");
}

#[test]
fn covariance_power_rises_with_full_rank_samples() {
    let curve = power_curve_cov(&[1.0, 1.5, 2.5], 10, 20, 300, 0.05, 33, Some(40), table(), 0).unwrap();
    let target = exact_tw_size(20, 0.05);
    let se = (target * (1.0 - target) / 300.0).sqrt();
    assert!((curve.power[0] - target).abs() <= 3.0 * se, "{:?}", curve.power);
    assert!(curve.power[2] >= 0.99, "{:?}", curve.power);
    assert!(curve.power[1] >= curve.power[0]);
}

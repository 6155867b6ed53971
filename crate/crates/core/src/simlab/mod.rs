//! Monte Carlo experiments: max-TW vs Gumbel, null behaviour of the global
//! test, and power curves for the covariance and MANOVA batch tests.
//!
//! Every replication draws from its own [`RngStream`] derived from the base
//! seed and the replication index, and results are collected in index order,
//! so output is bit-identical for any worker count.

mod ks;
mod power;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use ks::{kolmogorov_sf, ks_test, ks_two_sample, KsReport};
pub use power::{
    power_curve_cov, power_curve_manova, sample_manova_batch, PowerConfig, PowerCurve, PowerKind,
};

use crate::battest::{batch_test, critical_value};
use crate::centering::{pencil_centering, BetaDims};
use crate::error::{domain, Result};
use crate::extremes::{gumbel_cdf, gumbel_quantile, norm_constants_exact, NormalizingConstants};
use crate::matvar::{null_root_from, RngStream};
use crate::painleve::TracyWidomTable;

/// Runs `f(0..count)` on `workers` threads (0 = all cores), keeping order.
pub fn run_indexed<T, F>(count: usize, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| domain(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| (0..count).into_par_iter().map(&f).collect())
}

/// Stream for replication `rep` of grid point `point`.
pub(crate) fn replication_stream(seed: u64, point: usize, rep: usize) -> RngStream {
    RngStream::new(seed, ((point as u64) << 32) | rep as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxTwResult {
    pub m: u64,
    pub reps: usize,
    pub seed: u64,
    pub consts: NormalizingConstants,
    /// Normalized maxima in replication order.
    pub samples: Vec<f64>,
    pub report: KsReport,
    /// `(Gumbel quantile at (i − ½)/reps, i-th order statistic)`.
    pub qq: Vec<(f64, f64)>,
}

/// `reps` draws of `(max of m TW1 − b_m)/a_m` with exact constants.
///
/// Since the TW1 quantile is increasing, the maximum of `m` quantile
/// transforms is the transform of the maximum uniform.
pub fn max_tw_experiment(
    m: u64,
    reps: usize,
    seed: u64,
    table: &TracyWidomTable,
    workers: usize,
) -> Result<MaxTwResult> {
    if reps == 0 {
        return Err(domain("need at least one replication"));
    }
    let consts = norm_constants_exact(table, m)?;
    let samples = run_indexed(reps, workers, |rep| {
        let mut rng = RngStream::new(seed, rep as u64).rng();
        let mut u_max = 0.0f64;
        for _ in 0..m {
            u_max = u_max.max(rng.sample(rand::distr::Open01));
        }
        Ok((table.tw1_quantile(u_max)? - consts.b_m) / consts.a_m)
    })?;
    let report = ks_test(&samples, gumbel_cdf)?;
    let qq = qq_pairs(&samples, gumbel_quantile)?;
    Ok(MaxTwResult { m, reps, seed, consts, samples, report, qq })
}

/// `(Q((i − ½)/n), x_(i))` pairs for a QQ plot.
pub fn qq_pairs<Q: Fn(f64) -> Result<f64>>(samples: &[f64], quantile: Q) -> Result<Vec<(f64, f64)>> {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| Ok((quantile((i as f64 + 0.5) / n)?, x)))
        .collect()
}

/// Least-squares slope of empirical on theoretical quantiles.
pub fn qq_slope(qq: &[(f64, f64)]) -> f64 {
    let n = qq.len() as f64;
    let mx = qq.iter().map(|p| p.0).sum::<f64>() / n;
    let my = qq.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = qq.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = qq.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `count` null greatest roots for sampling dimensions `(p, df(A), df(B))`.
pub fn null_roots(dims: BetaDims, count: usize, seed: u64, workers: usize) -> Result<Vec<f64>> {
    dims.validate()?;
    run_indexed(count, workers, |k| {
        let mut rng = RngStream::new(seed, k as u64).rng();
        null_root_from(dims, &mut rng)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalNullResult {
    pub dims: BetaDims,
    pub m: u64,
    pub reps: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Normalized maxima `Y^p`, one per replication.
    pub z_scores: Vec<f64>,
    pub report: KsReport,
    pub rejection_rate: f64,
    pub mc_se: f64,
}

/// Replicates the global test under its null: `m` independent null roots
/// per replication with sampling dimensions `dims`.
pub fn global_null_experiment(
    dims: BetaDims,
    m: u64,
    reps: usize,
    alpha: f64,
    seed: u64,
    table: &TracyWidomTable,
    workers: usize,
) -> Result<GlobalNullResult> {
    if reps == 0 || m == 0 {
        return Err(domain("need m >= 1 and reps >= 1"));
    }
    let cs = pencil_centering(dims)?;
    let consts = norm_constants_exact(table, m)?;
    critical_value(alpha, &cs, &consts)?;
    let outcomes = run_indexed(reps, workers, |rep| {
        let mut rng = RngStream::new(seed, rep as u64).rng();
        let thetas = (0..m)
            .map(|_| null_root_from(dims, &mut rng))
            .collect::<Result<Vec<f64>>>()?;
        let r = batch_test(&thetas, &cs, &consts, alpha)?;
        Ok((r.z_score, r.reject))
    })?;
    let z_scores: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    let rejections = outcomes.iter().filter(|o| o.1).count();
    let rate = rejections as f64 / reps as f64;
    Ok(GlobalNullResult {
        dims,
        m,
        reps,
        alpha,
        seed,
        report: ks_test(&z_scores, gumbel_cdf)?,
        z_scores,
        rejection_rate: rate,
        mc_se: (rate * (1.0 - rate) / reps as f64).sqrt(),
    })
}

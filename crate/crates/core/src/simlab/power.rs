//! Power curves for one-parameter alternative families.
//!
//! - Covariance: `m` pairs, `Σ_1 = I`, `Σ_2 = γ I`, both samples of size `n`.
//! - MANOVA: `m` batches of `r` groups × `n` observations, group `l` having
//!   mean `l^γ 1_p` and identity covariance.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{replication_stream, run_indexed};
use crate::battest::{batch_test, critical_value, manova_matrices, ManovaBatch};
use crate::centering::{pencil_centering, BetaDims, CenteringScaling};
use crate::error::{domain, Result};
use crate::extremes::{norm_constants_exact, NormalizingConstants};
use crate::matvar::{gaussian_matrix, greatest_root, wishart_from_data};
use crate::painleve::TracyWidomTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerKind {
    Covariance,
    Manova,
}

/// Resolved configuration of a power experiment. The worker count is
/// deliberately absent: it cannot affect results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    pub kind: PowerKind,
    pub p: u64,
    pub m: u64,
    pub reps: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Per-sample size (covariance) or per-group size (MANOVA).
    pub n: u64,
    /// Number of groups (MANOVA only).
    pub r: Option<u64>,
    /// `(p, df(A), df(B))`.
    pub sampling_dims: BetaDims,
    /// Dimensions fed to the centering formulas.
    pub centering_dims: BetaDims,
    pub gamma_grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCurve {
    pub gamma_grid: Vec<f64>,
    pub power: Vec<f64>,
    pub mc_se: Vec<f64>,
    pub config: PowerConfig,
}

fn check_common(gamma_grid: &[f64], m: u64, reps: usize) -> Result<()> {
    if gamma_grid.is_empty() {
        return Err(domain("empty gamma grid"));
    }
    if reps == 0 {
        return Err(domain("need at least one replication"));
    }
    if m < 2 {
        return Err(domain(format!("need m >= 2 sub-hypotheses, got {m}")));
    }
    Ok(())
}

struct Prepared {
    cs: CenteringScaling,
    consts: NormalizingConstants,
}

fn prepare(sampling: BetaDims, m: u64, alpha: f64, table: &TracyWidomTable) -> Result<Prepared> {
    let cs = pencil_centering(sampling)?;
    let consts = norm_constants_exact(table, m)?;
    critical_value(alpha, &cs, &consts)?;
    Ok(Prepared { cs, consts })
}

fn estimate<F>(grid: &[f64], reps: usize, workers: usize, reject: F) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(usize, usize, f64) -> Result<bool> + Sync + Send,
{
    let jobs = grid.len() * reps;
    let outcomes = run_indexed(jobs, workers, |job| {
        let (point, rep) = (job / reps, job % reps);
        reject(point, rep, grid[point])
    })?;
    let mut power = Vec::with_capacity(grid.len());
    let mut se = Vec::with_capacity(grid.len());
    for chunk in outcomes.chunks(reps) {
        let rate = chunk.iter().filter(|&&r| r).count() as f64 / reps as f64;
        power.push(rate);
        se.push((rate * (1.0 - rate) / reps as f64).sqrt());
    }
    Ok((power, se))
}

/// Covariance-equality power curve. `n` defaults to `p/2` (floored, with a
/// warning for odd `p`).
#[allow(clippy::too_many_arguments)]
pub fn power_curve_cov(
    gamma_grid: &[f64],
    p: u64,
    m: u64,
    reps: usize,
    alpha: f64,
    seed: u64,
    n: Option<u64>,
    table: &TracyWidomTable,
    workers: usize,
) -> Result<PowerCurve> {
    check_common(gamma_grid, m, reps)?;
    if let Some(g) = gamma_grid.iter().find(|g| !(**g >= 1.0 && g.is_finite())) {
        return Err(domain(format!("covariance alternatives need gamma >= 1, got {g}")));
    }
    let n = match n {
        Some(n) => n,
        None => {
            if p % 2 == 1 {
                log::warn!("p = {p} is odd; using n = floor(p/2) = {}", p / 2);
            }
            p / 2
        }
    };
    let sampling = BetaDims::new(p, n, n)?;
    let prep = prepare(sampling, m, alpha, table)?;
    let (pu, nu) = (p as usize, n as usize);

    let (power, mc_se) = estimate(gamma_grid, reps, workers, |point, rep, gamma| {
        let mut rng = replication_stream(seed, point, rep).rng();
        let scale = gamma.sqrt();
        let mut thetas = Vec::with_capacity(m as usize);
        for _ in 0..m {
            let a = wishart_from_data(&gaussian_matrix(nu, pu, &mut rng))?;
            let b = wishart_from_data(&(gaussian_matrix(nu, pu, &mut rng) * scale))?;
            thetas.push(greatest_root(&a, &b)?);
        }
        Ok(batch_test(&thetas, &prep.cs, &prep.consts, alpha)?.reject)
    })?;

    Ok(PowerCurve {
        gamma_grid: gamma_grid.to_vec(),
        power,
        mc_se,
        config: PowerConfig {
            kind: PowerKind::Covariance,
            p,
            m,
            reps,
            alpha,
            seed,
            n,
            r: None,
            sampling_dims: sampling,
            centering_dims: prep.cs.dims,
            gamma_grid: gamma_grid.to_vec(),
        },
    })
}

/// MANOVA power curve with group means `l^γ 1_p`.
#[allow(clippy::too_many_arguments)]
pub fn power_curve_manova(
    gamma_grid: &[f64],
    p: u64,
    r: u64,
    n: u64,
    m: u64,
    reps: usize,
    alpha: f64,
    seed: u64,
    table: &TracyWidomTable,
    workers: usize,
) -> Result<PowerCurve> {
    check_common(gamma_grid, m, reps)?;
    if let Some(g) = gamma_grid.iter().find(|g| !(**g >= 0.0 && **g <= 1.0)) {
        return Err(domain(format!("MANOVA alternatives need gamma in [0, 1], got {g}")));
    }
    if r < 2 || n < 2 || p == 0 {
        return Err(domain(format!("MANOVA needs r >= 2, n >= 2, p >= 1, got r = {r}, n = {n}, p = {p}")));
    }
    let sampling = BetaDims::new(p, r * (n - 1), r - 1)?;
    let prep = prepare(sampling, m, alpha, table)?;
    let (pu, ru, nu) = (p as usize, r as usize, n as usize);

    let (power, mc_se) = estimate(gamma_grid, reps, workers, |point, rep, gamma| {
        let mut rng = replication_stream(seed, point, rep).rng();
        let mut thetas = Vec::with_capacity(m as usize);
        for _ in 0..m {
            let (a, b) = manova_matrices(&sample_manova_batch(pu, ru, nu, gamma, &mut rng)?)?;
            thetas.push(greatest_root(&a, &b)?);
        }
        Ok(batch_test(&thetas, &prep.cs, &prep.consts, alpha)?.reject)
    })?;

    Ok(PowerCurve {
        gamma_grid: gamma_grid.to_vec(),
        power,
        mc_se,
        config: PowerConfig {
            kind: PowerKind::Manova,
            p,
            m,
            reps,
            alpha,
            seed,
            n,
            r: Some(r),
            sampling_dims: sampling,
            centering_dims: prep.cs.dims,
            gamma_grid: gamma_grid.to_vec(),
        },
    })
}

/// One batch of `r` groups × `n` observations with group means `l^γ 1_p`.
pub fn sample_manova_batch<R: Rng + ?Sized>(
    p: usize,
    r: usize,
    n: usize,
    gamma: f64,
    rng: &mut R,
) -> Result<ManovaBatch> {
    let groups = (1..=r)
        .map(|l| gaussian_matrix(n, p, rng).add_scalar((l as f64).powf(gamma)))
        .collect();
    ManovaBatch::new(groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::painleve::TableParams;
    use std::sync::OnceLock;

    fn table() -> &'static TracyWidomTable {
        static T: OnceLock<TracyWidomTable> = OnceLock::new();
        T.get_or_init(|| TracyWidomTable::build(TableParams::default()).unwrap())
    }

    #[test]
    fn half_sample_design_is_degenerate() {
        let r = power_curve_cov(&[1.0], 50, 10, 2, 0.05, 1, None, table(), 1);
        assert!(matches!(r, Err(Error::DegenerateRegime { .. })), "{r:?}");
    }

    #[test]
    fn grid_validation() {
        assert!(power_curve_cov(&[0.5], 10, 10, 2, 0.05, 1, Some(20), table(), 1).is_err());
        assert!(power_curve_manova(&[1.5], 5, 10, 3, 10, 2, 0.05, 1, table(), 1).is_err());
        assert!(power_curve_manova(&[], 5, 10, 3, 10, 2, 0.05, 1, table(), 1).is_err());
    }

    #[test]
    fn small_curves_are_reproducible_across_workers() {
        let grid = [0.0, 0.5, 1.0];
        let a = power_curve_manova(&grid, 4, 8, 3, 5, 20, 0.05, 3, table(), 1).unwrap();
        let b = power_curve_manova(&grid, 4, 8, 3, 5, 20, 0.05, 3, table(), 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.config.centering_dims, BetaDims { p: 4, n1: 7, n2: 16 });
        assert!(a.power.iter().all(|p| (0.0..=1.0).contains(p)));
        let c = power_curve_cov(&[1.0, 2.0], 6, 5, 20, 0.05, 3, Some(12), table(), 2).unwrap();
        assert_eq!(c.power.len(), 2);
        assert_eq!(c.config.n, 12);
    }
}

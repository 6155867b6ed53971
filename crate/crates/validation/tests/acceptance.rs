//! Acceptance criteria. Prints one `PASS`/`FAIL` line per criterion and
//! exits nonzero if any criterion fails. Tolerances are fixed; nothing is
//! retried or reseeded.

use std::path::Path;
use std::time::Instant;

use greatroot::centering::{pencil_centering, reparametrize, BetaDims};
use greatroot::extremes::{norm_constants_asymptotic, norm_constants_exact, LocationForm};
use greatroot::matvar::{greatest_root, pencil_eigenvalues, SymMatrix};
use greatroot::painleve::{tw1_tail, TableParams, TracyWidomTable};
use greatroot::simlab::{
    global_null_experiment, ks_test, ks_two_sample, max_tw_experiment, null_roots, power_curve_cov,
    power_curve_manova, PowerCurve,
};
use nalgebra::DMatrix;
use statrs::distribution::{Beta, ContinuousCDF};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lib<T>(r: greatroot::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("error[{}]: {e}", e.code()))
}

/// Collects sub-check results; the criterion passes only if all do.
#[derive(Default)]
struct Checks {
    ok: bool,
    parts: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks { ok: true, parts: Vec::new() }
    }

    fn add(&mut self, ok: bool, detail: String) {
        self.ok &= ok;
        self.parts.push(if ok { detail } else { format!("[x] {detail}") });
    }

    fn add_result(&mut self, r: Outcome) {
        match r {
            Ok(d) => self.add(true, d),
            Err(d) => self.add(false, d),
        }
    }

    fn finish(self) -> Outcome {
        check(self.ok, self.parts.join("; "))
    }
}

fn criterion_1(t: &TracyWidomTable) -> Outcome {
    let mut c = Checks::new();
    let n = 18_000;
    let h = 18.0 / n as f64;
    let mut s = t.tw1_pdf(-10.0) + t.tw1_pdf(8.0);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * t.tw1_pdf(-10.0 + i as f64 * h);
    }
    let integral = s * h / 3.0;
    c.add((1.0 - 1e-6..=1.0).contains(&integral), format!("integral of pdf over [-10, 8] = {integral:.12}"));

    let dh = 1e-4;
    let mut worst = 0.0f64;
    for i in 0..=1000 {
        let x = -6.0 + 10.0 * i as f64 / 1000.0;
        let fd = (t.tw1_cdf(x + dh) - t.tw1_cdf(x - dh)) / (2.0 * dh);
        worst = worst.max((fd - t.tw1_pdf(x)).abs());
    }
    c.add(worst <= 1e-6, format!("max |pdf - FD| on [-6, 4] = {worst:.2e}"));

    for (x, tol) in [(4.0, 0.1), (10.0, 0.03)] {
        let dev = (t.tw1_sf(x) / lib(tw1_tail(x))? - 1.0).abs();
        c.add(dev <= tol, format!("|tail ratio - 1| at {x} = {dev:.4} (<= {tol})"));
    }
    c.finish()
}

fn criterion_2(t: &TracyWidomTable) -> Outcome {
    let mut c = Checks::new();
    let mut devs = Vec::new();
    for x in [4.0, 6.0, 8.0, 10.0] {
        devs.push((lib(t.von_mises_ratio(x))? + 1.0).abs());
    }
    c.add(devs[3] <= 0.05, format!("|L(10) + 1| = {:.5}", devs[3]));
    let decreasing = devs.windows(2).all(|w| w[1] < w[0]);
    c.add(decreasing, format!("|L + 1| at 4, 6, 8, 10 = {devs:.5?}"));
    c.finish()
}

fn criterion_3(t: &TracyWidomTable) -> Outcome {
    let mut c = Checks::new();
    let mut worst = 0.0f64;
    for m in [2u64, 10, 500, 100_000] {
        let k = lib(norm_constants_exact(t, m))?;
        let mf = m as f64;
        worst = worst
            .max((mf * t.tw1_sf(k.b_m) - 1.0).abs())
            .max((k.a_m * mf * t.tw1_pdf(k.b_m) - 1.0).abs());
    }
    c.add(worst <= 1e-8, format!("max identity residual for m in {{2, 10, 500, 1e5}} = {worst:.2e}"));
    let mut gaps = Vec::new();
    for m in [1_000u64, 10_000, 100_000, 1_000_000] {
        let asym = lib(norm_constants_asymptotic(m, LocationForm::LambertW))?;
        let exact = lib(norm_constants_exact(t, m))?;
        gaps.push((asym.b_m / exact.b_m - 1.0).abs());
    }
    let approaching = gaps.windows(2).all(|w| w[1] < w[0]);
    c.add(approaching, format!("|b_asym/b_exact - 1| for m = 1e3..1e6: {gaps:.5?}"));
    c.finish()
}

fn criterion_4(t: &TracyWidomTable) -> Outcome {
    let r = lib(max_tw_experiment(500, 10_000, 20_240_601, t, 0))?;
    check(
        r.report.p_value > 0.05,
        format!("KS vs Gumbel: D = {:.5}, p = {:.4} (need > 0.05)", r.report.statistic, r.report.p_value),
    )
}

fn criterion_5(t: &TracyWidomTable) -> Outcome {
    let dims = BetaDims { p: 100, n1: 100, n2: 100 };
    let cs = lib(pencil_centering(dims))?;
    let roots = lib(null_roots(dims, 5000, 5, 0))?;
    let z: Vec<f64> = roots.iter().map(|&th| ((th / (1.0 - th)).ln() - cs.mu) / cs.sigma).collect();
    let r = lib(ks_test(&z, |x| t.tw1_cdf(x)))?;
    check(r.p_value > 0.01, format!("KS vs TW1: D = {:.5}, p = {:.4}", r.statistic, r.p_value))
}

fn size_check(dims: BetaDims, m: u64, reps: usize, t: &TracyWidomTable) -> Outcome {
    let r = lib(global_null_experiment(dims, m, reps, 0.05, 6, t, 0))?;
    let mut c = Checks::new();
    c.add(r.report.p_value > 0.01, format!("{dims} m={m} reps={reps}: KS p = {:.4}", r.report.p_value));
    let se = (0.05f64 * 0.95 / reps as f64).sqrt();
    c.add(
        (r.rejection_rate - 0.05).abs() <= 3.0 * se,
        format!("size = {:.4} (0.05 +/- {:.4})", r.rejection_rate, 3.0 * se),
    );
    c.finish()
}

fn criterion_6(t: &TracyWidomTable) -> Outcome {
    let mut c = Checks::new();
    c.add_result(size_check(BetaDims { p: 100, n1: 100, n2: 100 }, 30, 2000, t));
    c.add_result(size_check(BetaDims { p: 50, n1: 50, n2: 50 }, 20, 500, t));
    c.finish()
}

fn nondecreasing_within_noise(curve: &PowerCurve) -> bool {
    (1..curve.power.len()).all(|i| {
        let se = (curve.mc_se[i].powi(2) + curve.mc_se[i - 1].powi(2)).sqrt();
        curve.power[i] >= curve.power[i - 1] - 2.0 * se
    })
}

fn criterion_7(t: &TracyWidomTable) -> Outcome {
    let grid: Vec<f64> = (0..7).map(|i| 1.0 + 0.25 * i as f64).collect();
    let curve = lib(power_curve_cov(&grid, 50, 100, 500, 0.05, 7, None, t, 0))?;
    let mut c = Checks::new();
    let (p0, se0) = (curve.power[0], curve.mc_se[0].max((0.05f64 * 0.95 / 500.0).sqrt()));
    c.add((p0 - 0.05).abs() <= 3.0 * se0, format!("power at gamma=1: {p0:.4}"));
    c.add(curve.power[6] >= 0.99, format!("power at gamma=2.5: {:.4}", curve.power[6]));
    c.add(nondecreasing_within_noise(&curve), format!("curve {:.3?}", curve.power));
    c.finish()
}

/// Smallest gamma where the interpolated curve reaches 1/2 (infinite if never).
fn half_power_gamma(curve: &PowerCurve) -> f64 {
    let (g, p) = (&curve.gamma_grid, &curve.power);
    for i in 0..p.len() {
        if p[i] >= 0.5 {
            return if i == 0 { g[0] } else { g[i - 1] + (0.5 - p[i - 1]) / (p[i] - p[i - 1]) * (g[i] - g[i - 1]) };
        }
    }
    f64::INFINITY
}

fn criterion_8(t: &TracyWidomTable) -> Outcome {
    let mut c = Checks::new();
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let curve = lib(power_curve_manova(&grid, 30, 60, 3, 50, 300, 0.05, 8, t, 0))?;
    let se0 = (0.05f64 * 0.95 / 300.0).sqrt();
    c.add(
        (curve.power[0] - 0.05).abs() <= 3.0 * se0,
        format!("size at gamma=0: {:.4} (0.05 +/- {:.4})", curve.power[0], 3.0 * se0),
    );
    c.add(curve.power[10] >= 0.99, format!("power at gamma=1: {:.4}", curve.power[10]));

    // steepening: half-power point strictly decreasing in p, and no
    // significant reversal on the shared grid
    let shared = [0.05, 0.075, 0.1, 0.15];
    let mut curves = Vec::new();
    for p in [10u64, 30, 50] {
        let g: Vec<f64> = if p == 10 { vec![0.05, 0.075, 0.1, 0.15, 0.2, 0.3, 0.5] } else { shared.to_vec() };
        curves.push((p, lib(power_curve_manova(&g, p, 2 * p, 3, 50, 300, 0.05, 9, t, 0))?));
    }
    let halves: Vec<f64> = curves.iter().map(|(_, cv)| half_power_gamma(cv)).collect();
    c.add(
        halves.windows(2).all(|w| w[1] < w[0]),
        format!("half-power gamma for p = 10, 30, 50: {halves:.4?}"),
    );
    let mut reversals = 0;
    for w in curves.windows(2) {
        for (i, _) in shared.iter().enumerate() {
            let (a, b) = (&w[0].1, &w[1].1);
            let se = (a.mc_se[i].powi(2) + b.mc_se[i].powi(2)).sqrt().max(se0);
            if a.power[i] > b.power[i] + 2.0 * se {
                reversals += 1;
            }
        }
    }
    c.add(reversals == 0, format!("{reversals} significant reversals between consecutive p"));
    c.finish()
}

fn criterion_9() -> Outcome {
    let mut c = Checks::new();
    let dims = BetaDims { p: 1, n1: 7, n2: 4 };
    let draws = lib(null_roots(dims, 10_000, 12, 0))?;
    let beta = Beta::new(2.0, 3.5).expect("valid beta");
    let r = lib(ks_test(&draws, |x| beta.cdf(x)))?;
    c.add(r.p_value > 0.01, format!("p=1 vs Beta(2, 3.5): p = {:.4}", r.p_value));

    let sym = |v: [f64; 4]| SymMatrix::from_lower(DMatrix::from_row_slice(2, 2, &v)).expect("square");
    let i2 = SymMatrix::identity(2);
    let diag = sym([1.0, 0.0, 0.0, 3.0]);
    let hand = [
        lib(greatest_root(&i2, &i2))? == 0.5,
        lib(greatest_root(&diag, &i2))? == 0.5,
        lib(pencil_eigenvalues(&diag, &i2))?[1] == 0.25,
        lib(greatest_root(&i2.scaled(2.0), &sym([1.0, 1.0, 1.0, 1.0])))? == 0.5,
    ];
    c.add(hand.iter().all(|&h| h), format!("2x2 hand cases exact: {hand:?}"));

    let dims = BetaDims { p: 4, n1: 12, n2: 6 };
    let alt = lib(reparametrize(dims))?;
    let a = lib(null_roots(dims, 10_000, 13, 0))?;
    let b = lib(null_roots(alt, 10_000, 14, 0))?;
    let r = lib(ks_two_sample(&a, &b))?;
    c.add(r.p_value > 0.01, format!("{dims} vs {alt}: two-sample p = {:.4}", r.p_value));
    c.finish()
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let mut sink = Vec::new();
    greatroot_cli::run(std::iter::once("greatroot").chain(args.iter().copied()), &mut sink).map_err(|e| e.render())
}

fn criterion_10(cache: &Path) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let commands: [&[&str]; 3] = [
        &["simulate", "maxtw", "--m", "100", "--reps", "500", "--seed", "3"],
        &["simulate", "cov-power", "--p", "6", "--n", "12", "--m", "10", "--reps", "40", "--gamma", "1:2:0.5", "--seed", "3"],
        &["simulate", "manova-power", "--p", "4", "--r", "8", "--n", "3", "--m", "10", "--reps", "40", "--gamma", "0:1:0.25", "--seed", "3"],
    ];
    let mut c = Checks::new();
    for (k, cmd) in commands.iter().enumerate() {
        let mut files = Vec::new();
        for workers in ["1", "4", "1"] {
            let out = dir.path().join(format!("c{k}_w{workers}_{}.csv", files.len()));
            let mut args = cmd.to_vec();
            let (cache_s, out_s) = (cache.to_str().unwrap(), out.to_str().unwrap());
            args.extend(["--workers", workers, "--cache-dir", cache_s, "--out", out_s]);
            run_cli(&args)?;
            let csv = std::fs::read(&out).map_err(|e| e.to_string())?;
            let manifest = std::fs::read(out.with_extension("json")).map_err(|e| e.to_string())?;
            files.push((csv, manifest));
        }
        let same = files.windows(2).all(|w| w[0] == w[1]);
        c.add(same, format!("{}: 3 runs (workers 1, 4, 1) byte-identical = {same}", cmd[1]));
    }
    c.finish()
}

fn main() {
    let cache = tempfile::tempdir().expect("temp dir");
    let t0 = Instant::now();
    let table = TracyWidomTable::build(TableParams::default()).expect("default table builds");
    println!("acceptance: table built in {:.2?}", t0.elapsed());

    let criteria: Vec<Criterion> = vec![
        ("Tracy-Widom engine", Box::new(|| criterion_1(&table))),
        ("Von Mises condition", Box::new(|| criterion_2(&table))),
        ("normalizing constants", Box::new(|| criterion_3(&table))),
        ("max of TW1 vs Gumbel (m=500, 1e4 reps)", Box::new(|| criterion_4(&table))),
        ("TW convergence of the greatest root (100, 100, 100)", Box::new(|| criterion_5(&table))),
        ("global null: Gumbel limit and size", Box::new(|| criterion_6(&table))),
        ("covariance power curve, desk scale", Box::new(|| criterion_7(&table))),
        ("MANOVA power curve, desk scale", Box::new(|| criterion_8(&table))),
        ("oracle equivalence on small instances", Box::new(criterion_9)),
        ("determinism across worker counts", Box::new(|| criterion_10(cache.path()))),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS [{}] {name} ({secs:.1}s): {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL [{}] {name} ({secs:.1}s): {d}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

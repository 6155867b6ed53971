//! Command implementations. Each writes its primary output to `out`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use greatroot::battest::{
    batch_centering, batch_test, cov_batch_thetas, critical_value, manova_batch_thetas,
    single_critical_value, single_root_test, CovForm, CovPairSample, ManovaBatch,
};
use greatroot::centering::{logit, validate_regime, BetaDims};
use greatroot::extremes::{norm_constants_asymptotic, norm_constants_exact, LocationForm};
use greatroot::matvar::{wishart_from_data, SymMatrix};
use greatroot::painleve::{table_file_name, TableParams, TracyWidomTable};
use greatroot::simlab::{max_tw_experiment, power_curve_cov, power_curve_manova, qq_slope, PowerCurve};
use nalgebra::DMatrix;
use serde::Serialize;

use crate::args::{
    ConstantsArg, CritvalArgs, SimCommon, SimulateCommand, TableArgs, TestCommand, TestCommon,
    TwCommand,
};
use crate::cache;
use crate::error::{CliError, CliResult};
use crate::grid::parse_grid;
use crate::ingest::{read_grouped, read_manifest, read_matrix};
use crate::report::{
    CritvalConfig, CritvalReport, MaxTwConfig, SimulationManifest, TestConfig, TestKind,
    TestOutcome, TestReport,
};

/// Settings shared by all commands.
pub struct Context {
    pub cache_dir: PathBuf,
    pub workers: usize,
}

impl Context {
    fn table(&self, params: TableParams) -> CliResult<TracyWidomTable> {
        cache::load_or_build(&self.cache_dir, params)
    }
}

fn params(t: TableArgs) -> CliResult<TableParams> {
    if !(t.x_left < t.x_right) || !(t.tol > 0.0 && t.tol < 1.0) || t.n_points < 2 {
        return Err(CliError::Usage(format!(
            "invalid table parameters: need x_left < x_right, 0 < tol < 1, n_points >= 2 (got {t:?})"
        )));
    }
    Ok(TableParams { x_left: t.x_left, x_right: t.x_right, tol: t.tol, n_points: t.n_points })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::io(path, e)
}

fn w(out: &mut dyn Write, text: std::fmt::Arguments) -> CliResult<()> {
    out.write_fmt(text).map_err(io_err(Path::new("<stdout>")))
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

pub fn tw(ctx: &Context, cmd: TwCommand, out: &mut dyn Write) -> CliResult<()> {
    match cmd {
        TwCommand::Cdf { x, beta, table } => {
            let t = ctx.table(params(table)?)?;
            let v = if beta == 2 { t.tw2_cdf(x) } else { t.tw1_cdf(x) };
            w(out, format_args!("{v}\n"))
        }
        TwCommand::Pdf { x, table } => {
            let t = ctx.table(params(table)?)?;
            w(out, format_args!("{}\n", t.tw1_pdf(x)))
        }
        TwCommand::Quantile { u, table } => {
            let t = ctx.table(params(table)?)?;
            w(out, format_args!("{}\n", t.tw1_quantile(u)?))
        }
        TwCommand::Vonmises { x, table } => {
            let t = ctx.table(params(table)?)?;
            w(out, format_args!("{}\n", t.von_mises_ratio(x)?))
        }
        TwCommand::Table { out: dest, table } => {
            let p = params(table)?;
            let path = match dest {
                Some(path) => {
                    cache::store(&TracyWidomTable::build(p)?, &path)?;
                    path
                }
                None => {
                    ctx.table(p)?;
                    ctx.cache_dir.join(table_file_name(&p))
                }
            };
            w(out, format_args!("{}\n", path.display()))
        }
    }
}

pub fn critval_report(ctx: &Context, args: &CritvalArgs) -> CliResult<CritvalReport> {
    let dims = BetaDims::new(args.p, args.n1, args.n2)?;
    let table_params = TableParams::default();
    let regime = validate_regime(dims, args.m);
    let cs = batch_centering(dims)?;
    let (c_alpha, consts) = if args.m == 1 {
        (single_critical_value(args.alpha, &cs, &ctx.table(table_params)?)?, None)
    } else {
        let consts = match args.constants {
            ConstantsArg::Exact => norm_constants_exact(&ctx.table(table_params)?, args.m)?,
            ConstantsArg::Asymptotic => norm_constants_asymptotic(args.m, LocationForm::LambertW)?,
        };
        (critical_value(args.alpha, &cs, &consts)?, Some(consts))
    };
    Ok(CritvalReport {
        config: CritvalConfig {
            alpha: args.alpha,
            dims,
            m: args.m,
            constants: args.constants,
            table: table_params,
        },
        c_alpha,
        logit_c_alpha: logit(c_alpha)?,
        centering: cs,
        consts,
        regime,
    })
}

pub fn critval(ctx: &Context, args: CritvalArgs, out: &mut dyn Write) -> CliResult<()> {
    let r = critval_report(ctx, &args)?;
    if args.json {
        return w(out, format_args!("{}\n", json(&r)));
    }
    w(out, format_args!("dims (p, df(A), df(B)) = {}, m = {}, alpha = {}\n", r.config.dims, r.config.m, r.config.alpha))?;
    w(out, format_args!("c_alpha = {}\nlogit(c_alpha) = {}\n", r.c_alpha, r.logit_c_alpha))?;
    w(out, format_args!("mu = {}\nsigma = {}\n", r.centering.mu, r.centering.sigma))?;
    match &r.consts {
        Some(c) => w(out, format_args!("a_m = {}\nb_m = {}\n", c.a_m, c.b_m))?,
        None => w(out, format_args!("m = 1: threshold from the TW1 quantile, no a_m/b_m\n"))?,
    }
    for flag in &r.regime.flags {
        w(out, format_args!("warning: {flag}\n"))?;
    }
    Ok(())
}

fn centered(x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut c = x.clone();
    for mut col in c.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
    c
}

/// Reads one sample: cross-product matrix and its degrees of freedom.
fn load_sample(path: &Path, has_header: bool, center: bool, p: &mut Option<usize>) -> CliResult<(SymMatrix, u64)> {
    let x = read_matrix(path, has_header)?;
    match *p {
        None => *p = Some(x.ncols()),
        Some(p) if p != x.ncols() => {
            return Err(CliError::data(path, None, format!("has {} columns, expected {p} as in the first file", x.ncols())))
        }
        _ => {}
    }
    if center {
        if x.nrows() < 2 {
            return Err(CliError::data(path, None, "centering needs at least 2 rows"));
        }
        Ok((wishart_from_data(&centered(&x))?, x.nrows() as u64 - 1))
    } else {
        Ok((wishart_from_data(&x)?, x.nrows() as u64))
    }
}

fn decide(
    ctx: &Context,
    config: TestConfig,
    dims: BetaDims,
    thetas: Vec<f64>,
) -> CliResult<TestReport> {
    let m = thetas.len();
    let regime = validate_regime(dims, m as u64);
    let cs = batch_centering(dims)?;
    let table = ctx.table(config.table)?;
    let outcome = if m == 1 {
        TestOutcome::Single(single_root_test(thetas[0], &cs, &table, config.alpha)?)
    } else {
        let consts = norm_constants_exact(&table, m as u64)?;
        TestOutcome::Batch(batch_test(&thetas, &cs, &consts, config.alpha)?)
    };
    Ok(TestReport { config, dims, m, regime, outcome })
}

pub fn test_report(ctx: &Context, cmd: &TestCommand) -> CliResult<TestReport> {
    match cmd {
        TestCommand::Cov { manifest, pair, center, common } => {
            let pairs: Vec<(PathBuf, PathBuf)> = match manifest {
                Some(m) => read_manifest(m)?,
                None if !pair.is_empty() => pair.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect(),
                None => return Err(CliError::Usage("test cov needs --manifest or at least one --pair".into())),
            };
            let mut p = None;
            let mut samples = Vec::with_capacity(pairs.len());
            let mut sizes: Option<(u64, u64)> = None;
            for (f1, f2) in &pairs {
                let (s1, n1) = load_sample(f1, common.has_header, *center, &mut p)?;
                let (s2, n2) = load_sample(f2, common.has_header, *center, &mut p)?;
                match sizes {
                    None => sizes = Some((n1, n2)),
                    Some((e1, e2)) if (e1, e2) != (n1, n2) => {
                        let bad = if e1 != n1 { f1 } else { f2 };
                        return Err(CliError::data(bad, None, format!(
                            "pair has df ({n1}, {n2}); every pair needs the df ({e1}, {e2}) of the first pair"
                        )));
                    }
                    _ => {}
                }
                samples.push(CovPairSample { s1, s2, n1, n2, form: CovForm::CrossProduct });
            }
            let (dims, thetas) = cov_batch_thetas(&samples)?;
            let config = TestConfig {
                kind: TestKind::Cov,
                alpha: common.alpha,
                has_header: common.has_header,
                center: *center,
                inputs: pairs.into_iter().map(|(a, b)| vec![a, b]).collect(),
                table: TableParams::default(),
            };
            decide(ctx, config, dims, thetas)
        }
        TestCommand::Manova { files, common } => {
            let mut batches = Vec::with_capacity(files.len());
            for f in files {
                let groups = read_grouped(f, common.has_header)?;
                let n = groups[0].1.nrows();
                if let Some((label, g)) = groups.iter().find(|g| g.1.nrows() != n) {
                    return Err(CliError::data(f, None, format!(
                        "unbalanced design: group '{label}' has {} rows, group '{}' has {n}", g.nrows(), groups[0].0
                    )));
                }
                let batch = ManovaBatch::new(groups.into_iter().map(|g| g.1).collect())
                    .map_err(|e| CliError::data(f, None, e.to_string()))?;
                if let Some(first) = batches.first().map(ManovaBatch::dims) {
                    if batch.dims() != first {
                        return Err(CliError::data(f, None, format!(
                            "batch has dims {}, expected {} as in the first file", batch.dims(), first
                        )));
                    }
                }
                batches.push(batch);
            }
            let (dims, thetas) = manova_batch_thetas(&batches)?;
            let config = TestConfig {
                kind: TestKind::Manova,
                alpha: common.alpha,
                has_header: common.has_header,
                center: false,
                inputs: files.iter().map(|f| vec![f.clone()]).collect(),
                table: TableParams::default(),
            };
            decide(ctx, config, dims, thetas)
        }
    }
}

pub fn test(ctx: &Context, cmd: TestCommand, out: &mut dyn Write) -> CliResult<()> {
    let report = test_report(ctx, &cmd)?;
    let common: &TestCommon = match &cmd {
        TestCommand::Cov { common, .. } | TestCommand::Manova { common, .. } => common,
    };
    if let Some(path) = &common.out {
        fs::write(path, json(&report) + "\n").map_err(io_err(path))?;
    }
    if common.json {
        return w(out, format_args!("{}\n", json(&report)));
    }
    w(out, format_args!("dims (p, df(A), df(B)) = {}, m = {}\n", report.dims, report.m))?;
    let (theta, c, z, pv, alpha) = match &report.outcome {
        TestOutcome::Batch(r) => (r.theta_max, r.c_alpha, r.z_score, r.p_value, r.alpha),
        TestOutcome::Single(r) => (r.theta, r.c_alpha, r.z_score, r.p_value, r.alpha),
    };
    w(out, format_args!("theta_max = {theta}\nc_alpha = {c}\nz = {z}\np_value = {pv}\n"))?;
    let verdict = if report.outcome.reject() { "reject" } else { "do not reject" };
    w(out, format_args!("decision: {verdict} H0 at alpha = {alpha}\n"))?;
    for flag in &report.regime.flags {
        w(out, format_args!("warning: {flag}\n"))?;
    }
    Ok(())
}

/// `<out>.json` next to the CSV (extension replaced).
pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn write_outputs(common: &SimCommon, header: &str, rows: &[Vec<f64>], manifest: &SimulationManifest) -> CliResult<()> {
    let config_line = serde_json::to_string(manifest).expect("manifest serializes");
    let mut csv = format!("# {config_line}\n{header}\n");
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    fs::write(&common.out, csv).map_err(io_err(&common.out))?;
    let mpath = manifest_path(&common.out);
    fs::write(&mpath, json(manifest) + "\n").map_err(io_err(&mpath))?;
    Ok(())
}

fn curve_rows(c: &PowerCurve) -> Vec<Vec<f64>> {
    (0..c.gamma_grid.len()).map(|i| vec![c.gamma_grid[i], c.power[i], c.mc_se[i]]).collect()
}

pub fn simulate(ctx: &Context, cmd: SimulateCommand, out: &mut dyn Write) -> CliResult<()> {
    let table_params = TableParams::default();
    match cmd {
        SimulateCommand::Maxtw { m, reps, common } => {
            let table = ctx.table(table_params)?;
            let r = max_tw_experiment(m, reps, common.seed, &table, ctx.workers)?;
            let manifest = SimulationManifest::Maxtw {
                config: MaxTwConfig { m, reps, seed: common.seed, table: table_params },
                consts: r.consts,
                ks: r.report,
                qq_slope: qq_slope(&r.qq),
            };
            let rows: Vec<Vec<f64>> = r.qq.iter().map(|&(t, e)| vec![t, e]).collect();
            write_outputs(&common, "theoretical,empirical", &rows, &manifest)?;
            w(out, format_args!(
                "KS D = {}, p_value = {} (n = {})\n", r.report.statistic, r.report.p_value, r.report.n
            ))
        }
        SimulateCommand::CovPower { p, m, reps, n, alpha, gamma, full_scale, common } => {
            let grid = parse_grid(&gamma)?;
            let (dp, dm, dr) = if full_scale { (100, 500, 8000) } else { (50, 100, 500) };
            let table = ctx.table(table_params)?;
            let curve = power_curve_cov(
                &grid, p.unwrap_or(dp), m.unwrap_or(dm), reps.unwrap_or(dr), alpha, common.seed, n, &table, ctx.workers,
            )?;
            let manifest = SimulationManifest::CovPower {
                config: curve.config.clone(),
                table: table_params,
            };
            write_outputs(&common, "gamma,power,mc_se", &curve_rows(&curve), &manifest)?;
            print_curve(&curve, out)
        }
        SimulateCommand::ManovaPower { p, r, n, m, reps, alpha, gamma, full_scale, common } => {
            let grid = parse_grid(&gamma)?;
            let (dm, dr) = if full_scale { (500, 8000) } else { (50, 300) };
            let p = p.unwrap_or(30);
            let table = ctx.table(table_params)?;
            let curve = power_curve_manova(
                &grid, p, r.unwrap_or(2 * p), n, m.unwrap_or(dm), reps.unwrap_or(dr), alpha, common.seed, &table, ctx.workers,
            )?;
            let manifest = SimulationManifest::ManovaPower {
                config: curve.config.clone(),
                table: table_params,
            };
            write_outputs(&common, "gamma,power,mc_se", &curve_rows(&curve), &manifest)?;
            print_curve(&curve, out)
        }
    }
}

fn print_curve(c: &PowerCurve, out: &mut dyn Write) -> CliResult<()> {
    w(out, format_args!("gamma,power,mc_se\n"))?;
    for row in curve_rows(c) {
        w(out, format_args!("{},{},{}\n", row[0], row[1], row[2]))?;
    }
    Ok(())
}

//! JSON schemas of command outputs. Every report embeds its resolved
//! configuration so a file is self-describing.

use std::path::PathBuf;

use greatroot::battest::{BatchTestResult, SingleTestResult};
use greatroot::centering::{BetaDims, CenteringScaling, RegimeDiagnostics};
use greatroot::extremes::NormalizingConstants;
use greatroot::painleve::TableParams;
use greatroot::simlab::{KsReport, PowerConfig};
use serde::{Deserialize, Serialize};

use crate::args::ConstantsArg;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CritvalConfig {
    pub alpha: f64,
    /// Sampling dimensions `(p, df(A), df(B))`.
    pub dims: BetaDims,
    pub m: u64,
    pub constants: ConstantsArg,
    pub table: TableParams,
}

/// Output of `critval`. `consts` is absent for `m = 1`, where the
/// threshold comes directly from the TW1 quantile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CritvalReport {
    pub config: CritvalConfig,
    pub c_alpha: f64,
    pub logit_c_alpha: f64,
    pub centering: CenteringScaling,
    pub consts: Option<NormalizingConstants>,
    pub regime: RegimeDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestKind {
    Cov,
    Manova,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub kind: TestKind,
    pub alpha: f64,
    pub has_header: bool,
    /// Covariance test only: column means removed.
    pub center: bool,
    /// Input files: `[sample1, sample2]` per pair, or one per MANOVA batch.
    pub inputs: Vec<Vec<PathBuf>>,
    pub table: TableParams,
}

/// Either the global batch test (`m >= 2`) or the single-root test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum TestOutcome {
    Batch(BatchTestResult),
    Single(SingleTestResult),
}

impl TestOutcome {
    pub fn reject(&self) -> bool {
        match self {
            TestOutcome::Batch(r) => r.reject,
            TestOutcome::Single(r) => r.reject,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub config: TestConfig,
    pub dims: BetaDims,
    pub m: usize,
    pub regime: RegimeDiagnostics,
    pub outcome: TestOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxTwConfig {
    pub m: u64,
    pub reps: usize,
    pub seed: u64,
    pub table: TableParams,
}

/// Manifest written next to a simulation CSV and embedded in its first
/// line. It holds no paths, so reruns are byte-identical wherever written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum SimulationManifest {
    Maxtw {
        config: MaxTwConfig,
        consts: NormalizingConstants,
        ks: KsReport,
        qq_slope: f64,
    },
    CovPower { config: PowerConfig, table: TableParams },
    ManovaPower { config: PowerConfig, table: TableParams },
}

//! Batch union-intersection testing with the greatest root statistic.
//!
//! A global null hypothesis made of `m` independent sub-hypotheses, each
//! judged by Roy's greatest root, is tested through the maximum of the
//! standardized roots. After Johnstone's logit centering each root is
//! approximately Tracy–Widom (GOE), and the maximum of `m` such variables is
//! approximately Gumbel once normalized by `(a_m, b_m)`.
//!
//! Module map:
//!
//! - [`painleve`]: Hastings–McLeod solution of Painlevé II and the
//!   Tracy–Widom laws `F1`, `F2` built on it.
//! - [`extremes`]: Gumbel utilities, Lambert W, normalizing constants.
//! - [`centering`]: logit centering/scaling `(mu, sigma)` and regime checks.
//! - [`matvar`]: Gaussian and Wishart sampling, greatest root of a pencil.
//! - [`battest`]: covariance-equality and MANOVA batch tests.
//! - [`simlab`]: Monte Carlo experiments and Kolmogorov–Smirnov tools.

// `!(x > 0.0)` style guards deliberately treat NaN as out of range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod battest;
pub mod centering;
pub mod error;
pub mod extremes;
pub mod matvar;
pub mod painleve;
pub mod simlab;

pub use error::{Error, ErrorKind, Result};

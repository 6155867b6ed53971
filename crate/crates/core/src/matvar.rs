//! Gaussian/Wishart sampling and the greatest root of `det[B − θ(A + B)] = 0`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::centering::BetaDims;
use crate::error::{domain, Error, Result};

/// Dense symmetric matrix. The lower triangle is authoritative; the upper
/// triangle is mirrored from it on construction, so symmetry is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    m: DMatrix<f64>,
}

impl SymMatrix {
    /// Builds from a square matrix, mirroring its lower triangle.
    pub fn from_lower(mut m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(domain(format!("matrix is {}x{}, expected square", m.nrows(), m.ncols())));
        }
        if m.nrows() == 0 {
            return Err(domain("matrix order must be positive"));
        }
        let n = m.nrows();
        for j in 0..n {
            for i in 0..j {
                m[(i, j)] = m[(j, i)];
            }
        }
        Ok(SymMatrix { m })
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix { m: DMatrix::identity(n, n) }
    }

    pub fn order(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn scaled(&self, c: f64) -> Self {
        SymMatrix { m: &self.m * c }
    }

    pub fn add(&self, other: &SymMatrix) -> Result<Self> {
        check_orders(self, other)?;
        Ok(SymMatrix { m: &self.m + &other.m })
    }
}

/// `(seed, stream_id)` naming an independent, reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// `rows × p` matrix of i.i.d. `N(0, 1)`, filled row by row.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, p: usize, rng: &mut R) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(rows, p);
    for i in 0..rows {
        for j in 0..p {
            x[(i, j)] = rng.sample(StandardNormal);
        }
    }
    x
}

pub fn sample_gaussian_matrix(rows: usize, p: usize, stream: &RngStream) -> Result<DMatrix<f64>> {
    if rows == 0 || p == 0 {
        return Err(domain(format!("need rows, p >= 1, got {rows}x{p}")));
    }
    Ok(gaussian_matrix(rows, p, &mut stream.rng()))
}

/// `XᵀX`.
pub fn wishart_from_data(x: &DMatrix<f64>) -> Result<SymMatrix> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(domain("data matrix must have at least one row and one column"));
    }
    SymMatrix::from_lower(x.tr_mul(x))
}

fn check_orders(a: &SymMatrix, b: &SymMatrix) -> Result<()> {
    if a.order() != b.order() {
        return Err(Error::DimensionMismatch { expected: a.order(), found: b.order() });
    }
    Ok(())
}

/// `S = L D Lᵀ` with unit lower `L`; a pivot at or below `n·ε·max|diag|`
/// counts as zero. Returns `(L, d)`.
fn ldl(s: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let n = s.nrows();
    let scale = (0..n).map(|i| s[(i, i)].abs()).fold(0.0, f64::max);
    let tol = n as f64 * f64::EPSILON * scale;
    let mut l = DMatrix::identity(n, n);
    let mut d = vec![0.0; n];
    for j in 0..n {
        let mut dj = s[(j, j)];
        for k in 0..j {
            dj -= l[(j, k)] * l[(j, k)] * d[k];
        }
        if !(dj > tol) {
            return Err(Error::SingularPencil { index: j, pivot: dj });
        }
        d[j] = dj;
        for i in j + 1..n {
            let mut v = s[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)] * d[k];
            }
            l[(i, j)] = v / dj;
        }
    }
    Ok((l, d))
}

/// All roots of `det[B − θ(A + B)] = 0`, in descending order, unclamped.
///
/// With `A + B = L D Lᵀ` the roots are the eigenvalues of
/// `D^{-1/2} L⁻¹ B L⁻ᵀ D^{-1/2}`. The square-root-free factor keeps
/// diagonal pencils exact.
pub fn pencil_eigenvalues(a: &SymMatrix, b: &SymMatrix) -> Result<Vec<f64>> {
    check_orders(a, b)?;
    let s = &a.m + &b.m;
    let (l, d) = ldl(&s)?;
    let y = l
        .solve_lower_triangular(&b.m)
        .ok_or(Error::SingularPencil { index: 0, pivot: 0.0 })?;
    let mut c = l
        .solve_lower_triangular(&y.transpose())
        .ok_or(Error::SingularPencil { index: 0, pivot: 0.0 })?;
    let n = c.nrows();
    for j in 0..n {
        c[(j, j)] /= d[j];
        for i in 0..j {
            let v = 0.5 * (c[(i, j)] + c[(j, i)]) / (d[i] * d[j]).sqrt();
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    let mut ev: Vec<f64> = c.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    Ok(ev)
}

/// Largest `θ` with `det[B − θ(A + B)] = 0`, clamped to `[0, 1]`.
pub fn greatest_root(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    let top = pencil_eigenvalues(a, b)?[0];
    let clamped = top.clamp(0.0, 1.0);
    if (top - clamped).abs() > 1e-8 {
        log::warn!("greatest root {top} clamped to {clamped}");
    }
    Ok(clamped)
}

/// One null draw: `A` from `n1` rows, then `B` from `n2` rows of the same
/// stream, `Σ = I`.
pub fn sample_greatest_root_null(dims: BetaDims, stream: &RngStream) -> Result<f64> {
    dims.validate()?;
    let mut rng = stream.rng();
    null_root_from(dims, &mut rng)
}

pub(crate) fn null_root_from<R: Rng + ?Sized>(dims: BetaDims, rng: &mut R) -> Result<f64> {
    let p = dims.p as usize;
    let a = wishart_from_data(&gaussian_matrix(dims.n1 as usize, p, rng))?;
    let b = wishart_from_data(&gaussian_matrix(dims.n2 as usize, p, rng))?;
    greatest_root(&a, &b)
}

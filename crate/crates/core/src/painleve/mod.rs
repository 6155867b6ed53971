//! Tracy–Widom laws through the Hastings–McLeod solution of Painlevé II.
//!
//! `q'' = x q + 2 q³` with `q(x) ~ Ai(x)` as `x → ∞` is integrated from a
//! right anchor `x_right` toward the left, with the state augmented by
//!
//! ```text
//! I_q(x)  = ∫_x^∞ q(s) ds
//! I_q2(x) = ∫_x^∞ q(s)² ds
//! J_q2(x) = ∫_x^∞ (s − x) q(s)² ds
//! ```
//!
//! so that `log F2 = −J_q2` and `log F1 = −(J_q2 + I_q)/2` carry no separate
//! quadrature error.
//!
//! The leftward direction is stable for `x > 0` but the solution is a
//! separatrix for `x < 0`: relative errors grow like
//! `exp((2√2/3)|x|^{3/2})`, and double precision loses the solution
//! somewhere past `x ≈ −8`. Below [`LEFT_MATCH`] the table therefore takes
//! `q` from the left asymptotic expansion and only integrates the three
//! accumulators.

mod airy;
mod cache;
mod ode;

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::extremes::lambert_w0;
use ode::{dp5_step, Integrator, StepFailure};

pub use cache::{read_table, table_file_name, write_table};

/// Grid point below which `q` comes from the left asymptotic series.
pub const LEFT_MATCH: f64 = -7.0;

/// Whether a node is integrated as the full ODE (`true`) or on the
/// asymptotic side of [`LEFT_MATCH`].
fn on_ode_side(x: f64) -> bool {
    x >= LEFT_MATCH - 1e-9
}

/// Tightest per-step relative tolerance used; below this DP5 is roundoff bound.
const STEP_TOL_FLOOR: f64 = 1e-14;

/// Smallest admissible right anchor.
pub const MIN_X_RIGHT: f64 = airy::MIN_ARG;

/// Coefficients of `q(x) = √(−x/2) Σ c_k x^{−3k}` as `x → −∞`.
const LEFT_SERIES: [f64; 7] = [
    1.0,
    1.0 / 8.0,
    -73.0 / 128.0,
    10657.0 / 1024.0,
    -13912277.0 / 32768.0,
    8045883943.0 / 262144.0,
    -14518451390349.0 / 4194304.0,
];

/// Parameters that fully determine a table.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TableParams {
    pub x_left: f64,
    pub x_right: f64,
    pub tol: f64,
    pub n_points: usize,
}

impl Default for TableParams {
    fn default() -> Self {
        TableParams { x_left: -10.0, x_right: 8.0, tol: 1e-10, n_points: 1801 }
    }
}

impl TableParams {
    /// Grid with spacing at most `step` over `[x_left, x_right]`.
    pub fn with_step(x_left: f64, x_right: f64, tol: f64, step: f64) -> Self {
        let n_points = ((x_right - x_left) / step).ceil() as usize + 1;
        TableParams { x_left, x_right, tol, n_points }
    }

    pub fn grid_step(&self) -> f64 {
        (self.x_right - self.x_left) / (self.n_points - 1) as f64
    }

    fn validate(&self) -> Result<()> {
        if !(self.x_left < self.x_right) {
            return Err(Error::Precondition(format!(
                "x_left ({}) must be below x_right ({})",
                self.x_left, self.x_right
            )));
        }
        if !(self.x_right >= MIN_X_RIGHT) {
            return Err(Error::Precondition(format!(
                "x_right = {} is below {MIN_X_RIGHT}; the Airy boundary value is not accurate there",
                self.x_right
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Precondition(format!("tol must be positive, got {}", self.tol)));
        }
        if self.n_points < 2 {
            return Err(Error::Precondition("a table needs at least two grid points".into()));
        }
        Ok(())
    }
}

/// Values of the solution and its accumulators at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PainleveState {
    pub q: f64,
    pub q_prime: f64,
    pub i_q: f64,
    pub i_q2: f64,
    pub j_q2: f64,
}

impl PainleveState {
    fn from_array(y: [f64; 5]) -> Self {
        PainleveState { q: y[0], q_prime: y[1], i_q: y[2], i_q2: y[3], j_q2: y[4] }
    }

    fn to_array(self) -> [f64; 5] {
        [self.q, self.q_prime, self.i_q, self.i_q2, self.j_q2]
    }

    /// `log F1 = −(J_q2 + I_q)/2`.
    pub fn log_f1(&self) -> f64 {
        -0.5 * (self.j_q2 + self.i_q)
    }

    /// `log F2 = −J_q2`.
    pub fn log_f2(&self) -> f64 {
        -self.j_q2
    }

    /// `R1 = (q + I_q2)/2`, the logarithmic derivative of `F1`.
    pub fn r1(&self) -> f64 {
        0.5 * (self.q + self.i_q2)
    }

    /// `R1' = (q' − q²)/2`.
    pub fn r1_prime(&self) -> f64 {
        0.5 * (self.q_prime - self.q * self.q)
    }
}

/// Hastings–McLeod solution tabulated on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PainleveSolution {
    pub params: TableParams,
    pub grid: Vec<f64>,
    pub q: Vec<f64>,
    pub q_prime: Vec<f64>,
    pub i_q: Vec<f64>,
    pub i_q2: Vec<f64>,
    pub j_q2: Vec<f64>,
}

impl PainleveSolution {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn x_left(&self) -> f64 {
        self.params.x_left
    }

    pub fn x_right(&self) -> f64 {
        self.params.x_right
    }

    pub fn state(&self, i: usize) -> PainleveState {
        PainleveState {
            q: self.q[i],
            q_prime: self.q_prime[i],
            i_q: self.i_q[i],
            i_q2: self.i_q2[i],
            j_q2: self.j_q2[i],
        }
    }

    fn push(&mut self, x: f64, s: PainleveState) {
        self.grid.push(x);
        self.q.push(s.q);
        self.q_prime.push(s.q_prime);
        self.i_q.push(s.i_q);
        self.i_q2.push(s.i_q2);
        self.j_q2.push(s.j_q2);
    }

    fn reverse(&mut self) {
        self.grid.reverse();
        self.q.reverse();
        self.q_prime.reverse();
        self.i_q.reverse();
        self.i_q2.reverse();
        self.j_q2.reverse();
    }
}

fn painleve_rhs(x: f64, y: &[f64; 5]) -> [f64; 5] {
    let q = y[0];
    [y[1], x * q + 2.0 * q * q * q, -q, -q * q, -y[3]]
}

/// Left asymptotic `(q, q')`.
fn left_asymptotic(x: f64) -> (f64, f64) {
    let t = x.powi(-3);
    let mut sum = 0.0;
    let mut dsum = 0.0; // d/dx of the series
    let mut tp = 1.0;
    for (k, c) in LEFT_SERIES.iter().enumerate() {
        sum += c * tp;
        if k > 0 {
            dsum += c * (-3.0 * k as f64) * tp / x;
        }
        tp *= t;
    }
    let root = (-x / 2.0).sqrt();
    let droot = -1.0 / (4.0 * root);
    (root * sum, droot * sum + root * dsum)
}

/// Accumulator dynamics below the matching point, driven by the asymptotic q.
fn accumulator_rhs(x: f64, y: &[f64; 3]) -> [f64; 3] {
    let (q, _) = left_asymptotic(x);
    [-q, -q * q, -y[1]]
}

/// Airy continuation on the right tail, where `q = Ai` to within `O(Ai³)`.
pub fn airy_tail_state(x: f64) -> PainleveState {
    let (ai, aip) = airy::airy_ai_pair(x);
    PainleveState {
        q: ai,
        q_prime: aip,
        i_q: airy::airy_ai_integral(x),
        i_q2: airy::airy_ai_sq_integral(x, ai, aip),
        j_q2: airy::airy_ai_sq_moment(x, ai, aip),
    }
}

fn envelope_check(x: f64, y: &[f64; 5]) -> std::result::Result<(), String> {
    let q = y[0];
    let bound = 2.0 * ((-x).max(0.0) / 2.0).sqrt() + 1.0;
    if !q.is_finite() || !y.iter().all(|v| v.is_finite()) {
        Err("non-finite state".into())
    } else if q <= 0.0 {
        Err(format!("q = {q:e} left the positive branch"))
    } else if q > bound {
        Err(format!("q = {q:e} exceeds the envelope {bound:e}"))
    } else {
        Ok(())
    }
}

fn step_failure(f: StepFailure) -> Error {
    match f {
        StepFailure::Rejected { x, detail } => Error::NumericalInstability { x, detail },
        StepFailure::StepUnderflow { x } => {
            Error::NumericalInstability { x, detail: "step size underflow".into() }
        }
        StepFailure::TooManySteps { x } => {
            Error::NumericalInstability { x, detail: "step budget exhausted".into() }
        }
    }
}

/// Solves for the Hastings–McLeod function on the default 0.01 grid.
pub fn solve_hastings_mcleod(x_left: f64, x_right: f64, tol: f64) -> Result<PainleveSolution> {
    solve_on_grid(TableParams::with_step(x_left, x_right, tol, 0.01))
}

/// Solves for the Hastings–McLeod function on the grid described by `params`.
pub fn solve_on_grid(params: TableParams) -> Result<PainleveSolution> {
    params.validate()?;
    let n = params.n_points;
    let step = params.grid_step();
    let node = |i: usize| {
        if i == n - 1 {
            params.x_right
        } else {
            params.x_left + i as f64 * step
        }
    };

    let mut sol = PainleveSolution {
        params,
        grid: Vec::with_capacity(n),
        q: Vec::with_capacity(n),
        q_prime: Vec::with_capacity(n),
        i_q: Vec::with_capacity(n),
        i_q2: Vec::with_capacity(n),
        j_q2: Vec::with_capacity(n),
    };

    // Leftward, perturbations of q grow like exp((2√2/3)|x|^{3/2}) (about 4e7
    // by x = −7), so steps are controlled well below the requested tolerance.
    let step_tol = (params.tol * 1e-4).max(STEP_TOL_FLOOR);
    let integ = Integrator { tol: step_tol, h_max: step.min(0.05), max_steps: 1_000_000 };
    let acc = Integrator { tol: step_tol, h_max: step.min(0.05), max_steps: 1_000_000 };

    let mut state = airy_tail_state(params.x_right);
    sol.push(params.x_right, state);
    let mut h = step.min(0.01);
    let mut i = n - 1;
    while i > 0 {
        let x_hi = node(i);
        let x_lo = node(i - 1);
        let next = if on_ode_side(x_lo) {
            let y = integ
                .integrate(&painleve_rhs, &envelope_check, x_hi, state.to_array(), x_lo, &mut h)
                .map_err(step_failure)?;
            PainleveState::from_array(y)
        } else {
            let ok = |_x: f64, y: &[f64; 3]| {
                if y.iter().all(|v| v.is_finite()) {
                    Ok(())
                } else {
                    Err("non-finite accumulator".to_string())
                }
            };
            let y = acc
                .integrate(
                    &accumulator_rhs,
                    &ok,
                    x_hi,
                    [state.i_q, state.i_q2, state.j_q2],
                    x_lo,
                    &mut h,
                )
                .map_err(step_failure)?;
            let (q, qp) = left_asymptotic(x_lo);
            PainleveState { q, q_prime: qp, i_q: y[0], i_q2: y[1], j_q2: y[2] }
        };
        state = next;
        sol.push(x_lo, state);
        i -= 1;
    }
    sol.reverse();
    Ok(sol)
}

/// Tracy–Widom `F1`/`F2` evaluator backed by a [`PainleveSolution`].
///
/// Between grid points the state is re-integrated with one Dormand–Prince
/// step of at most half a grid spacing from the nearest node; above the
/// grid the Airy continuation is used; below it `log F` is extended with
/// the left-tail asymptotics, which is monotone toward 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TracyWidomTable {
    pub solution: PainleveSolution,
    pub log_f1: Vec<f64>,
    pub log_f2: Vec<f64>,
    pub r1: Vec<f64>,
    /// Order of the local re-integration step used between nodes.
    pub interpolation_order: u8,
}

impl TracyWidomTable {
    pub fn new(solution: PainleveSolution) -> Self {
        let n = solution.len();
        let mut log_f1 = Vec::with_capacity(n);
        let mut log_f2 = Vec::with_capacity(n);
        let mut r1 = Vec::with_capacity(n);
        for i in 0..n {
            let s = solution.state(i);
            log_f1.push(s.log_f1());
            log_f2.push(s.log_f2());
            r1.push(s.r1());
        }
        TracyWidomTable { solution, log_f1, log_f2, r1, interpolation_order: 5 }
    }

    pub fn build(params: TableParams) -> Result<Self> {
        Ok(Self::new(solve_on_grid(params)?))
    }

    pub fn params(&self) -> TableParams {
        self.solution.params
    }

    pub fn x_left(&self) -> f64 {
        self.solution.x_left()
    }

    pub fn x_right(&self) -> f64 {
        self.solution.x_right()
    }

    /// Solution state at `x`, for `x >= x_left`.
    pub fn state_at(&self, x: f64) -> PainleveState {
        let sol = &self.solution;
        let n = sol.len();
        if x >= sol.x_right() {
            return if x == sol.x_right() { sol.state(n - 1) } else { airy_tail_state(x) };
        }
        debug_assert!(x >= sol.x_left());
        let step = sol.params.grid_step();
        let pos = ((x - sol.x_left()) / step).clamp(0.0, (n - 1) as f64);
        let mut i = pos.round() as usize;
        // stay on the same side of the matching point as x
        if on_ode_side(x) && !on_ode_side(sol.grid[i]) {
            i += 1;
        } else if !on_ode_side(x) && on_ode_side(sol.grid[i]) && i > 0 {
            i -= 1;
        }
        let x0 = sol.grid[i];
        let h = x - x0;
        if h == 0.0 {
            return sol.state(i);
        }
        let s0 = sol.state(i);
        if on_ode_side(x0) {
            let (y, _) = dp5_step(&painleve_rhs, x0, &s0.to_array(), h);
            PainleveState::from_array(y)
        } else {
            let (y, _) = dp5_step(&accumulator_rhs, x0, &[s0.i_q, s0.i_q2, s0.j_q2], h);
            let (q, qp) = left_asymptotic(x);
            PainleveState { q, q_prime: qp, i_q: y[0], i_q2: y[1], j_q2: y[2] }
        }
    }

    fn left_extension_f1(&self, x: f64) -> f64 {
        let g = |x: f64| {
            let s = -x;
            -s.powi(3) / 24.0 - s.powf(1.5) / (3.0 * 2f64.sqrt()) - s.ln() / 16.0
        };
        self.log_f1[0] + g(x) - g(self.x_left())
    }

    fn left_extension_f2(&self, x: f64) -> f64 {
        let g = |x: f64| {
            let s = -x;
            -s.powi(3) / 12.0 - s.ln() / 8.0
        };
        self.log_f2[0] + g(x) - g(self.x_left())
    }

    /// Derivative of the left extension of `log F1`.
    fn left_extension_r1(x: f64) -> f64 {
        let s = -x;
        s * s / 8.0 + s.sqrt() / (2.0 * 2f64.sqrt()) + 1.0 / (16.0 * s)
    }

    /// `log F1(x)`.
    pub fn tw1_log_cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x == f64::INFINITY {
            return 0.0;
        }
        if x < self.x_left() {
            if self.x_left() >= 0.0 {
                return f64::NEG_INFINITY;
            }
            return self.left_extension_f1(x);
        }
        self.state_at(x).log_f1()
    }

    /// `F1(x)`, the GOE Tracy–Widom distribution function.
    pub fn tw1_cdf(&self, x: f64) -> f64 {
        self.tw1_log_cdf(x).exp()
    }

    /// `1 − F1(x)` without cancellation.
    pub fn tw1_sf(&self, x: f64) -> f64 {
        -self.tw1_log_cdf(x).exp_m1()
    }

    /// `F2(x) = exp(−J_q2(x))`, the GUE Tracy–Widom distribution function.
    pub fn tw2_cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        if x < self.x_left() {
            return self.left_extension_f2(x).exp();
        }
        self.state_at(x).log_f2().exp()
    }

    /// `F1'(x) = F1(x) R1(x)`.
    pub fn tw1_pdf(&self, x: f64) -> f64 {
        if !x.is_finite() {
            return 0.0;
        }
        if x < self.x_left() {
            return self.left_extension_f1(x).exp() * Self::left_extension_r1(x);
        }
        let s = self.state_at(x);
        (s.log_f1().exp() * s.r1()).max(0.0)
    }

    /// `F1^{-1}(u)`.
    pub fn tw1_quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(domain(format!("quantile level must lie in (0, 1), got {u}")));
        }
        let log_u = u.ln();
        let n = self.solution.len();

        if log_u <= self.log_f1[0] {
            return Ok(self.left_extension_quantile(log_u));
        }
        let upper = u >= 0.5;
        let log_s = (1.0 - u).ln(); // exact for u >= 0.5
        if log_u >= self.log_f1[n - 1] {
            return self.tail_quantile(1.0 - u);
        }

        // bracket on the monotone grid
        let j = self.log_f1.partition_point(|&v| v < log_u);
        let (mut lo, mut hi) = (self.solution.grid[j.saturating_sub(1)], self.solution.grid[j]);
        let residual = |x: f64| -> (f64, f64) {
            let s = self.state_at(x);
            let lf = s.log_f1();
            if upper {
                let sf = -lf.exp_m1();
                let pdf = lf.exp() * s.r1();
                (sf.ln() - log_s, -pdf / sf)
            } else {
                (lf - log_u, s.r1())
            }
        };
        // residual is increasing in x for both forms up to sign
        let sign = if upper { -1.0 } else { 1.0 };
        let mut x = 0.5 * (lo + hi);
        for _ in 0..100 {
            let (r, dr) = residual(x);
            // converged before the bracket update, which could otherwise
            // replace a rounded Newton step with a bisection midpoint
            if r.abs() < 1e-14 {
                return Ok(x);
            }
            if sign * r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let mut next = x - r / dr;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }

    fn left_extension_quantile(&self, log_u: f64) -> f64 {
        // bisection on the monotone extension
        let mut hi = self.x_left();
        let mut lo = hi - 1.0;
        while self.left_extension_f1(lo) > log_u {
            lo = hi + 2.0 * (lo - hi);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.left_extension_f1(mid) < log_u {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi.abs() {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Right-tail quantile for survival probability `s = 1 − u`.
    fn tail_quantile(&self, s: f64) -> Result<f64> {
        let x_right = self.x_right();
        let log_s = s.ln();
        let mut x = tail_inverse(s).max(x_right);
        for _ in 0..100 {
            let st = self.state_at(x);
            let lf = st.log_f1();
            let sf = -lf.exp_m1();
            if sf <= 0.0 {
                return Err(Error::PrecisionLoss {
                    x,
                    detail: "1 − F1 underflows while inverting the tail".into(),
                });
            }
            let r = sf.ln() - log_s;
            let dr = -lf.exp() * st.r1() / sf;
            let mut next = x - r / dr;
            if next < x_right {
                next = 0.5 * (x + x_right);
            }
            if (next - x).abs() <= 1e-15 * x.abs() || r.abs() < 1e-14 {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }

    /// `L(x) = (1 − F1) F1'' / F1'²`, which tends to −1 (Von Mises).
    pub fn von_mises_ratio(&self, x: f64) -> Result<f64> {
        if !(x >= self.x_left()) {
            return Err(domain(format!(
                "von Mises ratio needs x >= x_left = {}, got {x}",
                self.x_left()
            )));
        }
        let s = self.state_at(x);
        let lf = s.log_f1();
        let sf = -lf.exp_m1();
        let r1 = s.r1();
        if !(sf > 0.0) || !(r1 > 1e-150) {
            return Err(Error::PrecisionLoss {
                x,
                detail: format!("1 − F1 = {sf:e} and R1 = {r1:e} leave no significant digits"),
            });
        }
        let f = lf.exp();
        Ok(sf / f * (1.0 + s.r1_prime() / (r1 * r1)))
    }
}

/// Leading right-tail approximation `1 − F1(x) ≈ e^{−(2/3)x^{3/2}} / (4√π x^{3/4})`.
pub fn tw1_tail(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain(format!("tail formula needs x > 0, got {x}")));
    }
    Ok((-2.0 / 3.0 * x.powf(1.5)).exp() / (4.0 * PI.sqrt() * x.powf(0.75)))
}

/// Solves `tw1_tail(x) = s` exactly via Lambert W:
/// `x = [(3/4) W(1/(12π s²))]^{2/3}`.
pub fn tail_inverse(s: f64) -> f64 {
    let w = lambert_w0(1.0 / (12.0 * PI * s * s)).unwrap_or(0.0);
    (0.75 * w).powf(2.0 / 3.0)
}

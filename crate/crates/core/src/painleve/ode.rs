//! Dormand–Prince 5(4) stepping for small fixed-size systems.

// Butcher tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One Dormand–Prince step of size `h` (which may be negative).
///
/// Returns the fifth-order solution and the embedded error estimate.
pub fn dp5_step<const N: usize, F>(f: &F, x: f64, y: &[f64; N], h: f64) -> ([f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(x, y);
    let k2 = f(x + C2 * h, &axpy(y, h, &[(A21, &k1)]));
    let k3 = f(x + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]));
    let k4 = f(x + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(
        x + C5 * h,
        &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = f(
        x + h,
        &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y_new = axpy(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = f(x + h, &y_new);

    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y_new, err)
}

/// Relative error norm: max over components of `|err| / (tol * scale)`.
fn error_norm<const N: usize>(y: &[f64; N], y_new: &[f64; N], err: &[f64; N], tol: f64) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..N {
        let scale = y[i].abs().max(y_new[i].abs()).max(1e-300);
        worst = worst.max(err[i].abs() / (tol * scale));
    }
    worst
}

pub struct Integrator {
    pub tol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

#[derive(Debug)]
pub enum StepFailure {
    /// Step size collapsed below representable resolution.
    StepUnderflow { x: f64 },
    TooManySteps { x: f64 },
    /// The caller's state check rejected the state.
    Rejected { x: f64, detail: String },
}

impl Integrator {
    /// Integrates from `x0` to `x1` (either direction) with per-step
    /// relative error control. `h` carries the suggested step magnitude
    /// between calls.
    pub fn integrate<const N: usize, F, C>(
        &self,
        f: &F,
        check: &C,
        x0: f64,
        y0: [f64; N],
        x1: f64,
        h: &mut f64,
    ) -> Result<[f64; N], StepFailure>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        C: Fn(f64, &[f64; N]) -> Result<(), String>,
    {
        let dir = if x1 >= x0 { 1.0 } else { -1.0 };
        let mut x = x0;
        let mut y = y0;
        let mut steps = 0;
        while (x1 - x) * dir > 0.0 {
            if steps >= self.max_steps {
                return Err(StepFailure::TooManySteps { x });
            }
            steps += 1;

            let mut step = h.abs().min(self.h_max).min((x1 - x).abs());
            // land exactly on x1 rather than leaving a sliver
            if (x1 - x).abs() - step < 1e-12 * step {
                step = (x1 - x).abs();
            }
            let (y_new, err) = dp5_step(f, x, &y, dir * step);
            let e = error_norm(&y, &y_new, &err, self.tol);
            let factor = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };

            if e <= 1.0 {
                let x_new = if step == (x1 - x).abs() { x1 } else { x + dir * step };
                check(x_new, &y_new).map_err(|detail| StepFailure::Rejected { x: x_new, detail })?;
                x = x_new;
                y = y_new;
                *h = step * factor;
            } else {
                *h = step * factor;
                if *h < 1e-14 * (1.0 + x.abs()) {
                    return Err(StepFailure::StepUnderflow { x });
                }
            }
        }
        Ok(y)
    }
}

//! Airy function pieces needed on the right tail (`x >= 6`).
//!
//! Only the large-argument asymptotic expansion is implemented. For
//! `x >= 6` the optimally truncated series has relative error below
//! `e^{-2 zeta}` with `zeta = (2/3) x^{3/2}`, i.e. under `3e-9` relative and
//! `3e-14` absolute at `x = 6`, and far smaller further right.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Smallest argument for which the expansion is trusted.
pub const MIN_ARG: f64 = 6.0;

const MAX_TERMS: usize = 40;

/// Returns `(Ai(x), Ai'(x))` from the asymptotic expansion.
pub fn airy_ai_pair(x: f64) -> (f64, f64) {
    debug_assert!(x >= MIN_ARG - 1.0, "asymptotic Airy used at x = {x}");
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let inv = 1.0 / zeta;

    let mut u = 1.0;
    let mut sum_u = 1.0;
    let mut sum_v = 1.0;
    let mut pow = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / (216.0 * kf * (2.0 * kf - 1.0));
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        pow *= -inv;
        let tu = u * pow;
        if tu.abs() > last {
            // asymptotic series started to diverge
            break;
        }
        last = tu.abs();
        sum_u += tu;
        sum_v += v * pow;
        if tu.abs() < 1e-18 * sum_u.abs() {
            break;
        }
    }

    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let x4 = x.powf(0.25);
    (e / x4 * sum_u, -e * x4 * sum_v)
}

/// `∫_x^∞ Ai(s) ds` by composite Gauss–Legendre quadrature of the
/// asymptotic Ai.
pub fn airy_ai_integral(x: f64) -> f64 {
    let (nodes, weights) = gauss_legendre_16();
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    // stop once the integrand has decayed by e^{-50} relative to Ai(x)
    let t_end = (1.5 * (zeta + 50.0)).powf(2.0 / 3.0);
    // Ai changes by roughly a factor e per 1/sqrt(x)
    let panels = ((t_end - x) * x.sqrt()).ceil().max(1.0) as usize;
    let width = (t_end - x) / panels as f64;

    let mut total = 0.0;
    for k in 0..panels {
        let a = x + k as f64 * width;
        let mid = a + 0.5 * width;
        let mut s = 0.0;
        for (t, w) in nodes.iter().zip(weights) {
            s += w * airy_ai_pair(mid + 0.5 * width * t).0;
        }
        total += 0.5 * width * s;
    }
    total
}

/// `∫_x^∞ Ai(s)² ds = Ai'(x)² − x Ai(x)²`.
pub fn airy_ai_sq_integral(x: f64, ai: f64, aip: f64) -> f64 {
    aip * aip - x * ai * ai
}

/// `∫_x^∞ (s − x) Ai(s)² ds = (2x² Ai² − 2x Ai'² − Ai Ai') / 3`.
pub fn airy_ai_sq_moment(x: f64, ai: f64, aip: f64) -> f64 {
    (2.0 * x * x * ai * ai - 2.0 * x * aip * aip - ai * aip) / 3.0
}

fn gauss_legendre_16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                let jf = j as f64;
                p0 = ((2.0 * jf + 1.0) * z * p1 - jf * p2) / (jf + 1.0);
            }
            dp = nf * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

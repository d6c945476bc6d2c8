//! Adaptive Dormand–Prince 5(4) integrator for linear complex systems.
//!
//! The state may be rescaled between steps (valid because callers integrate
//! homogeneous linear systems); the accumulated natural-log factor is returned.

use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy)]
pub struct RkOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
    /// Rescale the state when its max-norm leaves `[1/limit, limit]`.
    pub renorm_limit: Option<f64>,
}

impl Default for RkOptions {
    fn default() -> Self {
        RkOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_steps: 1_000_000, renorm_limit: Some(1e8) }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RkOutcome<const N: usize> {
    /// Final state; the true solution is `y · exp(log_scale)`.
    pub y: [Complex64; N],
    pub log_scale: f64,
    pub steps: usize,
    pub rejected: usize,
}

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
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn comb<const N: usize>(y: &[Complex64; N], h: f64, terms: &[(f64, &[Complex64; N])]) -> [Complex64; N] {
    let mut out = *y;
    for (w, k) in terms {
        let s = h * w;
        for i in 0..N {
            out[i] += k[i] * s;
        }
    }
    out
}

fn max_norm<const N: usize>(y: &[Complex64; N]) -> f64 {
    y.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction).
pub fn integrate<const N: usize, F>(f: F, x0: f64, y0: [Complex64; N], x1: f64, h0: f64, opts: &RkOptions) -> Result<RkOutcome<N>>
where
    F: Fn(f64, &[Complex64; N]) -> [Complex64; N],
{
    let dir = (x1 - x0).signum();
    let span = (x1 - x0).abs();
    let mut x = x0;
    let mut y = y0;
    let mut log_scale = 0.0;
    let mut h = h0.abs().min(span).max(span * 1e-14) * dir;
    let mut k1 = f(x, &y);
    let mut steps = 0;
    let mut rejected = 0;
    if span == 0.0 {
        return Ok(RkOutcome { y, log_scale, steps, rejected });
    }
    loop {
        if steps + rejected >= opts.max_steps {
            return Err(Error::StepFailure(format!("step budget exhausted at x = {x}")));
        }
        let last = (x + h - x1) * dir >= 0.0;
        if last {
            h = x1 - x;
        }
        let k2 = f(x + C2 * h, &comb(&y, h, &[(A21, &k1)]));
        let k3 = f(x + C3 * h, &comb(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(x + C4 * h, &comb(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(x + C5 * h, &comb(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(x + h, &comb(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y_new = comb(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(x + h, &y_new);
        let mut err = 0.0f64;
        for i in 0..N {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let sc = opts.abs_tol + opts.rel_tol * y[i].norm().max(y_new[i].norm());
            err = err.max(e.norm() / sc);
        }
        if !err.is_finite() {
            rejected += 1;
            h *= 0.2;
            if h.abs() < span * 1e-15 {
                return Err(Error::StepFailure(format!("non-finite derivative near x = {x}")));
            }
            continue;
        }
        if err <= 1.0 {
            steps += 1;
            x = if last { x1 } else { x + h };
            y = y_new;
            k1 = k7;
            if let Some(limit) = opts.renorm_limit {
                let m = max_norm(&y);
                if m > limit || (m < 1.0 / limit && m > 0.0) {
                    let inv = 1.0 / m;
                    for i in 0..N {
                        y[i] *= inv;
                        k1[i] *= inv;
                    }
                    log_scale += m.ln();
                }
            }
            if last {
                return Ok(RkOutcome { y, log_scale, steps, rejected });
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            if h.abs() < span * 1e-15 {
                return Err(Error::StepFailure(format!("step size underflow near x = {x}")));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn oscillator_matches_exponential() {
        let lam = Complex64::new(-0.3, 2.0);
        let out = integrate(|_, y: &[Complex64; 1]| [lam * y[0]], 0.0, [Complex64::new(1.0, 0.0)], 3.0, 0.01, &RkOptions::default()).unwrap();
        let exact = (lam * 3.0).exp();
        assert_relative_eq!((out.y[0] * out.log_scale.exp() - exact).norm(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn renormalisation_tracks_huge_growth() {
        let out = integrate(
            |_, y: &[Complex64; 2]| [y[0] * 100.0, y[1] * 100.0],
            0.0,
            [Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)],
            20.0,
            1e-3,
            &RkOptions::default(),
        )
        .unwrap();
        let ln = out.y[0].norm().ln() + out.log_scale;
        assert_relative_eq!(ln, 2000.0, max_relative = 1e-9);
        assert_relative_eq!(out.y[1].norm() / out.y[0].norm(), 0.5, max_relative = 1e-9);
    }

    #[test]
    fn integrates_backwards() {
        let out = integrate(
            |x, _y: &[Complex64; 1]| [Complex64::new(x.cos(), 0.0)],
            2.0,
            [Complex64::new(0.0, 0.0)],
            0.0,
            0.1,
            &RkOptions { renorm_limit: None, ..Default::default() },
        )
        .unwrap();
        assert_relative_eq!(out.y[0].re, -(2f64).sin(), max_relative = 1e-9);
    }
}

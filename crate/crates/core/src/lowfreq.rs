//! Low-frequency expansion `Δ̂(λ, ξ) = α₀λ + ((e^{iξX} − 1)/(iX)) α₁ + …`,
//! the derived coefficients `α`, `γ`, `β = αγ`, parity indices, the
//! Serre-lemma comparison with the Whitham dispersion relation, and the
//! stability boundaries I (`α = 0`) and II (`γ = 0`).

use crate::error::{Error, Result};
use crate::evans::{split_from_trace, ProfileJumps};
use crate::modulation::{param_derivatives, whitham_jacobians};
use crate::profile::{h_hom, Wave, WaveParameters};
use crate::singular_ode::{EigenSolver, SolverOptions};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Bisection tolerance in `H̲₋` for boundary I.
pub const BOUNDARY_I_TOL: f64 = 1e-9;
/// Bisection tolerance in `H̲₋` for boundary II.
pub const BOUNDARY_II_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowFreqCoefficients {
    /// `∂_λΔ̂(0,0)`.
    pub alpha0: f64,
    /// `α₁/i` with `α₁ = ∂_ξΔ̂(0,0)`.
    pub alpha1_over_i: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    /// `∂²_λΔ̂(0,0)`.
    pub d2_lambda: f64,
    /// `∂²_{λξ}Δ̂(0,0)/i`.
    pub d2_lambda_xi_over_i: f64,
}

/// `q₀'(H_s)/c'(H_s) = 3H_s/(F+1)`.
fn q0_over_c_prime(wave: &Wave) -> f64 {
    3.0 * wave.hs() / (wave.froude() + 1.0)
}

/// `α₁/i` from the jump form `X({r}(H₋ − q₀'/c') − {H} r(H₋))`.
pub fn alpha1_closed(wave: &Wave) -> f64 {
    let j = ProfileJumps::of(wave);
    wave.period() * (j.dr * (wave.hm() - q0_over_c_prime(wave)) - j.dh * j.r_minus)
}

/// `α₁/i` from its polynomial form in `F`, `H̲₋`, `H̲₊`.
pub fn alpha1_polynomial(wave: &Wave) -> f64 {
    let f = wave.froude();
    let (m, p) = (wave.scaled.h_minus, wave.scaled.h_plus);
    let hs = wave.hs();
    let pre = hs * hs * (p - m) / (f * f * (f + 1.0) * m * m * p * p);
    let a = (f * f * m * m * p * p - 2.0 * (f + 1.0) * m * p + (m + p)) * ((f + 1.0) * m - 3.0);
    let b = (f + 1.0) * p * p * (f * f * m.powi(3) - (f + 1.0).powi(2) * m * m + 2.0 * (f + 1.0) * m - 1.0);
    wave.period() * pre * (a - b)
}

/// All low-frequency coefficients from one jet solve at `λ = 0`.
pub fn low_freq_coefficients(solver: &EigenSolver) -> Result<LowFreqCoefficients> {
    let wave = &solver.wave;
    let t = solver.trace(Complex64::new(0.0, 0.0), true)?;
    let j = ProfileJumps::of(wave);
    let split = split_from_trace(wave, &j, &t);
    let x = wave.period();
    let (dd0, dd1) = (split.dd0.expect("jet").to_complex(), split.dd1.expect("jet").to_complex());
    let a0c = dd0 + dd1;
    let a1c = Complex64::i() * x * split.d1.to_complex();
    let c = wave.c();
    let e_of = |u: Complex64, v: Complex64, (ah, aq): (f64, f64)| v * (ah + aq * c) - u * aq;
    let de = e_of(t.plus.du().to_complex(), t.plus.dv().to_complex(), j.coeffs_plus)
        - e_of(t.minus.du().to_complex(), t.minus.dv().to_complex(), j.coeffs_minus);
    let i0 = t.integral_tilde_h().to_complex();
    let di = t.integral_dtilde_h().to_complex();
    let d2l = (de * j.dh + i0 * j.dq - di * j.dr) * 2.0;
    let d2lx = Complex64::i() * x * dd1;
    let scale = a0c.norm().max(a1c.norm()).max(1e-300);
    for (name, z) in [("alpha0", a0c), ("d2_lambda", d2l)] {
        if z.im.abs() > 1e-8 * z.norm().max(scale) {
            return Err(Error::NumericalInconsistency(format!("{name} has imaginary part {:e}", z.im)));
        }
    }
    if a1c.re.abs() > 1e-8 * a1c.norm().max(scale) || d2lx.re.abs() > 1e-8 * d2lx.norm().max(scale) {
        return Err(Error::NumericalInconsistency("xi-derivatives are not purely imaginary".into()));
    }
    let alpha0 = a0c.re;
    if alpha0.abs() < 1e-12 * scale {
        return Err(Error::Alpha0Vanishes { value: alpha0 });
    }
    let alpha1_over_i = a1c.im;
    let alpha = alpha1_over_i / alpha0;
    let gamma_c = -x / 2.0 - (alpha / 2.0) * d2l / alpha0 - Complex64::i() * d2lx / alpha0;
    if gamma_c.im.abs() > 1e-6 * gamma_c.norm().max(1.0) {
        return Err(Error::NumericalInconsistency(format!("gamma has imaginary part {:e}", gamma_c.im)));
    }
    let gamma = gamma_c.re;
    Ok(LowFreqCoefficients { alpha0, alpha1_over_i, alpha, gamma, beta: alpha * gamma, d2_lambda: d2l.re, d2_lambda_xi_over_i: d2lx.im })
}

pub fn alpha0_and_alpha(solver: &EigenSolver) -> Result<(f64, f64)> {
    let c = low_freq_coefficients(solver)?;
    Ok((c.alpha0, c.alpha))
}

pub fn gamma_coefficient(solver: &EigenSolver) -> Result<(f64, f64)> {
    let c = low_freq_coefficients(solver)?;
    Ok((c.gamma, c.beta))
}

/// Parity information on real positive roots of `Δ̂(·, 0)` and `Δ̂(·, π/X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParityIndices {
    /// Odd number of positive real roots of `Δ̂(·, 0)`.
    pub coperiodic_odd: bool,
    /// Odd number of positive real roots of `Δ̂(·, π/X)`.
    pub subharmonic_odd: bool,
    /// Either count is odd, so a positive real eigenvalue exists. With
    /// `Δ̂(0, π/X) = −2α₁/(iX)` this holds whenever `α > 0`.
    pub forced_unstable: bool,
}

/// Uses positivity of `Δ̂(λ, 0)` and `Δ̂(λ, π/X)` for large real λ.
pub fn parity_indices(c: &LowFreqCoefficients) -> ParityIndices {
    let coperiodic_odd = c.alpha0 < 0.0;
    // Δ̂(0, π/X) = −2α₁/(iX).
    let subharmonic_odd = c.alpha1_over_i > 0.0;
    ParityIndices { coperiodic_odd, subharmonic_odd, forced_unstable: coperiodic_odd || subharmonic_odd }
}

/// Prefactor `Γ₀ = X³ r(H₊)/(c'(H_s) ∂_{H₋}x₋)` of the Serre comparison.
pub fn serre_prefactor(wave: &Wave) -> f64 {
    let d = param_derivatives(wave);
    let c_prime = (1.0 + 1.0 / wave.froude()) / (2.0 * wave.hs().sqrt());
    wave.period().powi(3) * wave.source(wave.hp()) / (c_prime * d.d_xminus_d_hminus)
}

/// `Γ₀ D^W(λ − c(e^{iξX}−1)/X, (e^{iξX}−1)/(iX))` with physical Jacobians.
pub fn serre_model(wave: &Wave, lambda: Complex64, xi: f64) -> Complex64 {
    let x = wave.period();
    let e1 = Complex64::from_polar(1.0, xi * x) - 1.0;
    let jac = whitham_jacobians(wave).physical(wave);
    let lam = lambda - e1 * wave.c() / x;
    let xi_eff = e1 / (Complex64::i() * x);
    jac.dispersion(lam, xi_eff) * serre_prefactor(wave)
}

/// `|Δ(λ, ξ) − Γ₀ D^W(…)|`.
pub fn serre_consistency(solver: &EigenSolver, lambda: Complex64, xi: f64) -> Result<f64> {
    let d = crate::evans::evans(solver, lambda, xi)?.to_complex();
    Ok((d - serre_model(&solver.wave, lambda, xi)).norm())
}

pub(crate) fn bisect<F: FnMut(f64) -> Result<f64>>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Admissible range of `H̲₋` used for boundary searches.
fn search_window(froude: f64) -> (f64, f64) {
    let hh = h_hom(froude);
    (hh * (1.0 + 2e-8), 1.0 - 1e-6)
}

fn scaled_wave(froude: f64, h: f64) -> Result<Wave> {
    Wave::new(WaveParameters::scaled(froude, h))
}

/// Boundary I at Froude number `froude`: the uppermost sign change of `α₁`.
pub fn boundary_i(froude: f64) -> Result<f64> {
    let (lo, hi) = search_window(froude);
    let f = |h: f64| -> Result<f64> { Ok(alpha1_polynomial(&scaled_wave(froude, h)?)) };
    let n = 400;
    let mut prev_h = hi;
    let mut prev = f(hi)?;
    for k in 1..=n {
        let h = hi - (hi - lo) * k as f64 / n as f64;
        let v = f(h)?;
        if v.signum() != prev.signum() {
            return bisect(f, h, prev_h, BOUNDARY_I_TOL);
        }
        prev = v;
        prev_h = h;
    }
    Err(Error::NoSignChange { lo, hi })
}

/// Closest relative distance to `H_hom` probed by the boundary II search.
pub const BOUNDARY_II_MIN_MARGIN: f64 = 1e-13;

/// `γ` for a wave that may sit inside the default homoclinic guard.
fn gamma_near_homoclinic(froude: f64, h: f64) -> Result<f64> {
    let w = Wave::near_homoclinic(WaveParameters::scaled(froude, h), 0.5 * BOUNDARY_II_MIN_MARGIN)?;
    Ok(low_freq_coefficients(&EigenSolver::with_options(&w, SolverOptions::default()))?.gamma)
}

/// Boundary II at Froude number `froude`: the lowest sign change of `γ`.
///
/// The crossing hugs the homoclinic edge (relative distance of order 1e−9
/// at `F = 2.5`, smaller for larger `F`), so the scan runs in the
/// logarithm of `H̲₋/H_hom − 1` and reaches below the default guard.
pub fn boundary_ii(froude: f64) -> Result<f64> {
    let hh = h_hom(froude);
    let (_, hi) = search_window(froude);
    let at = |t: f64| hh * (1.0 + t.exp());
    let (t_lo, t_hi) = (BOUNDARY_II_MIN_MARGIN.ln(), (hi / hh - 1.0).ln());
    let n = 120;
    let grid: Vec<f64> = (0..=n).map(|k| t_lo + (t_hi - t_lo) * k as f64 / n as f64).collect();
    let vals: Vec<Result<f64>> = grid.par_iter().map(|&t| gamma_near_homoclinic(froude, at(t))).collect();
    let mut prev: Option<(f64, f64)> = None;
    for (&t, v) in grid.iter().zip(vals) {
        let v = v?;
        if let Some((pt, pv)) = prev {
            if v.signum() != pv.signum() {
                // Bisect in the log-distance, then report the height.
                let g = |t: f64| gamma_near_homoclinic(froude, at(t));
                let rel = (BOUNDARY_II_TOL / (at(t) - hh)).min(1e-3);
                let tb = bisect(g, pt, t, rel)?;
                return Ok(at(tb));
            }
        }
        prev = Some((t, v));
    }
    Err(Error::NoSignChange { lo: at(t_lo), hi })
}

/// One Froude number of the low-frequency boundary diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub froude: f64,
    pub hminus_i: Option<f64>,
    pub hminus_ii: Option<f64>,
    pub hplus_i: Option<f64>,
    pub hplus_ii: Option<f64>,
    pub period_i: Option<f64>,
    pub period_ii: Option<f64>,
}

/// Boundaries I and II for each Froude number, in the `H̲₋`, `H̲₊` and `X̲`
/// coordinates; computed in parallel and returned in input order.
pub fn boundary_curves(froudes: &[f64]) -> Vec<BoundaryPoint> {
    froudes
        .par_iter()
        .map(|&f| {
            let one = boundary_i(f).ok();
            let two = boundary_ii(f).ok();
            let hp = |h: Option<f64>| h.map(crate::profile::z_plus);
            let per = |h: Option<f64>| h.and_then(|h| scaled_wave(f, h).ok()).map(|w| w.scaled.period);
            BoundaryPoint { froude: f, hminus_i: one, hminus_ii: two, hplus_i: hp(one), hplus_ii: hp(two), period_i: per(one), period_ii: per(two) }
        })
        .collect()
}

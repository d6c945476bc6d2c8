//! Large-|λ| structure of the determinant: the diagonalised rates `μ̃₊`,
//! `γ̃₊`, the prefactor `γ₀`, the high-frequency index **I** and the
//! asymptotic line `Re λ = ln(I)/∫μ̃₊`.
//!
//! With `s = √H/F`, `m = q₀/H`, `D = s² − m²` and `S = Ψ_full`, the
//! interior system in `W = (cH − q, h)` diagonalises at leading order with
//! rates `μ± = −m ± s`; the smooth factors are
//!
//! ```text
//! μ̃₊ = 1/(s + m)
//! γ̃₊ = (C₀)₁₁/D = (Q + q₀S)/(sH²) + (s − m)Ṡ/(2s) + S(m − s/2)/(2sH)
//! ```
//!
//! where `Ṡ = dS/dH`. The second form uses `DṠ = r_h + c r_q − D_H S`,
//! which follows from differentiating `D S = r` along the profile; it has
//! no `0/0` at the sonic point.

use crate::error::Result;
use crate::evans::evans_split;
use crate::profile::Wave;
use crate::singular_ode::EigenSolver;
use num_complex::Complex64;
use serde::Serialize;

/// Relative tolerance of the x-integrals.
pub const HF_QUAD_TOL: f64 = 1e-11;

/// `√H/F + q₀/H`, the inverse of `μ̃₊`.
fn s_plus_m(wave: &Wave, h: f64) -> f64 {
    h.sqrt() / wave.froude() + wave.q0() / h
}

/// `μ̃₊(H) = (√p'(H) + q₀/H)⁻¹`.
pub fn mu_tilde_plus(wave: &Wave, h: f64) -> f64 {
    1.0 / s_plus_m(wave, h)
}

/// `γ̃₊(H)` in closed form.
pub fn gamma_tilde_plus(wave: &Wave, h: f64) -> f64 {
    let s = h.sqrt() / wave.froude();
    let m = wave.q0() / h;
    let slope = wave.slope(h);
    let sdot = wave.slope_dot(h);
    let q = wave.flux(h);
    (q + wave.q0() * slope) / (s * h * h) + (s - m) * sdot / (2.0 * s) + slope * (m - 0.5 * s) / (2.0 * s * h)
}

/// `γ₀ = √H_s F(F−2)/(2(F+1)) {H} (√H₊/F + q₀/H₊)²`.
pub fn prefactor(wave: &Wave) -> f64 {
    let f = wave.froude();
    wave.hs().sqrt() * f * (f - 2.0) / (2.0 * (f + 1.0)) * (wave.hp() - wave.hm()) * s_plus_m(wave, wave.hp()).powi(2)
}

/// Outcome of the comparison between **I** and its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HfVerdict {
    /// No spectrum at large |λ| with `Re λ ≥ −θ`.
    HfClear,
    /// Two unbounded spectral curves approach `Re λ = asymptote`.
    HfCurve,
}

impl HfVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            HfVerdict::HfClear => "hf_clear",
            HfVerdict::HfCurve => "hf_curve",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HighFreqData {
    /// `∫₀^X μ̃₊ dx`.
    pub mu_tilde_plus_integral: f64,
    /// `∫₀^X γ̃₊ dx`.
    pub gamma_tilde_plus_integral: f64,
    /// `∫_{x_s}^X μ̃₊ dx`.
    pub mu_tilde_plus_sonic_integral: f64,
    /// `∫_{x_s}^X γ̃₊ dx`.
    pub gamma_tilde_plus_sonic_integral: f64,
    pub index: f64,
    pub prefactor: f64,
    /// `ln(I)/∫μ̃₊`.
    pub asymptote: f64,
    /// `exp(−((F−2)/(2√H_s)) ∫μ̃₊)`.
    pub threshold: f64,
    pub verdict: HfVerdict,
}

/// The high-frequency index and its companions.
pub fn hf_index(wave: &Wave) -> Result<HighFreqData> {
    let (hm, hs, hp) = (wave.hm(), wave.hs(), wave.hp());
    let mu = |h: f64| mu_tilde_plus(wave, h);
    let ga = |h: f64| gamma_tilde_plus(wave, h);
    // Split at H_s so the sonic-to-shock pieces come for free.
    let mu_lo = wave.integrate_dx(mu, hm, hs, HF_QUAD_TOL)?;
    let mu_hi = wave.integrate_dx(mu, hs, hp, HF_QUAD_TOL)?;
    let ga_lo = wave.integrate_dx(ga, hm, hs, HF_QUAD_TOL)?;
    let ga_hi = wave.integrate_dx(ga, hs, hp, HF_QUAD_TOL)?;
    let (mu_int, ga_int) = (mu_lo + mu_hi, ga_lo + ga_hi);
    let ratio = s_plus_m(wave, hm) / s_plus_m(wave, hp);
    let index = ratio * ratio * (-ga_int).exp();
    let threshold = (-(wave.froude() - 2.0) / (2.0 * hs.sqrt()) * mu_int).exp();
    let verdict = if index <= threshold { HfVerdict::HfClear } else { HfVerdict::HfCurve };
    Ok(HighFreqData {
        mu_tilde_plus_integral: mu_int,
        gamma_tilde_plus_integral: ga_int,
        mu_tilde_plus_sonic_integral: mu_hi,
        gamma_tilde_plus_sonic_integral: ga_hi,
        index,
        prefactor: prefactor(wave),
        asymptote: index.ln() / mu_int,
        threshold,
        verdict,
    })
}

/// `Δ(λ, 0) / (γ₀ λ² e^{∫_{x_s}^X (λμ̃₊ + γ̃₊)})` for each λ.
pub fn hf_asymptotic_check(solver: &EigenSolver, lambdas: &[Complex64]) -> Result<Vec<Complex64>> {
    let hf = hf_index(&solver.wave)?;
    lambdas
        .iter()
        .map(|&l| {
            let d = evans_split(solver, l)?.evans(0.0);
            let model_ln = (hf.prefactor * l * l).ln() + l * hf.mu_tilde_plus_sonic_integral + hf.gamma_tilde_plus_sonic_integral;
            let ln_ratio = Complex64::new(d.ln_norm(), d.arg()) - model_ln;
            Ok(ln_ratio.exp())
        })
        .collect()
}

/// Smallest sampled real λ beyond which the determinant stays within
/// `tol` of the two-term model; an empirical stand-in for `R₀`.
pub fn empirical_radius(solver: &EigenSolver, samples: &[f64], tol: f64) -> Result<Option<f64>> {
    let ls: Vec<Complex64> = samples.iter().map(|&l| Complex64::new(l, 0.0)).collect();
    let ratios = hf_asymptotic_check(solver, &ls)?;
    let mut radius = None;
    for (l, r) in samples.iter().zip(ratios).rev() {
        if (r - 1.0).norm() <= tol {
            radius = Some(*l);
        } else {
            break;
        }
    }
    Ok(radius)
}

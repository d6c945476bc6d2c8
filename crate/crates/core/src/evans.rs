//! Periodic Evans–Lopatinsky determinant `Δ(λ, ξ) = λ Δ̂(λ, ξ)` and its
//! ξ-independent split `Δ̂ = d₀ + e^{iξX} d₁`.

use crate::error::Result;
use crate::profile::Wave;
use crate::scaled::ScaledComplex;
use crate::singular_ode::{EigenSolver, EigenTrace};
use num_complex::Complex64;

/// Jump constants of the profile entering every determinant.
#[derive(Debug, Clone, Copy)]
pub struct ProfileJumps {
    /// `{H} = H₊ − H₋`.
    pub dh: f64,
    /// `{Q} = c{H}`.
    pub dq: f64,
    /// `r(H₋)` with `r = H − Q²/H²`.
    pub r_minus: f64,
    /// `{r}`.
    pub dr: f64,
    pub coeffs_minus: (f64, f64),
    pub coeffs_plus: (f64, f64),
}

impl ProfileJumps {
    pub fn of(wave: &Wave) -> Self {
        let (hm, hp) = (wave.hm(), wave.hp());
        ProfileJumps {
            dh: hp - hm,
            dq: wave.c() * (hp - hm),
            r_minus: wave.source(hm),
            dr: wave.source(hp) - wave.source(hm),
            coeffs_minus: wave.flux_perturbation_coeffs(hm),
            coeffs_plus: wave.flux_perturbation_coeffs(hp),
        }
    }
}

/// `Δ̂(λ, ξ) = d₀(λ) + e^{iξX} d₁(λ)`, with λ-derivatives when available.
#[derive(Debug, Clone, Copy)]
pub struct EvansSplit {
    pub lambda: Complex64,
    pub d0: ScaledComplex,
    pub d1: ScaledComplex,
    pub dd0: Option<ScaledComplex>,
    pub dd1: Option<ScaledComplex>,
    pub period: f64,
}

fn sc(z: Complex64) -> ScaledComplex {
    ScaledComplex::from_complex(z)
}

impl EvansSplit {
    pub fn bloch(&self, xi: f64) -> Complex64 {
        Complex64::from_polar(1.0, xi * self.period)
    }

    pub fn hat(&self, xi: f64) -> ScaledComplex {
        self.d0 + self.d1 * self.bloch(xi)
    }

    pub fn hat_complex(&self, xi: f64) -> Complex64 {
        self.hat(xi).to_complex()
    }

    /// `∂_λ Δ̂(λ, ξ)`; requires a jet solve.
    pub fn dhat(&self, xi: f64) -> Option<ScaledComplex> {
        Some(self.dd0? + self.dd1? * self.bloch(xi))
    }

    pub fn evans(&self, xi: f64) -> ScaledComplex {
        self.hat(xi) * self.lambda
    }
}

/// Assembles the split from an eigen-trace.
pub fn split_from_trace(wave: &Wave, j: &ProfileJumps, t: &EigenTrace) -> EvansSplit {
    let l = t.lambda;
    let c = wave.c();
    let flux_pert = |s: &crate::singular_ode::FaceState, (ah, aq): (f64, f64), jet: bool| {
        let (u, v) = if jet { (s.du(), s.dv()) } else { (s.u(), s.v()) };
        // E(h̃, q̃) with q̃ = c h̃ − ũ.
        v * (ah + aq * c) - u * aq
    };
    let e_plus = flux_pert(&t.plus, j.coeffs_plus, false);
    let e_minus = flux_pert(&t.minus, j.coeffs_minus, false);
    let integral = t.integral_tilde_h();
    let t_minus = t.minus.u();
    let dh = sc(Complex64::new(j.dh, 0.0));
    let col1 = sc(l * j.dq - j.dr);
    let rm = ScaledComplex::from_real(j.r_minus);
    let a0 = -(integral * l) - t_minus;
    let b0 = e_plus * l + sc(l * j.dq) + rm;
    let a1 = t_minus;
    let b1 = -(e_minus * l) - rm;
    let d0 = dh * b0 - col1 * a0;
    let d1 = dh * b1 - col1 * a1;
    let (dd0, dd1) = if t.has_jet {
        let de_plus = flux_pert(&t.plus, j.coeffs_plus, true);
        let de_minus = flux_pert(&t.minus, j.coeffs_minus, true);
        let dq = ScaledComplex::from_real(j.dq);
        let da0 = -integral - t.integral_dtilde_h() * l - t.minus.du();
        let db0 = e_plus + de_plus * l + dq;
        let da1 = t.minus.du();
        let db1 = -e_minus - de_minus * l;
        (Some(dh * db0 - dq * a0 - col1 * da0), Some(dh * db1 - dq * a1 - col1 * da1))
    } else {
        (None, None)
    };
    EvansSplit { lambda: l, d0, d1, dd0, dd1, period: wave.period() }
}

/// Split determinant at `lambda`.
pub fn evans_split(solver: &EigenSolver, lambda: Complex64) -> Result<EvansSplit> {
    let t = solver.trace(lambda, false)?;
    Ok(split_from_trace(&solver.wave, &ProfileJumps::of(&solver.wave), &t))
}

/// Split determinant and its λ-derivative at `lambda`.
pub fn evans_split_with_derivative(solver: &EigenSolver, lambda: Complex64) -> Result<EvansSplit> {
    let t = solver.trace(lambda, true)?;
    Ok(split_from_trace(&solver.wave, &ProfileJumps::of(&solver.wave), &t))
}

/// `Δ(λ, ξ)` via the split.
pub fn evans(solver: &EigenSolver, lambda: Complex64, xi: f64) -> Result<ScaledComplex> {
    Ok(evans_split(solver, lambda)?.evans(xi))
}

/// `Δ̂(λ, ξ)` via the split.
pub fn evans_hat(solver: &EigenSolver, lambda: Complex64, xi: f64) -> Result<ScaledComplex> {
    Ok(evans_split(solver, lambda)?.hat(xi))
}

/// `Δ(λ, ξ)` assembled directly from the face values of `(h, q)`.
pub fn evans_direct(solver: &EigenSolver, lambda: Complex64, xi: f64) -> Result<ScaledComplex> {
    let wave = &solver.wave;
    let t = solver.trace(lambda, false)?;
    let j = ProfileJumps::of(wave);
    let c = wave.c();
    let e = Complex64::from_polar(1.0, xi * wave.period());
    // −ch + q = −λũ and E(h, q) = r + λE(h̃, q̃) on both faces.
    let face_e = |s: &crate::singular_ode::FaceState, (ah, aq): (f64, f64), r: f64| {
        (s.v() * (ah + aq * c) - s.u() * aq) * lambda + ScaledComplex::from_real(r)
    };
    let r_plus = j.r_minus + j.dr;
    let top = -((t.plus.u() - t.minus.u() * e) * lambda);
    let bottom = face_e(&t.plus, j.coeffs_plus, r_plus) - face_e(&t.minus, j.coeffs_minus, j.r_minus) * e;
    let dh = sc(lambda * j.dh);
    let col1 = sc(lambda * j.dq - j.dr);
    Ok(dh * bottom - col1 * top)
}

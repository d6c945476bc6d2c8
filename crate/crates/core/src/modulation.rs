//! Whitham modulation system and the averaged (Boudlal–Liapidevskii) system:
//! Jacobians, characteristics and hyperbolicity boundaries.

use crate::error::{Error, Result};
use crate::lowfreq::bisect;
use crate::profile::{h_hom, psi, z_plus_prime, Wave, WaveParameters};
use num_complex::Complex64;
use serde::Serialize;

/// Relative tolerance declaring `α̃₂ = c`.
pub const COINCIDENCE_TOL: f64 = 1e-9;

pub type Mat2 = [[f64; 2]; 2];

pub fn det2(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Rescaled averages and their derivatives with respect to `H̲₋`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledDerivatives {
    pub ell: f64,
    pub avg_h: f64,
    pub avg_gamma: f64,
    pub d_ell: f64,
    pub d_ell_avg_h: f64,
    pub d_avg_h: f64,
    pub d_avg_gamma: f64,
    pub d_z_plus: f64,
}

/// Physical derivatives with respect to `H₋` and `H_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamDerivatives {
    pub scaled: ScaledDerivatives,
    pub d_period_d_hminus: f64,
    pub d_period_d_hsonic: f64,
    pub d_avg_h_d_hminus: f64,
    pub d_avg_h_d_hsonic: f64,
    pub d_avg_gamma_d_hminus: f64,
    pub d_avg_gamma_d_hsonic: f64,
    /// `x₋ = −x_s` is the shock position when the sonic point sits at the origin.
    pub d_xminus_d_hminus: f64,
    pub d_xminus_d_hsonic: f64,
}

/// Leibniz-rule derivatives of `ℓ`, `H̄`, `γ̄` with respect to `H̲₋`.
pub fn scaled_derivatives(wave: &Wave) -> ScaledDerivatives {
    let s = &wave.scaled;
    let f = s.froude;
    let (hm, hp) = (s.h_minus, s.h_plus);
    let zp = z_plus_prime(hm);
    let (pm, pp) = (psi(hm, f), psi(hp, f));
    let d_ell = zp / pp - 1.0 / pm;
    let d_ell_avg_h = hp * zp / pp - hm / pm;
    let ell = s.period;
    let d_avg_h = (d_ell_avg_h - s.avg_h * d_ell) / ell;
    // The energy density takes equal values at both shock faces.
    let g_minus = (1.0 / hm + 0.5 * hm * hm) / (f * f);
    let d_avg_gamma = d_ell * (g_minus - s.avg_gamma) / ell;
    ScaledDerivatives { ell, avg_h: s.avg_h, avg_gamma: s.avg_gamma, d_ell, d_ell_avg_h, d_avg_h, d_avg_gamma, d_z_plus: zp }
}

pub fn param_derivatives(wave: &Wave) -> ParamDerivatives {
    let d = scaled_derivatives(wave);
    let hs = wave.hs();
    let h = wave.scaled.h_minus;
    let f = wave.froude();
    ParamDerivatives {
        scaled: d,
        d_period_d_hminus: d.d_ell,
        d_period_d_hsonic: d.ell - h * d.d_ell,
        d_avg_h_d_hminus: d.d_avg_h,
        d_avg_h_d_hsonic: d.avg_h - h * d.d_avg_h,
        d_avg_gamma_d_hminus: hs * d.d_avg_gamma,
        d_avg_gamma_d_hsonic: 2.0 * hs * d.avg_gamma - hs * h * d.d_avg_gamma,
        d_xminus_d_hminus: 1.0 / psi(h, f),
        d_xminus_d_hsonic: -wave.scaled.sonic_pos - h / psi(h, f),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemTag {
    Whitham,
    Averaged,
}

/// Jacobians `A⁰ = dG⁰`, `A¹ = dG¹` with respect to `(H_s, H̲₋)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulationJacobians {
    pub a0: Mat2,
    pub a1: Mat2,
    pub system_tag: SystemTag,
}

impl ModulationJacobians {
    pub fn det_a0(&self) -> f64 {
        det2(&self.a0)
    }

    pub fn evolutionary(&self) -> bool {
        self.det_a0() != 0.0
    }

    /// Same Jacobians with respect to the physical pair `(H_s, H₋)`.
    pub fn physical(&self, wave: &Wave) -> ModulationJacobians {
        let hs = wave.hs();
        let j = [[1.0, 0.0], [-wave.hm() / (hs * hs), 1.0 / hs]];
        ModulationJacobians { a0: matmul(&self.a0, &j), a1: matmul(&self.a1, &j), system_tag: self.system_tag }
    }

    /// Dispersion function `D^W(λ, ξ) = det(λA⁰ + iξA¹)`.
    pub fn dispersion(&self, lambda: Complex64, xi: Complex64) -> Complex64 {
        let i = Complex64::i();
        let m = |r: usize, c: usize| lambda * self.a0[r][c] + i * xi * self.a1[r][c];
        m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)
    }
}

pub fn whitham_jacobians(wave: &Wave) -> ModulationJacobians {
    let d = scaled_derivatives(wave);
    let hs = wave.hs();
    let rs = hs.sqrt();
    let cs = wave.scaled.speed;
    let q0s = wave.scaled.flux_const;
    let (ell, hb) = (d.ell, d.avg_h);
    ModulationJacobians {
        a0: [[hb, hs * d.d_avg_h], [-1.0 / (hs * hs * ell), -d.d_ell / (hs * ell * ell)]],
        a1: [[1.5 * rs * (cs * hb - q0s), hs * rs * cs * d.d_avg_h], [-0.5 * cs / (hs * rs * ell), -cs * d.d_ell / (rs * ell * ell)]],
        system_tag: SystemTag::Whitham,
    }
}

pub fn averaged_jacobians(wave: &Wave) -> ModulationJacobians {
    let d = scaled_derivatives(wave);
    let hs = wave.hs();
    let rs = hs.sqrt();
    let cs = wave.scaled.speed;
    let q0s = wave.scaled.flux_const;
    let (hb, gb) = (d.avg_h, d.avg_gamma);
    ModulationJacobians {
        a0: [[hb, hs * d.d_avg_h], [1.5 * rs * (cs * hb - q0s), hs * rs * cs * d.d_avg_h]],
        a1: [
            [1.5 * rs * (cs * hb - q0s), hs * rs * cs * d.d_avg_h],
            [2.0 * hs * (cs * cs * hb - 2.0 * cs * q0s + gb), hs * hs * (cs * cs * d.d_avg_h + d.d_avg_gamma)],
        ],
        system_tag: SystemTag::Averaged,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Characteristics {
    pub alpha1: f64,
    pub alpha2: f64,
    pub hyperbolic: bool,
    pub jordan_defect: bool,
}

/// Characteristics `(c, α̃₂)` of the Whitham system.
pub fn whitham_characteristics(wave: &Wave) -> Result<Characteristics> {
    let d = scaled_derivatives(wave);
    let cs = wave.scaled.speed;
    let q0s = wave.scaled.flux_const;
    let denom = d.ell * d.d_avg_h - d.avg_h * d.d_ell;
    let scale = (d.ell * d.d_avg_h).abs() + (d.avg_h * d.d_ell).abs();
    if !(denom.abs() > 1e-12 * scale) {
        return Err(Error::DegenerateSystem { det: denom / (wave.hs() * d.ell * d.ell) });
    }
    let c = wave.c();
    let alpha2 = c + wave.hs().sqrt() * (1.5 * d.d_ell * q0s - 0.5 * cs * d.d_ell_avg_h) / denom;
    let coincide = (alpha2 - c).abs() < COINCIDENCE_TOL * (c.abs() + alpha2.abs());
    let off_diag = d.ell * (cs * d.avg_h - 1.5 * q0s);
    let jordan_defect = coincide && off_diag != 0.0;
    Ok(Characteristics { alpha1: c, alpha2, hyperbolic: !jordan_defect, jordan_defect })
}

/// Left side of the hyperbolicity boundary of the averaged system; negative
/// values mean complex characteristics.
pub fn averaged_discriminant(wave: &Wave) -> f64 {
    let d = scaled_derivatives(wave);
    let f = wave.froude();
    let f2 = f * f;
    let a = d.d_avg_h * (f + 1.0 - 2.0 * f2 * d.avg_gamma) + d.avg_h * f2 * d.d_avg_gamma;
    a * a + f2 * d.d_avg_gamma * d.d_avg_h * ((f + 1.0) * d.avg_h - 3.0).powi(2)
}

/// Left heights `H̲₋` at which the averaged system changes type, located
/// by a scan over `n` interior points of the existence window and refined
/// by bisection to `tol`.
pub fn averaged_hyperbolicity_boundary(froude: f64, n: usize, tol: f64) -> Result<Vec<f64>> {
    let hh = h_hom(froude);
    let disc = |h: f64| Wave::new(WaveParameters::scaled(froude, h)).map(|w| averaged_discriminant(&w));
    let grid: Vec<f64> = (0..n).map(|k| hh + (1.0 - hh) * (k as f64 + 0.5) / n as f64).collect();
    let vals = grid.iter().map(|&h| disc(h)).collect::<Result<Vec<_>>>()?;
    let mut roots = Vec::new();
    for k in 1..n {
        if vals[k - 1].signum() != vals[k].signum() {
            roots.push(bisect(disc, grid[k - 1], grid[k], tol)?);
        }
    }
    Ok(roots)
}

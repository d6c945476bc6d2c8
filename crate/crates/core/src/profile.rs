//! Dressler roll-wave profiles: existence window, closed-form constants and
//! period/average quadratures.
//!
//! Quadratures are carried out in the rescaled frame `H_s = 1` in the height
//! variable and then mapped back by the exact power-law scalings.

use crate::error::{Error, Rejection, Result};
use crate::quadrature::{integrate, QuadOptions};
use serde::Serialize;

/// Relative distance to the homoclinic height below which waves are rejected.
pub const HOMOCLINIC_GUARD: f64 = 1e-8;

/// Default relative tolerance of the profile quadratures.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// A roll wave identified by Froude number, sonic height and left shock height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveParameters {
    pub froude: f64,
    pub h_sonic: f64,
    pub h_minus: f64,
}

impl WaveParameters {
    pub fn new(froude: f64, h_sonic: f64, h_minus: f64) -> Self {
        WaveParameters { froude, h_sonic, h_minus }
    }

    /// Wave in the rescaled frame `H_s = 1`.
    pub fn scaled(froude: f64, h_minus: f64) -> Self {
        WaveParameters { froude, h_sonic: 1.0, h_minus }
    }

    pub fn h_minus_scaled(&self) -> f64 {
        self.h_minus / self.h_sonic
    }
}

/// Outcome of [`validate_params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Validity {
    pub valid: bool,
    pub reason: Option<Rejection>,
    /// Homoclinic height in the rescaled frame.
    pub h_hom: f64,
    /// `H₋/H_s − H_hom`.
    pub margin_lower: f64,
    /// `1 − H₋/H_s`.
    pub margin_upper: f64,
}

/// Lower existence boundary `H_hom(F)` of the rescaled left height.
pub fn h_hom(froude: f64) -> f64 {
    let f = froude;
    (1.0 + 2.0 * f + (1.0 + 4.0 * f).sqrt()) / (2.0 * f * f)
}

/// Rescaled slope field `Ψ(h) = (F²h² − (1+2F)h + 1)/(h² + h + 1)`.
pub fn psi(h: f64, froude: f64) -> f64 {
    // Factored numerator: the expanded form cancels badly next to H_hom,
    // where the period integrals need it most.
    let f2 = froude * froude;
    let r1 = h_hom(froude);
    let r2 = 1.0 / (f2 * r1);
    f2 * (h - r1) * (h - r2) / (h * h + h + 1.0)
}

/// Derivative of [`psi`] with respect to `h`.
pub fn psi_prime(h: f64, froude: f64) -> f64 {
    let f2 = froude * froude;
    let n = f2 * h * h - (1.0 + 2.0 * froude) * h + 1.0;
    let dn = 2.0 * f2 * h - (1.0 + 2.0 * froude);
    let d = h * h + h + 1.0;
    let dd = 2.0 * h + 1.0;
    (dn * d - n * dd) / (d * d)
}

/// Right shock height `𝒵₊(H₋)` in the rescaled frame.
pub fn z_plus(h_minus: f64) -> f64 {
    -0.5 * h_minus + (0.25 * h_minus * h_minus + 2.0 / h_minus).sqrt()
}

/// `d𝒵₊/dH₋` by implicit differentiation of `1/h + h²/2 = const`.
pub fn z_plus_prime(h_minus: f64) -> f64 {
    let hp = z_plus(h_minus);
    let hm = h_minus;
    if (hm - 1.0).abs() < 1e-7 {
        // Both cubes vanish at the fixed point; use the first-order expansion.
        return -1.0 + (4.0 / 3.0) * (hm - 1.0);
    }
    (hm * hm * hm - 1.0) * hp * hp / (hm * hm * (hp * hp * hp - 1.0))
}

/// Checks the existence window `F > 2`, `H_hom < H₋/H_s < 1`.
pub fn validate_params(p: &WaveParameters) -> Validity {
    validate_with_guard(p, HOMOCLINIC_GUARD)
}

fn validate_with_guard(p: &WaveParameters, guard: f64) -> Validity {
    let hh = if p.froude > 0.0 { h_hom(p.froude) } else { f64::NAN };
    let hm = p.h_minus_scaled();
    let margin_lower = hm - hh;
    let margin_upper = 1.0 - hm;
    let reason = if !(p.froude > 2.0) || !p.froude.is_finite() {
        Some(Rejection::FroudeTooSmall)
    } else if !(p.h_sonic > 0.0) || !(hm < 1.0) {
        Some(Rejection::AboveSonic)
    } else if !(margin_lower > guard * hh) {
        Some(Rejection::BelowHomoclinic)
    } else {
        None
    };
    Validity { valid: reason.is_none(), reason, h_hom: hh, margin_lower, margin_upper }
}

/// Derived constants and averages in the rescaled frame `H_s = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledQuantities {
    pub froude: f64,
    pub h_minus: f64,
    pub h_plus: f64,
    pub speed: f64,
    pub flux_const: f64,
    pub h_hom: f64,
    /// `ℓ = ∫ dh/Ψ`.
    pub period: f64,
    pub sonic_pos: f64,
    pub avg_h: f64,
    pub avg_gamma: f64,
}

/// Physical derived constants and averages of a wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveQuantities {
    pub h_plus: f64,
    pub speed: f64,
    pub flux_const: f64,
    pub period: f64,
    pub sonic_pos: f64,
    pub h_hom: f64,
    pub avg_h: f64,
    pub avg_q: f64,
    pub avg_gamma: f64,
    pub wavenumber: f64,
    pub temporal_wavenumber: f64,
}

/// Closed-form constants `c`, `q₀`, `H₊`, `H_hom` (quadrature fields are zero).
pub fn derived_constants(p: &WaveParameters) -> Result<WaveQuantities> {
    let v = validate_params(p);
    if let Some(r) = v.reason {
        return Err(Error::InvalidParameters(r));
    }
    let hs = p.h_sonic;
    let f = p.froude;
    Ok(WaveQuantities {
        h_plus: hs * z_plus(p.h_minus_scaled()),
        speed: hs.sqrt() * (1.0 + 1.0 / f),
        flux_const: hs.powf(1.5) / f,
        period: 0.0,
        sonic_pos: 0.0,
        h_hom: hs * v.h_hom,
        avg_h: 0.0,
        avg_q: 0.0,
        avg_gamma: 0.0,
        wavenumber: 0.0,
        temporal_wavenumber: 0.0,
    })
}

/// Rescaled quadratures `ℓ`, `x_s`, `H̄`, `γ̄` for left height `h_minus` (scaled).
pub fn scaled_quadratures(froude: f64, h_minus: f64, rel_tol: f64) -> Result<ScaledQuantities> {
    scaled_quadratures_guarded(froude, h_minus, rel_tol, HOMOCLINIC_GUARD)
}

fn scaled_quadratures_guarded(froude: f64, h_minus: f64, rel_tol: f64, guard: f64) -> Result<ScaledQuantities> {
    let p = WaveParameters::scaled(froude, h_minus);
    let v = validate_with_guard(&p, guard);
    if let Some(r) = v.reason {
        return Err(Error::InvalidParameters(r));
    }
    let f = froude;
    let hp = z_plus(h_minus);
    let opts = QuadOptions::with_rel(rel_tol);
    // Substituting h = H_hom + e^s absorbs the near-pole of 1/Ψ at the
    // homoclinic height: dh/Ψ = (h² + h + 1)/(F²(h − r₂)) ds, smooth in s.
    let r1 = v.h_hom;
    let r2 = 1.0 / (f * f * r1);
    let dx = |s: f64| {
        let h = r1 + s.exp();
        (h, (h * h + h + 1.0) / (f * f * (h - r2)))
    };
    let (s_minus, s_sonic, s_plus) = ((h_minus - r1).ln(), (1.0 - r1).ln(), (hp - r1).ln());
    // Split at the sonic height so x_s falls out of the same work.
    let left = integrate(|s| dx(s).1, s_minus, s_sonic, opts)?.value;
    let right = integrate(|s| dx(s).1, s_sonic, s_plus, opts)?.value;
    let ell = left + right;
    let mom = integrate(
        |s| {
            let (h, w) = dx(s);
            h * w
        },
        s_minus,
        s_plus,
        opts,
    )?
    .value;
    let gam = integrate(
        |s| {
            let (h, w) = dx(s);
            (1.0 / h + 0.5 * h * h) * w / (f * f)
        },
        s_minus,
        s_plus,
        opts,
    )?
    .value;
    Ok(ScaledQuantities {
        froude,
        h_minus,
        h_plus: hp,
        speed: 1.0 + 1.0 / f,
        flux_const: 1.0 / f,
        h_hom: v.h_hom,
        period: ell,
        sonic_pos: left,
        avg_h: mom / ell,
        avg_gamma: gam / ell,
    })
}

/// Maps rescaled quantities to the frame with sonic height `h_sonic`.
pub fn unscale(s: &ScaledQuantities, h_sonic: f64) -> WaveQuantities {
    let hs = h_sonic;
    let rs = hs.sqrt();
    let speed = rs * s.speed;
    let period = hs * s.period;
    let avg_h = hs * s.avg_h;
    let flux_const = hs * rs * s.flux_const;
    WaveQuantities {
        h_plus: hs * s.h_plus,
        speed,
        flux_const,
        period,
        sonic_pos: hs * s.sonic_pos,
        h_hom: hs * s.h_hom,
        avg_h,
        avg_q: hs * rs * (s.speed * s.avg_h - s.flux_const),
        avg_gamma: hs * hs * s.avg_gamma,
        wavenumber: 1.0 / period,
        temporal_wavenumber: -speed / period,
    }
}

/// Full set of quantities for a wave.
pub fn quadratures(p: &WaveParameters, rel_tol: f64) -> Result<WaveQuantities> {
    let s = scaled_quadratures(p.froude, p.h_minus_scaled(), rel_tol)?;
    Ok(unscale(&s, p.h_sonic))
}

/// A validated wave with its constants, ready for spectral computations.
#[derive(Debug, Clone)]
pub struct Wave {
    pub params: WaveParameters,
    pub scaled: ScaledQuantities,
    pub q: WaveQuantities,
    pub quad_tol: f64,
}

impl Wave {
    pub fn new(p: WaveParameters) -> Result<Self> {
        Self::with_tol(p, DEFAULT_QUAD_TOL)
    }

    pub fn with_tol(p: WaveParameters, quad_tol: f64) -> Result<Self> {
        let scaled = scaled_quadratures(p.froude, p.h_minus_scaled(), quad_tol)?;
        let q = unscale(&scaled, p.h_sonic);
        Ok(Wave { params: p, scaled, q, quad_tol })
    }

    /// Like [`Wave::new`] but accepts `H̲₋` down to `H_hom(1 + guard)`.
    /// Only meant for locating features that sit inside the default
    /// homoclinic guard; results degrade as `guard` shrinks.
    pub fn near_homoclinic(p: WaveParameters, guard: f64) -> Result<Self> {
        let scaled = scaled_quadratures_guarded(p.froude, p.h_minus_scaled(), DEFAULT_QUAD_TOL, guard.max(0.0))?;
        let q = unscale(&scaled, p.h_sonic);
        Ok(Wave { params: p, scaled, q, quad_tol: DEFAULT_QUAD_TOL })
    }

    pub fn froude(&self) -> f64 {
        self.params.froude
    }
    pub fn hs(&self) -> f64 {
        self.params.h_sonic
    }
    pub fn hm(&self) -> f64 {
        self.params.h_minus
    }
    pub fn hp(&self) -> f64 {
        self.q.h_plus
    }
    pub fn c(&self) -> f64 {
        self.q.speed
    }
    pub fn q0(&self) -> f64 {
        self.q.flux_const
    }
    pub fn period(&self) -> f64 {
        self.q.period
    }

    /// Profile slope `H' = Ψ_full(H)`.
    pub fn slope(&self, h: f64) -> f64 {
        psi(h / self.hs(), self.froude())
    }

    /// `dΨ_full/dH`.
    pub fn slope_dot(&self, h: f64) -> f64 {
        psi_prime(h / self.hs(), self.froude()) / self.hs()
    }

    /// Momentum `Q = cH − q₀` along the profile.
    pub fn flux(&self, h: f64) -> f64 {
        self.c() * h - self.q0()
    }

    /// Source term `r(H, Q) = H − Q²/H²` evaluated on the profile.
    pub fn source(&self, h: f64) -> f64 {
        let q = self.flux(h);
        h - q * q / (h * h)
    }

    /// Coefficients `(a_h, a_q)` of the flux perturbation
    /// `(−Q²/H² + H/F²) h + (2Q/H − c) q`.
    pub fn flux_perturbation_coeffs(&self, h: f64) -> (f64, f64) {
        let q = self.flux(h);
        let f = self.froude();
        (-q * q / (h * h) + h / (f * f), 2.0 * q / h - self.c())
    }

    /// `∫ g(H(x)) dx` over the stretch of profile between heights `ha` and
    /// `hb`, computed as `∫ g/Ψ_full dH` in the variable `ln(H − H_s H_hom)`.
    pub fn integrate_dx<G: Fn(f64) -> f64>(&self, g: G, ha: f64, hb: f64, rel_tol: f64) -> Result<f64> {
        let hs = self.hs();
        let f2 = self.froude().powi(2);
        let r1 = hs * self.scaled.h_hom;
        let r2 = hs / (f2 * self.scaled.h_hom);
        // (H − r₁)/Ψ_full(H), smooth down to the homoclinic height.
        let w = |h: f64| (h * h + h * hs + hs * hs) / (f2 * (h - r2));
        let v = integrate(
            |t| {
                let h = r1 + t.exp();
                g(h) * w(h)
            },
            (ha - r1).ln(),
            (hb - r1).ln(),
            QuadOptions::with_rel(rel_tol),
        )?;
        Ok(v.value)
    }

    /// Position `x ∈ [0, X]` at which the profile reaches height `h`.
    pub fn x_of_height(&self, h: f64) -> Result<f64> {
        self.integrate_dx(|_| 1.0, self.hm(), h, self.quad_tol)
    }

    /// Inverse of [`Wave::x_of_height`] by safeguarded Newton iteration.
    pub fn height_of_x(&self, x: f64) -> Result<f64> {
        let (mut lo, mut hi) = (self.hm(), self.hp());
        if x <= 0.0 {
            return Ok(lo);
        }
        if x >= self.period() {
            return Ok(hi);
        }
        let mut h = lo + (hi - lo) * x / self.period();
        for _ in 0..100 {
            let r = self.x_of_height(h)? - x;
            if r > 0.0 {
                hi = h;
            } else {
                lo = h;
            }
            let mut next = h - r * self.slope(h);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - h).abs() <= 1e-14 * h.abs() || hi - lo <= 1e-15 * hi {
                return Ok(next);
            }
            h = next;
        }
        Ok(h)
    }

    /// Profile `(x, H, Q)` on a uniform grid of `n` points spanning `[0, X]`.
    pub fn sample(&self, n: usize) -> Result<Vec<(f64, f64, f64)>> {
        let n = n.max(2);
        let period = self.period();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let x = period * i as f64 / (n - 1) as f64;
            let h = self.height_of_x(x)?;
            out.push((x, h, self.flux(h)));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hom_height_is_root_of_slope() {
        for f in [2.1, 3.0, 8.0, 16.3] {
            assert!(psi(h_hom(f), f).abs() < 1e-13);
        }
        assert_relative_eq!(h_hom(3.0), (7.0 + 13f64.sqrt()) / 18.0, max_relative = 1e-15);
    }

    #[test]
    fn psi_prime_matches_difference_quotient() {
        let (h, f, e) = (0.73, 4.0, 1e-6);
        let fd = (psi(h + e, f) - psi(h - e, f)) / (2.0 * e);
        assert_relative_eq!(psi_prime(h, f), fd, max_relative = 1e-8);
    }

    #[test]
    fn z_plus_prime_is_continuous_through_fixed_point() {
        let e = 1e-5;
        let fd = (z_plus(1.0 + e) - z_plus(1.0 - e)) / (2.0 * e);
        assert_relative_eq!(z_plus_prime(1.0), fd, max_relative = 1e-8);
        assert_relative_eq!(z_plus_prime(1.0 - 2e-7), z_plus_prime(1.0 - 5e-8), max_relative = 1e-6);
    }

    #[test]
    fn rejection_codes() {
        let v = validate_params(&WaveParameters::scaled(3.0, 0.8));
        assert!(v.valid);
        assert_eq!(validate_params(&WaveParameters::scaled(3.0, 1.0)).reason, Some(Rejection::AboveSonic));
        assert_eq!(validate_params(&WaveParameters::scaled(2.0, 0.5)).reason, Some(Rejection::FroudeTooSmall));
        assert_eq!(validate_params(&WaveParameters::scaled(3.0, 0.5)).reason, Some(Rejection::BelowHomoclinic));
    }

    #[test]
    fn height_inverts_position() {
        let w = Wave::new(WaveParameters::new(3.0, 2.0, 1.5)).unwrap();
        for &h in &[1.51, 1.9, 2.0, 2.5, w.hp() - 1e-3] {
            let x = w.x_of_height(h).unwrap();
            assert_relative_eq!(w.height_of_x(x).unwrap(), h, max_relative = 1e-11);
        }
    }
}

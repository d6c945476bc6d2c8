//! Interior eigen-system across the sonic regular-singular point.
//!
//! The solver works in the height variable `H` with the reduced unknown
//! `w̃ = λ⁻¹(w − W')`, where `w = (c h − q, h)` and `W' = (0, H')`:
//!
//! ```text
//! ũ' = σ + λ g ṽ
//! ṽ' = (Ṡ/S) ṽ + [λ A₁ ṽ + (B₀ + λB₁) ũ + σ A₁ S] / z
//! Ĩ' = g ṽ
//! ```
//!
//! with `z = H − H_s`, `S = H'`, `g = 1/S`, `N = H² + (H_s − c²)H + q₀²/H_s`,
//! `A₁ = −2q₀H/N`, `B₀ = 2(Q + q₀S)/N`, `B₁ = H²/N`. The constant `σ ≡ 1` is
//! carried as a state component so that the system stays homogeneous and can
//! be rescaled freely. The λ-derivative `ŵ = ∂_λ w̃` obeys the same operator
//! with forcing `(g ṽ, A₁ ṽ + B₁ ũ)` and vanishes at the sonic point.

use crate::error::{Error, Result};
use crate::profile::Wave;
use crate::rk::{self, RkOptions};
use crate::scaled::ScaledComplex;
use crate::series::Series;
use num_complex::Complex64;

/// Default truncation order of the sonic expansion.
pub const DEFAULT_ORDER: usize = 24;

/// Target relative size of the last retained series term.
const SERIES_TERM_TOL: f64 = 1e-12;

/// Normalised eigenfunction value at the sonic point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SonicData {
    pub lambda: Complex64,
    pub h_at_sonic: Complex64,
    pub q_at_sonic: Complex64,
}

impl SonicData {
    /// Residual of the sonic compatibility constraint.
    pub fn constraint_residual(&self, wave: &Wave) -> Complex64 {
        let (f, rs) = (wave.froude(), wave.hs().sqrt());
        let l = self.lambda;
        (l * rs * (f - 1.0) + 2.0 / 3.0 * (f + 1.0).powi(2)) * self.h_at_sonic - (l + 2.0 / 3.0 * (f + 1.0) / rs) * f * self.q_at_sonic
    }
}

/// Lower bound of the analytic solvability domain `Re λ > −(F−2)/(2√H_s)`.
pub fn solvability_threshold(wave: &Wave) -> f64 {
    -(wave.froude() - 2.0) / (2.0 * wave.hs().sqrt())
}

fn check_solvable(wave: &Wave, lambda: Complex64) -> Result<()> {
    let t = solvability_threshold(wave);
    if lambda.re <= t || !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::SolvabilityViolation { re: lambda.re, threshold: t });
    }
    Ok(())
}

/// `K = (F−2)√H_s/(2(F+1))`; the reduced data at the sonic point is
/// `(ũ, ṽ) = K (2√H_s, F)` independently of λ.
fn sonic_scale(wave: &Wave) -> f64 {
    let f = wave.froude();
    (f - 2.0) * wave.hs().sqrt() / (2.0 * (f + 1.0))
}

pub fn sonic_data(wave: &Wave, lambda: Complex64) -> Result<SonicData> {
    check_solvable(wave, lambda)?;
    let (f, rs) = (wave.froude(), wave.hs().sqrt());
    let k = sonic_scale(wave);
    Ok(SonicData {
        lambda,
        h_at_sonic: (lambda + 2.0 / 3.0 * (f + 1.0) / rs) * f * k,
        q_at_sonic: (lambda * rs * (f - 1.0) + 2.0 / 3.0 * (f + 1.0).powi(2)) * k,
    })
}

/// Pointwise coefficients of the reduced system.
#[derive(Debug, Clone, Copy)]
struct Coef {
    z: f64,
    s: f64,
    g: f64,
    sdot_over_s: f64,
    a1: f64,
    b0: f64,
    b1: f64,
}

#[derive(Debug, Clone, Copy)]
struct Frame {
    hs: f64,
    c: f64,
    q0: f64,
    f2: f64,
    /// Roots `H_s H_hom` and `H_s/(F² H_hom)` of `N`.
    roots: (f64, f64),
}

impl Frame {
    fn of(wave: &Wave) -> Self {
        let (hs, f2) = (wave.hs(), wave.froude().powi(2));
        let r1 = crate::profile::h_hom(wave.froude());
        Frame { hs, c: wave.c(), q0: wave.q0(), f2, roots: (hs * r1, hs / (f2 * r1)) }
    }

    #[inline]
    fn at(&self, h: f64) -> Coef {
        let Frame { hs, c, q0, f2, roots } = *self;
        let n = (h - roots.0) * (h - roots.1);
        let den = h * h + hs * h + hs * hs;
        let s = f2 * n / den;
        let q = c * h - q0;
        Coef {
            z: h - hs,
            s,
            g: 1.0 / s,
            sdot_over_s: (2.0 * h + hs - c * c) / n - (2.0 * h + hs) / den,
            a1: -2.0 * q0 * h / n,
            b0: 2.0 * (q + q0 * s) / n,
            b1: h * h / n,
        }
    }
}

/// Taylor tables of the λ-independent coefficients about `H_s`.
#[derive(Debug, Clone)]
struct Tables {
    s: Series,
    g: Series,
    p: Series,
    a1: Series,
    b0: Series,
    b1: Series,
    a1s: Series,
}

impl Tables {
    fn new(fr: &Frame, order: usize) -> Self {
        let len = order + 1;
        let Frame { hs, c, q0, f2, .. } = *fr;
        let h = Series::linear(hs, len);
        let hh = &h * &h;
        let n = (&hh + &h.scale(hs - c * c)).add_const(q0 * q0 / hs);
        let den = (&hh + &h.scale(hs)).add_const(hs * hs);
        let ndot = h.scale(2.0).add_const(hs - c * c);
        let dendot = h.scale(2.0).add_const(hs);
        let s = n.div(&den).scale(f2);
        let g = den.div(&n).scale(1.0 / f2);
        let sdot_over_s = &ndot.div(&n) - &dendot.div(&den);
        let p = sdot_over_s.shift();
        let a1 = h.scale(-2.0 * q0).div(&n);
        let q = h.scale(c).add_const(-q0);
        let b0 = (&q + &s.scale(q0)).scale(2.0).div(&n);
        let b1 = hh.div(&n);
        let a1s = &a1 * &s;
        Tables { s, g, p, a1, b0, b1, a1s }
    }
}

/// Power series of the reduced solution about the sonic point, in `z = H − H_s`.
#[derive(Debug, Clone)]
pub struct SonicExpansion {
    pub lambda: Complex64,
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
    pub i: Vec<Complex64>,
    /// λ-derivative coefficients, when requested.
    pub jet: Option<[Vec<Complex64>; 3]>,
}

fn conv(a: &Series, b: &[Complex64], n: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=n {
        acc += b[n - k] * a.0[k];
    }
    acc
}

fn horner(c: &[Complex64], z: f64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, x| acc * z + x)
}

impl SonicExpansion {
    fn eval_all(&self, z: f64) -> [Complex64; 7] {
        let one = Complex64::new(1.0, 0.0);
        let (uh, vh, ih) = match &self.jet {
            Some([a, b, c]) => (horner(a, z), horner(b, z), horner(c, z)),
            None => Default::default(),
        };
        [horner(&self.u, z), horner(&self.v, z), horner(&self.i, z), one, uh, vh, ih]
    }

    /// Largest relative size of the last retained term at `±z`.
    fn tail_ratio(&self, z: f64) -> f64 {
        let n = self.u.len() - 1;
        let zn = z.abs().powi(n as i32);
        let mut worst = 0.0f64;
        let mut groups: Vec<[&Vec<Complex64>; 2]> = vec![[&self.u, &self.v]];
        if let Some([a, b, _]) = &self.jet {
            groups.push([a, b]);
        }
        for sign in [1.0, -1.0] {
            for grp in &groups {
                let last = grp.iter().map(|c| c[n].norm()).fold(0.0, f64::max) * zn;
                let sum = grp.iter().map(|c| horner(c, sign * z).norm()).fold(0.0, f64::max);
                if last > 0.0 {
                    worst = worst.max(if sum > 0.0 { last / sum } else { f64::INFINITY });
                }
            }
        }
        worst
    }
}

/// Series solution `(h, q)(H) ≈ Σ (a_n, b_n)(H − H_s)^n` with its radius of use.
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    pub center: f64,
    pub coeffs: Vec<[Complex64; 2]>,
    pub radius: f64,
}

impl SeriesSolution {
    pub fn eval(&self, h: f64) -> [Complex64; 2] {
        let z = h - self.center;
        let mut out = [Complex64::new(0.0, 0.0); 2];
        for c in self.coeffs.iter().rev() {
            out[0] = out[0] * z + c[0];
            out[1] = out[1] * z + c[1];
        }
        out
    }
}

/// Accuracy knobs of the eigen-solver.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub order: usize,
    pub rk: RkOptions,
    /// Multiplies the automatically chosen handoff radius.
    pub delta_factor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { order: DEFAULT_ORDER, rk: RkOptions::default(), delta_factor: 1.0 }
    }
}

impl SolverOptions {
    /// Tolerances suited to dense contour sweeps, where only the phase of the
    /// determinant matters.
    pub fn sweep() -> Self {
        SolverOptions { rk: RkOptions { abs_tol: 1e-9, rel_tol: 1e-7, ..RkOptions::default() }, ..Default::default() }
    }
}

/// Reduced eigen-solution values at one shock face. True values are the
/// stored components times `exp(log_scale)`.
#[derive(Debug, Clone, Copy)]
pub struct FaceState {
    pub height: f64,
    pub y: [Complex64; 7],
    pub log_scale: f64,
}

impl FaceState {
    fn get(&self, k: usize) -> ScaledComplex {
        ScaledComplex::new(self.y[k], self.log_scale)
    }
    /// `ũ = c h̃ − q̃`.
    pub fn u(&self) -> ScaledComplex {
        self.get(0)
    }
    /// `ṽ = h̃`.
    pub fn v(&self) -> ScaledComplex {
        self.get(1)
    }
    /// `∫_{x_s}^{x} h̃ dx` up to this face.
    pub fn integral(&self) -> ScaledComplex {
        self.get(2)
    }
    pub fn du(&self) -> ScaledComplex {
        self.get(4)
    }
    pub fn dv(&self) -> ScaledComplex {
        self.get(5)
    }
    pub fn dintegral(&self) -> ScaledComplex {
        self.get(6)
    }
}

/// Endpoint data of the eigen-solution for one spectral parameter.
#[derive(Debug, Clone, Copy)]
pub struct EigenTrace {
    pub lambda: Complex64,
    pub speed: f64,
    pub minus: FaceState,
    pub plus: FaceState,
    pub slope_minus: f64,
    pub slope_plus: f64,
    pub has_jet: bool,
    pub steps: usize,
}

impl EigenTrace {
    /// `(h̃, q̃)` at the left face `H = H₋`.
    pub fn tilde_hq_at_hminus(&self) -> [Complex64; 2] {
        self.tilde_hq(&self.minus)
    }
    pub fn tilde_hq_at_hplus(&self) -> [Complex64; 2] {
        self.tilde_hq(&self.plus)
    }
    fn tilde_hq(&self, s: &FaceState) -> [Complex64; 2] {
        let v = s.v().to_complex();
        [v, v * self.speed - s.u().to_complex()]
    }
    /// `(h, q) = (H', Q') + λ (h̃, q̃)` at the left face.
    pub fn hq_at_hminus(&self) -> [Complex64; 2] {
        self.hq(&self.minus, self.slope_minus)
    }
    pub fn hq_at_hplus(&self) -> [Complex64; 2] {
        self.hq(&self.plus, self.slope_plus)
    }
    fn hq(&self, s: &FaceState, slope: f64) -> [Complex64; 2] {
        let t = self.tilde_hq(s);
        [t[0] * self.lambda + slope, t[1] * self.lambda + self.speed * slope]
    }
    /// `∫ h̃ dx` over one period.
    pub fn integral_tilde_h(&self) -> ScaledComplex {
        self.plus.integral() - self.minus.integral()
    }
    /// `∫ ∂_λ h̃ dx` over one period.
    pub fn integral_dtilde_h(&self) -> ScaledComplex {
        self.plus.dintegral() - self.minus.dintegral()
    }
}

/// Eigen-solver bound to one wave; caches the coefficient Taylor tables.
#[derive(Debug, Clone)]
pub struct EigenSolver {
    pub wave: Wave,
    pub opts: SolverOptions,
    frame: Frame,
    tables: Tables,
}

impl EigenSolver {
    pub fn new(wave: &Wave) -> Self {
        Self::with_options(wave, SolverOptions::default())
    }

    pub fn with_options(wave: &Wave, opts: SolverOptions) -> Self {
        let frame = Frame::of(wave);
        let tables = Tables::new(&frame, opts.order.max(4));
        EigenSolver { wave: wave.clone(), opts, frame, tables }
    }

    /// Frobenius recursion for the reduced solution (and optionally its λ-jet).
    pub fn expansion(&self, lambda: Complex64, jet: bool) -> Result<SonicExpansion> {
        check_solvable(&self.wave, lambda)?;
        let t = &self.tables;
        let len = t.s.len();
        let zero = Complex64::new(0.0, 0.0);
        let k = sonic_scale(&self.wave);
        let a0 = -lambda * t.a1.0[0];
        let mut u = vec![zero; len];
        let mut v = vec![zero; len];
        let mut iv = vec![zero; len];
        u[0] = Complex64::new(2.0 * self.wave.hs().sqrt() * k, 0.0);
        v[0] = Complex64::new(self.wave.froude() * k, 0.0);
        let (mut uh, mut vh, mut ih) = (vec![zero; len], vec![zero; len], vec![zero; len]);
        for n in 1..len {
            let den = a0 + n as f64;
            if den.norm() < 1e-12 {
                return Err(Error::Resonance { order: n });
            }
            let gv = conv(&t.g, &v, n - 1);
            u[n] = lambda * gv / n as f64;
            if n == 1 {
                u[n] += 1.0;
            }
            iv[n] = gv / n as f64;
            let mut rhs = t.a1s.0[n] + conv(&t.b0, &u, n) + lambda * conv(&t.b1, &u, n);
            for j in 1..=n {
                rhs += v[n - j] * (t.p.0[j] + lambda * t.a1.0[j]);
            }
            v[n] = rhs / den;
            if jet {
                let gvh = conv(&t.g, &vh, n - 1);
                uh[n] = (gv + lambda * gvh) / n as f64;
                ih[n] = gvh / n as f64;
                let mut rhs = conv(&t.a1, &v, n) + conv(&t.b1, &u, n) + conv(&t.b0, &uh, n) + lambda * conv(&t.b1, &uh, n);
                for j in 1..=n {
                    rhs += vh[n - j] * (t.p.0[j] + lambda * t.a1.0[j]);
                }
                vh[n] = rhs / den;
            }
        }
        Ok(SonicExpansion { lambda, u, v, i: iv, jet: if jet { Some([uh, vh, ih]) } else { None } })
    }

    /// Handoff radius: the largest admissible `δ` whose last series term is
    /// negligible on both sides.
    fn handoff_radius(&self, exp: &SonicExpansion) -> f64 {
        let w = &self.wave;
        let (hm, hs, hp) = (w.hm(), w.hs(), w.hp());
        let mut delta = ((hp - hm) / 8.0).min(0.5 * (hs - hm)).min(0.5 * (hp - hs));
        for _ in 0..60 {
            if exp.tail_ratio(delta) < SERIES_TERM_TOL {
                break;
            }
            delta *= 0.5;
        }
        delta * self.opts.delta_factor
    }

    /// Series solution in the original unknowns `(h, q)`.
    pub fn frobenius_series(&self, lambda: Complex64) -> Result<SeriesSolution> {
        let exp = self.expansion(lambda, false)?;
        let radius = self.handoff_radius(&exp);
        let c = self.wave.c();
        let coeffs = (0..exp.u.len())
            .map(|n| {
                let s = self.tables.s.0[n];
                [lambda * exp.v[n] + s, lambda * (exp.v[n] * c - exp.u[n]) + c * s]
            })
            .collect();
        Ok(SeriesSolution { center: self.wave.hs(), coeffs, radius })
    }

    /// Solves from the sonic point to both shock faces.
    pub fn trace(&self, lambda: Complex64, jet: bool) -> Result<EigenTrace> {
        let exp = self.expansion(lambda, jet)?;
        let delta = self.handoff_radius(&exp);
        let w = &self.wave;
        let hs = w.hs();
        let (plus, s1) = self.shoot(lambda, jet, hs + delta, exp.eval_all(delta), w.hp(), delta)?;
        let (minus, s2) = self.shoot(lambda, jet, hs - delta, exp.eval_all(-delta), w.hm(), delta)?;
        Ok(EigenTrace { lambda, speed: w.c(), minus, plus, slope_minus: w.slope(w.hm()), slope_plus: w.slope(w.hp()), has_jet: jet, steps: s1 + s2 })
    }

    fn shoot(&self, lambda: Complex64, jet: bool, h0: f64, y0: [Complex64; 7], h1: f64, delta: f64) -> Result<(FaceState, usize)> {
        let fr = self.frame;
        let zero = Complex64::new(0.0, 0.0);
        let full = move |h: f64, y: &[Complex64; 7]| {
            let k = fr.at(h);
            let [u, v, _, sg, uh, vh, _] = *y;
            let bu = u * k.b0 + lambda * k.b1 * u;
            let dv = v * k.sdot_over_s + (lambda * k.a1 * v + bu + sg * (k.a1 * k.s)) / k.z;
            let dvh = vh * k.sdot_over_s + (lambda * k.a1 * vh + uh * k.b0 + lambda * k.b1 * uh + v * k.a1 + u * k.b1) / k.z;
            [sg + lambda * k.g * v, dv, v * k.g, zero, v * k.g + lambda * k.g * vh, dvh, vh * k.g]
        };
        let reduced = move |h: f64, y: &[Complex64; 4]| {
            let k = fr.at(h);
            let [u, v, _, sg] = *y;
            let bu = u * k.b0 + lambda * k.b1 * u;
            let dv = v * k.sdot_over_s + (lambda * k.a1 * v + bu + sg * (k.a1 * k.s)) / k.z;
            [sg + lambda * k.g * v, dv, v * k.g, zero]
        };
        // Below the sonic point the coefficients carry a pole at the root
        // H_s·H_hom of N, just outside [H₋, H_s]. Integrating in
        // t = ln(H − root) keeps near-homoclinic waves well resolved.
        let root = fr.roots.0;
        let below = h1 < h0;
        let (t0, t1, step) = if below { ((h0 - root).ln(), (h1 - root).ln(), 0.25 * delta / (h0 - root)) } else { (h0, h1, 0.25 * delta) };
        let height = move |t: f64| if below { (root + t.exp(), t.exp()) } else { (t, 1.0) };
        let out = if jet {
            rk::integrate(
                |t, y: &[Complex64; 7]| {
                    let (h, dh) = height(t);
                    full(h, y).map(|z| z * dh)
                },
                t0,
                y0,
                t1,
                step,
                &self.opts.rk,
            )?
        } else {
            let y4 = [y0[0], y0[1], y0[2], y0[3]];
            let r = rk::integrate(
                |t, y: &[Complex64; 4]| {
                    let (h, dh) = height(t);
                    reduced(h, y).map(|z| z * dh)
                },
                t0,
                y4,
                t1,
                step,
                &self.opts.rk,
            )?;
            rk::RkOutcome { y: [r.y[0], r.y[1], r.y[2], r.y[3], zero, zero, zero], log_scale: r.log_scale, steps: r.steps, rejected: r.rejected }
        };
        Ok((FaceState { height: h1, y: out.y, log_scale: out.log_scale }, out.steps))
    }
}

/// Convenience wrapper: `(h, q)`-level endpoint data for one λ.
pub fn integrate_eigen(wave: &Wave, lambda: Complex64) -> Result<EigenTrace> {
    EigenSolver::new(wave).trace(lambda, false)
}

/// λ-derivative of the reduced solution at λ = 0.
pub fn integrate_second_variation(wave: &Wave) -> Result<EigenTrace> {
    EigenSolver::new(wave).trace(Complex64::new(0.0, 0.0), true)
}

//! Counting and tracking unstable spectrum: winding numbers of `Δ̂(·, ξ)`
//! around the half annulus `Ω(r, R) = {Re λ > 0, r < |λ| < R}`, per-wave
//! classification, continuation of roots in ξ and bisection of the
//! mid-frequency stability boundary.

use crate::error::{Error, Result};
use crate::evans::{evans_split, evans_split_with_derivative, EvansSplit};
use crate::highfreq::{hf_index, HighFreqData};
use crate::lowfreq::{boundary_i, low_freq_coefficients, parity_indices, LowFreqCoefficients};
use crate::profile::h_hom;
use crate::profile::{Wave, WaveParameters};
use crate::scaled::ScaledComplex;
use crate::singular_ode::{EigenSolver, SolverOptions};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// Relative modulus below which a contour value counts as a zero.
pub const NEAR_ZERO_GUARD: f64 = 1e-12;
/// Largest admissible phase increment between neighbouring contour points.
const MAX_PHASE_STEP: f64 = FRAC_PI_2;
const MAX_REFINE_DEPTH: u32 = 24;

/// Discretisation of `∂Ω(r, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourSpec {
    pub r_inner: f64,
    pub r_outer: f64,
    pub n_small_arc: usize,
    /// Points on each of the two imaginary-axis segments.
    pub n_segment: usize,
    pub n_large_arc: usize,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec { r_inner: 0.01, r_outer: 400.0, n_small_arc: 1000, n_segment: 2000, n_large_arc: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Piece {
    Arc { radius: f64, from: f64, to: f64 },
    Segment { from: Complex64, to: Complex64 },
}

impl Piece {
    fn at(&self, t: f64) -> Complex64 {
        match *self {
            Piece::Arc { radius, from, to } => Complex64::from_polar(radius, from + (to - from) * t),
            Piece::Segment { from, to } => from + (to - from) * t,
        }
    }
}

impl ContourSpec {
    pub fn total_points(&self) -> usize {
        self.n_small_arc + 2 * self.n_segment + self.n_large_arc
    }

    /// Same contour with every piece twice as finely divided.
    pub fn doubled(&self) -> Self {
        ContourSpec { n_small_arc: 2 * self.n_small_arc, n_segment: 2 * self.n_segment, n_large_arc: 2 * self.n_large_arc, ..*self }
    }

    /// Subdivides each piece by the smallest integer factor that keeps
    /// `rate · |Δλ| ≤ π/2` between neighbouring points.
    pub fn resolved(&self, rate: f64) -> Self {
        let refine = |n: usize, len: f64| {
            let need = (rate * len / FRAC_PI_2).ceil();
            let factor = if need.is_finite() && need > n as f64 { (need / n as f64).ceil() as usize } else { 1 };
            n * factor
        };
        let (r, big) = (self.r_inner, self.r_outer);
        ContourSpec {
            n_small_arc: refine(self.n_small_arc, PI * r),
            n_segment: refine(self.n_segment, big - r),
            n_large_arc: refine(self.n_large_arc, PI * big),
            ..*self
        }
    }

    /// Pieces in counter-clockwise order around Ω.
    fn pieces(&self) -> [(Piece, usize); 4] {
        let (r, big) = (self.r_inner, self.r_outer);
        let i = Complex64::i();
        [
            (Piece::Arc { radius: big, from: -FRAC_PI_2, to: FRAC_PI_2 }, self.n_large_arc),
            (Piece::Segment { from: i * big, to: i * r }, self.n_segment),
            (Piece::Arc { radius: r, from: FRAC_PI_2, to: -FRAC_PI_2 }, self.n_small_arc),
            (Piece::Segment { from: -i * r, to: -i * big }, self.n_segment),
        ]
    }

    /// `(piece, t)` nodes; each piece contributes its start but not its end.
    fn nodes(&self) -> Vec<(usize, f64)> {
        let mut out = Vec::with_capacity(self.total_points());
        for (k, (_, n)) in self.pieces().iter().enumerate() {
            out.extend((0..*n).map(|j| (k, j as f64 / *n as f64)));
        }
        out
    }

    /// Contour points in traversal order.
    pub fn points(&self) -> Vec<Complex64> {
        let pieces = self.pieces();
        self.nodes().into_iter().map(|(k, t)| pieces[k].0.at(t)).collect()
    }
}

/// The split determinant evaluated once on every contour point; winding
/// numbers for any ξ are then cheap.
///
/// The two halves of the split rotate like `e^{λ∫_{x_s}^X μ̃₊}` and
/// `e^{−λ∫_0^{x_s} μ̃₊}`, so the phase of `Δ̂` can turn at up to
/// `M = ∫_0^X μ̃₊ dx` radians per unit of arc length. Each piece is
/// subdivided by an integer factor until `M |Δλ| ≤ π/2`; the nominal
/// points stay a subset of the evaluated ones.
#[derive(Debug, Clone)]
pub struct SplitTable {
    pub contour: ContourSpec,
    pub lambdas: Vec<Complex64>,
    pub splits: Vec<EvansSplit>,
    /// Phase-rate bound `M`.
    pub rate: f64,
    /// Contour actually evaluated after subdivision.
    pub resolved: ContourSpec,
    nodes: Vec<(usize, f64)>,
}

/// Evaluates the split on the whole contour in parallel.
pub fn split_table(solver: &EigenSolver, contour: ContourSpec) -> Result<SplitTable> {
    let rate = hf_index(&solver.wave)?.mu_tilde_plus_integral;
    let resolved = contour.resolved(rate);
    let nodes = resolved.nodes();
    let pieces = resolved.pieces();
    let lambdas: Vec<Complex64> = nodes.iter().map(|&(k, t)| pieces[k].0.at(t)).collect();
    let splits = lambdas.par_iter().map(|&l| evans_split(solver, l)).collect::<Result<Vec<_>>>()?;
    Ok(SplitTable { contour, lambdas, splits, rate, resolved, nodes })
}

fn phase_step(a: &ScaledComplex, b: &ScaledComplex) -> f64 {
    (b.m * a.m.conj()).arg()
}

fn below_guard(v: &ScaledComplex, scale: f64) -> bool {
    v.is_zero() || v.ln_norm() < scale + NEAR_ZERO_GUARD.ln()
}

/// Extra determinant evaluations allowed per winding number.
const REFINE_BUDGET: usize = 4096;

struct Refiner<'a> {
    solver: &'a EigenSolver,
    piece: Piece,
    xi: f64,
}

impl Refiner<'_> {
    fn step(&self, a: (f64, ScaledComplex), b: (f64, ScaledComplex), depth: u32, budget: &mut usize) -> Result<f64> {
        let d = phase_step(&a.1, &b.1);
        if d.abs() <= MAX_PHASE_STEP {
            return Ok(d);
        }
        if depth >= MAX_REFINE_DEPTH || *budget == 0 {
            return Err(Error::NonconvergentRefinement);
        }
        *budget -= 1;
        let tm = 0.5 * (a.0 + b.0);
        let lm = self.piece.at(tm);
        let vm = evans_split(self.solver, lm)?.hat(self.xi);
        if below_guard(&vm, a.1.ln_norm().max(b.1.ln_norm())) {
            return Err(Error::ContourNearZero { re: lm.re, im: lm.im });
        }
        Ok(self.step(a, (tm, vm), depth + 1, budget)? + self.step((tm, vm), b, depth + 1, budget)?)
    }
}

impl SplitTable {
    /// `Δ̂(λ_j, ξ)` on the stored contour points.
    pub fn values(&self, xi: f64) -> Vec<ScaledComplex> {
        self.splits.iter().map(|s| s.hat(xi)).collect()
    }

    /// Winding number of `Δ̂(·, ξ)` around `∂Ω`, by unwrapping the phase and
    /// bisecting contour intervals whose phase increment exceeds π/2.
    pub fn winding(&self, solver: &EigenSolver, xi: f64) -> Result<i64> {
        let vals = self.values(xi);
        let n = vals.len();
        for j in 0..n {
            let local = vals[(j + n - 1) % n].ln_norm().max(vals[(j + 1) % n].ln_norm());
            if below_guard(&vals[j], local) {
                return Err(Error::ContourNearZero { re: self.lambdas[j].re, im: self.lambdas[j].im });
            }
        }
        let pieces = self.resolved.pieces();
        let mut budget = REFINE_BUDGET;
        let mut total = 0.0;
        for j in 0..n {
            let (k, ta) = self.nodes[j];
            let (k2, t2) = self.nodes[(j + 1) % n];
            let tb = if k2 == k { t2 } else { 1.0 };
            let r = Refiner { solver, piece: pieces[k].0, xi };
            total += r.step((ta, vals[j]), (tb, vals[(j + 1) % n]), 0, &mut budget)?;
        }
        Ok((total / (2.0 * PI)).round() as i64)
    }
}

/// `ξ_j = −π/X + 2πj/(nX)`, `j = 0..=n`, restricted to `ξ ≥ 0`.
pub fn xi_mesh_half(period: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..=n).map(|j| -PI / period + 2.0 * PI * j as f64 / (n as f64 * period)).filter(|&x| x >= -1e-15 / period).map(|x| x.max(0.0)).collect()
}

/// Winding number for one wave and one Floquet exponent.
pub fn winding_number(wave: &Wave, xi: f64, contour: ContourSpec) -> Result<i64> {
    let solver = EigenSolver::with_options(wave, SolverOptions::sweep());
    split_table(&solver, contour)?.winding(&solver, xi)
}

/// Winding numbers on the non-negative half of the uniform ξ-mesh.
pub fn winding_profile(solver: &EigenSolver, table: &SplitTable, xi_mesh: usize) -> Result<Vec<(f64, i64)>> {
    let xs = xi_mesh_half(solver.wave.period(), xi_mesh);
    xs.par_iter().map(|&xi| Ok((xi, table.winding(solver, xi)?))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    UnstableLowfreq,
    UnstableMidfreq,
    HfFlagged,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::UnstableLowfreq => "unstable_lowfreq",
            Verdict::UnstableMidfreq => "unstable_midfreq",
            Verdict::HfFlagged => "hf_flagged",
        }
    }

    pub fn is_stable(&self) -> bool {
        matches!(self, Verdict::Stable)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub alpha: f64,
    pub beta: f64,
    pub alpha0: f64,
    pub alpha1_over_i: f64,
    /// A positive real eigenvalue is forced by the parity of `Δ̂(·,0)` or `Δ̂(·,π/X)`.
    pub forced_unstable: bool,
    pub index: f64,
    pub threshold: f64,
    /// `(ξ, n(ξ))` for `ξ ≥ 0`; empty when the winding sweep was skipped.
    pub winding_profile: Vec<(f64, i64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub wave: WaveParameters,
    pub verdict: Verdict,
    /// `None` when the low-frequency prefilter skipped the sweep.
    pub max_winding: Option<i64>,
    pub worst_xi: Option<f64>,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyOptions {
    pub xi_mesh: usize,
    pub contour: ContourSpec,
    /// Skip the winding sweep for waves already unstable at low frequency.
    pub prefilter: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { xi_mesh: 1000, contour: ContourSpec::default(), prefilter: true }
    }
}

/// Low-frequency instability: a parity-forced real eigenvalue or a
/// critical branch curving into the right half-plane.
pub fn lowfreq_unstable(c: &LowFreqCoefficients) -> bool {
    parity_indices(c).forced_unstable || c.beta < 0.0
}

fn decide(low_unstable: bool, max_winding: Option<i64>, hf: &HighFreqData) -> Verdict {
    if low_unstable {
        Verdict::UnstableLowfreq
    } else if max_winding.is_some_and(|n| n > 0) {
        Verdict::UnstableMidfreq
    } else if hf.index >= hf.threshold {
        Verdict::HfFlagged
    } else {
        Verdict::Stable
    }
}

/// Full classification of one wave.
pub fn classify_stability(wave: &Wave, opts: &ClassifyOptions) -> Result<StabilityVerdict> {
    let low = low_freq_coefficients(&EigenSolver::new(wave))?;
    let hf = hf_index(wave)?;
    let low_unstable = lowfreq_unstable(&low);
    let mut evidence = Evidence {
        alpha: low.alpha,
        beta: low.beta,
        alpha0: low.alpha0,
        alpha1_over_i: low.alpha1_over_i,
        forced_unstable: parity_indices(&low).forced_unstable,
        index: hf.index,
        threshold: hf.threshold,
        winding_profile: Vec::new(),
    };
    let (max_winding, worst_xi) = if opts.prefilter && low_unstable {
        (None, None)
    } else {
        let solver = EigenSolver::with_options(wave, SolverOptions::sweep());
        let table = split_table(&solver, opts.contour)?;
        let profile = winding_profile(&solver, &table, opts.xi_mesh)?;
        let (mut best, mut at) = (profile[0].1, profile[0].0);
        for &(xi, n) in &profile {
            if n > best {
                best = n;
                at = xi;
            }
        }
        evidence.winding_profile = profile;
        (Some(best), Some(at))
    };
    Ok(StabilityVerdict { wave: wave.params, verdict: decide(low_unstable, max_winding, &hf), max_winding, worst_xi, evidence })
}

/// A split table together with the first ξ of the mesh that encloses a root.
pub struct UnstableScan {
    pub solver: EigenSolver,
    pub table: SplitTable,
    /// `(ξ, n(ξ))` with `n > 0`, if any.
    pub hit: Option<(f64, i64)>,
}

/// Looks for a ξ on the half mesh with positive winding number, trying the
/// mesh value nearest `hint` first.
pub fn scan_unstable(wave: &Wave, contour: ContourSpec, xi_mesh: usize, hint: Option<f64>) -> Result<UnstableScan> {
    let solver = EigenSolver::with_options(wave, SolverOptions::sweep());
    let table = split_table(&solver, contour)?;
    let xs = xi_mesh_half(wave.period(), xi_mesh);
    if let Some(h) = hint {
        let near = xs.iter().copied().min_by(|a, b| (a - h).abs().total_cmp(&(b - h).abs())).unwrap_or(0.0);
        let n = table.winding(&solver, near)?;
        if n > 0 {
            return Ok(UnstableScan { solver, table, hit: Some((near, n)) });
        }
    }
    let windings = xs.par_iter().map(|&xi| table.winding(&solver, xi)).collect::<Result<Vec<_>>>()?;
    let hit = xs.into_iter().zip(windings).find(|&(_, n)| n > 0);
    Ok(UnstableScan { solver, table, hit })
}

/// A tracked branch `λ(ξ)` of roots of `Δ̂(·, ξ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralCurve {
    pub points: Vec<(f64, Complex64)>,
    /// Set when continuation stopped before the end of the ξ range.
    pub stall: Option<String>,
}

/// `|Δ̂|` relative to the size of the two terms that cancel in it.
pub fn relative_residual(split: &EvansSplit, xi: f64) -> f64 {
    let v = split.hat(xi);
    let scale = split.d0.ln_norm().max(split.d1.ln_norm());
    (v.ln_norm() - scale).exp()
}

/// Newton iteration on `Δ̂(·, ξ)` from `guess`.
pub fn newton_root(solver: &EigenSolver, xi: f64, guess: Complex64, tol: f64, max_iter: usize) -> Result<(Complex64, f64)> {
    let mut l = guess;
    for _ in 0..max_iter {
        let s = evans_split_with_derivative(solver, l)?;
        let d = s.hat(xi);
        let dd = s.dhat(xi).expect("jet requested");
        let step = d.ratio(&dd);
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        l -= step;
        if step.norm() <= tol * (1.0 + l.norm()) {
            let res = relative_residual(&evans_split(solver, l)?, xi);
            return Ok((l, res));
        }
    }
    Err(Error::NonconvergentRefinement)
}

/// Continues a root of `Δ̂(·, ξ)` from `xi_start` to `xi_end` in `steps`
/// nominal steps, halving on divergence.
pub fn track_critical_root(solver: &EigenSolver, seed: Complex64, xi_start: f64, xi_end: f64, steps: usize) -> Result<SpectralCurve> {
    const RESIDUAL: f64 = 1e-8;
    let (l0, r0) = newton_root(solver, xi_start, seed, 1e-13, 50)?;
    if r0 > RESIDUAL {
        return Err(Error::NumericalInconsistency(format!("seed residual {r0:e}")));
    }
    let mut points = vec![(xi_start, l0)];
    let span = xi_end - xi_start;
    let nominal = span / steps.max(1) as f64;
    let mut h = nominal;
    let mut xi = xi_start;
    let mut slope = Complex64::new(0.0, 0.0);
    while (xi_end - xi) * span.signum() > 1e-14 * span.abs() {
        if h.abs() < 1e-8 * span.abs() {
            return Ok(SpectralCurve { points, stall: Some(Error::ContinuationStall { xi }.to_string()) });
        }
        let step = if (xi + h - xi_end) * span.signum() > 0.0 { xi_end - xi } else { h };
        let last = points.last().expect("seeded").1;
        let guess = last + slope * step;
        match newton_root(solver, xi + step, guess, 1e-12, 12) {
            Ok((l, res)) if res <= RESIDUAL && (l - guess).norm() <= 0.1 * (1.0 + last.norm()) => {
                slope = (l - last) / step;
                xi += step;
                points.push((xi, l));
                h = if (1.5 * h).abs() > nominal.abs() { nominal } else { 1.5 * h };
            }
            _ => h *= 0.5,
        }
    }
    Ok(SpectralCurve { points, stall: None })
}

/// Result of the mid-frequency boundary bisection at one Froude number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MidFreqPoint {
    pub froude: f64,
    pub hminus: f64,
    /// Final bracket, `lo` unstable and `hi` stable.
    pub bracket: (f64, f64),
    /// Unstable root nearest the imaginary axis at the unstable end.
    pub touch: Option<Complex64>,
    pub touch_xi: Option<f64>,
}

/// Smallest relative margin `H̲₋/H_hom − 1` probed for the unstable end of
/// the mid-frequency bracket; near F = 2.74 the boundary sits within ~1e−6
/// of the homoclinic limit, inside the default existence guard.
pub const MIDFREQ_LOWER_MARGIN: f64 = 1e-8;

fn midfreq_scan(froude: f64, h: f64, contour: ContourSpec, xi_mesh: usize, hint: Option<f64>) -> Result<UnstableScan> {
    let w = Wave::near_homoclinic(WaveParameters::scaled(froude, h), 0.5 * MIDFREQ_LOWER_MARGIN)?;
    scan_unstable(&w, contour, xi_mesh, hint)
}

/// Bisection on `H̲₋` between an unstable `lo` and a stable `hi`, the
/// predicate being a positive winding number anywhere on the ξ-mesh.
/// Bisects in `ln(H̲₋/H_hom − 1)` until `hi − lo ≤ tol`.
pub fn refine_midfreq_boundary(froude: f64, lo: f64, hi: f64, tol: f64, contour: ContourSpec, xi_mesh: usize) -> Result<MidFreqPoint> {
    let hh = h_hom(froude);
    if !(lo > hh && hi > lo && hi < 1.0) {
        return Err(Error::BracketInvalid);
    }
    let low = midfreq_scan(froude, lo, contour, xi_mesh, None)?;
    if low.hit.is_none() || midfreq_scan(froude, hi, contour, xi_mesh, None)?.hit.is_some() {
        return Err(Error::BracketInvalid);
    }
    bisect_midfreq(froude, lo, hi, low, tol, contour, xi_mesh)
}

/// Mid-frequency boundary without a user bracket: the stable end sits just
/// below boundary I and the unstable end is found by stepping the margin
/// above `H_hom` down by decades to [`MIDFREQ_LOWER_MARGIN`].
pub fn locate_midfreq_boundary(froude: f64, tol: f64, contour: ContourSpec, xi_mesh: usize) -> Result<MidFreqPoint> {
    let hh = h_hom(froude);
    let mut hi = hh + (boundary_i(froude)? - hh) * (1.0 - 1e-3);
    if midfreq_scan(froude, hi, contour, xi_mesh, None)?.hit.is_some() {
        return Err(Error::BracketInvalid);
    }
    let mut margin = hi / hh - 1.0;
    while margin > MIDFREQ_LOWER_MARGIN {
        margin = (0.1 * margin).max(MIDFREQ_LOWER_MARGIN);
        let lo = hh * (1.0 + margin);
        let scan = midfreq_scan(froude, lo, contour, xi_mesh, None)?;
        if scan.hit.is_some() {
            return bisect_midfreq(froude, lo, hi, scan, tol, contour, xi_mesh);
        }
        hi = lo;
    }
    Err(Error::BracketInvalid)
}

fn bisect_midfreq(froude: f64, lo: f64, hi: f64, mut last: UnstableScan, tol: f64, contour: ContourSpec, xi_mesh: usize) -> Result<MidFreqPoint> {
    let hh = h_hom(froude);
    let at = |t: f64| hh * (1.0 + t.exp());
    let (mut t_lo, mut t_hi) = ((lo / hh - 1.0).ln(), (hi / hh - 1.0).ln());
    while at(t_hi) - at(t_lo) > tol {
        let t = 0.5 * (t_lo + t_hi);
        let s = midfreq_scan(froude, at(t), contour, xi_mesh, last.hit.map(|h| h.0))?;
        if s.hit.is_some() {
            t_lo = t;
            last = s;
        } else {
            t_hi = t;
        }
    }
    let touch_xi = last.hit.map(|h| h.0);
    let touch = touch_xi.and_then(|xi| touch_point(&last, xi));
    Ok(MidFreqPoint { froude, hminus: 0.5 * (at(t_lo) + at(t_hi)), bracket: (at(t_lo), at(t_hi)), touch, touch_xi })
}

/// An unstable root of `Δ̂(·, ξ)` found by Newton from the imaginary-axis
/// contour point where the phase turns fastest.
pub fn touch_point(scan: &UnstableScan, xi: f64) -> Option<Complex64> {
    let table = &scan.table;
    let vals = table.values(xi);
    let n = vals.len();
    let (_, j) = (0..n)
        .filter(|&j| matches!(table.nodes[j].0, 1 | 3))
        .map(|j| (phase_step(&vals[j], &vals[(j + 1) % n]).abs(), j))
        .max_by(|a, b| a.0.total_cmp(&b.0))?;
    let solver = EigenSolver::new(&scan.solver.wave);
    let l0 = table.lambdas[j];
    let seed = l0 + Complex64::new(1e-3 * (1.0 + l0.norm()), 0.0);
    match newton_root(&solver, xi, seed, 1e-12, 60) {
        Ok((l, res)) if res < 1e-8 && l.re > 0.0 => Some(l),
        _ => None,
    }
}

/// Consecutive boundary points whose touching frequencies differ by more
/// than `rel` relative to their mean: the critical branch switched.
pub fn branch_switches(points: &[MidFreqPoint], rel: f64) -> Vec<(f64, f64)> {
    points
        .windows(2)
        .filter_map(|p| {
            let (a, b) = (p[0].touch?.im.abs(), p[1].touch?.im.abs());
            ((a - b).abs() > rel * 0.5 * (a + b)).then_some((p[0].froude, p[1].froude))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contour_layout() {
        let c = ContourSpec::default();
        assert_eq!(c.total_points(), 7000);
        let p = c.points();
        assert_eq!(p.len(), 7000);
        assert!((p[0] - Complex64::new(0.0, -400.0)).norm() < 1e-12);
        assert!((p[1000] - Complex64::new(400.0, 0.0)).norm() < 1e-9);
        assert!((p[2000] - Complex64::new(0.0, 400.0)).norm() < 1e-9);
        assert!((p[5000] - Complex64::new(0.0, -0.01)).norm() < 1e-12);
        assert!(p.iter().all(|z| z.re >= -1e-12));
    }

    #[test]
    fn half_mesh_is_symmetric_part() {
        let xs = xi_mesh_half(2.0, 1000);
        assert_eq!(xs.len(), 501);
        assert_eq!(xs[0], 0.0);
        assert!((xs[500] - PI / 2.0).abs() < 1e-12);
    }
}

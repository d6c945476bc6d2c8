use num_complex::Complex64;
use proptest::prelude::*;
use rollwave::evans::evans_split;
use rollwave::lowfreq::{boundary_i, low_freq_coefficients};
use rollwave::profile::h_hom;
use rollwave::rk::RkOptions;
use rollwave::singular_ode::{EigenSolver, SolverOptions};
use rollwave::spectrum::*;
use rollwave::{Wave, WaveParameters};
use std::f64::consts::PI;
use std::sync::OnceLock;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn wave(f: f64, h: f64) -> Wave {
    Wave::new(WaveParameters::scaled(f, h)).unwrap()
}

fn tight(w: &Wave) -> EigenSolver {
    let rk = RkOptions { abs_tol: 1e-15, rel_tol: 1e-13, ..RkOptions::default() };
    EigenSolver::with_options(w, SolverOptions { rk, ..SolverOptions::default() })
}

fn max_winding(w: &Wave, contour: ContourSpec) -> i64 {
    let s = EigenSolver::with_options(w, SolverOptions::sweep());
    let t = split_table(&s, contour).unwrap();
    winding_profile(&s, &t, 1000).unwrap().iter().map(|p| p.1).max().unwrap()
}

fn anchor_table() -> &'static (EigenSolver, SplitTable) {
    static T: OnceLock<(EigenSolver, SplitTable)> = OnceLock::new();
    T.get_or_init(|| {
        let s = EigenSolver::with_options(&wave(8.0, 0.22), SolverOptions::sweep());
        let t = split_table(&s, ContourSpec::default()).unwrap();
        (s, t)
    })
}

#[test]
fn resolved_contour_keeps_nominal_points() {
    let c0 = ContourSpec::default();
    let c1 = c0.resolved(30.0);
    assert!(c1.total_points() > c0.total_points());
    let fine = c1.points();
    for p in c0.points().iter().step_by(97) {
        assert!(fine.iter().any(|q| (q - p).norm() < 1e-9 * (1.0 + p.norm())), "{p}");
    }
    assert_eq!(c0.resolved(1e-6), c0);
}

#[test]
fn winding_anchor_has_an_enclosed_root() {
    let (s, t) = anchor_table();
    let prof = winding_profile(s, t, 1000).unwrap();
    assert_eq!(prof.len(), 501);
    assert!(prof.iter().any(|p| p.1 >= 1));
    assert!(prof.iter().all(|p| p.1 >= 0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn winding_is_even_in_xi(t in 0.0f64..1.0) {
        let (s, table) = anchor_table();
        let xi = t * PI / s.wave.period();
        prop_assert_eq!(table.winding(s, xi).unwrap(), table.winding(s, -xi).unwrap());
    }
}

#[test]
fn winding_is_stable_under_doubling_and_larger_radius() {
    // I < threshold here, so no roots lie beyond R = 400.
    let w = wave(16.0, 0.8);
    assert!(rollwave::highfreq::hf_index(&w).unwrap().index < 1.0);
    let base = ContourSpec::default();
    let n = max_winding(&w, base);
    assert_eq!(max_winding(&w, base.doubled()), n);
    let wide = ContourSpec { r_outer: 800.0, n_large_arc: 2 * base.n_large_arc, n_segment: 2 * base.n_segment, ..base };
    assert_eq!(max_winding(&w, wide), n);
}

#[test]
fn near_homoclinic_stable_wave_has_zero_winding_everywhere() {
    let v = classify_stability(&wave(3.0, h_hom(3.0) + 1e-5), &ClassifyOptions::default()).unwrap();
    assert_eq!(v.verdict, Verdict::Stable);
    assert_eq!(v.evidence.winding_profile.len(), 501);
    assert!(v.evidence.winding_profile.iter().all(|p| p.1 == 0));
    assert!(v.evidence.beta > 0.0 && !v.evidence.forced_unstable && v.evidence.index < v.evidence.threshold);
}

#[test]
fn no_stable_waves_beyond_the_closing_point() {
    let hh = h_hom(17.0);
    for t in [0.05, 0.3, 0.6, 0.9] {
        let v = classify_stability(&wave(17.0, hh + (1.0 - hh) * t), &ClassifyOptions::default()).unwrap();
        assert!(!v.verdict.is_stable(), "t={t}: {}", v.verdict.as_str());
    }
}

#[test]
fn prefilter_skips_the_sweep_only() {
    let w = wave(3.0, 0.8);
    let with = classify_stability(&w, &ClassifyOptions::default()).unwrap();
    assert_eq!(with.verdict, Verdict::UnstableLowfreq);
    assert!(with.max_winding.is_none() && with.evidence.winding_profile.is_empty());
    let without = classify_stability(&w, &ClassifyOptions { prefilter: false, ..ClassifyOptions::default() }).unwrap();
    assert_eq!(without.verdict, Verdict::UnstableLowfreq);
    assert!(without.max_winding.is_some());
}

#[test]
fn tracked_roots_have_small_residual_and_fit_the_expansion() {
    for &(f, h) in &[(3.0, 0.8), (8.0, 0.5)] {
        let w = wave(f, h);
        let s = tight(&w);
        let co = low_freq_coefficients(&s).unwrap();
        let x = w.period();
        let (x0, x1) = (1e-3 / x, 2e-3 / x);
        let up = track_critical_root(&s, c(0.0, -co.alpha * x0), x0, x1, 4).unwrap();
        let down = track_critical_root(&s, c(0.0, co.alpha * x0), -x0, -x1, 4).unwrap();
        assert!(up.stall.is_none() && down.stall.is_none());
        for &(xi, l) in up.points.iter().chain(&down.points) {
            assert!(relative_residual(&evans_split(&s, l).unwrap(), xi) < 1e-8);
        }
        let ends = |k: usize| -> (f64, f64) {
            let (xi, lp) = if k == 0 { up.points[0] } else { *up.points.last().unwrap() };
            let lm = if k == 0 { down.points[0].1 } else { down.points.last().unwrap().1 };
            (-(lp - lm).im / (2.0 * xi), -(lp + lm).re / (2.0 * xi * xi))
        };
        let (a, b) = (ends(0), ends(1));
        let alpha = (4.0 * a.0 - b.0) / 3.0;
        let beta = (4.0 * a.1 - b.1) / 3.0;
        assert!((alpha - co.alpha).abs() < 1e-3 * co.alpha.abs(), "F={f}: {alpha} vs {}", co.alpha);
        assert!((beta - co.beta).abs() < 1e-3 * co.beta.abs(), "F={f}: {beta} vs {}", co.beta);
    }
}

#[test]
fn low_frequency_loop_flips_across_boundary_i() {
    let f = 2.492779325091594;
    let b = boundary_i(f).unwrap();
    let side = |h: f64| {
        let w = wave(f, h);
        let s = tight(&w);
        let co = low_freq_coefficients(&s).unwrap();
        let x = w.period();
        let (x0, x1) = (1e-2 / x, 5e-2 / x);
        let curve = track_critical_root(&s, c(-co.beta * x0 * x0, -co.alpha * x0), x0, x1, 20).unwrap();
        assert!(curve.stall.is_none());
        let (_, l) = *curve.points.last().unwrap();
        (l.re.signum(), l.im.abs())
    };
    let (below_far, above_far) = (side(b - 0.01), side(b + 0.01));
    let (below_near, above_near) = (side(b - 0.002), side(b + 0.002));
    assert_eq!(below_far.0, -1.0);
    assert_eq!(above_far.0, 1.0);
    assert_eq!(below_near.0, -1.0);
    assert_eq!(above_near.0, 1.0);
    // The loop shrinks toward the origin as α → 0.
    assert!(below_near.1 < below_far.1 && above_near.1 < above_far.1);
}

#[test]
fn branch_switches_flag_large_relative_changes() {
    let p = |f: f64, im: f64| MidFreqPoint { froude: f, hminus: 0.5, bracket: (0.5, 0.5), touch: Some(c(0.0, im)), touch_xi: Some(0.1) };
    let pts = [p(2.73, 10.0), p(2.74, 10.5), p(2.75, 3.0)];
    assert_eq!(branch_switches(&pts, 0.25), vec![(2.74, 2.75)]);
    assert!(branch_switches(&pts[..2], 0.25).is_empty());
}

/// Near onset the stable band is very thin and sits within ~1e−6 of the
/// homoclinic limit, so locating its lower edge takes many minutes.
#[test]
#[ignore]
fn near_onset_midpoint_is_stable() {
    let f = 2.6;
    let lower = locate_midfreq_boundary(f, 1e-6, ContourSpec::default(), 1000).unwrap().hminus;
    let upper = boundary_i(f).unwrap();
    let v = classify_stability(&wave(f, 0.5 * (lower + upper)), &ClassifyOptions::default()).unwrap();
    assert_eq!(v.verdict, Verdict::Stable);
    assert_eq!(v.max_winding, Some(0));
}

use approx::assert_relative_eq;
use num_complex::Complex64;
use rollwave::evans::{evans_direct, evans_split};
use rollwave::lowfreq::*;
use rollwave::modulation::whitham_characteristics;
use rollwave::profile::h_hom;
use rollwave::rk::RkOptions;
use rollwave::singular_ode::{EigenSolver, SolverOptions};
use rollwave::{Wave, WaveParameters};
use std::f64::consts::PI;

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

/// `Δ̂ = Δ/λ` from the directly assembled determinant.
fn hat_direct(s: &EigenSolver, l: Complex64, xi: f64) -> Complex64 {
    evans_direct(s, l, xi).unwrap().to_complex() / l
}

/// Parameter points spread over the existence window.
fn grid(nf: usize, nh: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 0..nf {
        let f = 2.3 + 14.0 * i as f64 / (nf - 1) as f64;
        let hh = h_hom(f);
        for j in 0..nh {
            let t = (j as f64 + 0.5) / nh as f64;
            out.push((f, hh + (1.0 - hh) * t));
        }
    }
    out
}

#[test]
fn alpha1_closed_form_matches_polynomial() {
    for (f, h) in grid(6, 6) {
        let w = wave(f, h);
        let (a, b) = (alpha1_closed(&w), alpha1_polynomial(&w));
        assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-3), "F={f} H={h}: {a} vs {b}");
    }
}

#[test]
fn alpha1_matches_xi_difference_of_direct_determinant() {
    let w = wave(3.0, 0.8);
    let s = tight(&w);
    let x = w.period();
    // Δ̂(λ, ξ) at small λ, extrapolated to λ = 0 and differenced in ξ.
    let eta = 1e-4 / x;
    let at = |l: f64| (hat_direct(&s, c(l, 0.0), eta) - hat_direct(&s, c(l, 0.0), -eta)) / (2.0 * eta);
    let h = 1e-4;
    let d = at(h) * 2.0 - at(2.0 * h);
    let closed = alpha1_closed(&w);
    assert!(d.re.abs() < 1e-6 * closed.abs(), "{d}");
    assert_relative_eq!(d.im, closed, max_relative = 1e-6);
}

#[test]
fn alpha0_matches_lambda_difference() {
    for &(f, h) in &[(3.0, 0.8), (8.0, 0.5), (2.6, 0.9)] {
        let w = wave(f, h);
        let s = tight(&w);
        let co = low_freq_coefficients(&s).unwrap();
        let step = 1e-5;
        let fd = (hat_direct(&s, c(step, 0.0), 0.0) - hat_direct(&s, c(-step, 0.0), 0.0)) / (2.0 * step);
        assert_relative_eq!(fd.re, co.alpha0, max_relative = 1e-5);
    }
}

#[test]
fn gamma_from_jet_matches_richardson_differences() {
    for &(f, h) in &[(3.0, 0.8), (5.0, 0.4), (2.6, 0.77)] {
        let w = wave(f, h);
        let s = tight(&w);
        let x = w.period();
        let co = low_freq_coefficients(&s).unwrap();
        // Second λ-derivative from the even part of Δ̂(·, 0), Richardson in h.
        let d2 = |h: f64| (hat_direct(&s, c(h, 0.0), 0.0) + hat_direct(&s, c(-h, 0.0), 0.0)) / (h * h);
        let h0 = 2e-3;
        let d2l = (d2(h0) * 4.0 - d2(2.0 * h0)) / 3.0;
        // Mixed derivative from a centred ξ-difference, differenced in λ.
        let eta = 1e-3 / x;
        let g = |l: f64| (hat_direct(&s, c(l, 0.0), eta) - hat_direct(&s, c(l, 0.0), -eta)) / (2.0 * eta);
        let mixed = |h: f64| (g(h) - g(-h)) / (2.0 * h);
        let d2lx = (mixed(h0) * 4.0 - mixed(2.0 * h0)) / 3.0;
        assert_relative_eq!(d2l.re, co.d2_lambda, max_relative = 1e-4);
        assert_relative_eq!(d2lx.im, co.d2_lambda_xi_over_i, max_relative = 1e-4);
        let alpha = co.alpha;
        let gamma = (-x / 2.0 - alpha / 2.0 * d2l / co.alpha0 - Complex64::i() * d2lx / co.alpha0).re;
        assert_relative_eq!(gamma, co.gamma, max_relative = 1e-4);
        assert_relative_eq!(co.beta, co.alpha * co.gamma);
    }
}

fn small_root(s: &EigenSolver, xi: f64, mut l: Complex64) -> Complex64 {
    // Newton on Δ̂(·, ξ) with a centred-difference derivative.
    for _ in 0..40 {
        let f = evans_split(s, l).unwrap().hat_complex(xi);
        let e = 1e-6 * (1.0 + l.norm());
        let df = (evans_split(s, l + e).unwrap().hat_complex(xi) - evans_split(s, l - e).unwrap().hat_complex(xi)) / (2.0 * e);
        let d = f / df;
        l -= d;
        if d.norm() < 1e-14 {
            break;
        }
    }
    l
}

#[test]
fn tracked_small_roots_reproduce_alpha_and_beta() {
    for &(f, h) in &[(3.0, 0.8), (3.0, h_hom(3.0) + 1e-5), (8.0, 0.5)] {
        let w = wave(f, h);
        let s = tight(&w);
        let co = low_freq_coefficients(&s).unwrap();
        let x = w.period();
        let mut fits = Vec::new();
        for eps in [1e-3, 2e-3] {
            let xi = eps / x;
            let lp = small_root(&s, xi, c(0.0, -co.alpha * xi));
            let lm = small_root(&s, -xi, c(0.0, co.alpha * xi));
            fits.push((-(lp - lm).im / (2.0 * xi), -(lp + lm).re / (2.0 * xi * xi)));
        }
        // Richardson in ξ removes the O(ξ²) bias of the symmetric fits.
        let alpha_fit = (4.0 * fits[0].0 - fits[1].0) / 3.0;
        let beta_fit = (4.0 * fits[0].1 - fits[1].1) / 3.0;
        assert_relative_eq!(alpha_fit, co.alpha, max_relative = 1e-3);
        assert_relative_eq!(beta_fit, co.beta, max_relative = 1e-3);
    }
}

#[test]
fn alpha_matches_whitham_characteristic() {
    for (f, h) in grid(5, 5) {
        let w = wave(f, h);
        let co = low_freq_coefficients(&EigenSolver::new(&w)).unwrap();
        let ch = whitham_characteristics(&w).unwrap();
        let want = ch.alpha2 - w.c();
        assert!((co.alpha - want).abs() <= 1e-6 * want.abs().max(1e-6), "F={f} H={h}: {} vs {want}", co.alpha);
    }
}

#[test]
fn factorisation_and_bloch_structure_at_zero() {
    let w = wave(3.0, 0.8);
    let s = EigenSolver::new(&w);
    let x = w.period();
    let split = evans_split(&s, c(0.0, 0.0)).unwrap();
    let a1 = alpha1_closed(&w);
    let scale = split.d0.to_complex().norm().max(split.d1.to_complex().norm());
    for k in 0..16 {
        let xi = -PI / x + 2.0 * PI / x * (k as f64 + 0.37) / 16.0;
        let d = evans_direct(&s, c(0.0, 0.0), xi).unwrap().to_complex();
        assert!(d.norm() <= 1e-12 * scale.max(1.0));
        let want = (Complex64::from_polar(1.0, xi * x) - 1.0) / (Complex64::i() * x) * Complex64::i() * a1;
        let got = split.hat_complex(xi);
        assert!((got - want).norm() <= 1e-8 * want.norm(), "xi={xi}: {got} vs {want}");
    }
}

#[test]
fn coperiodic_determinant_is_positive_for_large_real_lambda() {
    for (f, h) in grid(4, 3) {
        let s = EigenSolver::new(&wave(f, h));
        let d = evans_split(&s, c(100.0, 0.0)).unwrap().hat(0.0);
        assert!(d.m.re > 0.0, "F={f} H={h}");
    }
}

#[test]
fn alpha0_sign_is_constant() {
    for (f, h) in grid(10, 10) {
        let co = low_freq_coefficients(&EigenSolver::new(&wave(f, h))).unwrap();
        assert!(co.alpha0 > 0.0, "F={f} H={h}: alpha0 = {}", co.alpha0);
    }
}

#[test]
fn positive_alpha_forces_a_real_subharmonic_eigenvalue() {
    let w = wave(3.0, 0.8);
    let s = EigenSolver::new(&w);
    let co = low_freq_coefficients(&s).unwrap();
    let p = parity_indices(&co);
    assert!(co.alpha > 0.0 && p.forced_unstable && p.subharmonic_odd && !p.coperiodic_odd);
    let xi = PI / w.period();
    let sign = |l: f64| evans_split(&s, c(l, 0.0)).unwrap().hat(xi).m.re.signum();
    assert_eq!(sign(1e-4), -1.0);
    assert_eq!(sign(100.0), 1.0);

    let stable = wave(3.0, h_hom(3.0) + 1e-5);
    let co = low_freq_coefficients(&EigenSolver::new(&stable)).unwrap();
    assert!(!parity_indices(&co).forced_unstable);
    assert!(co.alpha < 0.0 && co.beta > 0.0);
}

#[test]
fn serre_residual_is_cubic() {
    let w = wave(3.0, 0.8);
    let s = EigenSolver::new(&w);
    let x = w.period();
    let (mut l, mut xi) = (c(0.04, 0.03), 0.05 / x);
    let mut prev = serre_consistency(&s, l, xi).unwrap();
    for _ in 0..3 {
        l *= 0.5;
        xi *= 0.5;
        let r = serre_consistency(&s, l, xi).unwrap();
        assert!(prev / r >= 7.0, "ratio {}", prev / r);
        prev = r;
    }
}

#[test]
fn boundary_i_anchor() {
    let h = boundary_i(2.492779325091594).unwrap();
    assert!((h - 0.806451612903226).abs() < 1e-6, "{h}");
    let co = low_freq_coefficients(&EigenSolver::new(&wave(2.492779325091594, h))).unwrap();
    assert!(co.alpha.abs() < 1e-6);
}

#[test]
fn boundary_ii_anchor() {
    let h = boundary_ii(2.5).unwrap();
    assert!((h - 0.745329985201548).abs() < 1e-3, "{h}");
    assert!(h > h_hom(2.5));
}

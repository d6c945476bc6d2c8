use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use rollwave::highfreq::*;
use rollwave::profile::h_hom;
use rollwave::singular_ode::EigenSolver;
use rollwave::{Wave, WaveParameters};

type M = [[f64; 2]; 2];

fn mul(a: &M, b: &M) -> M {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn inv(a: &M) -> M {
    let d = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]
}

/// `C₀ = P₀⁻¹B₁P₀ − D P₀⁻¹P₀'` assembled numerically, with every
/// x-derivative taken as a central difference in `H` times the slope.
fn c0_numeric(w: &Wave, h: f64) -> (M, f64) {
    let f = w.froude();
    let (c, q0) = (w.c(), w.q0());
    let d_of = |h: f64| h / (f * f) - q0 * q0 / (h * h);
    let p0 = |h: f64| -> M {
        let (s, m) = (h.sqrt() / f, q0 / h);
        [[m + s, m - s], [1.0, 1.0]]
    };
    let r = |hh: f64, qq: f64| hh - qq * qq / (hh * hh);
    let eps = 1e-5 * h;
    let dx = |g: &dyn Fn(f64) -> f64| (g(h + eps) - g(h - eps)) / (2.0 * eps) * w.slope(h);
    let q = c * h - q0;
    let r_h = (r(h + eps, q) - r(h - eps, q)) / (2.0 * eps);
    let r_q = (r(h, q + eps) - r(h, q - eps)) / (2.0 * eps);
    let b1: M = [[0.0, 0.0], [-r_q - dx(&|h| 2.0 * q0 / h), -dx(&d_of) + r_h + c * r_q]];
    let pp = p0(h);
    let (pa, pb) = (p0(h + eps), p0(h - eps));
    let mut dp = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            dp[i][j] = (pa[i][j] - pb[i][j]) / (2.0 * eps) * w.slope(h);
        }
    }
    let pi = inv(&pp);
    let first = mul(&mul(&pi, &b1), &pp);
    let second = mul(&pi, &dp);
    let d = d_of(h);
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = first[i][j] - d * second[i][j];
        }
    }
    (out, d)
}

fn wave(f: f64, h: f64) -> Wave {
    Wave::new(WaveParameters::scaled(f, h)).unwrap()
}

#[test]
fn closed_form_matches_numeric_matrix_chain() {
    for &(f, hm) in &[(3.0, 0.8), (8.0, 0.3), (2.5, 0.9)] {
        let w = wave(f, hm);
        let (lo, hi) = (w.hm(), w.hp());
        let mut checked = 0;
        for k in 0..24 {
            let h = lo + (hi - lo) * (k as f64 + 0.5) / 24.0;
            if (h - w.hs()).abs() < 0.05 * (hi - lo) {
                continue;
            }
            let (c0, d) = c0_numeric(&w, h);
            let want = c0[0][0] / d;
            let got = gamma_tilde_plus(&w, h);
            assert!((got - want).abs() <= 1e-8 * want.abs().max(1.0), "F={f} H={h}: {got} vs {want}");
            checked += 1;
        }
        assert!(checked >= 20);
    }
}

#[test]
fn reduced_matrix_at_the_sonic_point() {
    let f = 3.0;
    let w = wave(f, 0.8);
    let (c0, _) = c0_numeric(&w, w.hs());
    assert!(c0[0][0].abs() < 1e-8 && c0[0][1].abs() < 1e-8 && c0[1][1].abs() < 1e-8);
    assert_relative_eq!(c0[1][0], 4.0 / 3.0 * (f + 1.0) / f, max_relative = 1e-8);
}

#[test]
fn gamma_tilde_is_continuous_on_the_profile() {
    let w = wave(3.0, 0.8);
    let (lo, hi) = (w.hm(), w.hp());
    let n = 20_000;
    let vals: Vec<f64> = (0..=n).map(|k| gamma_tilde_plus(&w, lo + (hi - lo) * k as f64 / n as f64)).collect();
    let bound = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    assert!(vals.iter().all(|v| v.is_finite()));
    let jump = vals.windows(2).fold(0.0f64, |a, p| a.max((p[1] - p[0]).abs()));
    assert!(jump < 1e-3 * bound.max(1.0), "{jump}");
}

fn simpson(g: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = g(a) + g(b);
    for k in 1..n {
        s += g(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn index_agrees_with_fixed_simpson_and_regression_value() {
    let w = wave(3.0, 0.8);
    let hf = hf_index(&w).unwrap();
    let gint = simpson(|h| gamma_tilde_plus(&w, h) / w.slope(h), w.hm(), w.hp(), 1_000_000);
    let mint = simpson(|h| mu_tilde_plus(&w, h) / w.slope(h), w.hm(), w.hp(), 1_000_000);
    assert_relative_eq!(hf.gamma_tilde_plus_integral, gint, max_relative = 1e-7);
    assert_relative_eq!(hf.mu_tilde_plus_integral, mint, max_relative = 1e-7);
    assert_relative_eq!(hf.index, 0.1725568411784279, max_relative = 1e-9);
    assert_eq!(hf.verdict, HfVerdict::HfClear);
    assert_relative_eq!(hf.asymptote, hf.index.ln() / hf.mu_tilde_plus_integral);
}

#[test]
fn index_below_one_on_both_scans() {
    let hh = h_hom(3.0);
    for k in 0..50 {
        let h = hh + (1.0 - hh) * (k as f64 + 0.5) / 50.0;
        let hf = hf_index(&wave(3.0, h)).unwrap();
        assert!(hf.index < 1.0 && hf.index > 0.0, "H={h}: {}", hf.index);
    }
    for k in 0..50 {
        let f = 2.4 + 17.6 * k as f64 / 49.0;
        let hf = hf_index(&wave(f, 0.8)).unwrap();
        assert!(hf.index < 1.0 && hf.index > 0.0, "F={f}: {}", hf.index);
    }
}

#[test]
fn index_tends_to_one_linearly_at_small_amplitude() {
    // ln I ≈ −(3/2 + 6/(F−2)) δ for H̲₋ = 1 − δ, from the sonic values of
    // γ̃₊ and of the endpoint ratio.
    for &f in &[3.0, 5.0, 10.0] {
        let slope = 1.5 + 6.0 / (f - 2.0);
        for &d in &[1e-3, 1e-4] {
            let i = hf_index(&wave(f, 1.0 - d)).unwrap().index;
            assert!(i < 1.0);
            assert_relative_eq!(-i.ln() / d, slope, max_relative = 20.0 * d);
        }
    }
}

#[test]
fn determinant_approaches_two_term_model() {
    let w = wave(3.0, 0.8);
    let s = EigenSolver::new(&w);
    let ls: Vec<Complex64> = [50.0, 100.0, 150.0, 200.0].iter().map(|&l| Complex64::new(l, 0.0)).collect();
    let r = hf_asymptotic_check(&s, &ls).unwrap();
    let err: Vec<f64> = r.iter().map(|z| (z - 1.0).norm()).collect();
    assert!(err[3] < 0.05, "{err:?}");
    assert!(err.windows(2).all(|p| p[1] < p[0]), "{err:?}");
    // Off the real axis as well.
    let z = hf_asymptotic_check(&s, &[Complex64::new(200.0, 150.0)]).unwrap()[0];
    assert!((z - 1.0).norm() < 0.05, "{z}");
    let r0 = empirical_radius(&s, &[5.0, 10.0, 20.0, 50.0, 100.0, 200.0], 0.1).unwrap();
    assert!(r0.is_some_and(|r| r <= 20.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn positivity_properties(f in 2.2f64..20.0, t in 0.02f64..0.98) {
        let hh = h_hom(f);
        let w = wave(f, hh + (1.0 - hh) * t);
        let hf = hf_index(&w).unwrap();
        prop_assert!(hf.prefactor > 0.0);
        prop_assert!(hf.mu_tilde_plus_integral > 0.0);
        prop_assert!(hf.threshold > 0.0 && hf.threshold < 1.0);
        prop_assert!(hf.index > 0.0);
        for k in 0..=10 {
            let h = w.hm() + (w.hp() - w.hm()) * k as f64 / 10.0;
            prop_assert!(mu_tilde_plus(&w, h) > 0.0);
        }
    }
}

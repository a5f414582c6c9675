//! Independent oracles for the special functions and cap measures:
//! quadrature of the defining integrals, the even-dimension product
//! recurrence, and finite-difference derivative identities.

use isoball::geometry::{
    ball_volume, cap_colatitude_for_volume, sphere_area, unit_volume_radius, BallGeometry,
};
use isoball::special::reg_inc_beta;
use proptest::prelude::*;
use std::f64::consts::PI;

/// Adaptive Simpson quadrature, the reference integrator for the oracles.
fn simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64 + Copy>(
        f: F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

fn kappa(n: u32) -> f64 {
    ball_volume(n, 1.0).unwrap()
}

/// Slice quadrature: cap volume as ∫ κ_{n−1} (R² − x²)^{(n−1)/2} dx.
fn cap_volume_oracle(n: u32, r: f64, theta: f64) -> f64 {
    let k = kappa(n - 1);
    let p = f64::from(n - 1) / 2.0;
    simpson(
        |x| k * (r * r - x * x).max(0.0).powf(p),
        r * theta.cos(),
        r,
        1e-14,
    )
}

/// Revolution quadrature: cap area as ∫ σ_{n−2} (R sin t)^{n−2} R dt.
fn cap_area_oracle(n: u32, r: f64, theta: f64) -> f64 {
    let sigma = f64::from(n - 1) * kappa(n - 1);
    simpson(
        |t| sigma * (r * t.sin()).powi(n as i32 - 2) * r,
        0.0,
        theta,
        1e-14,
    )
}

#[test]
fn beta_matches_quadrature_oracle() {
    // I_x(a, b) = ∫₀ˣ t^{a−1}(1−t)^{b−1} dt / B(a, b)
    let cases = [(0.3, 2.5, 0.5), (0.6, 1.5, 3.0), (0.15, 4.0, 0.5)];
    for (x, a, b) in cases {
        let whole = simpson(
            |t| t.powf(a - 1.0) * (1.0 - t).max(1e-300).powf(b - 1.0),
            1e-14,
            1.0 - 1e-14,
            1e-14,
        );
        let part = simpson(
            |t| t.powf(a - 1.0) * (1.0 - t).max(1e-300).powf(b - 1.0),
            1e-14,
            x,
            1e-14,
        );
        let oracle = part / whole;
        let val = reg_inc_beta(x, a, b).unwrap();
        assert!(
            (val - oracle).abs() < 1e-10,
            "I_{x}({a},{b}): {val} vs oracle {oracle}"
        );
    }
}

#[test]
fn ball_volume_matches_product_recurrence() {
    // V_n(r) = V_{n−2}(r) · 2π r² / n, seeded by V_1 = 2r, V_2 = π r²
    let r = 0.8f64;
    let mut v = [2.0 * r, PI * r * r];
    for n in 3..=20u32 {
        let next = v[0] * 2.0 * PI * r * r / f64::from(n);
        v = [v[1], next];
    }
    let oracle = v[1];
    let val = ball_volume(20, r).unwrap();
    assert!(
        ((val - oracle) / oracle).abs() < 1e-10,
        "{val} vs recurrence {oracle}"
    );
}

#[test]
fn sphere_area_is_volume_derivative() {
    // area(n, r) = d/dr ball_volume(n, r), central finite difference
    for (n, r) in [(7u32, 2.0), (3, 1.0), (12, 0.5)] {
        let h = 1e-6 * r;
        let fd =
            (ball_volume(n, r + h).unwrap() - ball_volume(n, r - h).unwrap()) / (2.0 * h);
        let area = sphere_area(n, r).unwrap();
        assert!(
            ((area - fd) / area).abs() < 1e-6,
            "n={n}: {area} vs fd {fd}"
        );
    }
}

#[test]
fn cap_volume_matches_slice_quadrature() {
    for n in 2..=12u32 {
        for k in 1..=25 {
            let theta = PI * k as f64 / 26.0;
            let g = BallGeometry::with_radius(n, 1.0).unwrap();
            let val = g.cap(theta).unwrap().volume();
            let oracle = cap_volume_oracle(n, 1.0, theta);
            assert!(
                ((val - oracle) / oracle).abs() < 1e-8,
                "n={n} θ={theta}: {val} vs {oracle}"
            );
        }
    }
}

#[test]
fn cap_area_matches_revolution_quadrature() {
    for n in 2..=12u32 {
        for k in 1..=25 {
            let theta = PI * k as f64 / 26.0;
            let g = BallGeometry::with_radius(n, 1.0).unwrap();
            let val = g.cap(theta).unwrap().area();
            let oracle = cap_area_oracle(n, 1.0, theta);
            assert!(
                ((val - oracle) / oracle).abs() < 1e-8,
                "n={n} θ={theta}: {val} vs {oracle}"
            );
        }
    }
    // an off-unit radius case
    let g = BallGeometry::with_radius(5, 1.3).unwrap();
    let val = g.cap(1.0).unwrap().area();
    let oracle = cap_area_oracle(5, 1.3, 1.0);
    assert!(((val - oracle) / oracle).abs() < 1e-8);
}

#[test]
fn cap_derivatives_match_kinematics() {
    // dV/dθ = disk(R sin θ) · R sin θ and dA/dθ = rim(R sin θ) · R:
    // the cutting plane sweeps at speed R sin θ, the rim band has width R dθ
    let h = 1e-4;
    for n in [2u32, 3, 6, 15] {
        let g = BallGeometry::unit_volume(n).unwrap();
        let r = g.radius();
        for &theta in &[0.4, 1.0, PI / 2.0 - 0.1, 2.2] {
            let vp = g.cap(theta + h).unwrap().volume();
            let vm = g.cap(theta - h).unwrap().volume();
            let dv = (vp - vm) / (2.0 * h);
            let rim_r = r * theta.sin();
            let disk = ball_volume(n - 1, rim_r).unwrap();
            let expected_v = disk * rim_r;
            assert!(
                ((dv - expected_v) / expected_v).abs() < 1e-5,
                "dV n={n} θ={theta}: {dv} vs {expected_v}"
            );
            let ap = g.cap(theta + h).unwrap().area();
            let am = g.cap(theta - h).unwrap().area();
            let da = (ap - am) / (2.0 * h);
            let rim = if n == 2 {
                2.0 // 0-sphere: two points
            } else {
                sphere_area(n - 1, rim_r).unwrap()
            };
            let expected_a = rim * r;
            assert!(
                ((da - expected_a) / expected_a).abs() < 1e-5,
                "dA n={n} θ={theta}: {da} vs {expected_a}"
            );
        }
    }
}

#[test]
fn colatitude_inversion_against_oracle() {
    let g = BallGeometry::unit_volume(6).unwrap();
    for target in [0.01, 0.2, 0.5, 0.77] {
        let theta = cap_colatitude_for_volume(&g, target).unwrap();
        let oracle = cap_volume_oracle(6, g.radius(), theta);
        assert!((oracle - target).abs() < 1e-9, "θ={theta}: {oracle}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complement_identities_hold(n in 2u32..50, frac in 1e-6f64..1.0) {
        let theta = PI * frac;
        let g = BallGeometry::unit_volume(n).unwrap();
        let v = g.cap(theta).unwrap().volume() + g.cap(PI - theta).unwrap().volume();
        prop_assert!((v - 1.0).abs() < 1e-10);
        let s = g.cap(theta).unwrap().area() + g.cap(PI - theta).unwrap().area();
        let total = g.boundary_area().unwrap();
        prop_assert!((s - total).abs() < 1e-10 * total);
    }

    #[test]
    fn beta_symmetry_everywhere(x in 0.0f64..=1.0, a in 0.1f64..60.0, b in 0.1f64..60.0) {
        let s = reg_inc_beta(x, a, b).unwrap() + reg_inc_beta(1.0 - x, b, a).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-12, "sum {s}");
    }

    #[test]
    fn mc_agrees_with_cap_volume(seed in 0u64..1000) {
        // a random cap as the indicator set, coarse-budget agreement
        let n = 2 + (seed % 7) as u32;
        let theta = 0.4 + (seed % 13) as f64 * 0.15;
        let g = BallGeometry::unit_volume(n).unwrap();
        let cut = g.radius() * theta.cos();
        let est = isoball::mc_volume_estimate(|p| p[0] >= cut, &g, 60_000, seed);
        let exact = g.cap(theta.min(PI)).unwrap().volume();
        prop_assert!(
            (est.estimate - exact).abs() <= 5.0 * est.std_err.max(1e-4),
            "n={n} θ={theta}: {} vs {exact} (± {})", est.estimate, est.std_err
        );
    }
}

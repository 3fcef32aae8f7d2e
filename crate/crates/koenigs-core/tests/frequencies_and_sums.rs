use std::f64::consts::FRAC_PI_2;

use koenigs_core::exp_approx::*;
use koenigs_core::frequencies::{hardy_membership, CanonicalDomain, Membership};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

const CANONICAL: [CanonicalDomain; 5] = [
    CanonicalDomain::HalfPlaneRight,
    CanonicalDomain::HorizontalHalfPlaneUpper,
    CanonicalDomain::StripWidthPi,
    CanonicalDomain::LogDomain { a: 0.5, b: 0.0 },
    CanonicalDomain::EtaDomain { a: 1.0 },
];

#[test]
fn zero_is_always_a_frequency() {
    for dom in CANONICAL {
        for p in [1.0, 2.0] {
            assert_eq!(hardy_membership(C64::new(0.0, 0.0), dom, p), Membership::Member, "{}", dom.name());
        }
    }
}

#[test]
fn frequency_sets_are_starlike_about_zero() {
    let dom = CanonicalDomain::EtaDomain { a: 1.0 };
    let l = C64::new(-0.8, 0.0);
    assert_eq!(hardy_membership(l, dom, 1.0), Membership::Member);
    for t in [0.25, 0.5, 0.75] {
        assert_eq!(hardy_membership(l * t, dom, 1.0), Membership::Member);
    }
}

#[test]
fn truncated_transform_matches_quadrature() {
    // Independent oracle: integrate e^{itz - 2t} directly.
    for z in [C64::new(0.0, 0.0), C64::new(1.5, -1.0), C64::new(-2.0, FRAC_PI_2)] {
        let q = integrate(&|t: f64| (C64::i() * z * t - 2.0 * t).exp(), 0.0, 5.0, 1e-13).unwrap();
        assert!((q - phi_beta_r(C64::new(2.0, 0.0), 5.0, z)).norm() < 1e-11);
    }
}

fn strip_sums(n: usize) -> (AtomicMeasure, ExpSum) {
    let m = discretize_measure(&|t: f64| C64::new((-2.0 * t).exp(), 0.0), 5.0, n).unwrap();
    let s = m.to_strip_sum();
    (m, s)
}

#[test]
fn strip_discretization_is_first_order() {
    let beta = C64::new(2.0, 0.0);
    let err = |n| {
        let (_, s) = strip_sums(n);
        strip_probe_points().iter().map(|&z| (s.eval(z) - phi_beta_r(beta, 5.0, z)).norm()).fold(0.0, f64::max)
    };
    let e: Vec<f64> = [64, 128, 256].iter().map(|&n| err(n)).collect();
    // Frozen from a reference run.
    assert!((e[0] - 0.11225).abs() < 1e-4, "{:?}", e);
    for w in e.windows(2) {
        let r = w[0] / w[1];
        assert!((1.5..=3.0).contains(&r), "{:?}", e);
    }
    let (_, s) = strip_sums(64);
    assert!((s.eval(C64::new(0.0, 0.0)) - phi_beta_r(beta, 5.0, C64::new(0.0, 0.0))).norm() < 0.05);
}

#[test]
fn strip_sums_are_uniformly_bounded() {
    let grid = strip_grid(-6.0, 6.0, 25, 13);
    let mut bounds = Vec::new();
    for n in [16, 64, 256, 1024] {
        let (m, s) = strip_sums(n);
        assert!(sup_on_grid(&s, &grid) <= m.strip_sup_bound() * (1.0 + 1e-12));
        bounds.push(m.strip_sup_bound());
    }
    // The computed bound does not grow with n.
    assert!(bounds.iter().all(|&b| b <= bounds[0]));
}

#[test]
fn half_plane_fit_is_monotone_in_budget() {
    let target = |z: C64| (z + 1.0).powi(-2);
    let errs: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&m| {
            least_squares_fit(&target, CanonicalDomain::HalfPlaneRight, &half_plane_grid(m), Family::HalfPlane, FitConfig::default())
                .unwrap()
                .fit
                .error
        })
        .collect();
    assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{:?}", errs);
    // Frozen: the 64-term error levels off near 1.377e-2.
    assert!((errs[2] - 1.377e-2).abs() < 1e-4, "{:?}", errs);
}

#[test]
fn log_starlike_shift_and_univalence() {
    let psi = |y: f64| -0.5 * (y.abs() + 1.0).ln();
    let d = LogStarlike { psi: &psi, k: 0.5, a: 0.5 };
    let b = choose_b(&d, &boundary_heights(4000), 60).unwrap();
    assert_eq!(b, 2.0);
    let r = univalence_winding_check(&alpha_map, &d, b, 1 << 14, C64::new(0.0, 0.0));
    assert!(r.passed(), "{:?}", r);
}

#[test]
fn eta_map_facts() {
    let pts: Vec<C64> = (0..10_000)
        .map(|k| {
            let s = k as f64 * 0.618_033_988_749_895;
            C64::new((s.fract() * 8.0).exp() - 1.0, ((s * 7.3).fract() - 0.5) * 2e4)
        })
        .collect();
    assert!(eta_derivative_deviation(0.5, &pts) < 0.5);
    let ts: Vec<f64> = (0..=4000).map(|k| -1e3 + k as f64 * 0.5).collect();
    assert!(eta_height_increasing(0.5, &ts) && eta_height_increasing(1.0, &ts));
    let ys: Vec<f64> = (0..200).map(|k| (k as f64 - 100.0) * 37.0).collect();
    assert!(eta_envelope_holds(1.0, &ys));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn laplace_of_convolution_is_product(
        a in prop::collection::vec((0.0..3.0f64, -2.0..2.0f64, -2.0..2.0f64), 1..8),
        b in prop::collection::vec((0.0..3.0f64, -2.0..2.0f64, -2.0..2.0f64), 1..8),
        zs in prop::collection::vec((-1.0..4.0f64, -5.0..5.0f64), 5),
    ) {
        let mk = |v: &[(f64, f64, f64)]| AtomicMeasure::new(v.iter().map(|&(t, x, y)| (t, C64::new(x, y))).collect(), 3.0).unwrap();
        let (m, n) = (mk(&a), mk(&b));
        let mn = m.convolve(&n);
        for (x, y) in zs {
            let z = C64::new(x, y);
            let lhs = mn.laplace(z);
            let rhs = m.laplace(z) * n.laplace(z);
            prop_assert!((lhs - rhs).norm() <= 1e-11 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn alpha_closed_form_matches_quadrature(zs in prop::collection::vec((-6.0..6.0f64, -6.0..6.0f64), 100)) {
        for (x, y) in zs {
            let z = C64::new(x, y);
            prop_assert!((alpha_map(z) - alpha_quadrature(z)).norm() < 1e-10, "z={}", z);
        }
    }
}

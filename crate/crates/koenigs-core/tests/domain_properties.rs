use koenigs_core::catalog;
use koenigs_core::classifier::{affine_minorant, classify};
use koenigs_core::completeness::decide_weak_star;
use koenigs_core::domain::{Bound, DeclaredLimits, Envelope, Piece, PieceKind, PiecewiseFunction};
use koenigs_core::ext::Ext::{self, Fin, NegInf, PosInf};
use koenigs_core::features::{analyze, exceptional_arc_to_unbounded};
use koenigs_core::{DefiningFunction, Tri};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

#[derive(Clone, Debug)]
enum Shape {
    Const(f64),
    Linear(f64, f64),
    MinusInf,
    Spike(f64, f64),
}

fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![
        (-3.0..3.0f64).prop_map(Shape::Const),
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Shape::Linear(a, b)),
        Just(Shape::MinusInf),
        (0.1..0.9f64, 0.5..4.0f64).prop_map(|(t, h)| Shape::Spike(t, h)),
    ]
}

/// A random piecewise function on `(0, n)` with unit pieces.
fn piecewise() -> impl Strategy<Value = DefiningFunction> {
    prop::collection::vec(shape(), 1..6).prop_map(|shapes| {
        let pieces = shapes
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let (lo, hi) = (Fin(k as f64), Fin(k as f64 + 1.0));
                match *s {
                    Shape::Const(c) => Piece::analytic(lo, hi, &format!("{}", c)),
                    Shape::Linear(a, b) => Piece::analytic(lo, hi, &format!("{}*y+({})", a, b)),
                    Shape::MinusInf => Piece::new(lo, hi, PieceKind::MinusInfinity),
                    Shape::Spike(t, h) => Piece::new(
                        lo,
                        hi,
                        PieceKind::PointSpike { c0: k as f64 + t, value: Fin(h), background: Fin(0.0) },
                    ),
                }
            })
            .collect();
        let n = shapes.len() as f64;
        DefiningFunction::new(PiecewiseFunction { lo: Fin(0.0), hi: Fin(n), pieces, points: vec![] }).unwrap()
    })
}

fn le(a: Ext, b: Ext) -> bool {
    a <= b || a.approx_eq(b, 1e-9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn regularizations_are_ordered(psi in piecewise(), ts in prop::collection::vec(0.0..1.0f64, 40)) {
        let lower = psi.lsc_regularization();
        let reg = psi.regularized();
        let n = psi.hi().to_f64();
        for t in ts {
            let y = t * n;
            if y <= 0.0 || y >= n { continue; }
            let (a, b, c) = (lower.value(y).unwrap(), reg.value(y).unwrap(), psi.value(y).unwrap());
            prop_assert!(le(a, b) && le(b, c), "y={} lsc={:?} reg={:?} psi={:?}", y, a, b, c);
        }
    }

    #[test]
    fn regularization_is_idempotent(psi in piecewise(), ts in prop::collection::vec(0.0..1.0f64, 40)) {
        let once = psi.regularized();
        let twice = once.regularized();
        prop_assert_eq!(once.equals_regularized().equal, Tri::Yes);
        let n = psi.hi().to_f64();
        for t in ts {
            let y = t * n;
            if y <= 0.0 || y >= n { continue; }
            prop_assert!(once.value(y).unwrap().approx_eq(twice.value(y).unwrap(), 1e-9));
        }
    }

    #[test]
    fn domains_are_invariant_under_right_translation(
        psi in piecewise(),
        pts in prop::collection::vec((-5.0..5.0f64, 0.0..1.0f64, 0.0..10.0f64), 50),
    ) {
        let n = psi.hi().to_f64();
        for (x, t, s) in pts {
            let z = C64::new(x, t * n);
            if psi.contains(z).unwrap() {
                prop_assert!(psi.contains(z + s).unwrap());
            }
        }
    }

    #[test]
    fn affine_minorant_holds(
        m0 in -2.0..2.0f64,
        amp in 0.0..3.0f64,
        ys in prop::collection::vec(-1e4..1e4f64, 10_000),
    ) {
        let bound = |c| Some(Bound::Affine { m: m0, c });
        let env = Envelope { lower: bound(-amp), upper: bound(amp), from: 0.0 };
        let p = Piece::analytic(NegInf, PosInf, &format!("({})*y+({})*sin(y)", m0, amp)).with_envelope(env);
        let psi = DefiningFunction::new(PiecewiseFunction { lo: NegInf, hi: PosInf, pieces: vec![p], points: vec![] }).unwrap();
        let a = affine_minorant(&psi);
        prop_assert_eq!(a.status, Tri::Yes);
        let (m, c) = a.minorant.unwrap();
        for y in ys {
            let v = psi.value(y).unwrap().to_f64();
            prop_assert!(v >= m * y + c, "y={} psi={} line={}", y, v, m * y + c);
        }
    }

    #[test]
    fn vertical_translation_preserves_verdicts(d in -50.0..50.0f64, k in 0usize..12) {
        let base = battery()[k].clone();
        let moved = base.shift_vertical(d).unwrap();
        prop_assert_eq!(classify(&base).kind.name(), classify(&moved).kind.name());
        let (fa, fb) = (analyze(&base), analyze(&moved));
        prop_assert_eq!(fa.configuration, fb.configuration);
        prop_assert_eq!(fa.i_n.len(), fb.i_n.len());
        prop_assert_eq!(fa.d_u.len(), fb.d_u.len());
        prop_assert_eq!(fa.spikes.len(), fb.spikes.len());
        prop_assert_eq!(fa.dw_discontinuity, fb.dw_discontinuity);
        prop_assert_eq!(decide_weak_star(&base).status, decide_weak_star(&moved).status);
    }

    #[test]
    fn horizontal_translation_preserves_verdicts(c in -50.0..50.0f64, k in 0usize..12) {
        let base = battery()[k].clone();
        let moved = base.plus_const(c);
        prop_assert_eq!(classify(&base).kind.name(), classify(&moved).kind.name());
        prop_assert_eq!(analyze(&base).configuration, analyze(&moved).configuration);
        prop_assert_eq!(decide_weak_star(&base).status, decide_weak_star(&moved).status);
    }
}

fn battery() -> Vec<DefiningFunction> {
    vec![
        catalog::strip(),
        catalog::half_plane(),
        catalog::quadrant(),
        catalog::point_spike(),
        catalog::double_spike(),
        catalog::comb(),
        catalog::oscillation_cantor(),
        catalog::minus_inf_gap(),
        catalog::two_gaps(),
        catalog::du_oscillation(),
        catalog::dw_simple(),
        catalog::cusp(),
    ]
}

#[test]
fn exceptional_arc_needs_an_oscillating_approach() {
    assert_eq!(exceptional_arc_to_unbounded(&catalog::exceptional_arc()), Tri::Yes);
    // A continuous approach to 0 from below leaves no unbounded discontinuity at 2.
    let calm = Piece::analytic(Fin(0.0), Fin(2.0), "-(2-y)").with_limits(
        Some(DeclaredLimits { liminf: Fin(-2.0), limsup: Fin(-2.0) }),
        Some(DeclaredLimits { liminf: Fin(0.0), limsup: Fin(0.0) }),
    );
    let psi = DefiningFunction::new(PiecewiseFunction {
        lo: Fin(0.0),
        hi: PosInf,
        pieces: vec![calm, Piece::new(Fin(2.0), PosInf, PieceKind::MinusInfinity)],
        points: vec![],
    })
    .unwrap();
    assert_eq!(exceptional_arc_to_unbounded(&psi), Tri::No);
}

#[test]
fn translation_moves_membership() {
    let psi = catalog::strip();
    let shifted = psi.plus_const(3.0);
    for &(x, y) in &[(0.5, 0.0), (2.9, 1.0), (3.1, -1.0), (10.0, 1.5)] {
        let z = C64::new(x, y);
        assert_eq!(psi.contains(z).unwrap(), shifted.contains(z + 3.0).unwrap());
    }
}

//! Reference domains used in tests, examples and the CLI battery.

use alloc::vec;
use core::f64::consts::FRAC_PI_2;
// Float supplies the libm-backed methods when std is absent.
#[allow(unused_imports)]
use num_traits::Float;

use crate::cantor::CantorSet;
use crate::domain::{
    Bound, DeclaredLimits, DefiningFunction, Envelope, GapProfile, Piece, PieceKind, PiecewiseFunction, PointValue,
};
use crate::expr::Expr;
use crate::ext::Ext::{self, Fin, NegInf, PosInf};

fn build(lo: Ext, hi: Ext, pieces: alloc::vec::Vec<Piece>, points: alloc::vec::Vec<PointValue>) -> DefiningFunction {
    DefiningFunction::new(PiecewiseFunction { lo, hi, pieces, points }).expect("catalog domain validates")
}

fn zero(lo: Ext, hi: Ext) -> Piece {
    Piece::analytic(lo, hi, "0")
}

fn lim(liminf: Ext, limsup: Ext) -> Option<DeclaredLimits> {
    Some(DeclaredLimits { liminf, limsup })
}

/// Continuous end value of an expression, declared as both limits.
fn at(src: &str, y: f64) -> Option<DeclaredLimits> {
    let v = Fin(Expr::parse(src).expect("valid").eval(y).expect("finite"));
    lim(v, v)
}

fn oscillatory(lo: Ext, hi: Ext, src: &str) -> Piece {
    Piece::new(lo, hi, PieceKind::Analytic { expr: Expr::parse(src).expect("valid"), oscillatory: true })
}

/// Half-strip `{x > 0, |y| < pi/2}`.
pub fn strip() -> DefiningFunction {
    build(Fin(-FRAC_PI_2), Fin(FRAC_PI_2), vec![zero(Fin(-FRAC_PI_2), Fin(FRAC_PI_2))], vec![])
}

/// The full strip `|y| < pi/2`.
pub fn full_strip() -> DefiningFunction {
    build(Fin(-FRAC_PI_2), Fin(FRAC_PI_2), vec![Piece::new(Fin(-FRAC_PI_2), Fin(FRAC_PI_2), PieceKind::MinusInfinity)], vec![])
}

/// Right half-plane.
pub fn half_plane() -> DefiningFunction {
    build(NegInf, PosInf, vec![zero(NegInf, PosInf)], vec![])
}

/// Quadrant `{x > 0, y > 0}`.
pub fn quadrant() -> DefiningFunction {
    build(Fin(0.0), PosInf, vec![zero(Fin(0.0), PosInf)], vec![])
}

/// Upper half-plane.
pub fn upper_half_plane() -> DefiningFunction {
    build(Fin(0.0), PosInf, vec![Piece::new(Fin(0.0), PosInf, PieceKind::MinusInfinity)], vec![])
}

/// Strip of height 4 with a spike of height 1 at `y = 0`.
pub fn point_spike() -> DefiningFunction {
    let k = PieceKind::PointSpike { c0: 0.0, value: Fin(1.0), background: Fin(0.0) };
    build(Fin(-2.0), Fin(2.0), vec![Piece::new(Fin(-2.0), Fin(2.0), k)], vec![])
}

/// Two spikes at `y = -1/2` and `y = 1/2`.
pub fn double_spike() -> DefiningFunction {
    let s = |c0| PieceKind::PointSpike { c0, value: Fin(1.0), background: Fin(0.0) };
    build(
        Fin(-2.0),
        Fin(2.0),
        vec![Piece::new(Fin(-2.0), Fin(0.0), s(-0.5)), Piece::new(Fin(0.0), Fin(2.0), s(0.5))],
        vec![],
    )
}

fn comb_pieces(lo: Ext, hi: Ext) -> alloc::vec::Vec<Piece> {
    let c = PieceKind::Cantor { carrier: CantorSet::ternary(0.0, 1.0), on_value: 1.0, gap: GapProfile::Constant(0.0) };
    vec![zero(lo, Fin(0.0)), Piece::new(Fin(0.0), Fin(1.0), c), zero(Fin(1.0), hi)]
}

/// `psi = 1` on the middle-thirds set in `[0, 1]`, `0` elsewhere, `I = (-1, 2)`.
pub fn comb() -> DefiningFunction {
    build(Fin(-1.0), Fin(2.0), comb_pieces(Fin(-1.0), Fin(2.0)), vec![])
}

/// The same comb over the whole line.
pub fn comb_line() -> DefiningFunction {
    build(NegInf, PosInf, comb_pieces(NegInf, PosInf), vec![])
}

/// `psi = 1` on the middle-thirds set, `sin(1/((b-y)(y-a)))` on each gap `(a, b)`, `I = (0, 1)`.
pub fn oscillation_cantor() -> DefiningFunction {
    let c = PieceKind::Cantor { carrier: CantorSet::ternary(0.0, 1.0), on_value: 1.0, gap: GapProfile::SinInverseGap { offset: 0.0 } };
    build(Fin(0.0), Fin(1.0), vec![Piece::new(Fin(0.0), Fin(1.0), c)], vec![])
}

/// `psi = -inf` on `(0, 1)`, `0` elsewhere on `(-1, 2)`.
pub fn minus_inf_gap() -> DefiningFunction {
    build(
        Fin(-1.0),
        Fin(2.0),
        vec![
            zero(Fin(-1.0), Fin(0.0)),
            Piece::new(Fin(0.0), Fin(1.0), PieceKind::MinusInfinity),
            zero(Fin(1.0), Fin(2.0)),
        ],
        vec![],
    )
}

/// `psi = -inf` on `(0, 1)` and `(2, 3)`, `0` elsewhere on `(-1, 4)`.
pub fn two_gaps() -> DefiningFunction {
    build(
        Fin(-1.0),
        Fin(4.0),
        vec![
            zero(Fin(-1.0), Fin(0.0)),
            Piece::new(Fin(0.0), Fin(1.0), PieceKind::MinusInfinity),
            zero(Fin(1.0), Fin(2.0)),
            Piece::new(Fin(2.0), Fin(3.0), PieceKind::MinusInfinity),
            zero(Fin(3.0), Fin(4.0)),
        ],
        vec![],
    )
}

/// `psi(y) = -(1/2) log(|y| + 1)` on the line.
pub fn log_domain() -> DefiningFunction {
    let env = Envelope {
        lower: Some(Bound::LogPower { c: 0.0, k: 0.5, a: 1.0 }),
        upper: Some(Bound::LogPower { c: 0.5 * 3f64.ln(), k: 0.5, a: 1.0 }),
        from: 0.0,
    };
    build(NegInf, PosInf, vec![Piece::analytic(NegInf, PosInf, "-0.5*log(abs(y)+1)").with_envelope(env)], vec![])
}

/// `psi(y) = c - (log(|y| + 3))^(1/2)`; continuous with a sub-logarithmic tail.
pub fn log_minorant(c: f64) -> DefiningFunction {
    let b = Bound::LogPower { c, k: 1.0, a: 0.5 };
    let env = Envelope { lower: Some(b), upper: Some(b), from: 0.0 };
    let mut p = Piece::analytic(NegInf, PosInf, "-(log(abs(y)+3))^0.5").with_envelope(env);
    if c != 0.0 {
        if let PieceKind::Analytic { expr, .. } = &mut p.kind {
            *expr = expr.clone().plus(c);
        }
    }
    build(NegInf, PosInf, vec![p], vec![])
}

/// Envelope used for eta pieces: `-2 - 2 L^a <= psi <= 1 - L^a / 2`, `L = log(|y| + 3)`.
pub fn eta_envelope(a: f64) -> Envelope {
    Envelope {
        lower: Some(Bound::LogPower { c: -2.0, k: 2.0, a }),
        upper: Some(Bound::LogPower { c: 1.0, k: 0.5, a }),
        from: 0.0,
    }
}

/// Image of the right half-plane under `w - (log(w + 3))^a`.
pub fn eta_domain(a: f64) -> DefiningFunction {
    let p = Piece::new(NegInf, PosInf, PieceKind::EtaBoundary { a }).with_envelope(eta_envelope(a));
    build(NegInf, PosInf, vec![p], vec![])
}

/// `-(1/|y|)(1 - cos(1/y))` for `y < 0`, `0` for `y >= 0`, on `(-1, 1)`.
pub fn du_oscillation() -> DefiningFunction {
    let left = oscillatory(Fin(-1.0), Fin(0.0), "-(1/abs(y))*(1-cos(1/y))").with_limits(at("-(1/abs(y))*(1-cos(1/y))", -1.0), lim(NegInf, Fin(0.0)));
    build(Fin(-1.0), Fin(1.0), vec![left, zero(Fin(0.0), Fin(1.0))], vec![])
}

/// `-1/|y|` off zero with `psi(0) = 0`, on the line.
pub fn cusp() -> DefiningFunction {
    let b = Some(Envelope { lower: Some(Bound::Affine { m: 0.0, c: -1.0 }), upper: Some(Bound::Affine { m: 0.0, c: 0.0 }), from: 1.0 });
    let mut l = Piece::analytic(NegInf, Fin(0.0), "-1/abs(y)").with_limits(None, lim(NegInf, NegInf));
    let mut r = Piece::analytic(Fin(0.0), PosInf, "-1/abs(y)").with_limits(lim(NegInf, NegInf), None);
    l.envelope = b;
    r.envelope = b;
    build(NegInf, PosInf, vec![l, r], vec![PointValue { y: 0.0, value: Fin(0.0) }])
}

/// `I = (0, inf)`, `psi = -inf` beyond 2, oscillating down to `-inf` below 2, `psi(2) = 0`.
pub fn exceptional_arc() -> DefiningFunction {
    let osc = oscillatory(Fin(0.0), Fin(2.0), "-(1/(2-y))*(1-cos(1/(2-y)))")
        .with_limits(at("-(1/(2-y))*(1-cos(1/(2-y)))", 0.0), lim(NegInf, Fin(0.0)));
    build(
        Fin(0.0),
        PosInf,
        vec![osc, Piece::new(Fin(2.0), PosInf, PieceKind::MinusInfinity)],
        vec![PointValue { y: 2.0, value: Fin(0.0) }],
    )
}

/// `sin(1/y)/y` on `(0, 1)`.
pub fn dw_simple() -> DefiningFunction {
    let p = oscillatory(Fin(0.0), Fin(1.0), "sin(1/y)/y").with_limits(lim(NegInf, PosInf), at("sin(1/y)/y", 1.0));
    build(Fin(0.0), Fin(1.0), vec![p], vec![])
}

/// Oscillation at both ends of `(0, 1)`.
pub fn dw_double() -> DefiningFunction {
    let p = oscillatory(Fin(0.0), Fin(1.0), "sin(1/(y*(1-y)))/(y*(1-y))")
        .with_limits(lim(NegInf, PosInf), lim(NegInf, PosInf));
    build(Fin(0.0), Fin(1.0), vec![p], vec![])
}

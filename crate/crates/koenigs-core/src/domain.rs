//! Defining functions `psi: I -> [-inf, inf)` built from typed pieces, the
//! domain `{x + iy : y in I, x > psi(y)}`, one-sided limits and the
//! semicontinuous regularizations.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64 as C64;
// Float supplies the libm-backed methods when std is absent.
#[allow(unused_imports)]
use num_traits::Float;

use crate::cantor::{CantorError, CantorSet, Location, SideShape};
use crate::eta;
use crate::expr::{EvalError, Expr};
use crate::ext::{Certainty, Ext, Side, Tri};

/// Declared `liminf`/`limsup` at one end of a piece, approached from inside.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeclaredLimits {
    pub liminf: Ext,
    pub limsup: Ext,
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct EndpointDecl {
    pub lo: Option<DeclaredLimits>,
    pub hi: Option<DeclaredLimits>,
}

/// A comparison function for tail envelopes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    /// `m*y + c`
    Affine { m: f64, c: f64 },
    /// `c - k*(log(|y| + 3))^a`
    LogPower { c: f64, k: f64, a: f64 },
}

impl Bound {
    pub fn eval(&self, y: f64) -> f64 {
        match *self {
            Bound::Affine { m, c } => m * y + c,
            Bound::LogPower { c, k, a } => c - k * (y.abs() + 3.0).ln().powf(a),
        }
    }

    /// True when the bound tends to `-inf` on the tail.
    pub fn diverges_down(&self, dir: f64) -> bool {
        match *self {
            Bound::Affine { m, .. } => m * dir < 0.0,
            Bound::LogPower { k, a, .. } => k > 0.0 && a > 0.0,
        }
    }
}

/// Tail bounds `lower <= psi <= upper`, valid on the piece where `|y| >= from`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Envelope {
    pub lower: Option<Bound>,
    pub upper: Option<Bound>,
    pub from: f64,
}

/// Values of a Cantor piece off its carrier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GapProfile {
    Constant(f64),
    /// `offset + sin(1/((b - y)(y - a)))` on each maximal gap `(a, b)`.
    SinInverseGap { offset: f64 },
}

impl GapProfile {
    fn value(&self, y: f64, a: f64, b: f64) -> f64 {
        match *self {
            GapProfile::Constant(v) => v,
            GapProfile::SinInverseGap { offset } => offset + (1.0 / ((b - y) * (y - a))).sin(),
        }
    }

    /// `(liminf, limsup)` of the profile at a gap end.
    pub fn end_range(&self) -> (f64, f64) {
        match *self {
            GapProfile::Constant(v) => (v, v),
            GapProfile::SinInverseGap { offset } => (offset - 1.0, offset + 1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PieceKind {
    /// Continuous on the open span. `oscillatory` pieces must declare their end limits.
    Analytic { expr: Expr, oscillatory: bool },
    MinusInfinity,
    PointSpike { c0: f64, value: Ext, background: Ext },
    /// `on_value` on the carrier, the gap profile elsewhere. The carrier spans the piece.
    Cantor { carrier: CantorSet, on_value: f64, gap: GapProfile },
    /// Boundary of `eta(right half-plane)` with parameter `a`.
    EtaBoundary { a: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub lo: Ext,
    pub hi: Ext,
    pub kind: PieceKind,
    pub limits: EndpointDecl,
    pub envelope: Option<Envelope>,
}

impl Piece {
    pub fn new(lo: Ext, hi: Ext, kind: PieceKind) -> Piece {
        Piece { lo, hi, kind, limits: EndpointDecl::default(), envelope: None }
    }

    pub fn analytic(lo: Ext, hi: Ext, src: &str) -> Piece {
        let expr = Expr::parse(src).expect("valid expression");
        Piece::new(lo, hi, PieceKind::Analytic { expr, oscillatory: false })
    }

    pub fn with_limits(mut self, lo: Option<DeclaredLimits>, hi: Option<DeclaredLimits>) -> Piece {
        self.limits = EndpointDecl { lo, hi };
        self
    }

    pub fn with_envelope(mut self, env: Envelope) -> Piece {
        self.envelope = Some(env);
        self
    }

    fn contains_open(&self, y: f64) -> bool {
        Ext::Fin(y) > self.lo && Ext::Fin(y) < self.hi
    }
}

/// Explicit value at a piece boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointValue {
    pub y: f64,
    pub value: Ext,
}

/// Unvalidated description of `psi`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseFunction {
    pub lo: Ext,
    pub hi: Ext,
    pub pieces: Vec<Piece>,
    pub points: Vec<PointValue>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SideLimits {
    pub liminf: Ext,
    pub limsup: Ext,
    pub certainty: Certainty,
}

impl SideLimits {
    fn exact(lo: Ext, hi: Ext) -> SideLimits {
        SideLimits { liminf: lo, limsup: hi, certainty: Certainty::Exact }
    }

    fn point(v: Ext, c: Certainty) -> SideLimits {
        SideLimits { liminf: v, limsup: v, certainty: c }
    }

    fn inconclusive() -> SideLimits {
        SideLimits { liminf: Ext::NegInf, limsup: Ext::PosInf, certainty: Certainty::Inconclusive }
    }

    pub fn is_conclusive(&self) -> bool {
        self.certainty != Certainty::Inconclusive
    }
}

/// One-sided limits; a side is `None` when it leaves `I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OneSidedLimits {
    pub left: Option<SideLimits>,
    pub right: Option<SideLimits>,
}

impl OneSidedLimits {
    pub fn side(&self, s: Side) -> Option<SideLimits> {
        match s {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    pub fn certainty(&self) -> Certainty {
        let a = self.left.map_or(Certainty::Exact, |l| l.certainty);
        let b = self.right.map_or(Certainty::Exact, |l| l.certainty);
        a.worst(b)
    }

    /// Minimum of the present liminfs.
    pub fn liminf(&self) -> Ext {
        let a = self.left.map_or(Ext::PosInf, |l| l.liminf);
        let b = self.right.map_or(Ext::PosInf, |l| l.liminf);
        a.min(b)
    }

    /// Maximum of the present limsups.
    pub fn limsup(&self) -> Ext {
        let a = self.left.map_or(Ext::NegInf, |l| l.limsup);
        let b = self.right.map_or(Ext::NegInf, |l| l.limsup);
        a.max(b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DomainError {
    EmptyInterval,
    NoPieces,
    /// Pieces do not tile `I`; `index` is the first offending piece.
    Tiling { index: usize },
    WholePlane,
    BadLimits { index: usize },
    MissingLimits { index: usize },
    Evaluator { index: usize, y: f64, error: EvalError },
    SpikeOutsideSpan { index: usize },
    CantorSpan { index: usize },
    Cantor { index: usize, error: CantorError },
    BadValue { index: usize },
    BadEtaParameter { index: usize },
    EnvelopeViolation { index: usize, y: f64 },
    StrayPoint { y: f64 },
    MissingPointValue { y: f64 },
    UscViolation { y: f64 },
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DomainError::*;
        match self {
            EmptyInterval => f.write_str("interval is empty"),
            NoPieces => f.write_str("no pieces given"),
            Tiling { index } => write!(f, "piece {} does not continue the previous span", index),
            WholePlane => f.write_str("psi is -inf on the whole line; the domain would be the plane"),
            BadLimits { index } => write!(f, "piece {}: declared liminf exceeds limsup", index),
            MissingLimits { index } => write!(f, "piece {}: oscillatory pieces must declare limits at finite ends", index),
            Evaluator { index, y, error } => write!(f, "piece {}: evaluator failed at y = {}: {}", index, y, error),
            SpikeOutsideSpan { index } => write!(f, "piece {}: spike location must lie inside the span", index),
            CantorSpan { index } => write!(f, "piece {}: a Cantor piece needs a bounded span", index),
            Cantor { index, error } => write!(f, "piece {}: {}", index, error),
            BadValue { index } => write!(f, "piece {}: values must be finite (background may be -inf)", index),
            BadEtaParameter { index } => write!(f, "piece {}: eta parameter must lie in (0, 1]", index),
            EnvelopeViolation { index, y } => write!(f, "piece {}: declared envelope fails at y = {}", index, y),
            StrayPoint { y } => write!(f, "point value at {} is not a piece boundary", y),
            MissingPointValue { y } => write!(f, "value at boundary {} is needed: side limits are not conclusive", y),
            UscViolation { y } => write!(f, "psi is not upper semicontinuous at {}", y),
        }
    }
}

/// Failure of a pointwise query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QueryError {
    OutsideInterval,
    Eval(EvalError),
    /// Exact Cantor membership hit its depth limit.
    Undetermined,
}

impl fmt::Display for QueryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryError::OutsideInterval => f.write_str("point lies outside the closure of I"),
            QueryError::Eval(e) => write!(f, "evaluator error: {}", e),
            QueryError::Undetermined => f.write_str("Cantor membership undetermined at the depth limit"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Breakpoint {
    pub y: f64,
    pub value: Ext,
    pub certainty: Certainty,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UscReport {
    pub status: Tri,
    pub witness: Option<f64>,
    pub inconclusive_at: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityReport {
    pub equal: Tri,
    /// Points with `psi > psi~`.
    pub witnesses: Vec<f64>,
    pub uncertain_at: Vec<f64>,
}

/// Closed intervals (ends in `closure(I)`) where `liminf psi = -inf`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiminfSet {
    pub intervals: Vec<(Ext, Ext)>,
    pub unknown_at: Vec<f64>,
}

/// A validated defining function.
#[derive(Clone, Debug, PartialEq)]
pub struct DefiningFunction {
    lo: Ext,
    hi: Ext,
    pieces: Vec<Piece>,
    breaks: Vec<Breakpoint>,
    warnings: Vec<String>,
}

const DYADIC_DEPTH: i32 = 40;
const DYADIC_WINDOW: usize = 8;
const DYADIC_TOL: f64 = 1e-9;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Interior sample points of an open span.
fn span_samples(lo: Ext, hi: Ext) -> Vec<f64> {
    let mut out = Vec::new();
    match (lo, hi) {
        (Ext::Fin(a), Ext::Fin(b)) => {
            let n = 257;
            for k in 1..=n {
                out.push(a + (b - a) * k as f64 / (n + 1) as f64);
            }
            for j in 4..DYADIC_DEPTH {
                let h = (b - a) * 2f64.powi(-j);
                out.push(a + h);
                out.push(b - h);
            }
        }
        (Ext::Fin(a), _) => {
            for k in -40..=40 {
                out.push(a + 10f64.powf(k as f64 / 5.0));
            }
        }
        (_, Ext::Fin(b)) => {
            for k in -40..=40 {
                out.push(b - 10f64.powf(k as f64 / 5.0));
            }
        }
        _ => {
            out.push(0.0);
            for k in -40..=40 {
                let v = 10f64.powf(k as f64 / 5.0);
                out.push(v);
                out.push(-v);
            }
        }
    }
    out.retain(|&y| Ext::Fin(y) > lo && Ext::Fin(y) < hi);
    out
}

impl DefiningFunction {
    pub fn new(f: PiecewiseFunction) -> Result<DefiningFunction, DomainError> {
        let PiecewiseFunction { lo, hi, pieces, points } = f;
        if !(lo < hi) || lo == Ext::PosInf || hi == Ext::NegInf {
            return Err(DomainError::EmptyInterval);
        }
        if pieces.is_empty() {
            return Err(DomainError::NoPieces);
        }
        let mut prev = lo;
        for (i, p) in pieces.iter().enumerate() {
            if p.lo != prev || !(p.lo < p.hi) {
                return Err(DomainError::Tiling { index: i });
            }
            if i > 0 && !p.lo.is_finite() {
                return Err(DomainError::Tiling { index: i });
            }
            prev = p.hi;
        }
        if prev != hi {
            return Err(DomainError::Tiling { index: pieces.len() - 1 });
        }
        for (i, p) in pieces.iter().enumerate() {
            Self::check_piece(i, p)?;
        }
        let mut df = DefiningFunction { lo, hi, pieces, breaks: Vec::new(), warnings: Vec::new() };
        for pv in &points {
            if !df.pieces.iter().skip(1).any(|p| p.lo == Ext::Fin(pv.y)) {
                return Err(DomainError::StrayPoint { y: pv.y });
            }
        }
        for i in 1..df.pieces.len() {
            let y = df.pieces[i].lo.finite().expect("interior boundary is finite");
            let lim = df.limits_raw(y);
            let (value, certainty) = match points.iter().find(|p| p.y == y) {
                Some(p) => (p.value, Certainty::Exact),
                None => {
                    if lim.certainty() == Certainty::Inconclusive {
                        return Err(DomainError::MissingPointValue { y });
                    }
                    (lim.limsup(), lim.certainty())
                }
            };
            df.breaks.push(Breakpoint { y, value, certainty });
        }
        if df.is_identically_neg_inf() && lo == Ext::NegInf && hi == Ext::PosInf {
            return Err(DomainError::WholePlane);
        }
        for (i, p) in df.pieces.iter().enumerate() {
            if let Some(env) = &p.envelope {
                df.check_envelope(i, p, env)?;
            }
        }
        let usc = df.usc_check();
        match usc.status {
            Tri::No => return Err(DomainError::UscViolation { y: usc.witness.unwrap_or(f64::NAN) }),
            Tri::Unknown => {
                for y in usc.inconclusive_at {
                    df.warnings.push(alloc::format!("upper semicontinuity not certified at y = {}", y));
                }
            }
            Tri::Yes => {}
        }
        Ok(df)
    }

    fn check_piece(i: usize, p: &Piece) -> Result<(), DomainError> {
        for d in [p.limits.lo, p.limits.hi].iter().flatten() {
            if d.liminf > d.limsup || d.liminf == Ext::PosInf || d.limsup == Ext::NegInf && d.liminf != Ext::NegInf {
                return Err(DomainError::BadLimits { index: i });
            }
        }
        match &p.kind {
            PieceKind::Analytic { expr, oscillatory } => {
                if *oscillatory
                    && ((p.lo.is_finite() && p.limits.lo.is_none()) || (p.hi.is_finite() && p.limits.hi.is_none()))
                {
                    return Err(DomainError::MissingLimits { index: i });
                }
                for y in span_samples(p.lo, p.hi) {
                    if let Err(error) = expr.eval(y) {
                        return Err(DomainError::Evaluator { index: i, y, error });
                    }
                }
            }
            PieceKind::MinusInfinity => {}
            PieceKind::PointSpike { c0, value, background } => {
                if !p.contains_open(*c0) {
                    return Err(DomainError::SpikeOutsideSpan { index: i });
                }
                if *value == Ext::PosInf || *background == Ext::PosInf {
                    return Err(DomainError::BadValue { index: i });
                }
            }
            PieceKind::Cantor { carrier, on_value, gap } => {
                if p.lo != Ext::Fin(carrier.lo()) || p.hi != Ext::Fin(carrier.hi()) {
                    return Err(DomainError::CantorSpan { index: i });
                }
                let gap_ok = match gap {
                    GapProfile::Constant(v) => v.is_finite(),
                    GapProfile::SinInverseGap { offset } => offset.is_finite(),
                };
                if !on_value.is_finite() || !gap_ok {
                    return Err(DomainError::BadValue { index: i });
                }
            }
            PieceKind::EtaBoundary { a } => {
                if !(*a > 0.0 && *a <= 1.0) {
                    return Err(DomainError::BadEtaParameter { index: i });
                }
            }
        }
        Ok(())
    }

    fn check_envelope(&self, i: usize, p: &Piece, env: &Envelope) -> Result<(), DomainError> {
        let mut ys = span_samples(p.lo, p.hi);
        for k in 0..=64 {
            let v = env.from.max(1.0) * 10f64.powf(k as f64 / 8.0);
            ys.push(v);
            ys.push(-v);
        }
        for y in ys {
            if !p.contains_open(y) || y.abs() < env.from {
                continue;
            }
            let v = match self.piece_value(p, y, true) {
                Ok(Ext::Fin(v)) => v,
                Ok(Ext::NegInf) => {
                    if env.lower.is_some() {
                        return Err(DomainError::EnvelopeViolation { index: i, y });
                    }
                    continue;
                }
                _ => continue,
            };
            let tol = 1e-9 * v.abs().max(1.0);
            if env.lower.is_some_and(|b| v < b.eval(y) - tol) || env.upper.is_some_and(|b| v > b.eval(y) + tol) {
                return Err(DomainError::EnvelopeViolation { index: i, y });
            }
        }
        Ok(())
    }

    /// Builds without validation; used for regularizations.
    fn from_parts(lo: Ext, hi: Ext, pieces: Vec<Piece>, breaks: Vec<Breakpoint>) -> DefiningFunction {
        DefiningFunction { lo, hi, pieces, breaks, warnings: Vec::new() }
    }

    pub fn lo(&self) -> Ext {
        self.lo
    }

    pub fn hi(&self) -> Ext {
        self.hi
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breaks
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn in_interval(&self, y: f64) -> bool {
        Ext::Fin(y) > self.lo && Ext::Fin(y) < self.hi
    }

    pub fn in_closure(&self, y: f64) -> bool {
        y.is_finite() && Ext::Fin(y) >= self.lo && Ext::Fin(y) <= self.hi
    }

    fn is_identically_neg_inf(&self) -> bool {
        self.pieces.iter().all(|p| match &p.kind {
            PieceKind::MinusInfinity => true,
            PieceKind::PointSpike { value, background, .. } => value.is_neg_inf() && background.is_neg_inf(),
            _ => false,
        }) && self.breaks.iter().all(|b| b.value.is_neg_inf())
    }

    fn break_at(&self, y: f64) -> Option<&Breakpoint> {
        self.breaks.iter().find(|b| b.y == y)
    }

    /// Index of the piece whose open span contains `y`, or `None` at a boundary.
    fn piece_index(&self, y: f64) -> Option<usize> {
        let yy = Ext::Fin(y);
        let i = self.pieces.partition_point(|p| p.hi <= yy);
        if i < self.pieces.len() && self.pieces[i].contains_open(y) {
            Some(i)
        } else {
            None
        }
    }

    fn piece_value(&self, p: &Piece, y: f64, exact: bool) -> Result<Ext, QueryError> {
        match &p.kind {
            PieceKind::Analytic { expr, .. } => expr.eval(y).map(Ext::Fin).map_err(QueryError::Eval),
            PieceKind::MinusInfinity => Ok(Ext::NegInf),
            PieceKind::PointSpike { c0, value, background } => Ok(if y == *c0 { *value } else { *background }),
            PieceKind::Cantor { carrier, on_value, gap } => {
                let loc = if exact { carrier.locate(y) } else { carrier.locate_fast(y) };
                match loc {
                    Location::Carrier { .. } => Ok(Ext::Fin(*on_value)),
                    Location::Gap { a, b } => Ok(Ext::Fin(gap.value(y, a, b))),
                    Location::Outside => Err(QueryError::OutsideInterval),
                    Location::Undetermined => Err(QueryError::Undetermined),
                }
            }
            PieceKind::EtaBoundary { a } => Ok(Ext::Fin(eta::psi(*a, y))),
        }
    }

    /// `psi(y)` for `y` in `I`, with exact Cantor membership.
    pub fn value(&self, y: f64) -> Result<Ext, QueryError> {
        self.value_with(y, true)
    }

    /// `psi(y)` with the floating-point Cantor path; meant for dense sampling.
    pub fn sample(&self, y: f64) -> Result<Ext, QueryError> {
        self.value_with(y, false)
    }

    fn value_with(&self, y: f64, exact: bool) -> Result<Ext, QueryError> {
        if !self.in_interval(y) {
            return Err(QueryError::OutsideInterval);
        }
        match self.piece_index(y) {
            Some(i) => self.piece_value(&self.pieces[i], y, exact),
            None => self.break_at(y).map(|b| b.value).ok_or(QueryError::OutsideInterval),
        }
    }

    /// Membership of `z` in the domain.
    pub fn contains(&self, z: C64) -> Result<bool, QueryError> {
        if !self.in_interval(z.im) {
            return Ok(false);
        }
        Ok(Ext::Fin(z.re) > self.value(z.im)?)
    }

    pub fn one_sided_limits(&self, y0: f64) -> Result<OneSidedLimits, QueryError> {
        if !self.in_closure(y0) {
            return Err(QueryError::OutsideInterval);
        }
        Ok(self.limits_raw(y0))
    }

    fn limits_raw(&self, y0: f64) -> OneSidedLimits {
        let side = |s: Side| -> Option<SideLimits> {
            let yy = Ext::Fin(y0);
            let idx = match self.piece_index(y0) {
                Some(i) => i,
                None => match s {
                    Side::Left => {
                        if yy == self.lo {
                            return None;
                        }
                        self.pieces.iter().position(|p| p.hi == yy)?
                    }
                    Side::Right => {
                        if yy == self.hi {
                            return None;
                        }
                        self.pieces.iter().position(|p| p.lo == yy)?
                    }
                },
            };
            Some(self.piece_side_limits(&self.pieces[idx], y0, s))
        };
        OneSidedLimits { left: side(Side::Left), right: side(Side::Right) }
    }

    fn piece_side_limits(&self, p: &Piece, y0: f64, s: Side) -> SideLimits {
        let at_end = match s {
            Side::Left => p.hi == Ext::Fin(y0),
            Side::Right => p.lo == Ext::Fin(y0),
        };
        match &p.kind {
            PieceKind::Analytic { expr, .. } => {
                if at_end {
                    let decl = match s {
                        Side::Left => p.limits.hi,
                        Side::Right => p.limits.lo,
                    };
                    if let Some(d) = decl {
                        return SideLimits::exact(d.liminf, d.limsup);
                    }
                }
                match expr.eval_certified(y0) {
                    Ok(c) if c.continuous || !at_end => SideLimits::point(Ext::Fin(c.value), Certainty::Exact),
                    _ => self.dyadic_estimate(p, y0, s),
                }
            }
            PieceKind::MinusInfinity => SideLimits::point(Ext::NegInf, Certainty::Exact),
            PieceKind::PointSpike { background, .. } => SideLimits::point(*background, Certainty::Exact),
            PieceKind::Cantor { carrier, on_value, gap } => {
                let (glo, ghi) = gap.end_range();
                let near = SideLimits::exact(Ext::Fin(on_value.min(glo)), Ext::Fin(on_value.max(ghi)));
                match carrier.locate(y0) {
                    Location::Carrier { left, right } => {
                        let shape = if s == Side::Left { left } else { right };
                        match shape {
                            SideShape::Accumulates => near,
                            SideShape::Gap { .. } => SideLimits::exact(Ext::Fin(glo), Ext::Fin(ghi)),
                            SideShape::Outside => SideLimits::inconclusive(),
                        }
                    }
                    Location::Gap { a, b } => SideLimits::point(Ext::Fin(gap.value(y0, a, b)), Certainty::Exact),
                    Location::Outside | Location::Undetermined => SideLimits::inconclusive(),
                }
            }
            PieceKind::EtaBoundary { a } => SideLimits::point(Ext::Fin(eta::psi(*a, y0)), Certainty::Exact),
        }
    }

    /// Samples `y0 + s*2^-k*delta` for `k <= 40` and looks for a plateau or
    /// a steady monotone divergence over the last eight values.
    fn dyadic_estimate(&self, p: &Piece, y0: f64, s: Side) -> SideLimits {
        let far = match s {
            Side::Left => p.lo,
            Side::Right => p.hi,
        };
        let delta = match far {
            Ext::Fin(f) => ((f - y0).abs() / 2.0).min(1.0),
            _ => 1.0,
        };
        let mut vals = Vec::new();
        for k in 0..=DYADIC_DEPTH {
            let y = y0 + s.sign() * delta * 2f64.powi(-k);
            match self.piece_value(p, y, false) {
                Ok(Ext::Fin(v)) => vals.push(v),
                _ => vals.clear(),
            }
        }
        if vals.len() < DYADIC_WINDOW {
            return SideLimits::inconclusive();
        }
        let tail = &vals[vals.len() - DYADIC_WINDOW..];
        let last = tail[DYADIC_WINDOW - 1];
        if tail.iter().all(|&v| rel_close(v, last, DYADIC_TOL)) {
            return SideLimits::point(Ext::Fin(last), Certainty::Estimated);
        }
        let d: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
        let up = d.iter().all(|&x| x > 0.0);
        let down = d.iter().all(|&x| x < 0.0);
        let steady = d.windows(2).all(|w| w[1].abs() >= 0.9 * w[0].abs());
        if steady && (up || down) {
            let v = if up { Ext::PosInf } else { Ext::NegInf };
            return SideLimits::point(v, Certainty::Estimated);
        }
        SideLimits::inconclusive()
    }

    pub fn usc_check(&self) -> UscReport {
        let mut rep = UscReport { status: Tri::Yes, witness: None, inconclusive_at: Vec::new() };
        for b in &self.breaks {
            let lim = self.limits_raw(b.y);
            if lim.certainty() == Certainty::Inconclusive {
                rep.inconclusive_at.push(b.y);
                continue;
            }
            let ls = lim.limsup();
            let bad = match (b.value, ls) {
                (Ext::Fin(v), Ext::Fin(l)) => v < l && !rel_close(v, l, DYADIC_TOL),
                (v, l) => v < l,
            };
            if bad {
                rep.status = Tri::No;
                rep.witness = Some(b.y);
                return rep;
            }
        }
        for p in &self.pieces {
            match &p.kind {
                PieceKind::PointSpike { c0, value, background } if value < background => {
                    rep.status = Tri::No;
                    rep.witness = Some(*c0);
                    return rep;
                }
                PieceKind::Cantor { carrier, on_value, gap } if *on_value < gap.end_range().1 => {
                    rep.status = Tri::No;
                    rep.witness = Some(carrier.interior_point());
                    return rep;
                }
                _ => {}
            }
        }
        if !rep.inconclusive_at.is_empty() {
            rep.status = Tri::Unknown;
        }
        rep
    }

    /// `psi_*`, the lower semicontinuous regularization.
    pub fn lsc_regularization(&self) -> DefiningFunction {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let mut q = p.clone();
                match &mut q.kind {
                    PieceKind::PointSpike { value, background, .. } => *value = value.min(*background),
                    PieceKind::Cantor { on_value, gap, .. } => *on_value = on_value.min(gap.end_range().0),
                    _ => {}
                }
                q
            })
            .collect();
        let breaks = self
            .breaks
            .iter()
            .map(|b| {
                let lim = self.limits_raw(b.y);
                Breakpoint { y: b.y, value: b.value.min(lim.liminf()), certainty: b.certainty.worst(lim.certainty()) }
            })
            .collect();
        DefiningFunction::from_parts(self.lo, self.hi, pieces, breaks)
    }

    /// The upper semicontinuous regularization of `self`.
    pub fn usc_regularization(&self) -> DefiningFunction {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let mut q = p.clone();
                match &mut q.kind {
                    PieceKind::PointSpike { value, background, .. } => *value = value.max(*background),
                    PieceKind::Cantor { on_value, gap, .. } => *on_value = on_value.max(gap.end_range().1),
                    _ => {}
                }
                q
            })
            .collect();
        let breaks = self
            .breaks
            .iter()
            .map(|b| {
                let lim = self.limits_raw(b.y);
                Breakpoint { y: b.y, value: b.value.max(lim.limsup()), certainty: b.certainty.worst(lim.certainty()) }
            })
            .collect();
        DefiningFunction::from_parts(self.lo, self.hi, pieces, breaks)
    }

    /// `psi~`, the usc regularization of `psi_*`.
    pub fn regularized(&self) -> DefiningFunction {
        self.lsc_regularization().usc_regularization()
    }

    /// Compares `psi` with `psi~` piece by piece.
    pub fn equals_regularized(&self) -> RegularityReport {
        let r = self.regularized();
        let mut rep = RegularityReport { equal: Tri::Yes, witnesses: Vec::new(), uncertain_at: Vec::new() };
        for (p, q) in self.pieces.iter().zip(r.pieces.iter()) {
            match (&p.kind, &q.kind) {
                (PieceKind::PointSpike { c0, value, .. }, PieceKind::PointSpike { value: v2, .. }) if value > v2 => {
                    rep.witnesses.push(*c0);
                }
                (PieceKind::Cantor { carrier, on_value, .. }, PieceKind::Cantor { on_value: o2, .. })
                    if on_value > o2 =>
                {
                    rep.witnesses.push(carrier.interior_point());
                }
                _ => {}
            }
        }
        for (b, c) in self.breaks.iter().zip(r.breaks.iter()) {
            if c.certainty == Certainty::Inconclusive {
                rep.uncertain_at.push(b.y);
                continue;
            }
            let differs = match (b.value, c.value) {
                (Ext::Fin(u), Ext::Fin(v)) => u > v && !rel_close(u, v, DYADIC_TOL),
                (u, v) => u > v,
            };
            if differs {
                rep.witnesses.push(b.y);
            }
        }
        rep.witnesses.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        rep.equal = if !rep.witnesses.is_empty() {
            Tri::No
        } else if !rep.uncertain_at.is_empty() {
            Tri::Unknown
        } else {
            Tri::Yes
        };
        rep
    }

    /// Maximal open intervals on which `psi = -inf`.
    pub fn minus_infinity_components(&self) -> Vec<(Ext, Ext)> {
        let mut raw: Vec<(Ext, Ext)> = Vec::new();
        for p in &self.pieces {
            match &p.kind {
                PieceKind::MinusInfinity => raw.push((p.lo, p.hi)),
                PieceKind::PointSpike { c0, value, background } if background.is_neg_inf() => {
                    if value.is_neg_inf() {
                        raw.push((p.lo, p.hi));
                    } else {
                        raw.push((p.lo, Ext::Fin(*c0)));
                        raw.push((Ext::Fin(*c0), p.hi));
                    }
                }
                _ => {}
            }
        }
        let mut out: Vec<(Ext, Ext)> = Vec::new();
        for (a, b) in raw {
            if let Some(last) = out.last_mut() {
                if last.1 == a {
                    if let Ext::Fin(y) = a {
                        if self.break_at(y).is_some_and(|bp| bp.value.is_neg_inf()) {
                            last.1 = b;
                            continue;
                        }
                    }
                }
            }
            out.push((a, b));
        }
        out
    }

    /// Points of `closure(I)` where `liminf psi = -inf`, as closed intervals.
    pub fn liminf_neg_inf_set(&self) -> LiminfSet {
        let mut iv: Vec<(Ext, Ext)> = self.minus_infinity_components();
        let mut unknown = Vec::new();
        let mut cands: Vec<f64> = self.breaks.iter().map(|b| b.y).collect();
        if let Ext::Fin(a) = self.lo {
            cands.push(a);
        }
        if let Ext::Fin(b) = self.hi {
            cands.push(b);
        }
        for y in cands {
            let lim = self.limits_raw(y);
            let li = lim.liminf();
            let at_break = self.break_at(y).map_or(Ext::PosInf, |b| b.value);
            if li.is_neg_inf() || at_break.is_neg_inf() {
                iv.push((Ext::Fin(y), Ext::Fin(y)));
            } else if lim.certainty() == Certainty::Inconclusive {
                unknown.push(y);
            }
        }
        iv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
        let mut merged: Vec<(Ext, Ext)> = Vec::new();
        for (a, b) in iv {
            // Closed intervals: clamp to closure(I) (open components become closed).
            let (a, b) = (a.max(self.lo), b.min(self.hi));
            if let Some(last) = merged.last_mut() {
                if a <= last.1 {
                    last.1 = last.1.max(b);
                    continue;
                }
            }
            merged.push((a, b));
        }
        LiminfSet { intervals: merged, unknown_at: unknown }
    }

    /// Largest value of `psi` forced by declared structure on `[a, b]` (boundary
    /// values, spike tops, carrier values). `-inf` when nothing applies.
    pub fn structural_sup(&self, a: f64, b: f64) -> Ext {
        let mut s = Ext::NegInf;
        for bp in &self.breaks {
            if bp.y >= a && bp.y <= b {
                s = s.max(bp.value);
            }
        }
        for p in &self.pieces {
            match &p.kind {
                PieceKind::PointSpike { c0, value, .. } if *c0 >= a && *c0 <= b => s = s.max(*value),
                PieceKind::Cantor { carrier, on_value, .. } => {
                    // Span ends are boundaries or ends of I and carry their own values.
                    let (u, v) = (a.max(carrier.lo()), b.min(carrier.hi()));
                    let hit = if u < v {
                        carrier.meets(u, v)
                    } else {
                        u == v && u > carrier.lo() && u < carrier.hi() && carrier.contains(u) != Some(false)
                    };
                    if hit {
                        s = s.max(Ext::Fin(*on_value));
                    }
                }
                _ => {}
            }
        }
        s
    }

    /// `psi + c`.
    pub fn plus_const(&self, c: f64) -> DefiningFunction {
        let bump_decl = |d: Option<DeclaredLimits>| d.map(|d| DeclaredLimits { liminf: d.liminf.add(c), limsup: d.limsup.add(c) });
        let bump_bound = |b: Option<Bound>| {
            b.map(|b| match b {
                Bound::Affine { m, c: k } => Bound::Affine { m, c: k + c },
                Bound::LogPower { c: k, k: kk, a } => Bound::LogPower { c: k + c, k: kk, a },
            })
        };
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let kind = match &p.kind {
                    PieceKind::Analytic { expr, oscillatory } => {
                        PieceKind::Analytic { expr: expr.clone().plus(c), oscillatory: *oscillatory }
                    }
                    PieceKind::MinusInfinity => PieceKind::MinusInfinity,
                    PieceKind::PointSpike { c0, value, background } => {
                        PieceKind::PointSpike { c0: *c0, value: value.add(c), background: background.add(c) }
                    }
                    PieceKind::Cantor { carrier, on_value, gap } => PieceKind::Cantor {
                        carrier: carrier.clone(),
                        on_value: on_value + c,
                        gap: match gap {
                            GapProfile::Constant(v) => GapProfile::Constant(v + c),
                            GapProfile::SinInverseGap { offset } => GapProfile::SinInverseGap { offset: offset + c },
                        },
                    },
                    PieceKind::EtaBoundary { a } => PieceKind::EtaBoundary { a: *a },
                };
                Piece {
                    lo: p.lo,
                    hi: p.hi,
                    kind,
                    limits: EndpointDecl { lo: bump_decl(p.limits.lo), hi: bump_decl(p.limits.hi) },
                    envelope: p.envelope.map(|e| Envelope { lower: bump_bound(e.lower), upper: bump_bound(e.upper), from: e.from }),
                }
            })
            .collect();
        let breaks = self.breaks.iter().map(|b| Breakpoint { value: b.value.add(c), ..*b }).collect();
        let mut out = DefiningFunction::from_parts(self.lo, self.hi, pieces, breaks);
        out.warnings = self.warnings.clone();
        out
    }

    /// `y -> psi(y - d)` on `I + d`. Eta pieces do not translate and make
    /// this return `None`.
    pub fn shift_vertical(&self, d: f64) -> Option<DefiningFunction> {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let kind = match &p.kind {
                PieceKind::Analytic { expr, oscillatory } => {
                    PieceKind::Analytic { expr: expr.shift_var(d), oscillatory: *oscillatory }
                }
                PieceKind::MinusInfinity => PieceKind::MinusInfinity,
                PieceKind::PointSpike { c0, value, background } => {
                    PieceKind::PointSpike { c0: c0 + d, value: *value, background: *background }
                }
                PieceKind::Cantor { carrier, on_value, gap } => {
                    PieceKind::Cantor { carrier: carrier.shifted(d), on_value: *on_value, gap: *gap }
                }
                PieceKind::EtaBoundary { .. } => return None,
            };
            let envelope = match p.envelope {
                None => None,
                Some(e) => Some(shift_envelope(e, d)?),
            };
            pieces.push(Piece { lo: p.lo.add(d), hi: p.hi.add(d), kind, limits: p.limits, envelope });
        }
        let breaks = self.breaks.iter().map(|b| Breakpoint { y: b.y + d, ..*b }).collect();
        Some(DefiningFunction::from_parts(self.lo.add(d), self.hi.add(d), pieces, breaks))
    }
}

fn shift_envelope(e: Envelope, d: f64) -> Option<Envelope> {
    // log(|y - d| + 3) differs from log(|y| + 3) by at most log(1 + |d|/3) = delta,
    // and (L + delta)^a <= L^a + delta^a for a <= 1.
    let delta = (1.0 + d.abs() / 3.0).ln();
    let lower = match e.lower {
        None => None,
        Some(Bound::Affine { m, c }) => Some(Bound::Affine { m, c: c - m * d }),
        Some(Bound::LogPower { c, k, a }) if a <= 1.0 => Some(Bound::LogPower { c: c - k * delta.powf(a), k, a }),
        Some(_) => return None,
    };
    let upper = match e.upper {
        None => None,
        Some(Bound::Affine { m, c }) => Some(Bound::Affine { m, c: c - m * d }),
        Some(Bound::LogPower { c, k, a }) if a <= 1.0 => Some(Bound::LogPower { c: c + k * delta.powf(a), k, a }),
        Some(_) => return None,
    };
    Some(Envelope { lower, upper, from: e.from + d.abs() })
}

impl core::error::Error for DomainError {}

impl core::error::Error for QueryError {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use alloc::vec;

    fn fin(v: f64) -> Ext {
        Ext::Fin(v)
    }

    #[test]
    fn membership() {
        let h = catalog::half_plane();
        assert_eq!(h.contains(C64::new(1.0, 0.0)), Ok(true));
        assert_eq!(h.contains(C64::new(-1.0, 0.0)), Ok(false));
        // 1/4 = 0.0202... in base 3 lies on the carrier, where psi = 1 > 0.5.
        let c = catalog::comb_line();
        assert_eq!(c.contains(C64::new(0.5, 0.25)), Ok(false));
        assert_eq!(c.contains(C64::new(0.5, 0.5)), Ok(true));
        let s = catalog::strip();
        assert_eq!(s.contains(C64::new(1.0, 2.0)), Ok(false));
    }

    #[test]
    fn limits_of_constant_are_exact() {
        let l = catalog::strip().one_sided_limits(0.0).unwrap();
        for s in [l.left.unwrap(), l.right.unwrap()] {
            assert_eq!((s.liminf, s.limsup, s.certainty), (fin(0.0), fin(0.0), Certainty::Exact));
        }
        let e = catalog::strip().one_sided_limits(-core::f64::consts::FRAC_PI_2).unwrap();
        assert!(e.left.is_none() && e.right.is_some());
    }

    #[test]
    fn sine_gap_end_sweeps_full_range() {
        let c = PieceKind::Cantor { carrier: CantorSet::ternary(0.0, 3.0), on_value: 1.0, gap: GapProfile::SinInverseGap { offset: 0.0 } };
        let f = PiecewiseFunction { lo: fin(0.0), hi: fin(3.0), pieces: vec![Piece::new(fin(0.0), fin(3.0), c)], points: vec![] };
        let d = DefiningFunction::new(f).unwrap();
        let l = d.one_sided_limits(2.0).unwrap();
        let left = l.left.unwrap();
        assert_eq!((left.liminf, left.limsup), (fin(-1.0), fin(1.0)));
        let right = l.right.unwrap();
        assert_eq!((right.liminf, right.limsup), (fin(-1.0), fin(1.0)));
    }

    #[test]
    fn log_blow_up_is_estimated() {
        let f = PiecewiseFunction {
            lo: fin(0.0),
            hi: fin(1.0),
            pieces: vec![Piece::analytic(fin(0.0), fin(1.0), "-log(y)")],
            points: vec![],
        };
        let d = DefiningFunction::new(f).unwrap();
        let r = d.one_sided_limits(0.0).unwrap().right.unwrap();
        assert_eq!((r.liminf, r.limsup, r.certainty), (Ext::PosInf, Ext::PosInf, Certainty::Estimated));
    }

    #[test]
    fn usc_violation_is_rejected() {
        let f = PiecewiseFunction {
            lo: fin(-1.0),
            hi: fin(1.0),
            pieces: vec![Piece::analytic(fin(-1.0), fin(0.0), "1+y"), Piece::analytic(fin(0.0), fin(1.0), "1-y")],
            points: vec![PointValue { y: 0.0, value: fin(0.0) }],
        };
        assert_eq!(DefiningFunction::new(f), Err(DomainError::UscViolation { y: 0.0 }));
        assert_eq!(catalog::comb().usc_check().status, Tri::Yes);
        assert_eq!(catalog::oscillation_cantor().usc_check().status, Tri::Yes);
    }

    #[test]
    fn degenerate_inputs() {
        let f = PiecewiseFunction {
            lo: Ext::NegInf,
            hi: Ext::PosInf,
            pieces: vec![Piece::new(Ext::NegInf, Ext::PosInf, PieceKind::MinusInfinity)],
            points: vec![],
        };
        assert_eq!(DefiningFunction::new(f), Err(DomainError::WholePlane));
        let g = PiecewiseFunction { lo: fin(1.0), hi: fin(1.0), pieces: vec![], points: vec![] };
        assert_eq!(DefiningFunction::new(g), Err(DomainError::EmptyInterval));
        let h = PiecewiseFunction {
            lo: fin(0.0),
            hi: fin(2.0),
            pieces: vec![Piece::analytic(fin(0.0), fin(1.0), "0"), Piece::analytic(fin(1.5), fin(2.0), "0")],
            points: vec![],
        };
        assert_eq!(DefiningFunction::new(h), Err(DomainError::Tiling { index: 1 }));
        let bad = PiecewiseFunction {
            lo: fin(-1.0),
            hi: fin(1.0),
            pieces: vec![Piece::analytic(fin(-1.0), fin(1.0), "log(y)")],
            points: vec![],
        };
        assert!(matches!(DefiningFunction::new(bad), Err(DomainError::Evaluator { index: 0, .. })));
    }

    #[test]
    fn comb_regularizations() {
        let c = catalog::comb();
        let low = c.lsc_regularization();
        let reg = c.regularized();
        assert_eq!(c.value(0.25), Ok(fin(1.0)));
        assert_eq!(low.value(0.25), Ok(fin(0.0)));
        assert_eq!(reg.value(0.25), Ok(fin(0.0)));
        assert_eq!(reg.value(0.0), Ok(fin(0.0)));
        let r = c.equals_regularized();
        assert_eq!(r.equal, Tri::No);
        assert!(!r.witnesses.is_empty());
        assert_eq!(c.value(r.witnesses[0]), Ok(fin(1.0)));
    }

    #[test]
    fn oscillation_cantor_is_regular() {
        let c = catalog::oscillation_cantor();
        assert_eq!(c.lsc_regularization().value(0.25), Ok(fin(-1.0)));
        assert_eq!(c.regularized().value(0.25), Ok(fin(1.0)));
        assert_eq!(c.equals_regularized().equal, Tri::Yes);
    }

    #[test]
    fn spike_witness() {
        let r = catalog::point_spike().equals_regularized();
        assert_eq!((r.equal, r.witnesses.clone()), (Tri::No, vec![0.0]));
        assert_eq!(catalog::strip().equals_regularized().equal, Tri::Yes);
        assert_eq!(catalog::cusp().equals_regularized().witnesses, vec![0.0]);
    }

    #[test]
    fn minus_infinity_sets() {
        assert!(catalog::strip().minus_infinity_components().is_empty());
        assert_eq!(catalog::minus_inf_gap().minus_infinity_components(), vec![(fin(0.0), fin(1.0))]);
        assert_eq!(catalog::exceptional_arc().minus_infinity_components(), vec![(fin(2.0), Ext::PosInf)]);
        assert_eq!(catalog::minus_inf_gap().liminf_neg_inf_set().intervals, vec![(fin(0.0), fin(1.0))]);
        assert_eq!(catalog::du_oscillation().liminf_neg_inf_set().intervals, vec![(fin(0.0), fin(0.0))]);
        assert_eq!(catalog::exceptional_arc().liminf_neg_inf_set().intervals, vec![(fin(2.0), Ext::PosInf)]);
        assert!(catalog::oscillation_cantor().liminf_neg_inf_set().intervals.is_empty());
    }

    #[test]
    fn interior_limits_match_values() {
        let d = catalog::du_oscillation();
        let l = d.one_sided_limits(-0.5).unwrap();
        let v = d.value(-0.5).unwrap();
        assert_eq!(l.left.unwrap().liminf, v);
        assert_eq!(l.right.unwrap().limsup, v);
    }

    #[test]
    fn structural_sup_sees_spikes_and_carriers() {
        let s = catalog::point_spike();
        assert_eq!(s.structural_sup(-0.1, 0.1), fin(1.0));
        assert_eq!(s.structural_sup(0.1, 0.2), Ext::NegInf);
        let c = catalog::comb();
        assert_eq!(c.structural_sup(0.4, 0.6), Ext::NegInf);
        assert_eq!(c.structural_sup(0.2, 0.3), fin(1.0));
    }

    #[test]
    fn translations() {
        let c = catalog::comb().plus_const(2.0);
        assert_eq!(c.value(0.25), Ok(fin(3.0)));
        let v = catalog::comb().shift_vertical(0.5).unwrap();
        assert_eq!(v.value(0.75), Ok(fin(1.0)));
        assert_eq!(v.lo(), fin(-0.5));
    }
}

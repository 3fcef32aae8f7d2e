//! Semigroup type from the interval `I`, and half-plane containment.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::domain::{Bound, DefiningFunction, PieceKind};
use crate::ext::{Certainty, Ext, Tri};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HalfPlaneSide {
    /// `I = (a, inf)`; the model set lies above `y = a`.
    Upper,
    /// `I = (-inf, b)`.
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClassKind {
    Hyperbolic { width: f64 },
    ParabolicPositiveStep { side: HalfPlaneSide },
    ParabolicZeroStep,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Container {
    Strip { a: f64, b: f64 },
    HorizontalHalfPlane { a: f64, side: HalfPlaneSide },
    /// `{x > m y + c}`.
    TiltedHalfPlane { m: f64, c: f64 },
    None,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemigroupClass {
    pub kind: ClassKind,
    pub container: Container,
}

impl ClassKind {
    pub fn name(&self) -> &'static str {
        match self {
            ClassKind::Hyperbolic { .. } => "hyperbolic",
            ClassKind::ParabolicPositiveStep { .. } => "parabolic-positive-step",
            ClassKind::ParabolicZeroStep => "parabolic-zero-step",
        }
    }
}

/// A set of slopes `{m : lo <(=) m <(=) hi}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeInterval {
    pub lo: Ext,
    pub lo_open: bool,
    pub hi: Ext,
    pub hi_open: bool,
}

impl SlopeInterval {
    pub const ALL: SlopeInterval = SlopeInterval { lo: Ext::NegInf, lo_open: true, hi: Ext::PosInf, hi_open: true };
    pub const EMPTY: SlopeInterval = SlopeInterval { lo: Ext::PosInf, lo_open: true, hi: Ext::NegInf, hi_open: true };

    fn at_most(v: f64, open: bool) -> SlopeInterval {
        SlopeInterval { hi: Ext::Fin(v), hi_open: open, ..SlopeInterval::ALL }
    }

    fn at_least(v: f64, open: bool) -> SlopeInterval {
        SlopeInterval { lo: Ext::Fin(v), lo_open: open, ..SlopeInterval::ALL }
    }

    pub fn intersect(&self, o: &SlopeInterval) -> SlopeInterval {
        let (lo, lo_open) = if self.lo > o.lo {
            (self.lo, self.lo_open)
        } else if o.lo > self.lo {
            (o.lo, o.lo_open)
        } else {
            (self.lo, self.lo_open || o.lo_open)
        };
        let (hi, hi_open) = if self.hi < o.hi {
            (self.hi, self.hi_open)
        } else if o.hi < self.hi {
            (o.hi, o.hi_open)
        } else {
            (self.hi, self.hi_open || o.hi_open)
        };
        SlopeInterval { lo, lo_open, hi, hi_open }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && (self.lo_open || self.hi_open || !self.lo.is_finite()))
    }

    pub fn contains(&self, m: f64) -> bool {
        let x = Ext::Fin(m);
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    /// A representative slope, preferring zero.
    pub fn pick(&self) -> Option<f64> {
        if self.is_empty() {
            return None;
        }
        if self.contains(0.0) {
            return Some(0.0);
        }
        match (self.lo, self.hi) {
            (Ext::Fin(a), Ext::Fin(b)) => Some(0.5 * (a + b)),
            (Ext::Fin(a), _) => Some(if self.lo_open { a + 1.0 } else { a }),
            (_, Ext::Fin(b)) => Some(if self.hi_open { b - 1.0 } else { b }),
            _ => Some(0.0),
        }
    }
}

/// Outcome of the affine-minorant search.
#[derive(Clone, Debug, PartialEq)]
pub struct MinorantAnalysis {
    pub status: Tri,
    /// `(m, c)` with `psi(y) >= m y + c` on `I`.
    pub minorant: Option<(f64, f64)>,
    /// Slopes certified to work.
    pub sufficient: SlopeInterval,
    /// Slopes not excluded.
    pub necessary: SlopeInterval,
    /// True when `sufficient` is the exact set of admissible slopes.
    pub exact: bool,
    pub reason: &'static str,
}

pub fn classify(psi: &DefiningFunction) -> SemigroupClass {
    match (psi.lo(), psi.hi()) {
        (Ext::Fin(a), Ext::Fin(b)) => {
            SemigroupClass { kind: ClassKind::Hyperbolic { width: b - a }, container: Container::Strip { a, b } }
        }
        (Ext::Fin(a), _) => SemigroupClass {
            kind: ClassKind::ParabolicPositiveStep { side: HalfPlaneSide::Upper },
            container: Container::HorizontalHalfPlane { a, side: HalfPlaneSide::Upper },
        },
        (_, Ext::Fin(b)) => SemigroupClass {
            kind: ClassKind::ParabolicPositiveStep { side: HalfPlaneSide::Lower },
            container: Container::HorizontalHalfPlane { a: b, side: HalfPlaneSide::Lower },
        },
        _ => {
            let container = match affine_minorant(psi).minorant {
                Some((m, c)) => Container::TiltedHalfPlane { m, c },
                None => Container::None,
            };
            SemigroupClass { kind: ClassKind::ParabolicZeroStep, container }
        }
    }
}

struct TailInfo {
    lower: Option<Bound>,
    upper: Option<Bound>,
    from: f64,
}

fn tail_info(psi: &DefiningFunction, dir: f64) -> TailInfo {
    let p = if dir > 0.0 { psi.pieces().last() } else { psi.pieces().first() };
    let p = p.expect("validated functions have pieces");
    let mut t = TailInfo { lower: None, upper: None, from: 0.0 };
    match &p.kind {
        PieceKind::Analytic { expr, .. } => {
            if let Some((m, c)) = expr.affine_on_tail(dir) {
                t.lower = Some(Bound::Affine { m, c });
                t.upper = Some(Bound::Affine { m, c });
                // The affine form holds once the argument of every abs has a fixed sign.
                t.from = 0.0;
            }
        }
        PieceKind::PointSpike { background: Ext::Fin(v), .. } => {
            t.lower = Some(Bound::Affine { m: 0.0, c: *v });
            t.upper = t.lower;
        }
        _ => {}
    }
    if let Some(e) = p.envelope {
        if e.lower.is_some() {
            t.lower = e.lower;
        }
        if e.upper.is_some() {
            t.upper = e.upper;
        }
        t.from = t.from.max(e.from);
    }
    // The tail piece itself starts at a finite boundary; the bounds only apply beyond it.
    let edge = if dir > 0.0 { p.lo } else { p.hi };
    if let Ext::Fin(b) = edge {
        t.from = t.from.max(b.abs());
    }
    t
}

/// Declared or derived lower bound on the tail in direction `dir` (`+1` or `-1`).
pub fn tail_lower_bound(psi: &DefiningFunction, dir: f64) -> Option<Bound> {
    tail_info(psi, dir).lower
}

/// Declared or derived upper bound on the tail in direction `dir`.
pub fn tail_upper_bound(psi: &DefiningFunction, dir: f64) -> Option<Bound> {
    tail_info(psi, dir).upper
}

/// Slopes compatible with `psi >= bound` (sufficient) on a tail in direction `dir`.
fn slopes_from_lower(b: &Bound, dir: f64) -> SlopeInterval {
    match *b {
        Bound::Affine { m, .. } => {
            if dir > 0.0 {
                SlopeInterval::at_most(m, false)
            } else {
                SlopeInterval::at_least(m, false)
            }
        }
        Bound::LogPower { k, a, .. } => {
            let open = k > 0.0 && a > 0.0;
            if dir > 0.0 {
                SlopeInterval::at_most(0.0, open)
            } else {
                SlopeInterval::at_least(0.0, open)
            }
        }
    }
}

fn tail_min(b: &Bound, m: f64, from: f64, dir: f64) -> f64 {
    let mut best = f64::INFINITY;
    let start = from.max(1.0);
    for j in 0..=400 {
        let y = dir * start * 2f64.powf(j as f64 / 4.0);
        if !y.is_finite() {
            break;
        }
        let v = b.eval(y) - m * y;
        if v < best {
            best = v;
        }
    }
    let v0 = b.eval(dir * from) - m * dir * from;
    best.min(v0)
}

/// Searches for `(m, c)` with `psi(y) >= m y + c` on `I`.
pub fn affine_minorant(psi: &DefiningFunction) -> MinorantAnalysis {
    let w = psi.liminf_neg_inf_set();
    if !w.intervals.is_empty() {
        return MinorantAnalysis {
            status: Tri::No,
            minorant: None,
            sufficient: SlopeInterval::EMPTY,
            necessary: SlopeInterval::EMPTY,
            exact: true,
            reason: "psi has liminf -inf somewhere in the closure of I",
        };
    }
    let mut suff = SlopeInterval::ALL;
    let mut nec = SlopeInterval::ALL;
    let mut tails: Vec<(f64, TailInfo)> = Vec::new();
    let mut undeclared = false;
    for (dir, unbounded) in [(1.0, psi.hi() == Ext::PosInf), (-1.0, psi.lo() == Ext::NegInf)] {
        if !unbounded {
            continue;
        }
        let t = tail_info(psi, dir);
        match &t.lower {
            Some(b) => suff = suff.intersect(&slopes_from_lower(b, dir)),
            None => undeclared = true,
        }
        if let Some(b) = &t.upper {
            let s = match *b {
                Bound::Affine { m, .. } => {
                    if dir > 0.0 {
                        SlopeInterval::at_most(m, false)
                    } else {
                        SlopeInterval::at_least(m, false)
                    }
                }
                Bound::LogPower { k, a, .. } => {
                    let open = k > 0.0 && a > 0.0;
                    if dir > 0.0 {
                        SlopeInterval::at_most(0.0, open)
                    } else {
                        SlopeInterval::at_least(0.0, open)
                    }
                }
            };
            nec = nec.intersect(&s);
        }
        tails.push((dir, t));
    }
    if undeclared {
        suff = SlopeInterval::EMPTY;
    }
    if nec.is_empty() {
        return MinorantAnalysis {
            status: Tri::No,
            minorant: None,
            sufficient: SlopeInterval::EMPTY,
            necessary: nec,
            exact: true,
            reason: "declared tail majorants force psi - m y to -inf for every slope",
        };
    }
    let exact = !undeclared && suff == nec;
    let m = match suff.pick() {
        Some(m) if w.unknown_at.is_empty() => m,
        _ => {
            return MinorantAnalysis {
                status: Tri::Unknown,
                minorant: None,
                sufficient: suff,
                necessary: nec,
                exact: false,
                reason: "tail behaviour is not certified by declarations",
            }
        }
    };
    // Middle region: every finite boundary and every tail threshold, plus margin.
    let mut reach: f64 = 1.0;
    for b in psi.breakpoints() {
        reach = reach.max(b.y.abs() + 1.0);
    }
    for (_, t) in &tails {
        reach = reach.max(t.from);
    }
    let lo = match psi.lo() {
        Ext::Fin(a) => a,
        _ => -reach,
    };
    let hi = match psi.hi() {
        Ext::Fin(b) => b,
        _ => reach,
    };
    let mut c = f64::INFINITY;
    let mut certified = true;
    let n = 20000;
    let probe = |y: f64, c: &mut f64| match psi.sample(y) {
        Ok(Ext::Fin(v)) => *c = c.min(v - m * y),
        Ok(Ext::NegInf) => *c = f64::NEG_INFINITY,
        _ => {}
    };
    for k in 0..=n {
        let y = lo + (hi - lo) * (k as f64 + 0.5) / (n as f64 + 1.0);
        probe(y, &mut c);
    }
    for b in psi.breakpoints() {
        probe(b.y, &mut c);
        match psi.one_sided_limits(b.y) {
            Ok(l) if l.certainty() != Certainty::Inconclusive => {
                if let Ext::Fin(v) = l.liminf() {
                    c = c.min(v - m * b.y);
                }
            }
            _ => certified = false,
        }
    }
    for end in [psi.lo(), psi.hi()] {
        if let Ext::Fin(y) = end {
            match psi.one_sided_limits(y) {
                Ok(l) if l.certainty() != Certainty::Inconclusive => {
                    if let Ext::Fin(v) = l.liminf() {
                        c = c.min(v - m * y);
                    }
                }
                _ => certified = false,
            }
        }
    }
    for (dir, t) in &tails {
        if let Some(b) = &t.lower {
            c = c.min(tail_min(b, m, t.from, *dir));
        }
    }
    if !c.is_finite() || !certified {
        return MinorantAnalysis {
            status: Tri::Unknown,
            minorant: None,
            sufficient: suff,
            necessary: nec,
            exact: false,
            reason: "grid certification failed",
        };
    }
    let c = c - 1.0 - 0.05 * c.abs();
    MinorantAnalysis {
        status: Tri::Yes,
        minorant: Some((m, c)),
        sufficient: suff,
        necessary: nec,
        exact,
        reason: "feasible slope found and intercept certified on a grid",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn kinds_follow_the_interval() {
        let s = classify(&catalog::strip());
        assert!(matches!(s.kind, ClassKind::Hyperbolic { width } if (width - core::f64::consts::PI).abs() < 1e-15));
        assert!(matches!(
            classify(&catalog::quadrant()).kind,
            ClassKind::ParabolicPositiveStep { side: HalfPlaneSide::Upper }
        ));
        assert_eq!(classify(&catalog::log_minorant(0.0)).kind, ClassKind::ParabolicZeroStep);
        assert_eq!(classify(&catalog::log_minorant(0.0)).container, Container::None);
    }

    #[test]
    fn minorants() {
        let h = affine_minorant(&catalog::half_plane());
        assert_eq!(h.status, Tri::Yes);
        let (m, c) = h.minorant.unwrap();
        assert_eq!(m, 0.0);
        assert!(c <= 0.0);
        assert!(h.exact);
        assert_eq!(affine_minorant(&catalog::log_minorant(0.0)).status, Tri::No);
        assert_eq!(affine_minorant(&catalog::eta_domain(1.0)).status, Tri::No);
        assert_eq!(affine_minorant(&catalog::log_domain()).status, Tri::No);
        assert_eq!(affine_minorant(&catalog::cusp()).status, Tri::No);
        assert_eq!(affine_minorant(&catalog::comb_line()).status, Tri::Yes);
    }

    #[test]
    fn abs_has_a_flat_minorant() {
        use crate::domain::{Piece, PiecewiseFunction};
        let f = PiecewiseFunction {
            lo: Ext::NegInf,
            hi: Ext::PosInf,
            pieces: alloc::vec![Piece::analytic(Ext::NegInf, Ext::PosInf, "abs(y)")],
            points: alloc::vec![],
        };
        let d = DefiningFunction::new(f).unwrap();
        let a = affine_minorant(&d);
        assert_eq!(a.status, Tri::Yes);
        assert_eq!(a.minorant.unwrap().0, 0.0);
        assert_eq!(a.sufficient, SlopeInterval { lo: Ext::Fin(-1.0), lo_open: false, hi: Ext::Fin(1.0), hi_open: false });
    }

    #[test]
    fn slope_interval_algebra() {
        let a = SlopeInterval::at_most(0.0, true);
        let b = SlopeInterval::at_least(0.0, true);
        assert!(a.intersect(&b).is_empty());
        let c = SlopeInterval::at_most(0.0, false).intersect(&SlopeInterval::at_least(0.0, false));
        assert!(!c.is_empty());
        assert_eq!(c.pick(), Some(0.0));
        assert_eq!(a.pick(), Some(-1.0));
    }
}

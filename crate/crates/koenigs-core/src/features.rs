//! Dynamical features read off `psi`: fixed points, unbounded
//! discontinuities, contact spikes, combs and the Denjoy-Wolff type.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::cantor::CantorSet;
use crate::classifier::{classify, ClassKind};
use crate::domain::{DefiningFunction, PieceKind, SideLimits};
use crate::ext::{Certainty, Ext, Side, Tri};

/// A height in `D_U` with the side(s) where `liminf = -inf < limsup < inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnboundedDiscontinuity {
    pub y: f64,
    pub left: bool,
    pub right: bool,
    pub certainty: Certainty,
}

impl UnboundedDiscontinuity {
    pub fn side_count(&self) -> usize {
        self.left as usize + self.right as usize
    }
}

/// `psi(c0) > q` and `psi <= q` near `c0` elsewhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactSpike {
    pub c0: f64,
    pub q: f64,
    /// Found numerically at a boundary rather than declared.
    pub heuristic: bool,
}

/// `psi > q` on the carrier and `psi <= q` on `J` minus the carrier.
#[derive(Clone, Debug, PartialEq)]
pub struct CombWitness {
    pub j: (f64, f64),
    pub q: f64,
    pub carrier: CantorSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DwDiscontinuity {
    None,
    Simple,
    Double,
    Unknown,
}

impl DwDiscontinuity {
    pub fn as_str(&self) -> &'static str {
        match self {
            DwDiscontinuity::None => "none",
            DwDiscontinuity::Simple => "simple",
            DwDiscontinuity::Double => "double",
            DwDiscontinuity::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureReport {
    pub minus_inf_components: Vec<(Ext, Ext)>,
    /// Bounded components; each maps to a boundary regular fixed point.
    pub i_r: Vec<(f64, f64)>,
    pub i_infinity: Vec<(Ext, Ext)>,
    /// Super-repelling heights.
    pub i_n: Vec<f64>,
    pub d_u: Vec<UnboundedDiscontinuity>,
    pub spikes: Vec<ContactSpike>,
    pub cantor_combs: Vec<CombWitness>,
    pub dw_discontinuity: DwDiscontinuity,
    pub exceptional_arc_to_unbounded: Tri,
    /// Heights whose limits could not be certified.
    pub unknown_at: Vec<f64>,
    /// Set when `psi != psi~`, where the correspondences are not guaranteed.
    pub caveats: Vec<&'static str>,
    /// Which hyperbolic configuration the counts match, if any.
    pub configuration: Option<&'static str>,
}

impl FeatureReport {
    pub fn boundary_fixed_points(&self) -> usize {
        self.i_r.len() + self.i_n.len()
    }
}

fn in_closure_of(y: f64, ivs: &[(Ext, Ext)]) -> bool {
    ivs.iter().any(|&(a, b)| Ext::Fin(y) >= a && Ext::Fin(y) <= b)
}

/// Heights where a one-sided limit can leave the continuous regime: piece
/// boundaries, finite ends of `I` and spike locations.
fn candidate_heights(psi: &DefiningFunction) -> Vec<f64> {
    let mut ys: Vec<f64> = psi.breakpoints().iter().map(|b| b.y).collect();
    for e in [psi.lo(), psi.hi()] {
        if let Ext::Fin(y) = e {
            ys.push(y);
        }
    }
    for p in psi.pieces() {
        if let PieceKind::PointSpike { c0, .. } = p.kind {
            ys.push(c0);
        }
    }
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    ys.dedup();
    ys
}

/// The side of `y` lies in a `-inf` component.
fn side_in_component(y: f64, s: Side, comps: &[(Ext, Ext)]) -> bool {
    comps.iter().any(|&(a, b)| match s {
        Side::Left => b == Ext::Fin(y),
        Side::Right => a == Ext::Fin(y),
    } || (Ext::Fin(y) > a && Ext::Fin(y) < b))
}

fn sides(psi: &DefiningFunction, y: f64) -> [(Side, Option<SideLimits>); 2] {
    let l = psi.one_sided_limits(y).ok();
    [(Side::Left, l.and_then(|l| l.left)), (Side::Right, l.and_then(|l| l.right))]
}

pub fn minus_infinity_components(psi: &DefiningFunction) -> Vec<(Ext, Ext)> {
    psi.minus_infinity_components()
}

/// Heights in `closure(I) \ closure(J_inf)` with a one-sided full limit `-inf`.
/// Heights whose limits are inconclusive go to the second list.
pub fn detect_super_repelling(psi: &DefiningFunction) -> (Vec<f64>, Vec<f64>) {
    let comps = psi.minus_infinity_components();
    let mut found = Vec::new();
    let mut unknown = Vec::new();
    for y in candidate_heights(psi) {
        if in_closure_of(y, &comps) {
            continue;
        }
        let mut hit = false;
        let mut unsure = false;
        for (s, lim) in sides(psi, y) {
            let Some(l) = lim else { continue };
            if side_in_component(y, s, &comps) {
                continue;
            }
            if !l.is_conclusive() {
                unsure = true;
            } else if l.limsup.is_neg_inf() {
                hit = true;
            }
        }
        if hit {
            found.push(y);
        } else if unsure {
            unknown.push(y);
        }
    }
    (found, unknown)
}

pub fn detect_unbounded_discontinuities(psi: &DefiningFunction) -> (Vec<UnboundedDiscontinuity>, Vec<f64>) {
    let mut found = Vec::new();
    let mut unknown = Vec::new();
    for y in candidate_heights(psi) {
        let mut d = UnboundedDiscontinuity { y, left: false, right: false, certainty: Certainty::Exact };
        let mut unsure = false;
        for (s, lim) in sides(psi, y) {
            let Some(l) = lim else { continue };
            if !l.is_conclusive() {
                unsure = true;
                continue;
            }
            if l.liminf.is_neg_inf() && l.limsup.is_finite() {
                match s {
                    Side::Left => d.left = true,
                    Side::Right => d.right = true,
                }
                d.certainty = d.certainty.worst(l.certainty);
            }
        }
        if d.left || d.right {
            found.push(d);
        } else if unsure {
            unknown.push(y);
        }
    }
    (found, unknown)
}

pub fn detect_contact_spikes(psi: &DefiningFunction) -> Vec<ContactSpike> {
    let mut out = Vec::new();
    for p in psi.pieces() {
        if let PieceKind::PointSpike { c0, value: Ext::Fin(v), background } = p.kind {
            match background {
                Ext::Fin(bg) if v > bg => out.push(ContactSpike { c0, q: 0.5 * (v + bg), heuristic: false }),
                Ext::NegInf => out.push(ContactSpike { c0, q: v - 1.0, heuristic: false }),
                _ => {}
            }
        }
    }
    for b in psi.breakpoints() {
        let Ext::Fin(v) = b.value else { continue };
        let Ok(l) = psi.one_sided_limits(b.y) else { continue };
        if l.certainty() == Certainty::Inconclusive {
            continue;
        }
        let q = match l.limsup() {
            Ext::Fin(s) if s < v && !((v - s).abs() <= 1e-9 * v.abs().max(1.0)) => 0.5 * (v + s),
            Ext::NegInf => v - 1.0,
            _ => continue,
        };
        out.push(ContactSpike { c0: b.y, q, heuristic: l.certainty() != Certainty::Exact });
    }
    out.sort_by(|a, b| a.c0.partial_cmp(&b.c0).unwrap_or(core::cmp::Ordering::Equal));
    out
}

pub fn detect_cantor_combs(psi: &DefiningFunction) -> Vec<CombWitness> {
    let mut out = Vec::new();
    for p in psi.pieces() {
        let PieceKind::Cantor { carrier, on_value, gap } = &p.kind else { continue };
        let gap_hi = gap.end_range().1;
        if *on_value <= gap_hi {
            continue;
        }
        let q = 0.5 * (on_value + gap_hi);
        let (lo, hi) = (carrier.lo(), carrier.hi());
        // Widen J past the span ends when psi stays below q there.
        let outer_ok = |y: f64, s: Side| {
            psi.one_sided_limits(y)
                .ok()
                .and_then(|l| l.side(s))
                .is_some_and(|l| l.is_conclusive() && l.limsup < Ext::Fin(q))
        };
        let eps = 1e-3 * (hi - lo);
        let a = if outer_ok(lo, Side::Left) { lo - eps } else { lo };
        let b = if outer_ok(hi, Side::Right) { hi + eps } else { hi };
        out.push(CombWitness { j: (a, b), q, carrier: carrier.clone() });
    }
    out
}

pub fn dw_discontinuity(psi: &DefiningFunction) -> DwDiscontinuity {
    let kind = classify(psi).kind;
    if kind == ClassKind::ParabolicZeroStep {
        return DwDiscontinuity::None;
    }
    let mut hits = 0;
    for (e, s) in [(psi.lo(), Side::Right), (psi.hi(), Side::Left)] {
        let Ext::Fin(y) = e else { continue };
        let Some(l) = psi.one_sided_limits(y).ok().and_then(|l| l.side(s)) else { continue };
        if !l.is_conclusive() {
            return DwDiscontinuity::Unknown;
        }
        if l.liminf.is_neg_inf() && l.limsup.is_pos_inf() {
            hits += 1;
        }
    }
    match hits {
        0 => DwDiscontinuity::None,
        1 => DwDiscontinuity::Simple,
        _ => DwDiscontinuity::Double,
    }
}

/// `I = (a0, inf)`, `psi = -inf` on `(a, inf)` with `a > a0`, and from the left
/// at `a`: `liminf = -inf < limsup = psi(a)`.
pub fn exceptional_arc_to_unbounded(psi: &DefiningFunction) -> Tri {
    let (Ext::Fin(_), Ext::PosInf) = (psi.lo(), psi.hi()) else { return Tri::No };
    let comps = psi.minus_infinity_components();
    let Some(&(Ext::Fin(a), Ext::PosInf)) = comps.last() else { return Tri::No };
    let Some(l) = psi.one_sided_limits(a).ok().and_then(|l| l.left) else { return Tri::No };
    if !l.is_conclusive() {
        return Tri::Unknown;
    }
    let value = psi.value(a).unwrap_or(Ext::NegInf);
    Tri::from_bool(l.liminf.is_neg_inf() && l.limsup.is_finite() && l.limsup == value)
}

fn configuration(r: &FeatureReport) -> Option<&'static str> {
    if !r.unknown_at.is_empty() || r.dw_discontinuity == DwDiscontinuity::Unknown {
        return None;
    }
    let fp = r.boundary_fixed_points();
    let du: usize = r.d_u.iter().map(|d| d.side_count()).sum();
    let dw = r.dw_discontinuity;
    match (fp, du, dw) {
        (0 | 1, 0, DwDiscontinuity::None) => Some("c.1"),
        (1, 1, DwDiscontinuity::None) => Some("c.2"),
        (1, 2, DwDiscontinuity::None) if r.i_r.len() == 1 => Some("c.3"),
        (0, 1, DwDiscontinuity::None) => Some("c.4"),
        (0, 2, DwDiscontinuity::None) => Some("c.5"),
        (0, 0, DwDiscontinuity::Simple) => Some("c.6"),
        _ => None,
    }
}

pub fn analyze(psi: &DefiningFunction) -> FeatureReport {
    let comps = psi.minus_infinity_components();
    let mut i_r = Vec::new();
    let mut i_infinity = Vec::new();
    for &(a, b) in &comps {
        match (a, b) {
            (Ext::Fin(a), Ext::Fin(b)) => i_r.push((a, b)),
            _ => i_infinity.push((a, b)),
        }
    }
    let (i_n, mut unknown_at) = detect_super_repelling(psi);
    let (d_u, u2) = detect_unbounded_discontinuities(psi);
    unknown_at.extend(u2);
    unknown_at.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    unknown_at.dedup();
    let mut caveats = Vec::new();
    match psi.equals_regularized().equal {
        Tri::Yes => {}
        Tri::No => caveats.push("psi differs from its regularization; fixed-point correspondences may fail"),
        Tri::Unknown => caveats.push("regularity of psi is undetermined; fixed-point correspondences may fail"),
    }
    let mut r = FeatureReport {
        minus_inf_components: comps,
        i_r,
        i_infinity,
        i_n,
        d_u,
        spikes: detect_contact_spikes(psi),
        cantor_combs: detect_cantor_combs(psi),
        dw_discontinuity: dw_discontinuity(psi),
        exceptional_arc_to_unbounded: exceptional_arc_to_unbounded(psi),
        unknown_at,
        caveats,
        configuration: None,
    };
    if matches!(classify(psi).kind, ClassKind::Hyperbolic { .. }) {
        r.configuration = configuration(&r);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn components_split_by_boundedness() {
        let r = analyze(&catalog::minus_inf_gap());
        assert_eq!(r.i_r, [(0.0, 1.0)]);
        assert!(r.i_n.is_empty());
        assert!(r.i_infinity.is_empty());
        assert_eq!(r.configuration, Some("c.1"));
        let u = analyze(&catalog::upper_half_plane());
        assert_eq!(u.i_infinity, [(Ext::Fin(0.0), Ext::PosInf)]);
    }

    #[test]
    fn cusp_is_super_repelling() {
        let r = analyze(&catalog::cusp());
        assert_eq!(r.i_n, [0.0]);
        assert!(r.d_u.is_empty());
        assert_eq!(r.spikes.len(), 1);
        assert!(!r.caveats.is_empty());
    }

    #[test]
    fn oscillation_gives_left_tag() {
        let r = analyze(&catalog::du_oscillation());
        assert_eq!(r.d_u.len(), 1);
        assert_eq!((r.d_u[0].y, r.d_u[0].left, r.d_u[0].right), (0.0, true, false));
        assert_eq!(r.configuration, Some("c.4"));
        assert!(analyze(&catalog::oscillation_cantor()).d_u.is_empty());
    }

    #[test]
    fn spikes_and_combs() {
        let s = detect_contact_spikes(&catalog::point_spike());
        assert_eq!(s, [ContactSpike { c0: 0.0, q: 0.5, heuristic: false }]);
        assert!(detect_contact_spikes(&catalog::strip()).is_empty());
        assert!(detect_contact_spikes(&catalog::comb()).is_empty());
        let c = detect_cantor_combs(&catalog::comb());
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].q, 0.5);
        assert!(c[0].j.0 < 0.0 && c[0].j.1 > 1.0);
        assert!(detect_cantor_combs(&catalog::oscillation_cantor()).is_empty());
    }

    #[test]
    fn denjoy_wolff_type() {
        assert_eq!(dw_discontinuity(&catalog::dw_simple()), DwDiscontinuity::Simple);
        assert_eq!(dw_discontinuity(&catalog::dw_double()), DwDiscontinuity::Double);
        assert_eq!(dw_discontinuity(&catalog::strip()), DwDiscontinuity::None);
        assert_eq!(analyze(&catalog::dw_simple()).configuration, Some("c.6"));
    }

    #[test]
    fn exceptional_arc() {
        assert_eq!(exceptional_arc_to_unbounded(&catalog::exceptional_arc()), Tri::Yes);
        assert_eq!(exceptional_arc_to_unbounded(&catalog::quadrant()), Tri::No);
    }
}

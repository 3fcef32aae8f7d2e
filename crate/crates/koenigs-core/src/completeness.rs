//! Completeness of frequencies, decided from `psi` and cross-checked on a raster.

use alloc::vec::Vec;
use num_complex::Complex64 as C64;

use crate::classifier::{affine_minorant, classify, tail_lower_bound, tail_upper_bound, ClassKind};
use crate::domain::{Bound, DefiningFunction};
use crate::ext::{Ext, Tri};
use crate::features::{analyze, detect_cantor_combs, detect_contact_spikes, FeatureReport};
use crate::frequencies::{canonical_of, hardy_membership, CanonicalDomain, Membership};
use crate::geometry::{topology, OracleError, Window};

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    CantorComb { j: (f64, f64), q: f64 },
    ContactSpike { c0: f64, q: f64 },
    /// A height where `psi > psi~` not explained by a comb or a spike.
    Regularization { at: f64 },
    /// The set where `liminf psi = -inf`, in a configuration the class forbids.
    LiminfSet { intervals: Vec<(Ext, Ext)> },
    NoAffineMinorant { reason: &'static str },
    /// Sampled frequencies bracketing a bounded real `Lambda_1`.
    FrequencyInterval { member: f64, non_member: f64, half_plane_shift: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decision {
    pub status: Tri,
    pub route: &'static str,
    pub witnesses: Vec<Witness>,
}

fn regularity_witnesses(psi: &DefiningFunction, points: &[f64]) -> Vec<Witness> {
    let mut out = Vec::new();
    let combs = detect_cantor_combs(psi);
    let spikes = detect_contact_spikes(psi);
    for c in &combs {
        out.push(Witness::CantorComb { j: c.j, q: c.q });
    }
    for s in &spikes {
        out.push(Witness::ContactSpike { c0: s.c0, q: s.q });
    }
    for &y in points {
        let covered = spikes.iter().any(|s| s.c0 == y) || combs.iter().any(|c| y >= c.carrier.lo() && y <= c.carrier.hi());
        if !covered {
            out.push(Witness::Regularization { at: y });
        }
    }
    out
}

/// `W` lies in the closure of the unbounded `-inf` components.
fn inside_unbounded_components(w: &[(Ext, Ext)], comps: &[(Ext, Ext)]) -> bool {
    w.iter().all(|&(a, b)| {
        comps.iter().any(|&(c, d)| (c == Ext::NegInf || d == Ext::PosInf) && a >= c && b <= d)
    })
}

pub fn decide_weak_star(psi: &DefiningFunction) -> Decision {
    let class = classify(psi);
    let reg = psi.equals_regularized();
    let w = psi.liminf_neg_inf_set();
    let mut witnesses = Vec::new();
    if reg.equal == Tri::No {
        witnesses.extend(regularity_witnesses(psi, &reg.witnesses));
    }
    let w_known = w.unknown_at.is_empty();
    let (route, w_ok) = match class.kind {
        ClassKind::Hyperbolic { .. } => ("hyperbolic-psi-criterion", Tri::from_bool(w.intervals.len() <= 1)),
        ClassKind::ParabolicPositiveStep { .. } => {
            let comps = psi.minus_infinity_components();
            ("positive-step-psi-criterion", Tri::from_bool(inside_unbounded_components(&w.intervals, &comps)))
        }
        ClassKind::ParabolicZeroStep => {
            let m = affine_minorant(psi);
            match m.status {
                Tri::No => {
                    return Decision {
                        status: Tri::No,
                        route: "zero-step-no-half-plane",
                        witnesses: alloc::vec![Witness::NoAffineMinorant { reason: m.reason }],
                    }
                }
                Tri::Unknown => {
                    return Decision { status: Tri::Unknown, route: "zero-step-half-plane-undetermined", witnesses }
                }
                Tri::Yes => ("zero-step-psi-criterion", Tri::Yes),
            }
        }
    };
    // Unresolved heights can only add to W, so a failure already seen stands.
    let w_ok = if w_ok == Tri::Yes && !w_known { Tri::Unknown } else { w_ok };
    if w_ok == Tri::No {
        witnesses.push(Witness::LiminfSet { intervals: w.intervals.clone() });
    }
    Decision { status: reg.equal.and(w_ok), route, witnesses }
}

/// Components of `R \ W`, which the complement of the closure mirrors.
pub fn predicted_components(psi: &DefiningFunction) -> Option<usize> {
    let w = psi.liminf_neg_inf_set();
    if !w.unknown_at.is_empty() {
        return None;
    }
    if w.intervals.is_empty() {
        return Some(1);
    }
    let mut n = w.intervals.len() + 1;
    if w.intervals.first().is_some_and(|iv| iv.0 == Ext::NegInf) {
        n -= 1;
    }
    if w.intervals.last().is_some_and(|iv| iv.1 == Ext::PosInf) {
        n -= 1;
    }
    Some(n)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopologicalDecision {
    pub int_closure_ok: Tri,
    pub components: Option<usize>,
    pub verdict: Tri,
    pub route: &'static str,
}

pub fn decide_topological(psi: &DefiningFunction, window: Window, n: usize) -> Result<TopologicalDecision, OracleError> {
    let t = topology(psi, window, n)?;
    let comps = |pred: fn(usize) -> bool| t.components.map_or(Tri::Unknown, |c| Tri::from_bool(pred(c)));
    let (verdict, route) = match classify(psi).kind {
        ClassKind::Hyperbolic { .. } => (t.int_closure_ok.and(comps(|c| c <= 2)), "hyperbolic-raster"),
        ClassKind::ParabolicPositiveStep { .. } => (t.int_closure_ok.and(comps(|c| c == 1)), "positive-step-raster"),
        ClassKind::ParabolicZeroStep => match affine_minorant(psi).status {
            Tri::No => (Tri::No, "zero-step-no-half-plane"),
            Tri::Unknown => (Tri::Unknown, "zero-step-half-plane-undetermined"),
            Tri::Yes => (t.int_closure_ok, "zero-step-raster"),
        },
    };
    Ok(TopologicalDecision { int_closure_ok: t.int_closure_ok, components: t.components, verdict, route })
}

fn tail_log_dominated(b: Option<Bound>, dir: f64) -> bool {
    match b {
        Some(Bound::Affine { m, .. }) => m * dir >= 0.0,
        Some(Bound::LogPower { k, a, .. }) => k <= 0.0 || a < 1.0,
        None => false,
    }
}

/// Both tails stay above `c - k (log(|y| + 3))^a` with `a < 1`, so the domain
/// sits inside a translate of an `eta_a` domain, which has all frequencies `<= 0`.
fn log_dominated(psi: &DefiningFunction) -> bool {
    psi.lo() == Ext::NegInf
        && psi.hi() == Ext::PosInf
        && tail_log_dominated(tail_lower_bound(psi, 1.0), 1.0)
        && tail_log_dominated(tail_lower_bound(psi, -1.0), -1.0)
}

/// `psi <= c` on the whole line, read from the tail majorants and samples.
fn right_half_plane_shift(psi: &DefiningFunction) -> Option<f64> {
    if psi.lo() != Ext::NegInf || psi.hi() != Ext::PosInf {
        return None;
    }
    let mut c = f64::NEG_INFINITY;
    for dir in [1.0, -1.0] {
        match tail_upper_bound(psi, dir)? {
            Bound::LogPower { c: c0, k, .. } if k >= 0.0 => c = c.max(c0),
            Bound::Affine { m: 0.0, c: c0 } => c = c.max(c0),
            _ => return None,
        }
    }
    Some(c)
}

fn frequency_interval_witness(psi: &DefiningFunction) -> Option<Witness> {
    let dom @ CanonicalDomain::EtaDomain { a } = canonical_of(psi)? else { return None };
    if a != 1.0 {
        return None;
    }
    let shift = right_half_plane_shift(psi)?;
    let probe = |l: C64| hardy_membership(l, dom, 1.0);
    let member = probe(C64::new(-0.5, 0.0)) == Membership::Member;
    let beyond = probe(C64::new(-1.5, 0.0)) == Membership::NonMember;
    let off_axis = probe(C64::new(-0.5, 0.5)) == Membership::NonMember && probe(C64::new(-0.5, -0.5)) == Membership::NonMember;
    let positive = probe(C64::new(0.5, 0.0)) == Membership::NonMember;
    (member && beyond && off_axis && positive).then_some(Witness::FrequencyInterval {
        member: -0.5,
        non_member: -1.5,
        half_plane_shift: shift,
    })
}

pub fn p_completeness_report(psi: &DefiningFunction, p: f64, weak: &Decision) -> Decision {
    let _ = p;
    if weak.status == Tri::Yes {
        return Decision { status: Tri::Yes, route: "inherited-from-weak-star", witnesses: Vec::new() };
    }
    let spikes = detect_contact_spikes(psi);
    if !spikes.is_empty() {
        return Decision {
            status: Tri::No,
            route: "contact-spike",
            witnesses: spikes.iter().map(|s| Witness::ContactSpike { c0: s.c0, q: s.q }).collect(),
        };
    }
    let w = psi.liminf_neg_inf_set();
    if log_dominated(psi) && w.intervals.is_empty() && w.unknown_at.is_empty() {
        match psi.equals_regularized().equal {
            Tri::Yes => return Decision { status: Tri::Yes, route: "log-domination", witnesses: Vec::new() },
            Tri::No => {}
            Tri::Unknown => {
                return Decision { status: Tri::Unknown, route: "log-domination-regularity-undetermined", witnesses: Vec::new() }
            }
        }
    }
    if let Some(wit) = frequency_interval_witness(psi) {
        return Decision { status: Tri::No, route: "bounded-frequency-interval", witnesses: alloc::vec![wit] };
    }
    Decision { status: Tri::Unknown, route: "undetermined", witnesses: Vec::new() }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompletenessVerdict {
    pub weak_star: Decision,
    pub p: Option<(f64, Decision)>,
    pub features: FeatureReport,
    pub caveats: Vec<&'static str>,
    /// A definite `No` is backed by a witness.
    pub consistent: bool,
}

pub fn decide(psi: &DefiningFunction, p: Option<f64>) -> CompletenessVerdict {
    let weak_star = decide_weak_star(psi);
    let features = analyze(psi);
    let pd = p.map(|p| (p, p_completeness_report(psi, p, &weak_star)));
    let mut caveats = features.caveats.clone();
    if !features.unknown_at.is_empty() {
        caveats.push("some one-sided limits could not be certified");
    }
    let consistent = weak_star.status != Tri::No || !weak_star.witnesses.is_empty();
    CompletenessVerdict { weak_star, p: pd, features, caveats, consistent }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::geometry::default_window;

    #[test]
    fn weak_star_examples() {
        let s = decide_weak_star(&catalog::strip());
        assert_eq!((s.status, s.route), (Tri::Yes, "hyperbolic-psi-criterion"));
        let c = decide_weak_star(&catalog::comb());
        assert_eq!(c.status, Tri::No);
        assert!(matches!(c.witnesses[0], Witness::CantorComb { .. }));
        assert_eq!(decide_weak_star(&catalog::oscillation_cantor()).status, Tri::Yes);
        let z = decide_weak_star(&catalog::log_minorant(0.0));
        assert_eq!((z.status, z.route), (Tri::No, "zero-step-no-half-plane"));
        assert_eq!(decide_weak_star(&catalog::minus_inf_gap()).status, Tri::Yes);
        assert_eq!(decide_weak_star(&catalog::two_gaps()).status, Tri::No);
        assert_eq!(decide_weak_star(&catalog::exceptional_arc()).status, Tri::Yes);
        assert_eq!(decide_weak_star(&catalog::dw_double()).status, Tri::No);
    }

    #[test]
    fn predicted_counts() {
        assert_eq!(predicted_components(&catalog::strip()), Some(1));
        assert_eq!(predicted_components(&catalog::minus_inf_gap()), Some(2));
        assert_eq!(predicted_components(&catalog::two_gaps()), Some(3));
        assert_eq!(predicted_components(&catalog::upper_half_plane()), Some(1));
        assert_eq!(predicted_components(&catalog::full_strip()), Some(2));
    }

    #[test]
    fn topological_examples() {
        let t = |d: &DefiningFunction| decide_topological(d, default_window(d), 128).unwrap();
        let s = t(&catalog::strip());
        assert_eq!((s.int_closure_ok, s.components, s.verdict), (Tri::Yes, Some(1), Tri::Yes));
        let g = t(&catalog::minus_inf_gap());
        assert_eq!((g.components, g.verdict), (Some(2), Tri::Yes));
        assert_eq!(t(&catalog::comb()).verdict, Tri::No);
    }

    #[test]
    fn p_routes() {
        let d = catalog::double_spike();
        let r = p_completeness_report(&d, 2.0, &decide_weak_star(&d));
        assert_eq!((r.status, r.route), (Tri::No, "contact-spike"));
        let l = catalog::log_minorant(1.0);
        let r = p_completeness_report(&l, 2.0, &decide_weak_star(&l));
        assert_eq!((r.status, r.route), (Tri::Yes, "log-domination"));
        let s = catalog::strip();
        assert_eq!(p_completeness_report(&s, 1.0, &decide_weak_star(&s)).route, "inherited-from-weak-star");
    }
}

//! JSON renderings of core results under the `koenigs-lab/v1` schema.

use koenigs_core::classifier::{ClassKind, Container, HalfPlaneSide, MinorantAnalysis, SemigroupClass, SlopeInterval};
use koenigs_core::completeness::{CompletenessVerdict, Decision, TopologicalDecision, Witness};
use koenigs_core::features::FeatureReport;
use koenigs_core::frequencies::{LambdaInfty, Membership};
use koenigs_core::{Ext, Tri};
use num_complex::Complex64 as C64;
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "koenigs-lab/v1";

pub fn ext(e: Ext) -> Value {
    match e {
        Ext::NegInf => json!("-inf"),
        Ext::PosInf => json!("inf"),
        Ext::Fin(v) => json!(v),
    }
}

pub fn tri(t: Tri) -> Value {
    json!(t.as_str())
}

fn interval(a: Ext, b: Ext) -> Value {
    json!([ext(a), ext(b)])
}

/// Top-level object carrying the schema tag and command name.
pub fn envelope(command: &str, body: Map<String, Value>) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m.extend(body);
    Value::Object(m)
}

fn side(s: HalfPlaneSide) -> &'static str {
    match s {
        HalfPlaneSide::Upper => "upper",
        HalfPlaneSide::Lower => "lower",
    }
}

fn slopes(s: &SlopeInterval) -> Value {
    if s.is_empty() {
        return json!(null);
    }
    json!({ "lo": ext(s.lo), "lo_open": s.lo_open, "hi": ext(s.hi), "hi_open": s.hi_open })
}

pub fn class(c: &SemigroupClass, m: Option<&MinorantAnalysis>) -> Map<String, Value> {
    let mut out = Map::new();
    out.insert("class".into(), json!(c.kind.name()));
    match c.kind {
        ClassKind::Hyperbolic { width } => {
            out.insert("width".into(), json!(width));
        }
        ClassKind::ParabolicPositiveStep { side: s } => {
            out.insert("side".into(), json!(side(s)));
        }
        ClassKind::ParabolicZeroStep => {}
    }
    let container = match c.container {
        Container::Strip { a, b } => json!({ "kind": "strip", "lo": a, "hi": b }),
        Container::HorizontalHalfPlane { a, side: s } => json!({ "kind": "horizontal-half-plane", "edge": a, "side": side(s) }),
        Container::TiltedHalfPlane { m, c } => json!({ "kind": "tilted-half-plane", "slope": m, "intercept": c }),
        Container::None => json!(null),
    };
    out.insert("container".into(), container);
    if let Some(m) = m {
        out.insert(
            "affine_minorant".into(),
            json!({
                "status": tri(m.status),
                "line": m.minorant.map(|(m, c)| json!({ "slope": m, "intercept": c })),
                "certified_slopes": slopes(&m.sufficient),
                "possible_slopes": slopes(&m.necessary),
                "exact": m.exact,
                "reason": m.reason,
            }),
        );
    }
    out
}

pub fn features(f: &FeatureReport) -> Map<String, Value> {
    let mut m = Map::new();
    let ivs = |v: &[(Ext, Ext)]| Value::Array(v.iter().map(|&(a, b)| interval(a, b)).collect());
    m.insert("minus_inf_components".into(), ivs(&f.minus_inf_components));
    m.insert("regular_fixed_points".into(), json!(f.i_r.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>()));
    m.insert("unbounded_components".into(), ivs(&f.i_infinity));
    m.insert("super_repelling".into(), json!(f.i_n));
    m.insert(
        "unbounded_discontinuities".into(),
        json!(f
            .d_u
            .iter()
            .map(|d| json!({ "y": d.y, "left": d.left, "right": d.right, "certainty": d.certainty.as_str() }))
            .collect::<Vec<_>>()),
    );
    m.insert(
        "contact_spikes".into(),
        json!(f.spikes.iter().map(|s| json!({ "c0": s.c0, "q": s.q, "heuristic": s.heuristic })).collect::<Vec<_>>()),
    );
    m.insert(
        "cantor_combs".into(),
        json!(f
            .cantor_combs
            .iter()
            .map(|c| json!({ "j": [c.j.0, c.j.1], "q": c.q, "carrier": [c.carrier.lo(), c.carrier.hi()] }))
            .collect::<Vec<_>>()),
    );
    m.insert("boundary_fixed_points".into(), json!(f.boundary_fixed_points()));
    m.insert("dw_discontinuity".into(), json!(f.dw_discontinuity.as_str()));
    m.insert("exceptional_arc_to_unbounded".into(), tri(f.exceptional_arc_to_unbounded));
    m.insert("configuration".into(), json!(f.configuration));
    m.insert("unknown_at".into(), json!(f.unknown_at));
    m.insert("caveats".into(), json!(f.caveats));
    m
}

pub fn witness(w: &Witness) -> Value {
    match w {
        Witness::CantorComb { j, q } => json!({ "kind": "cantor_comb", "j": [j.0, j.1], "q": q }),
        Witness::ContactSpike { c0, q } => json!({ "kind": "contact_spike", "c0": c0, "q": q }),
        Witness::Regularization { at } => json!({ "kind": "regularization", "y": at }),
        Witness::LiminfSet { intervals } => json!({
            "kind": "liminf_set",
            "intervals": intervals.iter().map(|&(a, b)| interval(a, b)).collect::<Vec<_>>(),
        }),
        Witness::NoAffineMinorant { reason } => json!({ "kind": "no_affine_minorant", "reason": reason }),
        Witness::FrequencyInterval { member, non_member, half_plane_shift } => json!({
            "kind": "frequency_interval",
            "member": member,
            "non_member": non_member,
            "half_plane_shift": half_plane_shift,
        }),
    }
}

fn witnesses(d: &Decision) -> Value {
    Value::Array(d.witnesses.iter().map(witness).collect())
}

pub fn verdict(v: &CompletenessVerdict) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("weak_star_complete".into(), tri(v.weak_star.status));
    m.insert("route".into(), json!(v.weak_star.route));
    m.insert("witnesses".into(), witnesses(&v.weak_star));
    if let Some((p, d)) = &v.p {
        m.insert("p".into(), json!(p));
        m.insert("p_complete".into(), tri(d.status));
        m.insert("p_route".into(), json!(d.route));
        m.insert("p_witnesses".into(), witnesses(d));
    }
    m.insert("configuration".into(), json!(v.features.configuration));
    m.insert("consistent".into(), json!(v.consistent));
    m.insert("caveats".into(), json!(v.caveats));
    m
}

pub fn topological(t: &TopologicalDecision, predicted: Option<usize>, agrees: Tri) -> Value {
    json!({
        "verdict": tri(t.verdict),
        "route": t.route,
        "int_closure_ok": tri(t.int_closure_ok),
        "components": t.components,
        "predicted_components": predicted,
        "agrees_with_psi_side": tri(agrees),
    })
}

pub fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn lambda_infty(l: &LambdaInfty) -> Value {
    json!({
        "contains_i": l.plus_i,
        "contains_minus_i": l.minus_i,
        "certified_slopes": slopes(&l.slopes),
        "possible_slopes": slopes(&l.slopes_upper),
        "exact": l.exact,
    })
}

pub fn membership_counts(samples: &[(C64, Membership)]) -> Value {
    let count = |m: Membership| samples.iter().filter(|s| s.1 == m).count();
    json!({
        "member": count(Membership::Member),
        "non_member": count(Membership::NonMember),
        "inconclusive": count(Membership::Inconclusive),
    })
}

/// Pretty JSON with a trailing newline; key order is fixed by the map type.
pub fn to_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

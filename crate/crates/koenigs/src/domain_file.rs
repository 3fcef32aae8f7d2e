//! Domain description files.
//!
//! ```json
//! { "interval": ["-inf", "inf"],
//!   "pieces": [ { "span": [-1, 0], "kind": "finite_analytic", "expr": "y^2" }, ... ],
//!   "points": [ { "y": 0, "value": 1 } ] }
//! ```
//!
//! Piece kinds: `finite_analytic`, `oscillatory` (needs `limits` at finite
//! ends), `minus_infinity`, `point_spike`, `cantor_comb` and `eta_boundary`.
//! Extended reals are numbers or the strings `"-inf"` / `"inf"`.

use koenigs_core::cantor::CantorSet;
use koenigs_core::domain::{
    Bound, DeclaredLimits, DomainError, EndpointDecl, Envelope, GapProfile, Piece, PieceKind, PiecewiseFunction,
    PointValue,
};
use koenigs_core::expr::Expr;
use koenigs_core::{DefiningFunction, Ext};
use serde_json::{Map, Value};

/// A schema or validation failure located by a JSON pointer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{pointer}: {message}")]
pub struct FileError {
    pub pointer: String,
    pub message: String,
}

fn err<T>(pointer: &str, message: impl Into<String>) -> Result<T, FileError> {
    Err(FileError { pointer: if pointer.is_empty() { "/".into() } else { pointer.into() }, message: message.into() })
}

type R<T> = Result<T, FileError>;

fn object<'a>(v: &'a Value, at: &str) -> R<&'a Map<String, Value>> {
    v.as_object().map_or_else(|| err(at, "expected an object"), Ok)
}

fn field<'a>(o: &'a Map<String, Value>, key: &str, at: &str) -> R<&'a Value> {
    o.get(key).map_or_else(|| err(at, format!("missing field \"{}\"", key)), Ok)
}

fn number(v: &Value, at: &str) -> R<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => err(at, "expected a finite number"),
    }
}

fn ext(v: &Value, at: &str) -> R<Ext> {
    match v {
        Value::String(s) => match s.as_str() {
            "-inf" => Ok(Ext::NegInf),
            "inf" | "+inf" => Ok(Ext::PosInf),
            _ => err(at, "expected a number, \"-inf\" or \"inf\""),
        },
        _ => number(v, at).map(Ext::Fin),
    }
}

fn pair<'a>(v: &'a Value, at: &str) -> R<(&'a Value, &'a Value)> {
    match v.as_array() {
        Some(a) if a.len() == 2 => Ok((&a[0], &a[1])),
        _ => err(at, "expected a two-element array"),
    }
}

fn check_keys(o: &Map<String, Value>, allowed: &[&str], at: &str) -> R<()> {
    for k in o.keys() {
        if !allowed.contains(&k.as_str()) {
            return err(&format!("{}/{}", at, k), "unknown field");
        }
    }
    Ok(())
}

fn expr(o: &Map<String, Value>, at: &str) -> R<Expr> {
    let src = field(o, "expr", at)?;
    let s = src.as_str().map_or_else(|| err(&format!("{}/expr", at), "expected a string"), Ok)?;
    Expr::parse(s).map_err(|e| FileError { pointer: format!("{}/expr", at), message: e.to_string() })
}

fn limits(v: &Value, at: &str) -> R<DeclaredLimits> {
    let o = object(v, at)?;
    check_keys(o, &["liminf", "limsup"], at)?;
    Ok(DeclaredLimits {
        liminf: ext(field(o, "liminf", at)?, &format!("{}/liminf", at))?,
        limsup: ext(field(o, "limsup", at)?, &format!("{}/limsup", at))?,
    })
}

fn endpoint_decl(o: &Map<String, Value>, at: &str) -> R<EndpointDecl> {
    let Some(v) = o.get("limits") else { return Ok(EndpointDecl::default()) };
    let at = format!("{}/limits", at);
    let l = object(v, &at)?;
    check_keys(l, &["lo", "hi"], &at)?;
    let side = |k: &str| l.get(k).map(|v| limits(v, &format!("{}/{}", at, k))).transpose();
    Ok(EndpointDecl { lo: side("lo")?, hi: side("hi")? })
}

fn bound(v: &Value, at: &str) -> R<Bound> {
    let o = object(v, at)?;
    match (o.get("affine"), o.get("log_power")) {
        (Some(a), None) => {
            let at = format!("{}/affine", at);
            let a = object(a, &at)?;
            check_keys(a, &["m", "c"], &at)?;
            Ok(Bound::Affine { m: number(field(a, "m", &at)?, &format!("{}/m", at))?, c: number(field(a, "c", &at)?, &format!("{}/c", at))? })
        }
        (None, Some(l)) => {
            let at = format!("{}/log_power", at);
            let l = object(l, &at)?;
            check_keys(l, &["c", "k", "a"], &at)?;
            let g = |k: &str| number(field(l, k, &at)?, &format!("{}/{}", at, k));
            Ok(Bound::LogPower { c: g("c")?, k: g("k")?, a: g("a")? })
        }
        _ => err(at, "expected exactly one of \"affine\" or \"log_power\""),
    }
}

fn envelope(o: &Map<String, Value>, at: &str) -> R<Option<Envelope>> {
    let Some(v) = o.get("envelope") else { return Ok(None) };
    let at = format!("{}/envelope", at);
    let e = object(v, &at)?;
    check_keys(e, &["lower", "upper", "from"], &at)?;
    let side = |k: &str| e.get(k).map(|v| bound(v, &format!("{}/{}", at, k))).transpose();
    let from = e.get("from").map(|v| number(v, &format!("{}/from", at))).transpose()?.unwrap_or(0.0);
    Ok(Some(Envelope { lower: side("lower")?, upper: side("upper")?, from }))
}

fn carrier(v: &Value, lo: Ext, hi: Ext, at: &str, span_at: &str) -> R<CantorSet> {
    let (Ext::Fin(a), Ext::Fin(b)) = (lo, hi) else {
        return err(span_at, "a cantor_comb piece needs a bounded span");
    };
    let o = object(v, at)?;
    check_keys(o, &["base", "keep", "depth"], at)?;
    let int = |v: &Value, at: &str| v.as_u64().filter(|&x| x <= u32::MAX as u64).map_or_else(|| err(at, "expected a non-negative integer"), |x| Ok(x as u32));
    let base = int(field(o, "base", at)?, &format!("{}/base", at))?;
    let keep_at = format!("{}/keep", at);
    let keep = field(o, "keep", at)?.as_array().map_or_else(|| err(&keep_at, "expected an array of digits"), Ok)?;
    let digits = keep.iter().enumerate().map(|(i, d)| int(d, &format!("{}/{}", keep_at, i))).collect::<R<Vec<u32>>>()?;
    let depth = o.get("depth").map(|d| int(d, &format!("{}/depth", at))).transpose()?.unwrap_or(4096);
    CantorSet::new(a, b, base, &digits, depth).map_err(|e| FileError { pointer: at.into(), message: e.to_string() })
}

fn piece(v: &Value, at: &str) -> R<Piece> {
    let o = object(v, at)?;
    let span_at = format!("{}/span", at);
    let (a, b) = pair(field(o, "span", at)?, &span_at)?;
    let (lo, hi) = (ext(a, &format!("{}/0", span_at))?, ext(b, &format!("{}/1", span_at))?);
    let kind_v = field(o, "kind", at)?;
    let kind = kind_v.as_str().map_or_else(|| err(&format!("{}/kind", at), "expected a string"), Ok)?;
    let common = ["span", "kind", "limits", "envelope"];
    let keys = |extra: &[&str]| {
        let mut all = common.to_vec();
        all.extend_from_slice(extra);
        check_keys(o, &all, at)
    };
    let num = |k: &str| number(field(o, k, at)?, &format!("{}/{}", at, k));
    let extv = |k: &str| ext(field(o, k, at)?, &format!("{}/{}", at, k));
    let kind = match kind {
        "finite_analytic" | "oscillatory" => {
            keys(&["expr"])?;
            PieceKind::Analytic { expr: expr(o, at)?, oscillatory: kind == "oscillatory" }
        }
        "minus_infinity" => {
            keys(&[])?;
            PieceKind::MinusInfinity
        }
        "point_spike" => {
            keys(&["c0", "value", "background"])?;
            PieceKind::PointSpike { c0: num("c0")?, value: extv("value")?, background: extv("background")? }
        }
        "cantor_comb" => {
            keys(&["carrier", "on_value", "off_bound", "gap_profile"])?;
            let off = num("off_bound")?;
            let gap = match o.get("gap_profile").map(|g| g.as_str()) {
                None | Some(Some("constant")) => GapProfile::Constant(off),
                Some(Some("sin_inverse_gap")) => GapProfile::SinInverseGap { offset: off },
                _ => return err(&format!("{}/gap_profile", at), "expected \"constant\" or \"sin_inverse_gap\""),
            };
            let c = carrier(field(o, "carrier", at)?, lo, hi, &format!("{}/carrier", at), &span_at)?;
            PieceKind::Cantor { carrier: c, on_value: num("on_value")?, gap }
        }
        "eta_boundary" => {
            keys(&["a"])?;
            PieceKind::EtaBoundary { a: num("a")? }
        }
        _ => {
            return err(
                &format!("{}/kind", at),
                "unknown kind; expected finite_analytic, oscillatory, minus_infinity, point_spike, cantor_comb or eta_boundary",
            )
        }
    };
    let mut p = Piece::new(lo, hi, kind);
    p.limits = endpoint_decl(o, at)?;
    p.envelope = envelope(o, at)?;
    Ok(p)
}

fn locate(e: &DomainError, pieces: usize) -> String {
    use DomainError::*;
    let index = match e {
        Tiling { index } | BadLimits { index } | MissingLimits { index } | Evaluator { index, .. } => Some(*index),
        SpikeOutsideSpan { index } | CantorSpan { index } | Cantor { index, .. } | BadValue { index } => Some(*index),
        BadEtaParameter { index } | EnvelopeViolation { index, .. } => Some(*index),
        EmptyInterval => return "/interval".into(),
        NoPieces | WholePlane => return "/pieces".into(),
        StrayPoint { .. } | MissingPointValue { .. } | UscViolation { .. } => return "/points".into(),
    };
    match index {
        Some(i) if i < pieces => format!("/pieces/{}", i),
        _ => "/pieces".into(),
    }
}

/// Parses the raw description without validating it.
pub fn parse_value(v: &Value) -> R<PiecewiseFunction> {
    let o = object(v, "")?;
    check_keys(o, &["interval", "pieces", "points", "name", "description"], "")?;
    let (a, b) = pair(field(o, "interval", "")?, "/interval")?;
    let (lo, hi) = (ext(a, "/interval/0")?, ext(b, "/interval/1")?);
    let ps = field(o, "pieces", "")?.as_array().map_or_else(|| err("/pieces", "expected an array"), Ok)?;
    let pieces = ps.iter().enumerate().map(|(i, p)| piece(p, &format!("/pieces/{}", i))).collect::<R<Vec<_>>>()?;
    let mut points = Vec::new();
    if let Some(pv) = o.get("points") {
        let arr = pv.as_array().map_or_else(|| err("/points", "expected an array"), Ok)?;
        for (i, p) in arr.iter().enumerate() {
            let at = format!("/points/{}", i);
            let po = object(p, &at)?;
            check_keys(po, &["y", "value"], &at)?;
            points.push(PointValue { y: number(field(po, "y", &at)?, &format!("{}/y", at))?, value: ext(field(po, "value", &at)?, &format!("{}/value", at))? });
        }
    }
    Ok(PiecewiseFunction { lo, hi, pieces, points })
}

pub fn from_value(v: &Value) -> R<DefiningFunction> {
    let f = parse_value(v)?;
    let n = f.pieces.len();
    DefiningFunction::new(f).map_err(|e| FileError { pointer: locate(&e, n), message: e.to_string() })
}

pub fn from_str(s: &str) -> R<DefiningFunction> {
    let v: Value = serde_json::from_str(s).map_err(|e| FileError { pointer: "/".into(), message: format!("invalid JSON: {}", e) })?;
    from_value(&v)
}

/// Optional display name stored in the file.
pub fn name_of(s: &str) -> Option<String> {
    let v: Value = serde_json::from_str(s).ok()?;
    v.get("name")?.as_str().map(str::to_owned)
}

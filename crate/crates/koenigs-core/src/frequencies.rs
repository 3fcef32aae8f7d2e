//! Frequencies `lambda` with `exp(lambda z)` in `H^p` or `H^inf`.
//!
//! `Lambda_inf` is described exactly from the interval `I` and the admissible
//! affine-minorant slopes. Membership in `H^p` is tested numerically on a few
//! canonical domains by pulling back to the disc and watching the integral
//! means `M(r) = (1/2pi) int |exp(lambda h(r e^{it}))|^p dt` as `r -> 1`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::classifier::{affine_minorant, SlopeInterval};
use crate::curve::polyline_is_simple;
use crate::domain::{DefiningFunction, PieceKind};
use crate::ext::{Ext, Tri};

/// Exact description of `Lambda_inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaInfty {
    /// `i t` for `t > 0` (needs `I` bounded below).
    pub plus_i: bool,
    /// `i t` for `t < 0` (needs `I` bounded above).
    pub minus_i: bool,
    /// Slopes `m` with `-s(1 + i m)` certified admissible.
    pub slopes: SlopeInterval,
    /// Slopes not excluded.
    pub slopes_upper: SlopeInterval,
    /// False when the slope set is only bracketed.
    pub exact: bool,
}

impl LambdaInfty {
    pub fn contains(&self, l: C64) -> Tri {
        if l.re == 0.0 && l.im == 0.0 {
            return Tri::Yes;
        }
        if l.re > 0.0 {
            return Tri::No;
        }
        if l.re == 0.0 {
            return Tri::from_bool(if l.im > 0.0 { self.plus_i } else { self.minus_i });
        }
        let m = l.im / l.re;
        if self.slopes.contains(m) {
            Tri::Yes
        } else if !self.slopes_upper.contains(m) {
            Tri::No
        } else {
            Tri::Unknown
        }
    }
}

pub fn lambda_infty(psi: &DefiningFunction) -> LambdaInfty {
    let a = affine_minorant(psi);
    LambdaInfty {
        plus_i: psi.lo().is_finite(),
        minus_i: psi.hi().is_finite(),
        slopes: a.sufficient,
        slopes_upper: a.necessary,
        exact: a.exact || a.sufficient == a.necessary,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CanonicalDomain {
    HalfPlaneRight,
    /// `{Im z > 0}`.
    HorizontalHalfPlaneUpper,
    /// `{|Im z| < pi/2}`.
    StripWidthPi,
    /// `eta_a(right half-plane) + b` with `0 < a < 1`.
    LogDomain { a: f64, b: f64 },
    /// `eta_a(right half-plane)` with `0 < a <= 1`.
    EtaDomain { a: f64 },
}

/// A point `(1 - delta) e^{i theta}` of the disc, stored through its exact
/// angular offsets from `theta = 0` and `theta = pi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscPoint {
    pub delta: f64,
    pub phi0: f64,
    pub phipi: f64,
}

impl DiscPoint {
    pub fn from_theta(delta: f64, theta: f64) -> DiscPoint {
        let t = theta.rem_euclid(2.0 * PI);
        let phi0 = if t > PI { t - 2.0 * PI } else { t };
        DiscPoint { delta, phi0, phipi: t - PI }
    }

    fn offset(&self, phi: f64) -> C64 {
        // 1 - (1 - delta) e^{i phi}, without cancellation near phi = 0.
        let r = 1.0 - self.delta;
        let s = (0.5 * phi).sin();
        C64::new(self.delta + 2.0 * r * s * s, -r * phi.sin())
    }

    /// `1 - w`
    pub fn one_minus(&self) -> C64 {
        self.offset(self.phi0)
    }

    /// `1 + w`
    pub fn one_plus(&self) -> C64 {
        self.offset(self.phipi)
    }
}

fn eta_c(a: f64, w: C64) -> C64 {
    w - (w + 3.0).ln().powf(a)
}

impl CanonicalDomain {
    pub fn name(&self) -> &'static str {
        match self {
            CanonicalDomain::HalfPlaneRight => "half-plane-right",
            CanonicalDomain::HorizontalHalfPlaneUpper => "half-plane-upper",
            CanonicalDomain::StripWidthPi => "strip-width-pi",
            CanonicalDomain::LogDomain { .. } => "log-domain",
            CanonicalDomain::EtaDomain { .. } => "eta-domain",
        }
    }

    pub fn validate(&self) -> Result<(), &'static str> {
        match *self {
            CanonicalDomain::LogDomain { a, b } if !(a > 0.0 && a < 1.0 && b.is_finite()) => {
                Err("log domains need 0 < a < 1 and finite b")
            }
            CanonicalDomain::EtaDomain { a } if !(a > 0.0 && a <= 1.0) => Err("eta domains need 0 < a <= 1"),
            _ => Ok(()),
        }
    }

    /// Angles where the transplant is unbounded.
    pub fn singular_angles(&self) -> &'static [f64] {
        match self {
            CanonicalDomain::StripWidthPi => &[0.0, PI],
            _ => &[0.0],
        }
    }

    /// The conformal map from the disc onto the domain.
    pub fn transplant(&self, w: DiscPoint) -> C64 {
        let u = w.one_minus();
        let v = w.one_plus();
        let cayley = v / u;
        match *self {
            CanonicalDomain::HalfPlaneRight => cayley,
            CanonicalDomain::HorizontalHalfPlaneUpper => C64::i() * cayley,
            CanonicalDomain::StripWidthPi => cayley.ln(),
            CanonicalDomain::EtaDomain { a } => eta_c(a, cayley),
            CanonicalDomain::LogDomain { a, b } => eta_c(a, cayley) + b,
        }
    }

    /// Boundary image at angle `theta` (not a singular angle).
    pub fn boundary(&self, theta: f64) -> C64 {
        self.transplant(DiscPoint::from_theta(0.0, theta))
    }

    /// The boundary parametrization is injective on `n` generic angles.
    pub fn boundary_injective(&self, n: usize) -> bool {
        let sing = self.singular_angles();
        let mut arcs: Vec<(f64, f64)> = Vec::new();
        for (k, &s) in sing.iter().enumerate() {
            let e = sing.get(k + 1).copied().unwrap_or(2.0 * PI);
            arcs.push((s, e));
        }
        let mut all = Vec::new();
        for &(s, e) in &arcs {
            let mut pts = Vec::with_capacity(n);
            for k in 0..n {
                // Logit spacing reaches far out along the unbounded boundary.
                let x = (k as f64 + 0.5) / n as f64;
                let g = x.powi(3) / (x.powi(3) + (1.0 - x).powi(3));
                pts.push(self.boundary(s + (e - s) * g));
            }
            if !polyline_is_simple(&pts, false) {
                return false;
            }
            all.push(pts);
        }
        // Distinct arcs must not cross each other.
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                for a in all[i].windows(2) {
                    for b in all[j].windows(2) {
                        if crate::curve::segments_intersect(a[0], a[1], b[0], b[1]) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Recognises the canonical domains (up to translation) among defining functions.
pub fn canonical_of(psi: &DefiningFunction) -> Option<CanonicalDomain> {
    let [p] = psi.pieces() else { return None };
    match (&p.kind, psi.lo(), psi.hi()) {
        (PieceKind::Analytic { expr, .. }, Ext::NegInf, Ext::PosInf) if expr.is_constant() => {
            Some(CanonicalDomain::HalfPlaneRight)
        }
        (PieceKind::MinusInfinity, Ext::Fin(_), Ext::PosInf) => Some(CanonicalDomain::HorizontalHalfPlaneUpper),
        (PieceKind::MinusInfinity, Ext::Fin(a), Ext::Fin(b)) if ((b - a) - PI).abs() < 1e-12 => {
            Some(CanonicalDomain::StripWidthPi)
        }
        (PieceKind::EtaBoundary { a }, Ext::NegInf, Ext::PosInf) => Some(CanonicalDomain::EtaDomain { a: *a }),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Membership {
    Member,
    NonMember,
    Inconclusive,
}

impl Membership {
    pub fn as_str(&self) -> &'static str {
        match self {
            Membership::Member => "member",
            Membership::NonMember => "non-member",
            Membership::Inconclusive => "inconclusive",
        }
    }

    pub fn is_definite(&self) -> bool {
        *self != Membership::Inconclusive
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardyConfig {
    /// Nodes per quarter circle, as a power of two.
    pub nodes_log2: u32,
    /// Deepest radius `1 - 2^-max_level`.
    pub max_level: u32,
}

impl Default for HardyConfig {
    fn default() -> Self {
        HardyConfig { nodes_log2: 13, max_level: 40 }
    }
}

struct Node {
    phi0: f64,
    phipi: f64,
    log_weight: f64,
}

/// Quarter-circle panels, each graded towards both ends with
/// `g(s) = s^6 / (s^6 + (1-s)^6)`.
fn nodes(log2: u32) -> Vec<Node> {
    let n = 1usize << log2;
    let q = 6;
    let mut out = Vec::with_capacity(4 * n);
    for panel in 0..4 {
        for k in 0..n {
            let s = (k as f64 + 0.5) / n as f64;
            let (a, b) = (s.powi(q), (1.0 - s).powi(q));
            let g = a / (a + b);
            let from_start = FRAC_PI_2 * g;
            let from_end = FRAC_PI_2 * (b / (a + b));
            let dg = q as f64 * s.powi(q - 1) * (1.0 - s).powi(q - 1) / ((a + b) * (a + b));
            let w = FRAC_PI_2 * dg / n as f64 / (2.0 * PI);
            let (phi0, phipi) = match panel {
                0 => (from_start, from_start - PI),
                1 => (PI - from_end, -from_end),
                2 => (-(PI - from_start), from_start),
                _ => (-from_end, PI - from_end),
            };
            out.push(Node { phi0, phipi, log_weight: w.ln() });
        }
    }
    out
}

fn log_mean(nodes: &[Node], terms: &mut Vec<f64>, lambda: C64, dom: CanonicalDomain, p: f64, delta: f64) -> f64 {
    terms.clear();
    let mut top = f64::NEG_INFINITY;
    for nd in nodes {
        let h = dom.transplant(DiscPoint { delta, phi0: nd.phi0, phipi: nd.phipi });
        let t = nd.log_weight + p * (lambda * h).re;
        if !t.is_nan() {
            top = top.max(t);
            terms.push(t);
        }
    }
    if !top.is_finite() {
        return top;
    }
    let sum: f64 = terms.iter().map(|t| (t - top).exp()).sum();
    top + sum.ln()
}

/// `log M(1 - 2^-k)` for `k = 1..=max_level`.
pub fn log_integral_means(lambda: C64, dom: CanonicalDomain, p: f64, cfg: HardyConfig) -> Vec<f64> {
    let nodes = nodes(cfg.nodes_log2);
    let mut terms = Vec::with_capacity(nodes.len());
    (1..=cfg.max_level).map(|k| log_mean(&nodes, &mut terms, lambda, dom, p, 2f64.powi(-(k as i32)))).collect()
}

const CAUCHY_TOL: f64 = 1e-6;
const DIVERGENCE: f64 = 1e12;

/// Classifies the latest entry of a sequence of log integral means, or
/// returns `None` when more levels are needed.
fn decide(logs: &[f64]) -> Option<Membership> {
    let k = logs.len().checked_sub(1)?;
    if k < 6 {
        return None;
    }
    if logs[k].is_infinite() && logs[k] > 0.0 {
        return Some(Membership::NonMember);
    }
    let m = |j: usize| logs[j].exp();
    let d: Vec<f64> = (k - 4..=k).map(|j| m(j) - m(j - 1)).collect();
    let rho: Vec<f64> = d.windows(2).map(|w| w[1] / w[0]).collect();
    let rising = d.iter().all(|&x| x > 0.0);
    // Growth whose ratio is slipping may still be sub-power and convergent.
    let steady_growth = rising && rho[3] >= rho[0] - 0.01;
    let climbing = (k - 3..=k).all(|j| logs[j] > logs[j - 1]);
    if logs[k] > DIVERGENCE.ln() && climbing && (steady_growth || logs[k] > 700.0) && (k >= 12 || logs[k] > 700.0) {
        // Past 700 the increments overflow; judge the trend on the logs instead.
        if logs[k] <= 700.0 || logs[k] - logs[k - 1] >= logs[k - 3] - logs[k - 4] - 1e-9 {
            return Some(Membership::NonMember);
        }
    }
    if logs[k] > 700.0 {
        return Some(Membership::Inconclusive);
    }
    if (k - 2..=k).all(|j| (m(j) - m(j - 1)).abs() <= CAUCHY_TOL * m(j)) {
        return Some(Membership::Member);
    }
    if rising {
        let (lo, hi) = rho.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| (a.min(r), b.max(r)));
        if hi <= 0.98 && hi - lo < 0.05 {
            return Some(Membership::Member);
        }
        if lo >= 1.02 && steady_growth && k >= 12 {
            return Some(Membership::NonMember);
        }
    }
    None
}

/// Classifies a full sequence of log integral means.
pub fn classify_means(logs: &[f64]) -> Membership {
    (1..=logs.len()).find_map(|n| decide(&logs[..n])).unwrap_or(Membership::Inconclusive)
}

pub fn hardy_membership_with(lambda: C64, dom: CanonicalDomain, p: f64, cfg: HardyConfig) -> Membership {
    if lambda == C64::new(0.0, 0.0) {
        return Membership::Member;
    }
    if !(p >= 1.0) || dom.validate().is_err() {
        return Membership::Inconclusive;
    }
    let nodes = nodes(cfg.nodes_log2);
    let mut terms = Vec::with_capacity(nodes.len());
    let mut logs = Vec::new();
    for k in 1..=cfg.max_level {
        logs.push(log_mean(&nodes, &mut terms, lambda, dom, p, 2f64.powi(-(k as i32))));
        if let Some(m) = decide(&logs) {
            return m;
        }
    }
    Membership::Inconclusive
}

pub fn hardy_membership(lambda: C64, dom: CanonicalDomain, p: f64) -> Membership {
    hardy_membership_with(lambda, dom, p, HardyConfig::default())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingReport {
    pub checked: usize,
    pub skipped: usize,
    pub mismatches: Vec<C64>,
}

/// Compares the status of `lambda` in `Lambda_p` with `(p/q) lambda` in `Lambda_q`.
pub fn scaling_law_check(dom: CanonicalDomain, p: f64, q: f64, grid: &[C64]) -> ScalingReport {
    let mut r = ScalingReport { checked: 0, skipped: 0, mismatches: Vec::new() };
    for &l in grid {
        let a = hardy_membership(l, dom, p);
        if !a.is_definite() {
            r.skipped += 1;
            continue;
        }
        let b = hardy_membership(l * (p / q), dom, q);
        if !b.is_definite() {
            r.skipped += 1;
            continue;
        }
        r.checked += 1;
        if a != b {
            r.mismatches.push(l);
        }
    }
    r
}

/// Status of every grid point.
pub fn sample_memberships(dom: CanonicalDomain, p: f64, grid: &[C64]) -> Vec<(C64, Membership)> {
    grid.iter().map(|&l| (l, hardy_membership(l, dom, p))).collect()
}

/// Pairs of sampled members whose midpoint was also sampled and is a definite
/// non-member. Only existing samples are consulted.
pub fn convexity_violations(samples: &[(C64, Membership)]) -> Vec<(C64, C64)> {
    let key = |z: C64| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64);
    let status: BTreeMap<(i64, i64), Membership> = samples.iter().map(|&(z, m)| (key(z), m)).collect();
    let members: Vec<C64> = samples.iter().filter(|s| s.1 == Membership::Member).map(|s| s.0).collect();
    let mut out = Vec::new();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let mid = 0.5 * (members[i] + members[j]);
            if status.get(&key(mid)) == Some(&Membership::NonMember) {
                out.push((members[i], members[j]));
            }
        }
    }
    out
}

/// A uniform `n x n` grid of frequencies over `[re0, re1] x [im0, im1]`.
pub fn frequency_grid(re: (f64, f64), im: (f64, f64), n: usize) -> Vec<C64> {
    let step = |a: f64, b: f64, k: usize| if n > 1 { a + (b - a) * k as f64 / (n - 1) as f64 } else { 0.5 * (a + b) };
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            out.push(C64::new(step(re.0, re.1, k), step(im.0, im.1, i)));
        }
    }
    out
}

/// Every definite member of `Lambda_p(outer)` must be a member of `Lambda_p(inner)`
/// when `inner` is contained in `outer`. Returns the offending frequencies.
pub fn domain_monotonicity_check(inner: CanonicalDomain, outer: CanonicalDomain, p: f64, grid: &[C64]) -> Vec<C64> {
    grid.iter()
        .copied()
        .filter(|&l| {
            hardy_membership(l, outer, p) == Membership::Member && hardy_membership(l, inner, p) == Membership::NonMember
        })
        .collect()
}

/// Transition point on one side of the real axis, bracketed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    /// Estimate of `c` where the edge sits at `c / p`.
    pub estimate: f64,
    /// `[last member, first non-member]` along the axis, in units of `lambda`.
    pub bracket: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BandEstimate {
    pub p: f64,
    pub c1: Edge,
    pub c2: Edge,
    /// Sampled points of the imaginary axis were all members.
    pub imaginary_axis_members: bool,
}

fn edge(dom: CanonicalDomain, p: f64, dir: f64) -> Edge {
    let status = |x: f64| hardy_membership(C64::new(dir * x, 0.0), dom, p);
    let mut lo = 0.0;
    let mut hi = 1.0 / p;
    for _ in 0..6 {
        match status(hi) {
            Membership::NonMember => break,
            Membership::Member => lo = hi,
            Membership::Inconclusive => {}
        }
        hi *= 2.0;
    }
    for _ in 0..14 {
        if hi - lo < 1e-3 / p {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match status(mid) {
            Membership::Member => lo = mid,
            Membership::NonMember => hi = mid,
            Membership::Inconclusive => {
                // Shrink from both ends; stop when neither side moves.
                let a = 0.5 * (lo + mid);
                let b = 0.5 * (mid + hi);
                let mut moved = false;
                if status(a) == Membership::Member {
                    lo = a;
                    moved = true;
                }
                if status(b) == Membership::NonMember {
                    hi = b;
                    moved = true;
                }
                if !moved {
                    break;
                }
            }
        }
    }
    Edge { estimate: p * 0.5 * (lo + hi), bracket: (lo, hi) }
}

/// Locates `-c1/p < Re lambda < c2/p` on the strip by bisection along the real axis.
pub fn strip_band(p: f64) -> BandEstimate {
    let dom = CanonicalDomain::StripWidthPi;
    let axis = [1.0, -1.0, 5.0, -5.0].iter().all(|&t| hardy_membership(C64::new(0.0, t), dom, p) == Membership::Member);
    BandEstimate { p, c1: edge(dom, p, -1.0), c2: edge(dom, p, 1.0), imaginary_axis_members: axis }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn lambda_infty_examples() {
        let s = lambda_infty(&catalog::full_strip());
        assert_eq!(s.contains(C64::new(0.0, 3.0)), Tri::Yes);
        assert_eq!(s.contains(C64::new(0.0, -3.0)), Tri::Yes);
        assert_eq!(s.contains(C64::new(-1.0, 0.0)), Tri::No);
        let h = lambda_infty(&catalog::half_plane());
        assert_eq!(h.contains(C64::new(-2.0, 0.0)), Tri::Yes);
        assert_eq!(h.contains(C64::new(-2.0, 0.1)), Tri::No);
        assert_eq!(h.contains(C64::new(0.0, 1.0)), Tri::No);
        let u = lambda_infty(&catalog::upper_half_plane());
        assert_eq!(u.contains(C64::new(0.0, 2.0)), Tri::Yes);
        assert_eq!(u.contains(C64::new(0.0, -2.0)), Tri::No);
        assert_eq!(u.contains(C64::new(-1.0, 0.0)), Tri::No);
        let q = lambda_infty(&catalog::strip());
        assert_eq!(q.contains(C64::new(-1.0, 7.0)), Tri::Yes);
    }

    #[test]
    fn disc_offsets_are_exact() {
        let w = DiscPoint { delta: 0.0, phi0: 1e-20, phipi: 1e-20 - PI };
        assert!(w.one_minus().im < 0.0 && w.one_minus().norm() < 2e-20);
        let z = DiscPoint::from_theta(0.5, 0.3);
        let direct = C64::new(1.0, 0.0) - C64::from_polar(0.5, 0.3);
        assert!((z.one_minus() - direct).norm() < 1e-15);
        assert!((z.one_plus() - (2.0 - direct)).norm() < 1e-15);
    }

    #[test]
    fn transplants_land_in_their_domains() {
        for &(d, t) in &[(0.3, 0.7), (1e-6, 3.0), (0.9, -2.0)] {
            let w = DiscPoint::from_theta(d, t);
            assert!(CanonicalDomain::HalfPlaneRight.transplant(w).re > 0.0);
            assert!(CanonicalDomain::HorizontalHalfPlaneUpper.transplant(w).im > 0.0);
            assert!(CanonicalDomain::StripWidthPi.transplant(w).im.abs() < FRAC_PI_2);
            let e = CanonicalDomain::EtaDomain { a: 1.0 }.transplant(w);
            assert!(e.re > crate::eta::psi(1.0, e.im));
        }
        assert!(CanonicalDomain::EtaDomain { a: 0.5 }.boundary_injective(400));
        assert!(CanonicalDomain::StripWidthPi.boundary_injective(400));
    }

    #[test]
    fn zero_is_always_a_member() {
        for d in [CanonicalDomain::HalfPlaneRight, CanonicalDomain::StripWidthPi, CanonicalDomain::EtaDomain { a: 1.0 }] {
            assert_eq!(hardy_membership(C64::new(0.0, 0.0), d, 3.0), Membership::Member);
        }
    }

    #[test]
    fn half_plane_members() {
        let d = CanonicalDomain::HalfPlaneRight;
        assert_eq!(hardy_membership(C64::new(-1.0, 0.0), d, 2.0), Membership::Member);
        assert_eq!(hardy_membership(C64::new(1.0, 0.0), d, 2.0), Membership::NonMember);
        assert_eq!(hardy_membership(C64::new(0.0, 1.0), d, 2.0), Membership::NonMember);
    }
}

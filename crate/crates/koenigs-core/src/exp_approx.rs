//! Exponential sums: truncated Laplace transforms, measure discretization,
//! least-squares frequency fits and the `alpha` map onto bounded domains.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::curve::{polyline_is_simple, winding_number};
use crate::frequencies::{CanonicalDomain, DiscPoint};

#[derive(Clone, Debug, PartialEq)]
pub enum ApproxError {
    Pole,
    Quadrature { cell: usize },
    /// The regularized Gram matrix is still not positive definite.
    Conditioning,
    InadmissibleFrequency(C64),
    BadParameter(&'static str),
}

impl fmt::Display for ApproxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApproxError::Pole => write!(f, "evaluation at a pole"),
            ApproxError::Quadrature { cell } => write!(f, "quadrature did not converge on cell {}", cell),
            ApproxError::Conditioning => write!(f, "Gram matrix is numerically singular even after regularization"),
            ApproxError::InadmissibleFrequency(l) => write!(f, "frequency {} is not admissible for this family", l),
            ApproxError::BadParameter(s) => write!(f, "{}", s),
        }
    }
}

impl core::error::Error for ApproxError {}

/// Which exponentials a sum is built from. Frequencies are always stored as
/// the multiplier `lambda` in `e^{lambda z}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `lambda <= 0` real, for the right half-plane and log domains.
    HalfPlane,
    /// `lambda = i t`, `t` real, for the horizontal strip.
    Strip,
    /// `lambda = -s`, `s >= 0`, the Laplace side.
    Laplace,
}

impl Family {
    pub fn admits(&self, l: C64) -> bool {
        match self {
            Family::HalfPlane | Family::Laplace => l.im == 0.0 && l.re <= 0.0,
            Family::Strip => l.re == 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::HalfPlane => "half-plane",
            Family::Strip => "strip",
            Family::Laplace => "laplace",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpSum {
    family: Family,
    terms: Vec<(C64, C64)>,
}

impl ExpSum {
    pub fn new(family: Family, terms: Vec<(C64, C64)>) -> Result<ExpSum, ApproxError> {
        if let Some(&(_, l)) = terms.iter().find(|(_, l)| !family.admits(*l)) {
            return Err(ApproxError::InadmissibleFrequency(l));
        }
        Ok(ExpSum { family, terms })
    }

    pub fn empty(family: Family) -> ExpSum {
        ExpSum { family, terms: Vec::new() }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// `(coefficient, frequency)` pairs.
    pub fn terms(&self) -> &[(C64, C64)] {
        &self.terms
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.terms.iter().map(|&(c, l)| c * (l * z).exp()).sum()
    }
}

/// `int_0^inf e^{itz} e^{-t beta} dt = 1 / (beta - iz)`.
pub fn phi_beta(beta: C64, z: C64) -> Result<C64, ApproxError> {
    let d = beta - C64::i() * z;
    if d == C64::new(0.0, 0.0) {
        return Err(ApproxError::Pole);
    }
    Ok(d.inv())
}

/// `int_0^R e^{itz} e^{-t beta} dt`.
pub fn phi_beta_r(beta: C64, r: f64, z: C64) -> C64 {
    let k = C64::i() * z - beta;
    if k.norm() < 1e-300 {
        return C64::new(r, 0.0);
    }
    // expm1 keeps small R accurate.
    let e = (k * r).exp() - 1.0;
    let e = if (k * r).norm() < 1e-5 { k * r * (1.0 + k * r * 0.5) } else { e };
    e / k
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtomicMeasure {
    /// `(location, weight)`, sorted by location.
    pub atoms: Vec<(f64, C64)>,
    pub support_bound: f64,
}

impl AtomicMeasure {
    pub fn new(mut atoms: Vec<(f64, C64)>, support_bound: f64) -> Result<AtomicMeasure, ApproxError> {
        if atoms.iter().any(|&(t, w)| !(t >= 0.0 && t <= support_bound) || !w.re.is_finite() || !w.im.is_finite()) {
            return Err(ApproxError::BadParameter("atoms must lie in [0, R] with finite weights"));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(AtomicMeasure { atoms, support_bound })
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.1.norm()).sum()
    }

    pub fn mass(&self) -> C64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// `sum w_j e^{-t_j z}`.
    pub fn laplace(&self, z: C64) -> C64 {
        self.atoms.iter().map(|&(t, w)| w * (-z * t).exp()).sum()
    }

    pub fn to_laplace_sum(&self) -> ExpSum {
        ExpSum { family: Family::Laplace, terms: self.atoms.iter().map(|&(t, w)| (w, C64::new(-t, 0.0))).collect() }
    }

    /// `sum w_j e^{i t_j z}`.
    pub fn to_strip_sum(&self) -> ExpSum {
        ExpSum { family: Family::Strip, terms: self.atoms.iter().map(|&(t, w)| (w, C64::new(0.0, t))).collect() }
    }

    /// Convolution; coinciding locations (to a relative 1e-12) are merged.
    pub fn convolve(&self, other: &AtomicMeasure) -> AtomicMeasure {
        let mut atoms = Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for &(t, w) in &self.atoms {
            for &(s, v) in &other.atoms {
                atoms.push((t + s, w * v));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, C64)> = Vec::with_capacity(atoms.len());
        for (t, w) in atoms {
            match merged.last_mut() {
                Some(last) if (t - last.0).abs() <= 1e-12 * (1.0 + t.abs()) => last.1 += w,
                _ => merged.push((t, w)),
            }
        }
        AtomicMeasure { atoms: merged, support_bound: self.support_bound + other.support_bound }
    }

    /// Bound for `sup |sum w_j e^{i t_j z}|` over the closed strip `|Im z| <= pi/2`.
    pub fn strip_sup_bound(&self) -> f64 {
        self.atoms.iter().map(|&(t, w)| w.norm() * (FRAC_PI_2 * t).exp()).sum()
    }
}

fn simpson(f: &dyn Fn(f64) -> C64, a: f64, fa: C64, b: f64, fb: C64) -> (C64, f64, C64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    ((fa + fm * 4.0 + fb) * ((b - a) / 6.0), m, fm)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(f: &dyn Fn(f64) -> C64, a: f64, fa: C64, b: f64, fb: C64, m: f64, fm: C64, whole: C64, tol: f64, depth: u32) -> Option<C64> {
    let (left, lm, flm) = simpson(f, a, fa, m, fm);
    let (right, rm, frm) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if !delta.re.is_finite() || !delta.im.is_finite() {
        return None;
    }
    if delta.norm() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    Some(
        adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)?
            + adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)?,
    )
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> C64, a: f64, b: f64, tol: f64) -> Option<C64> {
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    adaptive(f, a, fa, b, fb, m, fm, whole, tol, 40)
}

/// Cell masses of `density` on `[(j-1)R/n, jR/n)`, placed at `jR/n`.
pub fn discretize_measure(density: &dyn Fn(f64) -> C64, r: f64, n: usize) -> Result<AtomicMeasure, ApproxError> {
    if !(r > 0.0 && r.is_finite()) || n == 0 {
        return Err(ApproxError::BadParameter("need R > 0 and n >= 1"));
    }
    let h = r / n as f64;
    let mut atoms = Vec::with_capacity(n);
    for j in 1..=n {
        let (a, b) = ((j - 1) as f64 * h, j as f64 * h);
        let w = integrate(density, a, b, 1e-14 * h).ok_or(ApproxError::Quadrature { cell: j })?;
        atoms.push((b.min(r), w));
    }
    AtomicMeasure::new(atoms, r)
}

/// Ten fixed points of the closed strip `|Im z| <= pi/2`, edges included.
pub fn strip_probe_points() -> Vec<C64> {
    let xs = [-3.0, -1.0, 0.0, 0.5, 2.0];
    let ys = [-FRAC_PI_2, -0.7, 0.0, 0.9, FRAC_PI_2];
    (0..10).map(|k| C64::new(xs[k % 5], ys[(k * 3 + k / 5) % 5])).collect()
}

/// A rectangular grid over `[x0, x1] x [-pi/2, pi/2]`.
pub fn strip_grid(x0: f64, x1: f64, nx: usize, ny: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let x = x0 + (x1 - x0) * i as f64 / (nx.max(2) - 1) as f64;
            let y = -FRAC_PI_2 + PI * j as f64 / (ny.max(2) - 1) as f64;
            out.push(C64::new(x, y));
        }
    }
    out
}

pub fn sup_error_on_strip(sum: &ExpSum, target: &dyn Fn(C64) -> C64, grid: &[C64]) -> f64 {
    grid.iter().map(|&z| (sum.eval(z) - target(z)).norm()).fold(0.0, f64::max)
}

pub fn sup_on_grid(sum: &ExpSum, grid: &[C64]) -> f64 {
    grid.iter().map(|&z| sum.eval(z).norm()).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitConfig {
    /// Sampling circle radius is `1 - 2^-rho_log2`.
    pub rho_log2: u32,
    pub nodes_log2: u32,
    /// Ridge term relative to the largest Gram diagonal entry.
    pub ridge: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig { rho_log2: 12, nodes_log2: 14, ridge: 1e-12 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fit {
    pub coefficients: Vec<C64>,
    /// Transplanted boundary L^2 error at the configured radius.
    pub error: f64,
    /// The same error one radius step closer to the circle.
    pub refined_error: f64,
}

impl Fit {
    pub fn rho_delta(&self) -> f64 {
        (self.refined_error - self.error).abs()
    }
}

fn circle_points(dom: CanonicalDomain, rho_log2: u32, nodes: usize) -> Vec<C64> {
    let delta = libm::ldexp(1.0, -(rho_log2 as i32));
    (0..nodes)
        .map(|k| dom.transplant(DiscPoint::from_theta(delta, 2.0 * PI * (k as f64 + 0.5) / nodes as f64)))
        .collect()
}

fn residual_norm(pts: &[C64], target: &dyn Fn(C64) -> C64, basis: &dyn Fn(C64, &mut [C64]), c: &[C64]) -> f64 {
    let mut row = alloc::vec![C64::new(0.0, 0.0); c.len()];
    let mut acc = 0.0;
    for &z in pts {
        basis(z, &mut row);
        let approx: C64 = row.iter().zip(c).map(|(b, c)| b * c).sum();
        acc += (target(z) - approx).norm_sqr();
    }
    (acc / pts.len() as f64).sqrt()
}

/// Least squares in the span of `m` basis functions, measured as boundary
/// L^2 of the transplant to the disc. `basis(z, out)` fills `out[..m]`.
pub fn fit_basis(
    dom: CanonicalDomain,
    target: &dyn Fn(C64) -> C64,
    basis: &dyn Fn(C64, &mut [C64]),
    m: usize,
    cfg: FitConfig,
) -> Result<Fit, ApproxError> {
    dom.validate().map_err(ApproxError::BadParameter)?;
    let nodes = 1usize << cfg.nodes_log2;
    let pts = circle_points(dom, cfg.rho_log2, nodes);
    let mut a = DMatrix::<C64>::zeros(nodes, m);
    let mut b = DVector::<C64>::zeros(nodes);
    let mut row = alloc::vec![C64::new(0.0, 0.0); m];
    for (i, &z) in pts.iter().enumerate() {
        basis(z, &mut row);
        for (j, v) in row.iter().enumerate() {
            a[(i, j)] = *v;
        }
        b[i] = target(z);
    }
    let mut gram = a.ad_mul(&a);
    let rhs = a.ad_mul(&b);
    let scale = (0..m).map(|j| gram[(j, j)].re).fold(0.0, f64::max);
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(ApproxError::Conditioning);
    }
    for j in 0..m {
        gram[(j, j)] += C64::new(cfg.ridge * scale, 0.0);
    }
    let chol = gram.cholesky().ok_or(ApproxError::Conditioning)?;
    let c = chol.solve(&rhs);
    let coefficients: Vec<C64> = c.iter().copied().collect();
    if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(ApproxError::Conditioning);
    }
    let error = residual_norm(&pts, target, basis, &coefficients);
    let fine = circle_points(dom, cfg.rho_log2 + 1, nodes);
    let refined_error = residual_norm(&fine, target, basis, &coefficients);
    Ok(Fit { coefficients, error, refined_error })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpFit {
    pub sum: ExpSum,
    pub fit: Fit,
}

/// Least-squares fit by `sum c_k e^{lambda_k z}` over the given frequencies.
pub fn least_squares_fit(
    target: &dyn Fn(C64) -> C64,
    dom: CanonicalDomain,
    freqs: &[C64],
    family: Family,
    cfg: FitConfig,
) -> Result<ExpFit, ApproxError> {
    ExpSum::new(family, freqs.iter().map(|&l| (C64::new(0.0, 0.0), l)).collect())?;
    let basis = |z: C64, out: &mut [C64]| {
        for (o, &l) in out.iter_mut().zip(freqs) {
            *o = (l * z).exp();
        }
    };
    let fit = fit_basis(dom, target, &basis, freqs.len(), cfg)?;
    let sum = ExpSum { family, terms: fit.coefficients.iter().copied().zip(freqs.iter().copied()).collect() };
    Ok(ExpFit { sum, fit })
}

/// `lambda_k = -k / 8`, `k = 1..=m`.
pub fn half_plane_grid(m: usize) -> Vec<C64> {
    (1..=m).map(|k| C64::new(-(k as f64) / 8.0, 0.0)).collect()
}

const ALPHA_SERIES_RADIUS: f64 = 0.25;
const ALPHA_SERIES_ORDER: usize = 12;

/// Coefficient of `z^n` in `alpha`: `(-1)^n 2 / (n + 3)!`.
pub fn alpha_taylor_coefficient(n: usize) -> f64 {
    let mut f = 1.0;
    for k in 2..=n + 3 {
        f *= k as f64;
    }
    let s = if n % 2 == 0 { 2.0 } else { -2.0 };
    s / f
}

pub fn alpha_series(z: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for n in (0..=ALPHA_SERIES_ORDER).rev() {
        acc = acc * z + alpha_taylor_coefficient(n);
    }
    acc
}

/// `alpha(z) = int_{-1}^0 (1 + l)^2 e^{l z} dl`.
pub fn alpha_map(z: C64) -> C64 {
    if z.norm() < ALPHA_SERIES_RADIUS {
        return alpha_series(z);
    }
    (-(-z).exp() * 2.0 - z * 2.0 + z * z + 2.0) / (z * z * z)
}

/// Derivative of `1 / alpha`, written to stay accurate for large `|z|`.
pub fn inverse_alpha_derivative(z: C64) -> C64 {
    let e = (-z).exp();
    let z2 = z * z;
    let z3 = z2 * z;
    let num = z2 * z2 - z3 * 4.0 + z2 * 6.0 - (z3 * 2.0 + z2 * 6.0) * e;
    let d = z2 - z * 2.0 + 2.0 - e * 2.0;
    num / (d * d)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `alpha` by composite Gauss-Legendre quadrature of its defining integral.
pub fn alpha_quadrature(z: C64) -> C64 {
    let gl = gauss_legendre(24);
    let panels = 16;
    let h = 1.0 / panels as f64;
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..panels {
        let a = -1.0 + p as f64 * h;
        for &(x, w) in &gl {
            let l = a + 0.5 * h * (x + 1.0);
            acc += (z * l).exp() * ((1.0 + l) * (1.0 + l) * w * 0.5 * h);
        }
    }
    acc
}

/// A log-starlike defining function with a Lipschitz bound.
#[derive(Clone, Copy)]
pub struct LogStarlike<'a> {
    pub psi: &'a dyn Fn(f64) -> f64,
    /// `|psi'| <= k`.
    pub k: f64,
    /// `psi(y) >= -a log |y|` far out, with `a < 1`.
    pub a: f64,
}

/// Sample heights: dense near 0, geometric out to `1e8`.
pub fn boundary_heights(n: usize) -> Vec<f64> {
    let half = n / 2;
    let mut out = Vec::with_capacity(2 * half);
    for k in 0..half {
        let s = (k as f64 + 0.5) / half as f64;
        let y = libm::sinh(s * 19.0) * 1e-3;
        out.push(y);
        out.push(-y);
    }
    out.sort_by(f64::total_cmp);
    out
}

fn shift_ok(d: &LogStarlike<'_>, b: f64, ys: &[f64]) -> bool {
    let eps = libm::atan2(1.0, d.k);
    ys.iter().all(|&y| {
        let v = (d.psi)(y) + b;
        let level = if y.abs() <= 1.0 { v >= 1.0 } else { v >= -d.a * y.abs().ln() };
        level && inverse_alpha_derivative(C64::new(v, y)).arg().abs() < 0.5 * eps
    })
}

/// Least integer `b >= 1` for which `psi + b` clears the level conditions and
/// `|arg (1/alpha)'| < eps/2` on the sampled boundary, `eps = arg(k + i)`.
pub fn choose_b(d: &LogStarlike<'_>, ys: &[f64], max_b: u32) -> Option<f64> {
    (1..=max_b).map(|b| b as f64).find(|&b| shift_ok(d, b, ys))
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnivalenceReport {
    pub simple: bool,
    pub winding: Vec<i64>,
}

impl UnivalenceReport {
    pub fn passed(&self) -> bool {
        self.simple && !self.winding.is_empty() && self.winding.iter().all(|&w| w == 1)
    }
}

/// Images `map(psi(y) + b + iy)` of the boundary, traversed downwards so the
/// image of the domain lies to the left, closed through the image of infinity.
pub fn univalence_winding_check(
    map: &dyn Fn(C64) -> C64,
    d: &LogStarlike<'_>,
    b: f64,
    n_samples: usize,
    at_infinity: C64,
) -> UnivalenceReport {
    let mut pts: Vec<C64> = Vec::with_capacity(n_samples + 1);
    for k in 0..n_samples {
        // tan spacing covers the whole line.
        let s = (k as f64 + 0.5) / n_samples as f64;
        let y = -libm::tan(PI * (s - 0.5)) * 4.0;
        pts.push(map(C64::new((d.psi)(y) + b, y)));
    }
    pts.push(at_infinity);
    let simple = polyline_is_simple(&pts, true);
    let interior: Vec<C64> = [(0.0, 0.5), (1.0, 1.0), (-3.0, 2.0), (10.0, 4.0)]
        .iter()
        .map(|&(y, s)| map(C64::new((d.psi)(y) + b + s, y)))
        .collect();
    let winding = interior.iter().map(|&z| winding_number(&pts, z)).collect();
    UnivalenceReport { simple, winding }
}

/// `sup |eta_a' - 1|` over the given points of the right half-plane.
pub fn eta_derivative_deviation(a: f64, pts: &[C64]) -> f64 {
    pts.iter().map(|&w| (crate::eta::eta_prime(a, w) - 1.0).norm()).fold(0.0, f64::max)
}

/// `t -> Im eta_a(it)` is strictly increasing on the sorted samples.
pub fn eta_height_increasing(a: f64, ts: &[f64]) -> bool {
    ts.windows(2).all(|w| crate::eta::boundary(a, w[0]).im < crate::eta::boundary(a, w[1]).im)
}

/// `psi(y) >= -(log(|y| + 3 + s) + pi/2)^a`, where `s` bounds `|t - y|`.
pub fn eta_envelope_holds(a: f64, ys: &[f64]) -> bool {
    ys.iter().all(|&y| {
        // |t - y| <= (log(|t| + 3) + pi/2)^a; iterate to a consistent bound.
        let mut s = 0.0;
        for _ in 0..60 {
            s = ((y.abs() + s + 3.0).ln() + FRAC_PI_2).powf(a);
        }
        crate::eta::psi(a, y) >= -((y.abs() + s + 3.0).ln() + FRAC_PI_2).powf(a)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogDomainApprox {
    pub b: f64,
    pub degree: usize,
    pub atoms: usize,
    /// Error of the polynomial in `alpha(z + b)`.
    pub polynomial_error: f64,
    /// Error after replacing each power of `alpha` by a discretized convolution power.
    pub exp_error: f64,
    pub sum: ExpSum,
}

/// Polynomial in `alpha(z + b)` fitted to `target`, then each power expanded
/// into a discretized Laplace transform with frequencies in `[-degree, 0]`.
pub fn log_domain_pipeline(
    target: &dyn Fn(C64) -> C64,
    dom: CanonicalDomain,
    b: f64,
    degree: usize,
    n: usize,
    cfg: FitConfig,
) -> Result<LogDomainApprox, ApproxError> {
    if degree > 12 {
        return Err(ApproxError::BadParameter("polynomial degree is capped at 12"));
    }
    let basis = |z: C64, out: &mut [C64]| {
        let a = alpha_map(z + b);
        let mut p = C64::new(1.0, 0.0);
        for o in out.iter_mut() {
            *o = p;
            p *= a;
        }
    };
    let fit = fit_basis(dom, target, &basis, degree + 1, cfg)?;
    // alpha(z + b) is the Laplace transform of (1 - s)^2 e^{-bs} on [0, 1].
    let mu = discretize_measure(&|s: f64| C64::new((1.0 - s) * (1.0 - s) * (-b * s).exp(), 0.0), 1.0, n)?;
    let mut power = AtomicMeasure::new(alloc::vec![(0.0, C64::new(1.0, 0.0))], 0.0)?;
    let mut combined: Vec<(f64, C64)> = Vec::new();
    for (k, &q) in fit.coefficients.iter().enumerate() {
        if k > 0 {
            power = power.convolve(&mu);
        }
        combined.extend(power.atoms.iter().map(|&(t, w)| (t, w * q)));
    }
    combined.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut atoms: Vec<(f64, C64)> = Vec::new();
    for (t, w) in combined {
        match atoms.last_mut() {
            Some(last) if (t - last.0).abs() <= 1e-12 * (1.0 + t) => last.1 += w,
            _ => atoms.push((t, w)),
        }
    }
    let sum = AtomicMeasure::new(atoms, degree as f64)?.to_laplace_sum();
    let nodes = 1usize << cfg.nodes_log2;
    let pts = circle_points(dom, cfg.rho_log2, nodes);
    let exp_error = (pts.iter().map(|&z| (target(z) - sum.eval(z)).norm_sqr()).sum::<f64>() / nodes as f64).sqrt();
    Ok(LogDomainApprox { b, degree, atoms: sum.terms.len(), polynomial_error: fit.error, exp_error, sum: ExpSum { family: Family::HalfPlane, terms: sum.terms } })
}

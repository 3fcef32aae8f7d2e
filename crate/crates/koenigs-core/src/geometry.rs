//! Raster oracle for `Int(closure(Omega)) = Omega` and for counting the
//! components of the complement of the closure.
//!
//! Each row is a horizontal band. Rows are summarised by three numbers taken
//! from generic samples and from the declared structure of `psi`:
//! `sup` (largest value of `psi`), `sup_lsc` (largest value of the lower
//! regularization) and `inf` (smallest value of the lower regularization).
//! A cell is inside `Omega` when its centre is right of `sup`, lies in the
//! closure when its centre is right of `sup_lsc`, and in the complement of the
//! closure when its right edge is left of `inf`.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::domain::{DefiningFunction, PieceKind};
use crate::ext::{Ext, Tri};

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const BASE_SAMPLES: usize = 16;
const REFINE: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleError {
    BadWindow,
    Resolution,
    /// No cell of the window lies in the domain.
    Disjoint,
    WindowTooSmall(&'static str),
}

impl core::fmt::Display for OracleError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OracleError::BadWindow => write!(f, "window must have x_min < x_max and y_min < y_max"),
            OracleError::Resolution => write!(f, "resolution must be at least 8"),
            OracleError::Disjoint => write!(f, "window does not meet the domain"),
            OracleError::WindowTooSmall(why) => write!(f, "window too small: {why}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellClass {
    Complement,
    Boundary,
    Inside,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RowInfo {
    pub y0: f64,
    pub y1: f64,
    /// The open band meets `I`.
    pub meets_i: bool,
    /// The closed band lies in `I`.
    pub in_i: bool,
    pub sup: Ext,
    pub sup_lsc: Ext,
    pub inf: Ext,
    /// `psi` is unbounded below near this row, so complement pieces on either
    /// side cannot join around the left.
    pub blocked: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RasterGrid {
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    /// Row-major from the top row down.
    pub cells: Vec<CellClass>,
    closure: Vec<bool>,
    pub rows: Vec<RowInfo>,
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

fn candidate_heights(psi: &DefiningFunction) -> Vec<f64> {
    let mut ys: Vec<f64> = psi.breakpoints().iter().map(|b| b.y).collect();
    for e in [psi.lo(), psi.hi()] {
        if let Ext::Fin(y) = e {
            ys.push(y);
        }
    }
    ys
}

fn continuous_piece(k: &PieceKind) -> bool {
    matches!(k, PieceKind::Analytic { .. } | PieceKind::EtaBoundary { .. })
}

fn sample_band(psi: &DefiningFunction, a: f64, b: f64, m: usize, extra: Option<f64>) -> (Ext, Ext) {
    let mut sup = Ext::NegInf;
    let mut inf = Ext::PosInf;
    let mut take = |y: f64| {
        if let Ok(v) = psi.sample(y) {
            sup = sup.max(v);
            inf = inf.min(v);
        }
    };
    for k in 0..m {
        take(a + (b - a) * frac(0.5 + (k as f64 + 1.0) * GOLDEN));
    }
    if let Some(c) = extra {
        take(c);
    }
    (sup, inf)
}

fn row_info(psi: &DefiningFunction, heights: &[f64], y0: f64, y1: f64) -> RowInfo {
    let a = Ext::Fin(y0).max(psi.lo());
    let b = Ext::Fin(y1).min(psi.hi());
    let meets_i = a < b;
    let in_i = psi.in_interval(y0) && psi.in_interval(y1);
    let mut r = RowInfo { y0, y1, meets_i, in_i, sup: Ext::NegInf, sup_lsc: Ext::NegInf, inf: Ext::PosInf, blocked: false };
    if !meets_i {
        return r;
    }
    let (a, b) = (a.to_f64(), b.to_f64());
    let centre = 0.5 * (y0 + y1);
    let (s, i) = sample_band(psi, a, b, BASE_SAMPLES, psi.in_interval(centre).then_some(centre));
    r.sup = s;
    r.sup_lsc = s;
    r.inf = i;
    r.sup = r.sup.max(psi.structural_sup(y0, y1));
    for p in psi.pieces() {
        if let PieceKind::Cantor { carrier, on_value, gap } = &p.kind {
            let (u, v) = (y0.max(carrier.lo()), y1.min(carrier.hi()));
            if u <= v && carrier.meets(u, v) {
                let (glo, ghi) = gap.end_range();
                r.sup_lsc = r.sup_lsc.max(Ext::Fin(ghi));
                r.inf = r.inf.min(Ext::Fin(on_value.min(glo)));
            }
        }
    }
    for &y in heights {
        if y < y0 || y > y1 {
            continue;
        }
        let Ok(l) = psi.one_sided_limits(y) else { continue };
        r.sup = r.sup.max(l.limsup());
        r.inf = r.inf.min(l.liminf());
        if let Ok(v) = psi.value(y) {
            r.sup = r.sup.max(v);
            r.inf = r.inf.min(v);
        }
        for (side, piece) in [
            (l.left, psi.pieces().iter().find(|p| p.hi == Ext::Fin(y))),
            (l.right, psi.pieces().iter().find(|p| p.lo == Ext::Fin(y))),
        ] {
            if let (Some(sl), Some(p)) = (side, piece) {
                if continuous_piece(&p.kind) {
                    r.sup_lsc = r.sup_lsc.max(sl.limsup);
                }
            }
        }
    }
    r.blocked = match r.inf {
        Ext::NegInf => true,
        Ext::Fin(v) => {
            // An undeclared dip keeps deepening as the sampling gets finer.
            let (_, fine) = sample_band(psi, a, b, BASE_SAMPLES * REFINE, None);
            let base = v.min(-1.0);
            let deeper = fine < Ext::Fin(4.0 * base);
            r.inf = r.inf.min(fine);
            deeper
        }
        Ext::PosInf => false,
    };
    r
}

/// Classifies every cell of an `n x n` grid over `window`.
pub fn rasterize(psi: &DefiningFunction, window: Window, n: usize) -> Result<RasterGrid, OracleError> {
    let Window { x_min, x_max, y_min, y_max } = window;
    if !(x_min < x_max && y_min < y_max) || ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) {
        return Err(OracleError::BadWindow);
    }
    if n < 8 {
        return Err(OracleError::Resolution);
    }
    for e in [psi.lo(), psi.hi()] {
        if let Ext::Fin(y) = e {
            if y <= y_min || y >= y_max {
                return Err(OracleError::WindowTooSmall("a finite end of I lies on or outside the window"));
            }
        }
    }
    let (nx, ny) = (n, n);
    let hx = (x_max - x_min) / nx as f64;
    let hy = (y_max - y_min) / ny as f64;
    let heights = candidate_heights(psi);
    let mut rows = Vec::with_capacity(ny);
    for j in 0..ny {
        let y1 = y_max - j as f64 * hy;
        let y0 = y_max - (j + 1) as f64 * hy;
        rows.push(row_info(psi, &heights, y0, y1));
    }
    let mut cells = vec![CellClass::Boundary; nx * ny];
    let mut closure = vec![false; nx * ny];
    let mut any_inside = false;
    for (j, r) in rows.iter().enumerate() {
        for i in 0..nx {
            let xl = x_min + i as f64 * hx;
            let xc = xl + 0.5 * hx;
            let xr = xl + hx;
            let k = j * nx + i;
            if !r.meets_i {
                cells[k] = CellClass::Complement;
                continue;
            }
            if r.in_i && Ext::Fin(xc) > r.sup {
                cells[k] = CellClass::Inside;
                any_inside = true;
            } else if Ext::Fin(xr) < r.inf {
                cells[k] = CellClass::Complement;
            }
            closure[k] = Ext::Fin(xc) >= r.sup_lsc;
        }
    }
    if !any_inside {
        return Err(OracleError::Disjoint);
    }
    Ok(RasterGrid { window, nx, ny, cells, closure, rows })
}

impl RasterGrid {
    pub fn cell(&self, i: usize, j: usize) -> CellClass {
        self.cells[j * self.nx + i]
    }

    pub fn inside_count(&self) -> usize {
        self.cells.iter().filter(|c| **c == CellClass::Inside).count()
    }

    /// Cells in the interior of the closure that are not inside the domain,
    /// ignoring the two columns left of each row's first inside cell.
    pub fn violations(&self) -> Vec<(usize, usize)> {
        let (nx, ny) = (self.nx, self.ny);
        let k = |i: usize, j: usize| self.closure[j * nx + i];
        let mut out = Vec::new();
        for j in 1..ny.saturating_sub(1) {
            let first = (0..nx).find(|&i| self.cell(i, j) == CellClass::Inside).unwrap_or(nx);
            for i in 1..nx - 1 {
                if i + 2 >= first {
                    break;
                }
                if k(i, j) && k(i - 1, j) && k(i + 1, j) && k(i, j - 1) && k(i, j + 1) && self.cell(i, j) != CellClass::Inside {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Connected components of the complement of the closure, with pieces
    /// that meet around the left of the window merged.
    pub fn complement_components(&self) -> Result<usize, OracleError> {
        let (nx, ny) = (self.nx, self.ny);
        for (j, r) in self.rows.iter().enumerate() {
            if r.meets_i && self.cell(nx - 1, j) == CellClass::Complement {
                return Err(OracleError::WindowTooSmall("the complement reaches the right edge"));
            }
        }
        let mut label = vec![usize::MAX; nx * ny];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..nx * ny {
            if self.cells[start] != CellClass::Complement || label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            stack.push(start);
            while let Some(k) = stack.pop() {
                let (i, j) = (k % nx, k / nx);
                let mut visit = |q: usize| {
                    if self.cells[q] == CellClass::Complement && label[q] == usize::MAX {
                        label[q] = count;
                        stack.push(q);
                    }
                };
                if i > 0 {
                    visit(k - 1);
                }
                if i + 1 < nx {
                    visit(k + 1);
                }
                if j > 0 {
                    visit(k - nx);
                }
                if j + 1 < ny {
                    visit(k + nx);
                }
            }
            count += 1;
        }
        let mut parent: Vec<usize> = (0..count).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut current: Option<usize> = None;
        for (j, r) in self.rows.iter().enumerate() {
            let k = j * nx;
            if self.cells[k] == CellClass::Complement {
                let l = label[k];
                if let Some(c) = current {
                    let (a, b) = (find(&mut parent, c), find(&mut parent, l));
                    parent[a] = b;
                }
                current = Some(l);
            } else if r.blocked {
                current = None;
            }
        }
        let mut roots: Vec<usize> = (0..count).map(|x| find(&mut parent, x)).collect();
        roots.sort_unstable();
        roots.dedup();
        Ok(roots.len())
    }
}

/// Both oracle answers at resolutions `n` and `n / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct TopologyReport {
    /// `Unknown` when the two scales disagree.
    pub int_closure_ok: Tri,
    pub violations: (usize, usize),
    /// `None` when the two scales disagree.
    pub components: Option<usize>,
    pub component_counts: (usize, usize),
}

pub fn topology(psi: &DefiningFunction, window: Window, n: usize) -> Result<TopologyReport, OracleError> {
    let fine = rasterize(psi, window, n)?;
    let coarse = rasterize(psi, window, n / 2)?;
    let (vf, vc) = (fine.violations().len(), coarse.violations().len());
    let int_closure_ok = match (vf == 0, vc == 0) {
        (true, true) => Tri::Yes,
        (false, false) => Tri::No,
        _ => Tri::Unknown,
    };
    let (cf, cc) = (fine.complement_components()?, coarse.complement_components()?);
    Ok(TopologyReport {
        int_closure_ok,
        violations: (vf, vc),
        components: (cf == cc).then_some(cf),
        component_counts: (cf, cc),
    })
}

/// A window that holds every finite feature of `psi` with a margin.
pub fn default_window(psi: &DefiningFunction) -> Window {
    let mut ys: Vec<f64> = candidate_heights(psi);
    for p in psi.pieces() {
        if let PieceKind::PointSpike { c0, .. } = p.kind {
            ys.push(c0);
        }
    }
    let (mut lo, mut hi) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    if !lo.is_finite() {
        lo = -1.0;
        hi = 1.0;
    }
    let span = (hi - lo).max(1.0);
    let pad = 0.25 * span;
    let y_min = match psi.lo() {
        Ext::Fin(a) => a - pad,
        _ => lo - span.max(2.0),
    };
    let y_max = match psi.hi() {
        Ext::Fin(b) => b + pad,
        _ => hi + span.max(2.0),
    };
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let m = 4096;
    for k in 0..m {
        let y = y_min + (y_max - y_min) * (k as f64 + 0.5) / m as f64;
        if let Ok(Ext::Fin(v)) = psi.sample(y) {
            if v.abs() < 50.0 {
                x_lo = x_lo.min(v);
                x_hi = x_hi.max(v);
            }
        }
    }
    for &y in &ys {
        if y > y_min && y < y_max {
            if let Ext::Fin(v) = psi.structural_sup(y, y) {
                x_hi = x_hi.max(v.min(50.0));
            }
        }
    }
    if !x_lo.is_finite() {
        x_lo = -1.0;
        x_hi = 1.0;
    }
    let w = (x_hi - x_lo).max(1.0);
    Window { x_min: x_lo - 0.5 * w - 1.0, x_max: x_hi + 0.5 * w + 1.0, y_min, y_max }
}

impl core::error::Error for OracleError {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn topo(psi: &DefiningFunction, n: usize) -> TopologyReport {
        topology(psi, default_window(psi), n).unwrap()
    }

    #[test]
    fn tiny_half_plane_grid() {
        let w = Window { x_min: -1.0, x_max: 1.0, y_min: -1.0, y_max: 1.0 };
        let g = rasterize(&catalog::half_plane(), w, 8).unwrap();
        for j in 0..8 {
            for i in 0..8 {
                assert_eq!(g.cell(i, j) == CellClass::Inside, i >= 4, "cell {i},{j}");
            }
        }
    }

    #[test]
    fn strip_and_gaps() {
        let s = topo(&catalog::strip(), 128);
        assert_eq!((s.int_closure_ok, s.components), (Tri::Yes, Some(1)));
        let g = topo(&catalog::minus_inf_gap(), 128);
        assert_eq!((g.int_closure_ok, g.components), (Tri::Yes, Some(2)));
        let t = topo(&catalog::two_gaps(), 128);
        assert_eq!(t.components, Some(3));
        assert_eq!(topo(&catalog::full_strip(), 128).components, Some(2));
    }

    #[test]
    fn spikes_and_combs_fail() {
        assert_eq!(topo(&catalog::point_spike(), 128).int_closure_ok, Tri::No);
        assert_eq!(topo(&catalog::comb(), 256).int_closure_ok, Tri::No);
        assert_eq!(topo(&catalog::oscillation_cantor(), 512).int_closure_ok, Tri::Yes);
    }

    #[test]
    fn right_translation_monotone() {
        let g = rasterize(&catalog::du_oscillation(), default_window(&catalog::du_oscillation()), 64).unwrap();
        for j in 0..g.ny {
            let first = (0..g.nx).find(|&i| g.cell(i, j) == CellClass::Inside);
            if let Some(f) = first {
                assert!((f..g.nx).all(|i| g.cell(i, j) == CellClass::Inside));
            }
        }
    }

    #[test]
    fn bad_windows() {
        let w = Window { x_min: -1.0, x_max: 1.0, y_min: -1.0, y_max: 1.0 };
        assert_eq!(rasterize(&catalog::strip(), w, 64), Err(OracleError::WindowTooSmall("a finite end of I lies on or outside the window")));
        let far = Window { x_min: -10.0, x_max: -5.0, y_min: -1.0, y_max: 1.0 };
        assert_eq!(rasterize(&catalog::half_plane(), far, 64), Err(OracleError::Disjoint));
        use crate::domain::{Piece, PiecewiseFunction};
        let tilted = DefiningFunction::new(PiecewiseFunction {
            lo: Ext::NegInf,
            hi: Ext::PosInf,
            pieces: vec![Piece::analytic(Ext::NegInf, Ext::PosInf, "y")],
            points: vec![],
        })
        .unwrap();
        let narrow = Window { x_min: -0.5, x_max: 0.5, y_min: -1.0, y_max: 1.0 };
        let g = rasterize(&tilted, narrow, 64).unwrap();
        assert!(matches!(g.complement_components(), Err(OracleError::WindowTooSmall(_))));
    }
}

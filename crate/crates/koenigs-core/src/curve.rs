//! Polyline helpers: simplicity and winding numbers.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

fn orient(a: C64, b: C64, c: C64) -> f64 {
    (b - a).im * (c - b).re - (b - a).re * (c - b).im
}

fn on_segment(a: C64, b: C64, p: C64) -> bool {
    p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
}

/// Closed-segment intersection test.
pub fn segments_intersect(p1: C64, p2: C64, q1: C64, q2: C64) -> bool {
    let d1 = orient(p1, p2, q1);
    let d2 = orient(p1, p2, q2);
    let d3 = orient(q1, q2, p1);
    let d4 = orient(q1, q2, p2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(p1, p2, q1))
        || (d2 == 0.0 && on_segment(p1, p2, q2))
        || (d3 == 0.0 && on_segment(q1, q2, p1))
        || (d4 == 0.0 && on_segment(q1, q2, p2))
}

/// True when no two non-adjacent segments of the polyline meet. With
/// `closed` the last point joins the first.
pub fn polyline_is_simple(pts: &[C64], closed: bool) -> bool {
    let n = pts.len();
    if n < 3 {
        return true;
    }
    let segs = if closed { n } else { n - 1 };
    let seg = |k: usize| (pts[k], pts[(k + 1) % n]);
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in pts {
        if !(p.re.is_finite() && p.im.is_finite()) {
            return false;
        }
        lo = C64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = C64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let cells = ((segs as f64).sqrt().ceil() as i64).max(1);
    let w = ((hi.re - lo.re) / cells as f64).max(f64::MIN_POSITIVE);
    let h = ((hi.im - lo.im) / cells as f64).max(f64::MIN_POSITIVE);
    let key = |x: f64, y: f64| {
        let i = (((x - lo.re) / w) as i64).clamp(0, cells - 1);
        let j = (((y - lo.im) / h) as i64).clamp(0, cells - 1);
        (i, j)
    };
    let mut buckets: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for k in 0..segs {
        let (a, b) = seg(k);
        let (i0, j0) = key(a.re.min(b.re), a.im.min(b.im));
        let (i1, j1) = key(a.re.max(b.re), a.im.max(b.im));
        for i in i0..=i1 {
            for j in j0..=j1 {
                buckets.entry((i, j)).or_default().push(k);
            }
        }
    }
    let adjacent = |a: usize, b: usize| a.abs_diff(b) <= 1 || (closed && a.abs_diff(b) == segs - 1);
    for list in buckets.values() {
        for (x, &a) in list.iter().enumerate() {
            for &b in &list[x + 1..] {
                if adjacent(a, b) {
                    continue;
                }
                let (p1, p2) = seg(a);
                let (q1, q2) = seg(b);
                if segments_intersect(p1, p2, q1, q2) {
                    return false;
                }
            }
        }
    }
    true
}

/// Winding number of the closed polyline around `z`.
pub fn winding_number(pts: &[C64], z: C64) -> i64 {
    let mut total = 0.0;
    let n = pts.len();
    for k in 0..n {
        let a = pts[k] - z;
        let b = pts[(k + 1) % n] - z;
        total += (b / a).arg();
    }
    (total / (2.0 * PI)).round() as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_and_bowtie() {
        let sq = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 1.0), C64::new(0.0, 1.0)];
        assert!(polyline_is_simple(&sq, true));
        assert_eq!(winding_number(&sq, C64::new(0.5, 0.5)), 1);
        assert_eq!(winding_number(&sq, C64::new(2.0, 0.5)), 0);
        let bow = [C64::new(0.0, 0.0), C64::new(1.0, 1.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
        assert!(!polyline_is_simple(&bow, true));
    }

    #[test]
    fn circle_is_simple() {
        let pts: Vec<C64> = (0..500).map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / 500.0)).collect();
        assert!(polyline_is_simple(&pts, true));
        assert_eq!(winding_number(&pts, C64::new(0.1, 0.0)), 1);
    }
}

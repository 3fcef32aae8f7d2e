//! The map `eta(w) = w - (log(w + 3))^a` on the closed right half-plane and
//! the defining function of its image.

use num_complex::Complex64 as C64;

pub fn eta(a: f64, w: C64) -> C64 {
    w - (w + 3.0).ln().powf(a)
}

pub fn eta_prime(a: f64, w: C64) -> C64 {
    let l = (w + 3.0).ln();
    C64::new(1.0, 0.0) - l.powf(a - 1.0) * a / (w + 3.0)
}

/// `eta(i t)`; its real part is the boundary abscissa, its imaginary part the height.
pub fn boundary(a: f64, t: f64) -> C64 {
    eta(a, C64::new(0.0, t))
}

fn beta(a: f64, t: f64) -> f64 {
    boundary(a, t).im
}

/// Parameter `t` with `Im eta(i t) = y`; `beta` is strictly increasing.
pub fn boundary_param(a: f64, y: f64) -> f64 {
    let mut w = 1.0 + y.abs() * 0.5;
    let (mut lo, mut hi) = (y - w, y + w);
    while beta(a, lo) > y {
        w *= 2.0;
        lo = y - w;
    }
    while beta(a, hi) < y {
        w *= 2.0;
        hi = y + w;
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = beta(a, t) - y;
        if f == 0.0 {
            return t;
        }
        if f > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        if hi - lo <= 4.0 * f64::EPSILON * (1.0 + t.abs()) {
            break;
        }
        // Newton step, kept inside the bracket.
        let d = eta_prime(a, C64::new(0.0, t)).re;
        let nt = t - f / d;
        t = if d > 0.0 && nt > lo && nt < hi { nt } else { 0.5 * (lo + hi) };
    }
    t
}

/// Defining function of `eta(right half-plane)`.
pub fn psi(a: f64, y: f64) -> f64 {
    boundary(a, boundary_param(a, y)).re
}

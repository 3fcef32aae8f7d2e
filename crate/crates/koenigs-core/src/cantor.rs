//! Self-similar Cantor carriers with exact membership.
//!
//! The carrier on `[lo, hi]` keeps, at every level, the base-`m` digits in
//! `keep`. Digits `0` and `m-1` must be kept, so both ends of every kept
//! sub-interval belong to the set and maximal gaps are runs of removed
//! digits at a single level.
//!
//! Membership of an `f64` point is decided on exact rationals: the point and
//! the base interval are dyadic, so `t = (y-lo)/(hi-lo)` is a ratio of big
//! integers and its base-`m` expansion is walked digit by digit with cycle
//! detection.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct CantorSet {
    lo: f64,
    hi: f64,
    keep: Vec<bool>,
    depth: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CantorError {
    BadInterval,
    BadBase,
    EndDigitsRemoved,
    NothingRemoved,
    DigitOutOfRange(u32),
}

impl core::fmt::Display for CantorError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CantorError::BadInterval => f.write_str("carrier interval must be finite with lo < hi"),
            CantorError::BadBase => f.write_str("base must be at least 3"),
            CantorError::EndDigitsRemoved => f.write_str("digits 0 and base-1 must be kept"),
            CantorError::NothingRemoved => f.write_str("at least one digit must be removed"),
            CantorError::DigitOutOfRange(d) => write!(f, "kept digit {} is not below the base", d),
        }
    }
}

/// What the carrier looks like immediately to one side of a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SideShape {
    /// Carrier points accumulate on this side.
    Accumulates,
    /// The open gap `(a, b)` lies on this side, with the point as an end.
    Gap { a: f64, b: f64 },
    /// This side leaves `[lo, hi]`.
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Location {
    Carrier { left: SideShape, right: SideShape },
    /// Strictly inside the maximal open gap `(a, b)`.
    Gap { a: f64, b: f64 },
    /// Outside `[lo, hi]`.
    Outside,
    /// Digit walk hit the depth limit without a cycle.
    Undetermined,
}

impl Location {
    pub fn in_carrier(&self) -> Option<bool> {
        match self {
            Location::Carrier { .. } => Some(true),
            Location::Gap { .. } | Location::Outside => Some(false),
            Location::Undetermined => None,
        }
    }
}

fn dyadic(v: f64) -> (BigInt, i32) {
    if v == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & 0xf_ffff_ffff_ffff;
    let (mant, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    (BigInt::from(sign) * BigInt::from(mant), exp)
}

impl CantorSet {
    pub fn new(lo: f64, hi: f64, base: u32, kept: &[u32], depth: u32) -> Result<CantorSet, CantorError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(CantorError::BadInterval);
        }
        if base < 3 {
            return Err(CantorError::BadBase);
        }
        let mut keep = alloc::vec![false; base as usize];
        for &d in kept {
            if d >= base {
                return Err(CantorError::DigitOutOfRange(d));
            }
            keep[d as usize] = true;
        }
        if !keep[0] || !keep[base as usize - 1] {
            return Err(CantorError::EndDigitsRemoved);
        }
        if keep.iter().all(|&k| k) {
            return Err(CantorError::NothingRemoved);
        }
        Ok(CantorSet { lo, hi, keep, depth: depth.max(1) })
    }

    /// Middle-thirds set on `[lo, hi]`.
    pub fn ternary(lo: f64, hi: f64) -> CantorSet {
        CantorSet::new(lo, hi, 3, &[0, 2], 4096).expect("valid ternary carrier")
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn base(&self) -> u32 {
        self.keep.len() as u32
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn kept_digits(&self) -> Vec<u32> {
        (0..self.keep.len() as u32).filter(|&d| self.keep[d as usize]).collect()
    }

    /// Same pattern on `[lo + d, hi + d]`.
    pub fn shifted(&self, d: f64) -> CantorSet {
        CantorSet { lo: self.lo + d, hi: self.hi + d, keep: self.keep.clone(), depth: self.depth }
    }

    /// Maximal run of removed digits containing `d`.
    fn run(&self, d: usize) -> (usize, usize) {
        let (mut a, mut b) = (d, d);
        while a > 0 && !self.keep[a - 1] {
            a -= 1;
        }
        while b + 1 < self.keep.len() && !self.keep[b + 1] {
            b += 1;
        }
        (a, b)
    }

    /// A carrier point strictly inside `(lo, hi)`: the right end of the
    /// first level-one sub-interval.
    pub fn interior_point(&self) -> f64 {
        self.lo + (self.hi - self.lo) / self.keep.len() as f64
    }

    pub fn contains(&self, y: f64) -> Option<bool> {
        self.locate(y).in_carrier()
    }

    /// Exact location of `y` relative to the carrier.
    pub fn locate(&self, y: f64) -> Location {
        if !(y >= self.lo && y <= self.hi) {
            return Location::Outside;
        }
        if y == self.lo {
            return Location::Carrier { left: SideShape::Outside, right: SideShape::Accumulates };
        }
        if y == self.hi {
            return Location::Carrier { left: SideShape::Accumulates, right: SideShape::Outside };
        }
        let (my, ey) = dyadic(y);
        let (ml, el) = dyadic(self.lo);
        let (mh, eh) = dyadic(self.hi);
        let e0 = ey.min(el).min(eh);
        let sc = |m: BigInt, e: i32| m << ((e - e0) as usize);
        let lo_i = sc(ml, el);
        let mut r = sc(my, ey) - &lo_i;
        let den = sc(mh, eh) - lo_i;
        debug_assert!(den.sign() == Sign::Plus);
        let m = self.keep.len();
        let mb = BigInt::from(m as u64);
        let mut s = self.lo;
        let mut len = self.hi - self.lo;
        let mut seen: BTreeSet<BigInt> = BTreeSet::new();
        for _ in 0..self.depth {
            let (dq, rem) = (&r * &mb).div_rem(&den);
            let d = dq.to_usize().unwrap_or(m);
            let step = len / m as f64;
            if rem.is_zero() {
                // On the boundary between digit d-1 and digit d.
                let x = s + step * d as f64;
                let (kl, kr) = (self.keep[d - 1], self.keep[d]);
                if !kl && !kr {
                    let (a, b) = self.run(d);
                    return Location::Gap { a: s + step * a as f64, b: s + step * (b + 1) as f64 };
                }
                let left = if kl {
                    SideShape::Accumulates
                } else {
                    let (a, _) = self.run(d - 1);
                    SideShape::Gap { a: s + step * a as f64, b: x }
                };
                let right = if kr {
                    SideShape::Accumulates
                } else {
                    let (_, b) = self.run(d);
                    SideShape::Gap { a: x, b: s + step * (b + 1) as f64 }
                };
                return Location::Carrier { left, right };
            }
            if !self.keep[d] {
                let (a, b) = self.run(d);
                return Location::Gap { a: s + step * a as f64, b: s + step * (b + 1) as f64 };
            }
            if !seen.insert(rem.clone()) {
                return Location::Carrier { left: SideShape::Accumulates, right: SideShape::Accumulates };
            }
            s += step * d as f64;
            len = step;
            r = rem;
        }
        Location::Undetermined
    }

    /// Floating-point location for generic sample points. Points that
    /// survive 40 levels are reported as carrier points.
    pub fn locate_fast(&self, y: f64) -> Location {
        if !(y >= self.lo && y <= self.hi) {
            return Location::Outside;
        }
        let m = self.keep.len();
        let mut t = (y - self.lo) / (self.hi - self.lo);
        let mut s = self.lo;
        let mut len = self.hi - self.lo;
        for _ in 0..40 {
            let step = len / m as f64;
            let d = ((t * m as f64).floor() as usize).min(m - 1);
            if !self.keep[d] {
                let (a, b) = self.run(d);
                return Location::Gap { a: s + step * a as f64, b: s + step * (b + 1) as f64 };
            }
            t = t * m as f64 - d as f64;
            s += step * d as f64;
            len = step;
            if len <= 0.0 {
                break;
            }
        }
        Location::Carrier { left: SideShape::Accumulates, right: SideShape::Accumulates }
    }

    /// Whether the carrier meets the closed interval `[a, b]`.
    pub fn meets(&self, a: f64, b: f64) -> bool {
        if b < self.lo || a > self.hi || a > b {
            return false;
        }
        self.meets_rec(a, b, self.lo, self.hi - self.lo, 0)
    }

    fn meets_rec(&self, a: f64, b: f64, s: f64, len: f64, level: u32) -> bool {
        let e = s + len;
        if e < a || s > b {
            return false;
        }
        // Both ends of a kept sub-interval are carrier points.
        if (s >= a && s <= b) || (e >= a && e <= b) || level >= 60 || len <= 0.0 {
            return true;
        }
        let m = self.keep.len();
        let step = len / m as f64;
        (0..m).any(|d| self.keep[d] && self.meets_rec(a, b, s + step * d as f64, step, level + 1))
    }
}

impl core::error::Error for CantorError {}

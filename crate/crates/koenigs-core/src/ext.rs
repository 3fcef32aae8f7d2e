//! Extended reals, three-valued verdicts and certainty tags.

use core::cmp::Ordering;
use core::fmt;

/// A value in `[-inf, +inf]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Ext {
    NegInf,
    Fin(f64),
    PosInf,
}

impl Ext {
    /// Maps an `f64` (possibly infinite) into `Ext`. NaN gives `None`.
    pub fn from_f64(v: f64) -> Option<Ext> {
        if v.is_nan() {
            None
        } else if v == f64::INFINITY {
            Some(Ext::PosInf)
        } else if v == f64::NEG_INFINITY {
            Some(Ext::NegInf)
        } else {
            Some(Ext::Fin(v))
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Ext::NegInf => f64::NEG_INFINITY,
            Ext::Fin(v) => v,
            Ext::PosInf => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Ext::Fin(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Ext::Fin(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, Ext::NegInf)
    }

    pub fn is_pos_inf(self) -> bool {
        matches!(self, Ext::PosInf)
    }

    pub fn max(self, o: Ext) -> Ext {
        if self >= o {
            self
        } else {
            o
        }
    }

    pub fn min(self, o: Ext) -> Ext {
        if self <= o {
            self
        } else {
            o
        }
    }

    /// Adds a finite constant; infinities absorb it.
    pub fn add(self, c: f64) -> Ext {
        match self {
            Ext::Fin(v) => Ext::Fin(v + c),
            other => other,
        }
    }

    pub fn neg(self) -> Ext {
        match self {
            Ext::NegInf => Ext::PosInf,
            Ext::Fin(v) => Ext::Fin(-v),
            Ext::PosInf => Ext::NegInf,
        }
    }

    /// Equality up to a relative tolerance on finite values.
    pub fn approx_eq(self, o: Ext, rel: f64) -> bool {
        match (self, o) {
            (Ext::Fin(a), Ext::Fin(b)) => {
                let s = if a.abs() > b.abs() { a.abs() } else { b.abs() };
                (a - b).abs() <= rel * if s > 1.0 { s } else { 1.0 }
            }
            (a, b) => a == b,
        }
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Ext) -> Option<Ordering> {
        use Ext::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Some(Ordering::Equal),
            (NegInf, _) | (_, PosInf) => Some(Ordering::Less),
            (_, NegInf) | (PosInf, _) => Some(Ordering::Greater),
            (Fin(a), Fin(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => f.write_str("-inf"),
            Ext::PosInf => f.write_str("+inf"),
            Ext::Fin(v) => write!(f, "{}", v),
        }
    }
}

/// Three-valued answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl Tri {
    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    pub fn and(self, o: Tri) -> Tri {
        match (self, o) {
            (Tri::No, _) | (_, Tri::No) => Tri::No,
            (Tri::Yes, Tri::Yes) => Tri::Yes,
            _ => Tri::Unknown,
        }
    }

    pub fn or(self, o: Tri) -> Tri {
        match (self, o) {
            (Tri::Yes, _) | (_, Tri::Yes) => Tri::Yes,
            (Tri::No, Tri::No) => Tri::No,
            _ => Tri::Unknown,
        }
    }

    pub fn not(self) -> Tri {
        match self {
            Tri::Yes => Tri::No,
            Tri::No => Tri::Yes,
            Tri::Unknown => Tri::Unknown,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Tri::Yes => "yes",
            Tri::No => "no",
            Tri::Unknown => "unknown",
        }
    }
}

/// How a computed quantity was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Certainty {
    /// Follows from declared structure or certified continuity.
    Exact,
    /// Numerical estimate that passed its stabilization test.
    Estimated,
    /// Numerics did not settle.
    Inconclusive,
}

impl Certainty {
    pub fn worst(self, o: Certainty) -> Certainty {
        if self >= o {
            self
        } else {
            o
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Certainty::Exact => "exact",
            Certainty::Estimated => "estimated",
            Certainty::Inconclusive => "inconclusive",
        }
    }
}

/// Side of a point on the line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_puts_infinities_at_the_ends() {
        assert!(Ext::NegInf < Ext::Fin(-1e300));
        assert!(Ext::Fin(1e300) < Ext::PosInf);
        assert_eq!(Ext::Fin(2.0).max(Ext::NegInf), Ext::Fin(2.0));
        assert_eq!(Ext::Fin(2.0).min(Ext::NegInf), Ext::NegInf);
    }

    #[test]
    fn nan_is_rejected() {
        assert!(Ext::from_f64(f64::NAN).is_none());
        assert_eq!(Ext::from_f64(f64::NEG_INFINITY), Some(Ext::NegInf));
    }

    #[test]
    fn tri_logic() {
        assert_eq!(Tri::Yes.and(Tri::Unknown), Tri::Unknown);
        assert_eq!(Tri::No.and(Tri::Unknown), Tri::No);
        assert_eq!(Tri::Yes.or(Tri::Unknown), Tri::Yes);
        assert_eq!(Tri::Unknown.not(), Tri::Unknown);
    }
}

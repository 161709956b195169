//! Exact rationals and their two-point extension by `±∞`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used for lengths, offsets and function values.
pub type Q = BigRational;

/// Builds `num / den` exactly.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Builds the integer `n` as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"` into a rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    Q::from_str(s).map_err(|_| Error::Parse(format!("not a rational number: {s:?}")))
}

/// Canonical textual form: `"p/q"` in lowest terms, or `"p"` for integers.
pub fn fmt_q(v: &Q) -> String {
    v.to_string()
}

/// Converts an integral rational to `i64`, if it is one and fits.
pub fn q_to_int(v: &Q) -> Option<i64> {
    if !v.is_integer() {
        return None;
    }
    i64::try_from(v.to_integer()).ok()
}

/// Either a finite rational or one of the two infinite symbols.
///
/// Variant order gives the total order `-∞ < rationals < +∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtRational {
    NegInf,
    Finite(Q),
    PosInf,
}

impl ExtRational {
    pub fn zero() -> Self {
        ExtRational::Finite(Q::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }

    pub fn finite(&self) -> Option<&Q> {
        match self {
            ExtRational::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Exact sum. `+∞ + −∞` is rejected.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        use ExtRational::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
            (PosInf, NegInf) | (NegInf, PosInf) => Err(Error::IndeterminateSum),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
        }
    }

    /// Multiplies by a positive rational; infinities are fixed.
    pub fn scale(&self, r: &Q) -> Self {
        debug_assert!(r.is_positive());
        match self {
            ExtRational::Finite(v) => ExtRational::Finite(v * r),
            other => other.clone(),
        }
    }
}

impl From<Q> for ExtRational {
    fn from(v: Q) -> Self {
        ExtRational::Finite(v)
    }
}

impl Neg for ExtRational {
    type Output = ExtRational;
    fn neg(self) -> ExtRational {
        match self {
            ExtRational::NegInf => ExtRational::PosInf,
            ExtRational::PosInf => ExtRational::NegInf,
            ExtRational::Finite(v) => ExtRational::Finite(-v),
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::NegInf => f.write_str("-inf"),
            ExtRational::PosInf => f.write_str("inf"),
            ExtRational::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for ExtRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" => Ok(ExtRational::PosInf),
            "-inf" => Ok(ExtRational::NegInf),
            other => parse_q(other).map(ExtRational::Finite),
        }
    }
}

/// Edge length or offset bound: a positive rational, or `∞` for leaf edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Length {
    Finite(Q),
    Infinite,
}

impl Length {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Length::Infinite)
    }

    pub fn finite(&self) -> Option<&Q> {
        match self {
            Length::Finite(v) => Some(v),
            Length::Infinite => None,
        }
    }

    pub fn to_ext(&self) -> ExtRational {
        match self {
            Length::Finite(v) => ExtRational::Finite(v.clone()),
            Length::Infinite => ExtRational::PosInf,
        }
    }

    pub fn scale(&self, r: &Q) -> Length {
        match self {
            Length::Finite(v) => Length::Finite(v * r),
            Length::Infinite => Length::Infinite,
        }
    }

    /// `true` iff the finite offset `t` lies strictly before this bound.
    pub fn exceeds(&self, t: &Q) -> bool {
        match self {
            Length::Finite(v) => v > t,
            Length::Infinite => true,
        }
    }
}

impl PartialOrd for Length {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Length {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Length::Finite(a), Length::Finite(b)) => a.cmp(b),
            (Length::Finite(_), Length::Infinite) => Ordering::Less,
            (Length::Infinite, Length::Finite(_)) => Ordering::Greater,
            (Length::Infinite, Length::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Length::Finite(v) => write!(f, "{v}"),
            Length::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Length {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" => Ok(Length::Infinite),
            other => parse_q(other).map(Length::Finite),
        }
    }
}

pub(crate) fn half() -> Q {
    Q::new(BigInt::one(), BigInt::from(2))
}

//! Natural numbers and integers extended with infinities.
//!
//! Function tables carry an explicit `inf` marker: it contributes weight 0
//! to every sum and compares greater than every finite value.

use crate::dyadic::DyadicRational;
use std::fmt;
use std::str::FromStr;

/// A nonnegative integer or `+inf`.
///
/// The derived order puts `Inf` above every `Fin(_)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

impl ExtNat {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtNat::Fin(_))
    }

    pub fn finite(&self) -> Option<u64> {
        match self {
            ExtNat::Fin(v) => Some(*v),
            ExtNat::Inf => None,
        }
    }

    /// `2^(-v)`, with `inf` contributing zero.
    pub fn weight(&self) -> DyadicRational {
        match self {
            ExtNat::Fin(v) => {
                let e = i64::try_from(*v).expect("weight exponent too large");
                DyadicRational::pow2(-e)
            }
            ExtNat::Inf => DyadicRational::zero(),
        }
    }

    /// Saturating difference from a finite predecessor, used by the
    /// unit-step check.
    pub fn minus(self, other: ExtNat) -> Option<u64> {
        match (self, other) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => a.checked_sub(b),
            _ => None,
        }
    }
}

impl From<u64> for ExtNat {
    fn from(v: u64) -> Self {
        ExtNat::Fin(v)
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(v) => write!(f, "{v}"),
            ExtNat::Inf => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for ExtNat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "inf" {
            Ok(ExtNat::Inf)
        } else {
            s.parse::<u64>().map(ExtNat::Fin).map_err(|e| format!("bad value {s:?}: {e}"))
        }
    }
}

/// An integer extended with both infinities, used for measured constants
/// such as randomness deficiencies and triviality excesses.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtInt {
    NegInf,
    Fin(i64),
    PosInf,
}

impl ExtInt {
    pub fn finite(&self) -> Option<i64> {
        match self {
            ExtInt::Fin(v) => Some(*v),
            _ => None,
        }
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::NegInf => write!(f, "-inf"),
            ExtInt::Fin(v) => write!(f, "{v}"),
            ExtInt::PosInf => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

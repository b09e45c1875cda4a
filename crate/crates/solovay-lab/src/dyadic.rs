//! Exact dyadic rational arithmetic.
//!
//! Every weight, measure and interval endpoint in this crate is a dyadic
//! rational `num * 2^(-exp)` held exactly; there is no floating point
//! anywhere. The canonical form keeps `num` odd (or zero with `exp = 0`),
//! which makes structural equality agree with numerical equality.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// A dyadic rational `num * 2^(-exp)` in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DyadicRational {
    num: BigInt,
    exp: u64,
}

impl DyadicRational {
    pub fn zero() -> Self {
        DyadicRational { num: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        DyadicRational { num: BigInt::one(), exp: 0 }
    }

    /// Builds `num * 2^(-exp)` and canonicalizes.
    pub fn new(num: BigInt, exp: u64) -> Self {
        let mut d = DyadicRational { num, exp };
        d.canonicalize();
        d
    }

    pub fn from_int(n: i64) -> Self {
        DyadicRational::new(BigInt::from(n), 0)
    }

    /// `2^e` for any integer `e`.
    pub fn pow2(e: i64) -> Self {
        if e >= 0 {
            DyadicRational { num: BigInt::one() << e as usize, exp: 0 }
        } else {
            DyadicRational { num: BigInt::one(), exp: (-e) as u64 }
        }
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0);
        let shift = tz.min(self.exp);
        if shift > 0 {
            self.num >>= shift as usize;
            self.exp -= shift;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u64 {
        self.exp
    }

    /// `2^exp` as an unsigned big integer, the denominator in lowest terms.
    pub fn denominator(&self) -> BigUint {
        BigUint::one() << usize::try_from(self.exp).expect("exponent exceeds address space")
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    /// `self * 2^e`, exact.
    pub fn times_pow2(&self, e: i64) -> Self {
        if self.num.is_zero() {
            return DyadicRational::zero();
        }
        if e >= 0 {
            let e = e as u64;
            if self.exp >= e {
                DyadicRational { num: self.num.clone(), exp: self.exp - e }
            } else {
                DyadicRational {
                    num: self.num.clone() << (e - self.exp) as usize,
                    exp: 0,
                }
            }
        } else {
            DyadicRational::new(self.num.clone(), self.exp + (-e) as u64)
        }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, u64) {
        let exp = self.exp.max(other.exp);
        let a = self.num.clone() << (exp - self.exp) as usize;
        let b = other.num.clone() << (exp - other.exp) as usize;
        (a, b, exp)
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.num.sign(), other.num.sign()) {
            (Sign::Minus, Sign::NoSign) | (Sign::Minus, Sign::Plus) => return Ordering::Less,
            (Sign::NoSign, Sign::Minus) | (Sign::Plus, Sign::Minus) => return Ordering::Greater,
            (Sign::NoSign, Sign::NoSign) => return Ordering::Equal,
            _ => {}
        }
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl Add for DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: DyadicRational) -> DyadicRational {
        &self + &rhs
    }
}

impl Add for &DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: &DyadicRational) -> DyadicRational {
        let (a, b, exp) = self.aligned(rhs);
        DyadicRational::new(a + b, exp)
    }
}

impl AddAssign<&DyadicRational> for DyadicRational {
    fn add_assign(&mut self, rhs: &DyadicRational) {
        *self = &*self + rhs;
    }
}

impl Sub for DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: DyadicRational) -> DyadicRational {
        &self - &rhs
    }
}

impl Sub for &DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: &DyadicRational) -> DyadicRational {
        let (a, b, exp) = self.aligned(rhs);
        DyadicRational::new(a - b, exp)
    }
}

impl SubAssign<&DyadicRational> for DyadicRational {
    fn sub_assign(&mut self, rhs: &DyadicRational) {
        *self = &*self - rhs;
    }
}

impl Mul for &DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: &DyadicRational) -> DyadicRational {
        DyadicRational::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Mul for DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: DyadicRational) -> DyadicRational {
        &self * &rhs
    }
}

impl Neg for DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        DyadicRational { num: -self.num, exp: self.exp }
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl fmt::Debug for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A closed interval with dyadic endpoints.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DyadicInterval {
    pub lo: DyadicRational,
    pub hi: DyadicRational,
}

impl DyadicInterval {
    pub fn new(lo: DyadicRational, hi: DyadicRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        DyadicInterval { lo, hi }
    }

    pub fn length(&self) -> DyadicRational {
        &self.hi - &self.lo
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

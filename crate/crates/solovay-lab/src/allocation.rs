//! The combinatorial cylinder-allocation procedure.
//!
//! Given a cylinder `[sigma]`, an interval `[s, t]` of candidate lengths
//! with `s >= |sigma|`, and per-length capacities `a_i` whose weighted sum
//! `sum a_i 2^(-i)` is at least `2^(-|sigma|+1)`, the procedure picks a set
//! `J` of lengths and a finite set `S` of strings such that `[S] = [sigma]`
//! exactly, every member of `S` has its length in `J`, and for each `j` in
//! `J` at most `a_j` members of `S` have length at most `j`.
//!
//! The loop runs over `i` from `s` to `t`: when `|S| < a_i`, put `i` into
//! `J`, split the uncovered part of `[sigma]` into cylinders of measure
//! `2^(-i)`, and take the first `a_i - |S|` of their generators in
//! lexicographic order.

use crate::bits::BitString;
use crate::dyadic::DyadicRational;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AllocationError {
    /// The weighted capacity bound fails; the procedure contract is void.
    #[error("PreconditionFailed: {0}")]
    PreconditionFailed(String),
}

/// Output of [`allocate`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AllocationResult {
    /// Lengths that were opened during the loop.
    pub j: BTreeSet<u64>,
    /// Covering strings, in enumeration order.
    pub s: Vec<BitString>,
}

impl AllocationResult {
    /// Exact total measure of the cylinders generated by `S`.
    pub fn measure(&self) -> DyadicRational {
        let mut sum = DyadicRational::zero();
        for tau in &self.s {
            sum += &DyadicRational::pow2(-(tau.len() as i64));
        }
        sum
    }
}

/// Suffix values (relative to `base`) at length `i` already covered by
/// strings in `s`, as disjoint half-open ranges, sorted.
fn covered_ranges(s: &[BitString], base: &BitString, i: u64) -> Vec<(u64, u64)> {
    let mut ranges: Vec<(u64, u64)> = Vec::new();
    for tau in s {
        debug_assert!((tau.len() as u64) < i && base.is_prefix_of(tau));
        let mut val: u64 = 0;
        for k in base.len()..tau.len() {
            val = (val << 1) | tau.bit(k) as u64;
        }
        let width = i - tau.len() as u64;
        let lo = val << width;
        ranges.push((lo, lo + (1u64 << width)));
    }
    ranges.sort_unstable();
    ranges
}

/// Runs the allocation loop. See the module docs for the contract.
pub fn allocate(
    sigma: &BitString,
    lo: u64,
    hi: u64,
    capacities: &[u64],
) -> Result<AllocationResult, AllocationError> {
    if lo > hi {
        return Err(AllocationError::PreconditionFailed(format!(
            "empty length interval {lo}:{hi}"
        )));
    }
    if lo < sigma.len() as u64 {
        return Err(AllocationError::PreconditionFailed(format!(
            "interval start {lo} below |sigma| = {}",
            sigma.len()
        )));
    }
    if capacities.len() as u64 != hi - lo + 1 {
        return Err(AllocationError::PreconditionFailed(format!(
            "expected {} capacities, got {}",
            hi - lo + 1,
            capacities.len()
        )));
    }
    let mut weighted = DyadicRational::zero();
    for (off, &a) in capacities.iter().enumerate() {
        let term = DyadicRational::from_int(a as i64).times_pow2(-((lo + off as u64) as i64));
        weighted += &term;
    }
    let threshold = DyadicRational::pow2(1 - sigma.len() as i64);
    if weighted < threshold {
        return Err(AllocationError::PreconditionFailed(format!(
            "weighted capacity {weighted} below {threshold}"
        )));
    }

    let mut j = BTreeSet::new();
    let mut s: Vec<BitString> = Vec::new();
    for i in lo..=hi {
        let a_i = capacities[(i - lo) as usize];
        if s.len() as u64 >= a_i {
            continue;
        }
        j.insert(i);
        let want = a_i - s.len() as u64;
        let width = i - sigma.len() as u64;
        assert!(width < 40, "splitting into 2^{width} cylinders refused");
        let total = 1u64 << width;
        let ranges = covered_ranges(&s, sigma, i);
        // walk the gaps between covered ranges in lexicographic order
        let mut taken = 0u64;
        let mut cursor = 0u64;
        let mut fresh: Vec<u64> = Vec::new();
        for (r_lo, r_hi) in ranges.iter().chain(std::iter::once(&(total, total))) {
            while cursor < *r_lo && taken < want {
                fresh.push(cursor);
                cursor += 1;
                taken += 1;
            }
            if taken >= want {
                break;
            }
            cursor = cursor.max(*r_hi);
        }
        for val in fresh {
            let mut tau = sigma.clone();
            for b in (0..width).rev() {
                tau.push((val >> b) & 1 == 1);
            }
            s.push(tau);
        }
    }
    Ok(AllocationResult { j, s })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    #[test]
    fn worked_example_one() {
        let r = allocate(&bs("0"), 1, 2, &[1, 2]).unwrap();
        assert_eq!(r.s, vec![bs("0")]);
        assert_eq!(r.j, BTreeSet::from([1, 2]));
        assert_eq!(r.measure(), DyadicRational::pow2(-1));
    }

    #[test]
    fn worked_example_two() {
        let r = allocate(&bs("0"), 2, 3, &[2, 4]).unwrap();
        assert_eq!(r.s, vec![bs("00"), bs("01")]);
        assert_eq!(r.j, BTreeSet::from([2, 3]));
    }

    #[test]
    fn precondition_bound() {
        let err = allocate(&BitString::new(), 1, 3, &[1, 1, 2]).unwrap_err();
        assert!(matches!(err, AllocationError::PreconditionFailed(_)));
    }

    #[test]
    fn empty_interval_rejected() {
        assert!(allocate(&bs("0"), 2, 1, &[]).is_err());
        assert!(allocate(&bs("00"), 1, 2, &[1, 1]).is_err());
    }

    #[test]
    fn splits_across_lengths() {
        // capacity 1 at length 1 forces the rest to be covered at length 2
        let r = allocate(&BitString::new(), 1, 2, &[1, 7]).unwrap();
        assert_eq!(r.s, vec![bs("0"), bs("10"), bs("11")]);
        assert_eq!(r.measure(), DyadicRational::one());
        assert_eq!(r.j, BTreeSet::from([1, 2]));
    }

    #[test]
    fn deterministic() {
        let a = allocate(&bs("1"), 2, 4, &[2, 3, 4]).unwrap();
        let b = allocate(&bs("1"), 2, 4, &[2, 3, 4]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.s, vec![bs("10"), bs("11")]);
        assert_eq!(a.j, BTreeSet::from([2, 3, 4]));
    }
}

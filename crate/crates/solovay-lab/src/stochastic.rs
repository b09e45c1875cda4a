//! Zero insertion and the selection rule that recovers the inserted bits.
//!
//! The construction takes a source sequence `A`, an order `h` and a
//! procedure `phi` that computes `h^{-1}` with declared step counts, and
//! builds `B` by inserting the `k`-th zero at position
//! `n_k = h^{-1}(k) + t(k)`, where `t(k)` is `phi`'s declared time. The
//! delay makes each insertion position computable from the preceding
//! non-inserted bits within the position itself, which is exactly what the
//! selection rule exploits: it queries `phi` with a step cap equal to the
//! current position and selects precisely when answer plus time lands on
//! the current index. On any sequence produced by the insertion the rule
//! selects the inserted zeros and nothing else, so the selected bits are
//! all zero and witness the bias.

use crate::bits::BitString;
use crate::staged::{OrderFn, StagedError};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StochasticError {
    #[error("NonMonotonePositions: position {position} for zero {k} does not increase")]
    NonMonotonePositions { k: u64, position: u64 },
    #[error("FunctionalMismatch: phi answered {got} for {k}, order inverse is {want}")]
    FunctionalMismatch { k: u64, got: u64, want: u64 },
    #[error("EmptySelection")]
    EmptySelection,
    #[error("order unusable: {0}")]
    InvalidOrder(StagedError),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Reply of a functional to one query.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FunctionalReply {
    Answer { value: u64, steps: u64 },
    NeedMoreOracle,
    DivergeAtBudget,
}

/// A table-driven oracle procedure with declared step accounting: query `k`
/// answers `value(k)` after `steps(k)` steps once the oracle prefix is at
/// least `oracle_needed(k)` bits long. Answers depend on the prefix only
/// through its length, so they never change when the prefix extends.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ScriptedFunctional {
    pub entries: Vec<ScriptEntry>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ScriptEntry {
    pub oracle_needed: u64,
    pub value: u64,
    pub steps: u64,
}

impl ScriptedFunctional {
    pub fn new(entries: Vec<ScriptEntry>) -> Self {
        ScriptedFunctional { entries }
    }

    /// Runs query `k` against an oracle prefix under a step cap.
    pub fn query(&self, oracle: &BitString, k: u64, step_cap: u64) -> FunctionalReply {
        let Some(entry) = self.entries.get(k as usize) else {
            return FunctionalReply::NeedMoreOracle;
        };
        if (oracle.len() as u64) < entry.oracle_needed {
            return FunctionalReply::NeedMoreOracle;
        }
        if entry.steps > step_cap {
            return FunctionalReply::DivergeAtBudget;
        }
        FunctionalReply::Answer { value: entry.value, steps: entry.steps }
    }

    /// Parses lines `k prefixLenRequired value steps` with contiguous `k`.
    pub fn parse(text: &str) -> Result<Self, StochasticError> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(StochasticError::Parse(format!(
                    "line {}: expected `k prefixLen value steps`",
                    lineno + 1
                )));
            }
            let nums: Vec<u64> = fields
                .iter()
                .map(|f| f.parse::<u64>())
                .collect::<Result<_, _>>()
                .map_err(|e| StochasticError::Parse(format!("line {}: {e}", lineno + 1)))?;
            if nums[0] as usize != entries.len() {
                return Err(StochasticError::Parse(format!(
                    "line {}: expected k = {}",
                    lineno + 1,
                    entries.len()
                )));
            }
            entries.push(ScriptEntry { oracle_needed: nums[1], value: nums[2], steps: nums[3] });
        }
        Ok(ScriptedFunctional { entries })
    }
}

impl fmt::Display for ScriptedFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.entries.iter().enumerate() {
            writeln!(f, "{} {} {} {}", k, e.oracle_needed, e.value, e.steps)?;
        }
        Ok(())
    }
}

/// The insertion transcript: the built prefix and where the zeros went.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InsertionRecord {
    pub b: BitString,
    pub inserted_positions: Vec<u64>,
}

impl InsertionRecord {
    /// Removes the inserted positions, recovering the source prefix.
    pub fn deleted(&self) -> BitString {
        let mut out = BitString::new();
        let mut next = 0usize;
        for (i, bit) in self.b.iter().enumerate() {
            if next < self.inserted_positions.len()
                && self.inserted_positions[next] == i as u64
            {
                next += 1;
            } else {
                out.push(bit);
            }
        }
        out
    }
}

/// Builds `B` of length `n` by inserting the `k`-th zero at position
/// `h^{-1}(k) + t(k)` and filling everything else with `a`'s bits in order.
///
/// `phi`'s value for `k` must agree with the order inverse; positions must
/// be strictly increasing. Insertion stops once a position falls at or
/// beyond the horizon (including when the order inverse clips or `phi`
/// wants more oracle than there is).
pub fn insert_zeroes(
    a: &BitString,
    h: &OrderFn,
    phi: &ScriptedFunctional,
    n: usize,
) -> Result<InsertionRecord, StochasticError> {
    let mut positions = Vec::new();
    let mut last: Option<u64> = None;
    for k in 0.. {
        let inv = match h.inverse(k) {
            Ok(inv) => inv,
            Err(e @ StagedError::NoWitness { .. }) => return Err(StochasticError::InvalidOrder(e)),
            Err(e) => return Err(StochasticError::InvalidOrder(e)),
        };
        if inv.clipped {
            break; // the true inverse lies beyond the horizon
        }
        match phi.query(a, k, u64::MAX) {
            FunctionalReply::Answer { value, steps } => {
                if value != inv.value as u64 {
                    return Err(StochasticError::FunctionalMismatch {
                        k,
                        got: value,
                        want: inv.value as u64,
                    });
                }
                let position = value + steps;
                if position >= n as u64 {
                    break;
                }
                if last.is_some_and(|p| position <= p) {
                    return Err(StochasticError::NonMonotonePositions { k, position });
                }
                last = Some(position);
                positions.push(position);
            }
            FunctionalReply::NeedMoreOracle | FunctionalReply::DivergeAtBudget => break,
        }
    }
    let mut b = BitString::new();
    let mut source = a.iter();
    let mut next = 0usize;
    for i in 0..n {
        if next < positions.len() && positions[next] == i as u64 {
            b.push(false);
            next += 1;
        } else {
            let Some(bit) = source.next() else { break };
            b.push(bit);
        }
    }
    if b.len() < n {
        // source exhausted; the horizon ends early
        return Ok(InsertionRecord { inserted_positions: positions, b });
    }
    Ok(InsertionRecord { b, inserted_positions: positions })
}

/// Transcript of one selection-rule run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SelectionRun {
    pub selected_positions: Vec<u64>,
    pub selected_bits: BitString,
    /// Largest oracle prefix any answered query declared it needed.
    pub max_oracle_used: u64,
}

/// Runs the total selection rule over a prefix of `B`.
///
/// At stage `n` the rule keeps the count `k` of bits selected so far and
/// the read prefix `x` (the first `n` bits of `B` with selections
/// removed), queries `phi` on `x` with step cap `n`, and selects the `n`-th
/// bit exactly when the query answers `value + steps = n`. Selection is
/// driven by timing alone, never by the bit values.
pub fn run_selection(b: &BitString, phi: &ScriptedFunctional) -> SelectionRun {
    let mut selected_positions = Vec::new();
    let mut selected_bits = BitString::new();
    let mut x = BitString::new();
    let mut k: u64 = 0;
    let mut max_oracle_used = 0u64;
    for n in 0..b.len() {
        let reply = phi.query(&x, k, n as u64);
        let select = match reply {
            FunctionalReply::Answer { value, steps } => {
                if let Some(e) = phi.entries.get(k as usize) {
                    max_oracle_used = max_oracle_used.max(e.oracle_needed);
                }
                value + steps == n as u64
            }
            _ => false,
        };
        if select {
            selected_positions.push(n as u64);
            selected_bits.push(b.bit(n));
            k += 1;
        } else {
            x.push(b.bit(n));
        }
    }
    SelectionRun { selected_positions, selected_bits, max_oracle_used }
}

/// Exact frequency of ones among the selected bits. The count pair is kept
/// as is; a frequency like 1/3 has no dyadic representation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Frequency {
    pub ones: u64,
    pub total: u64,
}

impl Frequency {
    pub fn is_zero(&self) -> bool {
        self.ones == 0
    }

    /// Exact comparison with `p/q`.
    pub fn equals_ratio(&self, p: u64, q: u64) -> bool {
        (self.ones as u128) * (q as u128) == (p as u128) * (self.total as u128)
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.ones, self.total)
    }
}

/// Frequency of ones among the selected bits, exact.
pub fn selected_bias(selected_bits: &BitString) -> Result<Frequency, StochasticError> {
    if selected_bits.is_empty() {
        return Err(StochasticError::EmptySelection);
    }
    let ones = selected_bits.iter().filter(|&b| b).count() as u64;
    Ok(Frequency { ones, total: selected_bits.len() as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    /// h(n) = floor(n/2) on 0..=bound; h^{-1}(k) = 2k+1.
    fn half_order(bound: usize) -> OrderFn {
        OrderFn::new((0..=bound as u64).map(|n| n / 2).collect()).unwrap()
    }

    /// phi for the half order with t(k) = k+1, so n_k = 3k+2.
    fn half_phi(count: usize) -> ScriptedFunctional {
        ScriptedFunctional::new(
            (0..count as u64)
                .map(|k| ScriptEntry { oracle_needed: 0, value: 2 * k + 1, steps: k + 1 })
                .collect(),
        )
    }

    #[test]
    fn insertion_positions_match_arithmetic() {
        let a = bs("1111111111");
        let rec = insert_zeroes(&a, &half_order(100), &half_phi(10), 12).unwrap();
        assert_eq!(rec.inserted_positions, vec![2, 5, 8, 11]);
        assert_eq!(rec.b, bs("110110110110").prefix(12));
        assert_eq!(rec.deleted(), bs("11111111"));
    }

    #[test]
    fn no_insertions_when_phi_slow() {
        let a = bs("10101010");
        let slow = ScriptedFunctional::new(vec![ScriptEntry {
            oracle_needed: 0,
            value: 1,
            steps: 1_000_000,
        }]);
        let rec = insert_zeroes(&a, &half_order(100), &slow, 8).unwrap();
        assert!(rec.inserted_positions.is_empty());
        assert_eq!(rec.b, a);
    }

    #[test]
    fn mismatch_detected() {
        let a = bs("1111");
        let wrong = ScriptedFunctional::new(vec![ScriptEntry {
            oracle_needed: 0,
            value: 2, // h^{-1}(0) = 1
            steps: 1,
        }]);
        let err = insert_zeroes(&a, &half_order(100), &wrong, 4).unwrap_err();
        assert_eq!(err, StochasticError::FunctionalMismatch { k: 0, got: 2, want: 1 });
    }

    #[test]
    fn non_monotone_detected() {
        // t(k) constant makes n_k = h^{-1}(k) + 1 repeat for the flat order
        let flat = OrderFn::new(vec![0, 0, 0, 0, 1, 2]).unwrap(); // h^{-1}(0) = 3
        let phi = ScriptedFunctional::new(vec![
            ScriptEntry { oracle_needed: 0, value: 3, steps: 1 },
            ScriptEntry { oracle_needed: 0, value: 4, steps: 0 },
        ]);
        let err = insert_zeroes(&bs("111111111"), &flat, &phi, 9).unwrap_err();
        assert_eq!(err, StochasticError::NonMonotonePositions { k: 1, position: 4 });
    }

    #[test]
    fn selection_recovers_insertions() {
        let a = bs("1111111111");
        let rec = insert_zeroes(&a, &half_order(100), &half_phi(10), 12).unwrap();
        let run = run_selection(&rec.b, &half_phi(10));
        assert_eq!(run.selected_positions, rec.inserted_positions);
        assert!(run.selected_bits.iter().all(|b| !b));
        let bias = selected_bias(&run.selected_bits).unwrap();
        assert!(bias.is_zero());
    }

    #[test]
    fn selection_ignores_bit_values() {
        // all-zero input: the rule still selects exactly the timed positions
        let a = bs("0000000000");
        let rec = insert_zeroes(&a, &half_order(100), &half_phi(10), 12).unwrap();
        assert_eq!(rec.b, bs("000000000000"));
        let run = run_selection(&rec.b, &half_phi(10));
        assert_eq!(run.selected_positions, vec![2, 5, 8, 11]);
    }

    #[test]
    fn selection_empty_when_phi_never_halts() {
        let phi = ScriptedFunctional::new(vec![ScriptEntry {
            oracle_needed: 0,
            value: 0,
            steps: u64::MAX,
        }]);
        let run = run_selection(&bs("010101"), &phi);
        assert!(run.selected_positions.is_empty());
        assert_eq!(selected_bias(&run.selected_bits), Err(StochasticError::EmptySelection));
    }

    #[test]
    fn bias_values() {
        assert!(selected_bias(&bs("0000000000")).unwrap().is_zero());
        let half = selected_bias(&bs("1010")).unwrap();
        assert!(half.equals_ratio(1, 2));
        let third = selected_bias(&bs("100")).unwrap();
        assert!(third.equals_ratio(1, 3));
        assert_eq!(third.to_string(), "1/3");
    }

    #[test]
    fn script_round_trip() {
        let phi = half_phi(4);
        let text = phi.to_string();
        assert_eq!(ScriptedFunctional::parse(&text).unwrap(), phi);
        assert!(ScriptedFunctional::parse("1 0 0 0\n").is_err(), "k must start at 0");
    }
}

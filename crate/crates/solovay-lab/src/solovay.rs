//! Solovay-function constructions and the weight-series machinery.
//!
//! The centerpiece is the step-count bound `g_S`: on a triple code
//! `m = <x, p, t>` it returns `|p|` when the machine maps `p` to `x` in
//! exactly `t` steps, and the summable fallback `2|m|` otherwise. Around it
//! sit the weight series `Omega_f = sum 2^(-f(n))`, the effective-test
//! component replaying increments of such a series, the rewrite of an
//! arbitrary weight sequence into a nondecreasing one with the same sum,
//! and the interval partition plus domination step that compare two weight
//! bounds block by block.

use crate::bits::{delimited_encode, BitReader, BitString};
use crate::dyadic::{DyadicInterval, DyadicRational};
use crate::ext::ExtNat;
use crate::machine::{Machine, RunOutcome};
use crate::staged::{partial_weight, StagedFunction};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolovayError {
    #[error("NotInRange")]
    NotInRange,
    /// The decoded step count exceeds the caller's budget; raise it.
    #[error("BudgetTooSmall: triple needs {needed} steps, budget {budget}")]
    BudgetTooSmall { needed: u64, budget: u64 },
    #[error("HorizonTooSmall: no cutoff below {horizon}")]
    HorizonTooSmall { horizon: usize },
    /// The per-interval inequality never holds within the stage bound.
    #[error("InvalidPartition: interval {n} never satisfies the weight inequality")]
    InvalidPartition { n: usize },
}

/// Encodes `(x, p, t)` as `D(x) . D(p) . D(binary(t))` with
/// `D(w) = gamma(|w|+1) . w`. Injective with decidable range.
pub fn encode_triple(x: &BitString, p: &BitString, t: u64) -> BitString {
    let mut out = BitString::new();
    delimited_encode(x, &mut out);
    delimited_encode(p, &mut out);
    delimited_encode(&BitString::binary_of(t), &mut out);
    out
}

/// Inverts [`encode_triple`]; rejects anything outside its range, including
/// non-canonical step numerals.
pub fn decode_triple(m: &BitString) -> Result<(BitString, BitString, u64), SolovayError> {
    let mut r = BitReader::new(m);
    let x = r.read_delimited().ok_or(SolovayError::NotInRange)?;
    let p = r.read_delimited().ok_or(SolovayError::NotInRange)?;
    let t_bits = r.read_delimited().ok_or(SolovayError::NotInRange)?;
    if !r.at_end() {
        return Err(SolovayError::NotInRange);
    }
    let t = t_bits.binary_value().ok_or(SolovayError::NotInRange)?;
    Ok((x, p, t))
}

/// The step-count bound `g_S(m)`.
///
/// If `m` decodes to `(x, p, t)` and the machine maps `p` to `x` in exactly
/// `t` steps, the value is `|p|`; in every other case, including strings
/// outside the triple range, it is `2|m|`. Total on machines whose runs are
/// budgeted, because verifying "exactly `t` steps" only ever runs `p` for
/// `t` steps. Errors rather than guesses when `t` exceeds the caller's
/// budget.
pub fn solovay_bound(
    machine: &dyn Machine,
    m: &BitString,
    budget: u64,
) -> Result<u64, SolovayError> {
    let fallback = 2 * m.len() as u64;
    let Ok((x, p, t)) = decode_triple(m) else {
        return Ok(fallback);
    };
    if t > budget {
        return Err(SolovayError::BudgetTooSmall { needed: t, budget });
    }
    match machine.run(&p, t) {
        RunOutcome::Halt { output, steps } if steps == t && output == x => Ok(p.len() as u64),
        _ => Ok(fallback),
    }
}

/// A partial sum of the weight series `Omega_f = sum_n 2^(-f(n))`, taken at
/// an explicit horizon (and, for staged tables, at an explicit stage).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OmegaSeries {
    terms: Vec<ExtNat>,
    horizon: usize,
    partial: DyadicRational,
}

impl OmegaSeries {
    pub fn from_table(table: &[ExtNat], horizon: usize) -> Self {
        let terms = table.to_vec();
        let partial = partial_weight(&terms, horizon);
        OmegaSeries { terms, horizon, partial }
    }

    /// Terms read off a staged table at one stage.
    pub fn from_staged(f: &StagedFunction, stage: usize, horizon: usize) -> Self {
        let terms: Vec<ExtNat> = (0..f.domain_len()).map(|n| f.value(n, stage)).collect();
        let partial = partial_weight(&terms, horizon);
        OmegaSeries { terms, horizon, partial }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn partial_sum(&self) -> &DyadicRational {
        &self.partial
    }
}

/// Finds the least `s < n` such that `cap - sum_{i <= s} 2^(-f(i))` is at
/// most `2^(-k)`: beyond `s` the tail is provably small, provided the
/// caller's certificate that the whole series is bounded by `cap` is
/// honest.
pub fn tail_cutoff(
    f: &[ExtNat],
    n: usize,
    k: u64,
    cap: &DyadicRational,
) -> Result<usize, SolovayError> {
    assert!(n <= f.len());
    let bound = DyadicRational::pow2(-(k as i64));
    let mut partial = DyadicRational::zero();
    for (s, value) in f.iter().enumerate().take(n) {
        partial += &value.weight();
        assert!(&partial <= cap, "weight certificate violated at index {s}");
        if cap - &partial <= bound {
            return Ok(s);
        }
    }
    Err(SolovayError::HorizonTooSmall { horizon: n })
}

/// One interval emitted into a test component, stamped with the replay
/// index at which it appeared.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StampedInterval {
    pub stage: u64,
    pub interval: DyadicInterval,
}

/// A single test component: intervals with stage stamps and their exact
/// total length.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TestComponent {
    pub c: u32,
    pub intervals: Vec<StampedInterval>,
    pub total_length: DyadicRational,
}

/// Replays the increment sequence of `Omega_f` and emits an interval for
/// every matched increment.
///
/// Pairs `(n, s)` are processed in lexicographic order. The first stage at
/// which `f(n)` is finite contributes `2^(-f(n))` at that stage's value; a
/// unit drop between stages contributes `2^(-old value)`. The running
/// per-index accumulation `b` is therefore `2^(-current value)`. An
/// increment due to `n` is `c`-matched when `2^(c+2) * b <= 2^(-k(n))`,
/// with `k(n)` read from `k_table` at the same stage (clamped to its last
/// stage). A matched increment of size `d` emits a closed interval of
/// length `2d` starting at the current partial sum or at the supremum of
/// everything emitted so far, whichever is larger.
///
/// `budget` caps the number of pairs replayed.
pub fn build_test_component(
    f: &StagedFunction,
    k_table: &StagedFunction,
    c: u32,
    budget: usize,
) -> TestComponent {
    assert!(f.is_unit_step(), "replay needs a unit-step refined table");
    assert!(k_table.domain_len() >= f.domain_len(), "k table must cover the domain");
    let mut intervals = Vec::new();
    let mut total_length = DyadicRational::zero();
    let mut partial = DyadicRational::zero(); // a_i
    let mut supremum = DyadicRational::zero();
    let mut replayed = 0usize;

    'replay: for n in 0..f.domain_len() {
        let mut seen_finite = false;
        for s in 0..f.stage_len() {
            if replayed == budget {
                break 'replay;
            }
            let value = f.value(n, s);
            let increment = match (seen_finite, value) {
                (false, ExtNat::Fin(_)) => {
                    seen_finite = true;
                    Some(value.weight())
                }
                (true, ExtNat::Fin(v)) if f.value(n, s - 1) == ExtNat::Fin(v + 1) => {
                    Some(f.value(n, s - 1).weight())
                }
                _ => None,
            };
            let Some(d) = increment else { continue };
            replayed += 1;
            // b = accumulated weight due to n = 2^(-current value)
            let b = value.weight();
            let matched = match k_table.value_clamped(n, s) {
                ExtNat::Fin(k) => b.times_pow2(c as i64 + 2) <= DyadicRational::pow2(-(k as i64)),
                ExtNat::Inf => false,
            };
            if matched {
                let start = supremum.clone().max(partial.clone());
                let end = &start + &d.times_pow2(1);
                supremum = end.clone();
                total_length += &d.times_pow2(1);
                intervals.push(StampedInterval {
                    stage: replayed as u64 - 1,
                    interval: DyadicInterval::new(start, end),
                });
            }
            partial += &d;
        }
    }
    TestComponent { c, intervals, total_length }
}

/// Serializes intervals as lines `c stage left_num left_exp right_num right_exp`.
pub fn write_intervals(component: &TestComponent) -> String {
    let mut out = String::new();
    for si in &component.intervals {
        out.push_str(&format!(
            "{} {} {} {} {} {}\n",
            component.c,
            si.stage,
            si.interval.lo.numerator(),
            si.interval.lo.exponent(),
            si.interval.hi.numerator(),
            si.interval.hi.exponent(),
        ));
    }
    out
}

/// One block of the order rewrite: `copies` occurrences of `value`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct OrderBlock {
    pub value: u64,
    pub copies: u64,
}

impl OrderBlock {
    /// Exact weight of the whole block, `copies * 2^(-value)`.
    pub fn weight(&self) -> DyadicRational {
        DyadicRational::from_int(self.copies as i64).times_pow2(-(self.value as i64))
    }
}

/// Rewrites each term `2^(-k_n)` of a weight sequence as `2^(k'_n - k_n)`
/// copies of `2^(-k'_n)`, where `k'_n = max { k_i : i <= n }`. The emitted
/// values are nondecreasing and every block preserves its term's weight
/// exactly, so the series keeps its sum while becoming an order.
pub fn rewrite_to_order(k: &[u64], m: usize) -> Vec<OrderBlock> {
    assert!(m <= k.len());
    let mut blocks = Vec::with_capacity(m);
    let mut running_max = 0u64;
    for (n, &kn) in k[..m].iter().enumerate() {
        running_max = if n == 0 { kn } else { running_max.max(kn) };
        let excess = running_max - kn;
        assert!(excess < 63, "block of 2^{excess} copies refused");
        blocks.push(OrderBlock { value: running_max, copies: 1u64 << excess });
    }
    blocks
}

/// Flattens rewrite blocks into the order's value list.
pub fn flatten_blocks(blocks: &[OrderBlock]) -> Vec<u64> {
    let total: u64 = blocks.iter().map(|b| b.copies).sum();
    assert!(total <= 1 << 24, "flattening {total} entries refused");
    let mut out = Vec::with_capacity(total as usize);
    for b in blocks {
        for _ in 0..b.copies {
            out.push(b.value);
        }
    }
    out
}

/// A partition interval `[lo, hi]` whose witness stage is its right
/// endpoint `hi`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PartitionInterval {
    pub lo: u64,
    pub hi: u64,
}

/// Search abandoned: index `n` exhausted the horizon starting from `s`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct StuckAt {
    pub n: usize,
    pub s: u64,
}

/// Consecutive intervals produced by [`build_partition`], plus the first
/// stuck index if the horizon ran out.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Partition {
    pub intervals: Vec<PartitionInterval>,
    pub stuck: Option<StuckAt>,
}

/// Builds consecutive intervals `I_n = [s, t]` with `min I_n > n` such that
/// the stage-`t` weight of `h` over `I_n` reaches `2^(-p) * 2^(-g(n))`.
///
/// For each `n` the start `s` is the least integer above `n` not used by
/// earlier intervals, and `t` is searched strictly above `s`, doubling as
/// the stage at which `h` is read (clamped to its last stage). A search
/// that exhausts `horizon` stops the construction and reports the stuck
/// index, a legitimate outcome.
pub fn build_partition(
    g: &[ExtNat],
    h: &StagedFunction,
    p: u64,
    horizon: u64,
) -> Partition {
    assert!(h.domain_len() as u64 > horizon, "h must be defined up to the horizon");
    let mut intervals = Vec::new();
    let mut next_free = 1u64;
    for (n, gn) in g.iter().enumerate() {
        let s = next_free.max(n as u64 + 1);
        let target = gn.weight().times_pow2(-(p as i64));
        let mut found = None;
        for t in s + 1..=horizon {
            let mut sum = DyadicRational::zero();
            for i in s..=t {
                sum += &h.value_clamped(i as usize, t as usize).weight();
            }
            if sum >= target {
                found = Some(t);
                break;
            }
        }
        match found {
            Some(t) => {
                intervals.push(PartitionInterval { lo: s, hi: t });
                next_free = t + 1;
            }
            None => {
                return Partition { intervals, stuck: Some(StuckAt { n, s }) };
            }
        }
    }
    Partition { intervals, stuck: None }
}

/// The dominated table produced by [`dominate`], aligned on `0..=max hi`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Dominated {
    pub values: Vec<ExtNat>,
    /// Stage chosen per interval, in interval order.
    pub stages: Vec<usize>,
}

/// Freezes `h` on each partition interval at the least stage `t` where
/// `2^(-g(n)) <= 2^c * sum_{i in I_n} 2^(-h_t(i))`.
///
/// Because stages only shrink values, the frozen table dominates the
/// horizon values of `h` pointwise while keeping every block inequality
/// exact. Indices below the first interval keep their horizon values.
pub fn dominate(
    g: &[ExtNat],
    h: &StagedFunction,
    partition: &Partition,
    c: u64,
) -> Result<Dominated, SolovayError> {
    let intervals = &partition.intervals;
    assert!(intervals.len() <= g.len(), "partition longer than g");
    let max_hi = intervals.last().map_or(0, |iv| iv.hi);
    assert!(h.domain_len() as u64 > max_hi, "h must cover every interval");
    let mut values: Vec<ExtNat> = (0..=max_hi as usize)
        .map(|i| *h.row(i).last().expect("nonempty row"))
        .collect();
    let mut stages = Vec::with_capacity(intervals.len());
    for (n, iv) in intervals.iter().enumerate() {
        let lhs = g[n].weight();
        let mut chosen = None;
        for t in 0..h.stage_len() {
            let mut sum = DyadicRational::zero();
            for i in iv.lo..=iv.hi {
                sum += &h.value(i as usize, t).weight();
            }
            if lhs <= sum.times_pow2(c as i64) {
                chosen = Some(t);
                break;
            }
        }
        let Some(t) = chosen else {
            return Err(SolovayError::InvalidPartition { n });
        };
        stages.push(t);
        for i in iv.lo..=iv.hi {
            values[i as usize] = h.value(i as usize, t);
        }
    }
    Ok(Dominated { values, stages })
}

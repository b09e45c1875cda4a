//! Randomness-deficiency reporting and the measure-targeted covering
//! procedure.
//!
//! The covering procedure turns an enumerated list of cylinders into a set
//! of covering strings with controlled lengths. For each incoming cylinder
//! `[sigma]` it picks a fresh start `s = 2^N`, charges an auxiliary
//! interval of length `2^(-|sigma|+1+k)` to the bookkeeping list `V_k`,
//! waits for the partial sums of `sum 2^(-g(i))` to cross that interval,
//! and then hands the stretch `[s, t]` with capacities
//! `a_i = floor(2^(i-g(i)-k))` to the cylinder allocator. Every integer the
//! run touches goes into a ledger; `N` is always one above the ledger
//! maximum, which keeps the chosen lengths spaced apart across cylinders.

use crate::allocation::{allocate, AllocationError, AllocationResult};
use crate::bits::BitString;
use crate::dyadic::{DyadicInterval, DyadicRational};
use crate::ext::{ExtInt, ExtNat};
use crate::machine::{k_approx, Machine};
use crate::staged::partial_weight;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MltestError {
    #[error("allocation failed for cylinder {sigma}: {source}")]
    Allocation {
        sigma: BitString,
        #[source]
        source: AllocationError,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

/// Randomness deficiency `|x| - K_budget(x)`; `-inf` while no program has
/// been found. Nondecreasing in the budget.
pub fn deficiency(machine: &dyn Machine, x: &BitString, budget: u64) -> ExtInt {
    match k_approx(machine, x, budget) {
        ExtNat::Fin(k) => ExtInt::Fin(x.len() as i64 - k as i64),
        ExtNat::Inf => ExtInt::NegInf,
    }
}

/// Keeps `g(i)` only where `2^g(i) <= i^2` (so `g(i) <= 2 log2 i`), and
/// replaces everything else with `inf`. The comparison is exact integer
/// arithmetic; index 0 always maps to `inf` because `0^2 = 0`.
pub fn restrict_to_log_bound(g: &[ExtNat]) -> Vec<ExtNat> {
    g.iter()
        .enumerate()
        .map(|(i, v)| match v {
            ExtNat::Fin(value) if *value <= 127 => {
                let lhs: u128 = 1u128 << value;
                let rhs = (i as u128) * (i as u128);
                if lhs <= rhs {
                    ExtNat::Fin(*value)
                } else {
                    ExtNat::Inf
                }
            }
            _ => ExtNat::Inf,
        })
        .collect()
}

/// A stage-stamped cylinder enumeration, the input side of a test
/// component.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CylinderSet {
    pub entries: Vec<(u64, BitString)>,
}

impl CylinderSet {
    pub fn new(entries: Vec<(u64, BitString)>) -> Self {
        CylinderSet { entries }
    }

    /// Sum of the cylinder measures `2^(-|sigma|)`, counted with
    /// multiplicity.
    pub fn total_measure(&self) -> DyadicRational {
        let mut sum = DyadicRational::zero();
        for (_, sigma) in &self.entries {
            sum += &DyadicRational::pow2(-(sigma.len() as i64));
        }
        sum
    }

    /// In processing order: by stage stamp, ties in list order.
    pub fn in_stage_order(&self) -> Vec<(u64, BitString)> {
        let mut v = self.entries.clone();
        v.sort_by_key(|(stage, _)| *stage);
        v
    }

    /// Parses lines `stage sigma`.
    pub fn parse(text: &str) -> Result<Self, MltestError> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(MltestError::Parse(format!(
                    "line {}: expected `stage sigma`",
                    lineno + 1
                )));
            }
            let stage = fields[0]
                .parse::<u64>()
                .map_err(|e| MltestError::Parse(format!("line {}: {e}", lineno + 1)))?;
            let sigma = BitString::parse(fields[1])
                .map_err(|e| MltestError::Parse(format!("line {}: {e}", lineno + 1)))?;
            entries.push((stage, sigma));
        }
        Ok(CylinderSet { entries })
    }

    pub fn write(&self) -> String {
        let mut out = String::new();
        for (stage, sigma) in &self.entries {
            out.push_str(&format!("{stage} {sigma}\n"));
        }
        out
    }
}

/// How a covering run ended.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CoverStatus {
    /// Every cylinder was covered.
    Completed,
    /// The crossing wait for this cylinder can never end: the whole
    /// remaining weight of the series stays inside the charged interval.
    StuckAtStep4 { sigma: BitString, s: u64 },
    /// The fresh start exceeded the horizon, or the round budget ran out.
    BudgetExhausted,
}

/// One completed round of the covering procedure.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoverRound {
    pub sigma: BitString,
    pub fresh_n: u64,
    pub s: u64,
    pub t: u64,
    pub v_interval: DyadicInterval,
    pub allocation: AllocationResult,
}

/// Transcript of a covering run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoverRun {
    pub k: u32,
    pub rounds: Vec<CoverRound>,
    /// Intervals charged to `V_k`, including one for a stuck cylinder.
    pub v_intervals: Vec<DyadicInterval>,
    pub status: CoverStatus,
}

impl CoverRun {
    /// Exact total length of the charged intervals.
    pub fn v_total_length(&self) -> DyadicRational {
        let mut sum = DyadicRational::zero();
        for iv in &self.v_intervals {
            sum += &iv.length();
        }
        sum
    }

    /// All covering strings produced so far, with their source cylinder.
    pub fn covering_strings(&self) -> Vec<(&BitString, &BitString)> {
        let mut out = Vec::new();
        for round in &self.rounds {
            for tau in &round.allocation.s {
                out.push((&round.sigma, tau));
            }
        }
        out
    }
}

/// Capacity `floor(2^(i - g(i) - k))`, saturating; `inf` gives 0.
fn capacity(i: u64, g_i: ExtNat, k: u32) -> u64 {
    match g_i {
        ExtNat::Inf => 0,
        ExtNat::Fin(g) => {
            let e = i as i128 - g as i128 - k as i128;
            if e < 0 {
                0
            } else if e >= 63 {
                u64::MAX
            } else {
                1u64 << e
            }
        }
    }
}

/// Runs the covering procedure on a cylinder enumeration.
///
/// `g` must already be restricted to the log bound (see
/// [`restrict_to_log_bound`]) and must be defined on `0..=horizon_n`; the
/// cylinder measures must sum to at most `2^(-2k-1)`. `budget` caps the
/// number of cylinders processed. Outcomes are encoded in the status; the
/// only hard error is a failed allocation precondition, which a scripted
/// run with integral capacities never triggers.
pub fn cover_with_lengths(
    cylinders: &CylinderSet,
    g: &[ExtNat],
    k: u32,
    horizon_n: u64,
    budget: usize,
) -> Result<CoverRun, MltestError> {
    assert!(
        g.len() as u64 > horizon_n,
        "g must be defined up to the horizon"
    );
    let g_check = restrict_to_log_bound(g);
    assert!(g_check == g, "g must be preprocessed to the log bound");
    assert!(
        cylinders.total_measure() <= DyadicRational::pow2(-(2 * k as i64) - 1),
        "cylinder measure exceeds 2^(-2k-1)"
    );

    let mut ledger_max: u64 = k as u64;
    let mut rounds: Vec<CoverRound> = Vec::new();
    let mut v_intervals: Vec<DyadicInterval> = Vec::new();

    for (processed, (_stage, sigma)) in cylinders.in_stage_order().into_iter().enumerate() {
        if processed == budget {
            return Ok(CoverRun { k, rounds, v_intervals, status: CoverStatus::BudgetExhausted });
        }
        ledger_max = ledger_max.max(sigma.len() as u64);
        let fresh_n = ledger_max + 1;
        if fresh_n >= 63 {
            return Ok(CoverRun { k, rounds, v_intervals, status: CoverStatus::BudgetExhausted });
        }
        let s = 1u64 << fresh_n;
        if s > horizon_n {
            return Ok(CoverRun { k, rounds, v_intervals, status: CoverStatus::BudgetExhausted });
        }
        ledger_max = ledger_max.max(fresh_n).max(s);

        // charge the bookkeeping interval before waiting
        let below_s = partial_weight(g, s as usize);
        let charge = DyadicRational::pow2(1 + k as i64 - sigma.len() as i64);
        let v_interval = DyadicInterval::new(below_s.clone(), &below_s + &charge);
        v_intervals.push(v_interval.clone());

        // wait for the partial sums to leave the charged interval
        let threshold = &below_s + &charge;
        let mut crossing = None;
        for t in s..=horizon_n {
            if partial_weight(g, t as usize + 1) > threshold {
                crossing = Some(t);
                break;
            }
        }
        let Some(t) = crossing else {
            return Ok(CoverRun {
                k,
                rounds,
                v_intervals,
                status: CoverStatus::StuckAtStep4 { sigma, s },
            });
        };
        ledger_max = ledger_max.max(t);

        let caps: Vec<u64> = (s..=t).map(|i| capacity(i, g[i as usize], k)).collect();
        let allocation = allocate(&sigma, s, t, &caps)
            .map_err(|source| MltestError::Allocation { sigma: sigma.clone(), source })?;
        rounds.push(CoverRound { sigma, fresh_n, s, t, v_interval, allocation });
    }
    Ok(CoverRun { k, rounds, v_intervals, status: CoverStatus::Completed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::ExtNat::{Fin, Inf};
    use crate::machine::CodecMachine;

    fn bs(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    #[test]
    fn deficiency_pinned() {
        assert_eq!(deficiency(&CodecMachine, &bs("0000"), 10_000), ExtInt::Fin(-3));
        assert_eq!(deficiency(&CodecMachine, &BitString::new(), 10_000), ExtInt::Fin(-2));
        assert_eq!(deficiency(&CodecMachine, &bs("0000"), 0), ExtInt::NegInf);
    }

    #[test]
    fn deficiency_nondecreasing_in_budget() {
        let x = bs("0110");
        let mut prev = ExtInt::NegInf;
        for budget in 0..30 {
            let d = deficiency(&CodecMachine, &x, budget);
            assert!(d >= prev);
            prev = d;
        }
    }

    #[test]
    fn log_bound_examples() {
        let g = [Fin(0), Fin(1), Fin(2), Fin(2)];
        assert_eq!(restrict_to_log_bound(&g), vec![Inf, Inf, Fin(2), Fin(2)]);

        let all_inf = [Inf, Inf];
        assert_eq!(restrict_to_log_bound(&all_inf), vec![Inf, Inf]);

        // g(i) = 2*ceil(log2(i+1)) always exceeds 2*log2(i)
        let g: Vec<ExtNat> = (0..=8u64)
            .map(|i| Fin(2 * (64 - (i.max(1)).leading_zeros() as u64 - u64::from(i.is_power_of_two() && i > 0))))
            .collect();
        for (i, v) in restrict_to_log_bound(&g).iter().enumerate() {
            if let ExtNat::Fin(value) = v {
                assert!((1u128 << value) <= (i as u128 * i as u128));
            }
        }
    }

    #[test]
    fn log_bound_keeps_exact_boundary() {
        // 2^2 = 4 <= 2^2: kept at i = 2
        let g = [Fin(2), Fin(2), Fin(2)];
        assert_eq!(restrict_to_log_bound(&g), vec![Inf, Inf, Fin(2)]);
    }

    #[test]
    fn empty_cover_completes() {
        let g = restrict_to_log_bound(&vec![Fin(2); 40]);
        let run = cover_with_lengths(&CylinderSet::default(), &g, 0, 39, 10).unwrap();
        assert_eq!(run.status, CoverStatus::Completed);
        assert!(run.rounds.is_empty());
        assert!(run.v_total_length().is_zero());
    }

    /// g with weight 1/4 from index 8 on; a single cylinder of length 2.
    fn scripted_g(horizon: usize) -> Vec<ExtNat> {
        let mut g = vec![Inf; horizon + 1];
        for (i, slot) in g.iter_mut().enumerate().skip(8) {
            let _ = i;
            *slot = Fin(2);
        }
        restrict_to_log_bound(&g)
    }

    #[test]
    fn scripted_cover_completes() {
        let g = scripted_g(40);
        assert_eq!(g[8], Fin(2), "2^2 <= 64 keeps the value");
        let cyls = CylinderSet::new(vec![(0, bs("00"))]);
        let run = cover_with_lengths(&cyls, &g, 0, 40, 10).unwrap();
        assert_eq!(run.status, CoverStatus::Completed);
        assert_eq!(run.rounds.len(), 1);
        let round = &run.rounds[0];
        // ledger: k=0, |sigma|=2 -> N=3, s=8
        assert_eq!(round.fresh_n, 3);
        assert_eq!(round.s, 8);
        // crossing: sum from 8 of 1/4 must exceed 2^(-2+1+0) = 1/2: t = 10
        assert_eq!(round.t, 10);
        assert_eq!(round.v_interval.length(), DyadicRational::pow2(-1));
        // exact cover of [sigma]
        assert_eq!(round.allocation.measure(), DyadicRational::pow2(-2));
        assert!(round.allocation.s.iter().all(|tau| bs("00").is_prefix_of(tau)));
        // V charge = 2^(k+1) * cylinder measure, exactly
        assert_eq!(run.v_total_length(), DyadicRational::pow2(-1));
    }

    #[test]
    fn scripted_cover_stuck() {
        // weight after s is zero: crossing impossible
        let mut g = vec![Inf; 41];
        g[8] = Fin(2);
        let g = restrict_to_log_bound(&g);
        let cyls = CylinderSet::new(vec![(0, bs("00"))]);
        let run = cover_with_lengths(&cyls, &g, 0, 40, 10).unwrap();
        assert_eq!(run.status, CoverStatus::StuckAtStep4 { sigma: bs("00"), s: 8 });
        // the charged interval stays in V_k
        assert_eq!(run.v_total_length(), DyadicRational::pow2(-1));
    }

    #[test]
    fn cover_budget_exhaustion() {
        let g = scripted_g(40);
        let cyls = CylinderSet::new(vec![(0, bs("000")), (1, bs("000"))]);
        let run = cover_with_lengths(&cyls, &g, 0, 40, 1).unwrap();
        assert_eq!(run.status, CoverStatus::BudgetExhausted);
        assert_eq!(run.rounds.len(), 1);
        // horizon too small for the fresh start
        let g_short = scripted_g(6);
        let cyls = CylinderSet::new(vec![(0, bs("00"))]);
        let run = cover_with_lengths(&cyls, &g_short, 0, 6, 10).unwrap();
        assert_eq!(run.status, CoverStatus::BudgetExhausted);
    }

    #[test]
    fn cylinder_list_round_trip() {
        let cyls = CylinderSet::new(vec![(3, bs("01")), (1, bs("-"))]);
        let text = cyls.write();
        assert_eq!(CylinderSet::parse(&text).unwrap(), cyls);
        assert_eq!(
            cyls.in_stage_order(),
            vec![(1, BitString::new()), (3, bs("01"))]
        );
        assert_eq!(
            cyls.total_measure(),
            DyadicRational::pow2(-2) + DyadicRational::one()
        );
    }

    #[test]
    fn capacity_rules() {
        assert_eq!(capacity(8, Fin(2), 0), 64);
        assert_eq!(capacity(8, Fin(2), 3), 8);
        assert_eq!(capacity(3, Fin(5), 0), 0, "negative exponent floors to zero");
        assert_eq!(capacity(8, Inf, 0), 0);
        assert_eq!(capacity(80, Fin(2), 0), u64::MAX, "saturates");
    }
}

//! Seeded instance generators for tests and the CLI.
//!
//! Construction logic never consumes randomness; these helpers only
//! manufacture inputs (sequences, orders, functionals, staged tables,
//! capacity vectors), deterministically from an explicit seed.

use crate::bits::BitString;
use crate::ext::ExtNat;
use crate::machine::{k_approx, Machine};
use crate::staged::{OrderFn, StagedFunction};
use crate::stochastic::{ScriptEntry, ScriptedFunctional};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_bits(rng: &mut impl Rng, len: usize) -> BitString {
    BitString::from_bits((0..len).map(|_| rng.gen_bool(0.5)).collect())
}

/// A random order on `0..=bound` with `h(0) = 0` and increments at most
/// `max_step`.
pub fn random_order(rng: &mut impl Rng, bound: usize, max_step: u64) -> OrderFn {
    let mut values = Vec::with_capacity(bound + 1);
    let mut v = 0u64;
    values.push(v);
    for _ in 1..=bound {
        v += rng.gen_range(0..=max_step);
        values.push(v);
    }
    OrderFn::new(values).expect("nondecreasing by construction")
}

/// A functional consistent with `h` for the zero-insertion construction:
/// strictly increasing declared times and oracle requirements small enough
/// that the selection rule can replay every insertion.
pub fn functional_for(rng: &mut impl Rng, h: &OrderFn, queries: usize) -> ScriptedFunctional {
    let mut entries = Vec::with_capacity(queries);
    let mut t: u64 = 0;
    for k in 0..queries as u64 {
        let Ok(inv) = h.inverse(k) else { break };
        if inv.clipped {
            break;
        }
        t += 1 + rng.gen_range(0..=3);
        let position = inv.value as u64 + t;
        let slack = position - k; // oracle available at selection time
        let oracle_needed = rng.gen_range(0..=slack);
        entries.push(ScriptEntry { oracle_needed, value: inv.value as u64, steps: t });
    }
    ScriptedFunctional::new(entries)
}

/// A staged table with nonincreasing rows; each row may open with a run of
/// `inf` before its first finite value.
pub fn random_staged(
    rng: &mut impl Rng,
    domain: usize,
    stages: usize,
    max_value: u64,
) -> StagedFunction {
    assert!(stages >= 1);
    let mut rows = Vec::with_capacity(domain);
    for _ in 0..domain {
        let mut row = Vec::with_capacity(stages);
        let inf_prefix = if rng.gen_bool(0.2) { rng.gen_range(0..stages) } else { 0 };
        let mut value = rng.gen_range(0..=max_value);
        for t in 0..stages {
            if t < inf_prefix {
                row.push(ExtNat::Inf);
            } else {
                row.push(ExtNat::Fin(value));
                value = value.saturating_sub(rng.gen_range(0..=2));
            }
        }
        rows.push(row);
    }
    StagedFunction::new(rows).expect("nonincreasing by construction")
}

/// Complexity approximations of `binary(0..domain)` on a budget schedule,
/// as a staged table: row `n`, column `t` holds `K_budgets[t](binary(n))`.
pub fn machine_k_table(machine: &dyn Machine, domain: usize, budgets: &[u64]) -> StagedFunction {
    assert!(budgets.windows(2).all(|w| w[0] <= w[1]), "budgets must be nondecreasing");
    let rows: Vec<Vec<ExtNat>> = (0..domain as u64)
        .map(|n| {
            let x = BitString::binary_of(n);
            budgets.iter().map(|&b| k_approx(machine, &x, b)).collect()
        })
        .collect();
    StagedFunction::new(rows).expect("complexity approximations are nonincreasing")
}

/// A capacity vector on `[lo, hi]` meeting the allocation precondition for
/// `sigma`: random entries, then raised right-to-left until the weighted
/// sum reaches `2^(-|sigma|+1)`.
pub fn random_capacities(
    rng: &mut impl Rng,
    sigma: &BitString,
    lo: u64,
    hi: u64,
    max_entry: u64,
) -> Vec<u64> {
    assert!(lo >= sigma.len() as u64 && lo <= hi);
    let mut caps: Vec<u64> = (lo..=hi).map(|_| rng.gen_range(0..=max_entry)).collect();
    // needed: sum caps[i] * 2^(hi - i) >= 2^(hi - |sigma| + 1), in units of 2^(-hi)
    let needed: u128 = 1u128 << (hi - sigma.len() as u64 + 1);
    loop {
        let have: u128 = caps
            .iter()
            .enumerate()
            .map(|(off, &a)| (a as u128) << (hi - lo - off as u64))
            .sum();
        if have >= needed {
            return caps;
        }
        let missing = needed - have;
        let extra = missing.div_ceil(1u128 << (hi - lo)) as u64; // units at length lo
        caps[0] += extra.max(1);
    }
}

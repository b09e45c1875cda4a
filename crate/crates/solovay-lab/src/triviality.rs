//! The K-triviality toolkit: triviality constants, the request
//! construction, trivial trees, the order transform, gap points, and
//! hitting sets.

use crate::bits::BitString;
use crate::dyadic::DyadicRational;
use crate::ext::{ExtInt, ExtNat};
use crate::kc::Request;
use crate::machine::{k_approx, HaltingEvent, Machine};
use crate::solovay::Partition;
use crate::staged::{OrderFn, StagedFunction};
use std::collections::{BTreeSet, HashMap};

/// `f <= bound + c` with the usual conventions for `inf`.
fn within(f: ExtNat, bound: ExtNat, c: i64) -> bool {
    match (f, bound) {
        (_, ExtNat::Inf) => true,
        (ExtNat::Inf, _) => false,
        (ExtNat::Fin(a), ExtNat::Fin(b)) => a as i128 <= b as i128 + c as i128,
    }
}

/// Largest excess `K_budget(A restricted to n) - g(n)` over the supplied
/// prefixes; the sequence is g-trivial at this horizon with constant `c`
/// exactly when the result is at most `c`. `-inf` when every term vanishes
/// (all `g` values infinite), `inf` when some prefix has no program within
/// the budget while `g` is finite there.
pub fn trivial_constant(
    prefixes: &[BitString],
    g: &[ExtNat],
    machine: &dyn Machine,
    budget: u64,
) -> ExtInt {
    assert!(g.len() >= prefixes.len(), "g must cover every prefix length");
    for w in prefixes.windows(2) {
        assert!(w[0].is_prefix_of(&w[1]), "prefixes must form a chain");
        assert!(w[1].len() == w[0].len() + 1, "prefixes must grow one bit at a time");
    }
    let mut best = ExtInt::NegInf;
    for (n, prefix) in prefixes.iter().enumerate() {
        let excess = match (k_approx(machine, prefix, budget), g[n]) {
            (_, ExtNat::Inf) => ExtInt::NegInf,
            (ExtNat::Inf, ExtNat::Fin(_)) => ExtInt::PosInf,
            (ExtNat::Fin(k), ExtNat::Fin(gv)) => ExtInt::Fin(k as i64 - gv as i64),
        };
        best = best.max(excess);
    }
    best
}

/// The request construction.
///
/// For every partition index `n` (capped by `horizon`) and every string
/// `sigma` of length `n`, scan the extensions `tau` of `sigma` of length
/// `max I_n` in lexicographic order; as soon as one has, for every
/// `i` in `I_n`, some event describing `tau` restricted to `i` by a program
/// of length at most `h(i) + d`, emit the request
/// `(sigma, g_s(n) + c + d)`. The emitted weight is covered, block by
/// block, by `2^(c+d)` times the weight of the descriptions the events
/// already paid for.
pub fn build_requests(
    g_s: &[ExtNat],
    h: &[ExtNat],
    c: u64,
    d: u64,
    partition: &Partition,
    events: &[HaltingEvent],
    horizon: usize,
) -> Vec<Request> {
    let count = partition.intervals.len().min(horizon);
    assert!(count <= 16, "enumerating 2^{count} request sources refused");
    let mut shortest: HashMap<&BitString, u64> = HashMap::new();
    for e in events {
        let len = e.program.len() as u64;
        shortest
            .entry(&e.output)
            .and_modify(|best| *best = (*best).min(len))
            .or_insert(len);
    }
    let described = |tau: &BitString, i: u64| -> bool {
        let need = match h[i as usize] {
            ExtNat::Fin(v) => v + d,
            ExtNat::Inf => return true,
        };
        shortest.get(&tau.prefix(i as usize)).is_some_and(|&len| len <= need)
    };

    let mut requests = Vec::new();
    for (n, iv) in partition.intervals.iter().take(count).enumerate() {
        assert!(h.len() as u64 > iv.hi, "h must cover the interval");
        let ExtNat::Fin(gsn) = g_s[n] else { continue };
        for sigma in BitString::new().extensions(n) {
            let witness = sigma
                .extensions(iv.hi as usize)
                .find(|tau| (iv.lo..=iv.hi).all(|i| described(tau, i)));
            if witness.is_some() {
                requests.push(Request::new(sigma.to_string(), gsn + c + d));
            }
        }
    }
    requests
}

/// A prefix-closed tree whose full-level strings all satisfy the
/// complexity bound along every prefix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TrivialTree {
    /// The admissible levels `n_k = g^{-1}(k)`, deduplicated, within depth.
    pub levels: Vec<usize>,
    /// Strings at admissible levels with every prefix within the bound.
    pub s: BTreeSet<BitString>,
    /// Prefix closure of `s`.
    pub nodes: BTreeSet<BitString>,
}

impl TrivialTree {
    /// Dump: one line per node, `depth string inS(0/1)`, ordered by
    /// (depth, string).
    pub fn write(&self) -> String {
        let mut sorted: Vec<&BitString> = self.nodes.iter().collect();
        sorted.sort_by_key(|s| (s.len(), (*s).clone()));
        let mut out = String::new();
        for node in sorted {
            out.push_str(&format!(
                "{} {} {}\n",
                node.len(),
                node,
                u8::from(self.s.contains(node))
            ));
        }
        out
    }
}

/// Builds the trivial tree for an order `g` and slack `c`: levels are the
/// order inverses `g^{-1}(k)` up to `depth`, membership requires
/// `K_budget(prefix) <= g(|prefix|) + c` along the whole string, and the
/// tree is the prefix closure of the admitted level strings.
pub fn build_tree(
    g: &OrderFn,
    c: i64,
    machine: &dyn Machine,
    budget: u64,
    depth: usize,
) -> TrivialTree {
    assert!(g.domain_bound() >= depth, "order must cover the depth");
    assert!(depth <= 20, "tree over 2^{depth} strings refused");
    let mut levels: BTreeSet<usize> = BTreeSet::new();
    for k in g.value(0)..=g.value(depth) {
        if let Ok(inv) = g.inverse(k) {
            if inv.value <= depth {
                levels.insert(inv.value);
            }
        }
    }
    let max_level = levels.iter().copied().max().unwrap_or(0);

    let bound_ok = |w: &BitString| -> bool {
        match k_approx(machine, w, budget) {
            ExtNat::Inf => false,
            ExtNat::Fin(k) => k as i128 <= g.value(w.len()) as i128 + c as i128,
        }
    };

    let mut alive: Vec<BitString> = Vec::new();
    if bound_ok(&BitString::new()) {
        alive.push(BitString::new());
    }
    let mut s: BTreeSet<BitString> = BTreeSet::new();
    if levels.contains(&0) {
        s.extend(alive.iter().cloned());
    }
    for len in 1..=max_level {
        let mut next = Vec::new();
        for parent in &alive {
            for bit in [false, true] {
                let mut child = parent.clone();
                child.push(bit);
                if bound_ok(&child) {
                    next.push(child);
                }
            }
        }
        alive = next;
        if levels.contains(&len) {
            s.extend(alive.iter().cloned());
        }
    }

    let mut nodes: BTreeSet<BitString> = BTreeSet::new();
    for tau in &s {
        for l in 0..=tau.len() {
            nodes.insert(tau.prefix(l));
        }
    }
    TrivialTree { levels: levels.into_iter().collect(), s, nodes }
}

/// The order transform: turns a doubly-indexed approximation table into a
/// uniformly computable, pointwise nonincreasing sequence of orders.
///
/// From `h0[s][n]` it forms `h_s(n) = max_{i <= n} h0[n+s][i]`, emits the
/// value stream in lexicographic `(n, s)` order at change points only
/// (`s = 0` or a value different from the previous stage), and folds the
/// stream into orders: the first approximant is the identity, and each
/// emitted value `z` extends the `z`-block of the current order by one,
/// pushing every larger value one slot to the right and dropping the last
/// slot off the horizon. Emissions beyond the attained range change
/// nothing.
pub fn order_below(h0: &[Vec<u64>], n_bound: usize, stage_budget: usize) -> Vec<OrderFn> {
    let stages = h0.len();
    let cols = h0.first().map_or(0, Vec::len);
    assert!(h0.iter().all(|row| row.len() == cols), "h0 must be rectangular");

    let mut stream: Vec<u64> = Vec::new();
    for n in 0..cols {
        let mut prev: Option<u64> = None;
        for s in 0..stages.saturating_sub(n) {
            let value = (0..=n).map(|i| h0[n + s][i]).max().expect("nonempty max");
            if prev != Some(value) {
                stream.push(value);
            }
            prev = Some(value);
        }
    }

    let mut approximants = Vec::with_capacity(stage_budget + 1);
    let mut current: Vec<u64> = (0..=n_bound as u64).collect();
    approximants.push(OrderFn::new(current.clone()).expect("identity is an order"));
    for &z in stream.iter().take(stage_budget) {
        if current[n_bound] > z {
            let p = current.partition_point(|&v| v <= z);
            current.pop();
            current.insert(p, z);
        }
        approximants.push(OrderFn::new(current.clone()).expect("block surgery keeps order"));
    }
    approximants
}

/// A crossing of the lower approximation of `Omega_g` past the value of a
/// candidate prefix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GapCrossing {
    /// Least index with no contribution yet; all contributors are below it.
    pub cut: u64,
    /// Stage at which the crossing happened.
    pub stage: usize,
    /// Exact partial sum at the crossing, strictly above the target.
    pub partial: DyadicRational,
}

/// Value `0.sigma` of a binary expansion.
pub fn binary_fraction(sigma: &BitString) -> DyadicRational {
    let mut v = DyadicRational::zero();
    for (i, bit) in sigma.iter().enumerate() {
        if bit {
            v += &DyadicRational::pow2(-(i as i64) - 1);
        }
    }
    v
}

/// Raises the lower approximation of `Omega_g` until it exceeds
/// `0.sigma`, then reports the least index beyond every contribution.
///
/// Contributions are processed stage-major: at stage `t` the indices
/// `n <= t` are eligible; an index contributes its full current weight on
/// first appearance and the exact difference on every later drop. `budget`
/// caps the number of `(stage, index)` pairs visited; `None` means the
/// approximation never crossed within the table and budget.
pub fn gap_point(g: &StagedFunction, sigma: &BitString, budget: usize) -> Option<GapCrossing> {
    assert!(!sigma.is_empty(), "candidate prefix must be nonempty");
    let target = binary_fraction(sigma);
    let mut partial = DyadicRational::zero();
    let mut state: Vec<Option<u64>> = vec![None; g.domain_len()];
    let mut visited = 0usize;
    let mut top_contributor: Option<usize> = None;
    for t in 0..g.stage_len() {
        let eligible = g.domain_len().min(t + 1);
        for (n, slot) in state.iter_mut().enumerate().take(eligible) {
            if visited == budget {
                return None;
            }
            visited += 1;
            let value = g.value(n, t);
            let increment = match (*slot, value) {
                (None, ExtNat::Fin(_)) => {
                    *slot = value.finite();
                    Some(value.weight())
                }
                (Some(old), ExtNat::Fin(v)) if v < old => {
                    *slot = Some(v);
                    Some(&value.weight() - &ExtNat::Fin(old).weight())
                }
                _ => None,
            };
            let Some(d) = increment else { continue };
            top_contributor = top_contributor.max(Some(n));
            partial += &d;
            if partial > target {
                return Some(GapCrossing {
                    cut: top_contributor.expect("at least one contributor") as u64 + 1,
                    stage: t,
                    partial,
                });
            }
        }
    }
    None
}

/// The members `{ n <= bound : f(n) <= K_stage(binary(n)) + c }`. Monotone
/// nonincreasing in the stage because the complexity approximations only
/// shrink.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HittingSet {
    pub c: i64,
    pub stage: u64,
    pub members: BTreeSet<u64>,
}

impl HittingSet {
    pub fn contains(&self, n: u64) -> bool {
        self.members.contains(&n)
    }
}

/// Evaluates a hitting set at one stage. Integers enter complexity as
/// binary numerals without leading zeros, the empty string for 0.
pub fn hitting_set_at(
    f: &[ExtNat],
    c: i64,
    machine: &dyn Machine,
    stage: u64,
    bound: u64,
) -> HittingSet {
    assert!(f.len() as u64 > bound, "f must cover 0..=bound");
    let mut members = BTreeSet::new();
    for n in 0..=bound {
        let k = k_approx(machine, &BitString::binary_of(n), stage);
        if within(f[n as usize], k, c) {
            members.insert(n);
        }
    }
    HittingSet { c, stage, members }
}

/// Least hitting-set member `n` with `f(n) >= k + c`; for such an `n` the
/// stage-level complexity of `binary(n)` is at least `k`.
pub fn witness_high_complexity(
    f: &[ExtNat],
    c: i64,
    k: u64,
    machine: &dyn Machine,
    stage: u64,
    bound: u64,
) -> Option<u64> {
    let hs = hitting_set_at(f, c, machine, stage, bound);
    let threshold = k as i128 + c as i128;
    for &n in &hs.members {
        let big_enough = match f[n as usize] {
            ExtNat::Inf => true,
            ExtNat::Fin(v) => v as i128 >= threshold,
        };
        if big_enough {
            debug_assert!(
                k_approx(machine, &BitString::binary_of(n), stage) >= ExtNat::Fin(k),
                "hitting-set membership plus the threshold forces K >= k"
            );
            return Some(n);
        }
    }
    None
}

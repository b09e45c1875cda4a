//! Stage-indexed function tables and nondecreasing orders.
//!
//! A [`StagedFunction`] holds approximations `f_t(n)` that are nonincreasing
//! in the stage `t`; the last stage is the reported limit at the horizon.
//! Horizons are always explicit: no operation here extends a table on its
//! own.

use crate::dyadic::DyadicRational;
use crate::ext::ExtNat;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StagedError {
    #[error("NoWitness: no n in the domain has value <= {k}")]
    NoWitness { k: u64 },
    #[error("row {n} increases between stages {t} and {t_next}")]
    NotNonincreasing { n: usize, t: usize, t_next: usize },
    #[error("row {n} has {got} stages, expected {want}")]
    RaggedRow { n: usize, got: usize, want: usize },
    #[error("order values decrease at index {n}")]
    NotNondecreasing { n: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

/// Sum of the weights `2^(-f(i))` over `i < n`, exact; `inf` entries
/// contribute nothing.
pub fn partial_weight(table: &[ExtNat], n: usize) -> DyadicRational {
    assert!(n <= table.len(), "horizon {n} beyond table of length {}", table.len());
    let mut sum = DyadicRational::zero();
    for v in &table[..n] {
        sum += &v.weight();
    }
    sum
}

/// A table of stage-indexed values `v(n, t)`, nonincreasing in `t`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StagedFunction {
    stages: usize,
    rows: Vec<Vec<ExtNat>>,
}

impl StagedFunction {
    /// Validates that rows form a rectangle and every row is nonincreasing.
    pub fn new(rows: Vec<Vec<ExtNat>>) -> Result<Self, StagedError> {
        let stages = rows.first().map_or(0, Vec::len);
        for (n, row) in rows.iter().enumerate() {
            if row.len() != stages {
                return Err(StagedError::RaggedRow { n, got: row.len(), want: stages });
            }
            for t in 1..row.len() {
                if row[t] > row[t - 1] {
                    return Err(StagedError::NotNonincreasing { n, t: t - 1, t_next: t });
                }
            }
        }
        Ok(StagedFunction { stages, rows })
    }

    /// A table whose rows never change across `stages` stages.
    pub fn constant(values: &[ExtNat], stages: usize) -> Self {
        assert!(stages >= 1);
        StagedFunction {
            stages,
            rows: values.iter().map(|v| vec![*v; stages]).collect(),
        }
    }

    pub fn domain_len(&self) -> usize {
        self.rows.len()
    }

    pub fn stage_len(&self) -> usize {
        self.stages
    }

    pub fn value(&self, n: usize, t: usize) -> ExtNat {
        self.rows[n][t]
    }

    /// Value at stage `t`, clamped to the last stage when `t` runs past the
    /// table. Rows are nonincreasing, so this reads the best value known.
    pub fn value_clamped(&self, n: usize, t: usize) -> ExtNat {
        self.rows[n][t.min(self.stages - 1)]
    }

    pub fn row(&self, n: usize) -> &[ExtNat] {
        &self.rows[n]
    }

    /// Per-index value at the final stage, the limit at this horizon.
    pub fn limits(&self) -> Vec<ExtNat> {
        self.rows.iter().map(|r| *r.last().expect("nonempty row")).collect()
    }

    /// True when every finite-to-finite stage difference is 0 or 1. A jump
    /// from `inf` to a finite value counts as a first appearance and is
    /// allowed.
    pub fn is_unit_step(&self) -> bool {
        self.rows.iter().all(|row| {
            row.windows(2).all(|w| match (w[0], w[1]) {
                (ExtNat::Fin(a), ExtNat::Fin(b)) => a - b <= 1,
                _ => true,
            })
        })
    }

    /// Inserts intermediate unit steps so that successive finite values drop
    /// by at most one per stage. Per-index first values, last values and
    /// monotonicity are preserved; rows are re-padded to a rectangle by
    /// repeating final values.
    pub fn refine_unit_steps(&self) -> StagedFunction {
        let mut rows: Vec<Vec<ExtNat>> = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut out: Vec<ExtNat> = Vec::with_capacity(row.len());
            for &v in row {
                match (out.last().copied(), v) {
                    (Some(ExtNat::Fin(prev)), ExtNat::Fin(cur)) if prev > cur + 1 => {
                        for mid in (cur + 1..prev).rev() {
                            out.push(ExtNat::Fin(mid));
                        }
                        out.push(v);
                    }
                    _ => out.push(v),
                }
            }
            rows.push(out);
        }
        let stages = rows.iter().map(Vec::len).max().unwrap_or(0);
        for row in &mut rows {
            let last = *row.last().expect("nonempty row");
            row.resize(stages, last);
        }
        StagedFunction { stages, rows }
    }
}

/// A nondecreasing function on `0..=N`, the finite slice of an order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrderFn {
    values: Vec<u64>,
}

/// Result of [`OrderFn::inverse`]: the largest witness at this horizon, with
/// a flag marking that the true inverse may lie beyond it.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct InverseAt {
    pub value: usize,
    pub clipped: bool,
}

impl OrderFn {
    pub fn new(values: Vec<u64>) -> Result<Self, StagedError> {
        assert!(!values.is_empty(), "an order needs at least one value");
        for n in 1..values.len() {
            if values[n] < values[n - 1] {
                return Err(StagedError::NotNondecreasing { n });
            }
        }
        Ok(OrderFn { values })
    }

    /// The identity order on `0..=n`.
    pub fn identity(n: usize) -> Self {
        OrderFn { values: (0..=n as u64).collect() }
    }

    pub fn domain_bound(&self) -> usize {
        self.values.len() - 1
    }

    pub fn value(&self, n: usize) -> u64 {
        self.values[n]
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// `max { n <= N : h(n) <= k }`. Errors with `NoWitness` when even
    /// `h(0) > k`; reports `clipped` when `h(N) <= k`, in which case the
    /// true inverse may exceed the horizon.
    pub fn inverse(&self, k: u64) -> Result<InverseAt, StagedError> {
        if self.values[0] > k {
            return Err(StagedError::NoWitness { k });
        }
        // partition_point: first index with value > k
        let idx = self.values.partition_point(|&v| v <= k);
        Ok(InverseAt { value: idx - 1, clipped: idx == self.values.len() })
    }
}

/// Parses the staged-function text format: lines `n t value` with `value`
/// a nonnegative integer or `inf`, sorted lexicographically by `(n, t)`,
/// forming a complete rectangle.
pub fn parse_staged(text: &str) -> Result<StagedFunction, StagedError> {
    let mut entries: Vec<(usize, usize, ExtNat)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(StagedError::Parse(format!("line {}: expected `n t value`", lineno + 1)));
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|e| StagedError::Parse(format!("line {}: {e}", lineno + 1)))?;
        let t: usize = fields[1]
            .parse()
            .map_err(|e| StagedError::Parse(format!("line {}: {e}", lineno + 1)))?;
        let v: ExtNat = fields[2]
            .parse()
            .map_err(|e| StagedError::Parse(format!("line {}: {e}", lineno + 1)))?;
        entries.push((n, t, v));
    }
    let sorted = entries.windows(2).all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1));
    if !sorted {
        return Err(StagedError::Parse("entries not sorted by (n, t)".into()));
    }
    let n_max = entries.iter().map(|e| e.0).max().map_or(0, |m| m + 1);
    let t_max = entries.iter().map(|e| e.1).max().map_or(0, |m| m + 1);
    if entries.len() != n_max * t_max {
        return Err(StagedError::Parse(format!(
            "expected {} entries for a {}x{} table, found {}",
            n_max * t_max,
            n_max,
            t_max,
            entries.len()
        )));
    }
    let mut rows = vec![vec![ExtNat::Fin(0); t_max]; n_max];
    for (n, t, v) in entries {
        rows[n][t] = v;
    }
    StagedFunction::new(rows)
}

/// Writes the staged-function text format accepted by [`parse_staged`].
pub fn write_staged(f: &StagedFunction) -> String {
    let mut out = String::new();
    for n in 0..f.domain_len() {
        for t in 0..f.stage_len() {
            out.push_str(&format!("{} {} {}\n", n, t, f.value(n, t)));
        }
    }
    out
}

//! Bounded request sets and the online Kraft-Chaitin prefix-code allocator.
//!
//! A request asks for a codeword of a given length; the allocator serves
//! requests online, keeping the served codewords pairwise prefix-free. Free
//! space is a set of maximal aligned dyadic intervals, each of which is
//! exactly a cylinder `[w]`, so the free set is stored as the set of its
//! generating strings. To serve `2^(-n)` the allocator splits the smallest
//! free interval of size at least `2^(-n)`, leftmost first. Splitting the
//! smallest adequate interval keeps the free sizes pairwise distinct, which
//! is why no request under the weight cap can ever fail for fragmentation
//! reasons.

use crate::bits::BitString;
use crate::dyadic::DyadicRational;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// A single code request: an opaque label and the desired codeword length.
/// Duplicate `(label, length)` pairs are distinct requests.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Request {
    pub label: String,
    pub length: u64,
}

impl Request {
    pub fn new(label: impl Into<String>, length: u64) -> Self {
        Request { label: label.into(), length }
    }

    pub fn weight(&self) -> DyadicRational {
        DyadicRational::pow2(-(self.length as i64))
    }
}

/// An ordered list of accepted requests with its running weight, capped at 1.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RequestSet {
    entries: Vec<Request>,
    weight: DyadicRational,
}

impl RequestSet {
    pub fn new() -> Self {
        RequestSet { entries: Vec::new(), weight: DyadicRational::zero() }
    }

    /// Accepts the request if the running weight stays at most 1.
    pub fn try_push(&mut self, request: Request) -> Result<(), KcError> {
        let next = &self.weight + &request.weight();
        if next > DyadicRational::one() {
            return Err(KcError::WeightOverflow {
                index: self.entries.len(),
                label: request.label,
                length: request.length,
            });
        }
        self.weight = next;
        self.entries.push(request);
        Ok(())
    }

    pub fn entries(&self) -> &[Request] {
        &self.entries
    }

    pub fn weight(&self) -> &DyadicRational {
        &self.weight
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KcError {
    /// Serving this request would push the total weight past 1.
    #[error("WeightOverflow index={index}")]
    WeightOverflow { index: usize, label: String, length: u64 },
    #[error("parse error: {0}")]
    Parse(String),
}

/// The online allocator state: free cylinders keyed by generator length,
/// plus the exact weight served so far.
#[derive(Clone, Debug)]
pub struct KcAllocator {
    free: BTreeMap<u64, BTreeSet<BitString>>,
    weight: DyadicRational,
    served: usize,
}

impl Default for KcAllocator {
    fn default() -> Self {
        Self::new()
    }
}

impl KcAllocator {
    pub fn new() -> Self {
        let mut free = BTreeMap::new();
        free.insert(0u64, BTreeSet::from([BitString::new()]));
        KcAllocator { free, weight: DyadicRational::zero(), served: 0 }
    }

    pub fn weight(&self) -> &DyadicRational {
        &self.weight
    }

    /// Serves one request, returning its codeword. The codeword has exactly
    /// the requested length and is prefix-incomparable with every codeword
    /// served before.
    pub fn insert(&mut self, request: &Request) -> Result<BitString, KcError> {
        let next = &self.weight + &request.weight();
        if next > DyadicRational::one() {
            return Err(KcError::WeightOverflow {
                index: self.served,
                label: request.label.clone(),
                length: request.length,
            });
        }
        let n = request.length;
        // smallest adequate free interval = largest generator length <= n
        let len = *self
            .free
            .range(..=n)
            .rev()
            .find(|(_, set)| !set.is_empty())
            .expect("a free interval of adequate size exists under the weight cap")
            .0;
        let base = self.free.get_mut(&len).unwrap().pop_first().unwrap();
        let mut codeword = base.clone();
        for _ in len..n {
            codeword.push(false);
        }
        // return the right siblings along the split path to the free set
        let mut sibling_prefix = base;
        for depth in len..n {
            let mut sibling = sibling_prefix.clone();
            sibling.push(true);
            self.free.entry(depth + 1).or_default().insert(sibling);
            sibling_prefix.push(false);
        }
        self.weight = next;
        self.served += 1;
        Ok(codeword)
    }
}

/// One served request together with its codeword.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Assigned {
    pub label: String,
    pub length: u64,
    pub codeword: BitString,
}

/// A total assignment of codewords, in request order.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CodeAssignment {
    pub codes: Vec<Assigned>,
}

impl CodeAssignment {
    pub fn is_prefix_free(&self) -> bool {
        for (i, a) in self.codes.iter().enumerate() {
            for b in &self.codes[i + 1..] {
                if a.codeword.is_prefix_of(&b.codeword) || b.codeword.is_prefix_of(&a.codeword) {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for CodeAssignment {
    /// Lines `label length codeword`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.codes {
            writeln!(f, "{} {} {}", a.label, a.length, a.codeword)?;
        }
        Ok(())
    }
}

/// Serves all requests in order through a fresh allocator. Fails with the
/// index of the first request that would break the weight cap.
pub fn encode_all(requests: &[Request]) -> Result<CodeAssignment, KcError> {
    let mut alloc = KcAllocator::new();
    let mut codes = Vec::with_capacity(requests.len());
    for request in requests {
        let codeword = alloc.insert(request)?;
        codes.push(Assigned {
            label: request.label.clone(),
            length: request.length,
            codeword,
        });
    }
    Ok(CodeAssignment { codes })
}

/// Parses a request file: lines `label length`.
pub fn parse_requests(text: &str) -> Result<Vec<Request>, KcError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(KcError::Parse(format!("line {}: expected `label length`", lineno + 1)));
        }
        let length = fields[1]
            .parse::<u64>()
            .map_err(|e| KcError::Parse(format!("line {}: {e}", lineno + 1)))?;
        out.push(Request::new(fields[0], length));
    }
    Ok(out)
}

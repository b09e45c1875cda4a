//! Binary strings and the self-delimiting codes built from them.
//!
//! Everything in this crate that the literature calls a "string" is a finite
//! binary string. [`BitString`] is the shared carrier: program texts, machine
//! outputs, codewords, cylinder generators. The derived `Ord` is plain
//! lexicographic order (a proper prefix sorts before its extensions); the
//! length-lexicographic enumeration used by machine dovetailing is exposed
//! through [`BitString::from_index`].

use std::fmt;
use std::str::FromStr;

/// A finite binary string.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        BitString(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    /// Parses `'0'`/`'1'` characters; the single character `-` denotes the
    /// empty string in the text dump formats.
    pub fn parse(s: &str) -> Result<Self, String> {
        if s == "-" {
            return Ok(BitString::new());
        }
        let mut bits = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(format!("invalid bit character {ch:?}")),
            }
        }
        Ok(BitString(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn push(&mut self, b: bool) {
        self.0.push(b);
    }

    pub fn extend(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    /// First `n` bits as a new string. Panics if `n > len`.
    pub fn prefix(&self, n: usize) -> BitString {
        BitString(self.0[..n].to_vec())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// The `idx`-th string in length-lexicographic order:
    /// `0 -> ""`, `1 -> "0"`, `2 -> "1"`, `3 -> "00"`, ...
    pub fn from_index(idx: u64) -> BitString {
        let v = idx + 1;
        let len = 63 - v.leading_zeros() as usize;
        let mut bits = Vec::with_capacity(len);
        for i in (0..len).rev() {
            bits.push((v >> i) & 1 == 1);
        }
        BitString(bits)
    }

    /// Inverse of [`BitString::from_index`].
    pub fn to_index(&self) -> u64 {
        let mut v: u64 = 1;
        for &b in &self.0 {
            v = (v << 1) | b as u64;
        }
        v - 1
    }

    /// Standard binary representation of `n`, most significant bit first,
    /// without leading zeros; the empty string for `n = 0`.
    pub fn binary_of(n: u64) -> BitString {
        if n == 0 {
            return BitString::new();
        }
        let len = 64 - n.leading_zeros() as usize;
        let mut bits = Vec::with_capacity(len);
        for i in (0..len).rev() {
            bits.push((n >> i) & 1 == 1);
        }
        BitString(bits)
    }

    /// Value of the string read as a binary numeral (empty = 0).
    /// Returns `None` when the value does not fit in a `u64` or the numeral
    /// is non-canonical (nonempty with a leading zero).
    pub fn binary_value(&self) -> Option<u64> {
        if self.0.is_empty() {
            return Some(0);
        }
        if !self.0[0] || self.0.len() > 64 {
            return None;
        }
        let mut v: u64 = 0;
        for &b in &self.0 {
            v = (v << 1) | b as u64;
        }
        Some(v)
    }

    /// All strings of length `len` extending `self`, in lexicographic order.
    pub fn extensions(&self, len: usize) -> impl Iterator<Item = BitString> + '_ {
        let extra = len.checked_sub(self.len()).expect("extension shorter than base");
        assert!(extra < 40, "extension enumeration of 2^{extra} strings refused");
        (0..(1u64 << extra)).map(move |suffix| {
            let mut out = self.clone();
            for i in (0..extra).rev() {
                out.push((suffix >> i) & 1 == 1);
            }
            out
        })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "-");
        }
        for &b in &self.0 {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BitString::parse(s)
    }
}

/// Cursor over a bit string, used by the program decoders.
pub struct BitReader<'a> {
    bits: &'a BitString,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a BitString) -> Self {
        BitReader { bits, pos: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn at_end(&self) -> bool {
        self.pos == self.bits.len()
    }

    pub fn read_bit(&mut self) -> Option<bool> {
        if self.pos < self.bits.len() {
            let b = self.bits.bit(self.pos);
            self.pos += 1;
            Some(b)
        } else {
            None
        }
    }

    pub fn read_bits(&mut self, n: usize) -> Option<BitString> {
        if self.pos + n <= self.bits.len() {
            let out = BitString(self.bits.bits()[self.pos..self.pos + n].to_vec());
            self.pos += n;
            Some(out)
        } else {
            None
        }
    }

    /// Decodes `gamma(m)`: `floor(log2 m)` zeros followed by the binary
    /// numeral of `m`. Returns `None` on a truncated or oversized code.
    pub fn read_gamma(&mut self) -> Option<u64> {
        let mut zeros = 0usize;
        while !self.read_bit()? {
            zeros += 1;
            if zeros > 62 {
                return None;
            }
        }
        let mut value: u64 = 1;
        for _ in 0..zeros {
            value = (value << 1) | self.read_bit()? as u64;
        }
        Some(value)
    }

    /// Decodes `D(w) = gamma(|w|+1) . w`.
    pub fn read_delimited(&mut self) -> Option<BitString> {
        let len_plus_one = self.read_gamma()?;
        self.read_bits((len_plus_one - 1) as usize)
    }
}

/// Appends `gamma(m)` for `m >= 1`.
pub fn gamma_encode(m: u64, out: &mut BitString) {
    assert!(m >= 1, "gamma code is defined for m >= 1");
    let len = 64 - m.leading_zeros() as usize;
    for _ in 0..len - 1 {
        out.push(false);
    }
    for i in (0..len).rev() {
        out.push((m >> i) & 1 == 1);
    }
}

/// Length of `gamma(m)` in bits.
pub fn gamma_len(m: u64) -> u64 {
    assert!(m >= 1);
    let len = 64 - m.leading_zeros() as u64;
    2 * len - 1
}

/// Appends the self-delimiting form `D(w) = gamma(|w|+1) . w`.
pub fn delimited_encode(w: &BitString, out: &mut BitString) {
    gamma_encode(w.len() as u64 + 1, out);
    out.extend(w);
}

//! Dense bitset subsets of `Z_n` and finite sets of nonnegative integers.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};

const WORD: u32 = 64;

fn word_count(bits: u32) -> usize {
    bits.div_ceil(WORD) as usize
}

/// A subset of the cyclic group `Z_n`, stored as a characteristic bit vector
/// of length `n` (bit `i` of the vector is residue `i`).
///
/// Bits at positions `>= n` are always zero; every kernel below relies on it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ZnSet {
    modulus: u32,
    words: Vec<u64>,
}

impl ZnSet {
    pub fn empty(modulus: u32) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        Ok(ZnSet {
            modulus,
            words: vec![0; word_count(modulus)],
        })
    }

    /// The whole group.
    pub fn full(modulus: u32) -> Result<Self> {
        let mut s = Self::empty(modulus)?;
        s.words.iter_mut().for_each(|w| *w = u64::MAX);
        s.clear_tail();
        Ok(s)
    }

    /// Builds a set from exact residues, rejecting out-of-range values and
    /// duplicates.
    pub fn new(modulus: u32, members: &[u32]) -> Result<Self> {
        let mut s = Self::empty(modulus)?;
        for &m in members {
            if m >= modulus {
                return Err(Error::OutOfRange {
                    value: i64::from(m),
                    modulus,
                });
            }
            if !s.insert(m) {
                return Err(Error::Duplicate(m));
            }
        }
        Ok(s)
    }

    /// Builds a set from arbitrary integers reduced modulo `n`; repeats merge.
    pub fn from_residues<I: IntoIterator<Item = i64>>(modulus: u32, values: I) -> Result<Self> {
        let mut s = Self::empty(modulus)?;
        let n = i64::from(modulus);
        for v in values {
            s.insert(v.rem_euclid(n) as u32);
        }
        Ok(s)
    }

    /// Parses a literal such as `"0,1,3"`. Out-of-range and duplicate entries
    /// are rejected.
    pub fn parse(modulus: u32, literal: &str) -> Result<Self> {
        let text = literal.trim();
        if text.is_empty() {
            return Self::empty(modulus);
        }
        let mut members = Vec::new();
        for part in text.split([',', ';']) {
            let part = part.trim();
            let v: i64 = part
                .parse()
                .map_err(|_| Error::Parse(literal.to_string()))?;
            if v < 0 || v >= i64::from(modulus) {
                return Err(Error::OutOfRange { value: v, modulus });
            }
            members.push(v as u32);
        }
        Self::new(modulus, &members)
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.modulus as usize
    }

    pub fn contains(&self, x: u32) -> bool {
        x < self.modulus && self.words[(x / WORD) as usize] >> (x % WORD) & 1 == 1
    }

    /// Inserts `x`; returns `false` when it was already present.
    pub fn insert(&mut self, x: u32) -> bool {
        assert!(
            x < self.modulus,
            "residue {x} out of range for {}",
            self.modulus
        );
        let w = &mut self.words[(x / WORD) as usize];
        let bit = 1u64 << (x % WORD);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let base = i as u32 * WORD;
            BitIter(w).map(move |b| base + b)
        })
    }

    pub fn members(&self) -> Vec<u32> {
        self.iter().collect()
    }

    pub fn min(&self) -> Option<u32> {
        self.iter().next()
    }

    pub fn is_subset(&self, other: &ZnSet) -> bool {
        self.modulus == other.modulus
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &ZnSet) -> Result<ZnSet> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a |= b);
        Ok(out)
    }

    /// `{x + shift mod n : x in self}`.
    pub fn translate(&self, shift: i64) -> ZnSet {
        let s = shift.rem_euclid(i64::from(self.modulus)) as u32;
        let mut out = ZnSet {
            modulus: self.modulus,
            words: vec![0; self.words.len()],
        };
        or_rotated(&mut out.words, &self.words, s, self.modulus);
        out
    }

    /// Translate so that the smallest member sits at 0. Returns the shift used.
    pub fn zero_translate(&self) -> Result<(ZnSet, u32)> {
        let a0 = self.min().ok_or(Error::EmptySet)?;
        Ok((self.translate(-i64::from(a0)), a0))
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub(crate) fn check_same(&self, other: &ZnSet) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    fn clear_tail(&mut self) {
        let rem = self.modulus % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Comma-separated members, the literal format accepted by [`ZnSet::parse`].
    pub fn literal(&self) -> String {
        self.literal_with(",")
    }

    /// Members joined by `sep`; CSV output uses `;`.
    pub fn literal_with(&self, sep: &str) -> String {
        let parts: Vec<String> = self.iter().map(|m| m.to_string()).collect();
        parts.join(sep)
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// `dst |= src` rotated left by `shift` inside an `n`-bit ring.
pub(crate) fn or_rotated(dst: &mut [u64], src: &[u64], shift: u32, n: u32) {
    debug_assert!(shift < n.max(1));
    if shift == 0 {
        dst.iter_mut().zip(src).for_each(|(d, s)| *d |= s);
        return;
    }
    or_shl(dst, src, shift, n);
    or_shr(dst, src, n - shift);
}

fn or_shl(dst: &mut [u64], src: &[u64], shift: u32, n: u32) {
    let ws = (shift / WORD) as usize;
    let bs = shift % WORD;
    let nw = dst.len();
    for i in ws..nw {
        let j = i - ws;
        let mut v = src[j] << bs;
        if bs > 0 && j > 0 {
            v |= src[j - 1] >> (WORD - bs);
        }
        dst[i] |= v;
    }
    let rem = n % WORD;
    if rem != 0 {
        dst[nw - 1] &= (1u64 << rem) - 1;
    }
}

fn or_shr(dst: &mut [u64], src: &[u64], shift: u32) {
    let ws = (shift / WORD) as usize;
    let bs = shift % WORD;
    let nw = dst.len();
    for i in 0..nw.saturating_sub(ws) {
        let j = i + ws;
        let mut v = src[j] >> bs;
        if bs > 0 && j + 1 < nw {
            v |= src[j + 1] << (WORD - bs);
        }
        dst[i] |= v;
    }
}

/// Canonical order: modulus first, then the increasing member lists compared
/// lexicographically. Among sets of equal size this is the lexicographic
/// order on characteristic vectors read from residue 0 with members first,
/// so `{0,1}` is the least 2-subset.
impl Ord for ZnSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.modulus
            .cmp(&other.modulus)
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for ZnSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ZnSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}} mod {}", self.literal(), self.modulus)
    }
}

impl fmt::Display for ZnSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.literal())
    }
}

#[derive(Serialize, Deserialize)]
struct ZnSetRepr {
    modulus: u32,
    members: Vec<u32>,
}

impl Serialize for ZnSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ZnSetRepr {
            modulus: self.modulus,
            members: self.members(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ZnSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ZnSetRepr::deserialize(d)?;
        ZnSet::new(repr.modulus, &repr.members).map_err(serde::de::Error::custom)
    }
}

/// Whether some `h >= 1` has `hA = Z_n`.
///
/// Uses the gcd of the differences `a - a_0` together with `n`. The bare gcd
/// of the elements is not enough: `{1}` has gcd 1 but is not a basis of
/// `Z_n` for `n >= 2`.
pub fn is_basis(set: &ZnSet) -> bool {
    let n = set.modulus();
    let Some(a0) = set.min() else {
        return false;
    };
    if n == 1 {
        return true;
    }
    let g = set
        .iter()
        .skip(1)
        .fold(u64::from(n), |g, a| gcd(g, u64::from(a - a0)));
    g == 1
}

/// A finite set of nonnegative integers (no modulus), used by the integer
/// sumset growth check.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntSet {
    members: Vec<u32>,
}

impl IntSet {
    pub fn new(members: &[u32]) -> Result<Self> {
        let mut m = members.to_vec();
        m.sort_unstable();
        if let Some(w) = m.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Duplicate(w[0]));
        }
        Ok(IntSet { members: m })
    }

    pub fn parse(literal: &str) -> Result<Self> {
        let mut members = Vec::new();
        for part in literal
            .trim()
            .split([',', ';'])
            .filter(|p| !p.trim().is_empty())
        {
            let v: u32 = part
                .trim()
                .parse()
                .map_err(|_| Error::Parse(literal.to_string()))?;
            members.push(v);
        }
        Self::new(&members)
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The largest member, `l` in `A ⊆ [0, l]`.
    pub fn span(&self) -> Option<u32> {
        self.members.last().copied()
    }

    pub fn gcd(&self) -> u64 {
        self.members.iter().fold(0, |g, &m| gcd(g, u64::from(m)))
    }
}

impl FromStr for IntSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

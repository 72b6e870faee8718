//! The affine action `A -> u·A + v` with `gcd(u, n) = 1`, which preserves the
//! order of a basis, and canonical orbit representatives.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, units};
use crate::error::{Error, Result};
use crate::zn_set::ZnSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineMap {
    scale: u32,
    shift: u32,
    modulus: u32,
}

impl AffineMap {
    /// `x -> scale·x + shift (mod n)`; rejects scales not coprime to `n`.
    pub fn new(scale: i64, shift: i64, modulus: u32) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        let n = i64::from(modulus);
        let u = scale.rem_euclid(n) as u32;
        if gcd(u64::from(u), u64::from(modulus)) != 1 {
            return Err(Error::NotInvertible { scale, modulus });
        }
        Ok(AffineMap {
            scale: u,
            shift: shift.rem_euclid(n) as u32,
            modulus,
        })
    }

    pub fn identity(modulus: u32) -> Result<Self> {
        Self::new(1, 0, modulus)
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn apply_to(&self, x: u32) -> u32 {
        let n = u64::from(self.modulus);
        ((u64::from(self.scale) * u64::from(x) + u64::from(self.shift)) % n) as u32
    }

    pub fn apply(&self, set: &ZnSet) -> Result<ZnSet> {
        if set.modulus() != self.modulus {
            return Err(Error::ModulusMismatch(self.modulus, set.modulus()));
        }
        let mut out = ZnSet::empty(self.modulus)?;
        for a in set.iter() {
            out.insert(self.apply_to(a));
        }
        Ok(out)
    }
}

/// All distinct images of `set` under the `n·φ(n)` affine maps.
pub fn orbit(set: &ZnSet) -> Result<BTreeSet<ZnSet>> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = set.modulus();
    let mut out = BTreeSet::new();
    for u in units(n) {
        let scaled = AffineMap::new(i64::from(u), 0, n)?.apply(set)?;
        for v in 0..n {
            out.insert(scaled.translate(i64::from(v)));
        }
    }
    Ok(out)
}

/// Scratch space for canonical-form scans over many sets of one modulus.
pub(crate) struct Canonicalizer {
    modulus: u32,
    units: Vec<u32>,
    image: Vec<u32>,
    candidate: Vec<u32>,
}

impl Canonicalizer {
    pub(crate) fn new(modulus: u32) -> Self {
        Canonicalizer {
            modulus,
            units: units(modulus),
            image: Vec::new(),
            candidate: Vec::new(),
        }
    }

    /// Fills `self.image` with the sorted dilation `u·A`.
    fn dilate(&mut self, members: &[u32], u: u32) {
        let n = u64::from(self.modulus);
        self.image.clear();
        self.image.extend(
            members
                .iter()
                .map(|&a| ((u64::from(a) * u64::from(u)) % n) as u32),
        );
        self.image.sort_unstable();
    }

    /// Images of `u·A` translated so that one member lands on 0, each as a
    /// sorted list. Every orbit minimum contains 0, so these are the only
    /// candidates worth comparing.
    fn pivot(&mut self, pivot: usize) {
        let n = self.modulus;
        let p = self.image[pivot];
        self.candidate.clear();
        self.candidate
            .extend(self.image[pivot..].iter().map(|&y| y - p));
        self.candidate
            .extend(self.image[..pivot].iter().map(|&y| y + n - p));
    }

    /// Whether the sorted member list is the least element of its orbit.
    pub(crate) fn is_canonical(&mut self, members: &[u32]) -> bool {
        if members.first() != Some(&0) {
            return false;
        }
        for ui in 0..self.units.len() {
            let u = self.units[ui];
            self.dilate(members, u);
            for p in 0..self.image.len() {
                self.pivot(p);
                if self.candidate.as_slice() < members {
                    return false;
                }
            }
        }
        true
    }

    pub(crate) fn canonical_members(&mut self, members: &[u32]) -> Vec<u32> {
        let mut best: Option<Vec<u32>> = None;
        for ui in 0..self.units.len() {
            let u = self.units[ui];
            self.dilate(members, u);
            for p in 0..self.image.len() {
                self.pivot(p);
                if best.as_ref().is_none_or(|b| self.candidate < *b) {
                    best = Some(self.candidate.clone());
                }
            }
        }
        best.unwrap_or_default()
    }
}

/// The least element of the affine orbit of `set` in the canonical order
/// (increasing member lists compared lexicographically).
pub fn canonical_form(set: &ZnSet) -> Result<ZnSet> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let members = Canonicalizer::new(set.modulus()).canonical_members(&set.members());
    ZnSet::new(set.modulus(), &members)
}

pub fn is_canonical(set: &ZnSet) -> bool {
    Canonicalizer::new(set.modulus()).is_canonical(&set.members())
}

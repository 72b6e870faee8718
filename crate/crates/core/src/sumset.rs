//! h-fold sumsets in `Z_n`, growth trajectories, and the order of a basis.

use serde::{Deserialize, Serialize};

use crate::arith::OrderValue;
use crate::error::{Error, Result};
use crate::zn_set::{or_rotated, ZnSet};

/// `{x + y mod n : x in X, y in Y}`.
///
/// Computed as the union of copies of the larger set rotated by each member
/// of the smaller one.
pub fn add_sets(x: &ZnSet, y: &ZnSet) -> Result<ZnSet> {
    x.check_same(y)?;
    let (driver, rotated) = if x.len() <= y.len() { (x, y) } else { (y, x) };
    let n = x.modulus();
    let mut out = ZnSet::empty(n)?;
    for shift in driver.iter() {
        or_rotated(out.words_mut(), rotated.words(), shift, n);
    }
    Ok(out)
}

/// `hA` by binary doubling.
pub fn h_fold(set: &ZnSet, h: u32) -> Result<ZnSet> {
    if h == 0 {
        return Err(Error::ZeroFold);
    }
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut acc: Option<ZnSet> = None;
    let mut power = set.clone();
    let mut rest = h;
    loop {
        if rest & 1 == 1 {
            acc = Some(match acc {
                None => power.clone(),
                Some(a) => add_sets(&a, &power)?,
            });
        }
        rest >>= 1;
        if rest == 0 {
            break;
        }
        power = add_sets(&power, &power)?;
    }
    Ok(acc.expect("h >= 1"))
}

/// How a trajectory ended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// `hA = Z_n` first at this `h`.
    Order(u32),
    /// `(h+1)A = hA` for a proper subset; the set is the subgroup generated by
    /// the differences of `A`.
    Stabilized(ZnSet),
}

/// The sequence `A, 2A, 3A, ...` up to full cover or stabilization, for the
/// 0-translate of the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumsetTrajectory {
    /// Input translated so that its least member is 0.
    pub base: ZnSet,
    /// `levels[h - 1] = hA`.
    pub levels: Vec<ZnSet>,
    pub sizes: Vec<u32>,
    pub outcome: Outcome,
}

impl SumsetTrajectory {
    pub fn order(&self) -> OrderValue {
        match self.outcome {
            Outcome::Order(h) => OrderValue::Finite(h),
            Outcome::Stabilized(_) => OrderValue::Infinite,
        }
    }
}

/// Iterates `level <- level + A` from a 0-containing `A` until the level
/// stops growing. Calls `visit` with each level (1-based step count).
/// Returns the step at which the final level was first reached.
pub(crate) fn grow<F: FnMut(u32, &ZnSet)>(base: &ZnSet, mut visit: F) -> u32 {
    debug_assert!(base.contains(0));
    let n = base.modulus();
    let shifts: Vec<u32> = base.iter().filter(|&s| s != 0).collect();
    let mut level = base.clone();
    let mut step = 1;
    visit(step, &level);
    loop {
        if level.is_full() {
            return step;
        }
        let mut next = level.clone();
        for &s in &shifts {
            or_rotated(next.words_mut(), level.words(), s, n);
        }
        if next == level {
            return step;
        }
        step += 1;
        level = next;
        visit(step, &level);
    }
}

/// Steps to reach the stabilized level and that level's size, for a
/// 0-containing set. The final level is the subgroup generated by the set.
pub(crate) fn stabilization(base: &ZnSet) -> (u32, usize) {
    let mut size = 0;
    let steps = grow(base, |_, level| size = level.len());
    (steps, size)
}

/// Full record of `hA` for `h = 1, 2, ...`.
pub fn trajectory(set: &ZnSet) -> Result<SumsetTrajectory> {
    let (base, _) = set.zero_translate()?;
    let mut levels = Vec::new();
    let steps = grow(&base, |_, level| levels.push(level.clone()));
    let last = levels.last().expect("at least one level").clone();
    let outcome = if last.is_full() {
        Outcome::Order(steps)
    } else {
        // Record the repeated level so the stall is visible in `sizes`.
        levels.push(last.clone());
        Outcome::Stabilized(last)
    };
    let sizes = levels.iter().map(|l| l.len() as u32).collect();
    Ok(SumsetTrajectory {
        base,
        levels,
        sizes,
        outcome,
    })
}

/// `ρ_n(A) = min {h : hA = Z_n}`, or `Infinite` when `A` is not a basis.
pub fn order(set: &ZnSet) -> Result<OrderValue> {
    let (base, _) = set.zero_translate()?;
    let mut full = false;
    let steps = grow(&base, |_, level| full = level.is_full());
    Ok(if full {
        OrderValue::Finite(steps)
    } else {
        OrderValue::Infinite
    })
}

//! Enumeration of bases up to affine equivalence, the spectrum of achieved
//! orders, and the empirical gap constant for large orders.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affine::Canonicalizer;
use crate::arith::{gcd, nearest_fraction_gap, ratio_str, Rational};
use crate::error::{Error, Result};
use crate::sumset::{order, stabilization};
use crate::zn_set::ZnSet;

pub const DEFAULT_EXHAUSTIVE_LIMIT: u32 = 20;
pub const DEFAULT_CARD_CAP: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumerationMode {
    Exhaustive,
    CardCapped(u32),
}

impl fmt::Display for EnumerationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnumerationMode::Exhaustive => f.write_str("exhaustive"),
            EnumerationMode::CardCapped(c) => write!(f, "card<={c}"),
        }
    }
}

/// Limits and parallelism for the enumeration-backed operations. The shard
/// count never changes results, only wall time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub exhaustive_limit: u32,
    pub shards: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            exhaustive_limit: DEFAULT_EXHAUSTIVE_LIMIT,
            shards: std::thread::available_parallelism().map_or(1, |p| p.get()),
        }
    }
}

impl SearchConfig {
    pub fn with_shards(shards: usize) -> Self {
        SearchConfig {
            shards,
            ..Self::default()
        }
    }

    fn run<T: Send, F: FnOnce() -> T + Send>(&self, job: F) -> T {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(self.shards.max(1))
            .build()
        {
            Ok(pool) => pool.install(job),
            Err(_) => job(),
        }
    }
}

/// Maximum cardinality allowed by `mode`, after validating it against `n`.
fn card_limit(n: u32, mode: EnumerationMode, cfg: &SearchConfig) -> Result<u32> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    match mode {
        EnumerationMode::Exhaustive if n > cfg.exhaustive_limit => Err(Error::EnumerationLimit {
            n,
            limit: cfg.exhaustive_limit,
        }),
        EnumerationMode::Exhaustive => Ok(n),
        EnumerationMode::CardCapped(c) if c == 0 || c > n => Err(Error::InvalidArgument(format!(
            "cardinality cap must lie in [1, {n}], got {c}"
        ))),
        EnumerationMode::CardCapped(c) => Ok(c),
    }
}

/// Work units: sets containing 0 whose two smallest nonzero members are
/// fixed. A unit with prefix `[0]` or `[0, a]` covers only that one set; a
/// unit `[0, a, b]` covers every extension by members above `b`.
fn shard_prefixes(n: u32, cap: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0]];
    if cap >= 2 {
        for a in 1..n {
            out.push(vec![0, a]);
        }
    }
    if cap >= 3 {
        for a in 1..n {
            for b in a + 1..n {
                out.push(vec![0, a, b]);
            }
        }
    }
    out
}

fn extend<F: FnMut(&[u32])>(members: &mut Vec<u32>, n: u32, cap: u32, visit: &mut F) {
    visit(members);
    if members.len() as u32 >= cap {
        return;
    }
    let start = members.last().map_or(0, |&m| m + 1);
    for x in start..n {
        members.push(x);
        extend(members, n, cap, visit);
        members.pop();
    }
}

fn visit_shard<F: FnMut(&[u32])>(prefix: &[u32], n: u32, cap: u32, mut visit: F) {
    if prefix.len() < 3 {
        visit(prefix);
    } else {
        let mut members = prefix.to_vec();
        extend(&mut members, n, cap, &mut visit);
    }
}

fn zero_set_is_basis(members: &[u32], n: u32) -> bool {
    n == 1
        || members
            .iter()
            .fold(u64::from(n), |g, &m| gcd(g, u64::from(m)))
            == 1
}

/// One canonical representative per affine orbit of bases, in canonical
/// order.
pub fn enumerate_bases(n: u32, mode: EnumerationMode, cfg: &SearchConfig) -> Result<Vec<ZnSet>> {
    let cap = card_limit(n, mode, cfg)?;
    let prefixes = shard_prefixes(n, cap);
    let shards: Vec<Vec<Vec<u32>>> = cfg.run(|| {
        prefixes
            .par_iter()
            .map(|prefix| {
                let mut canon = Canonicalizer::new(n);
                let mut found = Vec::new();
                visit_shard(prefix, n, cap, |m| {
                    if zero_set_is_basis(m, n) && canon.is_canonical(m) {
                        found.push(m.to_vec());
                    }
                });
                found
            })
            .collect()
    });
    let mut out = shards
        .into_iter()
        .flatten()
        .map(|m| ZnSet::new(n, &m))
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderWitness {
    pub order: u32,
    pub witness: ZnSet,
}

/// The finite orders attained on `Z_n` and the runs of `[1, n-1]` they miss.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub modulus: u32,
    pub mode: EnumerationMode,
    pub achieved_orders: Vec<u32>,
    /// Maximal runs `(start, end)`, inclusive.
    pub gaps: Vec<(u32, u32)>,
    /// The canonically least basis attaining each achieved order.
    pub witnesses: Vec<OrderWitness>,
}

/// Maximal runs of `[1, n-1]` not present in the sorted `achieved`.
pub fn gap_runs(n: u32, achieved: &[u32]) -> Vec<(u32, u32)> {
    let mut gaps = Vec::new();
    let mut run: Option<(u32, u32)> = None;
    for v in 1..n {
        if achieved.binary_search(&v).is_ok() {
            gaps.extend(run.take());
        } else {
            run = Some(run.map_or((v, v), |(s, _)| (s, v)));
        }
    }
    gaps.extend(run);
    gaps
}

pub fn spectrum(n: u32, mode: EnumerationMode, cfg: &SearchConfig) -> Result<SpectrumReport> {
    let bases = enumerate_bases(n, mode, cfg)?;
    let orders: Vec<u32> = cfg.run(|| {
        bases
            .par_iter()
            .map(|b| order(b).map(|o| o.finite().expect("enumerated sets are bases")))
            .collect::<Result<Vec<_>>>()
    })?;
    // `bases` is in canonical order, so the first hit per order is the least.
    let mut witnesses: BTreeMap<u32, ZnSet> = BTreeMap::new();
    for (b, o) in bases.into_iter().zip(orders) {
        witnesses.entry(o).or_insert(b);
    }
    let achieved: Vec<u32> = witnesses.keys().copied().collect();
    Ok(SpectrumReport {
        modulus: n,
        mode,
        gaps: gap_runs(n, &achieved),
        achieved_orders: achieved,
        witnesses: witnesses
            .into_iter()
            .map(|(order, witness)| OrderWitness { order, witness })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exceeder {
    pub basis: ZnSet,
    pub order: u32,
    pub nearest_l: u32,
    #[serde(with = "ratio_str")]
    pub min_gap: Rational,
}

/// Bases of order greater than `n/k` and how far each order is from the
/// nearest `n/l`, `l in [1, k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub modulus: u32,
    pub k: u32,
    pub mode: EnumerationMode,
    pub exceeders: Vec<Exceeder>,
    #[serde(with = "ratio_str")]
    pub max_min_gap: Rational,
    pub argmax_witness: Option<ZnSet>,
    /// Set for card-capped runs: the cap is only known to be safe for large
    /// `n`, so bases above the cap may have been skipped.
    pub completeness_caveat: bool,
}

/// Finds every affine orbit of bases with order `> n/k`.
///
/// The search walks sets containing 0 and skips all supersets of a set `A`
/// once they provably have order `<= n/k`: if `A` generates a subgroup `H`
/// of index `q` after `r` steps, every basis containing `A` has order at
/// most `r + q - 1`.
pub fn verify_conjecture(
    n: u32,
    k: u32,
    mode: EnumerationMode,
    cfg: &SearchConfig,
) -> Result<ConjectureReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let cap = card_limit(n, mode, cfg)?;
    let (n64, k64) = (u64::from(n), u64::from(k));
    let roots: Vec<u32> = (0..n).filter(|&r| r == 0 || cap >= 2).collect();
    let found: Vec<BTreeMap<Vec<u32>, u32>> = cfg.run(|| {
        roots
            .par_iter()
            .map(|&root| {
                let mut canon = Canonicalizer::new(n);
                let mut hits = BTreeMap::new();
                let mut members = if root == 0 { vec![0] } else { vec![0, root] };
                pruned_walk(
                    &mut members,
                    n,
                    cap,
                    root == 0,
                    &mut |m, steps, subgroup| {
                        let index = n64 / subgroup as u64;
                        if index == 1 && k64 * u64::from(steps) > n64 {
                            hits.insert(canon.canonical_members(m), steps);
                        }
                        k64 * (u64::from(steps) + index - 1) > n64
                    },
                );
                hits
            })
            .collect()
    });
    let mut merged: BTreeMap<ZnSet, u32> = BTreeMap::new();
    for (m, o) in found.into_iter().flatten() {
        merged.insert(ZnSet::new(n, &m)?, o);
    }
    let exceeders: Vec<Exceeder> = merged
        .into_iter()
        .map(|(basis, order)| {
            let (nearest_l, min_gap) = nearest_fraction_gap(order, n, k);
            Exceeder {
                basis,
                order,
                nearest_l,
                min_gap,
            }
        })
        .collect();
    let max_min_gap = exceeders
        .iter()
        .map(|e| e.min_gap)
        .max()
        .unwrap_or_else(|| Rational::from_integer(0));
    let argmax_witness = exceeders
        .iter()
        .find(|e| e.min_gap == max_min_gap)
        .map(|e| e.basis.clone());
    Ok(ConjectureReport {
        modulus: n,
        k,
        mode,
        exceeders,
        max_min_gap,
        argmax_witness,
        completeness_caveat: matches!(mode, EnumerationMode::CardCapped(_)),
    })
}

/// Depth-first walk over sets containing 0. `visit` gets the set, its
/// stabilization step and the size of the generated subgroup, and returns
/// whether supersets are still worth visiting. With `only_self`, the walk
/// stops after the starting set.
fn pruned_walk<F: FnMut(&[u32], u32, usize) -> bool>(
    members: &mut Vec<u32>,
    n: u32,
    cap: u32,
    only_self: bool,
    visit: &mut F,
) {
    let set = ZnSet::new(n, members).expect("members are distinct residues");
    let (steps, subgroup) = stabilization(&set);
    let descend = visit(members, steps, subgroup);
    if only_self || !descend || members.len() as u32 >= cap {
        return;
    }
    let start = members.last().map_or(0, |&m| m + 1);
    for x in start..n {
        members.push(x);
        pruned_walk(members, n, cap, false, visit);
        members.pop();
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunningMax {
    pub n: u32,
    #[serde(with = "ratio_str")]
    pub max_min_gap: Rational,
    #[serde(with = "ratio_str")]
    pub running_max: Rational,
}

/// Conjecture reports over a range of moduli with the running maximum of the
/// measured gap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureSweep {
    pub k: u32,
    pub mode: EnumerationMode,
    pub reports: Vec<ConjectureReport>,
    pub running: Vec<RunningMax>,
    pub completeness_caveat: bool,
}

impl ConjectureSweep {
    /// The running maximum recorded at modulus `n`.
    pub fn running_max_at(&self, n: u32) -> Option<Rational> {
        self.running
            .iter()
            .find(|r| r.n == n)
            .map(|r| r.running_max)
    }
}

pub fn conjecture_sweep(
    k: u32,
    moduli: std::ops::RangeInclusive<u32>,
    mode: EnumerationMode,
    cfg: &SearchConfig,
) -> Result<ConjectureSweep> {
    let mut reports = Vec::new();
    let mut running = Vec::new();
    let mut best = Rational::from_integer(0);
    for n in moduli {
        let report = verify_conjecture(n, k, mode, cfg)?;
        best = best.max(report.max_min_gap);
        running.push(RunningMax {
            n,
            max_min_gap: report.max_min_gap,
            running_max: best,
        });
        reports.push(report);
    }
    Ok(ConjectureSweep {
        k,
        mode,
        reports,
        running,
        completeness_caveat: matches!(mode, EnumerationMode::CardCapped(_)),
    })
}

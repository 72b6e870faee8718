//! Closed-form bounds on basis orders and sumset growth, each evaluated
//! exactly next to the measured quantity it bounds.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    divisors, gcd, nearest_fraction_gap, nlr, ratio_str, OrderValue, Rational, SignedResidue,
};
use crate::error::{Error, Result};
use crate::sumset::order;
use crate::zn_set::{IntSet, ZnSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KlTerm {
    pub divisor: u32,
    pub value: u64,
}

/// `max { (n/d)(⌊(d-2)/(ρ-1)⌋ + 1) : d | n, d >= ρ + 1 }`, term by term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KlBoundBreakdown {
    pub n: u32,
    pub rho: u32,
    pub terms: Vec<KlTerm>,
    /// `None` only if no divisor qualifies, which cannot happen for
    /// `rho <= n - 1` because `d = n` always does.
    pub bound: Option<u64>,
}

/// Upper bound on `|A|` for a basis `A` of `Z_n` of order at least `rho`.
pub fn kl_bound(n: u32, rho: u32) -> Result<KlBoundBreakdown> {
    if n < 3 || rho < 2 || rho > n - 1 {
        return Err(Error::InvalidArgument(format!(
            "rho must lie in [2, n-1] (got n = {n}, rho = {rho})"
        )));
    }
    let terms: Vec<KlTerm> = divisors(n)
        .into_iter()
        .filter(|&d| d > rho)
        .map(|d| KlTerm {
            divisor: d,
            value: u64::from(n / d) * (u64::from((d - 2) / (rho - 1)) + 1),
        })
        .collect();
    let bound = terms.iter().map(|t| t.value).max();
    Ok(KlBoundBreakdown {
        n,
        rho,
        terms,
        bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlRecord {
    pub h: u32,
    pub size: u64,
    /// `|A| + (h - 1)·l`.
    pub lower_bound: u64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlReport {
    pub set: IntSet,
    pub size: u32,
    pub span: u32,
    /// `2|A| - 3 >= l`.
    pub hypothesis_holds: bool,
    pub records: Vec<FlRecord>,
}

impl FlReport {
    /// A record fails while the hypothesis holds.
    pub fn violated(&self) -> bool {
        self.hypothesis_holds && self.records.iter().any(|r| !r.holds)
    }
}

/// Growth of `hA` for a normalized set of integers `A ⊆ [0, l]` with
/// `0, l ∈ A` and `gcd(A) = 1`, against `|A| + (h-1)·l`.
pub fn fl_growth_check(set: &IntSet, h_max: u32) -> Result<FlReport> {
    let members = set.members();
    if members.is_empty() {
        return Err(Error::NotNormalized("the set is empty"));
    }
    if members[0] != 0 {
        return Err(Error::NotNormalized("0 is not a member"));
    }
    if set.gcd() != 1 {
        return Err(Error::NotNormalized("gcd of the members is not 1"));
    }
    if h_max == 0 {
        return Err(Error::ZeroFold);
    }
    let span = set.span().expect("nonempty");
    let size = members.len() as u32;
    let hypothesis_holds = 2 * i64::from(size) - 3 >= i64::from(span);

    let width = span as usize * h_max as usize + 1;
    let words = width.div_ceil(64);
    let mut base = vec![0u64; words];
    for &m in members {
        base[m as usize / 64] |= 1 << (m % 64);
    }
    let mut level = base.clone();
    let mut records = Vec::with_capacity(h_max as usize);
    for h in 1..=h_max {
        if h > 1 {
            let mut next = vec![0u64; words];
            for &m in members {
                or_shifted(&mut next, &level, m as usize);
            }
            level = next;
        }
        let count: u64 = level.iter().map(|w| u64::from(w.count_ones())).sum();
        let lower_bound = u64::from(size) + u64::from(h - 1) * u64::from(span);
        records.push(FlRecord {
            h,
            size: count,
            lower_bound,
            holds: count >= lower_bound,
        });
    }
    Ok(FlReport {
        set: set.clone(),
        size,
        span,
        hypothesis_holds,
        records,
    })
}

/// `dst |= src << shift` on a fixed-width bit vector (no wraparound).
fn or_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let (ws, bs) = (shift / 64, shift % 64);
    for i in ws..dst.len() {
        let j = i - ws;
        let mut v = src[j] << bs;
        if bs > 0 && j > 0 {
            v |= src[j - 1] >> (64 - bs);
        }
        dst[i] |= v;
    }
}

/// `max{n/a - 1, a - 1} <= ρ_n({0, a, b}) <= (n/a - 1) + (a - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseTwoBounds {
    pub n: u32,
    pub a: u32,
    pub b: u32,
    pub lower: u32,
    pub upper: u32,
    pub actual: u32,
    pub lower_holds: bool,
    pub upper_holds: bool,
    pub sandwich_holds: bool,
}

pub fn case_two_bounds(n: u32, a: u32, b: u32) -> Result<CaseTwoBounds> {
    if a < 2 || !n.is_multiple_of(a) || a >= n {
        return Err(Error::InvalidArgument(format!(
            "a must be a divisor of n with 2 <= a < n (got n = {n}, a = {a})"
        )));
    }
    if b == 0 || b >= n || b == a {
        return Err(Error::InvalidArgument(format!(
            "b must lie in [1, n-1] \\ {{a}} (got {b})"
        )));
    }
    if gcd(u64::from(a), u64::from(b)) != 1 {
        return Err(Error::InvalidArgument(format!(
            "gcd(a, b) must be 1 (got a = {a}, b = {b})"
        )));
    }
    let set = ZnSet::new(n, &[0, a, b])?;
    let actual = order(&set)?
        .finite()
        .ok_or_else(|| Error::Invariant(format!("{{0,{a},{b}}} is not a basis of Z_{n}")))?;
    let lower = (n / a - 1).max(a - 1);
    let upper = (n / a - 1) + (a - 1);
    let lower_holds = lower <= actual;
    let upper_holds = actual <= upper;
    Ok(CaseTwoBounds {
        n,
        a,
        b,
        lower,
        upper,
        actual,
        lower_holds,
        upper_holds,
        sandwich_holds: lower_holds && upper_holds,
    })
}

/// `c in [1, k-1]` with `‖c·t‖_n <= n/k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PigeonholeWitness {
    pub n: u32,
    pub k: u32,
    pub t: u32,
    pub c: u32,
    pub r: SignedResidue,
    pub s: u64,
}

/// Smallest `c in [1, k-1]` with `k·|‖c·t‖_n| <= n`.
pub fn pigeonhole_witness(n: u32, k: u32, t: u32) -> Result<PigeonholeWitness> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "k must be at least 2 (got {k})"
        )));
    }
    if t == 0 || t >= n {
        return Err(Error::InvalidArgument(format!(
            "t must lie in [1, n-1] (got {t})"
        )));
    }
    (1..k)
        .map(|c| (c, nlr(i64::from(c) * i64::from(t), n)))
        .find(|(_, r)| u64::from(k) * r.abs() <= u64::from(n))
        .map(|(c, r)| PigeonholeWitness {
            n,
            k,
            t,
            c,
            r,
            s: r.abs(),
        })
        .ok_or_else(|| Error::Invariant(format!("no pigeonhole multiple for n={n} k={k} t={t}")))
}

/// `ρ_n({0, 1, t}) <= s + c·n/s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViaSBound {
    /// `None` stands for an infinite bound (`s = 0`).
    #[serde(with = "ratio_str::option")]
    pub bound: Option<Rational>,
    pub actual: OrderValue,
    pub holds: bool,
}

pub fn order_upper_via_s(witness: &PigeonholeWitness) -> Result<ViaSBound> {
    let n = witness.n;
    let actual = order(&ZnSet::from_residues(n, [0, 1, i64::from(witness.t)])?)?;
    if witness.s == 0 {
        return Ok(ViaSBound {
            bound: None,
            actual,
            holds: true,
        });
    }
    let s = witness.s as i64;
    let bound = Rational::from_integer(s) + Rational::new(i64::from(witness.c) * i64::from(n), s);
    let holds = match actual {
        OrderValue::Finite(r) => Rational::from_integer(i64::from(r)) <= bound,
        OrderValue::Infinite => false,
    };
    Ok(ViaSBound {
        bound: Some(bound),
        actual,
        holds,
    })
}

/// `c·t = d·n + e` with `|e| <= c·k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepDecomposition {
    pub n: u32,
    pub k: u32,
    pub t: u32,
    /// The multiplier after dividing out `gcd(d, c)`.
    pub c: u32,
    /// `‖c·t‖_n` (for the reduced `c` when applicable).
    pub e: i64,
    pub d: Option<i64>,
    pub applicable: bool,
    /// The common factor removed from `(d, c)`; 1 when already coprime.
    pub reduced_by: u32,
    /// `d` lies in `[0, c)`. It equals `c` only when `c·t` wraps past `c·n`.
    pub d_in_range: bool,
}

pub fn rep_decompose(n: u32, k: u32, t: u32, c: u32) -> Result<RepDecomposition> {
    if c == 0 || n == 0 {
        return Err(Error::InvalidArgument("c and n must be positive".into()));
    }
    let ct = i64::from(c) * i64::from(t);
    let e = nlr(ct, n).value;
    let applicable = e.unsigned_abs() <= u64::from(c) * u64::from(k);
    if !applicable {
        return Ok(RepDecomposition {
            n,
            k,
            t,
            c,
            e,
            d: None,
            applicable,
            reduced_by: 1,
            d_in_range: false,
        });
    }
    let d = (ct - e) / i64::from(n);
    // g divides c and d, so it divides e = c·t - d·n as well.
    let g = gcd(d.unsigned_abs(), u64::from(c)).max(1);
    let g64 = g as i64;
    let (c_red, d_red, e_red) = (i64::from(c) / g64, d / g64, e / g64);
    Ok(RepDecomposition {
        n,
        k,
        t,
        c: c_red as u32,
        e: e_red,
        d: Some(d_red),
        applicable,
        reduced_by: g as u32,
        d_in_range: (0..c_red).contains(&d_red),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub k: u32,
    pub n: u32,
    pub rho: u32,
    pub nearest_l: u32,
    #[serde(with = "ratio_str")]
    pub min_gap: Rational,
    pub matches_claimed_form: bool,
    pub matches_derived_form: bool,
}

/// Measured gaps of `{0, 1, k}` over `n ≡ -1 (mod k)`, with the two candidate
/// closed forms `(k-2) + 1/k` and `(k-3) + 1/k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub k: u32,
    pub records: Vec<FamilyRecord>,
    #[serde(with = "ratio_str")]
    pub claimed_form: Rational,
    #[serde(with = "ratio_str")]
    pub derived_form: Rational,
    /// The gap shared by every record from `stable_from` on.
    #[serde(with = "ratio_str::option")]
    pub stable_value: Option<Rational>,
    pub stable_from: Option<u32>,
    /// `"claimed"`, `"derived"`, `"both"` or `"neither"` for `stable_value`.
    pub stable_matches: String,
}

pub fn family_forms(k: u32) -> (Rational, Rational) {
    let inv = Rational::new(1, i64::from(k));
    (
        Rational::from_integer(i64::from(k) - 2) + inv,
        Rational::from_integer(i64::from(k) - 3) + inv,
    )
}

pub fn lower_bound_family(k: u32, moduli: RangeInclusive<u32>) -> Result<FamilyReport> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "k must be at least 2 (got {k})"
        )));
    }
    let (claimed_form, derived_form) = family_forms(k);
    let ns: Vec<u32> = moduli.filter(|&n| n > k && n % k == k - 1).collect();
    let records = ns
        .par_iter()
        .map(|&n| {
            let rho = order(&ZnSet::new(n, &[0, 1, k])?)?
                .finite()
                .ok_or_else(|| Error::Invariant("{0,1,k} is always a basis".into()))?;
            let (nearest_l, min_gap) = nearest_fraction_gap(rho, n, k);
            Ok(FamilyRecord {
                k,
                n,
                rho,
                nearest_l,
                min_gap,
                matches_claimed_form: min_gap == claimed_form,
                matches_derived_form: min_gap == derived_form,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let stable_value = records.last().map(|r| r.min_gap);
    let stable_from = stable_value.and_then(|v| {
        let tail = records.iter().rev().take_while(|r| r.min_gap == v).count();
        records.get(records.len() - tail).map(|r| r.n)
    });
    let stable_matches = match stable_value {
        Some(v) if v == claimed_form && v == derived_form => "both",
        Some(v) if v == claimed_form => "claimed",
        Some(v) if v == derived_form => "derived",
        _ => "neither",
    }
    .to_string();
    Ok(FamilyReport {
        k,
        records,
        claimed_form,
        derived_form,
        stable_value,
        stable_from,
        stable_matches,
    })
}

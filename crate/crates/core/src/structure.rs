//! Small-doubling structure analysis over the subgroup lattice of `Z_n`, and
//! a measured trace of the reduction from a large-order basis to a short
//! arithmetic progression of cosets.
//!
//! `Z_n` has exactly one subgroup `H` of each size `m | n` (the multiples of
//! `n/m`), and `Z_n / H` is identified with `Z_q`, `q = n/m`, through
//! `x -> x mod q`. Every scan over subgroups is therefore a divisor scan.

use serde::{Deserialize, Serialize};

use crate::arith::{divisors, gcd, mod_inverse, ratio_str, OrderValue, Rational};
use crate::error::{Error, Result};
use crate::sumset::{add_sets, h_fold, order};
use crate::zn_set::{is_basis, ZnSet};

fn check_divisor(divisor: u32, modulus: u32) -> Result<()> {
    if divisor == 0 || !modulus.is_multiple_of(divisor) {
        return Err(Error::NotDivisor { divisor, modulus });
    }
    Ok(())
}

/// The image of `set` in `Z_q` under reduction mod `q`.
pub fn project(set: &ZnSet, q: u32) -> Result<ZnSet> {
    check_divisor(q, set.modulus())?;
    ZnSet::from_residues(q, set.iter().map(i64::from))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetProfile {
    pub cosets_met: u32,
    /// `max |A ∩ (H + x)| / |H|` over cosets.
    #[serde(with = "ratio_str")]
    pub max_coset_fraction: Rational,
}

/// Coset statistics of `set` relative to the subgroup of size `m`.
pub fn coset_profile(set: &ZnSet, m: u32) -> Result<CosetProfile> {
    check_divisor(m, set.modulus())?;
    let q = set.modulus() / m;
    let mut counts = vec![0u32; q as usize];
    for a in set.iter() {
        counts[(a % q) as usize] += 1;
    }
    let cosets_met = counts.iter().filter(|&&c| c > 0).count() as u32;
    let max = counts.iter().copied().max().unwrap_or(0);
    Ok(CosetProfile {
        cosets_met,
        max_coset_fraction: Rational::new(i64::from(max), i64::from(m)),
    })
}

/// `{start + i·difference : 0 <= i < length}` in `Z_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApCover {
    pub start: u32,
    pub difference: u32,
    pub length: u32,
}

impl ApCover {
    pub fn contains(&self, x: u32, q: u32) -> bool {
        let (q, x) = (u64::from(q), u64::from(x));
        (0..u64::from(self.length))
            .any(|i| (u64::from(self.start) + i * u64::from(self.difference)) % q == x)
    }
}

/// Shortest arithmetic progression covering `set`, ties broken by smallest
/// length, then difference, then start. With `coprime_only`, differences
/// sharing a factor with `q` are skipped.
pub fn ap_cover(set: &ZnSet, coprime_only: bool) -> Result<ApCover> {
    let q = set.modulus();
    let members = set.members();
    let Some(&first) = members.first() else {
        return Err(Error::EmptySet);
    };
    if members.len() == 1 || q == 1 {
        return Ok(ApCover {
            start: first,
            difference: 1,
            length: 1,
        });
    }
    let mut best: Option<ApCover> = None;
    for d in 1..q {
        let g = gcd(u64::from(d), u64::from(q)) as u32;
        if coprime_only && g != 1 {
            continue;
        }
        if let Some(cover) = cover_with_difference(&members, q, d, g) {
            let better = best.is_none_or(|b| {
                (cover.length, cover.difference, cover.start) < (b.length, b.difference, b.start)
            });
            if better {
                best = Some(cover);
            }
        }
    }
    Ok(best.expect("difference 1 always covers"))
}

/// Shortest cover using difference `d`. The progression walks a cycle of
/// length `q/g` inside one coset of `gZ_q`; the shortest covering arc starts
/// right after the largest cyclic gap between consecutive members.
fn cover_with_difference(members: &[u32], q: u32, d: u32, g: u32) -> Option<ApCover> {
    let base = members[0];
    if members.iter().any(|&s| !(s + q - base).is_multiple_of(g)) {
        return None;
    }
    let cycle = i64::from(q / g);
    let step_inv = mod_inverse(i64::from(d / g), cycle)?;
    let mut idx: Vec<i64> = members
        .iter()
        .map(|&s| (i64::from((s + q - base) % q / g) * step_inv).rem_euclid(cycle))
        .collect();
    idx.sort_unstable();
    let count = idx.len();
    let gap_after = |i: usize| {
        if i + 1 < count {
            idx[i + 1] - idx[i]
        } else {
            idx[0] + cycle - idx[i]
        }
    };
    let max_gap = (0..count).map(gap_after).max()?;
    let length = (cycle - max_gap + 1) as u32;
    let start = (0..count)
        .filter(|&i| gap_after(i) == max_gap)
        .map(|i| {
            let at = idx[(i + 1) % count];
            ((i64::from(base) + at * i64::from(d)).rem_euclid(i64::from(q))) as u32
        })
        .min()?;
    Some(ApCover {
        start,
        difference: d,
        length,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    /// The number of cosets met is neither 1 nor 3.
    CaseI,
    /// Exactly three cosets are met; the length is capped at 4.
    CaseII,
    /// A single coset is met.
    CaseIII,
}

impl CaseTag {
    pub fn from_cosets(s: u32) -> Self {
        match s {
            1 => CaseTag::CaseIII,
            3 => CaseTag::CaseII,
            _ => CaseTag::CaseI,
        }
    }
}

/// Thresholds of the small-doubling structure statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfConfig {
    /// Doubling threshold: the hypothesis is `|2A| < sigma·|A|`.
    #[serde(with = "ratio_str")]
    pub sigma: Rational,
    /// Density threshold: the hypothesis is `|A| < density·n`, and a
    /// single-coset set must satisfy `|A| > density·|H|`.
    #[serde(with = "ratio_str")]
    pub density: Rational,
    pub coprime_diff: bool,
}

impl Default for DfConfig {
    fn default() -> Self {
        DfConfig {
            sigma: Rational::new(204, 100),
            density: Rational::new(1, 1_000_000_000),
            coprime_diff: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub subgroup_size: u32,
    pub quotient_size: u32,
    pub cosets_met: u32,
    #[serde(with = "ratio_str")]
    pub max_coset_fraction: Rational,
    pub ap_cover: ApCover,
    pub case_tag: CaseTag,
    /// `l`, or `min(l, 4)` in case II.
    pub effective_length: u32,
    /// `(l - 1)·|H| <= |2A| - |A|` with the effective length.
    pub length_inequality_holds: bool,
    /// Case III only: `|A| > density·|H|`.
    pub single_coset_density_holds: Option<bool>,
    /// The case-consistent conclusion.
    pub inequality_holds: bool,
    /// When `l >= 2`: whether some coset holds more than two thirds of `H`.
    pub two_thirds_holds: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub doubling_holds: bool,
    pub density_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfAnalysis {
    pub set: ZnSet,
    pub config: DfConfig,
    pub size: u32,
    pub doubling_size: u32,
    #[serde(with = "ratio_str")]
    pub doubling_ratio: Rational,
    pub hypotheses: Hypotheses,
    /// One report per proper subgroup, by increasing subgroup size.
    pub reports: Vec<StructureReport>,
    /// The report with the conclusion holding and the least `l·|H|`
    /// (smallest `|H|` on ties).
    pub best: Option<StructureReport>,
}

fn structure_report(
    set: &ZnSet,
    m: u32,
    size: u32,
    doubling_size: u32,
    cfg: &DfConfig,
) -> Result<StructureReport> {
    let n = set.modulus();
    let q = n / m;
    let profile = coset_profile(set, m)?;
    let cover = ap_cover(&project(set, q)?, cfg.coprime_diff)?;
    let case_tag = CaseTag::from_cosets(profile.cosets_met);
    let l = cover.length;
    let effective_length = if case_tag == CaseTag::CaseII {
        l.min(4)
    } else {
        l
    };
    let length_inequality_holds =
        u64::from(effective_length - 1) * u64::from(m) <= u64::from(doubling_size - size);
    let single_coset_density_holds = (case_tag == CaseTag::CaseIII).then(|| {
        Rational::from_integer(i64::from(size)) > cfg.density * Rational::from_integer(i64::from(m))
    });
    Ok(StructureReport {
        subgroup_size: m,
        quotient_size: q,
        cosets_met: profile.cosets_met,
        max_coset_fraction: profile.max_coset_fraction,
        ap_cover: cover,
        case_tag,
        effective_length,
        length_inequality_holds,
        single_coset_density_holds,
        inequality_holds: length_inequality_holds && single_coset_density_holds.unwrap_or(true),
        two_thirds_holds: (l >= 2).then(|| profile.max_coset_fraction > Rational::new(2, 3)),
    })
}

/// Structure reports of `set` for every proper subgroup of `Z_n`.
///
/// The analysis runs whether or not the hypotheses hold; they are recorded
/// in `hypotheses`.
pub fn df_analyze(set: &ZnSet, cfg: &DfConfig) -> Result<DfAnalysis> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if cfg.sigma <= Rational::from_integer(1) {
        return Err(Error::InvalidArgument("sigma must exceed 1".into()));
    }
    let n = set.modulus();
    let size = set.len() as u32;
    let doubling_size = add_sets(set, set)?.len() as u32;
    let hypotheses = Hypotheses {
        doubling_holds: Rational::from_integer(i64::from(doubling_size))
            < cfg.sigma * Rational::from_integer(i64::from(size)),
        density_holds: Rational::from_integer(i64::from(size))
            < cfg.density * Rational::from_integer(i64::from(n)),
    };
    let reports = divisors(n)
        .into_iter()
        .filter(|&m| m < n)
        .map(|m| structure_report(set, m, size, doubling_size, cfg))
        .collect::<Result<Vec<_>>>()?;
    let best = reports
        .iter()
        .filter(|r| r.inequality_holds)
        .min_by_key(|r| {
            (
                u64::from(r.ap_cover.length) * u64::from(r.subgroup_size),
                r.subgroup_size,
            )
        })
        .cloned();
    Ok(DfAnalysis {
        set: set.clone(),
        config: *cfg,
        size,
        doubling_size,
        doubling_ratio: Rational::new(i64::from(doubling_size), i64::from(size)),
        hypotheses,
        reports,
        best,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoublingSearch {
    /// `|2^j A|` for `j = 0 ..= j_max + 1` (fewer when the search stops early).
    pub sizes: Vec<u32>,
    /// Least `j <= j_max` with `|2^(j+1) A| < sigma·|2^j A|`.
    pub j: Option<u32>,
}

pub fn doubling_search(set: &ZnSet, sigma: Rational, j_max: u32) -> Result<DoublingSearch> {
    let (mut level, _) = set.zero_translate()?;
    let mut sizes = vec![level.len() as u32];
    for j in 0..=j_max {
        let next = add_sets(&level, &level)?;
        let (cur, nxt) = (level.len() as i64, next.len() as i64);
        sizes.push(nxt as u32);
        if Rational::from_integer(nxt) < sigma * Rational::from_integer(cur) {
            return Ok(DoublingSearch { sizes, j: Some(j) });
        }
        level = next;
    }
    Ok(DoublingSearch { sizes, j: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionBounds {
    pub quotient_size: u32,
    pub subgroup_size: u32,
    /// `ρ_q(π(A))`.
    pub lower: OrderValue,
    /// `ρ_n(A)`.
    pub actual: OrderValue,
    /// `ρ_q(π(A)) + n/q`.
    pub upper_candidate: Option<u32>,
    /// Whether `ρ_n(A) <= ρ_q(π(A)) + n/q`; `None` when `A` is not a basis.
    pub upper_holds: Option<bool>,
}

impl ProjectionBounds {
    pub fn lower_holds(&self) -> bool {
        self.lower <= self.actual
    }
}

/// Order of the projection to `Z_q` against the order in `Z_n`. The lower
/// bound always holds; the upper candidate is only measured.
pub fn projection_order_bounds(set: &ZnSet, q: u32) -> Result<ProjectionBounds> {
    let n = set.modulus();
    let projected = project(set, q)?;
    let lower = order(&projected)?;
    let actual = order(set)?;
    let m = n / q;
    let upper_candidate = lower.finite().map(|r| r + m);
    let upper_holds = match (actual, upper_candidate) {
        (OrderValue::Finite(a), Some(u)) => Some(a <= u),
        _ => None,
    };
    Ok(ProjectionBounds {
        quotient_size: q,
        subgroup_size: m,
        lower,
        actual,
        upper_candidate,
        upper_holds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `B` meets exactly three cosets.
    Case1,
    Case2,
    /// No doubling step or no admissible subgroup was found.
    Unavailable,
}

/// Measured quantities of each step of the reduction. `None` means the
/// quantity is vacuous for this input.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Slacks {
    /// `(3/2)|B| - m`, from the two-thirds coset bound `m < (3/2)|B|`.
    #[serde(with = "ratio_str::option")]
    pub subgroup_bound: Option<Rational>,
    /// `ρ_n(A) - ρ_q(π(A))`, never negative.
    #[serde(with = "ratio_str::option")]
    pub projection_lower: Option<Rational>,
    /// `ρ_q(π(A)) + m - ρ_n(A)`, negative when the upper bound fails.
    #[serde(with = "ratio_str::option")]
    pub projection_upper: Option<Rational>,
    /// `|ρ_n(A) - h·ρ_q(π(B))|`.
    #[serde(with = "ratio_str::option")]
    pub scaled_quotient_order: Option<Rational>,
    /// `min over multiples q' of h of |ρ_q(π(B)) - n/q'|`.
    #[serde(with = "ratio_str::option")]
    pub nearest_multiple: Option<Rational>,
    /// The minimizing multiple `q'`.
    pub nearest_multiple_q: Option<u32>,
    /// `|ρ_q(π(B)) - n/(l - 1)|`, only for `l >= 2`.
    #[serde(with = "ratio_str::option")]
    pub ap_length: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineTrace {
    /// The input translated so that its least member is 0.
    pub input: ZnSet,
    pub k: u32,
    pub config: DfConfig,
    pub order: OrderValue,
    /// `ρ_n(A) > n/k`.
    pub exceeds_threshold: bool,
    pub doubling: DoublingSearch,
    pub j: Option<u32>,
    pub h: Option<u32>,
    pub b: Option<ZnSet>,
    pub b_is_basis: Option<bool>,
    pub structure: Option<StructureReport>,
    pub m: Option<u32>,
    pub q: Option<u32>,
    /// Cosets of `H` met by `B`.
    pub s: Option<u32>,
    /// Cosets of `H` met by `A`.
    pub s_prime: Option<u32>,
    pub l: Option<u32>,
    pub quotient_order_a: Option<OrderValue>,
    pub quotient_order_b: Option<OrderValue>,
    pub slacks: Slacks,
    pub branch: Branch,
}

/// `j_max` large enough that `2^j A` reaches its final level.
pub fn default_j_max(n: u32) -> u32 {
    32 - n.max(1).leading_zeros()
}

/// Runs the reduction on a concrete basis and measures every quantity.
/// Nothing is asserted.
pub fn pipeline_trace(set: &ZnSet, k: u32, cfg: &DfConfig) -> Result<PipelineTrace> {
    if k < 2 {
        return Err(Error::InvalidArgument("k must be at least 2".into()));
    }
    if !is_basis(set) {
        return Err(Error::InvalidArgument(format!("{set} is not a basis")));
    }
    let n = set.modulus();
    let (a, _) = set.zero_translate()?;
    let rho = order(&a)?.finite().expect("basis");
    let doubling = doubling_search(&a, cfg.sigma, default_j_max(n))?;
    let mut trace = PipelineTrace {
        input: a.clone(),
        k,
        config: *cfg,
        order: OrderValue::Finite(rho),
        exceeds_threshold: u64::from(k) * u64::from(rho) > u64::from(n),
        doubling: doubling.clone(),
        j: doubling.j,
        h: None,
        b: None,
        b_is_basis: None,
        structure: None,
        m: None,
        q: None,
        s: None,
        s_prime: None,
        l: None,
        quotient_order_a: None,
        quotient_order_b: None,
        slacks: Slacks::default(),
        branch: Branch::Unavailable,
    };
    let Some(j) = doubling.j else {
        return Ok(trace);
    };
    let h = 1u32 << j;
    let b = h_fold(&a, h)?;
    trace.h = Some(h);
    trace.b_is_basis = Some(is_basis(&b));
    let analysis = df_analyze(&b, cfg)?;
    trace.b = Some(b.clone());
    let Some(best) = analysis.best else {
        return Ok(trace);
    };
    let m = best.subgroup_size;
    let q = best.quotient_size;
    let l = best.ap_cover.length;
    let s = best.cosets_met;
    let s_prime = coset_profile(&a, m)?.cosets_met;
    let bounds = projection_order_bounds(&a, q)?;
    let rho_qa = bounds.lower.finite().expect("projection of a basis");
    let rho_qb = order(&project(&b, q)?)?
        .finite()
        .expect("projection of a basis");

    let int = |v: i64| Rational::from_integer(v);
    let (n64, rho64, qa, qb) = (
        i64::from(n),
        i64::from(rho),
        i64::from(rho_qa),
        i64::from(rho_qb),
    );
    let mut slacks = Slacks {
        subgroup_bound: Some(Rational::new(3 * b.len() as i64, 2) - int(i64::from(m))),
        projection_lower: Some(int(rho64 - qa)),
        projection_upper: Some(int(qa + i64::from(m) - rho64)),
        scaled_quotient_order: Some(int((rho64 - i64::from(h) * qb).abs())),
        ..Slacks::default()
    };
    let (best_q, best_gap) = (1..=n)
        .map(|i| {
            let multiple = i * h;
            let gap = int(qb) - Rational::new(n64, i64::from(multiple));
            (multiple, if gap < int(0) { -gap } else { gap })
        })
        .min_by(|x, y| x.1.cmp(&y.1).then(x.0.cmp(&y.0)))
        .expect("n >= 1");
    slacks.nearest_multiple = Some(best_gap);
    slacks.nearest_multiple_q = Some(best_q);
    if l >= 2 {
        let gap = int(qb) - Rational::new(n64, i64::from(l - 1));
        slacks.ap_length = Some(if gap < int(0) { -gap } else { gap });
    }

    trace.structure = Some(best);
    trace.m = Some(m);
    trace.q = Some(q);
    trace.s = Some(s);
    trace.s_prime = Some(s_prime);
    trace.l = Some(l);
    trace.quotient_order_a = Some(bounds.lower);
    trace.quotient_order_b = Some(OrderValue::Finite(rho_qb));
    trace.slacks = slacks;
    trace.branch = if s == 3 { Branch::Case1 } else { Branch::Case2 };
    Ok(trace)
}

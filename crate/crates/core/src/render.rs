//! Text renderings of every report: JSON (serde), unquoted CSV, and a plain
//! table. Output depends only on report contents, so it is byte-stable.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::arith::{OrderValue, Rational};
use crate::bounds::{
    CaseTwoBounds, FamilyReport, FlReport, KlBoundBreakdown, PigeonholeWitness, RepDecomposition,
    ViaSBound,
};
use crate::spectrum::{ConjectureReport, ConjectureSweep, SpectrumReport};
use crate::structure::{DfAnalysis, PipelineTrace};
use crate::zn_set::ZnSet;

/// Version of the JSON and CSV layouts.
pub const SCHEMA_VERSION: u32 = 1;

pub trait Render: Serialize {
    fn csv(&self) -> String;
    fn table(&self) -> String;

    fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

fn lit(set: &ZnSet) -> String {
    set.literal_with(";")
}

/// Order and trajectory sizes of one set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderReport {
    pub set: ZnSet,
    pub is_basis: bool,
    pub order: OrderValue,
    pub sizes: Vec<u32>,
}

impl Render for OrderReport {
    fn csv(&self) -> String {
        format!(
            "n,set,order\n{},{},{}\n",
            self.set.modulus(),
            lit(&self.set),
            self.order
        )
    }

    fn table(&self) -> String {
        format!("{}\n", self.order)
    }
}

/// Canonical orbit representative of one set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalReport {
    pub set: ZnSet,
    pub canonical: ZnSet,
    pub orbit_size: usize,
}

impl Render for CanonicalReport {
    fn csv(&self) -> String {
        format!(
            "n,set,canonical,orbit_size\n{},{},{},{}\n",
            self.set.modulus(),
            lit(&self.set),
            lit(&self.canonical),
            self.orbit_size
        )
    }

    fn table(&self) -> String {
        format!(
            "set        {}\ncanonical  {}\norbit size {}\n",
            self.set, self.canonical, self.orbit_size
        )
    }
}

impl Render for SpectrumReport {
    fn csv(&self) -> String {
        let mut out = String::from("n,order,witness\n");
        for w in &self.witnesses {
            let _ = writeln!(out, "{},{},{}", self.modulus, w.order, lit(&w.witness));
        }
        out.push_str("n,gap_start,gap_end\n");
        for (s, e) in &self.gaps {
            let _ = writeln!(out, "{},{},{}", self.modulus, s, e);
        }
        out
    }

    fn table(&self) -> String {
        let mut out = format!("Z_{} spectrum ({})\n", self.modulus, self.mode);
        let _ = writeln!(out, "{:>6}  witness", "order");
        for w in &self.witnesses {
            let _ = writeln!(out, "{:>6}  {}", w.order, w.witness);
        }
        if self.gaps.is_empty() {
            out.push_str("gaps: none\n");
        } else {
            let runs: Vec<String> = self
                .gaps
                .iter()
                .map(|(s, e)| format!("[{s},{e}]"))
                .collect();
            let _ = writeln!(out, "gaps: {}", runs.join(" "));
        }
        out
    }
}

impl Render for ConjectureReport {
    fn csv(&self) -> String {
        let mut out = String::from("n,k,order,nearest_l,min_gap,basis\n");
        for e in &self.exceeders {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                self.modulus,
                self.k,
                e.order,
                e.nearest_l,
                e.min_gap,
                lit(&e.basis)
            );
        }
        out.push_str("n,k,max_min_gap,argmax_witness,completeness_caveat\n");
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            self.modulus,
            self.k,
            self.max_min_gap,
            self.argmax_witness.as_ref().map_or_else(|| "-".into(), lit),
            self.completeness_caveat
        );
        out
    }

    fn table(&self) -> String {
        let mut out = format!(
            "Z_{}, k = {} ({}): {} orbit(s) with order > n/k\n",
            self.modulus,
            self.k,
            self.mode,
            self.exceeders.len()
        );
        for e in &self.exceeders {
            let _ = writeln!(
                out,
                "  order {:>4}  nearest n/{}  gap {:>8}  {}",
                e.order, e.nearest_l, e.min_gap, e.basis
            );
        }
        let _ = writeln!(out, "max min gap: {}", self.max_min_gap);
        if self.completeness_caveat {
            out.push_str("caveat: cardinality-capped search\n");
        }
        out
    }
}

impl Render for ConjectureSweep {
    fn csv(&self) -> String {
        let mut out = String::from("k,n,max_min_gap,running_max,exceeders,completeness_caveat\n");
        for (r, run) in self.reports.iter().zip(&self.running) {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                self.k,
                run.n,
                run.max_min_gap,
                run.running_max,
                r.exceeders.len(),
                r.completeness_caveat
            );
        }
        out
    }

    fn table(&self) -> String {
        let mut out = format!("k = {} ({})\n", self.k, self.mode);
        let _ = writeln!(
            out,
            "{:>6} {:>10} {:>10} {:>9}",
            "n", "gap", "running", "orbits"
        );
        for (r, run) in self.reports.iter().zip(&self.running) {
            let _ = writeln!(
                out,
                "{:>6} {:>10} {:>10} {:>9}",
                run.n,
                run.max_min_gap.to_string(),
                run.running_max.to_string(),
                r.exceeders.len()
            );
        }
        if self.completeness_caveat {
            out.push_str("caveat: cardinality-capped search\n");
        }
        out
    }
}

impl Render for KlBoundBreakdown {
    fn csv(&self) -> String {
        let mut out = String::from("n,rho,divisor,value\n");
        for t in &self.terms {
            let _ = writeln!(out, "{},{},{},{}", self.n, self.rho, t.divisor, t.value);
        }
        let _ = write!(
            out,
            "n,rho,bound\n{},{},{}\n",
            self.n,
            self.rho,
            opt(&self.bound)
        );
        out
    }

    fn table(&self) -> String {
        let mut out = format!("n = {}, rho = {}\n", self.n, self.rho);
        for t in &self.terms {
            let _ = writeln!(out, "  d = {:>6}  term {}", t.divisor, t.value);
        }
        let _ = writeln!(out, "bound: {}", opt(&self.bound));
        out
    }
}

/// A basis size checked against the bound for each order level up to its own.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KlCheck {
    pub breakdown: KlBoundBreakdown,
    pub set: Option<ZnSet>,
    pub set_order: Option<OrderValue>,
    pub violated: bool,
}

impl Render for KlCheck {
    fn csv(&self) -> String {
        let mut out = self.breakdown.csv();
        if let Some(set) = &self.set {
            let _ = write!(
                out,
                "set,size,order,violated\n{},{},{},{}\n",
                lit(set),
                set.len(),
                opt(&self.set_order),
                self.violated
            );
        }
        out
    }

    fn table(&self) -> String {
        let mut out = self.breakdown.table();
        if let Some(set) = &self.set {
            let _ = writeln!(
                out,
                "set {} of size {} and order {}: {}",
                set,
                set.len(),
                opt(&self.set_order),
                if self.violated {
                    "VIOLATES the bound"
                } else {
                    "within the bound"
                }
            );
        }
        out
    }
}

impl Render for FlReport {
    fn csv(&self) -> String {
        let mut out = String::from("h,size,lower_bound,holds,hypothesis_holds\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.h, r.size, r.lower_bound, r.holds, self.hypothesis_holds
            );
        }
        out
    }

    fn table(&self) -> String {
        let mut out = format!(
            "|A| = {}, l = {}, 2|A|-3 >= l: {}\n",
            self.size, self.span, self.hypothesis_holds
        );
        for r in &self.records {
            let _ = writeln!(
                out,
                "  h = {:>3}  |hA| = {:>6}  bound {:>6}  {}",
                r.h,
                r.size,
                r.lower_bound,
                if r.holds { "ok" } else { "below" }
            );
        }
        out
    }
}

impl Render for DfAnalysis {
    fn csv(&self) -> String {
        let mut out = String::from(
            "m,q,s,max_coset_fraction,ap_start,ap_difference,l,case,inequality_holds,best\n",
        );
        for r in &self.reports {
            let best = self
                .best
                .as_ref()
                .is_some_and(|b| b.subgroup_size == r.subgroup_size);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{:?},{},{}",
                r.subgroup_size,
                r.quotient_size,
                r.cosets_met,
                r.max_coset_fraction,
                r.ap_cover.start,
                r.ap_cover.difference,
                r.ap_cover.length,
                r.case_tag,
                r.inequality_holds,
                best
            );
        }
        out
    }

    fn table(&self) -> String {
        let mut out = format!(
            "|A| = {}, |2A| = {}, ratio {} (doubling hypothesis {}, density hypothesis {})\n",
            self.size,
            self.doubling_size,
            self.doubling_ratio,
            self.hypotheses.doubling_holds,
            self.hypotheses.density_holds
        );
        let _ = writeln!(
            out,
            "{:>6} {:>6} {:>4} {:>8} {:>4} {:>8}  holds",
            "m", "q", "s", "frac", "l", "case"
        );
        for r in &self.reports {
            let _ = writeln!(
                out,
                "{:>6} {:>6} {:>4} {:>8} {:>4} {:>8}  {}",
                r.subgroup_size,
                r.quotient_size,
                r.cosets_met,
                r.max_coset_fraction.to_string(),
                r.ap_cover.length,
                format!("{:?}", r.case_tag),
                r.inequality_holds
            );
        }
        match &self.best {
            Some(b) => {
                let _ = writeln!(
                    out,
                    "best: m = {}, l = {}",
                    b.subgroup_size, b.ap_cover.length
                );
            }
            None => out.push_str("best: none\n"),
        }
        out
    }
}

impl PipelineTrace {
    fn fields(&self) -> Vec<(&'static str, String)> {
        let r = |v: &Option<Rational>| opt(v);
        vec![
            ("n", self.input.modulus().to_string()),
            ("input", lit(&self.input)),
            ("k", self.k.to_string()),
            ("sigma", self.config.sigma.to_string()),
            ("order", self.order.to_string()),
            ("exceeds_threshold", self.exceeds_threshold.to_string()),
            ("j", opt(&self.j)),
            ("h", opt(&self.h)),
            ("b", self.b.as_ref().map_or_else(|| "-".into(), lit)),
            ("b_is_basis", opt(&self.b_is_basis)),
            ("m", opt(&self.m)),
            ("q", opt(&self.q)),
            ("s", opt(&self.s)),
            ("s_prime", opt(&self.s_prime)),
            ("l", opt(&self.l)),
            ("quotient_order_a", opt(&self.quotient_order_a)),
            ("quotient_order_b", opt(&self.quotient_order_b)),
            ("slack_subgroup_bound", r(&self.slacks.subgroup_bound)),
            ("slack_projection_lower", r(&self.slacks.projection_lower)),
            ("slack_projection_upper", r(&self.slacks.projection_upper)),
            (
                "slack_scaled_quotient_order",
                r(&self.slacks.scaled_quotient_order),
            ),
            ("slack_nearest_multiple", r(&self.slacks.nearest_multiple)),
            ("nearest_multiple_q", opt(&self.slacks.nearest_multiple_q)),
            ("slack_ap_length", r(&self.slacks.ap_length)),
            ("branch", format!("{:?}", self.branch)),
        ]
    }
}

impl Render for PipelineTrace {
    fn csv(&self) -> String {
        let mut out = String::from("field,value\n");
        for (k, v) in self.fields() {
            let _ = writeln!(out, "{k},{v}");
        }
        out
    }

    fn table(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.fields() {
            let _ = writeln!(out, "{k:<28} {v}");
        }
        out
    }
}

impl Render for FamilyReport {
    fn csv(&self) -> String {
        let mut out = String::from("k,n,rho,nearest_l,min_gap\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.k, r.n, r.rho, r.nearest_l, r.min_gap
            );
        }
        out
    }

    fn table(&self) -> String {
        let mut out = format!("family {{0,1,{}}}, n ≡ -1 (mod {})\n", self.k, self.k);
        for r in &self.records {
            let _ = writeln!(
                out,
                "  n = {:>5}  rho = {:>5}  nearest n/{}  gap {}",
                r.n, r.rho, r.nearest_l, r.min_gap
            );
        }
        let _ = writeln!(
            out,
            "stable gap {} from n = {}; (k-2)+1/k = {}, (k-3)+1/k = {}; matches: {}",
            opt(&self.stable_value),
            opt(&self.stable_from),
            self.claimed_form,
            self.derived_form,
            self.stable_matches
        );
        out
    }
}

impl Render for CaseTwoBounds {
    fn csv(&self) -> String {
        format!(
            "n,a,b,lower,upper,actual,holds\n{},{},{},{},{},{},{}\n",
            self.n, self.a, self.b, self.lower, self.upper, self.actual, self.sandwich_holds
        )
    }

    fn table(&self) -> String {
        format!(
            "{{0,{},{}}} in Z_{}: {} <= {} <= {}: {}\n",
            self.a,
            self.b,
            self.n,
            self.lower,
            self.actual,
            self.upper,
            if self.sandwich_holds {
                "holds"
            } else {
                "VIOLATED"
            }
        )
    }
}

/// Pigeonhole multiple, the resulting order bound, and the representation of
/// `t` for `{0, 1, t}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PigeonholeReport {
    pub witness: PigeonholeWitness,
    pub via_s: ViaSBound,
    pub decomposition: RepDecomposition,
}

impl Render for PigeonholeReport {
    fn csv(&self) -> String {
        let w = &self.witness;
        let d = &self.decomposition;
        format!(
            "n,k,t,c,r,s,bound,actual,holds,d,e,applicable\n{},{},{},{},{},{},{},{},{},{},{},{}\n",
            w.n,
            w.k,
            w.t,
            w.c,
            w.r,
            w.s,
            self.via_s
                .bound
                .map_or_else(|| "inf".into(), |b| b.to_string()),
            self.via_s.actual,
            self.via_s.holds,
            opt(&d.d),
            d.e,
            d.applicable
        )
    }

    fn table(&self) -> String {
        let w = &self.witness;
        let d = &self.decomposition;
        format!(
            "c = {}, r = {}, s = {}\nbound s + cn/s = {}, order {}: {}\nt = (d·n + e)/c with c = {}, d = {}, e = {} (applicable: {})\n",
            w.c,
            w.r,
            w.s,
            self.via_s.bound.map_or_else(|| "inf".into(), |b| b.to_string()),
            self.via_s.actual,
            if self.via_s.holds { "holds" } else { "VIOLATED" },
            d.c,
            opt(&d.d),
            d.e,
            d.applicable
        )
    }
}

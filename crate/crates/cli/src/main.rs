//! Command-line front end for `cyclic-basis`.
//!
//! Exit status: 0 on success, 1 when a checked bound is violated, 2 on usage
//! errors.

use std::io::Write;
use std::ops::RangeInclusive;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cyclic_basis::arith::parse_rational;
use cyclic_basis::render::{CanonicalReport, KlCheck, OrderReport, PigeonholeReport, Render};
use cyclic_basis::spectrum::DEFAULT_CARD_CAP;
use cyclic_basis::{
    canonical_form, case_two_bounds, conjecture_sweep, df_analyze, fl_growth_check, is_basis,
    kl_bound, lower_bound_family, orbit, order, order_upper_via_s, pigeonhole_witness,
    pipeline_trace, rep_decompose, spectrum, trajectory, verify_conjecture, DfConfig,
    EnumerationMode, Error, IntSet, OrderValue, SearchConfig, ZnSet,
};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (schema 1)");

#[derive(Parser, Debug)]
#[command(name = "cyclic-basis", version = VERSION, about = "Orders of additive bases of Z_n")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Table)]
    format: Format,
    /// Worker threads for enumeration-backed commands. Does not affect output.
    #[arg(long, global = true, default_value_t = 1)]
    shards: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct ModeArgs {
    /// Enumerate every subset (bounded by --limit).
    #[arg(long, conflicts_with = "max_card")]
    exhaustive: bool,
    /// Enumerate subsets of at most this many elements.
    #[arg(long)]
    max_card: Option<u32>,
    /// Largest n allowed in exhaustive mode.
    #[arg(long, default_value_t = cyclic_basis::spectrum::DEFAULT_EXHAUSTIVE_LIMIT)]
    limit: u32,
}

impl ModeArgs {
    /// Explicit flags win; otherwise exhaustive when `n` is within the limit
    /// and the default cardinality cap above it.
    fn mode(&self, n: u32) -> EnumerationMode {
        match (self.exhaustive, self.max_card) {
            (true, _) => EnumerationMode::Exhaustive,
            (false, Some(c)) => EnumerationMode::CardCapped(c),
            (false, None) if n <= self.limit => EnumerationMode::Exhaustive,
            (false, None) => EnumerationMode::CardCapped(DEFAULT_CARD_CAP.min(n)),
        }
    }
}

#[derive(Args, Debug)]
struct SigmaArgs {
    /// Doubling threshold, as a decimal or fraction.
    #[arg(long, default_value = "2.04")]
    sigma: String,
    /// Density threshold, as a decimal or fraction.
    #[arg(long, default_value = "1/1000000000")]
    density: String,
}

impl SigmaArgs {
    fn config(&self, coprime_diff: bool) -> Result<DfConfig, Error> {
        Ok(DfConfig {
            sigma: parse_rational(&self.sigma)?,
            density: parse_rational(&self.density)?,
            coprime_diff,
        })
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Order of a set and its sumset trajectory.
    Order {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        set: String,
    },
    /// Canonical affine-orbit representative of a set.
    Canonical {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        set: String,
    },
    /// Achieved orders of bases of Z_n and the gaps between them.
    Spectrum {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Bases of order above n/k and their distance to the nearest n/l.
    Conjecture {
        #[arg(long)]
        k: u32,
        #[arg(long, conflicts_with = "n_range", required_unless_present = "n_range")]
        n: Option<u32>,
        /// Inclusive range A..B.
        #[arg(long, value_parser = parse_range)]
        n_range: Option<RangeInclusive<u32>>,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Size bound for bases of order at least rho, optionally checked on a set.
    KlBound {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        rho: u32,
        #[arg(long)]
        set: Option<String>,
    },
    /// Growth of hA for a normalized set of integers.
    FlCheck {
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 5)]
        h_max: u32,
    },
    /// Subgroup-by-subgroup structure analysis of a set.
    DfAnalyze {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        set: String,
        #[command(flatten)]
        sigma: SigmaArgs,
        /// Only use progression differences coprime to the quotient size.
        #[arg(long)]
        coprime_diff: bool,
    },
    /// Measured trace of the large-order reduction on one basis.
    Pipeline {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        set: String,
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        sigma: SigmaArgs,
    },
    /// Gaps of {0,1,k} over n ≡ -1 (mod k).
    Family {
        #[arg(long)]
        k: u32,
        #[arg(long, value_parser = parse_range)]
        n_range: RangeInclusive<u32>,
    },
    /// Order of {0,a,b} with a | n against its two-sided bound.
    CaseTwo {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
    },
    /// Pigeonhole multiple, order bound and representation for {0,1,t}.
    Pigeonhole {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        t: u32,
    },
}

fn parse_range(text: &str) -> Result<RangeInclusive<u32>, String> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got {text:?}"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: u32 = a
        .trim()
        .parse()
        .map_err(|_| format!("bad range start in {text:?}"))?;
    let b: u32 = b
        .trim()
        .parse()
        .map_err(|_| format!("bad range end in {text:?}"))?;
    if a > b {
        return Err(format!("empty range {text:?}"));
    }
    Ok(a..=b)
}

/// Rendered output plus whether a checked bound was violated.
struct Outcome {
    text: String,
    violated: bool,
}

fn emit<R: Render>(report: &R, format: Format, violated: bool) -> Outcome {
    let text = match format {
        Format::Table => report.table(),
        Format::Json => report.json(),
        Format::Csv => report.csv(),
    };
    Outcome { text, violated }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let format = cli.format;
    let search = |limit: u32| SearchConfig {
        exhaustive_limit: limit,
        shards: cli.shards.max(1),
    };
    Ok(match &cli.command {
        Command::Order { n, set } => {
            let set = ZnSet::parse(*n, set)?;
            let t = trajectory(&set)?;
            let report = OrderReport {
                is_basis: is_basis(&set),
                order: t.order(),
                sizes: t.sizes,
                set,
            };
            emit(&report, format, false)
        }
        Command::Canonical { n, set } => {
            let set = ZnSet::parse(*n, set)?;
            let report = CanonicalReport {
                canonical: canonical_form(&set)?,
                orbit_size: orbit(&set)?.len(),
                set,
            };
            emit(&report, format, false)
        }
        Command::Spectrum { n, mode } => {
            let report = spectrum(*n, mode.mode(*n), &search(mode.limit))?;
            emit(&report, format, false)
        }
        Command::Conjecture {
            k,
            n,
            n_range,
            mode,
        } => match (n, n_range) {
            (Some(n), _) => {
                let report = verify_conjecture(*n, *k, mode.mode(*n), &search(mode.limit))?;
                emit(&report, format, false)
            }
            (None, Some(range)) => {
                let m = mode.mode(*range.end());
                let report = conjecture_sweep(*k, range.clone(), m, &search(mode.limit))?;
                emit(&report, format, false)
            }
            (None, None) => return Err(Error::InvalidArgument("give --n or --n-range".into())),
        },
        Command::KlBound { n, rho, set } => {
            let breakdown = kl_bound(*n, *rho)?;
            let set = set.as_deref().map(|s| ZnSet::parse(*n, s)).transpose()?;
            let set_order = set.as_ref().map(order).transpose()?;
            // The bound applies when the set is a basis of order >= rho.
            let violated = match (&set, set_order, breakdown.bound) {
                (Some(s), Some(OrderValue::Finite(o)), Some(b)) => o >= *rho && s.len() as u64 > b,
                _ => false,
            };
            let report = KlCheck {
                breakdown,
                set,
                set_order,
                violated,
            };
            emit(&report, format, violated)
        }
        Command::FlCheck { set, h_max } => {
            let report = fl_growth_check(&IntSet::parse(set)?, *h_max)?;
            let violated = report.violated();
            emit(&report, format, violated)
        }
        Command::DfAnalyze {
            n,
            set,
            sigma,
            coprime_diff,
        } => {
            let report = df_analyze(&ZnSet::parse(*n, set)?, &sigma.config(*coprime_diff)?)?;
            emit(&report, format, false)
        }
        Command::Pipeline { n, set, k, sigma } => {
            let report = pipeline_trace(&ZnSet::parse(*n, set)?, *k, &sigma.config(false)?)?;
            emit(&report, format, false)
        }
        Command::Family { k, n_range } => {
            let report = lower_bound_family(*k, n_range.clone())?;
            emit(&report, format, false)
        }
        Command::CaseTwo { n, a, b } => {
            let report = case_two_bounds(*n, *a, *b)?;
            emit(&report, format, !report.sandwich_holds)
        }
        Command::Pigeonhole { n, k, t } => {
            let witness = pigeonhole_witness(*n, *k, *t)?;
            let via_s = order_upper_via_s(&witness)?;
            let decomposition = rep_decompose(*n, *k, *t, witness.c)?;
            let violated = !via_s.holds;
            let report = PigeonholeReport {
                witness,
                via_s,
                decomposition,
            };
            emit(&report, format, violated)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.text.as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            if out.violated {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

//! Command-line front end. Subcommands wrap the library operations one to
//! one: `expand` prints coefficient tables (with a content-addressed
//! cache), `verify` runs congruence sweeps and the lemma suite, `sets`
//! prints residue sets, `dissect` splits truncations, and `coeffs`
//! evaluates the coefficient formulas by both routes.
//!
//! Exit codes: 0 when every requested verdict passed, 1 when a check ran
//! and came back false, 2 for usage and precondition errors.

mod cache;
mod config;
mod emit;
mod lemmas;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use strange_lab::arith::{b_via_derivative, l_coeffs, residue_set, SetKind};
use strange_lab::qseries::{dissect, QSeries};
use strange_lab::strange::{f_partial, ft_partial, xi_series, Family, StrangeSpec};
use strange_lab::verify::{verify_family, CongruenceReport};

use crate::cache::Cache;
use crate::config::{CliConfig, Format};
use crate::emit::Payload;

/// Anything that should stop the run. `Usage` and `Io` are the program's
/// own; `Lib` wraps a library precondition or computation error. All of
/// them exit with code 2.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Lib(strange_lab::Error),
    Io(std::io::Error),
}

impl Failure {
    fn io(e: std::io::Error) -> Failure {
        Failure::Io(e)
    }

    fn encode(e: serde_json::Error) -> Failure {
        Failure::Usage(format!("serialization failed: {e}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "{msg}"),
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "strange-lab",
    version,
    about = "Exact coefficient tables and congruence checks for strange series at roots of unity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format (default json; a config file may change the default)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Directory for cached tables (overrides STRANGE_LAB_CACHE)
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    /// TOML file with defaults for the cache, format, and parameter box
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker count hint; the computation currently runs single-threaded
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a coefficient table and print it
    Expand(ExpandArgs),
    /// Run a congruence sweep or the pointwise lemma suite
    Verify(VerifyArgs),
    /// Print a residue set and its largest member
    Sets(SetsArgs),
    /// Split a truncation into parts by exponent residue and reassemble
    Dissect(DissectArgs),
    /// Evaluate coefficient formulas by the closed and derivative routes
    Coeffs(CoeffsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    #[value(name = "F")]
    F,
    #[value(name = "Ft")]
    Ft,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TheoremArg {
    /// Congruences for the plain family
    Main1,
    /// Congruences for the torus family at level t
    Main2,
    /// The torus level 2 specialization at r=1, s=0, N=1
    Cor3,
    /// Alpha stability, strong divisibility, dissection, moment, inversion
    Lemmas,
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Torus level; required for family Ft, rejected for family F
    #[arg(long)]
    t: Option<u32>,
    /// Substitution power r of (zeta_N - q)^r
    #[arg(long, allow_negative_numbers = true)]
    r: i64,
    /// Prefactor power s of (zeta_N - q)^s
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    s: i64,
    /// Root of unity order
    #[arg(long = "N", default_value_t = 1)]
    n: usize,
    /// Number of coefficients to compute
    #[arg(long)]
    order: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    theorem: TheoremArg,
    /// Prime; omitted, the configured prime list is swept
    #[arg(long)]
    p: Option<u64>,
    /// Prime power exponent of the modulus p^lambda
    #[arg(long)]
    lambda: Option<u32>,
    /// Largest multiplier m in the indices p^lambda m - j
    #[arg(long)]
    m_max: Option<u64>,
    /// Use the starred (smaller) residue set; gated by its preconditions
    #[arg(long)]
    star: bool,
    /// Torus level for main2 and lemmas; omitted, the configured list is swept
    #[arg(long)]
    t: Option<u32>,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    r: i64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    s: i64,
    #[arg(long = "N", default_value_t = 1)]
    n: usize,
}

#[derive(Args)]
struct SetsArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, allow_negative_numbers = true)]
    r: i64,
    #[arg(long, allow_negative_numbers = true)]
    s: i64,
    /// Torus level; present selects the character-weighted kinds
    #[arg(long)]
    t: Option<u32>,
    /// Apply the star filter
    #[arg(long)]
    star: bool,
}

#[derive(Args)]
struct DissectArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Torus level; required for family Ft
    #[arg(long)]
    t: Option<u32>,
    /// Residue classes to split exponents into
    #[arg(long)]
    p: u64,
    /// Truncation height of the partial sum
    #[arg(long)]
    height: usize,
}

#[derive(Args)]
struct CoeffsArgs {
    #[arg(long)]
    t: u32,
    #[arg(long)]
    p: u64,
    /// Evaluate rows n = 0..=n_max
    #[arg(long)]
    n_max: u32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(cli);
    if let Err(failure) = &outcome {
        eprintln!("error: {failure}");
    }
    ExitCode::from(exit_of(&outcome))
}

/// 0 when every requested verdict passed, 1 when some check ran and came
/// back false, 2 when the run never got that far.
fn exit_of(outcome: &Result<bool, Failure>) -> u8 {
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(_) => 2,
    }
}

/// Dispatches one subcommand. Ok(true) means every verdict passed.
fn run(cli: Cli) -> Result<bool, Failure> {
    let cfg = CliConfig::resolve(
        cli.config.as_ref(),
        cli.cache_dir.as_ref(),
        cli.format,
        cli.threads,
    )?;
    match cli.command {
        Command::Expand(args) => cmd_expand(args, &cfg),
        Command::Verify(args) => cmd_verify(args, &cfg),
        Command::Sets(args) => cmd_sets(args, &cfg),
        Command::Dissect(args) => cmd_dissect(args, &cfg),
        Command::Coeffs(args) => cmd_coeffs(args, &cfg),
    }
}

/// Resolves the family flag pair into a library family, insisting that
/// --t accompany Ft and nothing else.
fn family_of(family: FamilyArg, t: Option<u32>) -> Result<Family, Failure> {
    match (family, t) {
        (FamilyArg::F, None) => Ok(Family::F),
        (FamilyArg::F, Some(_)) => {
            Err(Failure::Usage("family F takes no --t".into()))
        }
        (FamilyArg::Ft, Some(t)) => Ok(Family::Ft(t)),
        (FamilyArg::Ft, None) => {
            Err(Failure::Usage("family Ft requires --t".into()))
        }
    }
}

fn cmd_expand(args: ExpandArgs, cfg: &CliConfig) -> Result<bool, Failure> {
    if args.order == 0 {
        return Err(Failure::Usage("--order must be at least 1".into()));
    }
    let family = family_of(args.family, args.t)?;
    let spec = StrangeSpec::new(family, args.r, args.s, args.n).map_err(Failure::Lib)?;
    let cache = Cache::new(&cfg.cache_dir);
    let table = match cache.load(&spec, args.order)? {
        Some(table) => table,
        None => {
            let table = xi_series(&spec, args.order).map_err(Failure::Lib)?;
            cache.store(&table)?;
            table
        }
    };
    let value = serde_json::to_value(&table).map_err(Failure::encode)?;
    emit::print(Payload::Table, &value, cfg.output_format)?;
    Ok(true)
}

fn cmd_verify(args: VerifyArgs, cfg: &CliConfig) -> Result<bool, Failure> {
    let lambda = args.lambda.unwrap_or(cfg.lambda);
    let m_max = args.m_max.unwrap_or(cfg.m_max);
    let p_list: Vec<u64> = match args.p {
        Some(p) => vec![p],
        None => cfg.p_list.clone(),
    };
    let t_list: Vec<u32> = match args.t {
        Some(t) => vec![t],
        None => cfg.t_list.clone(),
    };

    match args.theorem {
        TheoremArg::Lemmas => {
            if args.star || args.lambda.is_some() || args.m_max.is_some() {
                return Err(Failure::Usage(
                    "lemmas takes --t and --p only; --star, --lambda, and --m-max do not apply"
                        .into(),
                ));
            }
            if args.r != 1 || args.s != 0 || args.n != 1 {
                return Err(Failure::Usage(
                    "lemmas takes --t and --p only; spec flags do not apply".into(),
                ));
            }
            let mut reports = Vec::new();
            for &t in &t_list {
                for &p in &p_list {
                    reports.push(lemmas::run_suite(t, p)?);
                }
            }
            let all_passed = reports.iter().all(|r| r.all_passed);
            let value = if reports.len() == 1 {
                serde_json::to_value(&reports[0]).map_err(Failure::encode)?
            } else {
                serde_json::json!({ "all_passed": all_passed, "reports": reports })
            };
            emit::print(Payload::Lemmas, &value, cfg.output_format)?;
            Ok(all_passed)
        }
        theorem => {
            let specs: Vec<StrangeSpec> = match theorem {
                TheoremArg::Main1 => {
                    if args.t.is_some() {
                        return Err(Failure::Usage(
                            "main1 concerns the plain family; --t does not apply".into(),
                        ));
                    }
                    vec![StrangeSpec::new(Family::F, args.r, args.s, args.n)
                        .map_err(Failure::Lib)?]
                }
                TheoremArg::Main2 => t_list
                    .iter()
                    .map(|&t| {
                        StrangeSpec::new(Family::Ft(t), args.r, args.s, args.n)
                            .map_err(Failure::Lib)
                    })
                    .collect::<Result<_, _>>()?,
                TheoremArg::Cor3 => {
                    if args.r != 1 || args.s != 0 || args.n != 1 {
                        return Err(Failure::Usage(
                            "cor3 fixes r=1, s=0, N=1; pass no other spec values".into(),
                        ));
                    }
                    if let Some(t) = args.t {
                        if t != 2 {
                            return Err(Failure::Usage(
                                "cor3 fixes t=2; pass no other level".into(),
                            ));
                        }
                    }
                    vec![StrangeSpec::new(Family::Ft(2), 1, 0, 1).map_err(Failure::Lib)?]
                }
                TheoremArg::Lemmas => unreachable!("handled above"),
            };
            let mut reports: Vec<CongruenceReport> = Vec::new();
            for spec in &specs {
                for &p in &p_list {
                    reports.push(
                        verify_family(spec, p, lambda, m_max, args.star).map_err(Failure::Lib)?,
                    );
                }
            }
            let all_passed = reports.iter().all(|r| r.all_passed);
            let value = if reports.len() == 1 {
                serde_json::to_value(&reports[0]).map_err(Failure::encode)?
            } else {
                serde_json::json!({ "all_passed": all_passed, "reports": reports })
            };
            emit::print(Payload::Report, &value, cfg.output_format)?;
            Ok(all_passed)
        }
    }
}

fn cmd_sets(args: SetsArgs, cfg: &CliConfig) -> Result<bool, Failure> {
    let kind = match (args.t.is_some(), args.star) {
        (false, false) => SetKind::S,
        (false, true) => SetKind::SStar,
        (true, false) => SetKind::St,
        (true, true) => SetKind::StStar,
    };
    let set = residue_set(kind, args.p, args.r, args.s, args.t).map_err(Failure::Lib)?;
    let value = serde_json::to_value(&set).map_err(Failure::encode)?;
    emit::print(Payload::Set, &value, cfg.output_format)?;
    Ok(true)
}

fn cmd_dissect(args: DissectArgs, cfg: &CliConfig) -> Result<bool, Failure> {
    let family = family_of(args.family, args.t)?;
    let truncation: QSeries = match family {
        Family::F => f_partial(args.height),
        Family::Ft(t) => ft_partial(t, args.height).map_err(Failure::Lib)?,
    };
    let result = dissect(&truncation, args.p).map_err(Failure::Lib)?;
    let reassembled = result.reassemble();
    let reassembles = reassembled == truncation;
    let bytes = serde_json::to_vec(&reassembled).map_err(Failure::encode)?;
    let hash = format!("{:x}", Sha256::digest(&bytes));
    let value = serde_json::json!({
        "family": match family { Family::F => "F", Family::Ft(_) => "Ft" },
        "t": args.t,
        "p": args.p,
        "height": args.height,
        "reassembles": reassembles,
        "reassembly_sha256": hash,
        "parts": result.parts,
    });
    emit::print(Payload::Dissection, &value, cfg.output_format)?;
    Ok(reassembles)
}

fn cmd_coeffs(args: CoeffsArgs, cfg: &CliConfig) -> Result<bool, Failure> {
    let mut entries = Vec::new();
    let mut all_equal = true;
    for n in 0..=args.n_max {
        let closed = l_coeffs(args.t, args.p, n).map_err(Failure::Lib)?;
        let derivative = b_via_derivative(args.t, args.p, n).map_err(Failure::Lib)?;
        let equal = closed.b == derivative;
        all_equal &= equal;
        entries.push(serde_json::json!({
            "coeffs": closed,
            "b_derivative": derivative,
            "equal": equal,
        }));
    }
    let value = serde_json::json!({
        "t": args.t,
        "p": args.p,
        "all_equal": all_equal,
        "entries": entries,
    });
    emit::print(Payload::Coeffs, &value, cfg.output_format)?;
    Ok(all_equal)
}

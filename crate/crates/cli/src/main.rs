//! Command line driver. Subcommands map one-to-one onto pipeline entry
//! points: `dim` and `table` report dimensions, `relations` prints the
//! certificates behind them, `verify` reruns the numeric check at a chosen
//! depth, and `point` prints special-point coordinates.
//!
//! Every flag can also be supplied by a `key = value` config file named with
//! `--config`; explicit flags win over file entries. Exit codes: 0 success,
//! 1 usage or I/O problem, 2 internal math assertion, 3 failed numeric
//! verification, 4 inconclusive numeric verification.

mod config;

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dzv_core::carlitz::CarlitzContext;
use dzv_core::fmodule::xi_point;
use dzv_core::pipeline::{
    self, PipelineOptions, WeightOutcome, WeightReport, CSV_HEADER,
};
use dzv_core::PipelineError;

use crate::config::Config;

// ---- Argument surface ----

#[derive(Parser)]
#[command(name = "dzv", version, about = "Double zeta value dimensions over rational function fields")]
struct Cli {
    /// Config file of key = value lines mirroring the flags; flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report the dimension at one weight.
    Dim(DimArgs),
    /// Report dimensions for a range of weights.
    Table(TableArgs),
    /// Print the relation certificates found at one weight.
    Relations(RelationsArgs),
    /// Numerically verify every relation at one weight.
    Verify(VerifyArgs),
    /// Print the coordinates of the special point for an index pair.
    Point(PointArgs),
}

/// Base field selection: either the order q, or characteristic p with
/// extension degree e. Giving both is allowed when consistent.
#[derive(Args)]
struct FieldArgs {
    /// Field order q, a prime power.
    #[arg(long)]
    q: Option<u64>,
    /// Field characteristic; requires --e.
    #[arg(long)]
    p: Option<u64>,
    /// Extension degree over the prime field; requires --p.
    #[arg(long)]
    e: Option<u32>,
}

/// Tri-state verification switch; unset defers to the config file and then
/// to the pipeline's weight-based default.
#[derive(Args)]
struct VerifySwitch {
    /// Numerically verify discovered relations.
    #[arg(long, overrides_with = "no_verify")]
    verify: bool,
    /// Skip numeric verification.
    #[arg(long, overrides_with = "verify")]
    no_verify: bool,
}

#[derive(Args)]
struct DimArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Weight n, at least 2.
    #[arg(long)]
    weight: Option<usize>,
    /// Output format.
    #[arg(long, value_enum)]
    emit: Option<Emit>,
    #[command(flatten)]
    verify: VerifySwitch,
    /// Directory for persistent intermediates.
    #[arg(long, value_name = "DIR")]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Smallest weight, at least 2.
    #[arg(long)]
    min: Option<usize>,
    /// Largest weight.
    #[arg(long)]
    max: Option<usize>,
    /// Output format.
    #[arg(long, value_enum)]
    emit: Option<Emit>,
    /// Worker threads for the sweep; defaults to all cores.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    #[command(flatten)]
    verify: VerifySwitch,
    /// Directory for persistent intermediates.
    #[arg(long, value_name = "DIR")]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct RelationsArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Weight n, at least 2.
    #[arg(long)]
    weight: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Weight n, at least 2.
    #[arg(long)]
    weight: Option<usize>,
    /// Truncation depth for the series evaluation.
    #[arg(long)]
    dmax: Option<usize>,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// First index of the pair.
    #[arg(long)]
    s1: Option<usize>,
    /// Second index of the pair; must be divisible by q - 1.
    #[arg(long)]
    s2: Option<usize>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    Json,
    Csv,
}

// ---- Flag/config resolution ----

/// Flag value if given, else the config entry under `key`.
fn resolve<T>(flag: Option<T>, cfg: &Config, key: &str) -> Result<Option<T>, PipelineError>
where
    T: FromStr,
    T::Err: Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get(key),
    }
}

/// Unwraps a value that must be present by flag or config entry.
fn require<T>(value: Option<T>, what: &str) -> Result<T, PipelineError> {
    value.ok_or_else(|| PipelineError::BadRequest(format!("{what} is required")))
}

impl FieldArgs {
    /// Interned context for the requested field; `--p`/`--e` must come as a
    /// pair, and an explicit `--q` alongside them must equal p^e.
    fn context(&self, cfg: &Config) -> Result<&'static CarlitzContext, PipelineError> {
        let q = resolve(self.q, cfg, "q")?;
        let p = resolve(self.p, cfg, "p")?;
        let e = resolve(self.e, cfg, "e")?;
        match (q, p, e) {
            (Some(q), None, None) => pipeline::context_for_order(q),
            (None, Some(p), Some(e)) => pipeline::context_for(p, e),
            (Some(q), Some(p), Some(e)) => {
                let order = p
                    .checked_pow(e)
                    .filter(|&o| o == q)
                    .ok_or_else(|| {
                        PipelineError::BadRequest(format!("--q {q} does not match p^e = {p}^{e}"))
                    })?;
                pipeline::context_for_order(order)
            }
            (_, Some(_), None) | (_, None, Some(_)) => Err(PipelineError::BadRequest(
                "--p and --e must be given together".into(),
            )),
            (None, None, None) => Err(PipelineError::BadRequest(
                "a field is required: give --q, or --p with --e".into(),
            )),
        }
    }
}

impl VerifySwitch {
    fn resolve(&self, cfg: &Config) -> Result<Option<bool>, PipelineError> {
        if self.verify {
            Ok(Some(true))
        } else if self.no_verify {
            Ok(Some(false))
        } else {
            cfg.get_bool("verify")
        }
    }
}

fn resolve_emit(flag: Option<Emit>, cfg: &Config) -> Result<Emit, PipelineError> {
    if let Some(e) = flag {
        return Ok(e);
    }
    match cfg.get::<String>("emit")?.as_deref() {
        None => Ok(Emit::Text),
        Some("text") => Ok(Emit::Text),
        Some("json") => Ok(Emit::Json),
        Some("csv") => Ok(Emit::Csv),
        Some(other) => Err(PipelineError::BadRequest(format!(
            "config entry emit = {other} is not one of text, json, csv"
        ))),
    }
}

// ---- Entry point ----

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::empty(),
    };
    match cli.command {
        Command::Dim(args) => run_dim(args, &cfg),
        Command::Table(args) => run_table(args, &cfg),
        Command::Relations(args) => run_relations(args, &cfg),
        Command::Verify(args) => run_verify(args, &cfg),
        Command::Point(args) => run_point(args, &cfg),
    }
}

// ---- Subcommands ----

fn run_dim(args: DimArgs, cfg: &Config) -> Result<(), PipelineError> {
    let ctx = args.field.context(cfg)?;
    let weight = require(resolve(args.weight, cfg, "weight")?, "--weight")?;
    let emit = resolve_emit(args.emit, cfg)?;
    let opts = PipelineOptions {
        verify: args.verify.resolve(cfg)?,
        cache_dir: resolve(args.cache, cfg, "cache")?,
        ..PipelineOptions::default()
    };
    let report = pipeline::dimension(ctx, weight, &opts)?.into_report();
    match emit {
        Emit::Text => print_report(&report),
        Emit::Json => println!("{}", to_json(&report)),
        Emit::Csv => {
            println!("{CSV_HEADER}");
            println!("{}", pipeline::csv_row(&report));
        }
    }
    Ok(())
}

fn run_table(args: TableArgs, cfg: &Config) -> Result<(), PipelineError> {
    let ctx = args.field.context(cfg)?;
    let min = require(resolve(args.min, cfg, "min")?, "--min")?;
    let max = require(resolve(args.max, cfg, "max")?, "--max")?;
    let emit = resolve_emit(args.emit, cfg)?;
    let jobs = resolve(args.jobs, cfg, "jobs")?;
    let opts = PipelineOptions {
        verify: args.verify.resolve(cfg)?,
        cache_dir: resolve(args.cache, cfg, "cache")?,
        ..PipelineOptions::default()
    };

    let outcomes = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| PipelineError::BadRequest(format!("cannot build thread pool: {e}")))?
            .install(|| pipeline::table(ctx, min, max, &opts)),
        None => pipeline::table(ctx, min, max, &opts),
    }?;

    let mut reports = Vec::with_capacity(outcomes.len());
    let mut first_error: Option<PipelineError> = None;
    for WeightOutcome { weight, result } in outcomes {
        match result {
            Ok(report) => reports.push(report),
            Err(e) => {
                eprintln!("error: weight {weight}: {e}");
                first_error.get_or_insert(e);
            }
        }
    }

    match emit {
        Emit::Text => {
            println!(
                "{:>6} {:>9} {:>9} {:>9} {:>6} {:>4} {:>9}",
                "weight", "dimension", "fp_linear", "zeta_like", "V_size", "rank", "relations"
            );
            for r in &reports {
                let fp = r.fp_linear.map_or(String::new(), |v| v.to_string());
                println!(
                    "{:>6} {:>9} {:>9} {:>9} {:>6} {:>4} {:>9}",
                    r.weight, r.dimension, fp, r.zeta_like, r.v_size, r.point_rank, r.relation_rank
                );
            }
        }
        Emit::Json => println!("{}", to_json(&reports)),
        Emit::Csv => {
            println!("{CSV_HEADER}");
            for r in &reports {
                println!("{}", pipeline::csv_row(r));
            }
        }
    }
    match first_error {
        None => Ok(()),
        Some(e) => Err(e),
    }
}

fn run_relations(args: RelationsArgs, cfg: &Config) -> Result<(), PipelineError> {
    let ctx = args.field.context(cfg)?;
    let weight = require(resolve(args.weight, cfg, "weight")?, "--weight")?;
    let report = pipeline::dimension(ctx, weight, &PipelineOptions::default())?.into_report();

    println!(
        "weight {} over F_{}: {} independent relations among {} points",
        report.weight,
        report.q,
        report.relation_rank,
        report.v_size,
    );
    if report.certificates.is_empty() {
        println!("no relations");
        return Ok(());
    }
    for (i, cert) in report.certificates.iter().enumerate() {
        println!("relation {}:", i + 1);
        println!("  values: {}", cert.points.join(", "));
        for (label, (a, c)) in cert
            .points
            .iter()
            .zip(cert.a.iter().zip(&cert.zeta_coefficients))
        {
            println!("  {label}: point scalar {a}; zeta coefficient {c}");
        }
        match &cert.c0 {
            Some(c0) => println!("  period coefficient: {c0}"),
            None => println!("  period coefficient: not reconstructed"),
        }
        match cert.verified {
            Some(true) => println!("  numeric check: pass"),
            Some(false) => println!("  numeric check: FAIL"),
            None => println!("  numeric check: not run"),
        }
    }
    Ok(())
}

fn run_verify(args: VerifyArgs, cfg: &Config) -> Result<(), PipelineError> {
    let ctx = args.field.context(cfg)?;
    let weight = require(resolve(args.weight, cfg, "weight")?, "--weight")?;
    let dmax = resolve(args.dmax, cfg, "dmax")?;
    let opts = PipelineOptions {
        verify: Some(true),
        depth: dmax,
        ..PipelineOptions::default()
    };
    // A failed or inconclusive check surfaces as an error with its own exit
    // code; reaching a report means every certificate passed.
    let report = pipeline::dimension(ctx, weight, &opts)?.into_report();
    println!(
        "weight {} over F_{}: {} relations, all numerically verified",
        report.weight, report.q, report.certificates.len()
    );
    for (i, cert) in report.certificates.iter().enumerate() {
        let c0 = cert.c0.as_deref().unwrap_or("0");
        println!("  relation {}: pass (period coefficient {c0})", i + 1);
    }
    Ok(())
}

fn run_point(args: PointArgs, cfg: &Config) -> Result<(), PipelineError> {
    let ctx = args.field.context(cfg)?;
    let s1 = require(resolve(args.s1, cfg, "s1")?, "--s1")?;
    let s2 = require(resolve(args.s2, cfg, "s2")?, "--s2")?;
    let point = xi_point(ctx, s1, s2).map_err(|e| match e {
        dzv_core::ModuleError::SecondIndexNotEven { .. } => {
            PipelineError::BadRequest(e.to_string())
        }
        other => PipelineError::from(other),
    })?;
    println!(
        "special point for ({s1},{s2}) over F_{}, tensor power {}:",
        ctx.field().q(),
        point.dim()
    );
    for (i, c) in point.coords().iter().enumerate() {
        println!("  [{i}] {c}");
    }
    Ok(())
}

// ---- Rendering ----

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn print_report(r: &WeightReport) {
    println!("weight {} over F_{}", r.weight, r.q);
    println!("  dimension: {}", r.dimension);
    match r.fp_linear {
        Some(v) => println!("  prime-field linear relations: {v}"),
        None => println!("  prime-field linear relations: - (weight not divisible by q - 1)"),
    }
    println!("  zeta-like pairs: {}", r.zeta_like);
    let flagged: Vec<String> = r
        .pairs
        .iter()
        .map(|p| {
            let mark = if p.zeta_like { "*" } else { "" };
            format!("({},{}){mark}", p.s1, p.s2)
        })
        .collect();
    println!("  index pairs: {}", flagged.join(" "));
    println!(
        "  points: {}, rank {}, independent relations {}",
        r.v_size, r.point_rank, r.relation_rank
    );
    if !r.certificates.is_empty() {
        let verified = r
            .certificates
            .iter()
            .filter(|c| c.verified == Some(true))
            .count();
        println!("  certificates verified: {verified}/{}", r.certificates.len());
    }
    println!("  elapsed: {} ms", r.elapsed_ms);
}

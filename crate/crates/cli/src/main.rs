use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use netfx::{
    diagnose_degeneracy, local_effects, monte_carlo, read_edge_list, test_effect_repeated, BranchCounts,
    DirectedWeightedNetwork, EffectKind, GeneratorSpec, LatentConfig, Setting, SimulationSpec, TestConfig,
};
use serde::Serialize;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "netfx",
    version,
    about = "Test for network effects in weighted directed networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
enum Command {
    /// Test one or all network effects on an edge list
    Test(TestArgs),
    /// Decide whether the reciprocity or sender-receiver estimator is degenerate
    Diagnose(DiagnoseArgs),
    /// Per-node reciprocity, same-sender, same-receiver and sender-receiver effects
    LocalEffects(LocalEffectsArgs),
    /// Monte Carlo rejection rate on a synthetic setting
    Simulate(SimulateArgs),
}

#[derive(Args, Serialize)]
struct TestArgs {
    /// Edge list CSV with header source,target,weight
    #[arg(long)]
    input: PathBuf,
    /// eta2, eta3, eta4, eta5 or all
    #[arg(long, default_value = "all")]
    effect: EffectSelection,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Subsample exponent: round(n^lambda) quadruples
    #[arg(long, default_value_t = 1.2)]
    lambda: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent subsamples combined by the Z-average
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Constant C in the degeneracy threshold C·sqrt(ln n / n)
    #[arg(long, default_value_t = 1.0)]
    diagnostic_c: f64,
    /// Report path; standard output when omitted
    #[arg(long)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct DiagnoseArgs {
    #[arg(long)]
    input: PathBuf,
    /// eta2 or eta5
    #[arg(long)]
    effect: EffectKind,
    #[arg(long, default_value_t = 1.0)]
    diagnostic_c: f64,
    #[arg(long)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args, Serialize)]
struct LocalEffectsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[arg(long)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SimulateArgs {
    /// a, b, c, or one of the example generators (example_4_1_i, …)
    #[arg(long)]
    setting: Setting,
    /// normal or poisson latents
    #[arg(long, default_value = "normal")]
    config: LatentConfig,
    #[arg(long)]
    n: usize,
    /// Signal strength under the alternative
    #[arg(long, default_value_t = 1.0)]
    c2: f64,
    /// Generate under the null
    #[arg(long, conflicts_with = "alt")]
    null: bool,
    /// Generate under the alternative (default)
    #[arg(long)]
    #[serde(skip)]
    alt: bool,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Master seed; replicate seeds derive from it
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Effect to test; defaults to the one the setting targets
    #[arg(long)]
    effect: Option<EffectKind>,
    #[arg(long, default_value_t = 1.0)]
    diagnostic_c: f64,
    /// Worker threads; results do not depend on it
    #[arg(long)]
    #[serde(skip)]
    threads: Option<usize>,
    /// Write per-replicate statistics as CSV
    #[arg(long)]
    emit_stats: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy)]
enum EffectSelection {
    One(EffectKind),
    All,
}

impl EffectSelection {
    fn effects(self) -> Vec<EffectKind> {
        match self {
            EffectSelection::One(e) => vec![e],
            EffectSelection::All => EffectKind::ALL.to_vec(),
        }
    }
}

impl FromStr for EffectSelection {
    type Err = netfx::Error;

    fn from_str(s: &str) -> netfx::Result<Self> {
        if s.eq_ignore_ascii_case("all") {
            Ok(EffectSelection::All)
        } else {
            s.parse().map(EffectSelection::One)
        }
    }
}

impl fmt::Display for EffectSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EffectSelection::One(e) => write!(f, "{}", e.code()),
            EffectSelection::All => f.write_str("all"),
        }
    }
}

impl Serialize for EffectSelection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Serialize)]
struct ReportDocument<'a, T> {
    schema_version: u32,
    command: &'a Command,
    results: T,
    timing_seconds: f64,
}

#[derive(Serialize)]
struct SimulationResult {
    effect: EffectKind,
    population_effect: Option<f64>,
    rejection_rate: f64,
    rejections: usize,
    reps: usize,
    standard_error: f64,
    zero_variance: usize,
    branch_counts: BranchCounts,
}

fn load(path: &Path) -> Result<DirectedWeightedNetwork> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let records = read_edge_list(file).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(DirectedWeightedNetwork::from_edge_list(&records, None)?)
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit<T: Serialize>(command: &Command, results: T, start: Instant, output: Option<&Path>) -> Result<()> {
    let doc = ReportDocument {
        schema_version: SCHEMA_VERSION,
        command,
        results,
        timing_seconds: start.elapsed().as_secs_f64(),
    };
    let mut out = sink(output)?;
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn run_test(command: &Command, args: &TestArgs, start: Instant) -> Result<()> {
    let net = load(&args.input)?;
    let config = TestConfig {
        alpha: args.alpha,
        lambda: args.lambda,
        seed: args.seed,
        c_constant: args.diagnostic_c,
    };
    let reports = args
        .effect
        .effects()
        .into_iter()
        .map(|e| test_effect_repeated(&net, e, &config, args.repeats).with_context(|| format!("{e}")))
        .collect::<Result<Vec<_>>>()?;
    match args.effect {
        EffectSelection::All => emit(command, &reports, start, args.output.as_deref()),
        EffectSelection::One(_) => emit(command, &reports[0], start, args.output.as_deref()),
    }
}

fn run_diagnose(command: &Command, args: &DiagnoseArgs, start: Instant) -> Result<()> {
    if !args.effect.has_diagnostic() {
        bail!(
            "{} has no degeneracy diagnostic: same-sender and same-receiver estimators are always degenerate \
             under the null and are always tested with the reduced statistic",
            args.effect.code()
        );
    }
    let net = load(&args.input)?;
    let diagnosis = diagnose_degeneracy(&net, args.effect, args.diagnostic_c)?;
    emit(command, diagnosis, start, args.output.as_deref())
}

fn run_local_effects(command: &Command, args: &LocalEffectsArgs, start: Instant) -> Result<()> {
    let net = load(&args.input)?;
    let effects = local_effects(&net)?;
    if let TableFormat::Json = args.format {
        return emit(command, &effects, start, args.output.as_deref());
    }
    let mut out = csv::Writer::from_writer(sink(args.output.as_deref())?);
    out.write_record(["node", "reciprocity", "same_sender", "same_receiver", "sender_receiver"])?;
    for (i, e) in effects.nodes.iter().enumerate() {
        out.write_record([
            net.label(i),
            e.reciprocity.to_string(),
            e.same_sender.to_string(),
            e.same_receiver.to_string(),
            e.sender_receiver.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn run_simulate(command: &Command, args: &SimulateArgs, start: Instant) -> Result<()> {
    if let Some(threads) = args.threads {
        set_threads(threads)?;
    }
    let generator = GeneratorSpec {
        setting: args.setting,
        config: args.config,
        n: args.n,
        c_squared: args.c2,
        null_case: args.null,
    };
    let spec = SimulationSpec {
        generator,
        reps: args.reps,
        effect: args.effect.unwrap_or(args.setting.default_effect()),
        alpha: args.alpha,
        lambda: args.lambda,
        c_constant: args.diagnostic_c,
        master_seed: args.seed,
    };
    let summary = monte_carlo(&spec)?;
    if let Some(path) = &args.emit_stats {
        let mut out = sink(Some(path))?;
        writeln!(out, "replicate,statistic")?;
        for (r, s) in summary.statistics.iter().enumerate() {
            if s.is_finite() {
                writeln!(out, "{r},{s}")?;
            } else {
                writeln!(out, "{r},")?;
            }
        }
        out.flush()?;
    }
    let result = SimulationResult {
        effect: spec.effect,
        population_effect: generator.population_effect(),
        rejection_rate: summary.rejection_rate,
        rejections: summary.rejections,
        reps: summary.reps,
        standard_error: summary.standard_error,
        zero_variance: summary.zero_variance,
        branch_counts: summary.branch_counts,
    };
    emit(command, result, start, args.output.as_deref())
}

#[cfg(feature = "parallel")]
fn set_threads(threads: usize) -> Result<()> {
    if threads == 0 {
        bail!("--threads must be at least 1");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("cannot configure thread pool")
}

#[cfg(not(feature = "parallel"))]
fn set_threads(threads: usize) -> Result<()> {
    if threads == 0 {
        bail!("--threads must be at least 1");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let command = &cli.command;
    let outcome = match command {
        Command::Test(args) => run_test(command, args, start),
        Command::Diagnose(args) => run_diagnose(command, args, start),
        Command::LocalEffects(args) => run_local_effects(command, args, start),
        Command::Simulate(args) => run_simulate(command, args, start),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use ehs::model::{generate_instance, DeadlineMode, Dims};
use ehs::oracle::{export_ilp, solve_exact_with_mode, OracleLimits};
use ehs::{GenerationParams, Instance};
use ehs_bench::config::{Algorithm, ExperimentConfig};
use ehs_bench::plot::emit_plots_from_csv;
use ehs_bench::runner::{run_experiment, to_csv};

/// Scheduling experiments for energy-harvesting base stations.
#[derive(Parser)]
#[command(name = "ehs", version)]
struct Cli {
    /// Worker threads for the Monte-Carlo runner (defaults to all cores).
    #[arg(long, env = "EHS_WORKERS", global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random instance and print it as JSON.
    Generate(GenerateArgs),
    /// Run heuristics on an instance file.
    Solve(SolveArgs),
    /// Solve an instance exactly.
    Oracle(OracleArgs),
    /// Run a sweep described by a JSON config and write CSV.
    Bench(BenchArgs),
    /// Render SVG charts from a results CSV.
    Plot(PlotArgs),
    /// Write the integer program of an instance in LP format.
    ExportIlp(ExportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, short = 'u')]
    users: usize,
    #[arg(long, short = 'b', default_value_t = 1)]
    bs: usize,
    #[arg(long, short = 'c', default_value_t = 1)]
    channels: usize,
    #[arg(long, short = 't', default_value_t = 10)]
    slots: usize,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Every user gets deadline T.
    #[arg(long)]
    common_deadlines: bool,
    /// JSON file with generation parameters; flags above override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, short = 'i')]
    instance: PathBuf,
    /// Comma-separated subset of SCSB1,SCSB2,SCMB,MCSB,MCMB.
    #[arg(long, value_delimiter = ',', default_value = "MCMB")]
    algorithms: Vec<Algorithm>,
    #[arg(long)]
    energy_per_slot_mode: bool,
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, short = 'i')]
    instance: PathBuf,
    #[arg(long)]
    energy_per_slot_mode: bool,
    /// Search node budget; running out is an error.
    #[arg(long)]
    max_nodes: Option<u64>,
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the base seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the algorithm list of the config.
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<Algorithm>>,
    #[arg(long)]
    energy_per_slot_mode: bool,
    /// CSV path; falls back to the config, then stdout.
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
    /// Also render charts into this directory.
    #[arg(long)]
    plots: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long, short = 'o')]
    out: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long, short = 'i')]
    instance: PathBuf,
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Instance::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn mode(per_slot: bool) -> ehs::EnergyMode {
    if per_slot {
        ehs::EnergyMode::PerSlot
    } else {
        ehs::EnergyMode::PerChannel
    }
}

fn generate(args: GenerateArgs) -> Result<()> {
    let base = match &args.config {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)
            .with_context(|| format!("parsing {}", p.display()))?,
        None => GenerationParams::default(),
    };
    let params = GenerationParams {
        seed: args.seed,
        poisson_rate: args.lambda,
        deadline_mode: if args.common_deadlines { DeadlineMode::Common } else { base.deadline_mode },
        ..base
    };
    let inst = generate_instance(&params, Dims::new(args.users, args.bs, args.channels, args.slots))?;
    write_out(args.out.as_deref(), &(inst.to_json()? + "\n"))
}

fn solve(args: SolveArgs) -> Result<()> {
    let inst = read_instance(&args.instance)?;
    let m = mode(args.energy_per_slot_mode);
    let mut out = serde_json::Map::new();
    for alg in args.algorithms {
        let value = match alg {
            Algorithm::Scsb1 => serde_json::to_value(ehs::scsb::schedule_scsb1(&inst)?)?,
            Algorithm::Scsb2 => serde_json::to_value(ehs::common::schedule_scsb2(&inst)?)?,
            Algorithm::Mcsb => serde_json::to_value(ehs::multi::schedule_mcsb_with_mode(&inst, m)?)?,
            Algorithm::Scmb => serde_json::to_value(ehs::multi::schedule_scmb(&inst)?)?,
            Algorithm::Mcmb => serde_json::to_value(ehs::multi::schedule_mcmb_with_mode(&inst, m)?)?,
            Algorithm::Oracle => anyhow::bail!("use the oracle subcommand for exact solutions"),
        };
        out.insert(alg.name().to_owned(), value);
    }
    write_out(args.out.as_deref(), &(serde_json::to_string_pretty(&out)? + "\n"))
}

fn oracle(args: OracleArgs) -> Result<()> {
    let inst = read_instance(&args.instance)?;
    let mut limits = OracleLimits::default();
    if let Some(n) = args.max_nodes {
        limits.max_nodes = n;
    }
    let exact = solve_exact_with_mode(&inst, &limits, mode(args.energy_per_slot_mode))?;
    let value = serde_json::json!({
        "optimum": exact.optimum,
        "nodes": exact.nodes,
        "witness": exact.witness,
    });
    write_out(args.out.as_deref(), &(serde_json::to_string_pretty(&value)? + "\n"))
}

fn bench(args: BenchArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(algs) = args.algorithms {
        cfg.algorithms = algs;
    }
    cfg.energy_per_slot_mode |= args.energy_per_slot_mode;
    let rows = run_experiment(&cfg)?;
    let text = to_csv(&rows)?;
    write_out(args.out.as_deref().or(cfg.output.csv.as_deref()), &text)?;
    if let Some(dir) = args.plots.as_deref().or(cfg.output.plots.as_deref()) {
        let report = emit_plots_from_csv(&text, dir)?;
        for w in report.warnings {
            eprintln!("warning: {w}");
        }
    }
    Ok(())
}

fn plot(args: PlotArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.csv).with_context(|| format!("reading {}", args.csv.display()))?;
    let report = emit_plots_from_csv(&text, &args.out)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for p in &report.written {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Oracle(a) => oracle(a),
        Command::Bench(a) => bench(a),
        Command::Plot(a) => plot(a),
        Command::ExportIlp(a) => {
            let inst = read_instance(&a.instance)?;
            write_out(a.out.as_deref(), &export_ilp(&inst))
        }
    }
}

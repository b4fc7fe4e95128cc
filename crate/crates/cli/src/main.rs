//! `twoscale` — reproducible scenario runner for the two-scale covariance
//! reconstruction laboratory.
//!
//! Subcommands: `run`, `sweep`, `ingest`, `export-traj`. Reports are written
//! as deterministic JSON under the output directory (default `$TWOSCALE_OUT`
//! or `./out`); sweep timings go to CSV. Exit code 0 means every enabled
//! check passed, 1 means a check failed, 2 means the invocation or input was
//! invalid.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use twoscale_core::{
    export_trajectories, ingest_run, run_scenario, sweep_scenario, BipartiteShape, CenteringMode,
    RunOutcome, Scenario,
};

#[derive(Parser)]
#[command(
    name = "twoscale",
    about = "Reconstruct density operators from two-scale stochastic processes",
    version
)]
struct Cli {
    /// Output directory (default: $TWOSCALE_OUT, falling back to ./out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for window generation; results do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Override the scenario's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario end to end and write report.json + rho.json.
    Run { scenario: PathBuf },
    /// Re-run a scenario over several window counts; write sweep.csv.
    Sweep {
        scenario: PathBuf,
        /// Window counts, comma separated (for example: 10,100,1000).
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
    /// Run the estimator and marginal checks on an external trajectory CSV.
    Ingest(IngestArgs),
    /// Write a scenario's trajectories as CSV (the format `ingest` consumes).
    ExportTraj { scenario: PathBuf },
}

#[derive(Args)]
struct IngestArgs {
    data: PathBuf,
    /// Bipartite shape as `dimA,dimB`.
    #[arg(long)]
    shape: String,
    /// Macro window length.
    #[arg(long)]
    window: f64,
    /// Centering mode: `empirical`, `none`, or `zero-mean`.
    #[arg(long, default_value = "empirical")]
    centering: String,
    /// Report name (default: the data file stem).
    #[arg(long)]
    name: Option<String>,
}

fn output_dir(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os("TWOSCALE_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn load_scenario(path: &Path, seed: Option<u64>) -> Result<Scenario> {
    let mut scenario = Scenario::from_json_file(path)
        .with_context(|| format!("loading scenario {}", path.display()))?;
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    Ok(scenario)
}

fn parse_shape(text: &str) -> Result<BipartiteShape> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(anyhow!("--shape expects `dimA,dimB`, got `{text}`"));
    }
    let dim_a: usize = parts[0].trim().parse().context("parsing dimA")?;
    let dim_b: usize = parts[1].trim().parse().context("parsing dimB")?;
    Ok(BipartiteShape::new(dim_a, dim_b)?)
}

fn parse_centering(text: &str, composite_dim: usize) -> Result<CenteringMode> {
    match text {
        "empirical" => Ok(CenteringMode::EmpiricalMean),
        "none" => Ok(CenteringMode::None),
        "zero-mean" => Ok(CenteringMode::true_zero(composite_dim)?),
        other => Err(anyhow!(
            "unknown centering `{other}` (expected empirical, none, or zero-mean)"
        )),
    }
}

fn write_outcome(dir: &Path, outcome: &RunOutcome) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let report = serde_json::to_string_pretty(&outcome.report)?;
    std::fs::write(dir.join("report.json"), report)?;
    let rho = serde_json::to_string(&outcome.report.rho)?;
    std::fs::write(dir.join("rho.json"), rho)?;
    Ok(())
}

fn summarize(outcome: &RunOutcome) {
    let r = &outcome.report;
    let distance = r
        .trace_distance_to_target
        .map(|d| format!("{d:.3e}"))
        .unwrap_or_else(|| "n/a".into());
    println!(
        "{}: N={} centering={} trace={:.6} min_eig={:.3e} target_distance={} marginal_delta={:.3e} passed={}",
        r.scenario, r.n_windows, r.centering, r.trace, r.min_eigenvalue, distance,
        r.marginals.delta, r.passed
    );
}

fn run(cli: Cli) -> Result<bool> {
    let out_root = output_dir(&cli.out);
    match cli.command {
        Command::Run { scenario } => {
            let scenario = load_scenario(&scenario, cli.seed)?;
            let outcome = run_scenario(&scenario, cli.threads)?;
            let dir = out_root.join(&scenario.name);
            write_outcome(&dir, &outcome)?;
            summarize(&outcome);
            println!("report: {}", dir.join("report.json").display());
            Ok(outcome.report.passed)
        }
        Command::Sweep { scenario, n } => {
            let scenario = load_scenario(&scenario, cli.seed)?;
            let rows = sweep_scenario(&scenario, &n, cli.threads)?;
            let dir = out_root.join(&scenario.name);
            std::fs::create_dir_all(&dir)?;
            let path = dir.join("sweep.csv");
            let mut file = std::fs::File::create(&path)?;
            writeln!(
                file,
                "n_windows,trace_distance_to_target,min_eigenvalue,wallclock_ms"
            )?;
            for row in &rows {
                let distance = row
                    .trace_distance_to_target
                    .map(|d| d.to_string())
                    .unwrap_or_default();
                writeln!(
                    file,
                    "{},{},{},{}",
                    row.n_windows, distance, row.min_eigenvalue, row.wallclock_ms
                )?;
            }
            println!("sweep: {} rows -> {}", rows.len(), path.display());
            Ok(true)
        }
        Command::Ingest(args) => {
            let shape = parse_shape(&args.shape)?;
            let centering = parse_centering(&args.centering, shape.composite_dim())?;
            let name = args.name.clone().unwrap_or_else(|| {
                args.data
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "ingest".into())
            });
            let outcome = ingest_run(&args.data, &shape, args.window, &centering, &name)?;
            let dir = out_root.join(&name);
            write_outcome(&dir, &outcome)?;
            summarize(&outcome);
            println!("report: {}", dir.join("report.json").display());
            Ok(outcome.report.passed)
        }
        Command::ExportTraj { scenario } => {
            let scenario = load_scenario(&scenario, cli.seed)?;
            let dir = out_root.join(&scenario.name);
            std::fs::create_dir_all(&dir)?;
            let path = dir.join("trajectories.csv");
            let file = std::fs::File::create(&path)?;
            export_trajectories(&scenario, std::io::BufWriter::new(file))?;
            println!(
                "exported {} windows -> {}",
                scenario.n_windows,
                path.display()
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::from(1)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use homframe_cli::commands::{run, Command};
use homframe_cli::config::{parse, ExperimentConfig};
use homframe_cli::output::{version, write_timing, Provenance};
use homframe_cli::scenarios::{find, scenario_catalog};
use homframe_cli::CliError;
use serde_json::json;

/// Frame, density and localization experiments on homogeneous groups.
///
/// Every run writes `<command>.csv` (first line `# homframe <version> command=...
/// config_hash=... seed=...`), `<command>.json` with the summary, and
/// `<command>.timing.json` with the wall time. Exit codes: 0 success, 2 invalid
/// configuration (error JSON with line and column on stderr), 3 numerical failure.
#[derive(Parser, Debug)]
#[command(name = "homframe", version = version())]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long, global = true, env = "HOMFRAME_CONFIG")]
    config: Option<PathBuf>,
    /// Named preset from `homframe scenarios` (instead of --config).
    #[arg(long, global = true, env = "HOMFRAME_SCENARIO")]
    scenario: Option<String>,
    /// Overrides the configured seed.
    #[arg(long, global = true, env = "HOMFRAME_SEED")]
    seed: Option<u64>,
    /// Output directory (default: the config's output.dir, else `results`).
    #[arg(long, global = true, env = "HOMFRAME_OUT")]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, env = "HOMFRAME_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Beurling density estimates. CSV: dilation, radius, lower, upper, expected.
    Density,
    /// Finite-section frame bounds. CSV: radius, atoms, test_dimension, lower, upper, ratio, iterative.
    Framebounds,
    /// Finite-section Riesz bounds (Gram eigenvalues). CSV as for framebounds.
    Riesz,
    /// Lower-bound probes for p in {1, 2, inf}. CSV: p, radius, lower, upper.
    PProbe,
    /// Canonical dual frame. CSV: radius_lo, radius_hi, envelope (dual-frame-residuals.csv: hermite_order, residual).
    DualFrame,
    /// Bounds of dilated index sets. CSV: r, density, lower, upper, ratio.
    DeformSweep,
    /// Schur norm and inverse decay of a matrix file or of the configured Gramian.
    /// CSV: radius_lo, radius_hi, envelope[, inverse_envelope].
    Schur,
    /// Orthogonality relations for Hermite pairs. CSV: f1, f2, integral_re, integral_im,
    /// expected_re, expected_im, error, refinement_delta.
    Orthogonality,
    /// Prints the scenario catalog as JSON.
    Scenarios,
}

/// Fixed task count for the dense linear algebra.
const LINALG_TASKS: usize = 8;

fn load(common: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match (&common.config, &common.scenario) {
        (Some(_), Some(_)) => return Err(CliError::config("give either --config or --scenario, not both")),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            parse(&text)?
        }
        (None, Some(name)) => find(name).ok_or_else(|| CliError::config(format!("unknown scenario {name:?}")))?.config,
        (None, None) => return Err(CliError::config("a configuration is required: --config <path> or --scenario <name>")),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let cmd = match cli.command {
        Cmd::Scenarios => {
            let list: Vec<_> = scenario_catalog()
                .into_iter()
                .map(|s| json!({ "name": s.name, "description": s.description, "command": s.command.name(), "config": s.config }))
                .collect();
            println!("{}", serde_json::to_string_pretty(&list).expect("catalog serializes"));
            return Ok(());
        }
        Cmd::Density => Command::Density,
        Cmd::Framebounds => Command::FrameBounds,
        Cmd::Riesz => Command::Riesz,
        Cmd::PProbe => Command::PProbe,
        Cmd::DualFrame => Command::DualFrame,
        Cmd::DeformSweep => Command::DeformSweep,
        Cmd::Schur => Command::Schur,
        Cmd::Orthogonality => Command::Orthogonality,
    };
    let cfg = load(&cli.common)?;
    if let Some(n) = cli.common.threads {
        if n == 0 {
            return Err(CliError::config("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::config(e.to_string()))?;
    }
    // dense kernels split work by this count, not by the pool size, so rounding is thread-independent
    faer::set_global_parallelism(faer::Par::rayon(LINALG_TASKS));
    let dir = cli
        .common
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(|o| PathBuf::from(&o.dir)))
        .unwrap_or_else(|| PathBuf::from("results"));
    let start = Instant::now();
    let out = run(cmd, &cfg, &dir)?;
    let prov = Provenance { command: cmd.name().into(), config_hash: cfg.hash(), seed: cfg.seed };
    write_timing(&dir, cmd.name(), &prov, start.elapsed().as_secs_f64(), rayon::current_num_threads())?;
    println!("{}", serde_json::to_string_pretty(&out.summary).expect("summary serializes"));
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = execute(cli) {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}

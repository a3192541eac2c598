//! Command-line front end for the hybrid mmWave link simulator.
//!
//! Exit codes: 0 on success, 1 on configuration errors, 2 on runtime errors
//! (including failed validation checks).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use hybrid_mmwave::checks;
use hybrid_mmwave::config::{parse_config, RunManifest};
use hybrid_mmwave::experiment::{figure4_config, figure5_config, run_experiment, ExperimentConfig};
use hybrid_mmwave::output::{write_curves, write_manifest};

#[derive(Parser)]
#[command(name = "hybrid-mmwave", version, about = "Multiuser hybrid mmWave MIMO link simulator")]
struct Cli {
    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Trial-count override.
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Worker threads. When absent, the RAYON_NUM_THREADS environment
    /// variable (or the core count) decides.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config file.
    Run {
        /// Path to the experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Output directory for curves.csv and manifest.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the large-array preset (100 antennas, 10 single-antenna users,
    /// K-factor 2) against the fully digital reference and all bounds.
    Fig4 {
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the clustered non-sparse preset (100 antennas, 4 users with 16
    /// antennas each) contrasting ZF with analog-only steering.
    Fig5 {
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the validation suite and print one pass/fail line per check.
    Check,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

fn apply_overrides(mut cfg: ExperimentConfig, cli: &Cli) -> ExperimentConfig {
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    cfg
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn execute(cfg: ExperimentConfig, out_dir: &Path) -> anyhow::Result<()> {
    let started_at = timestamp();
    let points = run_experiment(&cfg)?;
    let finished_at = timestamp();

    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
    let csv_path = out_dir.join("curves.csv");
    write_curves(&points, &csv_path)?;
    let manifest = RunManifest {
        master_seed: cfg.master_seed,
        config_echo: cfg,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started_at,
        finished_at,
    };
    write_manifest(&manifest, &out_dir.join("manifest.json"))?;
    println!("wrote {}", csv_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(threads) = cli.threads {
        if let Err(err) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot configure {threads} worker threads: {err}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    }

    match &cli.command {
        Command::Run { config, out } => {
            let cfg = match parse_config(config) {
                Ok(cfg) => cfg,
                Err(err) => {
                    eprintln!("config error: {err}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let cfg = apply_overrides(cfg, &cli);
            // Overrides can invalidate an otherwise good file (e.g.
            // --trials 0); that is still a configuration problem.
            if let Err(err) = cfg.validate() {
                eprintln!("config error: {err}");
                return ExitCode::from(EXIT_CONFIG);
            }
            run_to_exit(cfg, out)
        }
        Command::Fig4 { out } => run_to_exit(apply_overrides(figure4_config(), &cli), out),
        Command::Fig5 { out } => run_to_exit(apply_overrides(figure5_config(), &cli), out),
        Command::Check => {
            let reports = checks::run_all();
            for report in &reports {
                println!("{}", report.status_line());
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            if failed == 0 {
                println!("all {} checks passed", reports.len());
                ExitCode::SUCCESS
            } else {
                println!("{failed}/{} checks failed", reports.len());
                ExitCode::from(EXIT_RUNTIME)
            }
        }
    }
}

fn run_to_exit(cfg: ExperimentConfig, out: &Path) -> ExitCode {
    match execute(cfg, out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

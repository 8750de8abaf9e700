use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ris_chest::harness::{dump_spectrum, run_sweep, run_trial, write_csv, ExperimentConfig, TrialSummary};

#[derive(Debug, Parser)]
#[command(name = "ris-chest", about = "RIS-assisted mmWave channel estimation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML experiment configuration; built-in defaults when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed (overrides the config)
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the Cartesian (SNR, L, RIS size) sweep and write a CSV
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Trials per sweep point (overrides the config)
        #[arg(long)]
        trials: Option<usize>,
        /// Output CSV path (overrides the config)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the (phi, psi) pseudo-spectrum of one trial at the first sweep point
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        trial_index: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a single trial at the first sweep point and print it as JSON
    Trial {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        trial_index: u64,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig, Box<dyn std::error::Error>> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.sweep.base_seed = seed;
    }
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Sweep { common, trials, out } => {
            let mut cfg = load(&common)?;
            if let Some(t) = trials {
                cfg.sweep.trials = t;
            }
            let path = out
                .or_else(|| cfg.output.csv.clone())
                .unwrap_or_else(|| PathBuf::from("results.csv"));
            let result = run_sweep(&cfg)?;
            write_csv(&path, &result, &cfg)?;
            for row in &result.rows {
                let p = &row.point;
                eprintln!(
                    "snr {:>6.1} dB  L {:>2}  {}x{}  nmse {:>8.2} dB (oracle {:>8.2})  se {:.3} (oracle {:.3})  failures {}  {:.1}s",
                    p.snr_db,
                    p.soundings,
                    p.n_x,
                    p.n_y,
                    row.nmse_db_proposed,
                    row.nmse_db_oracle,
                    row.se_proposed,
                    row.se_oracle,
                    row.failures,
                    row.wall_time_s
                );
                if row.oracle_violation() {
                    eprintln!("warning: OracleLS NMSE exceeds the proposed estimator by more than 1 dB");
                }
            }
            eprintln!("wrote {}", path.display());
        }
        Command::Spectrum { common, trial_index, out } => {
            let cfg = load(&common)?;
            let path = out
                .or_else(|| cfg.output.spectrum.clone())
                .ok_or("no output path: pass --out or set output.spectrum")?;
            let grid = dump_spectrum(&cfg, trial_index, &path)?;
            let (i, j) = grid.peak_index();
            eprintln!(
                "peak at phi {:.2} deg, psi {:.2} deg; wrote {}",
                grid.phi_axis.degrees_at(i),
                grid.psi_axis.degrees_at(j),
                path.display()
            );
        }
        Command::Trial { common, trial_index } => {
            let cfg = load(&common)?;
            cfg.validate()?;
            let point = cfg.first_point();
            let pair = run_trial(&cfg, &point, trial_index)?;
            let summary = TrialSummary::new(point, cfg.sweep.base_seed, trial_index, &pair);
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

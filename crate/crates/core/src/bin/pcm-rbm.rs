use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pcm_rbm::analysis::infer_missing_pixels;
use pcm_rbm::config::{ExperimentConfig, ExperimentKind};
use pcm_rbm::datasets::Pattern;
use pcm_rbm::experiments::{
    run_device_sweep, run_energy_report, run_pattern_sweep, run_trial, run_training_experiment, ArraySnapshot,
    TrialOptions, AGGREGATED_METRICS,
};
use pcm_rbm::rbm::RbmModel;
use pcm_rbm::Error;

const OUT_ENV: &str = "PCM_RBM_OUT";

#[derive(Parser)]
#[command(name = "pcm-rbm", version, about = "Train and analyze RBMs on simulated PCM synapse arrays")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON experiment config; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Dotted override, e.g. `train.epochs=30`. Repeatable.
    #[arg(long = "override", short = 'o', global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output directory (falls back to the config, then $PCM_RBM_OUT).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Multi-trial training run with per-epoch metrics.
    Train,
    /// Missing-pixel error rate versus number of stored patterns.
    SweepPatterns,
    /// Grid over cycle-to-cycle noise and number of gradual levels.
    SweepDevice,
    /// Posterior over masked pixels of a pattern.
    Infer {
        /// Row-major 0/1 string, e.g. 111000111.
        #[arg(long)]
        pattern: String,
        /// 0/1 string with 1 at each missing pixel.
        #[arg(long)]
        mask: String,
        /// Array snapshot written by `train`; without it trial 0 is trained first.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Per-epoch energy of the simulated array against conventional hardware.
    EnergyReport {
        /// Print JSON instead of tables.
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn runtime(e: Error) -> Failure {
    Failure::Runtime(e.to_string())
}

fn load_config(common: &Common, kind: ExperimentKind) -> Result<ExperimentConfig, Failure> {
    let mut overrides = common.overrides.clone();
    if let Some(seed) = common.seed {
        overrides.push(format!("seed={seed}"));
    }
    if let Some(trials) = common.trials {
        overrides.push(format!("trials={trials}"));
    }
    let mut config = ExperimentConfig::load(common.config.as_deref(), &overrides).map_err(usage)?;
    config.kind = kind;
    Ok(config)
}

fn output_dir(common: &Common, config: &ExperimentConfig, name: &str) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| Path::new("pcm-rbm-out").join(name))
}

fn parse_bits(label: &str, s: &str, n: usize) -> Result<Pattern, Failure> {
    let p: Pattern = s.parse().map_err(usage)?;
    if p.len() != n {
        return Err(Failure::Usage(format!("--{label} must have {n} characters, got {}", p.len())));
    }
    Ok(p)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let common = &cli.common;
    let verbose = common.verbose;
    match &cli.command {
        Command::Train => {
            let config = load_config(common, ExperimentKind::Train)?;
            let dir = output_dir(common, &config, "train");
            if verbose > 0 {
                eprintln!("training {} trials for {} epochs", config.trials, config.train.epochs);
            }
            let report = run_training_experiment(&config).map_err(runtime)?;
            report.write(&dir).map_err(runtime)?;
            let kl = AGGREGATED_METRICS.iter().position(|m| *m == "kl_exact_nats").unwrap();
            let err = AGGREGATED_METRICS.iter().position(|m| *m == "err_rate").unwrap();
            let energy = AGGREGATED_METRICS.iter().position(|m| *m == "total_energy_j").unwrap();
            println!("{:>5} {:>14} {:>14} {:>16}", "epoch", "kl_exact_nats", "err_rate", "energy_nJ");
            for row in report.aggregate() {
                if verbose == 0 && !(row.epoch % 10 == 0 || row.epoch == report.epochs()) {
                    continue;
                }
                let m = |i: usize| row.metrics[i].map_or(f64::NAN, |s| s.mean);
                println!("{:>5} {:>14.4} {:>14.4} {:>16.3}", row.epoch, m(kl), m(err), m(energy) * 1e9);
            }
            println!("wrote {}", dir.display());
        }
        Command::SweepPatterns => {
            let config = load_config(common, ExperimentKind::SweepPatterns)?;
            let dir = output_dir(common, &config, "sweep-patterns");
            let report = run_pattern_sweep(&config).map_err(runtime)?;
            report.write(&dir).map_err(runtime)?;
            println!("{:>10} {:>9} {:>6} {:>10} {:>10}", "n_patterns", "model", "epoch", "err_mean", "err_std");
            for r in &report.rows {
                println!("{:>10} {:>9} {:>6} {:>10.4} {:>10.4}", r.n_patterns, r.model, r.epoch, r.err_rate_mean, r.err_rate_std);
            }
            println!("wrote {}", dir.display());
        }
        Command::SweepDevice => {
            let config = load_config(common, ExperimentKind::SweepDevice)?;
            let dir = output_dir(common, &config, "sweep-device");
            let report = run_device_sweep(&config).map_err(runtime)?;
            report.write(&dir).map_err(runtime)?;
            println!("{:>9} {:>8} {:>12} {:>10}", "sigma_c2c", "n_levels", "kl_final", "err_final");
            for r in &report.rows {
                println!("{:>9} {:>8} {:>12.4} {:>10.4}", r.sigma_c2c, r.n_levels, r.kl_final_mean, r.err_final_mean);
            }
            println!("wrote {}", dir.display());
        }
        Command::Infer { pattern, mask, snapshot } => {
            let config = load_config(common, ExperimentKind::Train)?;
            let n = config.n_visible();
            let pattern = parse_bits("pattern", pattern, n)?;
            let mask: Vec<bool> = parse_bits("mask", mask, n)?.pixels().iter().map(|&b| b == 1).collect();
            let model = match snapshot {
                Some(path) => RbmModel::from_array(&ArraySnapshot::load(path).map_err(usage)?.array),
                None => {
                    let opts =
                        TrialOptions { epochs: config.train.epochs, ais: false, baseline: false, conductances: false };
                    let trial = run_trial(&config, 0, config.n_patterns, &config.device, opts).map_err(runtime)?;
                    if verbose > 0 {
                        let stored: Vec<String> = trial.patterns.iter().map(|p| p.to_string()).collect();
                        eprintln!("trained trial 0 on {}", stored.join(" "));
                    }
                    RbmModel::from_array(&trial.array)
                }
            };
            let inference = infer_missing_pixels(&model, pattern.pixels(), &mask).map_err(usage)?;
            println!("{}", serde_json::to_string_pretty(&inference).expect("inference serializes"));
        }
        Command::EnergyReport { json } => {
            let config = load_config(common, ExperimentKind::EnergyReport)?;
            let report = run_energy_report(&config).map_err(runtime)?;
            if *json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                println!(
                    "simulated array: {:.3} nJ/epoch programming, {:.3} nJ/epoch read over {} epochs",
                    report.simulated.programming_j * 1e9,
                    report.simulated.read_j * 1e9,
                    report.simulated.epochs
                );
                for c in &report.comparisons {
                    print!("{c}");
                }
            }
            if common.out.is_some() || config.output_dir.is_some() || std::env::var_os(OUT_ENV).is_some() {
                let dir = output_dir(common, &config, "energy-report");
                report.write(&dir).map_err(runtime)?;
                std::fs::write(dir.join("config.json"), config.to_json_pretty())
                    .map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

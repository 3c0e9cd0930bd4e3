//! Multi-trial experiment drivers and their CSV/JSON output.
//!
//! Every trial derives its own streams from `(seed, trial index)`, so trials
//! run in parallel and in any order without changing results. Sweeps reuse
//! the same trial seeds in every grid cell.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{ais_log_z, exact_distribution, kl_divergence, kl_with_log_z, recovery_scores};
use crate::config::ExperimentConfig;
use crate::crossbar::SynapseArray;
use crate::datasets::{make_dataset, DataSet, Pattern};
use crate::device::DeviceParams;
use crate::energy::{energy_comparison, EnergyComparison, EnergyLedger, EnergyPreset, EpochEnergy, SimulatedEnergy};
use crate::error::{Error, Result};
use crate::rbm::{default_learning_rate, train_epoch_baseline, train_epoch_hardware, RbmModel};
use crate::seed::{self, tag};

/// One row of `trial_<i>.csv`. Energy columns hold what was spent during
/// that epoch; row 0 carries the initial RESET of every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub kl_exact_nats: f64,
    pub kl_ais_nats: Option<f64>,
    pub err_rate: f64,
    pub success_rate: f64,
    pub prog_energy_j: f64,
    pub read_energy_j: f64,
    pub total_energy_j: f64,
    pub mean_w: f64,
    pub min_w: f64,
    pub max_w: f64,
    pub saturated_cells: usize,
}

/// One row of `baseline_trial_<i>.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineMetrics {
    pub epoch: usize,
    pub kl_exact_nats: f64,
    pub err_rate: f64,
    pub success_rate: f64,
    pub mean_w: f64,
    pub min_w: f64,
    pub max_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConductanceRow {
    pub epoch: usize,
    pub i: usize,
    pub j: usize,
    pub g_plus: f64,
    pub g_minus: f64,
    pub w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOptions {
    pub epochs: usize,
    pub ais: bool,
    pub baseline: bool,
    pub conductances: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub index: usize,
    pub seed: u64,
    pub patterns: Vec<Pattern>,
    pub learning_rate: f64,
    pub hardware: Vec<EpochMetrics>,
    pub baseline: Vec<BaselineMetrics>,
    pub conductances: Vec<ConductanceRow>,
    pub array: SynapseArray,
}

struct Evaluation {
    kl: f64,
    err_rate: f64,
    success_rate: f64,
}

fn evaluate(model: &RbmModel, data: &DataSet, distinct: &[Pattern]) -> Result<Evaluation> {
    let dist = exact_distribution(model)?;
    let scores = recovery_scores(model, distinct);
    Ok(Evaluation { kl: kl_divergence(data.empirical(), &dist), err_rate: scores.error_rate, success_rate: scores.success_rate })
}

/// Trains one array (and optionally the ideal-weight baseline) on its own
/// training set, recording metrics after every epoch.
pub fn run_trial(
    config: &ExperimentConfig,
    index: usize,
    n_patterns: usize,
    device: &DeviceParams,
    options: TrialOptions,
) -> Result<TrialResult> {
    let trial_seed = seed::trial_seed(config.seed, index);
    let data = make_dataset(config.dataset_mode, n_patterns, &mut seed::stream(trial_seed, &[tag::DATASET]))?;
    let distinct = data.distinct();
    let mut rng = seed::stream(trial_seed, &[tag::ARRAY]);
    let mut baseline_rng = seed::stream(trial_seed, &[tag::BASELINE]);
    let mut ais_rng = seed::stream(trial_seed, &[tag::AIS]);

    let mut ledger = EnergyLedger::new();
    let mut array =
        SynapseArray::initialize(config.n_visible(), config.n_hidden, device, &config.array, &mut rng, Some(&mut ledger))?;
    let eta = config.train.baseline_learning_rate.unwrap_or_else(|| default_learning_rate(&array));
    let mut baseline = RbmModel::from_array(&array);

    let mut hardware_rows = Vec::with_capacity(options.epochs + 1);
    let mut baseline_rows = Vec::new();
    let mut conductances = Vec::new();
    let mut record = |epoch: usize,
                      array: &SynapseArray,
                      baseline: &RbmModel,
                      spent: EpochEnergy,
                      ais_rng: &mut seed::Stream|
     -> Result<()> {
        let model = RbmModel::from_array(array);
        let eval = evaluate(&model, &data, &distinct)?;
        let kl_ais = if options.ais {
            let log_z = ais_log_z(&model, &config.ais, ais_rng)?;
            Some(kl_with_log_z(data.empirical(), &model, log_z))
        } else {
            None
        };
        let w = model.weights();
        let saturated = (0..array.n_visible())
            .flat_map(|i| (0..array.n_hidden()).map(move |j| (i, j)))
            .map(|(i, j)| usize::from(array.cell_plus(i, j).is_saturated()) + usize::from(array.cell_minus(i, j).is_saturated()))
            .sum();
        hardware_rows.push(EpochMetrics {
            epoch,
            kl_exact_nats: eval.kl,
            kl_ais_nats: kl_ais,
            err_rate: eval.err_rate,
            success_rate: eval.success_rate,
            prog_energy_j: spent.programming_j(),
            read_energy_j: spent.read_j(),
            total_energy_j: spent.total_j(),
            mean_w: w.mean(),
            min_w: w.min(),
            max_w: w.max(),
            saturated_cells: saturated,
        });
        if options.baseline {
            let eval = evaluate(baseline, &data, &distinct)?;
            let w = baseline.weights();
            baseline_rows.push(BaselineMetrics {
                epoch,
                kl_exact_nats: eval.kl,
                err_rate: eval.err_rate,
                success_rate: eval.success_rate,
                mean_w: w.mean(),
                min_w: w.min(),
                max_w: w.max(),
            });
        }
        if options.conductances {
            conductances.extend(array.conductance_rows().map(|(i, j, g_plus, g_minus, w)| ConductanceRow {
                epoch,
                i,
                j,
                g_plus,
                g_minus,
                w,
            }));
        }
        Ok(())
    };

    let init = ledger.close_epoch();
    record(0, &array, &baseline, init, &mut ais_rng)?;
    for epoch in 1..=options.epochs {
        train_epoch_hardware(&mut array, &data, &config.train, &mut rng, &mut ledger);
        if options.baseline {
            train_epoch_baseline(&mut baseline, &data, &config.train, eta, &mut baseline_rng);
        }
        let spent = ledger.close_epoch();
        record(epoch, &array, &baseline, spent, &mut ais_rng)?;
    }

    Ok(TrialResult {
        index,
        seed: trial_seed,
        patterns: data.patterns().to_vec(),
        learning_rate: eta,
        hardware: hardware_rows,
        baseline: baseline_rows,
        conductances,
        array,
    })
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

pub fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Some(Summary { mean, std: var.sqrt() })
}

/// Per-epoch columns that are aggregated across trials, in output order.
pub const AGGREGATED_METRICS: [&str; 13] = [
    "kl_exact_nats",
    "kl_ais_nats",
    "err_rate",
    "success_rate",
    "prog_energy_j",
    "read_energy_j",
    "total_energy_j",
    "mean_w",
    "min_w",
    "max_w",
    "baseline_kl_exact_nats",
    "baseline_err_rate",
    "baseline_success_rate",
];

fn metric(trial: &TrialResult, epoch: usize, name: &str) -> Option<f64> {
    let h = &trial.hardware[epoch];
    let b = trial.baseline.get(epoch);
    match name {
        "kl_exact_nats" => Some(h.kl_exact_nats),
        "kl_ais_nats" => h.kl_ais_nats,
        "err_rate" => Some(h.err_rate),
        "success_rate" => Some(h.success_rate),
        "prog_energy_j" => Some(h.prog_energy_j),
        "read_energy_j" => Some(h.read_energy_j),
        "total_energy_j" => Some(h.total_energy_j),
        "mean_w" => Some(h.mean_w),
        "min_w" => Some(h.min_w),
        "max_w" => Some(h.max_w),
        "baseline_kl_exact_nats" => b.map(|b| b.kl_exact_nats),
        "baseline_err_rate" => b.map(|b| b.err_rate),
        "baseline_success_rate" => b.map(|b| b.success_rate),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub epoch: usize,
    pub n_trials: usize,
    /// Parallel to [`AGGREGATED_METRICS`]; `None` where no trial has the metric.
    pub metrics: Vec<Option<Summary>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialResult>,
}

impl TrainingReport {
    pub fn epochs(&self) -> usize {
        self.trials[0].hardware.len() - 1
    }

    /// Values of `name` at `epoch`, one per trial that reports it.
    pub fn values(&self, name: &str, epoch: usize) -> Vec<f64> {
        self.trials.iter().filter_map(|t| metric(t, epoch, name)).collect()
    }

    /// Mean of `name` at `epoch` across trials.
    pub fn mean(&self, name: &str, epoch: usize) -> Option<f64> {
        summarize(&self.values(name, epoch)).map(|s| s.mean)
    }

    pub fn aggregate(&self) -> Vec<AggregateRow> {
        (0..=self.epochs())
            .map(|epoch| AggregateRow {
                epoch,
                n_trials: self.trials.len(),
                metrics: AGGREGATED_METRICS.iter().map(|m| summarize(&self.values(m, epoch))).collect(),
            })
            .collect()
    }

    /// Mean per-epoch energy over the training epochs (excluding initialization).
    pub fn simulated_energy(&self) -> SimulatedEnergy {
        let epochs = self.epochs();
        let span = |name: &str| -> f64 {
            let v: Vec<f64> = (1..=epochs).flat_map(|e| self.values(name, e)).collect();
            summarize(&v).map_or(0.0, |s| s.mean)
        };
        SimulatedEnergy {
            programming_j: span("prog_energy_j"),
            read_j: span("read_energy_j"),
            t_read: self.config.device.t_read,
            epochs,
        }
    }

    /// Writes `config.json`, per-trial CSV/JSON files and `aggregate.csv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_config(&self.config, dir)?;
        for t in &self.trials {
            write_csv(&dir.join(format!("trial_{}.csv", t.index)), &t.hardware)?;
            if !t.baseline.is_empty() {
                write_csv(&dir.join(format!("baseline_trial_{}.csv", t.index)), &t.baseline)?;
            }
            if !t.conductances.is_empty() {
                write_csv(&dir.join(format!("conductances_trial_{}.csv", t.index)), &t.conductances)?;
            }
            let snapshot = dir.join(format!("array_trial_{}.json", t.index));
            let text = serde_json::to_string_pretty(&TrialSnapshot { seed: t.seed, patterns: &t.patterns, array: &t.array })?;
            fs::write(&snapshot, text).map_err(|e| Error::io(&snapshot, e))?;
        }
        let path = dir.join("aggregate.csv");
        let mut w = csv::Writer::from_path(&path)?;
        let mut header = vec!["epoch".to_string(), "n_trials".to_string()];
        for m in AGGREGATED_METRICS {
            header.push(format!("{m}_mean"));
            header.push(format!("{m}_std"));
        }
        w.write_record(&header)?;
        for row in self.aggregate() {
            let mut rec = vec![row.epoch.to_string(), row.n_trials.to_string()];
            for s in &row.metrics {
                match s {
                    Some(s) => {
                        rec.push(s.mean.to_string());
                        rec.push(s.std.to_string());
                    }
                    None => rec.extend([String::new(), String::new()]),
                }
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        Ok(())
    }
}

/// Contents of `array_trial_<i>.json`.
#[derive(Serialize)]
struct TrialSnapshot<'a> {
    seed: u64,
    patterns: &'a [Pattern],
    array: &'a SynapseArray,
}

/// Array snapshot as written by [`TrainingReport::write`].
#[derive(Debug, Clone, Deserialize)]
pub struct ArraySnapshot {
    pub seed: u64,
    pub patterns: Vec<Pattern>,
    pub array: SynapseArray,
}

impl ArraySnapshot {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn write_config(config: &ExperimentConfig, dir: &Path) -> Result<()> {
    let path = dir.join("config.json");
    fs::write(&path, config.to_json_pretty()).map_err(|e| Error::io(&path, e))
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn run_trials(
    config: &ExperimentConfig,
    cells: &[(usize, DeviceParams)],
    options: TrialOptions,
) -> Result<Vec<Vec<TrialResult>>> {
    let jobs: Vec<(usize, usize)> =
        (0..cells.len()).flat_map(|c| (0..config.trials).map(move |t| (c, t))).collect();
    let results: Vec<Result<TrialResult>> = jobs
        .par_iter()
        .map(|&(c, t)| run_trial(config, t, cells[c].0, &cells[c].1, options))
        .collect();
    let mut out: Vec<Vec<TrialResult>> = (0..cells.len()).map(|_| Vec::with_capacity(config.trials)).collect();
    for ((c, _), r) in jobs.into_iter().zip(results) {
        out[c].push(r?);
    }
    Ok(out)
}

/// Trains `config.trials` arrays for `config.train.epochs` epochs.
pub fn run_training_experiment(config: &ExperimentConfig) -> Result<TrainingReport> {
    config.validate()?;
    let options = TrialOptions {
        epochs: config.train.epochs,
        ais: config.ais.enabled,
        baseline: config.baseline,
        conductances: config.record_conductances,
    };
    let trials = run_trials(config, &[(config.n_patterns, config.device)], options)?.remove(0);
    Ok(TrainingReport { config: config.clone(), trials })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternSweepTrialRow {
    pub n_patterns: usize,
    pub trial: usize,
    pub model: String,
    pub epoch: usize,
    pub kl_exact_nats: f64,
    pub err_rate: f64,
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternSweepRow {
    pub n_patterns: usize,
    pub model: String,
    pub epoch: usize,
    pub trials: usize,
    pub err_rate_mean: f64,
    pub err_rate_std: f64,
    pub success_rate_mean: f64,
    pub success_rate_std: f64,
    pub kl_exact_mean: f64,
    pub kl_exact_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternSweepReport {
    pub config: ExperimentConfig,
    pub raw: Vec<PatternSweepTrialRow>,
    pub rows: Vec<PatternSweepRow>,
}

impl PatternSweepReport {
    pub fn row(&self, n_patterns: usize, model: &str, epoch: usize) -> Option<&PatternSweepRow> {
        self.rows.iter().find(|r| r.n_patterns == n_patterns && r.model == model && r.epoch == epoch)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_config(&self.config, dir)?;
        write_csv(&dir.join("sweep_patterns_trials.csv"), &self.raw)?;
        write_csv(&dir.join("sweep_patterns.csv"), &self.rows)
    }
}

/// Error rates of the array and the ideal-weight baseline at epoch 0 and at
/// each checkpoint, for every stored-pattern count.
pub fn run_pattern_sweep(config: &ExperimentConfig) -> Result<PatternSweepReport> {
    config.validate()?;
    let mut checkpoints = config.sweep.checkpoints.clone();
    checkpoints.push(0);
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let epochs = *checkpoints.last().expect("non-empty");
    let options = TrialOptions { epochs, ais: false, baseline: true, conductances: false };
    let cells: Vec<(usize, DeviceParams)> = config.sweep.n_patterns.iter().map(|&n| (n, config.device)).collect();
    let results = run_trials(config, &cells, options)?;

    let mut raw = Vec::new();
    let mut rows = Vec::new();
    for ((n_patterns, _), trials) in cells.iter().zip(&results) {
        for model in ["pcm", "baseline"] {
            for &epoch in &checkpoints {
                let picked: Vec<(f64, f64, f64)> = trials
                    .iter()
                    .map(|t| match model {
                        "pcm" => (t.hardware[epoch].kl_exact_nats, t.hardware[epoch].err_rate, t.hardware[epoch].success_rate),
                        _ => (t.baseline[epoch].kl_exact_nats, t.baseline[epoch].err_rate, t.baseline[epoch].success_rate),
                    })
                    .collect();
                for (t, &(kl, err, succ)) in trials.iter().zip(&picked) {
                    raw.push(PatternSweepTrialRow {
                        n_patterns: *n_patterns,
                        trial: t.index,
                        model: model.into(),
                        epoch,
                        kl_exact_nats: kl,
                        err_rate: err,
                        success_rate: succ,
                    });
                }
                let col = |f: fn(&(f64, f64, f64)) -> f64| summarize(&picked.iter().map(f).collect::<Vec<_>>()).expect("trials >= 1");
                let (kl, err, succ) = (col(|x| x.0), col(|x| x.1), col(|x| x.2));
                rows.push(PatternSweepRow {
                    n_patterns: *n_patterns,
                    model: model.into(),
                    epoch,
                    trials: trials.len(),
                    err_rate_mean: err.mean,
                    err_rate_std: err.std,
                    success_rate_mean: succ.mean,
                    success_rate_std: succ.std,
                    kl_exact_mean: kl.mean,
                    kl_exact_std: kl.std,
                });
            }
        }
    }
    Ok(PatternSweepReport { config: config.clone(), raw, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceSweepTrialRow {
    pub sigma_c2c: f64,
    pub n_levels: u32,
    pub trial: usize,
    pub kl_initial_nats: f64,
    pub kl_final_nats: f64,
    pub err_final: f64,
    pub success_final: f64,
    pub kl_min_nats: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceSweepRow {
    pub sigma_c2c: f64,
    pub n_levels: u32,
    pub epochs: usize,
    pub trials: usize,
    pub kl_final_mean: f64,
    pub kl_final_std: f64,
    pub err_final_mean: f64,
    pub err_final_std: f64,
    pub success_final_mean: f64,
    pub success_final_std: f64,
    pub kl_min_mean: f64,
    pub kl_min_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceSweepReport {
    pub config: ExperimentConfig,
    pub raw: Vec<DeviceSweepTrialRow>,
    pub rows: Vec<DeviceSweepRow>,
}

impl DeviceSweepReport {
    pub fn row(&self, sigma_c2c: f64, n_levels: u32) -> Option<&DeviceSweepRow> {
        self.rows.iter().find(|r| r.sigma_c2c == sigma_c2c && r.n_levels == n_levels)
    }

    pub fn trials(&self, sigma_c2c: f64, n_levels: u32) -> Vec<&DeviceSweepTrialRow> {
        self.raw.iter().filter(|r| r.sigma_c2c == sigma_c2c && r.n_levels == n_levels).collect()
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_config(&self.config, dir)?;
        write_csv(&dir.join("sweep_device_trials.csv"), &self.raw)?;
        write_csv(&dir.join("sweep_device.csv"), &self.rows)
    }
}

/// Full factorial over cycle-to-cycle noise and number of gradual levels,
/// each cell trained for `config.train.epochs` epochs.
pub fn run_device_sweep(config: &ExperimentConfig) -> Result<DeviceSweepReport> {
    config.validate()?;
    let mut cells = Vec::new();
    for &sigma_c2c in &config.sweep.sigma_c2c {
        for &n_levels in &config.sweep.n_levels {
            let device = DeviceParams { sigma_c2c, n_levels, ..config.device };
            device.validate()?;
            cells.push((config.n_patterns, device));
        }
    }
    let options = TrialOptions { epochs: config.train.epochs, ais: false, baseline: false, conductances: false };
    let results = run_trials(config, &cells, options)?;

    let mut raw = Vec::new();
    let mut rows = Vec::new();
    for ((_, device), trials) in cells.iter().zip(&results) {
        let cell_raw: Vec<DeviceSweepTrialRow> = trials
            .iter()
            .map(|t| {
                let last = t.hardware.last().expect("at least the untrained row");
                DeviceSweepTrialRow {
                    sigma_c2c: device.sigma_c2c,
                    n_levels: device.n_levels,
                    trial: t.index,
                    kl_initial_nats: t.hardware[0].kl_exact_nats,
                    kl_final_nats: last.kl_exact_nats,
                    err_final: last.err_rate,
                    success_final: last.success_rate,
                    kl_min_nats: t.hardware.iter().map(|r| r.kl_exact_nats).fold(f64::INFINITY, f64::min),
                }
            })
            .collect();
        let col = |f: fn(&DeviceSweepTrialRow) -> f64| summarize(&cell_raw.iter().map(f).collect::<Vec<_>>()).expect("trials >= 1");
        let (kl, err, succ, kl_min) = (col(|r| r.kl_final_nats), col(|r| r.err_final), col(|r| r.success_final), col(|r| r.kl_min_nats));
        rows.push(DeviceSweepRow {
            sigma_c2c: device.sigma_c2c,
            n_levels: device.n_levels,
            epochs: config.train.epochs,
            trials: trials.len(),
            kl_final_mean: kl.mean,
            kl_final_std: kl.std,
            err_final_mean: err.mean,
            err_final_std: err.std,
            success_final_mean: succ.mean,
            success_final_std: succ.std,
            kl_min_mean: kl_min.mean,
            kl_min_std: kl_min.std,
        });
        raw.extend(cell_raw);
    }
    Ok(DeviceSweepReport { config: config.clone(), raw, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub simulated: SimulatedEnergy,
    pub comparisons: Vec<EnergyComparison>,
}

impl EnergyReport {
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("energy_report.json");
        fs::write(&path, serde_json::to_string_pretty(self)?).map_err(|e| Error::io(&path, e))
    }
}

/// Simulates a training run for its per-epoch energy, then compares it with
/// the conventional-hardware estimates of every preset.
pub fn run_energy_report(config: &ExperimentConfig) -> Result<EnergyReport> {
    let mut sim_config = config.clone();
    sim_config.ais.enabled = false;
    sim_config.baseline = false;
    sim_config.record_conductances = false;
    let simulated = run_training_experiment(&sim_config)?.simulated_energy();
    let comparisons = EnergyPreset::ALL
        .iter()
        .map(|&p| energy_comparison(p, Some(&simulated), &config.workload))
        .collect();
    Ok(EnergyReport { simulated, comparisons })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.trials = 3;
        c.train.epochs = 4;
        c.ais.n_temperatures = 50;
        c.ais.n_chains = 10;
        c
    }

    #[test]
    fn zero_epochs_gives_untrained_row() {
        let mut c = small();
        c.train.epochs = 0;
        c.device.sigma_d2d = 0.0;
        c.array.s_norm_override = Some(1e-6);
        let r = run_training_experiment(&c).unwrap();
        for t in &r.trials {
            assert_eq!(t.hardware.len(), 1);
            assert!((t.hardware[0].kl_exact_nats - (512.0f64 / 5.0).ln()).abs() < 1e-9);
            assert_eq!(t.hardware[0].err_rate, 0.5);
        }
    }

    #[test]
    fn trial_order_does_not_matter() {
        let c = small();
        let opts = TrialOptions { epochs: 4, ais: true, baseline: true, conductances: false };
        let forward: Vec<_> = (0..3).map(|i| run_trial(&c, i, 5, &c.device, opts).unwrap()).collect();
        let backward: Vec<_> = (0..3).rev().map(|i| run_trial(&c, i, 5, &c.device, opts).unwrap()).collect();
        for (a, b) in forward.iter().zip(backward.iter().rev()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn programming_energy_is_constant() {
        let r = run_training_experiment(&small()).unwrap();
        for t in &r.trials {
            for row in &t.hardware[1..] {
                assert_eq!(row.prog_energy_j, 3.24e-9);
            }
        }
    }

    #[test]
    fn one_cell_device_sweep_matches_training() {
        let mut c = small();
        c.sweep.sigma_c2c = vec![c.device.sigma_c2c];
        c.sweep.n_levels = vec![c.device.n_levels];
        let sweep = run_device_sweep(&c).unwrap();
        let train = run_training_experiment(&c).unwrap();
        for (row, t) in sweep.raw.iter().zip(&train.trials) {
            assert_eq!(row.kl_final_nats, t.hardware.last().unwrap().kl_exact_nats);
            assert_eq!(row.err_final, t.hardware.last().unwrap().err_rate);
        }
    }

    #[test]
    fn summary_is_population() {
        let s = summarize(&[1.0, 3.0]).unwrap();
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.std, 1.0);
        assert!(summarize(&[]).is_none());
    }
}

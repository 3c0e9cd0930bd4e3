//! Energy bookkeeping for simulated runs and the analytical comparison against
//! conventional processor-memory systems.

mod estimate;
mod ledger;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use estimate::{
    conventional_epoch_energy, pcm_epoch_energy_estimate, ConventionalBreakdown, ConventionalHwModel, PcmArrayModel,
    PcmBreakdown, PulseCounts,
};
pub use ledger::{simulated_epoch_report, EnergyLedger, EpochEnergy, EpochEnergyRow};

/// Named parameter sets for the energy comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyPreset {
    /// Xeon-Phi-class vector unit, 64-bit weights, on-chip non-volatile store.
    Digital64,
    /// Same processor with 16-bit weights; PCM side read with a 20 us ADC.
    Digital16,
    /// Weights stored in a 1 Gb 45 nm PCM array on the conventional side;
    /// same device constants for the neuromorphic side.
    PcmArray1Gb,
}

impl EnergyPreset {
    pub const ALL: [EnergyPreset; 3] = [EnergyPreset::Digital64, EnergyPreset::Digital16, EnergyPreset::PcmArray1Gb];

    pub fn name(self) -> &'static str {
        match self {
            EnergyPreset::Digital64 => "digital-64",
            EnergyPreset::Digital16 => "digital-16",
            EnergyPreset::PcmArray1Gb => "pcm-array-1gb",
        }
    }

    /// Published per-epoch figures (conventional, PCM) this preset is compared to.
    pub fn reference_j(self) -> (f64, f64) {
        match self {
            EnergyPreset::Digital64 => (910e-9, 6.1e-9),
            EnergyPreset::Digital16 => (230e-9, 4.4e-9),
            EnergyPreset::PcmArray1Gb => (590e-9, 19e-9),
        }
    }
}

/// Measured per-epoch energy of a simulated hardware run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulatedEnergy {
    pub programming_j: f64,
    pub read_j: f64,
    /// Integration time the read energy was simulated with.
    pub t_read: f64,
    pub epochs: usize,
}

/// Counts behind the 1 Gb array estimate; exposed so they can be adjusted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArrayWorkload {
    /// Partial-SET pulses per epoch on the neuromorphic side (one per synapse).
    pub set_pulses: u64,
    /// Device reads per epoch on the neuromorphic side: passes x devices.
    pub device_reads: u64,
    /// ADC integration time for neuromorphic reads.
    pub integration_time: f64,
    /// Weight bits loaded and stored once per epoch on the conventional side.
    pub weight_bits: u64,
    /// Fraction of stored bits written with a SET pulse; the rest use RESET.
    pub set_fraction: f64,
}

impl Default for ArrayWorkload {
    fn default() -> Self {
        Self { set_pulses: 45, device_reads: 7 * 90, integration_time: 50e-6, weight_bits: 45 * 64, set_fraction: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyComponent {
    pub side: String,
    pub name: String,
    pub value_j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyComparison {
    pub preset: EnergyPreset,
    pub components: Vec<EnergyComponent>,
    pub conventional_j: f64,
    pub pcm_j: f64,
    pub conventional_reference_j: f64,
    pub pcm_reference_j: f64,
    pub conventional_deviation: f64,
    pub pcm_deviation: f64,
    pub ratio: f64,
    pub notes: Vec<String>,
}

fn component(side: &str, name: &str, value_j: f64) -> EnergyComponent {
    EnergyComponent { side: side.into(), name: name.into(), value_j }
}

fn relative(value: f64, reference: f64) -> f64 {
    (value - reference) / reference
}

/// Builds the conventional-vs-PCM comparison for a preset.
///
/// The digital presets take the PCM side from a simulated run; without one
/// the PCM side is estimated from `workload` like the 1 Gb preset.
pub fn energy_comparison(
    preset: EnergyPreset,
    simulated: Option<&SimulatedEnergy>,
    workload: &ArrayWorkload,
) -> EnergyComparison {
    let mut notes = Vec::new();
    let mut components = Vec::new();
    let array = PcmArrayModel::default();

    let conventional = match preset {
        EnergyPreset::Digital64 | EnergyPreset::Digital16 => {
            let bits = if preset == EnergyPreset::Digital64 { 64 } else { 16 };
            let b = conventional_epoch_energy(&ConventionalHwModel { synapse_bits: bits, ..Default::default() });
            components.push(component("conventional", "visible_to_hidden_pass", b.vh_pass_ops * 1e-9));
            components.push(component("conventional", "hidden_to_visible_pass", b.hv_pass_ops * 1e-9));
            components.push(component("conventional", "all_passes", b.pass_ops * 1e-9));
            components.push(component("conventional", "weight_update", b.update_ops * 1e-9));
            components.push(component("conventional", "logic", b.logic_j));
            components.push(component("conventional", "memory", b.memory_j));
            b.total_j
        }
        EnergyPreset::PcmArray1Gb => {
            let b = conventional_epoch_energy(&ConventionalHwModel::default());
            let bits = workload.weight_bits as f64;
            let load = bits * array.read_energy_per_device();
            let store = bits
                * (workload.set_fraction * array.set_pulse_energy()
                    + (1.0 - workload.set_fraction) * array.reset_pulse_energy());
            components.push(component("conventional", "logic", b.logic_j));
            components.push(component("conventional", "memory_load", load));
            components.push(component("conventional", "memory_store", store));
            notes.push(format!(
                "memory side assumes {} bits loaded and stored once per epoch, {:.0}% written by SET",
                workload.weight_bits,
                workload.set_fraction * 100.0
            ));
            b.logic_j + load + store
        }
    };

    let pcm = match (preset, simulated) {
        (EnergyPreset::Digital64, Some(sim)) | (EnergyPreset::Digital16, Some(sim)) => {
            let read_scale = if preset == EnergyPreset::Digital16 { 20e-6 / sim.t_read } else { 1.0 };
            components.push(component("pcm", "programming", sim.programming_j));
            components.push(component("pcm", "read", sim.read_j * read_scale));
            notes.push(format!("PCM side is the mean of {} simulated epochs", sim.epochs));
            if read_scale != 1.0 {
                notes.push("read energy rescaled to a 20 us integration window".into());
            }
            sim.programming_j + sim.read_j * read_scale
        }
        _ => {
            let t_int = if preset == EnergyPreset::Digital16 { 20e-6 } else { workload.integration_time };
            let b = pcm_epoch_energy_estimate(
                &array.with_read_time(t_int),
                PulseCounts { set: workload.set_pulses, reset: 0 },
                workload.device_reads,
            );
            components.push(component("pcm", "programming", b.set_j));
            components.push(component("pcm", "read", b.read_j));
            notes.push(format!(
                "PCM side assumes {} SET pulses and {} device reads at mean conductance",
                workload.set_pulses, workload.device_reads
            ));
            b.total_j
        }
    };

    let (conventional_reference_j, pcm_reference_j) = preset.reference_j();
    let conventional_deviation = relative(conventional, conventional_reference_j);
    let pcm_deviation = relative(pcm, pcm_reference_j);
    if conventional_deviation.abs() > 0.005 || pcm_deviation.abs() > 0.005 {
        notes.push(format!(
            "residual vs reference: conventional {:+.1}%, pcm {:+.1}% (unitemized op counts)",
            conventional_deviation * 100.0,
            pcm_deviation * 100.0
        ));
    }
    EnergyComparison {
        preset,
        components,
        conventional_j: conventional,
        pcm_j: pcm,
        conventional_reference_j,
        pcm_reference_j,
        conventional_deviation,
        pcm_deviation,
        ratio: conventional / pcm,
        notes,
    }
}

impl fmt::Display for EnergyComparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "preset: {}", self.preset.name())?;
        writeln!(f, "  {:<14} {:<24} {:>12}", "side", "component", "nJ/epoch")?;
        for c in &self.components {
            writeln!(f, "  {:<14} {:<24} {:>12.4}", c.side, c.name, c.value_j * 1e9)?;
        }
        writeln!(
            f,
            "  conventional total {:>10.3} nJ (reference {:.1} nJ, {:+.1}%)",
            self.conventional_j * 1e9,
            self.conventional_reference_j * 1e9,
            self.conventional_deviation * 100.0
        )?;
        writeln!(
            f,
            "  pcm total          {:>10.3} nJ (reference {:.1} nJ, {:+.1}%)",
            self.pcm_j * 1e9,
            self.pcm_reference_j * 1e9,
            self.pcm_deviation * 100.0
        )?;
        writeln!(f, "  ratio conventional/pcm: {:.1}x", self.ratio)?;
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

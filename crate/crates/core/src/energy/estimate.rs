//! Analytical per-epoch energy estimates for a conventional processor with
//! digital synapses and for a PCM array used directly as the synapses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vector-op counts of one visible-to-hidden and one hidden-to-visible pass,
/// calibrated at 5 data vectors x 9 visible x 5 hidden with 64-bit weights.
const CALIBRATED_VH_OPS: f64 = 73.125;
const CALIBRATED_HV_OPS: f64 = 45.0;
const CALIBRATED_SHAPE: f64 = 5.0 * 9.0 * 5.0;
const VECTOR_BITS: usize = 512;

/// Processor-plus-memory model for one CD epoch run in software.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConventionalHwModel {
    pub e_vector_op: f64,
    pub dataset_size: usize,
    pub n_visible: usize,
    pub n_hidden: usize,
    pub k: usize,
    pub memory_access_j: f64,
    pub synapse_bits: usize,
}

impl Default for ConventionalHwModel {
    fn default() -> Self {
        Self {
            e_vector_op: 1e-9,
            dataset_size: 5,
            n_visible: 9,
            n_hidden: 5,
            k: 3,
            memory_access_j: 480e-9,
            synapse_bits: 64,
        }
    }
}

impl ConventionalHwModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.e_vector_op >= 0.0 && self.memory_access_j >= 0.0) {
            return Err(Error::InvalidParameter("energies must be non-negative".into()));
        }
        if self.dataset_size == 0 || self.n_visible == 0 || self.n_hidden == 0 || self.synapse_bits == 0 {
            return Err(Error::InvalidParameter("shapes and synapse_bits must be positive".into()));
        }
        Ok(())
    }

    fn bit_scale(&self) -> f64 {
        self.synapse_bits as f64 / 64.0
    }

    fn shape_scale(&self) -> f64 {
        (self.dataset_size * self.n_visible * self.n_hidden) as f64 / CALIBRATED_SHAPE
    }

    /// Vector ops of one visible-to-hidden pass. Shapes other than the
    /// calibrated one scale with the number of multiply-accumulates; this
    /// extrapolation is heuristic.
    pub fn vh_pass_ops(&self) -> f64 {
        CALIBRATED_VH_OPS * self.shape_scale() * self.bit_scale()
    }

    pub fn hv_pass_ops(&self) -> f64 {
        CALIBRATED_HV_OPS * self.shape_scale() * self.bit_scale()
    }

    /// Vector additions for `W += dW`, one per full vector register.
    pub fn update_ops(&self) -> f64 {
        (self.n_visible * self.n_hidden * self.synapse_bits).div_ceil(VECTOR_BITS) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConventionalBreakdown {
    pub vh_pass_ops: f64,
    pub hv_pass_ops: f64,
    pub vh_passes: usize,
    pub hv_passes: usize,
    pub update_ops: f64,
    /// Vector ops of all passes, excluding the update.
    pub pass_ops: f64,
    pub logic_ops: f64,
    pub logic_j: f64,
    pub memory_j: f64,
    pub total_j: f64,
}

/// k+1 visible-to-hidden and k hidden-to-visible passes, one weight update,
/// plus one load/store of the weights.
pub fn conventional_epoch_energy(model: &ConventionalHwModel) -> ConventionalBreakdown {
    let vh_passes = model.k + 1;
    let hv_passes = model.k;
    let vh = model.vh_pass_ops();
    let hv = model.hv_pass_ops();
    let update = model.update_ops();
    let pass_ops = vh_passes as f64 * vh + hv_passes as f64 * hv;
    let logic_ops = pass_ops + update;
    let logic_j = logic_ops * model.e_vector_op;
    let memory_j = model.memory_access_j * model.bit_scale();
    ConventionalBreakdown {
        vh_pass_ops: vh,
        hv_pass_ops: hv,
        vh_passes,
        hv_passes,
        update_ops: update,
        pass_ops,
        logic_ops,
        logic_j,
        memory_j,
        total_j: logic_j + memory_j,
    }
}

/// Electrical characteristics of a PCM technology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PcmArrayModel {
    pub v_set: f64,
    pub i_set: f64,
    pub t_set: f64,
    pub v_reset: f64,
    pub i_reset: f64,
    pub t_reset: f64,
    pub v_read: f64,
    pub t_read: f64,
    pub r_low: f64,
    pub r_high: f64,
}

impl Default for PcmArrayModel {
    /// 1 Gb array in a 45 nm node.
    fn default() -> Self {
        Self {
            v_set: 1.8,
            i_set: 100e-6,
            t_set: 400e-9,
            v_reset: 2.2,
            i_reset: 200e-6,
            t_reset: 50e-9,
            v_read: 0.1,
            t_read: 20e-9,
            r_low: 10e3,
            r_high: 2e6,
        }
    }
}

impl PcmArrayModel {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.v_set, self.i_set, self.t_set, self.v_reset, self.i_reset, self.t_reset, self.v_read,
            self.t_read, self.r_low, self.r_high,
        ];
        if all.iter().all(|x| x.is_finite() && *x > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidParameter("PCM array parameters must be positive".into()))
        }
    }

    pub fn set_pulse_energy(&self) -> f64 {
        self.v_set * self.i_set * self.t_set
    }

    pub fn reset_pulse_energy(&self) -> f64 {
        self.v_reset * self.i_reset * self.t_reset
    }

    pub fn mean_conductance(&self) -> f64 {
        (1.0 / self.r_low + 1.0 / self.r_high) / 2.0
    }

    pub fn read_energy_per_device(&self) -> f64 {
        self.v_read * self.v_read * self.mean_conductance() * self.t_read
    }

    pub fn with_read_time(&self, t_read: f64) -> Self {
        Self { t_read, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PulseCounts {
    pub set: u64,
    pub reset: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcmBreakdown {
    pub set_j: f64,
    pub reset_j: f64,
    pub read_j: f64,
    pub total_j: f64,
}

pub fn pcm_epoch_energy_estimate(model: &PcmArrayModel, pulses_per_epoch: PulseCounts, reads_per_epoch: u64) -> PcmBreakdown {
    let set_j = pulses_per_epoch.set as f64 * model.set_pulse_energy();
    let reset_j = pulses_per_epoch.reset as f64 * model.reset_pulse_energy();
    let read_j = reads_per_epoch as f64 * model.read_energy_per_device();
    PcmBreakdown { set_j, reset_j, read_j, total_j: set_j + reset_j + read_j }
}

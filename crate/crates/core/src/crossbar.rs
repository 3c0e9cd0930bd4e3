//! Differential 2-PCM synapse array.
//!
//! Each synapse `(i, j)` is a pair of cells; its weight is
//! `w_ij = ((G+_ij - G-_ij) - M) / S`, where `M` and `S` are the mean and
//! spread of the initial differences, frozen at initialization. Since cells
//! only grow, a weight is raised by pulsing `G+` and lowered by pulsing `G-`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::device::{DeviceParams, PcmCell};
use crate::energy::EnergyLedger;
use crate::error::{Error, Result};

/// Dense row-major `n_visible x n_hidden` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightMatrix {
    n_visible: usize,
    n_hidden: usize,
    values: Vec<f64>,
}

impl WeightMatrix {
    pub fn zeros(n_visible: usize, n_hidden: usize) -> Self {
        Self { n_visible, n_hidden, values: vec![0.0; n_visible * n_hidden] }
    }

    pub fn filled(n_visible: usize, n_hidden: usize, value: f64) -> Self {
        Self { n_visible, n_hidden, values: vec![value; n_visible * n_hidden] }
    }

    pub fn from_fn(n_visible: usize, n_hidden: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(n_visible * n_hidden);
        for i in 0..n_visible {
            for j in 0..n_hidden {
                values.push(f(i, j));
            }
        }
        Self { n_visible, n_hidden, values }
    }

    /// Panics unless `values.len() == n_visible * n_hidden`.
    pub fn from_vec(n_visible: usize, n_hidden: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), n_visible * n_hidden, "weight matrix shape mismatch");
        Self { n_visible, n_hidden, values }
    }

    pub fn n_visible(&self) -> usize {
        self.n_visible
    }

    pub fn n_hidden(&self) -> usize {
        self.n_hidden
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_hidden + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.values[i * self.n_hidden + j] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// `W^T v` for a binary visible vector.
    pub fn hidden_input(&self, v: &[u8]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n_visible);
        let mut out = vec![0.0; self.n_hidden];
        for (row, &vi) in self.values.chunks_exact(self.n_hidden).zip(v) {
            if vi != 0 {
                for (o, w) in out.iter_mut().zip(row) {
                    *o += w;
                }
            }
        }
        out
    }

    /// `W h` for a binary hidden vector.
    pub fn visible_input(&self, h: &[u8]) -> Vec<f64> {
        debug_assert_eq!(h.len(), self.n_hidden);
        self.values
            .chunks_exact(self.n_hidden)
            .map(|row| row.iter().zip(h).filter(|(_, &hj)| hj != 0).map(|(w, _)| w).sum())
            .collect()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|w| w.is_finite())
    }
}

/// Estimator used for the frozen spread `S`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpreadEstimator {
    #[default]
    Population,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArrayOptions {
    /// Replaces the measured `S`; required when the initial spread is zero.
    pub s_norm_override: Option<f64>,
    pub spread: SpreadEstimator,
    /// Additive energy per physical read pass for the wires.
    pub wire_energy_per_read_j: f64,
}

impl Default for ArrayOptions {
    fn default() -> Self {
        Self { s_norm_override: None, spread: SpreadEstimator::Population, wire_energy_per_read_j: 0.0 }
    }
}

/// Which cell of a synapse receives the pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Pulse `G+`, raising the weight.
    Potentiate,
    /// Pulse `G-`, lowering the weight.
    Depress,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynapseArray {
    n_visible: usize,
    n_hidden: usize,
    params: DeviceParams,
    cells_plus: Vec<PcmCell>,
    cells_minus: Vec<PcmCell>,
    m_norm: f64,
    s_norm: f64,
    wire_energy_per_read_j: f64,
}

impl SynapseArray {
    /// Samples `2 * n_visible * n_hidden` devices, RESETs them all, and
    /// freezes `M` and `S` from the initial conductance differences.
    pub fn initialize<R: Rng + ?Sized>(
        n_visible: usize,
        n_hidden: usize,
        params: &DeviceParams,
        options: &ArrayOptions,
        rng: &mut R,
        mut ledger: Option<&mut EnergyLedger>,
    ) -> Result<Self> {
        if n_visible == 0 || n_hidden == 0 {
            return Err(Error::InvalidParameter("array dimensions must be at least 1".into()));
        }
        params.validate()?;
        let n = n_visible * n_hidden;
        let mut cells_plus = Vec::with_capacity(n);
        let mut cells_minus = Vec::with_capacity(n);
        for _ in 0..n {
            cells_plus.push(PcmCell::new(params, rng, ledger.as_deref_mut()));
            cells_minus.push(PcmCell::new(params, rng, ledger.as_deref_mut()));
        }
        let diffs: Vec<f64> = cells_plus.iter().zip(&cells_minus).map(|(p, m)| p.g - m.g).collect();
        let m_norm = diffs.iter().sum::<f64>() / n as f64;
        let ss: f64 = diffs.iter().map(|d| (d - m_norm).powi(2)).sum();
        let measured = match options.spread {
            SpreadEstimator::Population => (ss / n as f64).sqrt(),
            SpreadEstimator::Sample if n > 1 => (ss / (n - 1) as f64).sqrt(),
            SpreadEstimator::Sample => 0.0,
        };
        let s_norm = match options.s_norm_override {
            Some(s) if s > 0.0 && s.is_finite() => s,
            Some(s) => return Err(Error::InvalidParameter(format!("s_norm_override must be positive, got {s}"))),
            None if measured > 0.0 => measured,
            None => return Err(Error::ZeroSpread),
        };
        if !(options.wire_energy_per_read_j >= 0.0) {
            return Err(Error::InvalidParameter("wire energy must be non-negative".into()));
        }
        Ok(Self {
            n_visible,
            n_hidden,
            params: *params,
            cells_plus,
            cells_minus,
            m_norm,
            s_norm,
            wire_energy_per_read_j: options.wire_energy_per_read_j,
        })
    }

    pub fn n_visible(&self) -> usize {
        self.n_visible
    }

    pub fn n_hidden(&self) -> usize {
        self.n_hidden
    }

    pub fn params(&self) -> &DeviceParams {
        &self.params
    }

    pub fn m_norm(&self) -> f64 {
        self.m_norm
    }

    pub fn s_norm(&self) -> f64 {
        self.s_norm
    }

    fn index(&self, i: usize, j: usize) -> usize {
        assert!(i < self.n_visible && j < self.n_hidden, "synapse ({i}, {j}) out of range");
        i * self.n_hidden + j
    }

    pub fn cell_plus(&self, i: usize, j: usize) -> &PcmCell {
        &self.cells_plus[self.index(i, j)]
    }

    pub fn cell_minus(&self, i: usize, j: usize) -> &PcmCell {
        &self.cells_minus[self.index(i, j)]
    }

    fn map(&self, plus: &PcmCell, minus: &PcmCell) -> f64 {
        ((plus.g - minus.g) - self.m_norm) / self.s_norm
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let k = self.index(i, j);
        self.map(&self.cells_plus[k], &self.cells_minus[k])
    }

    /// Snapshot of the mapped weights. Pure read; no energy is charged.
    pub fn weights(&self) -> WeightMatrix {
        WeightMatrix::from_vec(
            self.n_visible,
            self.n_hidden,
            self.cells_plus.iter().zip(&self.cells_minus).map(|(p, m)| self.map(p, m)).collect(),
        )
    }

    /// Box every weight stays inside given the nominal device endpoints.
    pub fn weight_bounds(&self) -> (f64, f64) {
        let span = self.params.g_max - self.params.g_min;
        ((-span - self.m_norm) / self.s_norm, (span - self.m_norm) / self.s_norm)
    }

    /// One partial-SET pulse to `G+` or `G-` of synapse `(i, j)`.
    pub fn apply_update<R: Rng + ?Sized>(
        &mut self,
        i: usize,
        j: usize,
        direction: Direction,
        rng: &mut R,
        ledger: &mut EnergyLedger,
    ) {
        let k = self.index(i, j);
        let cell = match direction {
            Direction::Potentiate => &mut self.cells_plus[k],
            Direction::Depress => &mut self.cells_minus[k],
        };
        cell.partial_set(&self.params, rng, ledger);
    }

    /// Physical read driven from the visible side: returns `W^T v` and
    /// charges the read energy of both cells on every active row.
    pub fn read_preactivation(&self, v: &[u8], ledger: &mut EnergyLedger) -> Vec<f64> {
        assert_eq!(v.len(), self.n_visible, "visible vector length");
        let mut out = vec![0.0; self.n_hidden];
        let mut conductance = 0.0;
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let k = i * self.n_hidden + j;
                let (p, m) = (&self.cells_plus[k], &self.cells_minus[k]);
                *o += self.map(p, m);
                conductance += p.g + m.g;
            }
        }
        self.charge_read(conductance, v.iter().any(|&x| x != 0), ledger);
        out
    }

    /// Physical read driven from the hidden side: returns `W h`.
    pub fn read_visible_preactivation(&self, h: &[u8], ledger: &mut EnergyLedger) -> Vec<f64> {
        assert_eq!(h.len(), self.n_hidden, "hidden vector length");
        let mut out = vec![0.0; self.n_visible];
        let mut conductance = 0.0;
        for (i, o) in out.iter_mut().enumerate() {
            for (j, &hj) in h.iter().enumerate() {
                if hj == 0 {
                    continue;
                }
                let k = i * self.n_hidden + j;
                let (p, m) = (&self.cells_plus[k], &self.cells_minus[k]);
                *o += self.map(p, m);
                conductance += p.g + m.g;
            }
        }
        self.charge_read(conductance, h.iter().any(|&x| x != 0), ledger);
        out
    }

    fn charge_read(&self, conductance: f64, any_active: bool, ledger: &mut EnergyLedger) {
        if any_active {
            ledger.accrue_read(self.params.read_energy(conductance) + self.wire_energy_per_read_j);
        }
    }

    /// Long-format rows for plotting conductance evolution.
    pub fn conductance_rows(&self) -> impl Iterator<Item = (usize, usize, f64, f64, f64)> + '_ {
        (0..self.n_visible).flat_map(move |i| {
            (0..self.n_hidden).map(move |j| {
                let k = i * self.n_hidden + j;
                (i, j, self.cells_plus[k].g, self.cells_minus[k].g, self.map(&self.cells_plus[k], &self.cells_minus[k]))
            })
        })
    }

    pub fn total_pulses(&self) -> u64 {
        self.cells_plus.iter().chain(&self.cells_minus).map(|c| u64::from(c.pulses_applied)).sum()
    }
}

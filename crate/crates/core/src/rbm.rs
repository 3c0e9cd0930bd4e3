//! Binary RBM with fixed biases and contrastive-divergence training, either
//! on a PCM synapse array (sign-only pulses) or on ideal 64-bit weights.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::crossbar::{Direction, SynapseArray, WeightMatrix};
use crate::datasets::DataSet;
use crate::energy::EnergyLedger;
use crate::error::{Error, Result};

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn bernoulli<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> Vec<u8> {
    p.iter().map(|&pi| u8::from(rng.random::<f64>() < pi)).collect()
}

/// Weights plus visible biases `a` and hidden biases `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbmModel {
    weights: WeightMatrix,
    visible_bias: Vec<f64>,
    hidden_bias: Vec<f64>,
}

impl RbmModel {
    /// Model with both biases fixed at zero.
    pub fn new(weights: WeightMatrix) -> Self {
        let (nv, nh) = (weights.n_visible(), weights.n_hidden());
        Self { weights, visible_bias: vec![0.0; nv], hidden_bias: vec![0.0; nh] }
    }

    pub fn with_biases(weights: WeightMatrix, visible_bias: Vec<f64>, hidden_bias: Vec<f64>) -> Result<Self> {
        if visible_bias.len() != weights.n_visible() || hidden_bias.len() != weights.n_hidden() {
            return Err(Error::InvalidParameter("bias lengths do not match weight shape".into()));
        }
        Ok(Self { weights, visible_bias, hidden_bias })
    }

    pub fn zeros(n_visible: usize, n_hidden: usize) -> Self {
        Self::new(WeightMatrix::zeros(n_visible, n_hidden))
    }

    pub fn from_array(array: &SynapseArray) -> Self {
        Self::new(array.weights())
    }

    pub fn n_visible(&self) -> usize {
        self.weights.n_visible()
    }

    pub fn n_hidden(&self) -> usize {
        self.weights.n_hidden()
    }

    pub fn weights(&self) -> &WeightMatrix {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut WeightMatrix {
        &mut self.weights
    }

    pub fn visible_bias(&self) -> &[f64] {
        &self.visible_bias
    }

    pub fn hidden_bias(&self) -> &[f64] {
        &self.hidden_bias
    }

    /// `E(v, h) = -a.v - b.h - v^T W h`.
    pub fn energy(&self, v: &[u8], h: &[u8]) -> f64 {
        let av: f64 = self.visible_bias.iter().zip(v).map(|(a, &x)| a * f64::from(x)).sum();
        let bh: f64 = self.hidden_bias.iter().zip(h).map(|(b, &x)| b * f64::from(x)).sum();
        let vwh: f64 = self.weights.hidden_input(v).iter().zip(h).map(|(s, &x)| s * f64::from(x)).sum();
        -av - bh - vwh
    }

    pub fn hidden_preactivation(&self, v: &[u8]) -> Vec<f64> {
        let mut x = self.weights.hidden_input(v);
        for (xi, b) in x.iter_mut().zip(&self.hidden_bias) {
            *xi += b;
        }
        x
    }

    pub fn visible_preactivation(&self, h: &[u8]) -> Vec<f64> {
        let mut x = self.weights.visible_input(h);
        for (xi, a) in x.iter_mut().zip(&self.visible_bias) {
            *xi += a;
        }
        x
    }

    pub fn p_hidden_given_visible(&self, v: &[u8]) -> Vec<f64> {
        self.hidden_preactivation(v).into_iter().map(sigmoid).collect()
    }

    pub fn p_visible_given_hidden(&self, h: &[u8]) -> Vec<f64> {
        self.visible_preactivation(h).into_iter().map(sigmoid).collect()
    }

    pub fn sample_hidden<R: Rng + ?Sized>(&self, v: &[u8], rng: &mut R) -> Vec<u8> {
        bernoulli(&self.p_hidden_given_visible(v), rng)
    }

    pub fn sample_visible<R: Rng + ?Sized>(&self, h: &[u8], rng: &mut R) -> Vec<u8> {
        bernoulli(&self.p_visible_given_hidden(h), rng)
    }

    /// `-ln sum_h exp(-E(v, h))`.
    pub fn free_energy(&self, v: &[u8]) -> f64 {
        let av: f64 = self.visible_bias.iter().zip(v).map(|(a, &x)| a * f64::from(x)).sum();
        -av - self.hidden_preactivation(v).into_iter().map(softplus).sum::<f64>()
    }
}

/// A source of layer preactivations. Each call is one physical pass.
pub trait Synapses {
    fn n_visible(&self) -> usize;
    fn n_hidden(&self) -> usize;
    fn hidden_preactivation(&mut self, v: &[u8]) -> Vec<f64>;
    fn visible_preactivation(&mut self, h: &[u8]) -> Vec<f64>;
}

impl Synapses for &RbmModel {
    fn n_visible(&self) -> usize {
        RbmModel::n_visible(self)
    }

    fn n_hidden(&self) -> usize {
        RbmModel::n_hidden(self)
    }

    fn hidden_preactivation(&mut self, v: &[u8]) -> Vec<f64> {
        RbmModel::hidden_preactivation(self, v)
    }

    fn visible_preactivation(&mut self, h: &[u8]) -> Vec<f64> {
        RbmModel::visible_preactivation(self, h)
    }
}

/// Zero-bias RBM read through a synapse array, charging each pass to a ledger.
pub struct MeteredArray<'a> {
    pub array: &'a SynapseArray,
    pub ledger: &'a mut EnergyLedger,
}

impl Synapses for MeteredArray<'_> {
    fn n_visible(&self) -> usize {
        self.array.n_visible()
    }

    fn n_hidden(&self) -> usize {
        self.array.n_hidden()
    }

    fn hidden_preactivation(&mut self, v: &[u8]) -> Vec<f64> {
        self.array.read_preactivation(v, self.ledger)
    }

    fn visible_preactivation(&mut self, h: &[u8]) -> Vec<f64> {
        self.array.read_visible_preactivation(h, self.ledger)
    }
}

/// What enters `<v_i h_j>`: the sampled hidden state or its probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HiddenStatistic {
    Sampled,
    Probability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub epochs: usize,
    /// Gibbs steps in the negative phase.
    pub k: usize,
    pub data_statistic: HiddenStatistic,
    pub model_statistic: HiddenStatistic,
    /// Learning rate of the ideal-weight trainer; `None` matches the array's
    /// mean noiseless first-pulse weight step.
    pub baseline_learning_rate: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 30,
            k: 3,
            data_statistic: HiddenStatistic::Sampled,
            model_statistic: HiddenStatistic::Probability,
            baseline_learning_rate: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("train.k must be at least 1".into()));
        }
        if let Some(eta) = self.baseline_learning_rate {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(Error::InvalidParameter("train.baseline_learning_rate must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Positive- and negative-phase correlations averaged over the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdStats {
    pub data_term: WeightMatrix,
    pub model_term: WeightMatrix,
}

impl CdStats {
    /// `data_term - model_term`.
    pub fn delta(&self) -> WeightMatrix {
        let d = self.data_term.as_slice().iter().zip(self.model_term.as_slice()).map(|(a, b)| a - b).collect();
        WeightMatrix::from_vec(self.data_term.n_visible(), self.data_term.n_hidden(), d)
    }
}

fn accumulate(acc: &mut WeightMatrix, v: &[u8], h: &[f64]) {
    let nh = acc.n_hidden();
    let m = acc.as_mut_slice();
    for (i, &vi) in v.iter().enumerate() {
        if vi != 0 {
            for (j, hj) in h.iter().enumerate() {
                m[i * nh + j] += hj;
            }
        }
    }
}

fn hidden_stat(kind: HiddenStatistic, p: &[f64], h: &[u8]) -> Vec<f64> {
    match kind {
        HiddenStatistic::Sampled => h.iter().map(|&x| f64::from(x)).collect(),
        HiddenStatistic::Probability => p.to_vec(),
    }
}

/// CD-k statistics. Per data vector the chain makes `k + 1` visible-to-hidden
/// and `k` hidden-to-visible passes; the data clamps only the first.
pub fn cd_statistics<S: Synapses, R: Rng + ?Sized>(
    synapses: &mut S,
    data: &DataSet,
    config: &TrainConfig,
    rng: &mut R,
) -> CdStats {
    let (nv, nh) = (synapses.n_visible(), synapses.n_hidden());
    assert_eq!(data.n_visible(), nv, "data width does not match the visible layer");
    let mut data_term = WeightMatrix::zeros(nv, nh);
    let mut model_term = WeightMatrix::zeros(nv, nh);
    for pattern in data.patterns() {
        let v0 = pattern.pixels();
        let mut ph: Vec<f64> = synapses.hidden_preactivation(v0).into_iter().map(sigmoid).collect();
        let mut h = bernoulli(&ph, rng);
        accumulate(&mut data_term, v0, &hidden_stat(config.data_statistic, &ph, &h));
        let mut v = v0.to_vec();
        for _ in 0..config.k {
            let pv: Vec<f64> = synapses.visible_preactivation(&h).into_iter().map(sigmoid).collect();
            v = bernoulli(&pv, rng);
            ph = synapses.hidden_preactivation(&v).into_iter().map(sigmoid).collect();
            h = bernoulli(&ph, rng);
        }
        accumulate(&mut model_term, &v, &hidden_stat(config.model_statistic, &ph, &h));
    }
    let n = data.len() as f64;
    for x in data_term.as_mut_slice().iter_mut().chain(model_term.as_mut_slice()) {
        *x /= n;
    }
    CdStats { data_term, model_term }
}

/// Routing rule: positive difference pulses `G+`, everything else `G-`.
pub fn update_direction(delta: f64) -> Direction {
    if delta > 0.0 {
        Direction::Potentiate
    } else {
        Direction::Depress
    }
}

/// One pulse per synapse, routed by the sign of `stats.delta()`.
pub fn apply_sign_updates<R: Rng + ?Sized>(
    array: &mut SynapseArray,
    stats: &CdStats,
    rng: &mut R,
    ledger: &mut EnergyLedger,
) -> Vec<Direction> {
    let delta = stats.delta();
    let mut routed = Vec::with_capacity(delta.as_slice().len());
    for i in 0..array.n_visible() {
        for j in 0..array.n_hidden() {
            let dir = update_direction(delta.get(i, j));
            array.apply_update(i, j, dir, rng, ledger);
            routed.push(dir);
        }
    }
    routed
}

/// One hardware epoch: statistics read through the array, then one
/// partial-SET per synapse.
pub fn train_epoch_hardware<R: Rng + ?Sized>(
    array: &mut SynapseArray,
    data: &DataSet,
    config: &TrainConfig,
    rng: &mut R,
    ledger: &mut EnergyLedger,
) -> CdStats {
    let stats = cd_statistics(&mut MeteredArray { array, ledger }, data, config, rng);
    apply_sign_updates(array, &stats, rng, ledger);
    stats
}

/// One epoch of the ideal-weight trainer: `W += eta * (data - model)`.
pub fn train_epoch_baseline<R: Rng + ?Sized>(
    model: &mut RbmModel,
    data: &DataSet,
    config: &TrainConfig,
    eta: f64,
    rng: &mut R,
) -> CdStats {
    let stats = cd_statistics(&mut &*model, data, config, rng);
    apply_gradient(model.weights_mut(), &stats, eta);
    stats
}

pub fn apply_gradient(weights: &mut WeightMatrix, stats: &CdStats, eta: f64) {
    let delta = stats.delta();
    for (w, d) in weights.as_mut_slice().iter_mut().zip(delta.as_slice()) {
        *w += eta * d;
    }
}

/// Mean noiseless first-pulse weight step over every cell of the array.
pub fn default_learning_rate(array: &SynapseArray) -> f64 {
    let params = array.params();
    let mut sum = 0.0;
    let mut n = 0usize;
    for i in 0..array.n_visible() {
        for j in 0..array.n_hidden() {
            for cell in [array.cell_plus(i, j), array.cell_minus(i, j)] {
                sum += cell.target(params, 1) - cell.target(params, 0);
                n += 1;
            }
        }
    }
    sum / n as f64 / array.s_norm()
}

//! Exact enumeration oracles, AIS estimation of the partition function, and
//! missing-pixel inference.
//!
//! Visible states are indexed with pixel 0 as the least significant bit.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::datasets::{Pattern, MAX_DENSE_VISIBLE};
use crate::error::{Error, Result};
use crate::rbm::{sigmoid, softplus, RbmModel};

pub const MAX_HIDDEN: usize = 20;
pub const MAX_MISSING: usize = 12;

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn bits(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((index >> i) & 1) as u8).collect()
}

/// Unnormalized log marginal `ln sum_h exp(-E(v, h))` at inverse temperature `beta`.
fn log_unnormalized(model: &RbmModel, v: &[u8], beta: f64) -> f64 {
    let av: f64 = model.visible_bias().iter().zip(v).map(|(a, &x)| a * f64::from(x)).sum();
    beta * av + model.hidden_preactivation(v).into_iter().map(|x| softplus(beta * x)).sum::<f64>()
}

/// Exact marginal over visible states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDistribution {
    pub log_p: Vec<f64>,
    pub log_z: f64,
}

impl ModelDistribution {
    pub fn p(&self, index: usize) -> f64 {
        self.log_p[index].exp()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.log_p.iter().map(|l| l.exp()).collect()
    }
}

pub fn check_enumerable(model: &RbmModel) -> Result<()> {
    if model.n_visible() > MAX_DENSE_VISIBLE || model.n_hidden() > MAX_HIDDEN {
        return Err(Error::TooLarge { n_visible: model.n_visible(), n_hidden: model.n_hidden() });
    }
    Ok(())
}

/// Sums out the hidden layer analytically and enumerates all `2^Nv` visible states.
pub fn exact_distribution(model: &RbmModel) -> Result<ModelDistribution> {
    check_enumerable(model)?;
    let nv = model.n_visible();
    let log_f: Vec<f64> = (0..1usize << nv).map(|i| log_unnormalized(model, &bits(i, nv), 1.0)).collect();
    let log_z = log_sum_exp(&log_f);
    Ok(ModelDistribution { log_p: log_f.into_iter().map(|l| l - log_z).collect(), log_z })
}

/// `sum_v p_data(v) ln(p_data(v) / p_model(v))` in nats.
pub fn kl_divergence(data: &[f64], model: &ModelDistribution) -> f64 {
    assert_eq!(data.len(), model.log_p.len(), "distribution sizes differ");
    data.iter()
        .zip(&model.log_p)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, lq)| p * (p.ln() - lq))
        .sum::<f64>()
        .max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AisConfig {
    pub enabled: bool,
    /// Number of inverse temperatures, linearly spaced from 0 to 1 inclusive.
    pub n_temperatures: usize,
    pub n_chains: usize,
}

impl Default for AisConfig {
    fn default() -> Self {
        Self { enabled: true, n_temperatures: 1000, n_chains: 100 }
    }
}

impl AisConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_temperatures < 2 || self.n_chains == 0 {
            return Err(Error::InvalidParameter("ais needs n_temperatures >= 2 and n_chains >= 1".into()));
        }
        Ok(())
    }
}

/// Log importance weight of each AIS chain. The base distribution is the
/// parameter-free RBM, so every intermediate scales all parameters by beta
/// and one Gibbs sweep is made per intermediate temperature.
pub fn ais_log_weights<R: Rng + ?Sized>(model: &RbmModel, config: &AisConfig, rng: &mut R) -> Vec<f64> {
    let nv = model.n_visible();
    let t_max = config.n_temperatures - 1;
    let beta = |t: usize| t as f64 / t_max as f64;
    let log_f = |av: f64, x: &[f64], b: f64| b * av + x.iter().map(|&xi| softplus(b * xi)).sum::<f64>();
    let mut out = Vec::with_capacity(config.n_chains);
    for _ in 0..config.n_chains {
        let mut v: Vec<u8> = (0..nv).map(|_| u8::from(rng.random_bool(0.5))).collect();
        let mut log_w = 0.0;
        for t in 1..=t_max {
            let (b0, b1) = (beta(t - 1), beta(t));
            let av: f64 = model.visible_bias().iter().zip(&v).map(|(a, &x)| a * f64::from(x)).sum();
            let x = model.hidden_preactivation(&v);
            log_w += log_f(av, &x, b1) - log_f(av, &x, b0);
            if t < t_max {
                let h: Vec<u8> = x.iter().map(|&xi| u8::from(rng.random::<f64>() < sigmoid(b1 * xi))).collect();
                v = model
                    .visible_preactivation(&h)
                    .into_iter()
                    .map(|xi| u8::from(rng.random::<f64>() < sigmoid(b1 * xi)))
                    .collect();
            }
        }
        out.push(log_w);
    }
    out
}

/// Estimate of `ln Z`: base `(Nv + Nh) ln 2` plus the log mean importance weight.
pub fn ais_log_z<R: Rng + ?Sized>(model: &RbmModel, config: &AisConfig, rng: &mut R) -> Result<f64> {
    config.validate()?;
    let log_w = ais_log_weights(model, config, rng);
    let base = (model.n_visible() + model.n_hidden()) as f64 * std::f64::consts::LN_2;
    Ok(base + log_sum_exp(&log_w) - (log_w.len() as f64).ln())
}

/// KL divergence using an estimated `ln Z` in place of the exact one.
pub fn kl_with_log_z(data: &[f64], model: &RbmModel, log_z: f64) -> f64 {
    let nv = model.n_visible();
    data.iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(i, p)| p * (p.ln() - (log_unnormalized(model, &bits(i, nv), 1.0) - log_z)))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    /// Values of the missing pixels in ascending pixel order.
    pub assignment: String,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PixelMarginal {
    pub pixel: usize,
    pub p_white: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inference {
    /// `1` marks a missing pixel.
    pub mask: String,
    /// Observed pixels, `?` where missing.
    pub observed: String,
    pub posterior: Vec<Assignment>,
    pub p_white_per_pixel: Vec<PixelMarginal>,
}

impl Inference {
    /// Most probable completion of the observed image.
    pub fn completion(&self) -> Pattern {
        let best = self
            .posterior
            .iter()
            .max_by(|a, b| a.p.total_cmp(&b.p))
            .expect("posterior is never empty");
        let mut fill = best.assignment.chars();
        let pixels = self
            .observed
            .chars()
            .map(|c| match c {
                '?' => u8::from(fill.next() == Some('1')),
                c => u8::from(c == '1'),
            })
            .collect();
        Pattern::new(pixels)
    }
}

/// Exact conditional distribution of the masked pixels given the rest.
///
/// `observed` supplies values for every pixel; those under `mask` are ignored.
pub fn infer_missing_pixels(model: &RbmModel, observed: &[u8], mask: &[bool]) -> Result<Inference> {
    let nv = model.n_visible();
    if observed.len() != nv || mask.len() != nv {
        return Err(Error::InvalidParameter(format!("observation and mask must have length {nv}")));
    }
    if observed.iter().any(|&x| x > 1) {
        return Err(Error::BadPattern("observed pixels must be 0 or 1".into()));
    }
    let missing: Vec<usize> = (0..nv).filter(|&i| mask[i]).collect();
    if missing.len() > MAX_MISSING {
        return Err(Error::TooManyMissing { missing: missing.len(), limit: MAX_MISSING });
    }
    let mut v = observed.to_vec();
    let mut log_f = Vec::with_capacity(1 << missing.len());
    for a in 0..1usize << missing.len() {
        for (k, &i) in missing.iter().enumerate() {
            v[i] = ((a >> k) & 1) as u8;
        }
        log_f.push(log_unnormalized(model, &v, 1.0));
    }
    let top = log_f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_f.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let posterior = probs
        .iter()
        .enumerate()
        .map(|(a, &p)| Assignment {
            assignment: (0..missing.len()).map(|k| if (a >> k) & 1 == 1 { '1' } else { '0' }).collect(),
            p,
        })
        .collect();
    let p_white_per_pixel = missing
        .iter()
        .enumerate()
        .map(|(k, &pixel)| PixelMarginal {
            pixel,
            p_white: probs.iter().enumerate().filter(|(a, _)| (a >> k) & 1 == 1).map(|(_, p)| p).sum(),
        })
        .collect();
    Ok(Inference {
        mask: mask.iter().map(|&m| if m { '1' } else { '0' }).collect(),
        observed: observed.iter().zip(mask).map(|(&x, &m)| if m { '?' } else if x == 1 { '1' } else { '0' }).collect(),
        posterior,
        p_white_per_pixel,
    })
}

/// Probability of restoring pixel `pixel` of `pattern` to its true value
/// when only that pixel is missing.
pub fn p_correct_single(model: &RbmModel, pattern: &[u8], pixel: usize) -> f64 {
    let mut flipped = pattern.to_vec();
    flipped[pixel] ^= 1;
    sigmoid(log_unnormalized(model, pattern, 1.0) - log_unnormalized(model, &flipped, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryScore {
    /// `1 - mean P(correct)` over patterns and single-pixel masks.
    pub error_rate: f64,
    /// Fraction of cases where the correct value is the more probable one.
    pub success_rate: f64,
}

pub fn recovery_scores(model: &RbmModel, patterns: &[Pattern]) -> RecoveryScore {
    assert!(!patterns.is_empty(), "recovery needs at least one pattern");
    let mut sum = 0.0;
    let mut wins = 0usize;
    let mut n = 0usize;
    for p in patterns {
        for pixel in 0..p.len() {
            let pc = p_correct_single(model, p.pixels(), pixel);
            sum += pc;
            wins += usize::from(pc > 0.5);
            n += 1;
        }
    }
    RecoveryScore { error_rate: 1.0 - sum / n as f64, success_rate: wins as f64 / n as f64 }
}

pub fn recovery_error_rate(model: &RbmModel, patterns: &[Pattern]) -> f64 {
    recovery_scores(model, patterns).error_rate
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossbar::WeightMatrix;
    use crate::seed;

    #[test]
    fn zero_model_is_uniform() {
        let d = exact_distribution(&RbmModel::zeros(9, 5)).unwrap();
        assert!((d.log_z - 14.0 * std::f64::consts::LN_2).abs() < 1e-12);
        assert!(d.probabilities().iter().all(|p| (p - 1.0 / 512.0).abs() < 1e-15));
    }

    #[test]
    fn one_by_one_hand_enumeration() {
        let m = RbmModel::new(WeightMatrix::from_vec(1, 1, vec![1.0]));
        let d = exact_distribution(&m).unwrap();
        let e = std::f64::consts::E;
        assert!((d.log_z - (3.0 + e).ln()).abs() < 1e-14);
        assert!((d.p(1) - (1.0 + e) / (3.0 + e)).abs() < 1e-14);
    }

    #[test]
    fn too_large_is_rejected() {
        assert!(matches!(exact_distribution(&RbmModel::zeros(21, 5)), Err(Error::TooLarge { .. })));
        assert!(matches!(exact_distribution(&RbmModel::zeros(9, 21)), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn kl_closed_form() {
        let d = exact_distribution(&RbmModel::zeros(9, 5)).unwrap();
        let mut data = vec![0.0; 512];
        for i in [0, 7, 56, 448, 511] {
            data[i] = 0.2;
        }
        assert!((kl_divergence(&data, &d) - (512.0f64 / 5.0).ln()).abs() < 1e-12);
        let same = d.probabilities();
        assert!(kl_divergence(&same, &d).abs() < 1e-12);
    }

    #[test]
    fn ais_exact_for_zero_model() {
        let m = RbmModel::zeros(9, 5);
        let z = ais_log_z(&m, &AisConfig::default(), &mut seed::stream(1, &[])).unwrap();
        assert_eq!(z, 14.0 * std::f64::consts::LN_2);
    }

    #[test]
    fn inference_normalizes() {
        let w = WeightMatrix::from_fn(9, 5, |i, j| ((i * 5 + j) as f64 * 0.37).sin());
        let m = RbmModel::new(w);
        let mut mask = [false; 9];
        mask[2] = true;
        mask[6] = true;
        let inf = infer_missing_pixels(&m, &[1, 1, 0, 0, 0, 0, 1, 1, 1], &mask).unwrap();
        assert_eq!(inf.posterior.len(), 4);
        assert!((inf.posterior.iter().map(|a| a.p).sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(inf.observed, "11?000?11");
        assert_eq!(inf.p_white_per_pixel.len(), 2);
    }

    #[test]
    fn inference_guards() {
        let m = RbmModel::zeros(13, 2);
        assert!(matches!(infer_missing_pixels(&m, &[0; 13], &[true; 13]), Err(Error::TooManyMissing { .. })));
        assert!(infer_missing_pixels(&m, &[0; 12], &[false; 12]).is_err());
    }

    #[test]
    fn zero_model_recovery_is_chance() {
        let m = RbmModel::zeros(9, 5);
        let pats: Vec<Pattern> = ["111000111", "100100100"].iter().map(|s| s.parse().unwrap()).collect();
        let s = recovery_scores(&m, &pats);
        assert_eq!(s.error_rate, 0.5);
        assert_eq!(s.success_rate, 0.0);
        let inf = infer_missing_pixels(&m, &[1; 9], &[false, false, false, false, true, false, false, false, false]).unwrap();
        assert_eq!(inf.p_white_per_pixel[0].p_white, 0.5);
    }
}

//! Behavioral model of a single phase-change memory cell.
//!
//! A cell starts in a low-conductance state after RESET and is driven toward a
//! saturation ceiling by weak partial-SET pulses. Conductance never decreases
//! between resets. Each pulse follows the saturating curve
//!
//! ```text
//! G(n) = g_min_i + (g_max_i - g_min_i) * (1 - exp(-n / tau)),   tau = n_levels / 3
//! ```
//!
//! with the step `G(n+1) - G(n)` multiplied by lognormal cycle-to-cycle noise.
//! `g_min_i` and `g_max_i` are this cell's endpoints after lognormal
//! device-to-device spread.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::energy::EnergyLedger;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceParams {
    /// Mean conductance after RESET, siemens.
    pub g_min: f64,
    /// Saturated SET conductance, siemens.
    pub g_max: f64,
    /// Nominal number of gradual steps from `g_min` to `g_max`.
    pub n_levels: u32,
    /// Relative (log-domain) std-dev of each pulse's step.
    pub sigma_c2c: f64,
    /// Relative (log-domain) std-dev of the endpoints across devices.
    pub sigma_d2d: f64,
    /// Joules per partial-SET pulse.
    pub e_partial_set: f64,
    /// Joules per RESET pulse.
    pub e_reset: f64,
    pub v_read: f64,
    /// Read integration window, seconds.
    pub t_read: f64,
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self {
            g_min: 0.5e-6,
            g_max: 5e-6,
            n_levels: 40,
            sigma_c2c: 0.3,
            sigma_d2d: 0.5,
            e_partial_set: 72e-12,
            e_reset: 100e-12,
            v_read: 0.1,
            t_read: 50e-6,
        }
    }
}

impl DeviceParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("device: {msg}")));
        if !(self.g_min > 0.0 && self.g_min.is_finite()) {
            return bad("g_min must be positive");
        }
        if !(self.g_max > self.g_min && self.g_max.is_finite()) {
            return bad("g_max must exceed g_min");
        }
        if self.n_levels == 0 {
            return bad("n_levels must be at least 1");
        }
        if !(self.sigma_c2c >= 0.0 && self.sigma_d2d >= 0.0) {
            return bad("variation std-devs must be non-negative");
        }
        if !(self.e_partial_set >= 0.0 && self.e_reset >= 0.0) {
            return bad("pulse energies must be non-negative");
        }
        if !(self.v_read > 0.0 && self.t_read > 0.0) {
            return bad("read voltage and time must be positive");
        }
        Ok(())
    }

    /// Pulse-response time constant in pulses.
    pub fn tau(&self) -> f64 {
        f64::from(self.n_levels) / 3.0
    }

    pub fn on_off_ratio(&self) -> f64 {
        self.g_max / self.g_min
    }

    /// Energy of reading one cell at conductance `g` for one integration window.
    pub fn read_energy(&self, g: f64) -> f64 {
        g * self.v_read * self.v_read * self.t_read
    }
}

/// Noiseless pulse-response curve of a device with endpoints `g_lo`, `g_hi`.
pub fn pulse_response(g_lo: f64, g_hi: f64, tau: f64, pulses: u32) -> f64 {
    g_lo + (g_hi - g_lo) * -(-f64::from(pulses) / tau).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcmCell {
    pub g: f64,
    pub pulses_applied: u32,
    pub g_min_i: f64,
    pub g_max_i: f64,
}

impl PcmCell {
    /// Samples a device: the ceiling is drawn once for the device's lifetime,
    /// then the cell is RESET (which draws the floor).
    pub fn new<R: Rng + ?Sized>(params: &DeviceParams, rng: &mut R, ledger: Option<&mut EnergyLedger>) -> Self {
        let z: f64 = rng.sample(StandardNormal);
        let mut cell = PcmCell { g: 0.0, pulses_applied: 0, g_min_i: 0.0, g_max_i: params.g_max * (params.sigma_d2d * z).exp() };
        cell.reset(params, rng, ledger);
        cell
    }

    /// RESET: resample the floor, return to it, clear the pulse count.
    ///
    /// A floor drawn above the ceiling is clipped to it; such a cell is stuck.
    pub fn reset<R: Rng + ?Sized>(&mut self, params: &DeviceParams, rng: &mut R, ledger: Option<&mut EnergyLedger>) {
        let z: f64 = rng.sample(StandardNormal);
        self.g_min_i = (params.g_min * (params.sigma_d2d * z).exp()).min(self.g_max_i);
        self.g = self.g_min_i;
        self.pulses_applied = 0;
        if let Some(ledger) = ledger {
            ledger.accrue_reset(params.e_reset);
        }
    }

    /// Noiseless conductance after `n` pulses from RESET.
    pub fn target(&self, params: &DeviceParams, n: u32) -> f64 {
        pulse_response(self.g_min_i, self.g_max_i, params.tau(), n)
    }

    /// Applies one partial-SET pulse and returns the realized increment.
    ///
    /// The nominal step is scaled by `exp(sigma_c2c * z)` (median-unbiased
    /// lognormal) and the result clipped to the ceiling, so a saturated cell
    /// still consumes the pulse energy but no longer moves.
    pub fn partial_set<R: Rng + ?Sized>(&mut self, params: &DeviceParams, rng: &mut R, ledger: &mut EnergyLedger) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        let n = self.pulses_applied;
        let nominal = self.target(params, n + 1) - self.target(params, n);
        let step = nominal.max(0.0) * (params.sigma_c2c * z).exp();
        let before = self.g;
        self.g = (self.g + step).min(self.g_max_i).max(before);
        self.pulses_applied += 1;
        ledger.accrue_partial_set(params.e_partial_set);
        self.g - before
    }

    pub fn read_current(&self, params: &DeviceParams) -> f64 {
        self.g * params.v_read
    }

    pub fn read_energy(&self, params: &DeviceParams) -> f64 {
        params.read_energy(self.g)
    }

    pub fn is_saturated(&self) -> bool {
        self.g >= self.g_max_i
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    fn noiseless() -> DeviceParams {
        DeviceParams { sigma_c2c: 0.0, sigma_d2d: 0.0, ..Default::default() }
    }

    #[test]
    fn zero_spread_reset_hits_g_min() {
        let p = DeviceParams { g_min: 1e-6, ..noiseless() };
        let mut rng = seed::stream(1, &[]);
        let cell = PcmCell::new(&p, &mut rng, None);
        assert_eq!(cell.g, 1e-6);
        assert_eq!(cell.pulses_applied, 0);
    }

    #[test]
    fn reset_clears_pulses_and_charges_ledger() {
        let p = DeviceParams::default();
        let mut rng = seed::stream(2, &[]);
        let mut ledger = EnergyLedger::new();
        let mut cell = PcmCell::new(&p, &mut rng, Some(&mut ledger));
        for _ in 0..5 {
            cell.partial_set(&p, &mut rng, &mut ledger);
        }
        let ceiling = cell.g_max_i;
        cell.reset(&p, &mut rng, Some(&mut ledger));
        assert_eq!(cell.pulses_applied, 0);
        assert_eq!(cell.g, cell.g_min_i);
        assert_eq!(cell.g_max_i, ceiling, "ceiling is drawn once per device");
        assert_eq!(ledger.current().resets, 2);
        assert_eq!(ledger.current().partial_sets, 5);
    }

    #[test]
    fn thirty_levels_cover_ninety_five_percent() {
        let p = DeviceParams { g_min: 1e-6, g_max: 100e-6, n_levels: 30, ..noiseless() };
        let mut rng = seed::stream(3, &[]);
        let mut ledger = EnergyLedger::new();
        let mut cell = PcmCell::new(&p, &mut rng, None);
        for _ in 0..30 {
            cell.partial_set(&p, &mut rng, &mut ledger);
        }
        let expected = 1e-6 + 99e-6 * (1.0 - (-3.0f64).exp());
        assert!((cell.g - expected).abs() <= 1e-12 * expected);
        assert!((cell.g - 95.07e-6).abs() < 0.01e-6);
    }

    #[test]
    fn saturates_at_ceiling() {
        let p = noiseless();
        let mut rng = seed::stream(4, &[]);
        let mut ledger = EnergyLedger::new();
        let mut cell = PcmCell::new(&p, &mut rng, None);
        for _ in 0..2000 {
            cell.partial_set(&p, &mut rng, &mut ledger);
        }
        assert_eq!(cell.g, p.g_max);
        assert!(cell.is_saturated());
        let dg = cell.partial_set(&p, &mut rng, &mut ledger);
        assert_eq!(dg, 0.0);
        assert_eq!(ledger.current().partial_sets, 2001);
    }

    #[test]
    fn ohmic_read() {
        let p = DeviceParams::default();
        let cell = PcmCell { g: 10e-6, pulses_applied: 0, g_min_i: 1e-6, g_max_i: 50e-6 };
        assert!((cell.read_current(&p) - 1e-6).abs() < 1e-20);
        let off = PcmCell { g: 0.0, ..cell };
        assert_eq!(off.read_current(&p), 0.0);
        let cell = PcmCell { g: 50e-6, ..cell };
        assert!((cell.read_energy(&p) - 2.5e-11).abs() < 1e-24);
    }

    #[test]
    fn validation() {
        assert!(DeviceParams::default().validate().is_ok());
        assert!(DeviceParams { g_max: 0.1e-6, ..Default::default() }.validate().is_err());
        assert!(DeviceParams { n_levels: 0, ..Default::default() }.validate().is_err());
        assert!(DeviceParams { sigma_c2c: -0.1, ..Default::default() }.validate().is_err());
        assert!(DeviceParams { g_min: f64::NAN, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn default_ratio_within_ten_to_hundred() {
        let r = DeviceParams::default().on_off_ratio();
        assert!((10.0..=100.0).contains(&r));
    }
}

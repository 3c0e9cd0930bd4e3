use serde::{Deserialize, Serialize};

/// Joules are stored as integer zeptojoules so that sums are exact and
/// independent of accrual order.
const ZJ_PER_J: f64 = 1e21;

fn to_zj(joules: f64) -> u128 {
    assert!(
        joules.is_finite() && joules >= 0.0,
        "energy accrual must be finite and non-negative, got {joules}"
    );
    (joules * ZJ_PER_J).round() as u128
}

fn to_j(zj: u128) -> f64 {
    zj as f64 / ZJ_PER_J
}

/// Energy spent during one epoch (or during initialization, epoch 0).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpochEnergy {
    pub programming_zj: u128,
    pub read_zj: u128,
    pub partial_sets: u64,
    pub resets: u64,
    pub reads: u64,
}

impl EpochEnergy {
    pub fn programming_j(&self) -> f64 {
        to_j(self.programming_zj)
    }

    pub fn read_j(&self) -> f64 {
        to_j(self.read_zj)
    }

    pub fn total_j(&self) -> f64 {
        to_j(self.programming_zj + self.read_zj)
    }
}

/// Accumulates programming and read energy for one simulated run.
///
/// Accruals land in the open epoch until [`EnergyLedger::close_epoch`] moves
/// it into the history.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    open: EpochEnergy,
    history: Vec<EpochEnergy>,
    event_total_zj: u128,
}

impl EnergyLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn accrue_partial_set(&mut self, joules: f64) {
        let zj = to_zj(joules);
        self.open.programming_zj += zj;
        self.open.partial_sets += 1;
        self.event_total_zj += zj;
    }

    pub fn accrue_reset(&mut self, joules: f64) {
        let zj = to_zj(joules);
        self.open.programming_zj += zj;
        self.open.resets += 1;
        self.event_total_zj += zj;
    }

    pub fn accrue_read(&mut self, joules: f64) {
        let zj = to_zj(joules);
        self.open.read_zj += zj;
        self.open.reads += 1;
        self.event_total_zj += zj;
    }

    /// The epoch currently accumulating.
    pub fn current(&self) -> &EpochEnergy {
        &self.open
    }

    pub fn programming_j(&self) -> f64 {
        self.open.programming_j()
    }

    pub fn read_j(&self) -> f64 {
        self.open.read_j()
    }

    /// Closes the open epoch, appends it to the history and returns it.
    pub fn close_epoch(&mut self) -> EpochEnergy {
        let closed = std::mem::take(&mut self.open);
        self.history.push(closed);
        closed
    }

    pub fn history(&self) -> &[EpochEnergy] {
        &self.history
    }

    /// Sum of every accrual ever made, tracked independently of the epochs.
    pub fn event_total_zj(&self) -> u128 {
        self.event_total_zj
    }

    pub fn event_total_j(&self) -> f64 {
        to_j(self.event_total_zj)
    }
}

/// One row of the simulated per-epoch energy report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochEnergyRow {
    pub epoch: usize,
    pub programming_j: f64,
    pub read_j: f64,
    pub total_j: f64,
}

/// Per-epoch totals for every closed epoch. Index 0 is whatever was accrued
/// before the first `close_epoch`, which the drivers use for initialization.
pub fn simulated_epoch_report(ledger: &EnergyLedger) -> Vec<EpochEnergyRow> {
    ledger
        .history()
        .iter()
        .enumerate()
        .map(|(epoch, e)| EpochEnergyRow {
            epoch,
            programming_j: e.programming_j(),
            read_j: e.read_j(),
            total_j: e.total_j(),
        })
        .collect()
}

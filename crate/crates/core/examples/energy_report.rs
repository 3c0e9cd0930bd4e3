//! Simulated per-epoch energy of the array next to the conventional
//! hardware estimates.

use pcm_rbm::config::ExperimentConfig;
use pcm_rbm::experiments::run_energy_report;

fn main() -> pcm_rbm::Result<()> {
    let mut config = ExperimentConfig::default();
    config.trials = 2;
    let report = run_energy_report(&config)?;
    let s = &report.simulated;
    println!("simulated: {:.3} nJ programming + {:.3} nJ read per epoch", s.programming_j * 1e9, s.read_j * 1e9);
    for c in &report.comparisons {
        print!("{c}");
    }
    Ok(())
}

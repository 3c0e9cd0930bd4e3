//! Final KL divergence over a grid of cycle-to-cycle noise and number of
//! gradual levels.

use pcm_rbm::config::ExperimentConfig;
use pcm_rbm::experiments::run_device_sweep;

fn main() -> pcm_rbm::Result<()> {
    let mut config = ExperimentConfig::default();
    config.sweep.sigma_c2c = vec![0.0, 0.3, 0.6];
    config.sweep.n_levels = vec![1, 10, 40, 100];
    let report = run_device_sweep(&config)?;
    println!("{:>9} {:>8} {:>12} {:>10} {:>10}", "sigma_c2c", "n_levels", "kl_final", "kl_std", "err_final");
    for r in &report.rows {
        println!(
            "{:>9} {:>8} {:>12.4} {:>10.4} {:>10.4}",
            r.sigma_c2c, r.n_levels, r.kl_final_mean, r.kl_final_std, r.err_final_mean
        );
    }
    Ok(())
}

//! Missing-pixel error rate as more patterns are stored, array against the
//! ideal-weight baseline.

use pcm_rbm::config::ExperimentConfig;
use pcm_rbm::experiments::run_pattern_sweep;

fn main() -> pcm_rbm::Result<()> {
    let mut config = ExperimentConfig::default();
    config.trials = 3;
    config.sweep.n_patterns = vec![2, 5, 14];
    config.sweep.checkpoints = vec![10, 30];
    let report = run_pattern_sweep(&config)?;
    println!("{:>10} {:>9} {:>6} {:>10} {:>10}", "n_patterns", "model", "epoch", "err_mean", "kl_mean");
    for r in &report.rows {
        println!("{:>10} {:>9} {:>6} {:>10.4} {:>10.4}", r.n_patterns, r.model, r.epoch, r.err_rate_mean, r.kl_exact_mean);
    }
    Ok(())
}

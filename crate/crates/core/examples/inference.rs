//! Fills in masked pixels of a stored pattern from a trained array.

use pcm_rbm::analysis::infer_missing_pixels;
use pcm_rbm::config::ExperimentConfig;
use pcm_rbm::experiments::{run_trial, TrialOptions};
use pcm_rbm::RbmModel;

fn main() -> pcm_rbm::Result<()> {
    let config = ExperimentConfig::default();
    let options = TrialOptions { epochs: config.train.epochs, ais: false, baseline: false, conductances: false };
    let trial = run_trial(&config, 0, config.n_patterns, &config.device, options)?;
    let model = RbmModel::from_array(&trial.array);

    let pattern = &trial.patterns[0];
    println!("stored pattern:\n{}\n", pattern.render(3));
    let one = [true, false, false, false, false, false, false, false, false];
    let row = [true, true, true, false, false, false, false, false, false];
    for mask in [one, row] {
        let inference = infer_missing_pixels(&model, pattern.pixels(), &mask)?;
        println!("observed {}", inference.observed);
        let mut ranked: Vec<_> = inference.posterior.iter().collect();
        ranked.sort_by(|a, b| b.p.total_cmp(&a.p));
        for a in ranked.into_iter().take(4) {
            println!("  {} p={:.3}", a.assignment, a.p);
        }
        println!("completion:\n{}\n", inference.completion().render(3));
    }
    Ok(())
}

//! Trains one RBM on a simulated array with sign-only CD-3 and prints the
//! exact KL divergence and missing-pixel error after each epoch.

use pcm_rbm::analysis::{exact_distribution, kl_divergence, recovery_scores};
use pcm_rbm::crossbar::{ArrayOptions, SynapseArray};
use pcm_rbm::datasets::make_training_set;
use pcm_rbm::energy::EnergyLedger;
use pcm_rbm::rbm::train_epoch_hardware;
use pcm_rbm::seed;
use pcm_rbm::{DeviceParams, RbmModel, TrainConfig};

fn main() -> pcm_rbm::Result<()> {
    let mut rng = seed::stream(2016, &[]);
    let data = make_training_set(5, &mut rng)?;
    for p in data.patterns() {
        println!("{}\n", p.render(3));
    }

    let params = DeviceParams::default();
    let mut ledger = EnergyLedger::new();
    let mut array = SynapseArray::initialize(9, 5, &params, &ArrayOptions::default(), &mut rng, Some(&mut ledger))?;
    ledger.close_epoch();
    let config = TrainConfig::default();

    println!("{:>5} {:>10} {:>10} {:>10}", "epoch", "kl_nats", "err_rate", "energy_nJ");
    for epoch in 0..=config.epochs {
        if epoch > 0 {
            train_epoch_hardware(&mut array, &data, &config, &mut rng, &mut ledger);
        }
        let energy = ledger.close_epoch();
        let model = RbmModel::from_array(&array);
        let kl = kl_divergence(data.empirical(), &exact_distribution(&model)?);
        let scores = recovery_scores(&model, data.patterns());
        println!("{epoch:>5} {kl:>10.4} {:>10.4} {:>10.3}", scores.error_rate, energy.total_j() * 1e9);
    }
    Ok(())
}

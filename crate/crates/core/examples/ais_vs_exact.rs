//! Annealed importance sampling against the exact partition function for
//! random weights of growing scale.

use pcm_rbm::analysis::{ais_log_z, exact_distribution, AisConfig};
use pcm_rbm::seed;
use pcm_rbm::{RbmModel, WeightMatrix};
use rand::Rng;

fn main() -> pcm_rbm::Result<()> {
    let mut rng = seed::stream(3, &[]);
    let config = AisConfig::default();
    println!("{:>6} {:>12} {:>12} {:>10}", "scale", "exact", "ais", "diff");
    for scale in [0.0, 0.5, 1.0, 2.0, 3.0] {
        let w = WeightMatrix::from_fn(9, 5, |_, _| scale * rng.random_range(-1.0..1.0));
        let model = RbmModel::new(w);
        let exact = exact_distribution(&model)?.log_z;
        let ais = ais_log_z(&model, &config, &mut rng)?;
        println!("{scale:>6.1} {exact:>12.5} {ais:>12.5} {:>+10.5}", ais - exact);
    }
    Ok(())
}

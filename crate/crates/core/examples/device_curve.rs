//! Conductance of a single PCM cell under repeated partial-SET pulses,
//! noiseless next to a noisy device.

use pcm_rbm::device::pulse_response;
use pcm_rbm::energy::EnergyLedger;
use pcm_rbm::seed;
use pcm_rbm::{DeviceParams, PcmCell};

fn main() {
    let params = DeviceParams::default();
    let mut rng = seed::stream(7, &[]);
    let mut ledger = EnergyLedger::new();
    let mut cell = PcmCell::new(&params, &mut rng, Some(&mut ledger));

    println!("tau = {:.2} pulses, on/off = {:.1}", params.tau(), params.on_off_ratio());
    println!("{:>6} {:>12} {:>12}", "pulse", "ideal_uS", "noisy_uS");
    for n in 0..=2 * params.n_levels {
        if n > 0 {
            cell.partial_set(&params, &mut rng, &mut ledger);
        }
        if n % 5 == 0 {
            let ideal = pulse_response(params.g_min, params.g_max, params.tau(), n);
            println!("{n:>6} {:>12.3} {:>12.3}", ideal * 1e6, cell.g * 1e6);
        }
    }
    println!("saturated: {}", cell.is_saturated());
    println!("programming energy: {:.2} nJ", ledger.programming_j() * 1e9);
}

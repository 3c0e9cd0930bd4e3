//! A differential synapse array: initial weight statistics, one potentiating
//! pulse, and the energy of an analog read.

use pcm_rbm::crossbar::{ArrayOptions, Direction, SynapseArray};
use pcm_rbm::energy::EnergyLedger;
use pcm_rbm::seed;
use pcm_rbm::DeviceParams;

fn main() -> pcm_rbm::Result<()> {
    let params = DeviceParams::default();
    let mut rng = seed::stream(11, &[]);
    let mut ledger = EnergyLedger::new();
    let mut array = SynapseArray::initialize(9, 5, &params, &ArrayOptions::default(), &mut rng, Some(&mut ledger))?;
    let init = ledger.close_epoch();

    let w = array.weights();
    println!("M = {:.3e} S, S = {:.3e} S", array.m_norm(), array.s_norm());
    println!("initial weights: mean {:+.3}, min {:+.3}, max {:+.3}", w.mean(), w.min(), w.max());
    let (lo, hi) = array.weight_bounds();
    println!("reachable weight range [{lo:+.2}, {hi:+.2}]");
    println!("init RESET energy: {:.2} nJ", init.programming_j() * 1e9);

    let before = array.weight(0, 0);
    array.apply_update(0, 0, Direction::Potentiate, &mut rng, &mut ledger);
    println!("w[0,0]: {before:+.3} -> {:+.3} after one G+ pulse", array.weight(0, 0));

    let v = [1, 0, 1, 0, 1, 0, 1, 0, 1];
    let x = array.read_preactivation(&v, &mut ledger);
    let formatted: Vec<String> = x.iter().map(|x| format!("{x:+.3}")).collect();
    println!("hidden preactivation for {v:?}: [{}]", formatted.join(", "));
    let e = ledger.close_epoch();
    println!("pulse + read energy: {:.3} nJ programming, {:.3} nJ read", e.programming_j() * 1e9, e.read_j() * 1e9);
    Ok(())
}

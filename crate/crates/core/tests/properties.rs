use pcm_rbm::analysis::{exact_distribution, infer_missing_pixels, kl_divergence};
use pcm_rbm::crossbar::{ArrayOptions, Direction, SynapseArray, WeightMatrix};
use pcm_rbm::datasets::Pattern;
use pcm_rbm::device::pulse_response;
use pcm_rbm::energy::EnergyLedger;
use pcm_rbm::rbm::{apply_sign_updates, update_direction, CdStats, RbmModel};
use pcm_rbm::seed;
use pcm_rbm::{DeviceParams, PcmCell};
use proptest::prelude::*;

fn device() -> impl Strategy<Value = DeviceParams> {
    (0.1e-6..2e-6f64, 2.0..20.0f64, 1u32..120, 0.0..0.8f64, 0.0..0.6f64).prop_map(|(g_min, ratio, n, c2c, d2d)| {
        DeviceParams { g_min, g_max: g_min * ratio, n_levels: n, sigma_c2c: c2c, sigma_d2d: d2d, ..Default::default() }
    })
}

fn weights(nv: usize, nh: usize, scale: f64) -> impl Strategy<Value = WeightMatrix> {
    prop::collection::vec(-scale..scale, nv * nh).prop_map(move |w| WeightMatrix::from_vec(nv, nh, w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conductance_is_monotone_and_bounded(params in device(), seed in any::<u64>(), pulses in 1usize..200) {
        let mut rng = seed::stream(seed, &[]);
        let mut ledger = EnergyLedger::new();
        let mut cell = PcmCell::new(&params, &mut rng, None);
        let mut last = cell.g;
        for _ in 0..pulses {
            let step = cell.partial_set(&params, &mut rng, &mut ledger);
            prop_assert!(step >= 0.0);
            prop_assert!(cell.g >= last);
            prop_assert!(cell.g <= cell.g_max_i);
            prop_assert!(cell.g >= cell.g_min_i);
            last = cell.g;
        }
        prop_assert_eq!(ledger.current().partial_sets, pulses as u64);
    }

    #[test]
    fn noiseless_cell_follows_closed_form(params in device(), seed in any::<u64>(), pulses in 0u32..150) {
        let params = DeviceParams { sigma_c2c: 0.0, ..params };
        let mut rng = seed::stream(seed, &[]);
        let mut ledger = EnergyLedger::new();
        let mut cell = PcmCell::new(&params, &mut rng, None);
        for _ in 0..pulses {
            cell.partial_set(&params, &mut rng, &mut ledger);
        }
        let expected = pulse_response(cell.g_min_i, cell.g_max_i, params.tau(), pulses);
        prop_assert!((cell.g - expected).abs() <= 1e-12 * cell.g_max_i);
    }

    #[test]
    fn ledger_conserves_energy(events in prop::collection::vec((0u8..3, 0.0..1e-9f64), 0..200), splits in prop::collection::vec(0usize..200, 0..5)) {
        let mut ledger = EnergyLedger::new();
        for (k, &(kind, j)) in events.iter().enumerate() {
            if splits.contains(&k) {
                ledger.close_epoch();
            }
            match kind {
                0 => ledger.accrue_partial_set(j),
                1 => ledger.accrue_reset(j),
                _ => ledger.accrue_read(j),
            }
        }
        ledger.close_epoch();
        let summed: u128 = ledger.history().iter().map(|e| e.programming_zj + e.read_zj).sum();
        prop_assert_eq!(summed, ledger.event_total_zj());
        let count: u64 = ledger.history().iter().map(|e| e.partial_sets + e.resets + e.reads).sum();
        prop_assert_eq!(count, events.len() as u64);
    }

    #[test]
    fn read_energy_is_additive_over_disjoint_rows(seed in any::<u64>(), mask in prop::collection::vec(any::<bool>(), 9)) {
        let params = DeviceParams::default();
        let mut rng = seed::stream(seed, &[]);
        let array = SynapseArray::initialize(9, 5, &params, &ArrayOptions::default(), &mut rng, None).unwrap();
        let a: Vec<u8> = mask.iter().map(|&m| u8::from(m)).collect();
        let b: Vec<u8> = a.iter().map(|&x| 1 - x).collect();
        let read = |v: &[u8]| {
            let mut l = EnergyLedger::new();
            let x = array.read_preactivation(v, &mut l);
            (x, l.current().read_zj)
        };
        let (xa, ea) = read(&a);
        let (xb, eb) = read(&b);
        let (xall, eall) = read(&[1; 9]);
        // Each read rounds to the nearest zeptojoule.
        prop_assert!((ea + eb).abs_diff(eall) <= 1);
        for j in 0..5 {
            prop_assert!((xa[j] + xb[j] - xall[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn normalization_is_frozen_and_weights_stay_in_box(seed in any::<u64>(), dirs in prop::collection::vec(any::<bool>(), 45 * 4)) {
        let params = DeviceParams::default();
        let mut rng = seed::stream(seed, &[]);
        let mut ledger = EnergyLedger::new();
        let mut array = SynapseArray::initialize(9, 5, &params, &ArrayOptions::default(), &mut rng, None).unwrap();
        let (m, s) = (array.m_norm(), array.s_norm());
        for (k, &up) in dirs.iter().enumerate() {
            let (i, j) = ((k % 45) / 5, k % 5);
            let dir = if up { Direction::Potentiate } else { Direction::Depress };
            array.apply_update(i, j, dir, &mut rng, &mut ledger);
        }
        prop_assert_eq!(array.m_norm(), m);
        prop_assert_eq!(array.s_norm(), s);
        for i in 0..9 {
            for j in 0..5 {
                let (p, n) = (array.cell_plus(i, j), array.cell_minus(i, j));
                let w = array.weight(i, j);
                let w_lo = (p.g_min_i - n.g_max_i - m) / s;
                let w_hi = (p.g_max_i - n.g_min_i - m) / s;
                prop_assert!(w >= w_lo - 1e-9 && w <= w_hi + 1e-9);
            }
        }
        prop_assert_eq!(array.total_pulses(), dirs.len() as u64);
    }

    #[test]
    fn kl_is_non_negative(w in weights(9, 5, 2.0), picks in prop::collection::btree_set(0usize..512, 1..20)) {
        let model = RbmModel::new(w);
        let dist = exact_distribution(&model).unwrap();
        let mut data = vec![0.0; 512];
        for &p in &picks {
            data[p] = 1.0 / picks.len() as f64;
        }
        let kl = kl_divergence(&data, &dist);
        prop_assert!(kl >= -1e-12);
        prop_assert!((dist.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sign_rule_routes_each_synapse(seed in any::<u64>(), delta in prop::collection::vec(prop_oneof![Just(0.0), -1.0..1.0f64], 45)) {
        let params = DeviceParams { sigma_c2c: 0.0, ..Default::default() };
        let mut rng = seed::stream(seed, &[]);
        let mut ledger = EnergyLedger::new();
        let mut array = SynapseArray::initialize(9, 5, &params, &ArrayOptions::default(), &mut rng, None).unwrap();
        let before = array.clone();
        let stats = CdStats { data_term: WeightMatrix::from_vec(9, 5, delta.clone()), model_term: WeightMatrix::zeros(9, 5) };
        let routed = apply_sign_updates(&mut array, &stats, &mut rng, &mut ledger);
        prop_assert_eq!(ledger.current().partial_sets, 45);
        for (k, &d) in delta.iter().enumerate() {
            let (i, j) = (k / 5, k % 5);
            let expected = if d > 0.0 { Direction::Potentiate } else { Direction::Depress };
            prop_assert_eq!(routed[k], expected);
            prop_assert_eq!(update_direction(d), expected);
            let (p0, n0) = (before.cell_plus(i, j), before.cell_minus(i, j));
            let (p1, n1) = (array.cell_plus(i, j), array.cell_minus(i, j));
            match expected {
                Direction::Potentiate => {
                    prop_assert_eq!(p1.pulses_applied, p0.pulses_applied + 1);
                    prop_assert_eq!(n1, n0);
                }
                Direction::Depress => {
                    prop_assert_eq!(n1.pulses_applied, n0.pulses_applied + 1);
                    prop_assert_eq!(p1, p0);
                }
            }
        }
    }

    #[test]
    fn inference_matches_conditional_of_joint(w in weights(9, 5, 2.0), pattern in 0usize..512, mask_bits in 1usize..512) {
        let model = RbmModel::new(w);
        let dist = exact_distribution(&model).unwrap();
        let observed = Pattern::from_index(pattern, 9);
        let mask: Vec<bool> = (0..9).map(|i| (mask_bits >> i) & 1 == 1).collect();
        let inference = infer_missing_pixels(&model, observed.pixels(), &mask).unwrap();
        let missing: Vec<usize> = (0..9).filter(|&i| mask[i]).collect();
        let fill = |a: usize| -> usize {
            let mut v = observed.pixels().to_vec();
            for (b, &i) in missing.iter().enumerate() {
                v[i] = ((a >> b) & 1) as u8;
            }
            Pattern::new(v).index()
        };
        let joint: Vec<f64> = (0..1usize << missing.len()).map(|a| dist.p(fill(a))).collect();
        let total: f64 = joint.iter().sum();
        let posterior_total: f64 = inference.posterior.iter().map(|a| a.p).sum();
        prop_assert!((posterior_total - 1.0).abs() < 1e-10);
        prop_assert_eq!(inference.posterior.len(), joint.len());
        for a in &inference.posterior {
            let bits: Vec<u8> = a.assignment.bytes().map(|c| c - b'0').collect();
            let idx = bits.iter().enumerate().fold(0usize, |acc, (b, &x)| acc | (usize::from(x) << b));
            prop_assert!((a.p - joint[idx] / total).abs() < 1e-9);
        }
        for m in &inference.p_white_per_pixel {
            let b = missing.iter().position(|&i| i == m.pixel).unwrap();
            let p: f64 = (0..joint.len()).filter(|a| (a >> b) & 1 == 1).map(|a| joint[a]).sum::<f64>() / total;
            prop_assert!((m.p_white - p).abs() < 1e-9);
        }
    }
}

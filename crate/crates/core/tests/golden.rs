//! Frozen five-step trajectory; any change to the kernel, the drift or the
//! RNG stream layout shows up here.

use tamed_langevin::potentials::double_well_radial;
use tamed_langevin::sampler::{em_step, ChainBatch, NoiseMode};
use tamed_langevin::{Drift, DriftScheme};

const GOLDEN: [[[f64; 2]; 3]; 5] = [
    [[1.3814084184442885, -0.2974484347243047], [0.18684201704940334, -0.13596014260822273], [-2.8168090561674632, 2.076045975484231]],
    [[1.4297741508448596, -0.08060117468984979], [0.2661515294608784, -0.029375442653613665], [-2.9437821478886543, 1.846580380454383]],
    [[1.467510869320957, -0.082234088125663], [0.26852003845155337, 0.08275254893207158], [-2.8108824548090263, 1.82523048525308]],
    [[1.2341063172538007, -0.20242785937820787], [0.22156471188889298, 0.15079170523535101], [-2.7908064096044733, 2.116746406842458]],
    [[1.2205334937731964, 0.09119673129304168], [-0.11043458813366891, 0.11910608708494161], [-2.9050797236101964, 1.8595736433927559]],
];

fn start() -> Vec<Vec<f64>> {
    vec![vec![1.5, -0.5], vec![0.0, 0.0], vec![-3.0, 2.0]]
}

#[test]
fn five_step_trajectory_is_frozen() {
    let spec = double_well_radial(2).unwrap();
    let drift = Drift::new(&spec, &DriftScheme::wd_tula(0.01)).unwrap();
    let mut batch = ChainBatch::from_positions(&start(), 2024).unwrap();
    for expected in GOLDEN {
        em_step(&mut batch, &drift, 0.01);
        for (x, e) in batch.positions().zip(expected) {
            for (a, b) in x.iter().zip(e) {
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{x:?} vs {e:?}");
            }
        }
    }
}

// wd-TULA drift for u = |x|⁴/4 − |x|²/2 with A = 1, a = 2, l = 3/2, written
// out by hand.
fn hand_drift(x: &[f64], lambda: f64) -> Vec<f64> {
    let s: f64 = x.iter().map(|v| v * v).sum();
    let damp = 1.0 + lambda.sqrt() * s.powf(1.5);
    x.iter().map(|&v| v + ((s - 1.0) * v - v) / damp).collect()
}

#[test]
fn noiseless_steps_match_hand_written_drift() {
    let spec = double_well_radial(2).unwrap();
    let drift = Drift::new(&spec, &DriftScheme::wd_tula(0.01)).unwrap();
    let mut batch = ChainBatch::from_positions(&start(), 0).unwrap().with_noise(NoiseMode::Zero);
    let mut expected = start();
    for _ in 0..5 {
        em_step(&mut batch, &drift, 0.01);
        for x in expected.iter_mut() {
            let h = hand_drift(x, 0.01);
            x.iter_mut().zip(h).for_each(|(v, g)| *v -= 0.01 * g);
        }
        for (x, e) in batch.positions().zip(&expected) {
            for (a, b) in x.iter().zip(e) {
                assert!((a - b).abs() < 1e-14, "{x:?} vs {e:?}");
            }
        }
    }
}

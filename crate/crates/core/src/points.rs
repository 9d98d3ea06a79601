//! Seeded probe clouds for the assumption validators and lemma probes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::vecops::norm;

/// `n` points drawn uniformly from the cube `[−half_width, half_width]^dim`.
pub fn uniform_box(dim: usize, half_width: f64, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            (0..dim)
                .map(|_| rng.random_range(-half_width..=half_width))
                .collect()
        })
        .collect()
}

/// `n` points drawn uniformly from the closed ball of the given radius.
pub fn uniform_ball(dim: usize, radius: f64, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let len = norm(&v).max(f64::MIN_POSITIVE);
            let u: f64 = rng.random();
            let r = radius * u.powf(1.0 / dim as f64);
            v.iter_mut().for_each(|c| *c *= r / len);
            v
        })
        .collect()
}

/// Points spread over many scales: random directions with radii log-uniform
/// in `[r_min, r_max]`, plus the origin.
pub fn log_radial(dim: usize, r_min: f64, r_max: f64, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (r_min.ln(), r_max.ln());
    let mut out = vec![vec![0.0; dim]];
    out.extend((1..n).map(|_| {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let len = norm(&v).max(f64::MIN_POSITIVE);
        let r = rng.random_range(lo..=hi).exp();
        v.iter_mut().for_each(|c| *c *= r / len);
        v
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clouds_are_seeded_and_bounded() {
        assert_eq!(uniform_box(3, 2.0, 50, 1), uniform_box(3, 2.0, 50, 1));
        assert!(uniform_box(3, 2.0, 500, 1).iter().flatten().all(|c| c.abs() <= 2.0));
        assert!(uniform_ball(4, 3.0, 500, 2).iter().all(|p| norm(p) <= 3.0 + 1e-12));
        let lr = log_radial(2, 1e-3, 1e3, 200, 5);
        assert_eq!(lr.len(), 200);
        assert!(lr[1..].iter().all(|p| (1e-3 - 1e-12..=1e3 + 1e-9).contains(&norm(p))));
    }
}

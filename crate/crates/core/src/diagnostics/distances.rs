//! One-dimensional distances between an empirical sample and `π ∝ exp(−u)`.

use crate::diagnostics::oracles::Density1d;
use crate::error::{Error, Result};

/// Size of the quantile grid used by [`w1_distance_1d`] when the sample is
/// larger.
pub const W1_QUANTILE_GRID: usize = 4096;

/// Target mass left outside the binning grid on each side.
const GRID_TAIL: f64 = 1e-9;

/// `½ Σ |p̂_j − π_j|` given empirical counts and target bin masses. Target
/// mass not covered by the bins counts fully.
pub fn tv_from_histogram(counts: &[usize], target_mass: &[f64]) -> f64 {
    let n: usize = counts.iter().sum();
    let inside: f64 = target_mass.iter().sum();
    let diff: f64 = counts
        .iter()
        .zip(target_mass)
        .map(|(&c, &m)| (c as f64 / n as f64 - m).abs())
        .sum();
    0.5 * (diff + (1.0 - inside).max(0.0))
}

fn check_samples(samples: &[f64], min_len: usize) -> Result<()> {
    if samples.len() < min_len {
        return Err(Error::Binning(format!(
            "need at least {min_len} samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(Error::Binning("samples contain non-finite values".into()));
    }
    Ok(())
}

/// Histogram total-variation distance on `n_bins` equal-width bins spanning
/// both the sample range and the central `1 − 2·10⁻⁹` of the target.
pub fn tv_distance_1d<U: Fn(f64) -> f64>(samples: &[f64], u: U, n_bins: usize) -> Result<f64> {
    if n_bins == 0 {
        return Err(Error::Binning("n_bins must be positive".into()));
    }
    check_samples(samples, 10 * n_bins)?;
    let (s_min, s_max) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &s| (a.min(s), b.max(s)));
    if !(s_max > s_min) {
        return Err(Error::Binning(format!("degenerate sample range [{s_min}, {s_max}]")));
    }
    let target = Density1d::new(u)?;
    let lo = s_min.min(target.quantile(GRID_TAIL));
    let hi = s_max.max(target.quantile(1.0 - GRID_TAIL));
    let width = (hi - lo) / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for &s in samples {
        let j = (((s - lo) / width) as usize).min(n_bins - 1);
        counts[j] += 1;
    }
    let edges: Vec<f64> = (0..=n_bins).map(|j| if j == n_bins { hi } else { lo + j as f64 * width }).collect();
    let cdf: Vec<f64> = edges.iter().map(|&e| target.cdf(e)).collect();
    let masses: Vec<f64> = cdf.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
    Ok(tv_from_histogram(&counts, &masses))
}

/// Mean absolute difference between empirical and target quantiles on the
/// grid `q_j = (j + ½)/m`, `m = min(n, W1_QUANTILE_GRID)`.
pub fn w1_distance_1d<U: Fn(f64) -> f64>(samples: &[f64], u: U) -> Result<f64> {
    check_samples(samples, 2)?;
    let target = Density1d::new(u)?;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let m = n.min(W1_QUANTILE_GRID);
    let total: f64 = (0..m)
        .map(|j| {
            let q = (j as f64 + 0.5) / m as f64;
            let empirical = sorted[((q * n as f64) as usize).min(n - 1)];
            (empirical - target.quantile(q)).abs()
        })
        .sum();
    Ok(total / m as f64)
}

/// Fraction of negative increments of a trajectory.
pub fn decreasing_fraction(trajectory: &[f64]) -> f64 {
    if trajectory.len() < 2 {
        return 0.0;
    }
    let down = trajectory.windows(2).filter(|w| !(w[1] >= w[0])).count();
    down as f64 / (trajectory.len() - 1) as f64
}

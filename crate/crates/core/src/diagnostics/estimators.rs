use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::{mean_and_se, SampleArchive};
use crate::vecops::norm_sq;

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

/// Quartiles and 1.5·IQR whiskers of a statistic across independent runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotStats {
    pub label: String,
    pub n: usize,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub lo_whisker: f64,
    pub hi_whisker: f64,
    pub outliers: Vec<f64>,
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos.fract());
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

impl BoxplotStats {
    /// Linear-interpolation quartiles; whiskers at the most extreme values
    /// within 1.5·IQR of the box.
    pub fn from_values(label: impl Into<String>, values: &[f64]) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("boxplot needs at least one finite value"));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let (q1, median, q3) = (
            quantile_sorted(&sorted, 0.25),
            quantile_sorted(&sorted, 0.5),
            quantile_sorted(&sorted, 0.75),
        );
        let iqr = q3 - q1;
        let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
        let inside = sorted.iter().copied().filter(|v| (lo_fence..=hi_fence).contains(v));
        let lo_whisker = inside.clone().fold(f64::INFINITY, f64::min);
        let hi_whisker = inside.fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            label: label.into(),
            n: values.len(),
            q1,
            median,
            q3,
            lo_whisker,
            hi_whisker,
            outliers: sorted.into_iter().filter(|v| !(lo_fence..=hi_fence).contains(v)).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    /// `Ê[X_i²]` per coordinate.
    pub per_coordinate_m2: Vec<f64>,
    pub per_coordinate_se: Vec<f64>,
    /// `Ê|X|²`, the sum of `per_coordinate_m2`.
    pub aggregate_m2: f64,
    /// `Ê|X|^{2p}` keyed by `p`.
    pub higher: BTreeMap<u32, Estimate>,
    /// `Ê exp(μ(1 + |X|²)^{κ})`.
    pub exp_moment: Estimate,
    pub exp_mu: f64,
    pub exp_exponent: f64,
    pub n_samples: usize,
    pub n_live_chains: usize,
    pub n_exploded: usize,
    /// Run-to-run spread of a target statistic, filled by the benchmark.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spread: Option<BoxplotStats>,
}

/// Plug-in moments over the live chains of an archive.
///
/// Standard errors treat chains as the independent replicates (the spread of
/// per-chain means); with a single chain the samples themselves are used.
pub fn estimate_moments(archive: &SampleArchive, mu: f64, ps: &[u32]) -> Result<MomentReport> {
    estimate_moments_with_exponent(archive, mu, ps, 0.5)
}

/// As [`estimate_moments`], with `V_μ(x) = exp(μ(1 + |x|²)^{exponent})`.
pub fn estimate_moments_with_exponent(
    archive: &SampleArchive,
    mu: f64,
    ps: &[u32],
    exponent: f64,
) -> Result<MomentReport> {
    let dim = archive.dim;
    let n_stats = dim + ps.len() + 1;
    // one row of statistics per replicate (chain, or sample if single chain)
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut n_samples = 0usize;
    let mut n_live = 0usize;
    let statistics = |x: &[f64], row: &mut [f64]| {
        for (r, xi) in row.iter_mut().zip(x) {
            *r += xi * xi;
        }
        let s = norm_sq(x);
        for (r, &p) in row[dim..].iter_mut().zip(ps) {
            *r += s.powi(p as i32);
        }
        row[n_stats - 1] += if mu == 0.0 { 1.0 } else { (mu * (1.0 + s).powf(exponent)).exp() };
    };
    for (_, samples) in archive.live_chains() {
        n_live += 1;
        let mut row = vec![0.0; n_stats];
        let mut count = 0usize;
        for x in samples {
            if archive.n_chains == 1 {
                let mut single = vec![0.0; n_stats];
                statistics(x, &mut single);
                rows.push(single);
            } else {
                statistics(x, &mut row);
            }
            count += 1;
        }
        n_samples += count;
        if archive.n_chains > 1 && count > 0 {
            row.iter_mut().for_each(|r| *r /= count as f64);
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptyReport);
    }
    let column = |j: usize| -> Estimate {
        let vals: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        let (value, se) = mean_and_se(&vals);
        Estimate { value, se }
    };
    let per: Vec<Estimate> = (0..dim).map(column).collect();
    let higher = ps.iter().enumerate().map(|(k, &p)| (p, column(dim + k))).collect();
    let per_coordinate_m2: Vec<f64> = per.iter().map(|e| e.value).collect();
    Ok(MomentReport {
        aggregate_m2: per_coordinate_m2.iter().sum(),
        per_coordinate_se: per.iter().map(|e| e.se).collect(),
        per_coordinate_m2,
        higher,
        exp_moment: column(n_stats - 1),
        exp_mu: mu,
        exp_exponent: exponent,
        n_samples,
        n_live_chains: n_live,
        n_exploded: archive.n_chains - n_live,
        spread: None,
    })
}

//! Ground-truth oracles, Monte Carlo estimators and the lemma probe suite.

mod distances;
mod estimators;
mod oracles;
mod probes;
pub mod quadrature;

pub use distances::{decreasing_fraction, tv_distance_1d, tv_from_histogram, w1_distance_1d, W1_QUANTILE_GRID};
pub use estimators::{estimate_moments, estimate_moments_with_exponent, BoxplotStats, Estimate, MomentReport};
pub use oracles::{moment_1d, radial_second_moment, Density1d};
pub use probes::{lemma_probe_suite, lemma_probe_suite_with, Inequality, InequalityResult, LemmaBounds, ViolationReport, VIOLATION_TOL};

//! Tamed unadjusted Langevin samplers for targets `π ∝ exp(−u)` whose
//! gradients grow superlinearly.
//!
//! * [`potentials`]: target contracts, the built-in catalog and assumption validators.
//! * [`taming`]: ULA, classic TULA, wd-TULA and reg-TULA drifts, step-size bound.
//! * [`sampler`]: parallel Euler–Maruyama chains with explosion tracking.
//! * [`diagnostics`]: quadrature oracles, moment estimators, 1D TV/W1, lemma probes.
//! * [`harness`]: configs, presets, benchmark orchestration and artifact emission.
//!
//! Each capability has a runnable example under `examples/`:
//! `oracle`, `wd_tula_benchmark`, `ula_explosion`, `divergence_demo`,
//! `lemma_probes`, `step_size_bound`, `oracle_1d_check`, `custom_potential`
//! and `reproducibility`.

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod points;
pub mod potentials;
pub mod sampler;
pub mod taming;
pub(crate) mod vecops;

pub use error::{Error, Result};
pub use potentials::{AssumptionConstants, PotentialSpec};
pub use sampler::{run, Init, RunConfig, RunOutput};
pub use taming::{Drift, DriftScheme, SchemeKind};

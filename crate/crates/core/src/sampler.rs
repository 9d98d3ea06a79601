//! Euler–Maruyama chain runner.
//!
//! Every scheme shares the kernel `θ ← θ − λ·drift(θ) + √(2λ)·ξ`. Chains are
//! independent: chain `i` draws its initial state and all of its noise from
//! the ChaCha8 stream `i` of the run seed, so results do not depend on the
//! number of chains, on rayon's scheduling, or on the order of evaluation.
//! Reductions across chains are ordered folds.
//!
//! A chain whose norm exceeds the explosion threshold (or turns non-finite) is
//! frozen at its last finite state and excluded from every estimator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{cubic_demo, PotentialSpec};
use crate::taming::{Drift, DriftScheme};
use crate::vecops::norm_sq;

/// Default norm above which a chain counts as exploded.
pub const DEFAULT_EXPLOSION_THRESHOLD: f64 = 1e100;

/// Anything the kernel can integrate.
pub trait DriftField: Sync {
    fn eval_into(&self, x: &[f64], out: &mut [f64]);
}

impl DriftField for Drift {
    #[inline]
    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        Drift::eval_into(self, x, out)
    }
}

impl<F: Fn(&[f64], &mut [f64]) + Sync> DriftField for F {
    #[inline]
    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        self(x, out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Init {
    Constant { value: Vec<f64> },
    Gaussian { mean: Vec<f64>, variance: f64 },
}

impl Init {
    /// `value · e₁` in dimension `dim`.
    pub fn first_coordinate(dim: usize, value: f64) -> Self {
        let mut v = vec![0.0; dim];
        v[0] = value;
        Init::Constant { value: v }
    }

    pub fn centered_gaussian(dim: usize, variance: f64) -> Self {
        Init::Gaussian { mean: vec![0.0; dim], variance }
    }

    fn dim(&self) -> usize {
        match self {
            Init::Constant { value } => value.len(),
            Init::Gaussian { mean, .. } => mean.len(),
        }
    }

    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        match self {
            Init::Constant { value } => out.copy_from_slice(value),
            Init::Gaussian { mean, variance } => {
                let sd = variance.sqrt();
                for (o, m) in out.iter_mut().zip(mean) {
                    let z: f64 = rng.sample(StandardNormal);
                    *o = m + sd * z;
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    #[default]
    Gaussian,
    /// Deterministic Euler steps; for testing the drift path in isolation.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n_chains: usize,
    pub n_iters: u64,
    pub burn_in: u64,
    pub thinning: u64,
    pub lambda: f64,
    pub init: Init,
    pub seed: u64,
    pub explosion_threshold: f64,
    /// Interval of the moment trajectory; `None` picks about 1000 records.
    #[serde(default)]
    pub record_every: Option<u64>,
    /// When set, the trajectory also tracks `E exp(μ(1 + |θ|²)^{1/2})`.
    #[serde(default)]
    pub exp_moment_mu: Option<f64>,
    /// Keep the thinned post-burn-in states. Streaming moments are always
    /// accumulated.
    #[serde(default = "default_true")]
    pub store_samples: bool,
    #[serde(default)]
    pub noise: NoiseMode,
}

fn default_true() -> bool {
    true
}

impl RunConfig {
    /// A config with burn-in `n_iters / 2`, no thinning and the default
    /// explosion threshold.
    pub fn new(n_chains: usize, n_iters: u64, lambda: f64, init: Init, seed: u64) -> Self {
        Self {
            n_chains,
            n_iters,
            burn_in: n_iters / 2,
            thinning: 1,
            lambda,
            init,
            seed,
            explosion_threshold: DEFAULT_EXPLOSION_THRESHOLD,
            record_every: None,
            exp_moment_mu: None,
            store_samples: true,
            noise: NoiseMode::Gaussian,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.n_chains == 0 || self.n_iters == 0 {
            return Err(Error::config("n_chains and n_iters must be positive"));
        }
        if self.burn_in + 1 > self.n_iters {
            return Err(Error::config(format!(
                "burn_in + 1 must not exceed n_iters (burn_in = {}, n_iters = {})",
                self.burn_in, self.n_iters
            )));
        }
        if self.thinning == 0 {
            return Err(Error::config("thinning must be >= 1"));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::config(format!("lambda must be > 0, got {}", self.lambda)));
        }
        if !(self.explosion_threshold > 0.0) {
            return Err(Error::config("explosion_threshold must be > 0"));
        }
        if self.init.dim() != dim {
            return Err(Error::config(format!(
                "initial state has dimension {}, potential has {dim}",
                self.init.dim()
            )));
        }
        if let Init::Gaussian { variance, .. } = self.init {
            if !(variance > 0.0 && variance.is_finite()) {
                return Err(Error::config("initial variance must be > 0"));
            }
        }
        if self.record_every == Some(0) {
            return Err(Error::config("record_every must be >= 1"));
        }
        Ok(())
    }

    pub fn record_interval(&self) -> u64 {
        self.record_every.unwrap_or((self.n_iters / 1000).max(1))
    }

    /// Steps `n ∈ (burn_in, n_iters]` whose states are archived.
    pub fn sample_steps(&self) -> Vec<u64> {
        ((self.burn_in + self.thinning)..=self.n_iters)
            .step_by(self.thinning as usize)
            .collect()
    }

    fn trajectory_steps(&self) -> Vec<u64> {
        (0..=self.n_iters).step_by(self.record_interval() as usize).collect()
    }
}

fn chain_rng(seed: u64, chain: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain as u64);
    rng
}

/// One Euler–Maruyama step of a single chain. Returns `false` (leaving `x`
/// untouched) when the proposed state is non-finite or beyond `threshold`.
#[inline]
fn advance<D: DriftField + ?Sized>(
    x: &mut [f64],
    scratch: &mut [f64],
    drift: &D,
    lambda: f64,
    noise: NoiseMode,
    rng: &mut ChaCha8Rng,
    threshold: f64,
) -> bool {
    drift.eval_into(x, scratch);
    let scale = (2.0 * lambda).sqrt();
    let mut sq = 0.0;
    for (g, xi) in scratch.iter_mut().zip(x.iter()) {
        let xi_noise = match noise {
            NoiseMode::Gaussian => rng.sample::<f64, _>(StandardNormal),
            NoiseMode::Zero => 0.0,
        };
        *g = xi - lambda * *g + scale * xi_noise;
        sq += *g * *g;
    }
    // a NaN norm fails the comparison
    if sq.sqrt() <= threshold {
        x.copy_from_slice(scratch);
        true
    } else {
        false
    }
}

/// Positions and generator states of a set of chains.
#[derive(Debug, Clone)]
pub struct ChainBatch {
    dim: usize,
    positions: Vec<f64>,
    step_count: u64,
    exploded: Vec<Option<u64>>,
    rngs: Vec<ChaCha8Rng>,
    threshold: f64,
    noise: NoiseMode,
}

impl ChainBatch {
    /// Draws initial states as in [`run`].
    pub fn from_config(dim: usize, config: &RunConfig) -> Result<Self> {
        config.validate(dim)?;
        let mut positions = vec![0.0; config.n_chains * dim];
        let rngs = positions
            .chunks_mut(dim)
            .enumerate()
            .map(|(i, x)| {
                let mut rng = chain_rng(config.seed, i);
                config.init.sample_into(&mut rng, x);
                rng
            })
            .collect();
        Ok(Self {
            dim,
            positions,
            step_count: 0,
            exploded: vec![None; config.n_chains],
            rngs,
            threshold: config.explosion_threshold,
            noise: config.noise,
        })
    }

    /// Chains starting at explicit positions.
    pub fn from_positions(positions: &[Vec<f64>], seed: u64) -> Result<Self> {
        let dim = positions.first().map(Vec::len).unwrap_or(0);
        if dim == 0 || positions.iter().any(|p| p.len() != dim) {
            return Err(Error::config("positions must be non-empty with a common dimension"));
        }
        Ok(Self {
            dim,
            positions: positions.concat(),
            step_count: 0,
            exploded: vec![None; positions.len()],
            rngs: (0..positions.len()).map(|i| chain_rng(seed, i)).collect(),
            threshold: DEFAULT_EXPLOSION_THRESHOLD,
            noise: NoiseMode::Gaussian,
        })
    }

    pub fn with_noise(mut self, noise: NoiseMode) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_chains(&self) -> usize {
        self.exploded.len()
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn position(&self, chain: usize) -> &[f64] {
        &self.positions[chain * self.dim..(chain + 1) * self.dim]
    }

    pub fn positions(&self) -> impl Iterator<Item = &[f64]> {
        self.positions.chunks(self.dim)
    }

    /// Step at which the chain exploded, if it did.
    pub fn exploded_at(&self, chain: usize) -> Option<u64> {
        self.exploded[chain]
    }

    pub fn n_exploded(&self) -> usize {
        self.exploded.iter().filter(|e| e.is_some()).count()
    }
}

/// Advances every live chain by one step, flagging chains that explode.
pub fn em_step<D: DriftField + ?Sized>(batch: &mut ChainBatch, drift: &D, lambda: f64) {
    let dim = batch.dim;
    let (noise, threshold) = (batch.noise, batch.threshold);
    let step = batch.step_count + 1;
    batch
        .positions
        .par_chunks_mut(dim)
        .zip(batch.rngs.par_iter_mut())
        .zip(batch.exploded.par_iter_mut())
        .for_each_init(
            || vec![0.0; dim],
            |scratch, ((x, rng), exploded)| {
                if exploded.is_none() && !advance(x, scratch, drift, lambda, noise, rng, threshold) {
                    *exploded = Some(step);
                }
            },
        );
    batch.step_count = step;
}

/// Which chains exploded and when.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplosionReport {
    pub n_chains: usize,
    pub n_exploded: usize,
    /// `(chain, step)` pairs in chain order.
    pub events: Vec<(usize, u64)>,
    pub first_step: Option<u64>,
    pub median_step: Option<u64>,
    pub last_step: Option<u64>,
}

impl ExplosionReport {
    pub fn from_flags(flags: &[Option<u64>]) -> Self {
        let events: Vec<(usize, u64)> =
            flags.iter().enumerate().filter_map(|(i, s)| s.map(|s| (i, s))).collect();
        let mut steps: Vec<u64> = events.iter().map(|e| e.1).collect();
        steps.sort_unstable();
        Self {
            n_chains: flags.len(),
            n_exploded: events.len(),
            first_step: steps.first().copied(),
            median_step: steps.get(steps.len() / 2).copied(),
            last_step: steps.last().copied(),
            events,
        }
    }

    pub fn fraction(&self) -> f64 {
        self.n_exploded as f64 / self.n_chains as f64
    }
}

/// Thinned post-burn-in states of every chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleArchive {
    pub dim: usize,
    pub n_chains: usize,
    /// Recorded steps, shared by all chains.
    pub steps: Vec<u64>,
    /// Chain-major: `data[(chain · steps.len() + k) · dim + i]`.
    pub data: Vec<f64>,
    pub exploded: Vec<Option<u64>>,
}

impl SampleArchive {
    pub fn sample(&self, chain: usize, k: usize) -> &[f64] {
        let start = (chain * self.steps.len() + k) * self.dim;
        &self.data[start..start + self.dim]
    }

    pub fn is_live(&self, chain: usize) -> bool {
        self.exploded[chain].is_none()
    }

    /// Samples of chains that never exploded, grouped by chain.
    pub fn live_chains(&self) -> impl Iterator<Item = (usize, impl Iterator<Item = &[f64]>)> {
        (0..self.n_chains)
            .filter(|&c| self.is_live(c))
            .map(move |c| (c, (0..self.steps.len()).map(move |k| self.sample(c, k))))
    }

    /// The first coordinate of every live sample, in chain order.
    pub fn first_coordinates(&self) -> Vec<f64> {
        self.live_chains().flat_map(|(_, s)| s.map(|x| x[0])).collect()
    }

    /// A synthetic single-chain archive over the given samples.
    pub fn from_samples(samples: &[Vec<f64>]) -> Result<Self> {
        let dim = samples.first().map(Vec::len).ok_or(Error::EmptyReport)?;
        Ok(Self {
            dim,
            n_chains: 1,
            steps: (1..=samples.len() as u64).collect(),
            data: samples.concat(),
            exploded: vec![None],
        })
    }
}

/// Running `E|θ_n|²` (and optionally the exponential moment) over chains that
/// are live at step `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTrajectory {
    pub steps: Vec<u64>,
    pub mean_norm_sq: Vec<f64>,
    pub exp_moment: Option<Vec<f64>>,
    pub exploded_chains: Vec<usize>,
}

/// Moments accumulated over every post-burn-in step of every live chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamingMoments {
    pub dim: usize,
    /// Per live chain, the time average of `θ_i²`; chain-major.
    pub chain_m2: Vec<f64>,
    pub live_chain_ids: Vec<usize>,
    pub steps_per_chain: u64,
}

impl StreamingMoments {
    pub fn n_live(&self) -> usize {
        self.live_chain_ids.len()
    }

    /// Estimate of `E[θ_i²]` with its standard error across chains.
    pub fn coordinate_m2(&self, i: usize) -> (f64, f64) {
        let vals: Vec<f64> = self.chain_m2.chunks(self.dim).map(|c| c[i]).collect();
        mean_and_se(&vals)
    }

    pub fn per_coordinate_m2(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.coordinate_m2(i).0).collect()
    }
}

pub(crate) fn mean_and_se(vals: &[f64]) -> (f64, f64) {
    let n = vals.len() as f64;
    if vals.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = vals.iter().sum::<f64>() / n;
    if vals.len() < 2 {
        return (mean, 0.0);
    }
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub archive: SampleArchive,
    pub trajectory: MomentTrajectory,
    pub streaming: StreamingMoments,
    pub explosions: ExplosionReport,
    pub scheme: DriftScheme,
    pub config: RunConfig,
}

struct ChainOutcome {
    samples: Vec<f64>,
    traj_norm_sq: Vec<f64>,
    traj_exp: Vec<f64>,
    sum_sq: Vec<f64>,
    exploded_at: Option<u64>,
}

fn run_chain(
    chain: usize,
    drift: &Drift,
    config: &RunConfig,
    sample_steps: &[u64],
    traj_steps: &[u64],
) -> ChainOutcome {
    let dim = drift.dim();
    let mut rng = chain_rng(config.seed, chain);
    let mut x = vec![0.0; dim];
    config.init.sample_into(&mut rng, &mut x);
    let mut scratch = vec![0.0; dim];
    let n_samples = if config.store_samples { sample_steps.len() } else { 0 };
    let mut out = ChainOutcome {
        samples: Vec::with_capacity(n_samples * dim),
        traj_norm_sq: Vec::with_capacity(traj_steps.len()),
        traj_exp: Vec::new(),
        sum_sq: vec![0.0; dim],
        exploded_at: None,
    };
    let record = |x: &[f64], out: &mut ChainOutcome| {
        let s = norm_sq(x);
        out.traj_norm_sq.push(s);
        if let Some(mu) = config.exp_moment_mu {
            out.traj_exp.push((mu * (1.0 + s).sqrt()).exp());
        }
    };
    record(&x, &mut out);
    let (mut next_sample, mut next_traj) = (0usize, 1usize);
    for step in 1..=config.n_iters {
        let ok = advance(
            &mut x,
            &mut scratch,
            drift,
            config.lambda,
            config.noise,
            &mut rng,
            config.explosion_threshold,
        );
        if !ok {
            out.exploded_at = Some(step);
            break;
        }
        if step > config.burn_in {
            for (acc, xi) in out.sum_sq.iter_mut().zip(&x) {
                *acc += xi * xi;
            }
        }
        if next_sample < n_samples && sample_steps[next_sample] == step {
            out.samples.extend_from_slice(&x);
            next_sample += 1;
        }
        if next_traj < traj_steps.len() && traj_steps[next_traj] == step {
            record(&x, &mut out);
            next_traj += 1;
        }
    }
    // frozen states for the remainder of an exploded chain
    while next_sample < n_samples {
        out.samples.extend_from_slice(&x);
        next_sample += 1;
    }
    out
}

/// Runs `config.n_chains` independent chains of the scheme on `spec`.
///
/// Fails with [`Error::AllExploded`] when every chain exploded by the end of
/// burn-in.
pub fn run(spec: &PotentialSpec, scheme: &DriftScheme, config: &RunConfig) -> Result<RunOutput> {
    config.validate(spec.dim())?;
    if scheme.lambda != config.lambda {
        return Err(Error::config(format!(
            "scheme step size {} differs from run step size {}",
            scheme.lambda, config.lambda
        )));
    }
    let drift = Drift::new(spec, scheme)?;
    let dim = spec.dim();
    let sample_steps = config.sample_steps();
    let traj_steps = config.trajectory_steps();

    let outcomes: Vec<ChainOutcome> = (0..config.n_chains)
        .into_par_iter()
        .map(|c| run_chain(c, &drift, config, &sample_steps, &traj_steps))
        .collect();

    let flags: Vec<Option<u64>> = outcomes.iter().map(|o| o.exploded_at).collect();
    let explosions = ExplosionReport::from_flags(&flags);
    if flags.iter().all(|f| matches!(f, Some(s) if *s <= config.burn_in)) {
        return Err(Error::AllExploded(Box::new(explosions)));
    }

    let mut trajectory = MomentTrajectory {
        steps: traj_steps.clone(),
        mean_norm_sq: Vec::with_capacity(traj_steps.len()),
        exp_moment: config.exp_moment_mu.map(|_| Vec::with_capacity(traj_steps.len())),
        exploded_chains: Vec::with_capacity(traj_steps.len()),
    };
    for (k, step) in traj_steps.iter().enumerate() {
        let (mut sum, mut sum_exp, mut live) = (0.0, 0.0, 0usize);
        for o in &outcomes {
            if k < o.traj_norm_sq.len() && o.exploded_at.is_none_or(|e| e > *step) {
                sum += o.traj_norm_sq[k];
                if config.exp_moment_mu.is_some() {
                    sum_exp += o.traj_exp[k];
                }
                live += 1;
            }
        }
        let denom = live as f64;
        trajectory.mean_norm_sq.push(sum / denom);
        if let Some(e) = trajectory.exp_moment.as_mut() {
            e.push(sum_exp / denom);
        }
        trajectory.exploded_chains.push(config.n_chains - live);
    }

    let steps_per_chain = config.n_iters - config.burn_in;
    let mut streaming = StreamingMoments {
        dim,
        chain_m2: Vec::new(),
        live_chain_ids: Vec::new(),
        steps_per_chain,
    };
    for (c, o) in outcomes.iter().enumerate() {
        if o.exploded_at.is_none() {
            streaming.live_chain_ids.push(c);
            streaming
                .chain_m2
                .extend(o.sum_sq.iter().map(|s| s / steps_per_chain as f64));
        }
    }

    let steps = if config.store_samples { sample_steps } else { Vec::new() };
    let mut data = Vec::with_capacity(config.n_chains * steps.len() * dim);
    for o in &outcomes {
        data.extend_from_slice(&o.samples);
    }
    Ok(RunOutput {
        archive: SampleArchive { dim, n_chains: config.n_chains, steps, data, exploded: flags },
        trajectory,
        streaming,
        explosions,
        scheme: *drift.scheme(),
        config: config.clone(),
    })
}

/// Second-moment trajectory of plain ULA on `u(x) = x³/3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceTrajectory {
    pub lambda: f64,
    pub n_chains: usize,
    /// `Ê[X_n²]` over chains not yet exploded at step `n`, `n = 0..=n_steps`.
    pub survivors_m2: Vec<f64>,
    /// Standard error of `survivors_m2`.
    pub survivors_se: Vec<f64>,
    /// `Ê[X_n²]` over all chains, exploded ones held at their last finite
    /// state. A lower bound on the untruncated second moment.
    pub censored_m2: Vec<f64>,
    pub exploded_fraction: Vec<f64>,
}

/// Runs vanilla ULA on the cubic potential from `X_0 ~ N(0, 4/λ)`.
pub fn ula_divergence_demo(lambda: f64, n_chains: usize, n_steps: u64, seed: u64) -> Result<DivergenceTrajectory> {
    let spec = cubic_demo();
    let scheme = DriftScheme::ula(lambda);
    let drift = Drift::new(&spec, &scheme)?;
    let mut config = RunConfig::new(n_chains, n_steps.max(1), lambda, Init::centered_gaussian(1, 4.0 / lambda), seed);
    config.burn_in = 0;
    let mut batch = ChainBatch::from_config(1, &config)?;
    let mut out = DivergenceTrajectory {
        lambda,
        n_chains,
        survivors_m2: Vec::new(),
        survivors_se: Vec::new(),
        censored_m2: Vec::new(),
        exploded_fraction: Vec::new(),
    };
    let record = |batch: &ChainBatch, out: &mut DivergenceTrajectory| {
        let live: Vec<f64> = batch
            .positions()
            .enumerate()
            .filter(|(i, _)| batch.exploded_at(*i).is_none())
            .map(|(_, x)| x[0] * x[0])
            .collect();
        let (m, se) = mean_and_se(&live);
        out.survivors_m2.push(m);
        out.survivors_se.push(se);
        out.censored_m2
            .push(batch.positions().map(|x| x[0] * x[0]).sum::<f64>() / n_chains as f64);
        out.exploded_fraction.push(batch.n_exploded() as f64 / n_chains as f64);
    };
    record(&batch, &mut out);
    for _ in 0..n_steps {
        em_step(&mut batch, &drift, lambda);
        record(&batch, &mut out);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{double_well_radial, gaussian};

    #[test]
    fn zero_noise_is_a_plain_euler_step() {
        let mut batch = ChainBatch::from_positions(&[vec![2.0]], 0).unwrap().with_noise(NoiseMode::Zero);
        em_step(&mut batch, &|x: &[f64], out: &mut [f64]| out.copy_from_slice(x), 0.1);
        assert!((batch.position(0)[0] - 1.8).abs() < 1e-15);
        assert_eq!(batch.step_count(), 1);

        let start = vec![vec![0.3, -7.0], vec![1e3, 2.0]];
        let mut batch = ChainBatch::from_positions(&start, 0).unwrap().with_noise(NoiseMode::Zero);
        em_step(&mut batch, &|_: &[f64], out: &mut [f64]| out.fill(0.0), 0.5);
        assert_eq!(batch.positions().map(<[f64]>::to_vec).collect::<Vec<_>>(), start);
    }

    #[test]
    fn explosion_freezes_chain() {
        let mut batch = ChainBatch::from_positions(&[vec![10.0], vec![0.1]], 3)
            .unwrap()
            .with_noise(NoiseMode::Zero)
            .with_threshold(1e6);
        let cube = |x: &[f64], out: &mut [f64]| out[0] = x[0].powi(3);
        for _ in 0..20 {
            em_step(&mut batch, &cube, 0.5);
        }
        assert_eq!(batch.n_exploded(), 1);
        let at = batch.exploded_at(0).unwrap();
        assert!(at <= 5, "{at}");
        assert!(batch.position(0)[0].abs() <= 1e6);
        assert!(batch.exploded_at(1).is_none());
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::new(4, 10, 0.1, Init::first_coordinate(2, 1.0), 0);
        assert!(c.validate(2).is_ok());
        assert!(c.validate(3).is_err());
        c.burn_in = 10;
        assert!(c.validate(2).is_err());
        c.burn_in = 9;
        c.thinning = 0;
        assert!(c.validate(2).is_err());
        c.thinning = 3;
        assert!(c.sample_steps().is_empty());
        c.burn_in = 7;
        assert_eq!(c.sample_steps(), vec![10]);
        c.burn_in = 2;
        assert_eq!(c.sample_steps(), vec![5, 8]);
    }

    #[test]
    fn run_rejects_lambda_mismatch_and_bad_schemes() {
        let g = gaussian(1).unwrap();
        let c = RunConfig::new(2, 10, 0.1, Init::first_coordinate(1, 0.0), 0);
        assert!(matches!(run(&g, &DriftScheme::ula(0.2), &c), Err(Error::Config(_))));
        let cubic = cubic_demo();
        assert!(matches!(run(&cubic, &DriftScheme::wd_tula(0.1), &c), Err(Error::Config(_))));
    }

    #[test]
    fn run_is_deterministic_and_chain_independent() {
        let dw = double_well_radial(3).unwrap();
        let mut c = RunConfig::new(6, 200, 0.05, Init::centered_gaussian(3, 1.0), 11);
        c.thinning = 7;
        let a = run(&dw, &DriftScheme::wd_tula(0.05), &c).unwrap();
        let b = run(&dw, &DriftScheme::wd_tula(0.05), &c).unwrap();
        assert_eq!(a.archive, b.archive);
        assert_eq!(a.trajectory, b.trajectory);

        c.n_chains = 2;
        let small = run(&dw, &DriftScheme::wd_tula(0.05), &c).unwrap();
        for chain in 0..2 {
            for k in 0..small.archive.steps.len() {
                assert_eq!(small.archive.sample(chain, k), a.archive.sample(chain, k));
            }
        }
        assert_eq!(&a.streaming.chain_m2[..6], &small.streaming.chain_m2[..]);
    }

    #[test]
    fn run_matches_repeated_em_steps() {
        let dw = double_well_radial(2).unwrap();
        let scheme = DriftScheme::wd_tula(0.01);
        let mut c = RunConfig::new(3, 5, 0.01, Init::first_coordinate(2, 3.0), 5);
        c.burn_in = 0;
        let out = run(&dw, &scheme, &c).unwrap();
        let mut batch = ChainBatch::from_config(2, &c).unwrap();
        let drift = Drift::new(&dw, &scheme).unwrap();
        for _ in 0..5 {
            em_step(&mut batch, &drift, 0.01);
        }
        for chain in 0..3 {
            assert_eq!(out.archive.sample(chain, 4), batch.position(chain));
        }
    }

    #[test]
    fn all_exploded_is_reported() {
        let dw = double_well_radial(10).unwrap();
        let c = RunConfig::new(5, 100, 0.1, Init::first_coordinate(10, 200.0), 1);
        match run(&dw, &DriftScheme::ula(0.1), &c) {
            Err(Error::AllExploded(report)) => {
                assert_eq!(report.n_exploded, 5);
                assert!(report.last_step.unwrap() <= 10);
            }
            other => panic!("expected explosion, got {other:?}"),
        }
    }

    #[test]
    fn ula_gaussian_stationary_variance() {
        // x' = (1 − λ)x + √(2λ)ξ has stationary variance 2λ/(1 − (1 − λ)²) = 2/(2 − λ)
        let lambda = 0.1;
        let g = gaussian(1).unwrap();
        let mut c = RunConfig::new(1000, 10_000, lambda, Init::first_coordinate(1, 0.0), 42);
        c.store_samples = false;
        let out = run(&g, &DriftScheme::ula(lambda), &c).unwrap();
        let (m2, se) = out.streaming.coordinate_m2(0);
        let exact = 2.0 / (2.0 - lambda);
        assert!((m2 - exact).abs() <= 3.0 * se, "{m2} ± {se} vs {exact}");
        assert_eq!(out.archive.data.len(), 0);
    }

    #[test]
    fn divergence_initial_moment() {
        let t = ula_divergence_demo(0.01, 20_000, 3, 9).unwrap();
        assert!((t.survivors_m2[0] - 400.0).abs() <= 3.0 * 400.0 * (2.0f64 / 20_000.0).sqrt());
        assert_eq!(t.censored_m2[0], t.survivors_m2[0]);
        assert_eq!(t.exploded_fraction.len(), 4);
    }
}

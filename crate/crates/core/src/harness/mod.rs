//! Experiment orchestration behind the `tula` binary: each command is a plain
//! function returning a serializable report and, if asked, writing artifacts.

pub mod cli;
pub mod config;
pub mod emit;

use std::path::Path;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diagnostics::{
    decreasing_fraction, estimate_moments, lemma_probe_suite, moment_1d, radial_second_moment, BoxplotStats,
    Estimate, MomentReport, ViolationReport,
};
use crate::error::{Error, Result};
use crate::points::uniform_box;
use crate::potentials::{validate_dissipativity, validate_growth, MarginReport, PotentialSpec};
use crate::sampler::{run, ula_divergence_demo, DivergenceTrajectory, ExplosionReport, MomentTrajectory, RunOutput};
use crate::taming::{compute_step_size_bound, DriftScheme, SchemeKind, StepSizeBound};

pub use config::{ConfigBuilder, EmitKind, ExperimentConfig, InitKind, Preset};

/// Ground-truth `E[X_1²]` for catalog targets: radial quadrature for
/// rotation-invariant potentials, 1D quadrature otherwise.
pub fn oracle_m2(spec: &PotentialSpec) -> Result<f64> {
    let d = spec.dim();
    if spec.is_radial() {
        radial_second_moment(d, |r| {
            let mut x = vec![0.0; d];
            x[0] = r;
            -spec.value(&x)
        })
    } else if d == 1 {
        moment_1d(|t| spec.value(&[t]), 2)
    } else {
        Err(Error::config(format!("no oracle for non-radial potential {} in d = {d}", spec.name())))
    }
}

/// Per-run seeds shared by every benchmark cell.
pub fn run_seeds(seed: u64, n_runs: usize) -> Vec<u64> {
    (0..n_runs)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            rng.next_u64()
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
struct Meta {
    command: &'static str,
    wall_time_s: f64,
    crate_version: &'static str,
}

fn write_meta(dir: &Path, name: &str, command: &'static str, started: Instant) -> Result<()> {
    let meta = Meta { command, wall_time_s: started.elapsed().as_secs_f64(), crate_version: env!("CARGO_PKG_VERSION") };
    emit::write(dir, name, &emit::to_json(&meta)?)
}

// ---------------------------------------------------------------- sample

#[derive(Debug, Clone, Serialize)]
pub struct SampleReport {
    pub config: ExperimentConfig,
    pub scheme: DriftScheme,
    pub potential: String,
    pub dim: usize,
    /// From every post-burn-in step of every live chain.
    pub per_coordinate_m2: Vec<f64>,
    pub per_coordinate_se: Vec<f64>,
    pub first_coordinate_m2: Estimate,
    pub oracle_m2: Option<f64>,
    /// `|Ê[X_1²] − oracle|`.
    pub abs_error: Option<f64>,
    /// Plug-in moments over the archived samples, when stored.
    pub moments: Option<MomentReport>,
    pub explosions: ExplosionReport,
    pub trajectory: MomentTrajectory,
    pub step_size_warning: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
struct ExplodedReport<'a> {
    status: &'static str,
    config: &'a ExperimentConfig,
    explosions: &'a ExplosionReport,
}

pub struct SampleOutcome {
    pub report: SampleReport,
    pub output: RunOutput,
}

/// Runs the configured scheme once and writes `samples.csv`, `moments.csv`
/// and `report.json` into `config.out` according to `config.emit`. When every
/// chain explodes, `report.json` carries the explosion report and
/// [`Error::AllExploded`] is returned.
pub fn sample(config: &ExperimentConfig) -> Result<SampleOutcome> {
    let started = Instant::now();
    let spec = config.spec()?;
    let scheme = config.scheme();
    let rc = config.run_config(config.lambda, config.seed)?;
    let output = match run(&spec, &scheme, &rc) {
        Err(Error::AllExploded(explosions)) => {
            if config.emits(EmitKind::Json) {
                let r = ExplodedReport { status: "all_exploded", config, explosions: &explosions };
                emit::write(&config.out, "report.json", &emit::to_json(&r)?)?;
                write_meta(&config.out, "report.meta.json", "sample", started)?;
            }
            return Err(Error::AllExploded(explosions));
        }
        other => other?,
    };
    let oracle = oracle_m2(&spec).ok();
    let dim = spec.dim();
    let (m2, se): (Vec<f64>, Vec<f64>) = (0..dim).map(|i| output.streaming.coordinate_m2(i)).unzip();
    let first = Estimate { value: m2[0], se: se[0] };
    let moments = if output.archive.steps.is_empty() {
        None
    } else {
        Some(estimate_moments(&output.archive, compute_step_size_bound(&spec).mu, &[1, 2])?)
    };
    let report = SampleReport {
        config: config.clone(),
        scheme: output.scheme,
        potential: spec.name().to_string(),
        dim,
        per_coordinate_m2: m2.clone(),
        per_coordinate_se: se.clone(),
        first_coordinate_m2: first,
        oracle_m2: oracle,
        abs_error: oracle.map(|o| (first.value - o).abs()),
        moments,
        explosions: output.explosions.clone(),
        trajectory: output.trajectory.clone(),
        step_size_warning: if scheme.kind == SchemeKind::Ula {
            None
        } else {
            compute_step_size_bound(&spec).warning(config.lambda)
        },
    };
    if config.emits(EmitKind::Csv) {
        if !output.archive.steps.is_empty() {
            emit::write(&config.out, "samples.csv", &emit::samples_csv(config, &output.archive))?;
        }
        emit::write(&config.out, "moments.csv", &emit::moments_csv(config, &m2, &se))?;
    }
    if config.emits(EmitKind::Json) {
        emit::write(&config.out, "report.json", &emit::to_json(&report)?)?;
        write_meta(&config.out, "report.meta.json", "sample", started)?;
    }
    Ok(SampleOutcome { report, output })
}

// ------------------------------------------------------------- benchmark

#[derive(Debug, Clone, Serialize)]
pub struct CellResult {
    pub label: String,
    pub scheme: SchemeKind,
    pub lambda: f64,
    /// `Ê[X_1²]` per run; NaN when every chain of the run exploded.
    pub values: Vec<f64>,
    pub n_exploded: Vec<usize>,
    pub stats: Option<BoxplotStats>,
    pub median_abs_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkReport {
    pub config: ExperimentConfig,
    pub oracle_m2: Option<f64>,
    pub seeds: Vec<u64>,
    pub cells: Vec<CellResult>,
}

pub fn cell_label(kind: SchemeKind, lambda: f64) -> String {
    format!("{}@{lambda}", kind.as_str())
}

/// `n_runs` seeded runs per (scheme, λ) cell; boxplots of `Ê[X_1²]`.
/// `progress` is called once per finished run.
pub fn benchmark(config: &ExperimentConfig, mut progress: impl FnMut(&str, usize, f64)) -> Result<BenchmarkReport> {
    let started = Instant::now();
    let spec = config.spec()?;
    let oracle = oracle_m2(&spec).ok();
    let seeds = run_seeds(config.seed, config.n_runs);
    let mut cells = Vec::new();
    for &kind in &config.schemes {
        for &lambda in &config.lambdas {
            let label = cell_label(kind, lambda);
            let scheme = config.drift_scheme(kind, lambda);
            let mut values = Vec::with_capacity(seeds.len());
            let mut n_exploded = Vec::with_capacity(seeds.len());
            for (k, &seed) in seeds.iter().enumerate() {
                let mut rc = config.run_config(lambda, seed)?;
                rc.store_samples = false;
                let (v, e) = match run(&spec, &scheme, &rc) {
                    Ok(out) => (out.streaming.coordinate_m2(0).0, out.explosions.n_exploded),
                    Err(Error::AllExploded(r)) => (f64::NAN, r.n_exploded),
                    Err(e) => return Err(e),
                };
                progress(&label, k, v);
                values.push(v);
                n_exploded.push(e);
            }
            let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
            let stats = BoxplotStats::from_values(label.clone(), &finite).ok();
            let median_abs_error = stats.as_ref().zip(oracle).map(|(s, o)| (s.median - o).abs());
            cells.push(CellResult { label, scheme: kind, lambda, values, n_exploded, stats, median_abs_error });
        }
    }
    let report = BenchmarkReport { config: config.clone(), oracle_m2: oracle, seeds, cells };
    let stats: Vec<BoxplotStats> = report.cells.iter().filter_map(|c| c.stats.clone()).collect();
    let csv = emit::boxplot_csv(config, &stats);
    if config.emits(EmitKind::Csv) {
        emit::write(&config.out, "boxplot.csv", &csv)?;
        emit::write(&config.out, "runs.csv", &runs_csv(&report))?;
    }
    if config.emits(EmitKind::Svg) {
        emit::write(&config.out, "boxplot.svg", &emit::boxplot_svg(&csv, oracle, "E[X1^2]"))?;
    }
    if config.emits(EmitKind::Json) {
        emit::write(&config.out, "report.json", &emit::to_json(&report)?)?;
        write_meta(&config.out, "report.meta.json", "benchmark", started)?;
    }
    Ok(report)
}

fn runs_csv(report: &BenchmarkReport) -> String {
    let mut s = format!("{}\ncell,run,seed,m2_x1,n_exploded\n", report.config.header());
    for c in &report.cells {
        for (k, (v, e)) in c.values.iter().zip(&c.n_exploded).enumerate() {
            s.push_str(&format!("{},{k},{},{v:?},{e}\n", c.label, report.seeds[k]));
        }
    }
    s
}

// -------------------------------------------------------------- validate

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidateReport {
    pub potential: String,
    pub dim: usize,
    pub scheme: DriftScheme,
    pub n_points: usize,
    pub dissipativity: MarginReport,
    pub growth: MarginReport,
    pub probes: ViolationReport,
    pub step_size: StepSizeBound,
    pub effective_bound: f64,
    pub warnings: Vec<String>,
    pub checks: Vec<Check>,
}

impl ValidateReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "potential {} (d = {}), scheme {} at lambda = {}, {} probe points\n",
            self.potential,
            self.dim,
            self.scheme.kind.as_str(),
            self.scheme.lambda,
            self.n_points
        );
        for c in &self.checks {
            s.push_str(&format!("[{}] {}: {}\n", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail));
        }
        s.push_str(&format!(
            "step size: computable bound {:.6e} (M = {:.6}, mu = {:.6}, C* = {:.6}), effective {:.6e}\n",
            self.step_size.computable_bound, self.step_size.m, self.step_size.mu, self.step_size.c_star, self.effective_bound
        ));
        for t in &self.step_size.omitted_terms {
            s.push_str(&format!("  omitted term: {t}\n"));
        }
        for w in &self.warnings {
            s.push_str(&format!("warning: {w}\n"));
        }
        s
    }
}

fn margin_check(name: &str, m: &MarginReport) -> Check {
    Check {
        name: name.into(),
        passed: m.holds(),
        detail: format!("min margin {:.6e} at {}, {} violations", m.min_margin, short(&m.argmin), m.violations),
    }
}

fn short(x: &[f64]) -> String {
    if x.len() <= 4 {
        format!("{x:?}")
    } else {
        format!("[{:.4}, {:.4}, … ({} coords)]", x[0], x[1], x.len())
    }
}

/// Assumption margins, lemma probes and the step-size bound. Never fails on a
/// violated check; only unresolvable names are errors.
pub fn validate(config: &ExperimentConfig) -> Result<ValidateReport> {
    let started = Instant::now();
    let spec = config.spec()?;
    let scheme = config.scheme();
    let points = uniform_box(spec.dim(), config.probe_half_width, config.probe_points, config.seed);
    let dissipativity = validate_dissipativity(&spec, &points);
    let growth = validate_growth(&spec, &points);
    let probes = lemma_probe_suite(&spec, &scheme, &points);
    let step_size = compute_step_size_bound(&spec);
    let effective_bound = step_size.effective(config.step_bound_override);
    let mut checks = vec![margin_check("dissipativity", &dissipativity), margin_check("growth", &growth)];
    checks.push(match scheme.resolve(&spec) {
        Ok(_) => Check { name: "scheme admissible".into(), passed: true, detail: "ok".into() },
        Err(e) => Check { name: "scheme admissible".into(), passed: false, detail: e.to_string() },
    });
    for r in &probes.results {
        checks.push(Check {
            name: format!("probe {}", serde_json::to_value(r.inequality)?.as_str().unwrap_or("?")),
            passed: r.violations == 0,
            detail: format!("worst slack {:.6e} at {}, {} violations", r.worst_slack, short(&r.argmin), r.violations),
        });
    }
    let mut warnings = Vec::new();
    if scheme.lambda >= effective_bound {
        warnings.push(format!(
            "lambda = {} is not below the step-size bound {effective_bound:.6e}; the bound is sufficient, not necessary",
            scheme.lambda
        ));
    }
    let report = ValidateReport {
        potential: spec.name().to_string(),
        dim: spec.dim(),
        scheme,
        n_points: points.len(),
        dissipativity,
        growth,
        probes,
        step_size,
        effective_bound,
        warnings,
        checks,
    };
    if config.emits(EmitKind::Json) {
        emit::write(&config.out, "validate.json", &emit::to_json(&report)?)?;
        write_meta(&config.out, "validate.meta.json", "validate", started)?;
    }
    Ok(report)
}

// ---------------------------------------------------------------- oracle

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub potential: String,
    pub dim: usize,
    pub method: &'static str,
    /// `E[X_1²]`.
    pub m2: f64,
    pub wall_time_s: f64,
}

pub fn oracle(config: &ExperimentConfig) -> Result<OracleReport> {
    let started = Instant::now();
    let spec = config.spec()?;
    let m2 = oracle_m2(&spec)?;
    let report = OracleReport {
        potential: spec.name().to_string(),
        dim: spec.dim(),
        method: if spec.is_radial() { "radial" } else { "1d" },
        m2,
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    if config.emits(EmitKind::Json) {
        let mut v = serde_json::to_value(&report)?;
        v.as_object_mut().expect("object").remove("wall_time_s");
        emit::write(&config.out, "oracle.json", &emit::to_json(&v)?)?;
        write_meta(&config.out, "oracle.meta.json", "oracle", started)?;
    }
    Ok(report)
}

// ----------------------------------------------------- demo-divergence

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceReport {
    pub lambda: f64,
    pub n_chains: usize,
    pub n_steps: u64,
    pub seed: u64,
    /// `Ê[X_n²] − Ê[X_0²]` on the censored trajectory.
    pub increment: f64,
    /// Half the theoretical `2λn` growth.
    pub increment_threshold: f64,
    pub decreasing_fraction: f64,
    /// Same statistic when exploded chains are dropped instead of frozen.
    pub survivors_decreasing_fraction: f64,
    pub final_exploded_fraction: f64,
    pub trajectory: DivergenceTrajectory,
}

pub fn demo_divergence(config: &ExperimentConfig) -> Result<DivergenceReport> {
    let started = Instant::now();
    let traj = ula_divergence_demo(config.lambda, config.n_chains, config.n_iters, config.seed)?;
    let n = config.n_iters;
    let c = &traj.censored_m2;
    let report = DivergenceReport {
        lambda: config.lambda,
        n_chains: config.n_chains,
        n_steps: n,
        seed: config.seed,
        increment: c[c.len() - 1] - c[0],
        increment_threshold: config.lambda * n as f64,
        decreasing_fraction: decreasing_fraction(c),
        survivors_decreasing_fraction: decreasing_fraction(&traj.survivors_m2),
        final_exploded_fraction: *traj.exploded_fraction.last().expect("non-empty"),
        trajectory: traj,
    };
    if config.emits(EmitKind::Csv) {
        let t = &report.trajectory;
        let mut s = format!("{}\nstep,survivors_m2,survivors_se,censored_m2,exploded_fraction\n", config.header());
        for k in 0..t.censored_m2.len() {
            s.push_str(&format!(
                "{k},{:?},{:?},{:?},{:?}\n",
                t.survivors_m2[k], t.survivors_se[k], t.censored_m2[k], t.exploded_fraction[k]
            ));
        }
        emit::write(&config.out, "divergence.csv", &s)?;
    }
    if config.emits(EmitKind::Json) {
        emit::write(&config.out, "divergence.json", &emit::to_json(&report)?)?;
        write_meta(&config.out, "divergence.meta.json", "demo-divergence", started)?;
    }
    Ok(report)
}

//! Flat key-value experiment configs and the named presets.
//!
//! Values are layered: preset defaults, then keys from the config file, then
//! command-line flags. The merged table is deserialized once, so unknown keys
//! are rejected wherever they come from.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{self, AssumptionConstants, PotentialSpec};
use crate::sampler::{Init, RunConfig, DEFAULT_EXPLOSION_THRESHOLD};
use crate::taming::{DriftScheme, SchemeKind};

/// Marker opening the reproducibility header of emitted CSVs.
pub const HEADER_PREFIX: &str = "# tamed-langevin config=";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    /// `init_first · e₁ + init_fill · (0, 1, …, 1)`.
    Constant,
    /// Gaussian around the constant point with variance `init_variance`.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmitKind {
    Csv,
    Json,
    Svg,
}

impl EmitKind {
    pub fn parse_list(s: &str) -> Result<Vec<EmitKind>> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let kind = match item {
                "csv" => EmitKind::Csv,
                "json" => EmitKind::Json,
                "svg" => EmitKind::Svg,
                other => return Err(Error::Usage(format!("unknown emit kind {other:?}; expected csv, json or svg"))),
            };
            if !out.contains(&kind) {
                out.push(kind);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub potential: String,
    pub dim: usize,
    pub scheme: SchemeKind,
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reg_r: Option<f64>,
    /// Benchmark grid.
    pub schemes: Vec<SchemeKind>,
    pub lambdas: Vec<f64>,
    pub n_runs: usize,

    pub n_chains: usize,
    pub n_iters: u64,
    /// Defaults to `n_iters / 2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<u64>,
    pub thinning: u64,
    pub init: InitKind,
    pub init_first: f64,
    pub init_fill: f64,
    pub init_variance: f64,
    pub seed: u64,
    pub explosion_threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_every: Option<u64>,
    pub store_samples: bool,

    pub out: PathBuf,
    pub emit: Vec<EmitKind>,

    /// Probe cloud for `validate`.
    pub probe_points: usize,
    pub probe_half_width: f64,
    /// User value replacing the computable step-size bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_bound_override: Option<f64>,

    // assumption-constant overrides
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diss_coef: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diss_exp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diss_offset: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_coef: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_exp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lip_coef: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lip_exp: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            potential: "double_well_radial".into(),
            dim: 2,
            scheme: SchemeKind::WdTula,
            lambda: 0.01,
            reg_r: None,
            schemes: vec![SchemeKind::WdTula, SchemeKind::TulaClassic],
            lambdas: vec![0.1, 0.01, 0.001],
            n_runs: 1,
            n_chains: 100,
            n_iters: 10_000,
            burn_in: None,
            thinning: 1,
            init: InitKind::Constant,
            init_first: 0.0,
            init_fill: 0.0,
            init_variance: 1.0,
            seed: 0,
            explosion_threshold: DEFAULT_EXPLOSION_THRESHOLD,
            record_every: None,
            store_samples: true,
            out: PathBuf::from("out"),
            emit: vec![EmitKind::Csv, EmitKind::Json],
            probe_points: 10_000,
            probe_half_width: 10.0,
            step_bound_override: None,
            diss_coef: None,
            diss_exp: None,
            diss_offset: None,
            growth_coef: None,
            growth_exp: None,
            lip_coef: None,
            lip_exp: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Double well in d = 100 from `200·e₁`, wd-TULA against classic TULA.
    PaperBenchmark,
    /// Vanilla ULA on the same setup.
    UlaExplodes,
    /// ULA on `x³/3` from `N(0, 4/λ)`.
    DivergenceDemo,
}

impl Preset {
    pub const NAMES: [&'static str; 3] = ["paper-benchmark", "ula-explodes", "divergence-demo"];

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "paper-benchmark" => Ok(Preset::PaperBenchmark),
            "ula-explodes" => Ok(Preset::UlaExplodes),
            "divergence-demo" => Ok(Preset::DivergenceDemo),
            other => Err(Error::Usage(format!("unknown preset {other:?}; expected one of {:?}", Self::NAMES))),
        }
    }

    pub fn config(self) -> ExperimentConfig {
        let base = ExperimentConfig::default();
        match self {
            Preset::PaperBenchmark => ExperimentConfig {
                potential: "double_well_radial".into(),
                dim: 100,
                scheme: SchemeKind::WdTula,
                lambda: 0.001,
                n_runs: 20,
                n_chains: 1000,
                n_iters: 100_000,
                burn_in: Some(50_000),
                init_first: 200.0,
                store_samples: false,
                out: "out/paper-benchmark".into(),
                emit: vec![EmitKind::Csv, EmitKind::Json, EmitKind::Svg],
                ..base
            },
            Preset::UlaExplodes => ExperimentConfig {
                potential: "double_well_radial".into(),
                dim: 100,
                scheme: SchemeKind::Ula,
                lambda: 0.1,
                n_chains: 1000,
                n_iters: 10_000,
                init_first: 200.0,
                store_samples: false,
                out: "out/ula-explodes".into(),
                ..base
            },
            Preset::DivergenceDemo => ExperimentConfig {
                potential: "cubic_demo".into(),
                dim: 1,
                scheme: SchemeKind::Ula,
                lambda: 0.01,
                n_chains: 100_000,
                n_iters: 100,
                init: InitKind::Gaussian,
                init_variance: 400.0,
                store_samples: false,
                out: "out/divergence-demo".into(),
                ..base
            },
        }
    }
}

/// Builds configs by layering tables over a base.
#[derive(Debug, Clone)]
pub struct ConfigBuilder {
    table: toml::Table,
}

impl ConfigBuilder {
    pub fn new(base: &ExperimentConfig) -> Self {
        let table = toml::Table::try_from(base).expect("config serializes to a table");
        Self { table }
    }

    pub fn from_preset(preset: Option<&str>) -> Result<Self> {
        let base = match preset {
            Some(name) => Preset::parse(name)?.config(),
            None => ExperimentConfig::default(),
        };
        Ok(Self::new(&base))
    }

    /// Overlays the keys of a config file. Accepts either a flat TOML file or
    /// a CSV emitted by this crate, whose header carries the full config.
    pub fn file(mut self, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let table = parse_config_text(&text).map_err(|e| match e {
            Error::Usage(msg) => Error::Usage(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        self.table.extend(table);
        Ok(self)
    }

    pub fn set(mut self, key: &str, value: impl Into<toml::Value>) -> Self {
        self.table.insert(key.to_string(), value.into());
        self
    }

    pub fn build(self) -> Result<ExperimentConfig> {
        let config: ExperimentConfig = self.table.try_into().map_err(|e: toml::de::Error| Error::config(e.message().to_string()))?;
        config.check()?;
        Ok(config)
    }
}

/// Parses a config file body into a table; empty input is a usage error.
pub fn parse_config_text(text: &str) -> Result<toml::Table> {
    if let Some(json) = text.lines().next().and_then(|l| l.strip_prefix(HEADER_PREFIX)) {
        let config: ExperimentConfig = serde_json::from_str(json)
            .map_err(|e| Error::Usage(format!("malformed reproducibility header: {e}")))?;
        return Ok(toml::Table::try_from(&config).expect("config serializes to a table"));
    }
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Usage(format!("invalid config syntax: {}", e.message())))?;
    if table.is_empty() {
        return Err(Error::Usage("config file is empty".into()));
    }
    Ok(table)
}

impl ExperimentConfig {
    fn check(&self) -> Result<()> {
        if self.n_runs == 0 {
            return Err(Error::config("n_runs must be positive"));
        }
        if self.schemes.is_empty() || self.lambdas.is_empty() {
            return Err(Error::config("benchmark grid needs at least one scheme and one lambda"));
        }
        if !(self.init_variance >= 0.0) {
            return Err(Error::config("init_variance must be >= 0"));
        }
        self.spec()?;
        Ok(())
    }

    /// The catalog potential with any constant overrides applied.
    pub fn spec(&self) -> Result<PotentialSpec> {
        let spec = potentials::by_name(&self.potential, self.dim)?;
        let c = spec.constants;
        let over = |o: Option<f64>, v: f64| o.unwrap_or(v);
        let constants = AssumptionConstants {
            diss_coef: over(self.diss_coef, c.diss_coef),
            diss_exp: over(self.diss_exp, c.diss_exp),
            diss_offset: over(self.diss_offset, c.diss_offset),
            growth_coef: over(self.growth_coef, c.growth_coef),
            growth_exp: over(self.growth_exp, c.growth_exp),
            lip_coef: over(self.lip_coef, c.lip_coef),
            lip_exp: over(self.lip_exp, c.lip_exp),
            ..c
        };
        if constants == c {
            Ok(spec)
        } else {
            spec.with_constants(constants)
        }
    }

    pub fn drift_scheme(&self, kind: SchemeKind, lambda: f64) -> DriftScheme {
        DriftScheme { kind, lambda, reg_r: if kind == SchemeKind::RegTula { self.reg_r } else { None } }
    }

    pub fn scheme(&self) -> DriftScheme {
        self.drift_scheme(self.scheme, self.lambda)
    }

    pub fn initial(&self, dim: usize) -> Init {
        let mut point = vec![self.init_fill; dim];
        point[0] = self.init_first;
        match self.init {
            InitKind::Constant => Init::Constant { value: point },
            InitKind::Gaussian => Init::Gaussian { mean: point, variance: self.init_variance },
        }
    }

    pub fn run_config(&self, lambda: f64, seed: u64) -> Result<RunConfig> {
        let dim = self.spec()?.dim();
        let mut rc = RunConfig::new(self.n_chains, self.n_iters, lambda, self.initial(dim), seed);
        if let Some(b) = self.burn_in {
            rc.burn_in = b;
        }
        rc.thinning = self.thinning;
        rc.explosion_threshold = self.explosion_threshold;
        rc.record_every = self.record_every;
        rc.store_samples = self.store_samples;
        Ok(rc)
    }

    pub fn emits(&self, kind: EmitKind) -> bool {
        self.emit.contains(&kind)
    }

    /// The reproducibility header line (without trailing newline). `emit`
    /// only selects views, so it is left out and the CSV bytes do not depend
    /// on it.
    pub fn header(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        v.as_object_mut().expect("object").remove("emit");
        format!("{HEADER_PREFIX}{v}")
    }
}

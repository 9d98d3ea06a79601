//! Argument parsing and exit codes for the `tula` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::harness::config::{ConfigBuilder, EmitKind, ExperimentConfig};
use crate::harness::{benchmark, demo_divergence, oracle, sample, validate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_EXPLODED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "tula", version, about = "Tamed unadjusted Langevin sampling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scheme and write samples, moments and a report.
    Sample(Common),
    /// Seeded runs per (scheme, lambda) cell, summarized as boxplots.
    Benchmark(Common),
    /// Assumption margins, lemma probes and the step-size bound.
    Validate(Common),
    /// Quadrature ground truth for E[X_1^2].
    Oracle(Common),
    /// ULA on x^3/3 from N(0, 4/lambda): the second moment blows up.
    DemoDivergence(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Flat TOML config, or a CSV emitted by an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// paper-benchmark, ula-explodes or divergence-demo.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of csv,json,svg.
    #[arg(long)]
    emit: Option<String>,
    #[arg(long)]
    potential: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    n_chains: Option<usize>,
    #[arg(long)]
    n_iters: Option<u64>,
    #[arg(long)]
    burn_in: Option<u64>,
    #[arg(long)]
    n_runs: Option<usize>,
    /// Replaces the computable step-size bound.
    #[arg(long)]
    step_bound: Option<f64>,
}

impl Common {
    fn resolve(&self) -> crate::Result<ExperimentConfig> {
        self.resolve_with(None)
    }

    /// `default_preset` applies when `--preset` is absent.
    fn resolve_with(&self, default_preset: Option<&str>) -> crate::Result<ExperimentConfig> {
        let mut b = ConfigBuilder::from_preset(self.preset.as_deref().or(default_preset))?;
        if let Some(path) = &self.config {
            b = b.file(path)?;
        }
        if let Some(v) = self.lambda {
            b = b.set("lambda", v);
        }
        if let Some(v) = self.seed {
            let v = i64::try_from(v).map_err(|_| Error::Usage(format!("seed {v} exceeds {}", i64::MAX)))?;
            b = b.set("seed", v);
        }
        if let Some(v) = &self.out {
            b = b.set("out", v.display().to_string());
        }
        if let Some(v) = &self.emit {
            let kinds = EmitKind::parse_list(v)?;
            let names: Vec<toml::Value> = kinds
                .iter()
                .map(|k| toml::Value::String(serde_json::to_value(k).expect("enum").as_str().expect("str").into()))
                .collect();
            b = b.set("emit", names);
        }
        if let Some(v) = &self.potential {
            b = b.set("potential", v.as_str());
        }
        if let Some(v) = self.dim {
            b = b.set("dim", v as i64);
        }
        if let Some(v) = &self.scheme {
            b = b.set("scheme", v.as_str());
        }
        if let Some(v) = self.n_chains {
            b = b.set("n_chains", v as i64);
        }
        if let Some(v) = self.n_iters {
            b = b.set("n_iters", v as i64);
        }
        if let Some(v) = self.burn_in {
            b = b.set("burn_in", v as i64);
        }
        if let Some(v) = self.n_runs {
            b = b.set("n_runs", v as i64);
        }
        if let Some(v) = self.step_bound {
            b = b.set("step_bound_override", v);
        }
        b.build()
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Usage(_) => EXIT_USAGE,
        Error::AllExploded(_) => EXIT_EXPLODED,
        _ => EXIT_CONFIG,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::AllExploded(r) = &e {
                eprintln!(
                    "explosion steps: first {:?}, median {:?}, last {:?}",
                    r.first_step, r.median_step, r.last_step
                );
            }
            exit_code(&e)
        }
    }
}

fn execute(command: Command) -> crate::Result<()> {
    match command {
        Command::Sample(c) => {
            let config = c.resolve()?;
            let r = sample(&config)?.report;
            println!("potential {} (d = {}), scheme {} at lambda = {}", r.potential, r.dim, r.scheme.kind.as_str(), r.scheme.lambda);
            println!("E[X_1^2] = {:.6} +/- {:.6}", r.first_coordinate_m2.value, r.first_coordinate_m2.se);
            if let (Some(o), Some(e)) = (r.oracle_m2, r.abs_error) {
                println!("oracle   = {o:.6}, |error| = {e:.6}");
            }
            println!("exploded chains: {}/{}", r.explosions.n_exploded, r.explosions.n_chains);
            if let Some(w) = r.step_size_warning {
                eprintln!("warning: {w}");
            }
        }
        Command::Benchmark(c) => {
            let config = c.resolve()?;
            let r = benchmark(&config, |label, k, v| eprintln!("{label} run {k}: E[X_1^2] = {v:.6}"))?;
            if let Some(o) = r.oracle_m2 {
                println!("oracle E[X_1^2] = {o:.6}");
            }
            println!("{:<20} {:>10} {:>10} {:>10} {:>12}", "cell", "q1", "median", "q3", "|med-oracle|");
            for cell in &r.cells {
                match &cell.stats {
                    Some(s) => println!(
                        "{:<20} {:>10.5} {:>10.5} {:>10.5} {:>12}",
                        cell.label,
                        s.q1,
                        s.median,
                        s.q3,
                        cell.median_abs_error.map_or("-".into(), |e| format!("{e:.5}"))
                    ),
                    None => println!("{:<20} all runs exploded", cell.label),
                }
            }
        }
        Command::Validate(c) => {
            let config = c.resolve()?;
            print!("{}", validate(&config)?.render());
        }
        Command::Oracle(c) => {
            let config = c.resolve()?;
            let r = oracle(&config)?;
            println!("{} (d = {}, {} quadrature): E[X_1^2] = {:.9}", r.potential, r.dim, r.method, r.m2);
        }
        Command::DemoDivergence(c) => {
            let config = c.resolve_with(Some("divergence-demo"))?;
            let r = demo_divergence(&config)?;
            println!(
                "ULA on x^3/3, lambda = {}, {} chains, {} steps",
                r.lambda, r.n_chains, r.n_steps
            );
            println!("increment E[X_n^2] - E[X_0^2] = {:.6e} (threshold {:.4})", r.increment, r.increment_threshold);
            println!("decreasing increments: {:.1}%", 100.0 * r.decreasing_fraction);
            println!("exploded fraction at the end: {:.4}", r.final_exploded_fraction);
        }
    }
    Ok(())
}

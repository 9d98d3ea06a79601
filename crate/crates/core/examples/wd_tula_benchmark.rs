//! Boxplots of `Ê[X_1²]` for wd-TULA and classic TULA on the d = 100 double
//! well, at a reduced scale. Pass `full` for the desk-scale preset
//! (hours on one core).
//!
//! `cargo run --release --example wd_tula_benchmark -- [full]`

use tamed_langevin::harness::{benchmark, EmitKind, ExperimentConfig, Preset};

fn main() -> tamed_langevin::Result<()> {
    let full = std::env::args().any(|a| a == "full");
    let preset = Preset::PaperBenchmark.config();
    let config = if full {
        preset
    } else {
        ExperimentConfig {
            n_runs: 5,
            n_chains: 100,
            n_iters: 20_000,
            burn_in: Some(10_000),
            out: "out/wd_tula_benchmark".into(),
            emit: vec![EmitKind::Csv, EmitKind::Json, EmitKind::Svg],
            ..preset
        }
    };
    let report = benchmark(&config, |label, k, v| eprintln!("{label} run {k}: {v:.5}"))?;
    println!("oracle {:.6}", report.oracle_m2.unwrap_or(f64::NAN));
    for c in &report.cells {
        if let Some(s) = &c.stats {
            println!("{:<16} median {:.5}  IQR [{:.5}, {:.5}]", c.label, s.median, s.q1, s.q3);
        }
    }
    println!("artifacts in {}", config.out.display());
    Ok(())
}

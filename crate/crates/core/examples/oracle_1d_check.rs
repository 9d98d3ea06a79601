//! wd-TULA and reg-TULA on the 1D double well against the quadrature oracle:
//! second moment, histogram TV and quantile W1.

use tamed_langevin::diagnostics::{moment_1d, tv_distance_1d, w1_distance_1d};
use tamed_langevin::potentials::double_well_1d;
use tamed_langevin::{run, DriftScheme, Init, RunConfig};

fn main() -> tamed_langevin::Result<()> {
    let u = |x: f64| x.powi(4) / 4.0 - x * x / 2.0;
    let oracle = moment_1d(u, 2)?;
    println!("oracle E[x^2] = {oracle:.6}");
    let spec = double_well_1d();
    for lambda in [1e-1, 1e-2, 1e-3] {
        for scheme in [DriftScheme::wd_tula(lambda), DriftScheme::reg_tula(lambda, None)] {
            let mut config = RunConfig::new(2_000, 10_000, lambda, Init::centered_gaussian(1, 1.0), 5);
            config.thinning = 10;
            let out = run(&spec, &scheme, &config)?;
            let (m2, se) = out.streaming.coordinate_m2(0);
            let xs = out.archive.first_coordinates();
            println!(
                "{:<8} lambda = {lambda:<6} E[x^2] = {m2:.4} +/- {se:.4} ({:+.1} SE)  TV = {:.4}  W1 = {:.4}",
                out.scheme.kind.as_str(),
                (m2 - oracle) / se,
                tv_distance_1d(&xs, u, 50)?,
                w1_distance_1d(&xs, u)?
            );
        }
    }
    Ok(())
}

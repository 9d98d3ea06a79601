//! ULA and wd-TULA from `200·e₁` on the double well in d = 100.

use tamed_langevin::potentials::double_well_radial;
use tamed_langevin::{run, DriftScheme, Error, Init, RunConfig};

fn main() -> tamed_langevin::Result<()> {
    let spec = double_well_radial(100)?;
    for lambda in [0.1, 0.01] {
        let mut config = RunConfig::new(200, 10_000, lambda, Init::first_coordinate(100, 200.0), 7);
        config.store_samples = false;
        match run(&spec, &DriftScheme::ula(lambda), &config) {
            Err(Error::AllExploded(r)) => println!(
                "ula     lambda = {lambda}: {}/{} chains exploded, steps {:?}..{:?}",
                r.n_exploded, r.n_chains, r.first_step, r.last_step
            ),
            Ok(out) => println!("ula     lambda = {lambda}: {} exploded", out.explosions.n_exploded),
            Err(e) => return Err(e),
        }
        config.n_iters = 2_000;
        config.burn_in = 1_000;
        let out = run(&spec, &DriftScheme::wd_tula(lambda), &config)?;
        let (m2, se) = out.streaming.coordinate_m2(0);
        println!(
            "wd_tula lambda = {lambda}: {} exploded, E[X_1^2] = {m2:.4} +/- {se:.4} after 2000 steps",
            out.explosions.n_exploded
        );
    }
    Ok(())
}

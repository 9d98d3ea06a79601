//! A user-defined target: an anisotropic quartic `u(x) = Σ c_i x_i⁴/4 + |x|²/2`.
//! Constants are checked on a probe cloud before sampling.

use tamed_langevin::points::{log_radial, uniform_ball};
use tamed_langevin::potentials::{finite_difference_gradient, validate_dissipativity, validate_growth};
use tamed_langevin::{run, AssumptionConstants, DriftScheme, Init, PotentialSpec, RunConfig};

const C: [f64; 3] = [0.5, 1.0, 2.0];

fn main() -> tamed_langevin::Result<()> {
    let constants = AssumptionConstants {
        diss_coef: 1.0,
        diss_exp: 2.0,
        diss_offset: 0.0,
        // |h| ≤ |x| + 2|x|³ ≤ 3(1 + |x|³)
        growth_coef: 3.0,
        growth_exp: 1.5,
        lip_coef: 6.0,
        lip_exp: 2.0,
        hessian_lb: Some(1.0),
        dissipative: true,
    };
    let spec = PotentialSpec::new(
        "aniso_quartic",
        3,
        |x| x.iter().zip(C).map(|(v, c)| c * v.powi(4) / 4.0 + v * v / 2.0).sum(),
        |x, out| {
            for ((o, v), c) in out.iter_mut().zip(x).zip(C) {
                *o = c * v.powi(3) + v;
            }
        },
        constants,
    )?;

    let x = [0.3, -1.1, 0.7];
    println!("gradient {:?}", spec.gradient(&x)?);
    println!("finite differences {:?}", finite_difference_gradient(&spec, &x, 1e-5)?);

    let mut points = uniform_ball(3, 20.0, 5_000, 1);
    points.extend(log_radial(3, 1e-4, 1e4, 5_000, 2));
    let diss = validate_dissipativity(&spec, &points);
    let growth = validate_growth(&spec, &points);
    println!("dissipativity margin {:.3e} ({} violations)", diss.min_margin, diss.violations);
    println!("growth margin {:.3e} ({} violations)", growth.min_margin, growth.violations);

    let config = RunConfig::new(500, 20_000, 0.01, Init::first_coordinate(3, 50.0), 3);
    let out = run(&spec, &DriftScheme::wd_tula(0.01), &config)?;
    for i in 0..3 {
        let (m, se) = out.streaming.coordinate_m2(i);
        println!("E[X_{}^2] = {m:.4} +/- {se:.4}", i + 1);
    }
    Ok(())
}

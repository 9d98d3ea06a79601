//! Vanilla ULA on `u(x) = x³/3` started from `N(0, 4/λ)`: the second moment
//! grows without bound.

use tamed_langevin::diagnostics::decreasing_fraction;
use tamed_langevin::sampler::ula_divergence_demo;

fn main() -> tamed_langevin::Result<()> {
    let lambda = 0.01;
    let t = ula_divergence_demo(lambda, 100_000, 100, 1)?;
    for n in [0, 1, 2, 5, 10, 20, 50, 100] {
        println!(
            "n = {n:>3}  E[X^2] >= {:>12.5e}  survivors {:>12.5e}  exploded {:.4}",
            t.censored_m2[n], t.survivors_m2[n], t.exploded_fraction[n]
        );
    }
    println!("increment {:.3e} vs 100*lambda = {}", t.censored_m2[100] - t.censored_m2[0], 100.0 * lambda);
    println!(
        "decreasing increments: {:.1}% with exploded chains frozen, {:.1}% over survivors only",
        100.0 * decreasing_fraction(&t.censored_m2),
        100.0 * decreasing_fraction(&t.survivors_m2)
    );
    Ok(())
}

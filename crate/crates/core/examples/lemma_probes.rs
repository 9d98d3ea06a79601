//! Pointwise checks of the tamed-drift bounds, plus a corrupted constant
//! that the probe must catch.

use tamed_langevin::diagnostics::{lemma_probe_suite, lemma_probe_suite_with, LemmaBounds};
use tamed_langevin::points::uniform_box;
use tamed_langevin::potentials::{double_well_1d, double_well_radial, gaussian};
use tamed_langevin::DriftScheme;

fn main() -> tamed_langevin::Result<()> {
    let specs = [gaussian(3)?, double_well_radial(2)?, double_well_1d()];
    for spec in &specs {
        let points = uniform_box(spec.dim(), 10.0, 10_000, 11);
        for lambda in [1e-1, 1e-2, 1e-3] {
            for scheme in [DriftScheme::wd_tula(lambda), DriftScheme::reg_tula(lambda, None)] {
                let r = lemma_probe_suite(spec, &scheme, &points);
                let worst: Vec<String> = r
                    .results
                    .iter()
                    .map(|x| format!("{:?} {:.3e}", x.inequality, x.worst_slack))
                    .collect();
                println!(
                    "{:<18} {:<8} lambda = {lambda:<6} violations = {}  [{}]",
                    spec.name(),
                    scheme.kind.as_str(),
                    r.total_violations(),
                    worst.join(", ")
                );
            }
        }
    }

    let spec = double_well_radial(2)?;
    let points = uniform_box(2, 10.0, 10_000, 12);
    let mut bounds = LemmaBounds::derive(&spec, 0.01);
    bounds.lower_coef = 2.0 * spec.constants.diss_coef;
    let r = lemma_probe_suite_with(&spec, &DriftScheme::wd_tula(0.01), &points, &bounds);
    let lower = &r.results[0];
    println!(
        "negative control: {} violations, worst slack {:.3} at {:?}",
        lower.violations, lower.worst_slack, lower.argmin
    );
    Ok(())
}

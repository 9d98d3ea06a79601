//! Computable step-size bound and the reg-TULA exponent for the catalog.

use tamed_langevin::potentials::{double_well_radial, gaussian};
use tamed_langevin::taming::{compute_step_size_bound, select_reg_exponent};

fn main() -> tamed_langevin::Result<()> {
    for spec in [gaussian(1)?, double_well_radial(1)?, double_well_radial(100)?] {
        let b = compute_step_size_bound(&spec);
        println!(
            "{:<20} d = {:<4} M = {:>9.5} mu = {:>9.4} C* = {:.3} bound = {:.4e}",
            spec.name(),
            spec.dim(),
            b.m,
            b.mu,
            b.c_star,
            b.computable_bound
        );
        let c = spec.constants;
        let r = select_reg_exponent(c.growth_exp, c.lip_exp)?;
        println!("{:<20} reg-TULA exponent r = {} (c_lr = {:.3}, c_l'r = {:.3})", "", r.r, r.c_lr, r.c_lpr);
        if let Some(w) = b.warning(0.01) {
            println!("{:<20} {w}", "");
        }
    }
    let b = compute_step_size_bound(&gaussian(1)?);
    println!("not computed:");
    for t in &b.omitted_terms {
        println!("  {t}");
    }
    Ok(())
}

//! Quadrature ground truth for the radial double well.
//!
//! `cargo run --release --example oracle -- 100`

use std::time::Instant;

use tamed_langevin::diagnostics::{moment_1d, radial_second_moment};

fn main() -> tamed_langevin::Result<()> {
    let d: usize = std::env::args().nth(1).map_or(100, |s| s.parse().expect("dimension"));
    let t = Instant::now();
    let m2 = radial_second_moment(d, |r| r * r / 2.0 - r.powi(4) / 4.0)?;
    println!("d = {d}: E[X_1^2] = {m2:.9} ({:.1} ms)", t.elapsed().as_secs_f64() * 1e3);

    let m1d = moment_1d(|x| x.powi(4) / 4.0 - x * x / 2.0, 2)?;
    println!("1D double well: E[x^2] = {m1d:.12}");
    Ok(())
}

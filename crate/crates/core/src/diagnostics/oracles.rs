//! Quadrature ground truth for radial and one-dimensional targets.
//!
//! Integrands are evaluated as `exp(ℓ(r) − ℓ_max)` where `ℓ` is the log of
//! the unnormalized integrand and `ℓ_max` its peak, so factors such as
//! `r^{99}` never overflow.

use crate::diagnostics::quadrature::{gk15, integrate};
use crate::error::{Error, Result};

/// Log-integrand drop (relative to the peak) at which tails are truncated;
/// `e^{-40} < 1e-17`.
const TAIL_DROP: f64 = 40.0;
const REL_TOL: f64 = 1e-12;
const ACCEPT_REL_ERR: f64 = 1e-10;
const MAX_INTERVALS: usize = 20_000;

/// Geometric grid of radii used to locate peaks and tails.
fn radial_grid() -> impl Iterator<Item = f64> {
    (0..=3600).map(|k| 10f64.powf(-8.0 + 16.0 * k as f64 / 3600.0))
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    for _ in 0..200 {
        if f(c) >= f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Peak and truncation radius of a log-integrand on `(0, ∞)`.
fn radial_support<F: Fn(f64) -> f64>(log_f: &F) -> Result<(f64, f64, f64)> {
    let grid: Vec<f64> = radial_grid().collect();
    let vals: Vec<f64> = grid.iter().map(|&r| log_f(r)).collect();
    let (imax, _) = vals
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Integrability("log-integrand is NaN everywhere".into()))?;
    if !vals[imax].is_finite() {
        return Err(Error::Integrability("log-integrand is not finite at its peak".into()));
    }
    let lo = grid[imax.saturating_sub(1)];
    let hi = grid[(imax + 1).min(grid.len() - 1)];
    let r_peak = golden_max(log_f, lo, hi);
    let peak = log_f(r_peak).max(vals[imax]);
    // first grid point past the peak from which the integrand stays negligible
    let cut = (imax..grid.len())
        .rev()
        .take_while(|&i| vals[i] - peak < -TAIL_DROP)
        .last()
        .filter(|&i| i < grid.len() - 1)
        .ok_or_else(|| {
            Error::Integrability(format!(
                "integrand does not decay below e^-{TAIL_DROP} of its peak by r = {:e}",
                grid[grid.len() - 1]
            ))
        })?;
    Ok((r_peak, peak, grid[cut]))
}

/// `E[X_i²] = d⁻¹ ∫ r² ν(r) dr / ∫ ν(r) dr` for the rotation-invariant density
/// with radial profile `ν(r) = r^{d−1} exp(radial_exponent(r))`.
pub fn radial_second_moment<E: Fn(f64) -> f64>(d: usize, radial_exponent: E) -> Result<f64> {
    if d == 0 {
        return Err(Error::config("dimension must be positive"));
    }
    let k = (d - 1) as f64;
    let log_nu = |r: f64| if d == 1 { radial_exponent(r) } else { k * r.ln() + radial_exponent(r) };
    // the r² moment decays slowest, so it sets the truncation radius
    let log_r2_nu = |r: f64| 2.0 * r.ln() + log_nu(r);
    let (r_peak, peak, _) = radial_support(&log_nu)?;
    let (_, peak2, r_max) = radial_support(&log_r2_nu)?;
    let shift = peak.max(peak2);
    let density = |r: f64| if r <= 0.0 && d > 1 { 0.0 } else { (log_nu(r) - shift).exp() };
    let breaks = [0.0, r_peak, r_max];
    let z = integrate(&density, &breaks, 0.0, REL_TOL, MAX_INTERVALS);
    let m2 = integrate(&|r: f64| r * r * density(r), &breaks, 0.0, REL_TOL, MAX_INTERVALS);
    for q in [z, m2] {
        if !(q.value > 0.0) || q.abs_err > ACCEPT_REL_ERR * q.value {
            return Err(Error::Integrability(format!(
                "quadrature did not reach relative accuracy {ACCEPT_REL_ERR:e}: {q:?}"
            )));
        }
    }
    Ok(m2.value / z.value / d as f64)
}

/// Number of cells in the tabulated distribution function.
const CDF_CELLS: usize = 2048;

/// A one-dimensional density `π ∝ exp(−u)` tabulated for quadrature-backed
/// moments, masses and quantiles.
pub struct Density1d<U> {
    u: U,
    shift: f64,
    mode: f64,
    lo: f64,
    hi: f64,
    z: f64,
    cum: Vec<f64>,
}

impl<U: Fn(f64) -> f64> Density1d<U> {
    pub fn new(u: U) -> Result<Self> {
        let log_f = |x: f64| -u(x);
        // signed geometric grid plus the origin
        let mut grid: Vec<f64> = radial_grid().map(|r| -r).collect();
        grid.reverse();
        grid.push(0.0);
        grid.extend(radial_grid());
        let vals: Vec<f64> = grid.iter().map(|&x| log_f(x)).collect();
        let (imax, _) = vals
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_nan())
            .max_by(|a, b| a.1.total_cmp(b.1))
            .ok_or_else(|| Error::Integrability("potential is NaN everywhere".into()))?;
        if !vals[imax].is_finite() {
            return Err(Error::Integrability("density is not finite at its mode".into()));
        }
        let mode = golden_max(&log_f, grid[imax.saturating_sub(1)], grid[(imax + 1).min(grid.len() - 1)]);
        let shift = log_f(mode).max(vals[imax]);
        // x^8 weighting keeps the cut valid for the moments used here
        let negligible = |i: usize| vals[i] + 8.0 * grid[i].abs().max(1.0).ln() - shift < -TAIL_DROP;
        let hi_idx = (imax..grid.len())
            .rev()
            .take_while(|&i| negligible(i))
            .last()
            .filter(|&i| i < grid.len() - 1);
        let lo_idx = (0..=imax).take_while(|&i| negligible(i)).last().filter(|&i| i > 0);
        let (lo, hi) = match (lo_idx, hi_idx) {
            (Some(l), Some(h)) => (grid[l], grid[h]),
            _ => {
                return Err(Error::Integrability(
                    "exp(-u) does not decay in both tails within |x| <= 1e8".into(),
                ))
            }
        };
        let mut d = Self { u, shift, mode, lo, hi, z: 1.0, cum: Vec::new() };
        let total = d.integrate(|_| 1.0)?;
        d.z = total;
        let width = (hi - lo) / CDF_CELLS as f64;
        let mut cum = Vec::with_capacity(CDF_CELLS + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for j in 0..CDF_CELLS {
            let a = lo + j as f64 * width;
            let q = integrate(&|x: f64| d.unnormalized(x), &[a, a + width], 1e-18 * total, REL_TOL, 200);
            acc += q.value;
            cum.push(acc / total);
        }
        d.cum = cum;
        Ok(d)
    }

    fn unnormalized(&self, x: f64) -> f64 {
        (-(self.u)(x) - self.shift).exp()
    }

    fn integrate(&self, weight: impl Fn(f64) -> f64) -> Result<f64> {
        let mut breaks = vec![self.lo];
        if self.mode > self.lo && self.mode < self.hi {
            breaks.push(self.mode);
        }
        if 0.0 > self.lo && 0.0 < self.hi && self.mode != 0.0 {
            breaks.push(0.0);
        }
        breaks.push(self.hi);
        breaks.sort_by(f64::total_cmp);
        let f = |x: f64| weight(x) * self.unnormalized(x);
        let scale = integrate(&|x: f64| weight(x).abs() * self.unnormalized(x), &breaks, 0.0, 1e-6, 200).value;
        let q = integrate(&f, &breaks, 1e-13 * scale, REL_TOL, MAX_INTERVALS);
        if q.abs_err > ACCEPT_REL_ERR * q.value.abs().max(1e-3 * scale) {
            return Err(Error::Integrability(format!("quadrature did not converge: {q:?}")));
        }
        Ok(q.value)
    }

    /// `E_π[x^p]`.
    pub fn moment(&self, p: u32) -> Result<f64> {
        Ok(self.integrate(|x| x.powi(p as i32))? / self.z)
    }

    /// Truncation interval; the mass outside is below `1e-17`.
    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return 1.0;
        }
        let width = (self.hi - self.lo) / CDF_CELLS as f64;
        let j = (((x - self.lo) / width) as usize).min(CDF_CELLS - 1);
        let a = self.lo + j as f64 * width;
        let (part, _) = gk15(&|t: f64| self.unnormalized(t), a, x);
        (self.cum[j] + part / self.z).clamp(0.0, 1.0)
    }

    /// `π([a, b])`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        (self.cdf(b) - self.cdf(a)).max(0.0)
    }

    /// Smallest `x` with `cdf(x) ≥ q`, to bisection precision.
    pub fn quantile(&self, q: f64) -> f64 {
        let q = q.clamp(0.0, 1.0);
        let width = (self.hi - self.lo) / CDF_CELLS as f64;
        let j = self.cum.partition_point(|&c| c < q).saturating_sub(1).min(CDF_CELLS - 1);
        let (mut a, mut b) = (self.lo + j as f64 * width, self.lo + (j + 1) as f64 * width);
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if self.cdf(m) < q {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }
}

/// `E_π[x^p]` for `π ∝ exp(−u)` on the real line.
pub fn moment_1d<U: Fn(f64) -> f64>(u: U, p: u32) -> Result<f64> {
    Density1d::new(u)?.moment(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trapezoid_m2(u: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
        let h = (hi - lo) / n as f64;
        let (mut z, mut m) = (0.0, 0.0);
        for k in 0..=n {
            let x = lo + k as f64 * h;
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            let f = (-u(x)).exp();
            z += w * f;
            m += w * x * x * f;
        }
        m / z
    }

    #[test]
    fn half_gaussian_radial() {
        let v = radial_second_moment(1, |r| -0.5 * r * r).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
        let v = radial_second_moment(2, |r| -0.5 * r * r).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
        let v = radial_second_moment(7, |r| -0.5 * r * r / 3.0).unwrap();
        assert!((v - 3.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn double_well_radial_d100() {
        let v = radial_second_moment(100, |r| 0.5 * r * r - 0.25 * r.powi(4)).unwrap();
        assert!((v - 0.104).abs() <= 0.001, "{v}");
    }

    #[test]
    fn non_decaying_radial_profile_fails() {
        assert!(matches!(radial_second_moment(3, |r| 0.1 * r), Err(Error::Integrability(_))));
        assert!(matches!(radial_second_moment(2, |_| 0.0), Err(Error::Integrability(_))));
    }

    #[test]
    fn gaussian_moments() {
        assert!((moment_1d(|x| 0.5 * x * x, 2).unwrap() - 1.0).abs() < 1e-10);
        assert!(moment_1d(|x| 0.5 * x * x, 1).unwrap().abs() < 1e-12);
        assert!((moment_1d(|x| 0.5 * (x - 3.0).powi(2), 1).unwrap() - 3.0).abs() < 1e-10);
        assert!((moment_1d(|x| 0.5 * x * x, 4).unwrap() - 3.0).abs() < 1e-9);
    }

    // Frozen fixture from a 2·10⁶-panel trapezoid sweep on [−8, 8].
    const DOUBLE_WELL_1D_M2: f64 = 1.041_797_296_487;

    #[test]
    fn double_well_1d_second_moment() {
        let u = |x: f64| 0.25 * x.powi(4) - 0.5 * x * x;
        let brute = trapezoid_m2(u, -8.0, 8.0, 2_000_000);
        assert!((brute - DOUBLE_WELL_1D_M2).abs() < 1e-10, "{brute}");
        let quad = moment_1d(u, 2).unwrap();
        assert!(((quad - brute) / brute).abs() < 1e-10, "{quad} vs {brute}");
    }

    #[test]
    fn radial_matches_symmetrized_1d() {
        let u = |x: f64| 0.25 * x.powi(4) - 0.5 * x * x;
        let radial = radial_second_moment(1, |r| -u(r)).unwrap();
        let line = moment_1d(u, 2).unwrap();
        assert!((radial - line).abs() < 1e-9, "{radial} vs {line}");
    }

    #[test]
    fn improper_density_fails() {
        assert!(matches!(moment_1d(|x: f64| x.powi(3) / 3.0, 2), Err(Error::Integrability(_))));
        assert!(moment_1d(|_| 0.0, 2).is_err());
    }

    #[test]
    fn cdf_and_quantiles() {
        let d = Density1d::new(|x: f64| 0.5 * x * x).unwrap();
        assert!((d.cdf(0.0) - 0.5).abs() < 1e-12);
        assert!((d.cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-11);
        assert!((d.quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-9);
        assert!((d.mass(-1.0, 1.0) - 0.682_689_492_137_085_9).abs() < 1e-11);
        for q in [1e-6, 0.1, 0.5, 0.77, 0.999] {
            assert!((d.cdf(d.quantile(q)) - q).abs() < 1e-12, "{q}");
        }
    }
}

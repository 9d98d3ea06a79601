//! Target potentials `u` with analytic gradients `h = ∇u`, together with the
//! assumption constants consumed by the taming schemes.
//!
//! The constants are never inferred. Each potential carries the triple
//! `(A, a, b)` of the weak dissipativity bound `⟨h(x), x⟩ ≥ A|x|^a − b`, the
//! pair `(L, l)` of the growth bound `|h(x)| ≤ L(1 + |x|^{2l})` and the pair
//! `(L', l')` of the polynomial Lipschitz bound
//! `|h(x) − h(y)| ≤ L'(1 + |x| + |y|)^{l'} |x − y|`. The validators below probe
//! the first two numerically on a user-supplied point cloud.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecops::{dot, norm, norm_sq};

pub type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// Assumption constants of a potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionConstants {
    /// `A` in the dissipativity bound.
    pub diss_coef: f64,
    /// `a ≥ 1` in the dissipativity bound.
    pub diss_exp: f64,
    /// `b` in the dissipativity bound.
    pub diss_offset: f64,
    /// `L` in the growth bound.
    pub growth_coef: f64,
    /// `l` in the growth bound; real valued, `2l` need not be an integer.
    pub growth_exp: f64,
    /// `L'` in the polynomial Lipschitz bound.
    pub lip_coef: f64,
    /// `l'` in the polynomial Lipschitz bound.
    pub lip_exp: f64,
    /// `K` in `∇²u ⪰ −K·I`, when weak convexity is asserted.
    pub hessian_lb: Option<f64>,
    /// Whether the dissipativity bound actually holds. Potentials that fail it
    /// are only admitted by the plain ULA baseline.
    pub dissipative: bool,
}

impl AssumptionConstants {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("diss_coef", self.diss_coef),
            ("growth_coef", self.growth_coef),
            ("growth_exp", self.growth_exp),
            ("lip_coef", self.lip_coef),
            ("lip_exp", self.lip_exp),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if !(self.diss_exp.is_finite() && self.diss_exp >= 1.0) {
            return Err(Error::config(format!(
                "diss_exp must be >= 1, got {}",
                self.diss_exp
            )));
        }
        if !(self.diss_offset.is_finite() && self.diss_offset >= 0.0) {
            return Err(Error::config(format!(
                "diss_offset must be finite and >= 0, got {}",
                self.diss_offset
            )));
        }
        if let Some(k) = self.hessian_lb {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::config(format!("hessian_lb must be > 0, got {k}")));
            }
        }
        Ok(())
    }
}

/// A target density `π ∝ exp(−u)` on `R^d`.
#[derive(Clone)]
pub struct PotentialSpec {
    name: String,
    dim: usize,
    value: ValueFn,
    gradient: GradientFn,
    radial: bool,
    pub constants: AssumptionConstants,
}

impl fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialSpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("constants", &self.constants)
            .finish_non_exhaustive()
    }
}

impl PotentialSpec {
    /// Builds a potential from a value function and an in-place gradient.
    ///
    /// The gradient closure writes `∇u(x)` into its second argument, which has
    /// length `dim`. Both closures must be pure.
    pub fn new<V, G>(
        name: impl Into<String>,
        dim: usize,
        value: V,
        gradient: G,
        constants: AssumptionConstants,
    ) -> Result<Self>
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(Error::config("dimension must be positive"));
        }
        constants.validate()?;
        Ok(Self {
            name: name.into(),
            dim,
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            radial: false,
            constants,
        })
    }

    /// Marks the potential as a function of `|x|` only.
    pub fn radially_symmetric(mut self) -> Self {
        self.radial = true;
        self
    }

    pub fn with_constants(mut self, constants: AssumptionConstants) -> Result<Self> {
        constants.validate()?;
        self.constants = constants;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_radial(&self) -> bool {
        self.radial
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    /// Writes `∇u(x)` into `out` without checking for finiteness.
    #[inline]
    pub fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        (self.gradient)(x, out)
    }

    /// `∇u(x)`, failing on the first non-finite component.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut out = vec![0.0; self.dim];
        self.gradient_into(x, &mut out);
        if let Some(component) = out.iter().position(|g| !g.is_finite()) {
            return Err(Error::Evaluation { what: "gradient", component });
        }
        Ok(out)
    }

    pub(crate) fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::config(format!(
                "point has dimension {}, potential {} has dimension {}",
                x.len(),
                self.name,
                self.dim
            )));
        }
        Ok(())
    }
}

/// `u(x) = |x|⁴/4 − |x|²/2`, the radial double well with minima on the unit
/// sphere and `h(x) = x(|x|² − 1)`.
pub fn double_well_radial(dim: usize) -> Result<PotentialSpec> {
    let constants = AssumptionConstants {
        diss_coef: 1.0,
        diss_exp: 2.0,
        diss_offset: 1.0,
        // |h| ≤ |x|³ + |x| ≤ 2(1 + |x|³) and ‖∇h‖ = 3|x|² − 1 ≤ 3(1 + |x|³)
        growth_coef: 3.0,
        growth_exp: 1.5,
        lip_coef: 3.0,
        lip_exp: 2.0,
        hessian_lb: Some(1.0),
        dissipative: true,
    };
    let name = if dim == 1 { "double_well_1d" } else { "double_well_radial" };
    Ok(PotentialSpec::new(
        name,
        dim,
        |x| {
            let s = norm_sq(x);
            0.25 * s * s - 0.5 * s
        },
        |x, out| {
            let c = norm_sq(x) - 1.0;
            for (o, xi) in out.iter_mut().zip(x) {
                *o = c * xi;
            }
        },
        constants,
    )?
    .radially_symmetric())
}

pub fn double_well_1d() -> PotentialSpec {
    double_well_radial(1).expect("d = 1 is valid")
}

/// `u(x) = x³/3` in one dimension. Not a density and not dissipative; used only
/// to show ULA diverging.
pub fn cubic_demo() -> PotentialSpec {
    let constants = AssumptionConstants {
        diss_coef: 1.0,
        diss_exp: 2.0,
        diss_offset: 1.0,
        growth_coef: 1.0,
        growth_exp: 1.0,
        lip_coef: 2.0,
        lip_exp: 1.0,
        hessian_lb: None,
        dissipative: false,
    };
    PotentialSpec::new(
        "cubic_demo",
        1,
        |x| x[0].powi(3) / 3.0,
        |x, out| out[0] = x[0] * x[0],
        constants,
    )
    .expect("valid constants")
}

/// Standard Gaussian, `u(x) = |x|²/2`.
pub fn gaussian(dim: usize) -> Result<PotentialSpec> {
    let constants = AssumptionConstants {
        diss_coef: 1.0,
        diss_exp: 2.0,
        diss_offset: 0.5,
        growth_coef: 1.0,
        growth_exp: 0.5,
        lip_coef: 1.0,
        lip_exp: 1.0,
        hessian_lb: Some(1.0),
        dissipative: true,
    };
    Ok(PotentialSpec::new(
        "gaussian",
        dim,
        |x| 0.5 * norm_sq(x),
        |x, out| out.copy_from_slice(x),
        constants,
    )?
    .radially_symmetric())
}

/// Names accepted by [`by_name`].
pub const CATALOG: &[&str] = &["double_well_radial", "double_well_1d", "cubic_demo", "gaussian"];

/// Resolves a catalog entry by name. `dim` is ignored by the fixed
/// one-dimensional entries.
pub fn by_name(name: &str, dim: usize) -> Result<PotentialSpec> {
    match name {
        "double_well_radial" => double_well_radial(dim),
        "double_well_1d" => Ok(double_well_1d()),
        "cubic_demo" => Ok(cubic_demo()),
        "gaussian" => gaussian(dim),
        other => Err(Error::config(format!(
            "unknown potential {other:?}; expected one of {CATALOG:?}"
        ))),
    }
}

/// Central-difference approximation of `∇u(x)`.
pub fn finite_difference_gradient(spec: &PotentialSpec, x: &[f64], step: f64) -> Result<Vec<f64>> {
    spec.check_dim(x)?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::config(format!("finite-difference step must be > 0, got {step}")));
    }
    if let Some(component) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::Evaluation { what: "input coordinate", component });
    }
    let mut probe = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + step;
        let up = spec.value(&probe);
        probe[i] = x[i] - step;
        let down = spec.value(&probe);
        probe[i] = x[i];
        if !(up.is_finite() && down.is_finite()) {
            return Err(Error::Evaluation { what: "potential value", component: i });
        }
        out.push((up - down) / (2.0 * step));
    }
    Ok(out)
}

/// Worst-case margin of an inequality over a probe set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub min_margin: f64,
    pub argmin: Vec<f64>,
    pub violations: usize,
    pub n_points: usize,
}

impl MarginReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }

    fn fold(points: &[Vec<f64>], mut margin: impl FnMut(&[f64]) -> f64) -> Self {
        let mut report = MarginReport {
            min_margin: f64::INFINITY,
            argmin: Vec::new(),
            violations: 0,
            n_points: points.len(),
        };
        for p in points {
            let m = margin(p);
            // NaN margins count as violations
            if !(m >= 0.0) {
                report.violations += 1;
            }
            if m < report.min_margin || (m.is_nan() && !report.min_margin.is_nan()) {
                report.min_margin = m;
                report.argmin = p.clone();
            }
        }
        report
    }
}

/// `min_x ⟨h(x), x⟩ − (A|x|^a − b)` over the probe points.
pub fn validate_dissipativity(spec: &PotentialSpec, points: &[Vec<f64>]) -> MarginReport {
    let c = spec.constants;
    let mut grad = vec![0.0; spec.dim()];
    MarginReport::fold(points, |x| {
        spec.gradient_into(x, &mut grad);
        dot(&grad, x) - (c.diss_coef * norm(x).powf(c.diss_exp) - c.diss_offset)
    })
}

/// `min_x L(1 + |x|^{2l}) − |h(x)|` over the probe points.
///
/// Only the gradient part of the growth bound is probed; the Jacobian norms
/// would need a Hessian oracle.
pub fn validate_growth(spec: &PotentialSpec, points: &[Vec<f64>]) -> MarginReport {
    let c = spec.constants;
    let mut grad = vec![0.0; spec.dim()];
    MarginReport::fold(points, |x| {
        spec.gradient_into(x, &mut grad);
        c.growth_coef * (1.0 + norm_sq(x).powf(c.growth_exp)) - norm(&grad)
    })
}

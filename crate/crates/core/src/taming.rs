//! Drift transformers for the Euler–Maruyama kernel.
//!
//! Every scheme replaces `h = ∇u` by a step-size dependent field:
//!
//! | scheme       | drift                                                          |
//! |--------------|----------------------------------------------------------------|
//! | `ula`        | `h(x)`                                                         |
//! | `tula`       | `h(x) / (1 + λ|h(x)|)`                                         |
//! | `wd_tula`    | `A·R(x) + (h(x) − A·R(x)) / (1 + √λ|x|^{2l})`                  |
//! | `reg_tula`   | `A·R(x) + (∇u_{r,λ}(x) − A·R(x)) / (1 + √λ|x|^{2r+1})`          |
//!
//! with `R(x) = x / (1 + |x|²)^{1 − a/2}` and `u_{r,λ}(x) = u(x) + λ|x|^{2r+2}`.
//! `R` grows like `|x|^{a−1}`, at most linearly for `a ≤ 2`, so only the
//! superlinear remainder of the gradient gets tamed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::PotentialSpec;
use crate::vecops::norm_sq;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Ula,
    #[serde(rename = "tula", alias = "tula_classic")]
    TulaClassic,
    WdTula,
    RegTula,
}

impl SchemeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Ula => "ula",
            SchemeKind::TulaClassic => "tula",
            SchemeKind::WdTula => "wd_tula",
            SchemeKind::RegTula => "reg_tula",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ula" => Ok(SchemeKind::Ula),
            "tula" | "tula_classic" => Ok(SchemeKind::TulaClassic),
            "wd_tula" => Ok(SchemeKind::WdTula),
            "reg_tula" => Ok(SchemeKind::RegTula),
            other => Err(Error::config(format!(
                "unknown scheme {other:?}; expected ula, tula, wd_tula or reg_tula"
            ))),
        }
    }
}

/// A drift transformer together with its step size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftScheme {
    pub kind: SchemeKind,
    pub lambda: f64,
    /// Regularization exponent `r`, `reg_tula` only. `None` selects the
    /// smallest admissible exponent via [`select_reg_exponent`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reg_r: Option<f64>,
}

impl DriftScheme {
    pub fn new(kind: SchemeKind, lambda: f64) -> Self {
        Self { kind, lambda, reg_r: None }
    }

    pub fn ula(lambda: f64) -> Self {
        Self::new(SchemeKind::Ula, lambda)
    }

    pub fn tula(lambda: f64) -> Self {
        Self::new(SchemeKind::TulaClassic, lambda)
    }

    pub fn wd_tula(lambda: f64) -> Self {
        Self::new(SchemeKind::WdTula, lambda)
    }

    pub fn reg_tula(lambda: f64, reg_r: Option<f64>) -> Self {
        Self { kind: SchemeKind::RegTula, lambda, reg_r }
    }

    /// Checks compatibility with `spec` and fills in a default `reg_r`.
    pub fn resolve(&self, spec: &PotentialSpec) -> Result<Self> {
        check_lambda(self.lambda)?;
        let c = &spec.constants;
        if self.kind != SchemeKind::Ula && !c.dissipative {
            return Err(Error::config(format!(
                "scheme {} requires a dissipative potential; {} only admits ula",
                self.kind.as_str(),
                spec.name()
            )));
        }
        let mut out = *self;
        match self.kind {
            SchemeKind::RegTula => {
                let r = match self.reg_r {
                    Some(r) => r,
                    None => select_reg_exponent(c.growth_exp, c.lip_exp)?.r,
                };
                check_reg_exponent(r, c.growth_exp)?;
                out.reg_r = Some(r);
            }
            _ => out.reg_r = None,
        }
        Ok(out)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::config(format!("step size lambda must be > 0, got {lambda}")))
    }
}

fn check_reg_exponent(r: f64, l: f64) -> Result<()> {
    if r.is_finite() && r > l / 2.0 {
        Ok(())
    } else {
        Err(Error::config(format!(
            "regularization exponent must satisfy r > l/2 (r = {r}, l = {l})"
        )))
    }
}

/// Scalar factor `(1 + |x|²)^{a/2 − 1}` with `R(x) = factor · x`.
#[inline]
pub fn radial_split_factor(norm_sq: f64, a: f64) -> f64 {
    (1.0 + norm_sq).powf(0.5 * a - 1.0)
}

/// `A·x / (1 + |x|²)^{1 − a/2}`.
pub fn radial_split(x: &[f64], coef: f64, a: f64) -> Vec<f64> {
    let f = coef * radial_split_factor(norm_sq(x), a);
    x.iter().map(|v| f * v).collect()
}

fn checked_gradient(spec: &PotentialSpec, x: &[f64]) -> Result<Vec<f64>> {
    spec.gradient(x)
}

/// The weak-dissipativity tamed drift `h_λ`.
pub fn wd_tamed_drift(spec: &PotentialSpec, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    let mut out = checked_gradient(spec, x)?;
    let c = &spec.constants;
    wd_tame_in_place(x, &mut out, lambda, c.diss_coef, c.diss_exp, c.growth_exp);
    Ok(out)
}

/// Gradient of the regularized potential `u(x) + λ|x|^{2r+2}`.
pub fn regularized_gradient(spec: &PotentialSpec, r: f64, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::config(format!("regularization exponent must be > 0, got {r}")));
    }
    let mut out = checked_gradient(spec, x)?;
    add_regularizer(x, &mut out, lambda, r);
    Ok(out)
}

/// The regularized tamed drift `h_{r,λ}`.
pub fn reg_tamed_drift(spec: &PotentialSpec, r: f64, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    let c = &spec.constants;
    check_reg_exponent(r, c.growth_exp)?;
    let mut out = checked_gradient(spec, x)?;
    reg_tame_in_place(x, &mut out, lambda, r, c.diss_coef, c.diss_exp);
    Ok(out)
}

/// Classic TULA drift `h(x) / (1 + λ|h(x)|)`.
pub fn tula_classic_drift(spec: &PotentialSpec, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    let mut out = checked_gradient(spec, x)?;
    tula_tame_in_place(&mut out, lambda);
    Ok(out)
}

#[inline]
fn wd_tame_in_place(x: &[f64], grad: &mut [f64], lambda: f64, coef: f64, a: f64, l: f64) {
    let s = norm_sq(x);
    let split = coef * radial_split_factor(s, a);
    let taming = 1.0 / (1.0 + lambda.sqrt() * s.powf(l));
    for (g, xi) in grad.iter_mut().zip(x) {
        let linear = split * xi;
        *g = linear + (*g - linear) * taming;
    }
}

#[inline]
fn add_regularizer(x: &[f64], grad: &mut [f64], lambda: f64, r: f64) {
    let s = norm_sq(x);
    let k = lambda * (2.0 * r + 2.0) * s.powf(r);
    for (g, xi) in grad.iter_mut().zip(x) {
        *g += k * xi;
    }
}

#[inline]
fn reg_tame_in_place(x: &[f64], grad: &mut [f64], lambda: f64, r: f64, coef: f64, a: f64) {
    let s = norm_sq(x);
    let k = lambda * (2.0 * r + 2.0) * s.powf(r);
    let split = coef * radial_split_factor(s, a);
    let taming = 1.0 / (1.0 + lambda.sqrt() * s.powf(r + 0.5));
    for (g, xi) in grad.iter_mut().zip(x) {
        let linear = split * xi;
        *g = linear + (*g + k * xi - linear) * taming;
    }
}

#[inline]
fn tula_tame_in_place(grad: &mut [f64], lambda: f64) {
    let scale = 1.0 / (1.0 + lambda * norm_sq(grad).sqrt());
    grad.iter_mut().for_each(|g| *g *= scale);
}

/// A resolved scheme bound to its potential; the field the sampler integrates.
#[derive(Debug, Clone)]
pub struct Drift {
    spec: PotentialSpec,
    scheme: DriftScheme,
}

impl Drift {
    pub fn new(spec: &PotentialSpec, scheme: &DriftScheme) -> Result<Self> {
        Ok(Self { spec: spec.clone(), scheme: scheme.resolve(spec)? })
    }

    /// Skips the compatibility checks of [`DriftScheme::resolve`]; used by
    /// probes that must also report on inadmissible combinations.
    pub(crate) fn unchecked(spec: &PotentialSpec, scheme: &DriftScheme) -> Self {
        let c = &spec.constants;
        let mut scheme = *scheme;
        if scheme.kind == SchemeKind::RegTula && scheme.reg_r.is_none() {
            let r = select_reg_exponent(c.growth_exp, c.lip_exp).map(|e| e.r);
            scheme.reg_r = Some(r.unwrap_or(c.growth_exp / 2.0 + 0.5));
        }
        Self { spec: spec.clone(), scheme }
    }

    pub fn scheme(&self) -> &DriftScheme {
        &self.scheme
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// Writes the drift at `x` into `out`. Non-finite inputs propagate.
    #[inline]
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        self.spec.gradient_into(x, out);
        let c = &self.spec.constants;
        let lambda = self.scheme.lambda;
        match self.scheme.kind {
            SchemeKind::Ula => {}
            SchemeKind::TulaClassic => tula_tame_in_place(out, lambda),
            SchemeKind::WdTula => {
                wd_tame_in_place(x, out, lambda, c.diss_coef, c.diss_exp, c.growth_exp)
            }
            SchemeKind::RegTula => {
                let r = self.scheme.reg_r.expect("resolved");
                reg_tame_in_place(x, out, lambda, r, c.diss_coef, c.diss_exp)
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.eval_into(x, &mut out);
        out
    }
}

/// Computable part of the step-size restriction for wd-TULA.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSizeBound {
    /// `min{1/(4(2A·C* + 2L + 1)²), 2/μ², 1, A/4}`.
    pub computable_bound: f64,
    pub m: f64,
    pub mu: f64,
    pub c_star: f64,
    /// Terms of the full restriction that depend on constants the library
    /// cannot compute.
    pub omitted_terms: Vec<String>,
}

impl StepSizeBound {
    /// The bound to enforce, optionally replaced by a user-supplied value that
    /// accounts for the omitted terms.
    pub fn effective(&self, user_override: Option<f64>) -> f64 {
        user_override.unwrap_or(self.computable_bound)
    }

    /// Warning text when `lambda` is not below the computable bound. The bound
    /// is sufficient, not necessary, so this never fails a run.
    pub fn warning(&self, lambda: f64) -> Option<String> {
        (lambda >= self.computable_bound).then(|| {
            format!(
                "lambda = {lambda} is not below the computable step-size bound {:.6e}; \
                 convergence guarantees do not apply",
                self.computable_bound
            )
        })
    }
}

/// Operator norm of the Jacobian of `R` at radius `r`.
///
/// `J_R = s^{p} I + 2p s^{p−1} x xᵀ` with `s = 1 + r²`, `p = a/2 − 1`; its
/// eigenvalues are `s^p` (tangential, only when `dim ≥ 2`) and
/// `s^{p−1}(1 + (a − 1) r²)` (radial).
pub fn radial_split_jacobian_norm(r: f64, a: f64, dim: usize) -> f64 {
    let s = 1.0 + r * r;
    let p = 0.5 * a - 1.0;
    let radial = (s.powf(p - 1.0) * (1.0 + (a - 1.0) * r * r)).abs();
    if dim >= 2 {
        radial.max(s.powf(p))
    } else {
        radial
    }
}

/// Number of radii in the `C*` scan.
pub const C_STAR_GRID: usize = 10_000;

/// `sup_x ‖J_R(x)‖` estimated on a log grid of radii in `[1e-6, 1e6]` plus the
/// origin. Exactly 1 for `a = 2`.
pub fn estimate_c_star(a: f64, dim: usize) -> f64 {
    let (lo, hi) = (1e-6f64.ln(), 1e6f64.ln());
    (0..C_STAR_GRID)
        .map(|i| (lo + (hi - lo) * i as f64 / (C_STAR_GRID - 1) as f64).exp())
        .chain(std::iter::once(0.0))
        .map(|r| radial_split_jacobian_norm(r, a, dim))
        .fold(0.0, f64::max)
}

pub fn compute_step_size_bound(spec: &PotentialSpec) -> StepSizeBound {
    let c = &spec.constants;
    let (big_a, a, big_l) = (c.diss_coef, c.diss_exp, c.growth_coef);
    let d = spec.dim() as f64;
    let m = (2.0 * (2.0 * d + 4.0 * big_a * big_a + 2.0 * big_l * big_l + big_a)).powf(1.0 / a);
    let mu = big_a * a * m.powf(a) / (16.0 * (1.0 + m * m).powf(1.0 - 0.5 * a));
    let c_star = estimate_c_star(a, spec.dim());
    let regularity = 1.0 / (4.0 * (2.0 * big_a * c_star + 2.0 * big_l + 1.0).powi(2));
    let computable_bound = [regularity, 2.0 / (mu * mu), 1.0, big_a / 4.0]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    StepSizeBound {
        computable_bound,
        m,
        mu,
        c_star,
        omitted_terms: vec![
            "1/(c0_dot * H_pi(rho_0)): needs the Poincare-derived constant and the initial KL divergence".into(),
            "ln2/R_2^(2r+2) (reg_tula only): needs the Poincare ball radius of the regularized measure".into(),
        ],
    }
}

/// An admissible regularization exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegExponent {
    pub r: f64,
    /// `c_{l,r} = r(2 + l) / ((r + 1)(2r − l))`.
    pub c_lr: f64,
    /// Same expression with the Lipschitz exponent `l'` in place of `l`.
    pub c_lpr: f64,
}

/// Default cap on the candidate grid of [`select_reg_exponent`].
pub const REG_EXPONENT_CAP: f64 = 50.0;

fn rate_exponent(r: f64, l: f64) -> f64 {
    if 2.0 * r <= l {
        f64::INFINITY
    } else {
        r * (2.0 + l) / ((r + 1.0) * (2.0 * r - l))
    }
}

/// Smallest `r ∈ {0.5, 1.0, 1.5, …}` with `r > l/2` and both rate exponents
/// (built from `l` and from `l'`) strictly below one.
pub fn select_reg_exponent(l: f64, lp: f64) -> Result<RegExponent> {
    select_reg_exponent_capped(l, lp, REG_EXPONENT_CAP)
}

pub fn select_reg_exponent_capped(l: f64, lp: f64, cap: f64) -> Result<RegExponent> {
    if !(l > 0.0 && lp > 0.0 && l.is_finite() && lp.is_finite()) {
        return Err(Error::config(format!("exponents must be > 0, got l = {l}, l' = {lp}")));
    }
    let mut k = 1u32;
    loop {
        let r = 0.5 * k as f64;
        if r > cap {
            return Err(Error::config(format!(
                "no regularization exponent r <= {cap} satisfies r > l/2 with rate exponents < 1 \
                 (l = {l}, l' = {lp})"
            )));
        }
        let (c_lr, c_lpr) = (rate_exponent(r, l), rate_exponent(r, lp));
        if r > l / 2.0 && c_lr < 1.0 && c_lpr < 1.0 {
            return Ok(RegExponent { r, c_lr, c_lpr });
        }
        k += 1;
    }
}

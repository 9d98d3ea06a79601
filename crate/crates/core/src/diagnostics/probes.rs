//! Pointwise checks of the tamed-drift inequalities on a probe cloud.

use serde::{Deserialize, Serialize};

use crate::potentials::PotentialSpec;
use crate::taming::{Drift, DriftScheme, SchemeKind};
use crate::vecops::{dot, norm, norm_sq};

/// Slack below which a probe point counts as a violation.
pub const VIOLATION_TOL: f64 = -1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `⟨h_λ(x), x⟩ ≥ A₁|x|^a − B₁`
    DissipativityLower,
    /// `|h_λ(x)|² ≤ 4A²|x|^a + 2L²/λ + 4A²`
    GrowthUpper,
    /// `|h_λ(x) − h(x)| ≤ √λ(|h(x)| + |x|)|x|^{2l}`
    TamingError,
    /// `⟨h_{r,λ}(x), x⟩ ≥ A₁|x|^a − max{A/2, b + 1}`
    RegDissipativityLower,
    /// `|h_{r,λ}(x)| ≤ A + √λ + A|x|^{a/2} + (L + 1)/√λ`
    RegGrowthUpper,
    /// `|h(x)| / (1 + λ|h(x)|) ≤ 1/λ`
    TulaNorm,
}

impl Inequality {
    pub fn for_scheme(kind: SchemeKind) -> &'static [Inequality] {
        use Inequality::*;
        match kind {
            SchemeKind::Ula => &[],
            SchemeKind::TulaClassic => &[TulaNorm],
            SchemeKind::WdTula => &[DissipativityLower, GrowthUpper, TamingError],
            SchemeKind::RegTula => &[RegDissipativityLower, RegGrowthUpper],
        }
    }
}

/// Right-hand-side constants of the probed inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaBounds {
    /// `A₁`, nominally `A/2`.
    pub lower_coef: f64,
    /// `max{A/2, b}`.
    pub lower_offset: f64,
    /// `max{A/2, b + 1}`.
    pub reg_lower_offset: f64,
    /// `4A²`, multiplies `|x|^a`.
    pub sq_growth_coef: f64,
    /// `2L²/λ + 4A²`.
    pub sq_growth_const: f64,
    /// `A`, multiplies `|x|^{a/2}`.
    pub reg_growth_coef: f64,
    /// `A + √λ + (L + 1)/√λ`.
    pub reg_growth_const: f64,
    /// `√λ`.
    pub envelope_scale: f64,
}

impl LemmaBounds {
    pub fn derive(spec: &PotentialSpec, lambda: f64) -> Self {
        let c = &spec.constants;
        let (big_a, b, big_l) = (c.diss_coef, c.diss_offset, c.growth_coef);
        let sl = lambda.sqrt();
        LemmaBounds {
            lower_coef: big_a / 2.0,
            lower_offset: (big_a / 2.0).max(b),
            reg_lower_offset: (big_a / 2.0).max(b + 1.0),
            sq_growth_coef: 4.0 * big_a * big_a,
            sq_growth_const: 2.0 * big_l * big_l / lambda + 4.0 * big_a * big_a,
            reg_growth_coef: big_a,
            reg_growth_const: big_a + sl + (big_l + 1.0) / sl,
            envelope_scale: sl,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityResult {
    pub inequality: Inequality,
    /// Smallest `rhs − lhs` over the cloud; NaN if any point failed to evaluate.
    pub worst_slack: f64,
    pub argmin: Vec<f64>,
    pub violations: usize,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub potential: String,
    pub scheme: DriftScheme,
    pub bounds: LemmaBounds,
    pub results: Vec<InequalityResult>,
}

impl ViolationReport {
    pub fn total_violations(&self) -> usize {
        self.results.iter().map(|r| r.violations).sum()
    }

    pub fn holds(&self) -> bool {
        self.total_violations() == 0
    }

    pub fn get(&self, inequality: Inequality) -> Option<&InequalityResult> {
        self.results.iter().find(|r| r.inequality == inequality)
    }
}

/// Evaluates every inequality of `scheme` with the nominal constants.
pub fn lemma_probe_suite(spec: &PotentialSpec, scheme: &DriftScheme, points: &[Vec<f64>]) -> ViolationReport {
    lemma_probe_suite_with(spec, scheme, points, &LemmaBounds::derive(spec, scheme.lambda))
}

/// As [`lemma_probe_suite`] with caller-supplied constants, e.g. a corrupted
/// set for a negative control.
pub fn lemma_probe_suite_with(
    spec: &PotentialSpec,
    scheme: &DriftScheme,
    points: &[Vec<f64>],
    bounds: &LemmaBounds,
) -> ViolationReport {
    let drift = Drift::unchecked(spec, scheme);
    let c = &spec.constants;
    let lambda = scheme.lambda;
    let dim = spec.dim();
    let inequalities = Inequality::for_scheme(scheme.kind);
    let mut results: Vec<InequalityResult> = inequalities
        .iter()
        .map(|&inequality| InequalityResult {
            inequality,
            worst_slack: f64::INFINITY,
            argmin: Vec::new(),
            violations: 0,
            n_points: points.len(),
        })
        .collect();
    let (mut h, mut tamed) = (vec![0.0; dim], vec![0.0; dim]);
    for x in points {
        spec.gradient_into(x, &mut h);
        drift.eval_into(x, &mut tamed);
        let nx = norm(x);
        for res in results.iter_mut() {
            let slack = match res.inequality {
                Inequality::DissipativityLower => {
                    dot(&tamed, x) - (bounds.lower_coef * nx.powf(c.diss_exp) - bounds.lower_offset)
                }
                Inequality::RegDissipativityLower => {
                    dot(&tamed, x) - (bounds.lower_coef * nx.powf(c.diss_exp) - bounds.reg_lower_offset)
                }
                Inequality::GrowthUpper => {
                    bounds.sq_growth_coef * nx.powf(c.diss_exp) + bounds.sq_growth_const - norm_sq(&tamed)
                }
                Inequality::RegGrowthUpper => {
                    bounds.reg_growth_coef * nx.powf(c.diss_exp / 2.0) + bounds.reg_growth_const - norm(&tamed)
                }
                Inequality::TamingError => {
                    let err: f64 = h.iter().zip(&tamed).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                    bounds.envelope_scale * (norm(&h) + nx) * (nx * nx).powf(c.growth_exp) - err
                }
                Inequality::TulaNorm => 1.0 / lambda - norm(&tamed),
            };
            if !(slack >= VIOLATION_TOL) {
                res.violations += 1;
            }
            if slack < res.worst_slack || (slack.is_nan() && !res.worst_slack.is_nan()) {
                res.worst_slack = slack;
                res.argmin = x.clone();
            }
        }
    }
    ViolationReport { potential: spec.name().to_string(), scheme: *drift.scheme(), bounds: *bounds, results }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::uniform_box;
    use crate::potentials::{cubic_demo, double_well_radial, gaussian};

    #[test]
    fn double_well_2d_has_no_violations() {
        let spec = double_well_radial(2).unwrap();
        let points = uniform_box(2, 10.0, 10_000, 1);
        let report = lemma_probe_suite(&spec, &DriftScheme::wd_tula(0.01), &points);
        assert_eq!(report.results.len(), 3);
        assert!(report.holds(), "{report:?}");
    }

    #[test]
    fn gaussian_any_lambda() {
        let spec = gaussian(3).unwrap();
        let points = uniform_box(3, 10.0, 2_000, 2);
        for lambda in [1.0, 0.3, 1e-2, 1e-5] {
            let report = lemma_probe_suite(&spec, &DriftScheme::wd_tula(lambda), &points);
            assert!(report.holds(), "lambda {lambda}: {report:?}");
        }
    }

    #[test]
    fn corrupted_constant_is_caught() {
        let spec = double_well_radial(2).unwrap();
        let points = uniform_box(2, 10.0, 10_000, 3);
        let scheme = DriftScheme::wd_tula(0.01);
        let mut bounds = LemmaBounds::derive(&spec, 0.01);
        bounds.lower_coef = 2.0 * spec.constants.diss_coef;
        let report = lemma_probe_suite_with(&spec, &scheme, &points, &bounds);
        let lower = report.get(Inequality::DissipativityLower).unwrap();
        assert!(lower.violations > 0);
        assert!(lower.worst_slack < 0.0);
        assert_eq!(lower.argmin.len(), 2);
    }

    #[test]
    fn reg_and_classic_inequalities() {
        let spec = double_well_radial(2).unwrap();
        let points = uniform_box(2, 10.0, 5_000, 4);
        let reg = lemma_probe_suite(&spec, &DriftScheme::reg_tula(1e-3, None), &points);
        assert!(reg.holds(), "{reg:?}");
        let classic = lemma_probe_suite(&spec, &DriftScheme::tula(0.1), &points);
        assert!(classic.holds());
        let ula = lemma_probe_suite(&spec, &DriftScheme::ula(0.1), &points);
        assert!(ula.results.is_empty());
    }

    #[test]
    fn inadmissible_spec_still_reports() {
        let points = uniform_box(1, 5.0, 1_000, 5);
        let report = lemma_probe_suite(&cubic_demo(), &DriftScheme::wd_tula(0.01), &points);
        assert!(!report.holds());
    }
}

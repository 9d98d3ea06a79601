use proptest::prelude::*;

use tamed_langevin::potentials::{by_name, double_well_radial, finite_difference_gradient, gaussian};
use tamed_langevin::taming::{regularized_gradient, select_reg_exponent, tula_classic_drift, wd_tamed_drift};
use tamed_langevin::{Drift, DriftScheme, PotentialSpec};

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn diff(a: &[f64], b: &[f64]) -> f64 {
    norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())
}

fn dissipative(name: &str, dim: usize) -> PotentialSpec {
    by_name(name, dim).unwrap()
}

fn point(dim: usize, half: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-half..half, dim)
}

fn log_lambda() -> impl Strategy<Value = f64> {
    (-6.0..0.0f64).prop_map(|e| 10f64.powf(e))
}

fn targets() -> impl Strategy<Value = (&'static str, usize)> {
    prop_oneof![
        Just(("gaussian", 1)),
        Just(("gaussian", 3)),
        Just(("double_well_radial", 1)),
        Just(("double_well_radial", 2)),
        Just(("double_well_radial", 10)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gradients_match_finite_differences((name, dim) in targets(), seed in any::<u64>()) {
        let spec = dissipative(name, dim);
        let x = tamed_langevin::points::uniform_box(dim, 5.0, 1, seed).remove(0);
        let g = spec.gradient(&x).unwrap();
        let fd = finite_difference_gradient(&spec, &x, 1e-5).unwrap();
        prop_assert!(diff(&g, &fd) <= 1e-6 * (1.0 + norm(&g)), "{g:?} vs {fd:?}");
    }

    #[test]
    fn tamed_drift_bounds((name, dim) in targets(), lambda in log_lambda(), seed in any::<u64>(), scale in 0.01..30.0f64) {
        let spec = dissipative(name, dim);
        let c = spec.constants;
        let mut x = tamed_langevin::points::uniform_ball(dim, 1.0, 1, seed).remove(0);
        x.iter_mut().for_each(|v| *v *= scale);
        let hl = wd_tamed_drift(&spec, lambda, &x).unwrap();
        let h = spec.gradient(&x).unwrap();
        let nx = norm(&x);
        let (a, big_a, big_l) = (c.diss_exp, c.diss_coef, c.growth_coef);
        let lower = big_a / 2.0 * nx.powf(a) - (big_a / 2.0).max(c.diss_offset);
        prop_assert!(dot(&hl, &x) - lower >= -1e-9);
        let upper = 4.0 * big_a * big_a * nx.powf(a) + 2.0 * big_l * big_l / lambda + 4.0 * big_a * big_a;
        prop_assert!(upper - norm(&hl).powi(2) >= -1e-9);
        let envelope = lambda.sqrt() * (norm(&h) + nx) * nx.powf(2.0 * c.growth_exp);
        prop_assert!(envelope - diff(&hl, &h) >= -1e-9 * (1.0 + envelope));
    }

    #[test]
    fn taming_error_shrinks_with_lambda((name, dim) in targets(), x in point(10, 4.0)) {
        let spec = dissipative(name, dim);
        let x = &x[..dim];
        let h = spec.gradient(x).unwrap();
        let errs: Vec<f64> = (1..=6)
            .map(|k| diff(&wd_tamed_drift(&spec, 10f64.powi(-k), x).unwrap(), &h))
            .collect();
        for w in errs.windows(2) {
            prop_assert!(w[1] <= w[0], "{errs:?}");
        }
    }

    #[test]
    fn reg_drift_bounds(dim in 1usize..4, lambda in (-6.0..-1.0f64).prop_map(|e| 10f64.powf(e)), seed in any::<u64>(), scale in 0.01..30.0f64) {
        let spec = double_well_radial(dim).unwrap();
        let c = spec.constants;
        let r = select_reg_exponent(c.growth_exp, c.lip_exp).unwrap().r;
        let drift = Drift::new(&spec, &DriftScheme::reg_tula(lambda, Some(r))).unwrap();
        let mut x = tamed_langevin::points::uniform_ball(dim, 1.0, 1, seed).remove(0);
        x.iter_mut().for_each(|v| *v *= scale);
        let hr = drift.eval(&x);
        let nx = norm(&x);
        let big_a = c.diss_coef;
        let lower = big_a / 2.0 * nx.powf(c.diss_exp) - (big_a / 2.0).max(c.diss_offset + 1.0);
        prop_assert!(dot(&hr, &x) - lower >= -1e-9);
        let sl = lambda.sqrt();
        let upper = big_a + sl + big_a * nx.powf(c.diss_exp / 2.0) + (c.growth_coef + 1.0) / sl;
        prop_assert!(upper - norm(&hr) >= -1e-9, "{} > {upper}", norm(&hr));
    }

    #[test]
    fn regularized_gradient_matches_finite_differences(dim in 1usize..4, x in point(3, 3.0), lambda in log_lambda(), r in 0.5..4.0f64) {
        let spec = double_well_radial(dim).unwrap();
        let x = &x[..dim];
        let g = regularized_gradient(&spec, r, lambda, x).unwrap();
        let u = |y: &[f64]| spec.value(y) + lambda * norm(y).powf(2.0 * r + 2.0);
        let step = 1e-5;
        let fd: Vec<f64> = (0..dim)
            .map(|i| {
                let (mut p, mut m) = (x.to_vec(), x.to_vec());
                p[i] += step;
                m[i] -= step;
                (u(&p) - u(&m)) / (2.0 * step)
            })
            .collect();
        prop_assert!(diff(&g, &fd) <= 1e-6 * (1.0 + norm(&g)), "{g:?} vs {fd:?}");
    }

    #[test]
    fn classic_tula_norm_is_bounded(x in point(3, 50.0), lambda in log_lambda()) {
        let spec = double_well_radial(3).unwrap();
        let t = tula_classic_drift(&spec, lambda, &x).unwrap();
        prop_assert!(norm(&t) <= 1.0 / lambda * (1.0 + 1e-12));
    }

    #[test]
    fn drifts_commute_with_rotations(dim in 2usize..6, seed in any::<u64>(), lambda in log_lambda(), which in 0usize..4) {
        let spec = if which % 2 == 0 { double_well_radial(dim).unwrap() } else { gaussian(dim).unwrap() };
        let scheme = match which {
            0 => DriftScheme::wd_tula(lambda),
            1 => DriftScheme::reg_tula(lambda, None),
            2 => DriftScheme::tula(lambda),
            _ => DriftScheme::ula(lambda),
        };
        let drift = Drift::new(&spec, &scheme).unwrap();
        let q = random_rotation(dim, seed);
        let x = tamed_langevin::points::uniform_box(dim, 4.0, 1, seed ^ 1).remove(0);
        let lhs = drift.eval(&apply(&q, &x));
        let rhs = apply(&q, &drift.eval(&x));
        prop_assert!(diff(&lhs, &rhs) <= 1e-10 * (1.0 + norm(&rhs)), "{lhs:?} vs {rhs:?}");
    }
}

/// Orthogonal matrix from Gram–Schmidt on Gaussian columns.
fn random_rotation(dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let cols = tamed_langevin::points::uniform_ball(dim, 1.0, dim, seed);
    let mut q: Vec<Vec<f64>> = Vec::new();
    for mut v in cols {
        for u in &q {
            let p = dot(&v, u);
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= p * b);
        }
        let n = norm(&v);
        v.iter_mut().for_each(|a| *a /= n);
        q.push(v);
    }
    q
}

fn apply(q: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    (0..x.len()).map(|i| q.iter().zip(x).map(|(col, xj)| col[i] * xj).sum()).collect()
}

#[test]
fn lambda_one_is_admissible_for_the_gaussian() {
    let spec = gaussian(3).unwrap();
    for x in tamed_langevin::points::uniform_box(3, 10.0, 1000, 9) {
        let hl = wd_tamed_drift(&spec, 1.0, &x).unwrap();
        assert!(dot(&hl, &x) >= 0.5 * norm(&x).powi(2) - 0.5 - 1e-9);
    }
}

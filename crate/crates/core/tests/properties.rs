use cks_core::chaos::{
    pairing, random_dist_vector, random_test_vector, s_from_t, s_transform, ChaosVector, FiniteGaussianModel, MultiIndex,
    NormWeights, Role,
};
use cks_core::legendre::{dual_function, legendre_transform, seq_equivalent};
use cks_core::measures::{check_positive_definite, gaussian_char, mittag_leffler};
use cks_core::rng;
use cks_core::sequences::stirling_sandwich;
use cks_core::weights::{exp_k, log_k, LogTable, TowerConfig, WeightConfig, WeightFunction};
use num_complex::Complex64;
use proptest::prelude::*;

fn weight() -> impl Strategy<Value = WeightFunction> {
    prop_oneof![
        (0.0..0.9f64).prop_map(|b| WeightFunction::power_exp(b).unwrap()),
        (2u32..=3).prop_map(|k| WeightFunction::bell(k).unwrap()),
        (0.5..3.0f64, 0.3..1.0f64).prop_map(|(c, p)| WeightFunction::stretched(c, p).unwrap()),
    ]
}

/// Weights whose dual is finite: growth faster than `exp(c sqrt r)` for every `c`.
fn dualizable() -> impl Strategy<Value = WeightFunction> {
    prop_oneof![
        (0.0..0.9f64).prop_map(|b| WeightFunction::power_exp(b).unwrap()),
        (2u32..=3).prop_map(|k| WeightFunction::bell(k).unwrap()),
        (0.5..3.0f64, 0.6..1.0f64).prop_map(|(c, p)| WeightFunction::stretched(c, p).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn legendre_is_an_infimum(u in weight(), t in 0.1..20.0f64, y in -5.0..5.0f64) {
        let p = legendre_transform(&u, t).unwrap();
        let r = y.exp().min(u.r_max());
        let at_r = u.log_eval(r).unwrap() - t * r.ln();
        prop_assert!(p.log_ell <= at_r + 1e-9 * at_r.abs().max(1.0));
    }

    #[test]
    fn legendre_is_log_concave_in_t(u in weight(), t1 in 0.5..15.0f64, t2 in 0.5..15.0f64) {
        let a = legendre_transform(&u, t1).unwrap().log_ell;
        let b = legendre_transform(&u, t2).unwrap().log_ell;
        let m = legendre_transform(&u, 0.5 * (t1 + t2)).unwrap().log_ell;
        prop_assert!(m >= 0.5 * (a + b) - 1e-8 * m.abs().max(1.0));
    }

    #[test]
    fn dual_is_a_supremum(u in dualizable(), r in 0.01..1e3f64, y in -4.0..4.0f64) {
        let d = dual_function(&u, r).unwrap();
        let s = y.exp().min(u.r_max());
        let at_s = 2.0 * (r * s).sqrt() - u.log_eval(s).unwrap();
        prop_assert!(d.log_dual >= at_s - 1e-9 * at_s.abs().max(1.0));
    }

    #[test]
    fn dual_is_increasing(u in dualizable(), r in 0.01..1e3f64, f in 1.01..4.0f64) {
        let a = dual_function(&u, r).unwrap().log_dual;
        let b = dual_function(&u, r * f).unwrap().log_dual;
        prop_assert!(b >= a - 1e-12);
    }

    #[test]
    fn log_k_inverts_exp_k(k in 1u32..=3, r in 1.0..3.0f64) {
        let t = exp_k(k, r, &TowerConfig::default()).unwrap();
        let back = if t.level() == 0 { log_k(k, t.to_f64()) } else { cks_core::weights::log_k_tower(k, &t) };
        prop_assert!((back - r).abs() < 1e-9 * r);
    }

    #[test]
    fn geometric_factor_is_equivalent(c in -2.0..2.0f64, k in -3.0..3.0f64, wiggle in 0.0..0.5f64) {
        let a: Vec<f64> = (0..=40).map(|n| -(n as f64) * 1.3).collect();
        let b: Vec<f64> = a.iter().enumerate().map(|(n, x)| x + k + c * n as f64 + wiggle * (n as f64).sin()).collect();
        let rep = seq_equivalent(&a, &b, 40).unwrap();
        prop_assert!(rep.is_consistent());
    }

    #[test]
    fn sandwich_has_no_violations(beta in 0.0..0.999f64) {
        prop_assert!(stirling_sandwich(beta, 200).unwrap().verdict.is_consistent());
    }

    #[test]
    fn s_and_t_invert_each_other(seed in any::<u64>(), re in -1.0..1.0f64, im in -1.0..1.0f64) {
        let model = FiniteGaussianModel::new(2, 5).unwrap();
        let big = random_dist_vector(model, &mut rng::stream(seed, 0)).with_role(Role::Distribution);
        let xi = [Complex64::new(re, im), Complex64::new(im, -re)];
        let s = s_transform(&big, &xi).unwrap();
        prop_assert!((s - s_from_t(&big, &xi).unwrap()).norm() <= 1e-12 * s.norm().max(1.0));
    }

    #[test]
    fn pairing_is_bounded_by_the_exact_dual_norm(seed in any::<u64>(), p in 0.0..2.0f64) {
        let model = FiniteGaussianModel::new(3, 6).unwrap();
        let mut r = rng::stream(seed, 1);
        let phi = random_test_vector(model, &mut r);
        let big = random_dist_vector(model, &mut r);
        let nw = NormWeights::new(&WeightFunction::power_exp(0.5).unwrap(), 6).unwrap();
        let lhs = pairing(&big, &phi).unwrap().norm();
        let rhs = nw.dist_norm_exact_dual(&big, p).unwrap() * nw.test_norm(&phi, p).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn test_norm_grows_with_p(seed in any::<u64>(), p in 0.0..2.0f64, dp in 0.01..1.0f64) {
        let model = FiniteGaussianModel::new(3, 6).unwrap();
        let phi = random_test_vector(model, &mut rng::stream(seed, 2));
        let nw = NormWeights::new(&WeightFunction::power_exp(0.0).unwrap(), 6).unwrap();
        prop_assert!(nw.test_norm(&phi, p + dp).unwrap() >= nw.test_norm(&phi, p).unwrap());
    }

    #[test]
    fn gaussian_gram_is_nonnegative(seed in any::<u64>(), n in 2usize..16, scale in 0.1..3.0f64) {
        let mut r = rng::stream(seed, 3);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| scale * rng::normal(&mut r)).collect()).collect();
        let rep = check_positive_definite(|x| Ok(Complex64::new(gaussian_char(x), 0.0)), &pts, 1e-10).unwrap();
        prop_assert!(rep.verdict.is_consistent());
    }

    #[test]
    fn mittag_leffler_decreases_in_t(lam in 0.2..1.0f64, t in 0.0..49.0f64, dt in 0.01..1.0f64) {
        let a = mittag_leffler(lam, t).unwrap();
        let b = mittag_leffler(lam, t + dt).unwrap();
        prop_assert!(a > 0.0 && b > 0.0 && b <= a + 1e-15);
    }

    #[test]
    fn parsers_never_panic(text in ".{0,200}") {
        let _ = LogTable::parse_text(&text);
        let _ = WeightConfig::from_json_str(&text).map(|c| c.build());
        let _ = ChaosVector::from_json_str(&text);
    }
}

#[test]
fn chaos_json_rejects_a_misplaced_degree() {
    let model = FiniteGaussianModel::new(2, 3).unwrap();
    let mut v = ChaosVector::zero(model, Role::Test);
    v.set(MultiIndex(vec![1, 1]), Complex64::new(1.0, 0.0)).unwrap();
    let text = v.to_json_string().replace("\"degree\":2,\"index\"", "\"degree\":1,\"index\"");
    assert!(ChaosVector::from_json_str(&text).is_err());
}

//! Growth-bound characterizations checked on the finite model, and the
//! `𝒜_{u,p}` sup-norm.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::norms::NormWeights;
use super::transforms::{evaluate, s_degree_parts};
use super::{ChaosVector, FiniteGaussianModel, MultiIndex, Role};
use crate::error::{Error, Result};
use crate::numeric::log_factorial;
use crate::optimize::{maximize, ScanOptions};
use crate::rng::complex_normal;
use crate::weights::WeightFunction;
use crate::Verdict;

const E2: f64 = std::f64::consts::E * std::f64::consts::E;
/// Ray searches run over `log t ∈ [-RAY_LOG_SPAN, RAY_LOG_SPAN]`.
const RAY_LOG_SPAN: f64 = 15.0;

#[derive(Debug, Clone, Serialize)]
pub struct BoundCheckReport {
    pub fitted_k: f64,
    pub a: f64,
    pub p: f64,
    pub q: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub hs: f64,
    /// `a e^2 ‖i‖_HS^2`.
    pub contraction: f64,
    /// True when some ray maximum sat on the edge of the search range, so
    /// `fitted_k` may be an underestimate.
    pub k_at_boundary: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy)]
pub struct BoundOptions {
    pub a: f64,
    pub p: f64,
    pub q: f64,
}

/// `max_t log|Σ_n t^n G_n| - ½ log u(a t^2 s)` along one ray.
fn ray_max(parts: &[Complex64], u: &WeightFunction, a: f64, s: f64, opts: &ScanOptions) -> (f64, bool) {
    let log_poly = |y: f64| {
        let t = y.exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for g in parts.iter().rev() {
            acc = acc * t + g;
        }
        acc.norm().ln()
    };
    let hi = if a * s > 0.0 {
        (0.5 * (u.r_max() / (a * s)).ln()).min(RAY_LOG_SPAN)
    } else {
        RAY_LOG_SPAN
    };
    if hi <= -RAY_LOG_SPAN {
        return (f64::NEG_INFINITY, false);
    }
    let f = |y: f64| {
        let r = a * (2.0 * y).exp() * s;
        match u.log_eval(r.min(u.r_max())) {
            Ok(l) => log_poly(y) - 0.5 * l,
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let e = maximize(f, -RAY_LOG_SPAN, hi, opts);
    (e.value, e.at_upper && hi >= RAY_LOG_SPAN)
}

/// `log K` for `|F(ξ)| <= K u(a|ξ|^2_{level})^{1/2}` fitted over `ξ = 0`,
/// the sample points and the rays through them.
fn fit_log_k(
    big_phi: &ChaosVector,
    u: &WeightFunction,
    a: f64,
    level: f64,
    sample: &[Vec<Complex64>],
) -> Result<(f64, bool)> {
    let model = big_phi.model();
    let opts = ScanOptions::default();
    let zero = vec![Complex64::new(0.0, 0.0); model.dim];
    let f0 = s_degree_parts(big_phi, &zero)?[0].norm();
    let mut best = f0.ln() - 0.5 * u.log_eval(0.0)?;
    let mut boundary = false;
    for xi in sample {
        let parts = s_degree_parts(big_phi, xi)?;
        let s = model.norm_sq(xi, level);
        let at_point = parts.iter().sum::<Complex64>().norm().ln() - 0.5 * u.log_eval_or_inf(a * s);
        best = best.max(at_point);
        let (ray, edge) = ray_max(&parts, u, a, s, &opts);
        best = best.max(ray);
        boundary |= edge;
    }
    Ok((best, boundary))
}

fn finish(
    log_k: f64,
    boundary: bool,
    lhs: f64,
    hs: f64,
    opts: &BoundOptions,
) -> BoundCheckReport {
    let contraction = opts.a * E2 * hs;
    let k = log_k.exp();
    let rhs = k * k / (1.0 - contraction);
    BoundCheckReport {
        fitted_k: k,
        a: opts.a,
        p: opts.p,
        q: opts.q,
        lhs,
        rhs,
        hs,
        contraction,
        k_at_boundary: boundary,
        verdict: Verdict::from_bool(lhs <= rhs * (1.0 + 1e-9)),
    }
}

fn contraction_premise(a: f64, hs: f64) -> Result<()> {
    if !(a > 0.0) {
        return Err(Error::Premise(format!("a must be positive, got {a}")));
    }
    let c = a * E2 * hs;
    if !(c < 1.0) {
        return Err(Error::Premise(format!("a e^2 ‖i‖_HS^2 = {c} is not below 1")));
    }
    Ok(())
}

/// Test-function side: from `|Sφ(ξ)| <= K u(a|ξ|^2_{-p})^{1/2}` infer
/// `‖φ‖_{u,q}^2 <= K^2 (1 - a e^2 ‖i_{p,q}‖_HS^2)^{-1}` for `q < p`.
pub fn check_test_bound(
    phi: &ChaosVector,
    weights: &NormWeights,
    opts: &BoundOptions,
    sample: &[Vec<Complex64>],
) -> Result<BoundCheckReport> {
    if !(opts.q < opts.p) {
        return Err(Error::Config(format!(
            "test-function bound needs q < p, got p = {}, q = {}",
            opts.p, opts.q
        )));
    }
    let u = weights
        .weight()
        .ok_or_else(|| Error::Config("bound check needs a weight function".into()))?;
    let hs = phi.model().hs_norm(opts.p, opts.q)?;
    contraction_premise(opts.a, hs)?;
    let (log_k, boundary) = fit_log_k(phi, u, opts.a, -opts.p, sample)?;
    let lhs = weights.test_norm(phi, opts.q)?.powi(2);
    Ok(finish(log_k, boundary, lhs, hs, opts))
}

/// Distribution side: from `|SΦ(ξ)| <= K u*(a|ξ|^2_p)^{1/2}` infer
/// `‖Φ‖_{u*,-q}^2 <= K^2 (1 - a e^2 ‖i_{q,p}‖_HS^2)^{-1}` for `q > p`.
pub fn check_dist_bound(
    big_phi: &ChaosVector,
    weights: &NormWeights,
    opts: &BoundOptions,
    sample: &[Vec<Complex64>],
) -> Result<BoundCheckReport> {
    if !(opts.q > opts.p) {
        return Err(Error::Config(format!(
            "distribution bound needs q > p, got p = {}, q = {}",
            opts.p, opts.q
        )));
    }
    let dual = weights.dual_weight()?;
    let hs = big_phi.model().hs_norm(opts.q, opts.p)?;
    contraction_premise(opts.a, hs)?;
    let (log_k, boundary) = fit_log_k(big_phi, dual, opts.a, opts.p, sample)?;
    let lhs = weights.dist_norm(big_phi, opts.q)?.powi(2);
    Ok(finish(log_k, boundary, lhs, hs, opts))
}

/// Magnitudes cycled through by [`sample_points`].
pub const SAMPLE_SCALES: [f64; 4] = [0.25, 1.0, 4.0, 16.0];

/// `count` complex Gaussian points, scaled in turn by [`SAMPLE_SCALES`].
pub fn sample_points<R: Rng + ?Sized>(model: &FiniteGaussianModel, count: usize, rng: &mut R) -> Vec<Vec<Complex64>> {
    (0..count)
        .map(|i| {
            let scale = SAMPLE_SCALES[i % SAMPLE_SCALES.len()];
            (0..model.dim).map(|_| complex_normal(rng) * scale).collect()
        })
        .collect()
}

fn random_index<R: Rng + ?Sized>(model: &FiniteGaussianModel, n: usize, rng: &mut R) -> MultiIndex {
    let mut m = vec![0u32; model.dim];
    for _ in 0..n {
        m[rng.random_range(0..model.dim)] += 1;
    }
    MultiIndex(m)
}

/// Up to `per_degree` random multi-indices per degree, coefficient scale
/// `exp(log_scale(n))`.
fn random_vector<R: Rng + ?Sized>(
    model: FiniteGaussianModel,
    role: Role,
    per_degree: usize,
    log_scale: impl Fn(usize) -> f64,
    rng: &mut R,
) -> ChaosVector {
    let mut v = ChaosVector::zero(model, role);
    for n in 0..=model.degree {
        let count = if n == 0 { 1 } else { per_degree };
        let scale = log_scale(n).exp();
        for _ in 0..count {
            let m = random_index(&model, n, rng);
            let c = v.get(&m) + complex_normal(rng) * scale;
            v.set(m, c).expect("index inside the model");
        }
    }
    v
}

/// Sparse test vector with `f_n ∼ 1/(n!)^2`.
pub fn random_test_vector<R: Rng + ?Sized>(model: FiniteGaussianModel, rng: &mut R) -> ChaosVector {
    random_vector(model, Role::Test, 3, |n| -2.0 * log_factorial(n as u64), rng)
}

/// Sparse distribution vector with `F_n ∼ n!`.
pub fn random_dist_vector<R: Rng + ?Sized>(model: FiniteGaussianModel, rng: &mut R) -> ChaosVector {
    random_vector(model, Role::Distribution, 3, |n| log_factorial(n as u64), rng)
}

#[derive(Debug, Clone, Serialize)]
pub struct SupNormReport {
    /// `max |φ(x)| u(|x|^2_{-p})^{-1/2}` over the probed points.
    pub value: f64,
    pub argmax: Vec<f64>,
}

/// Empirical `|||φ|||_{𝒜_{u,p}}`: the sample points, `x = 0`, and rays in
/// both directions through each sample point and each coordinate axis.
pub fn sup_norm_a(phi: &ChaosVector, u: &WeightFunction, p: f64, sample: &[Vec<f64>]) -> Result<SupNormReport> {
    let model = *phi.model();
    let opts = ScanOptions::default();
    let log_ratio = |x: &[f64]| -> f64 {
        let s = model.norm_sq_real(x, -p);
        match (evaluate(phi, x), u.log_eval(s)) {
            (Ok(v), Ok(l)) => v.norm().ln() - 0.5 * l,
            _ => f64::NEG_INFINITY,
        }
    };
    let zero = vec![0.0; model.dim];
    let mut best = (log_ratio(&zero), zero);

    let mut directions: Vec<Vec<f64>> = Vec::new();
    for x in sample {
        if x.len() != model.dim {
            return Err(Error::ModelMismatch(format!(
                "sample point of length {} in a model of dimension {}",
                x.len(),
                model.dim
            )));
        }
        let v = log_ratio(x);
        if v > best.0 {
            best = (v, x.clone());
        }
        directions.push(x.clone());
    }
    for j in 0..model.dim {
        let mut e = vec![0.0; model.dim];
        e[j] = 1.0;
        directions.push(e);
    }
    for dir in directions {
        let s = model.norm_sq_real(&dir, -p);
        if s == 0.0 {
            continue;
        }
        let hi = (0.5 * (u.r_max() / s).ln()).min(RAY_LOG_SPAN);
        for sign in [1.0, -1.0] {
            let point = |y: f64| dir.iter().map(|d| sign * d * y.exp()).collect::<Vec<f64>>();
            let e = maximize(|y| log_ratio(&point(y)), -RAY_LOG_SPAN, hi, &opts);
            if e.value > best.0 {
                best = (e.value, point(e.x));
            }
        }
    }
    Ok(SupNormReport {
        value: best.0.exp(),
        argmax: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::coherent_state;
    use crate::rng;

    #[test]
    fn constant_function_bounds() {
        let model = FiniteGaussianModel::new(3, 4).unwrap();
        let v0 = WeightFunction::power_exp(0.0).unwrap();
        let nw = NormWeights::new(&v0, 4).unwrap();
        let sample = sample_points(&model, 20, &mut rng::stream(1, 0));
        let one = ChaosVector::constant(model, Role::Test, Complex64::new(1.0, 0.0));
        let opts = BoundOptions { a: 0.25, p: 2.0, q: 0.0 };
        let r = check_test_bound(&one, &nw, &opts, &sample).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent);
        assert!((r.fitted_k - 1.0).abs() < 1e-12 && (r.lhs - 1.0).abs() < 1e-12);
        let d = one.clone().with_role(Role::Distribution);
        let opts = BoundOptions { a: 0.25, p: 0.0, q: 2.0 };
        assert_eq!(check_dist_bound(&d, &nw, &opts, &sample).unwrap().verdict, Verdict::Consistent);
    }

    #[test]
    fn contraction_premise_is_enforced() {
        let model = FiniteGaussianModel::new(3, 2).unwrap();
        let v0 = WeightFunction::power_exp(0.0).unwrap();
        let nw = NormWeights::new(&v0, 2).unwrap();
        let one = ChaosVector::constant(model, Role::Test, Complex64::new(1.0, 0.0));
        let opts = BoundOptions { a: 1.0, p: 1.0, q: 0.0 };
        assert!(matches!(check_test_bound(&one, &nw, &opts, &[]), Err(Error::Premise(_))));
    }

    #[test]
    fn sup_norm_of_constant() {
        let model = FiniteGaussianModel::new(2, 3).unwrap();
        let v0 = WeightFunction::power_exp(0.0).unwrap();
        let one = ChaosVector::constant(model, Role::Test, Complex64::new(1.0, 0.0));
        let r = sup_norm_a(&one, &v0, 1.0, &[vec![0.5, -1.0]]).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        assert_eq!(r.argmax, vec![0.0, 0.0]);
    }

    #[test]
    fn sup_norm_of_real_coherent_state() {
        let model = FiniteGaussianModel::new(2, 24).unwrap();
        let xi = [0.6, 0.3];
        let c: Vec<Complex64> = xi.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let phi = coherent_state(model, &c, 24).unwrap();
        let v0 = WeightFunction::power_exp(0.0).unwrap();
        // p = 0: exp(<x,ξ> - |ξ|^2/2 - |x|^2/2) peaks at x = ξ with value 1
        let r = sup_norm_a(&phi, &v0, 0.0, &[xi.to_vec()]).unwrap();
        assert!((r.value - 1.0).abs() < 0.01);
        assert!((r.argmax[0] - 0.6).abs() < 1e-3 && (r.argmax[1] - 0.3).abs() < 1e-3);
        // p = 1: the peak moves to x_j = λ_j^2 ξ_j, value exp(Σ (λ_j^2 - 1) ξ_j^2 / 2)
        let dir = vec![4.0 * 0.6, 16.0 * 0.3];
        let r = sup_norm_a(&phi, &v0, 1.0, &[dir]).unwrap();
        let expected = (0.5 * (3.0 * 0.36 + 15.0 * 0.09f64)).exp();
        assert!((r.value / expected - 1.0).abs() < 0.01, "{} vs {expected}", r.value);
    }
}

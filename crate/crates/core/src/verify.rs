//! The acceptance suite behind `cks verify-all`.
//!
//! Every criterion is a pure function of the seed, so the serialized
//! [`SuiteReport`] is byte-identical across runs and thread counts.

use num_bigint::BigUint;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::chaos::{
    check_dist_bound, check_test_bound, hs_norm_inclusion, random_dist_vector, random_test_vector, s_from_t,
    s_transform, sample_points, BoundOptions, CoherentPairing, FiniteGaussianModel, NormWeights,
};
use crate::error::Result;
use crate::legendre::{dual_function, legendre_sequence, materialize_dual, verify_dual_sequence_range};
use crate::measures::{
    check_positive_definite, integrability_check, random_points, validate_sampler, IntegrabilityVerdict, MeasureKind,
    MeasureModel, VALIDATION_SAMPLES,
};
use crate::numeric::geometric_grid;
use crate::rng;
use crate::sequences::{bell_coefficients, stirling_sandwich};
use crate::weights::{func_equivalent, WeightFunction};

pub const CRITERIA: usize = 13;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub criteria: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

const BETAS: [f64; 3] = [0.0, 0.25, 0.5];

/// Stream namespace of criterion `id`.
fn streams(id: u64) -> u64 {
    id << 48
}

fn title(id: usize) -> &'static str {
    match id {
        1 => "Legendre closed form",
        2 => "dual closed form",
        3 => "dual-sequence relation",
        4 => "Stirling sandwich",
        5 => "Bell numbers",
        6 => "Bell-dual equivalence",
        7 => "Hilbert-Schmidt constant",
        8 => "characterization bounds",
        9 => "transform identities",
        10 => "positive-definiteness",
        11 => "grey sampler validation",
        12 => "integrability",
        13 => "determinism",
        _ => "unknown",
    }
}

/// Runs criterion `id` (1..=12). Errors count as failures with the message
/// in the detail.
pub fn run_criterion(id: usize, seed: u64) -> CriterionResult {
    let outcome = match id {
        1 => legendre_closed_form(),
        2 => dual_closed_form(),
        3 => dual_sequence(),
        4 => sandwich(),
        5 => bell(),
        6 => bell_dual(),
        7 => hs_constant(),
        8 => bounds(seed),
        9 => transforms(seed),
        10 => positive_definite(seed),
        11 => sampler(seed),
        12 => integrability(seed),
        _ => Ok((false, json!({ "error": format!("no criterion {id}") }))),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, json!({ "error": e.to_string() })));
    CriterionResult {
        id,
        title: title(id),
        passed,
        detail,
    }
}

/// Criteria 1 to 12, then a digest of their serialized results as 13.
/// The digest is only meaningful compared across runs.
pub fn verify_all(seed: u64) -> SuiteReport {
    let mut criteria: Vec<CriterionResult> = (1..CRITERIA).map(|id| run_criterion(id, seed)).collect();
    let body = serde_json::to_vec(&criteria).expect("results serialize");
    criteria.push(CriterionResult {
        id: 13,
        title: title(13),
        passed: true,
        detail: json!({ "results_sha256": crate::digest_hex(&body) }),
    });
    let passed = criteria.iter().filter(|c| c.passed).count();
    SuiteReport {
        seed,
        passed,
        failed: criteria.len() - passed,
        criteria,
    }
}

type Outcome = Result<(bool, Value)>;

fn legendre_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for &beta in &BETAS {
        let ell = legendre_sequence(&WeightFunction::power_exp(beta)?, 30)?;
        for (n, l) in ell.iter().enumerate().skip(1) {
            let x = n as f64;
            worst = worst.max((l - (1.0 + beta) * x * (1.0 - x.ln())).abs());
        }
    }
    Ok((worst <= 1e-6, json!({ "max_abs_error": worst, "tolerance": 1e-6 })))
}

fn dual_closed_form() -> Outcome {
    let grid = geometric_grid(1e-2, 1e4, 64);
    let mut worst: f64 = 0.0;
    for &beta in &BETAS {
        let u = WeightFunction::power_exp(beta)?;
        for &r in &grid {
            let exact = (1.0 - beta) * r.powf(1.0 / (1.0 - beta));
            let got = dual_function(&u, r)?.log_dual;
            worst = worst.max((got - exact).abs() / exact);
        }
    }
    Ok((worst <= 1e-6, json!({ "max_rel_error": worst, "tolerance": 1e-6 })))
}

fn dual_sequence() -> Outcome {
    let rep = verify_dual_sequence_range(&WeightFunction::power_exp(0.0)?, 2, 30)?;
    let worst_factor = rep
        .rho
        .iter()
        .enumerate()
        .map(|(i, r)| (r - (2.0 * std::f64::consts::PI * (i + 2) as f64).ln()).abs())
        .fold(0.0, f64::max);
    let log_c = match rep.report.sequence_constants() {
        Some((_, c, _, _)) => c,
        None => f64::NAN,
    };
    let ok = worst_factor <= std::f64::consts::LN_2 && log_c.abs() <= 0.05 && rep.report.is_consistent();
    Ok((
        ok,
        json!({ "max_log_ratio_to_2pi_n": worst_factor, "log_c": log_c, "report": rep.report }),
    ))
}

fn sandwich() -> Outcome {
    let reports = [0.0, 0.5, 0.9]
        .iter()
        .map(|&b| stirling_sandwich(b, 50))
        .collect::<Result<Vec<_>>>()?;
    let ok = reports.iter().all(|r| r.verdict.is_consistent());
    Ok((ok, json!(reports)))
}

/// Bell triangle: each row starts with the last entry of the previous one.
fn bell_triangle(count: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::from(1u32)];
    let mut row = vec![BigUint::from(1u32)];
    while out.len() < count {
        let mut next = vec![row.last().cloned().expect("non-empty row")];
        for x in &row {
            let v = next.last().expect("non-empty row") + x;
            next.push(v);
        }
        out.push(next[0].clone());
        row = next;
    }
    out
}

fn bell() -> Outcome {
    let coeffs = bell_coefficients(2, 25)?;
    let oracle = bell_triangle(26);
    let mismatches: Vec<usize> = coeffs
        .iter()
        .zip(&oracle)
        .enumerate()
        .filter(|(_, (c, o))| c.as_integer().as_ref() != Some(*o))
        .map(|(n, _)| n)
        .collect();
    Ok((
        mismatches.is_empty(),
        json!({ "b2_25": oracle[25].to_string(), "mismatches": mismatches }),
    ))
}

fn bell_dual() -> Outcome {
    let dual = materialize_dual(&WeightFunction::bell(2)?)?;
    let asym = WeightFunction::bell_dual_asymptotic(2)?;
    let rep = func_equivalent(&dual, &asym, &geometric_grid(10.0, 1e6, 64))?;
    Ok((rep.is_consistent(), json!(rep)))
}

fn hs_constant() -> Outcome {
    let v = hs_norm_inclusion(2.0, 0.0, None)?;
    let exact = std::f64::consts::PI.powi(2) / 24.0;
    let err = (v - exact).abs();
    Ok((err <= 1e-9, json!({ "value": v, "exact": exact, "abs_error": err })))
}

/// Suite size for criterion 8.
pub const BOUND_VECTORS: u64 = 100;

fn bounds(seed: u64) -> Outcome {
    let model = FiniteGaussianModel::new(6, 10)?;
    let base = streams(8);
    let sample = sample_points(&model, 200, &mut rng::stream(seed, base + (1 << 40)));
    let test_opts = BoundOptions { a: 0.25, p: 2.0, q: 0.0 };
    let dist_opts = BoundOptions { a: 0.25, p: 0.0, q: 2.0 };
    let mut per_weight = Vec::new();
    let mut total_violations = 0usize;
    for u in [WeightFunction::power_exp(0.0)?, WeightFunction::power_exp(0.5)?, WeightFunction::bell(2)?] {
        let nw = NormWeights::new(&u, model.degree)?;
        nw.log_ell_dual()?;
        let results = (0..BOUND_VECTORS)
            .into_par_iter()
            .map(|i| {
                let mut r = rng::stream(seed, base + i);
                let phi = random_test_vector(model, &mut r);
                let t = check_test_bound(&phi, &nw, &test_opts, &sample)?;
                let big = random_dist_vector(model, &mut r);
                let d = check_dist_bound(&big, &nw, &dist_opts, &sample)?;
                Ok((t, d))
            })
            .collect::<Result<Vec<_>>>()?;
        let violations = results
            .iter()
            .filter(|(t, d)| !t.verdict.is_consistent() || !d.verdict.is_consistent())
            .count();
        let min_ratio = |f: &dyn Fn(&(crate::chaos::BoundCheckReport, crate::chaos::BoundCheckReport)) -> f64| {
            results.iter().map(f).fold(f64::INFINITY, f64::min)
        };
        total_violations += violations;
        per_weight.push(json!({
            "weight": u.name(),
            "violations": violations,
            "min_test_slack": min_ratio(&|(t, _)| t.rhs / t.lhs),
            "min_dist_slack": min_ratio(&|(_, d)| d.rhs / d.lhs),
            "k_at_boundary": results.iter().filter(|(t, d)| t.k_at_boundary || d.k_at_boundary).count(),
        }));
    }
    Ok((total_violations == 0, json!({ "vectors_per_side": BOUND_VECTORS, "weights": per_weight })))
}

fn transforms(seed: u64) -> Outcome {
    let base = streams(9);
    let mut r = rng::stream(seed, base);
    let model = FiniteGaussianModel::new(3, 6)?;
    let big = random_dist_vector(model, &mut r).with_role(crate::chaos::Role::Distribution);
    let mut worst_st: f64 = 0.0;
    for _ in 0..100 {
        let xi: Vec<Complex64> = (0..3).map(|_| rng::complex_normal(&mut r) * 0.5).collect();
        let s = s_transform(&big, &xi)?;
        let back = s_from_t(&big, &xi)?;
        worst_st = worst_st.max((s - back).norm() / s.norm().max(1.0));
    }
    let cmodel = FiniteGaussianModel::new(2, 30)?;
    let mut worst_coh: f64 = 0.0;
    let mut worst_tail: f64 = 0.0;
    for _ in 0..20 {
        let eta: Vec<Complex64> = (0..2).map(|_| rng::complex_normal(&mut r) * 0.5).collect();
        let xi: Vec<Complex64> = (0..2).map(|_| rng::complex_normal(&mut r) * 0.5).collect();
        let c = CoherentPairing::compute(cmodel, &eta, &xi)?;
        worst_coh = worst_coh.max((c.value - c.exact).norm());
        worst_tail = worst_tail.max(c.tail_bound);
    }
    let ok = worst_st <= 1e-12 && worst_coh <= 1e-10 && worst_tail < 1e-10;
    Ok((
        ok,
        json!({
            "st_round_trip_max_rel_error": worst_st,
            "coherent_max_abs_error": worst_coh,
            "coherent_max_tail_bound": worst_tail,
        }),
    ))
}

fn grey_kinds() -> Vec<MeasureKind> {
    [0.3, 0.5, 0.7, 1.0]
        .iter()
        .map(|&lambda| MeasureKind::Grey { lambda })
        .collect()
}

fn positive_definite(seed: u64) -> Outcome {
    let mut kinds = grey_kinds();
    kinds.push(MeasureKind::Poisson { intensity: 1.0 });
    let mut out = Vec::new();
    let mut ok = true;
    for (k, kind) in kinds.into_iter().enumerate() {
        let model = MeasureModel::new(kind, 3, seed)?;
        let mut r = rng::stream(seed, streams(10) + k as u64);
        let mut min_eig = f64::INFINITY;
        for _ in 0..50 {
            let pts = random_points(3, 12, 0.75, &mut r);
            let rep = check_positive_definite(|x| model.char_fn(x), &pts, 1e-8)?;
            min_eig = min_eig.min(rep.min_eigenvalue);
        }
        ok &= min_eig >= -1e-8;
        out.push(json!({ "measure": kind, "min_eigenvalue": min_eig }));
    }
    Ok((ok, json!(out)))
}

fn sampler(seed: u64) -> Outcome {
    let mut out = Vec::new();
    for lambda in [0.5, 0.7] {
        let model = MeasureModel::new(MeasureKind::Grey { lambda }, 20, seed)?;
        let rep = validate_sampler(&model, VALIDATION_SAMPLES)?;
        out.push(json!({ "lambda": lambda, "max_z": rep.max_z }));
    }
    Ok((true, json!(out)))
}

fn integrability(seed: u64) -> Outcome {
    let grey = MeasureModel::new(MeasureKind::Grey { lambda: 0.5 }, 20, seed)?;
    let g = integrability_check(&grey, &WeightFunction::power_exp(0.5)?, 1.0, 100_000)?;
    let poisson = MeasureModel::new(MeasureKind::Poisson { intensity: 1.0 }, 20, seed)?;
    let p = integrability_check(&poisson, &WeightFunction::bell_dual_asymptotic(2)?, 1.0, 100_000)?;
    let gauss = MeasureModel::new(MeasureKind::Gaussian, 1, seed)?;
    let c = integrability_check(&gauss, &WeightFunction::stretched(2.0, 1.0)?, 0.0, 100_000)?;
    let ok = g.verdict == IntegrabilityVerdict::Converged
        && p.verdict == IntegrabilityVerdict::Converged
        && c.verdict == IntegrabilityVerdict::Diverging;
    let brief = |r: &crate::measures::IntegrabilityReport| {
        json!({ "weight": r.weight, "measure": r.model.kind, "estimate": r.estimate, "cv": r.cv, "verdict": r.verdict })
    };
    Ok((ok, json!({ "grey": brief(&g), "poisson": brief(&p), "gaussian": brief(&c) })))
}

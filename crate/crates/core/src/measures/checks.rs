//! Gram-matrix positivity and Monte Carlo integrability checks.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::{validate_sampler, MeasureModel, ValidationReport, VALIDATION_SAMPLES};
use crate::chaos::{evaluate, ChaosVector};
use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::rng;
use crate::weights::WeightFunction;
use crate::Verdict;

/// Number of Monte Carlo batches.
pub const BATCHES: usize = 10;
const INTEGRABILITY_STREAM: u64 = 1 << 42;
const LS_STREAM: u64 = 1 << 43;

#[derive(Debug, Clone, Serialize)]
pub struct PositiveDefiniteReport {
    pub points: usize,
    pub min_eigenvalue: f64,
    pub verdict: Verdict,
}

/// Smallest eigenvalue of `G_jk = C(ξ_j - ξ_k)`.
pub fn check_positive_definite<F>(char_fn: F, points: &[Vec<f64>], tol: f64) -> Result<PositiveDefiniteReport>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    let n = points.len();
    if n < 2 {
        return Err(Error::GridTooSmall { needed: 2, got: n });
    }
    let mut g = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for k in 0..n {
            let diff: Vec<f64> = points[j].iter().zip(&points[k]).map(|(a, b)| a - b).collect();
            g[j * n + k] = char_fn(&diff)?;
        }
    }
    let mut defect: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            let d = (g[j * n + k] - g[k * n + j].conj()).norm();
            defect = defect.max(d / (1.0 + g[j * n + k].norm()));
        }
    }
    if defect > 1e-12 {
        return Err(Error::NonHermitian(defect));
    }
    // real symmetric embedding [[Re, -Im], [Im, Re]] has the spectrum of G twice
    let m = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = g[(r % n) * n + (c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let eig = SymmetricEigen::new(m);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(PositiveDefiniteReport {
        points: n,
        min_eigenvalue: min,
        verdict: Verdict::from_bool(min >= -tol),
    })
}

/// `count` standard normal points in `dim` dimensions, times `scale`.
pub fn random_points<R: Rng + ?Sized>(dim: usize, count: usize, scale: f64, rng: &mut R) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| scale * rng::normal(rng)).collect())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrabilityVerdict {
    Converged,
    Diverging,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegrabilityReport {
    pub model: MeasureModel,
    pub weight: String,
    pub p: f64,
    pub samples: usize,
    pub estimate: f64,
    pub std_error: f64,
    pub batch_means: Vec<f64>,
    /// Coefficient of variation of the batch means.
    pub cv: f64,
    pub verdict: IntegrabilityVerdict,
    pub validation: ValidationReport,
}

struct BatchSummary {
    mean: f64,
    std_error: f64,
    cv: f64,
    verdict: IntegrabilityVerdict,
}

fn grade(means: &[f64]) -> BatchSummary {
    let b = means.len() as f64;
    let mean = pairwise_sum(means) / b;
    let dev: Vec<f64> = means.iter().map(|m| (m - mean).powi(2)).collect();
    let sd = (pairwise_sum(&dev) / (b - 1.0)).sqrt();
    let cv = sd / mean.abs();
    let increasing = means.windows(2).all(|w| w[1] > w[0]);
    let verdict = if means.iter().any(|m| !m.is_finite()) || !cv.is_finite() {
        IntegrabilityVerdict::Diverging
    } else if cv < 0.05 {
        IntegrabilityVerdict::Converged
    } else if cv > 0.5 || increasing {
        IntegrabilityVerdict::Diverging
    } else {
        IntegrabilityVerdict::Inconclusive
    };
    BatchSummary {
        mean,
        std_error: sd / b.sqrt(),
        cv,
        verdict,
    }
}

fn eigen_weights(dim: usize, p: f64) -> Vec<f64> {
    (0..dim).map(|j| (2.0 * j as f64 + 2.0).powf(-2.0 * p)).collect()
}

/// Monte Carlo estimate of `E_ν[u(|x|^2_{-p})^{1/2}]` with
/// `|x|^2_{-p} = Σ_j (2j+2)^{-2p} x_j^2`, graded by batch-mean stability.
/// The sampler is validated first.
pub fn integrability_check(model: &MeasureModel, u: &WeightFunction, p: f64, samples: usize) -> Result<IntegrabilityReport> {
    if samples < BATCHES * 2 {
        return Err(Error::GridTooSmall {
            needed: BATCHES * 2,
            got: samples,
        });
    }
    let validation = validate_sampler(model, VALIDATION_SAMPLES)?;
    let w = eigen_weights(model.dim, p);
    let means: Vec<f64> = model
        .batch_means(samples, BATCHES, INTEGRABILITY_STREAM, 1, |x, out| {
            let r: f64 = x.iter().zip(&w).map(|(v, wj)| wj * v * v).sum();
            out[0] = match u.log_eval(r) {
                Ok(l) => (0.5 * l).exp(),
                Err(_) => f64::INFINITY,
            };
        })
        .into_iter()
        .map(|b| b[0])
        .collect();
    let s = grade(&means);
    Ok(IntegrabilityReport {
        model: *model,
        weight: u.name().to_string(),
        p,
        samples: samples / BATCHES * BATCHES,
        estimate: s.mean,
        std_error: s.std_error,
        batch_means: means,
        cv: s.cv,
        verdict: s.verdict,
        validation,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LsReport {
    pub s: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub batch_means: Vec<f64>,
    pub cv: f64,
    pub verdict: IntegrabilityVerdict,
}

/// Monte Carlo `E_ν[|φ(x)|^s]` for every `s` in `s_list`.
pub fn ls_inclusion_check(model: &MeasureModel, phi: &ChaosVector, s_list: &[f64], samples: usize) -> Result<Vec<LsReport>> {
    if phi.model().dim != model.dim {
        return Err(Error::ModelMismatch(format!(
            "chaos model of dimension {} against a measure of dimension {}",
            phi.model().dim,
            model.dim
        )));
    }
    if s_list.iter().any(|&s| !(s >= 1.0 && s.is_finite())) {
        return Err(Error::Config("L^s exponents must be finite and at least 1".into()));
    }
    if samples < BATCHES * 2 {
        return Err(Error::GridTooSmall {
            needed: BATCHES * 2,
            got: samples,
        });
    }
    validate_sampler(model, VALIDATION_SAMPLES)?;
    let batches = model.batch_means(samples, BATCHES, LS_STREAM, s_list.len(), |x, out| {
        let v = evaluate(phi, x).map(|z| z.norm()).unwrap_or(f64::INFINITY);
        for (o, s) in out.iter_mut().zip(s_list) {
            *o = v.powf(*s);
        }
    });
    Ok(s_list
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let means: Vec<f64> = batches.iter().map(|b| b[i]).collect();
            let g = grade(&means);
            LsReport {
                s,
                estimate: g.mean,
                std_error: g.std_error,
                batch_means: means,
                cv: g.cv,
                verdict: g.verdict,
            }
        })
        .collect())
}

//! Gaussian, grey-noise and Poisson measures on the finite model: their
//! characteristic functions, seeded samplers with mandatory validation, and
//! Monte Carlo checks of positive-definiteness and integrability.

mod checks;
mod mittag_leffler;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::rng;

pub use checks::{
    check_positive_definite, integrability_check, ls_inclusion_check, random_points, IntegrabilityReport,
    IntegrabilityVerdict, LsReport, PositiveDefiniteReport, BATCHES,
};
pub use mittag_leffler::{mittag_leffler, mittag_leffler_integral, mittag_leffler_series, ML_T_MAX};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureKind {
    Gaussian,
    Grey { lambda: f64 },
    Poisson { intensity: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureModel {
    pub kind: MeasureKind,
    pub dim: usize,
    pub seed: u64,
}

/// `exp(-½|ξ|^2)`.
pub fn gaussian_char(xi: &[f64]) -> f64 {
    (-0.5 * xi.iter().map(|v| v * v).sum::<f64>()).exp()
}

/// `L_λ(|ξ|^2)`.
pub fn grey_char(lambda: f64, xi: &[f64]) -> Result<f64> {
    mittag_leffler(lambda, xi.iter().map(|v| v * v).sum())
}

/// `exp(Σ_j Δ (e^{iξ_j} - 1))`.
pub fn poisson_char(xi: &[f64], intensity: f64) -> Result<Complex64> {
    if !(intensity > 0.0 && intensity.is_finite()) {
        return Err(Error::Config(format!("Poisson intensity must be positive, got {intensity}")));
    }
    let s: Complex64 = xi
        .iter()
        .map(|&v| intensity * (Complex64::new(0.0, v).exp() - 1.0))
        .sum();
    Ok(s.exp())
}

/// Positive `λ`-stable variable with `E e^{-sS} = e^{-s^λ}` (Kanter).
fn positive_stable<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> f64 {
    let pi = std::f64::consts::PI;
    let u = loop {
        let u: f64 = rng.random::<f64>() * pi;
        if u > 0.0 {
            break u;
        }
    };
    let w: f64 = Exp1.sample(rng);
    let a = (lambda * u).sin() / u.sin().powf(1.0 / lambda);
    a * (((1.0 - lambda) * u).sin() / w).powf((1.0 - lambda) / lambda)
}

/// Mittag-Leffler variable `Y = S^{-λ}`, `E e^{-tY} = L_λ(t)`.
pub(crate) fn mittag_leffler_variable<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> f64 {
    if lambda == 1.0 {
        return 1.0;
    }
    positive_stable(lambda, rng).powf(-lambda)
}

impl MeasureModel {
    pub fn new(kind: MeasureKind, dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 || dim > 1024 {
            return Err(Error::Config(format!("measure dimension must be in 1..=1024, got {dim}")));
        }
        match kind {
            MeasureKind::Grey { lambda } if !(lambda > 0.0 && lambda <= 1.0) => {
                return Err(Error::domain("grey-noise parameter", lambda, 0.0, 1.0));
            }
            MeasureKind::Poisson { intensity } if !(intensity > 0.0 && intensity.is_finite()) => {
                return Err(Error::Config(format!("Poisson intensity must be positive, got {intensity}")));
            }
            _ => {}
        }
        Ok(MeasureModel { kind, dim, seed })
    }

    pub fn char_fn(&self, xi: &[f64]) -> Result<Complex64> {
        match self.kind {
            MeasureKind::Gaussian => Ok(Complex64::new(gaussian_char(xi), 0.0)),
            MeasureKind::Grey { lambda } => Ok(Complex64::new(grey_char(lambda, xi)?, 0.0)),
            MeasureKind::Poisson { intensity } => poisson_char(xi, intensity),
        }
    }

    /// One draw into `out` (length `dim`).
    ///
    /// Grey noise is the scale mixture `x = sqrt(2Y) z` with `z` standard
    /// normal and `Y` Mittag-Leffler distributed, so that
    /// `E e^{i⟨ξ,x⟩} = E e^{-Y|ξ|^2} = L_λ(|ξ|^2)`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self.kind {
            MeasureKind::Gaussian => out.iter_mut().for_each(|v| *v = rng::normal(rng)),
            MeasureKind::Grey { lambda } => {
                let scale = (2.0 * mittag_leffler_variable(lambda, rng)).sqrt();
                out.iter_mut().for_each(|v| *v = scale * rng::normal(rng));
            }
            MeasureKind::Poisson { intensity } => {
                let dist = Poisson::new(intensity).expect("validated intensity");
                out.iter_mut().for_each(|v| *v = dist.sample(rng));
            }
        }
    }

    /// `n` draws from stream `stream`.
    pub fn sample(&self, n: usize, stream: u64) -> Vec<Vec<f64>> {
        let mut r = rng::stream(self.seed, stream);
        (0..n)
            .map(|_| {
                let mut x = vec![0.0; self.dim];
                self.draw(&mut r, &mut x);
                x
            })
            .collect()
    }

    /// Per-batch means of the `k` components of `f` over `n` draws split
    /// into `batches` equal batches; batch `b` uses stream `base + b`.
    pub(crate) fn batch_means<F>(&self, n: usize, batches: usize, base: u64, k: usize, f: F) -> Vec<Vec<f64>>
    where
        F: Fn(&[f64], &mut [f64]) + Sync,
    {
        let per = n / batches;
        (0..batches)
            .into_par_iter()
            .map(|b| {
                let mut r = rng::stream(self.seed, base + b as u64);
                let mut x = vec![0.0; self.dim];
                let mut vals = vec![0.0; k];
                let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(per); k];
                for _ in 0..per {
                    self.draw(&mut r, &mut x);
                    f(&x, &mut vals);
                    for (c, v) in cols.iter_mut().zip(&vals) {
                        c.push(*v);
                    }
                }
                cols.iter().map(|c| pairwise_sum(c) / per as f64).collect()
            })
            .collect()
    }
}

pub const VALIDATION_SAMPLES: usize = 100_000;
pub const VALIDATION_PROBES: usize = 8;
pub const VALIDATION_SIGMAS: f64 = 4.0;
const VALIDATION_STREAM: u64 = 1 << 40;
const PROBE_STREAM: u64 = 1 << 41;
const PROBE_NORMS: [f64; VALIDATION_PROBES] = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0];

#[derive(Debug, Clone, Serialize)]
pub struct ProbeResult {
    pub xi: Vec<f64>,
    pub analytic: Complex64,
    pub empirical: Complex64,
    /// Largest deviation of the real or imaginary part in Monte Carlo σ.
    pub z: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub samples: usize,
    pub probes: Vec<ProbeResult>,
    pub max_z: f64,
}

/// Probe vectors of norms 0.25 .. 3 in seeded random directions.
pub fn probe_vectors(model: &MeasureModel) -> Vec<Vec<f64>> {
    let mut r = rng::stream(model.seed, PROBE_STREAM);
    PROBE_NORMS
        .iter()
        .map(|&norm| {
            let d: Vec<f64> = (0..model.dim).map(|_| rng::normal(&mut r)).collect();
            let len = d.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
            d.iter().map(|v| v * norm / len).collect()
        })
        .collect()
}

fn z_score(diff: f64, second_moment: f64, mean: f64, n: usize) -> f64 {
    let var = (second_moment - mean * mean).max(0.0);
    let sigma = (var / n as f64).sqrt();
    if sigma > 0.0 {
        diff.abs() / sigma
    } else if diff.abs() < 1e-12 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Empirical characteristic function against the analytic one on the
/// probe vectors; more than 4σ on any probe is an error.
pub fn validate_sampler(model: &MeasureModel, samples: usize) -> Result<ValidationReport> {
    let probes = probe_vectors(model);
    let k = probes.len();
    let batches = model.batch_means(samples, BATCHES, VALIDATION_STREAM, 4 * k, |x, out| {
        for (i, xi) in probes.iter().enumerate() {
            let phase: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
            let (s, c) = phase.sin_cos();
            out[4 * i] = c;
            out[4 * i + 1] = s;
            out[4 * i + 2] = c * c;
            out[4 * i + 3] = s * s;
        }
    });
    let n = samples / BATCHES * BATCHES;
    let mean_of = |j: usize| pairwise_sum(&batches.iter().map(|b| b[j]).collect::<Vec<f64>>()) / BATCHES as f64;
    let mut results = Vec::with_capacity(k);
    let mut max_z: f64 = 0.0;
    for (i, xi) in probes.iter().enumerate() {
        let analytic = model.char_fn(xi)?;
        let (c, s, c2, s2) = (mean_of(4 * i), mean_of(4 * i + 1), mean_of(4 * i + 2), mean_of(4 * i + 3));
        let z = z_score(c - analytic.re, c2, c, n).max(z_score(s - analytic.im, s2, s, n));
        max_z = max_z.max(z);
        results.push(ProbeResult {
            xi: xi.clone(),
            analytic,
            empirical: Complex64::new(c, s),
            z,
        });
    }
    let report = ValidationReport {
        samples: n,
        probes: results,
        max_z,
    };
    if !(max_z <= VALIDATION_SIGMAS) {
        return Err(Error::SamplerValidation(format!(
            "{:?}: empirical characteristic function off by {max_z:.2}σ",
            model.kind
        )));
    }
    Ok(report)
}

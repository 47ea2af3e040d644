//! Coherent states, S- and T-transforms, pointwise evaluation.

use num_complex::Complex64;
use serde::Serialize;

use super::{ChaosVector, FiniteGaussianModel, Role};
use crate::error::{Error, Result};

/// Probabilists' Hermite polynomial `He_k(x)`.
pub fn hermite_he(k: usize, x: f64) -> f64 {
    hermite_table(x, k)[k]
}

/// `He_0(x), …, He_n(x)` by `He_{k+1} = x He_k - k He_{k-1}`.
pub(crate) fn hermite_table(x: f64, n: usize) -> Vec<f64> {
    let mut h = Vec::with_capacity(n + 1);
    h.push(1.0);
    if n >= 1 {
        h.push(x);
    }
    for k in 1..n {
        h.push(x * h[k] - k as f64 * h[k - 1]);
    }
    h
}

pub(crate) fn power_table(xi: &[Complex64], n: usize) -> Vec<Vec<Complex64>> {
    xi.iter()
        .map(|&z| {
            let mut row = Vec::with_capacity(n + 1);
            let mut acc = Complex64::new(1.0, 0.0);
            for _ in 0..=n {
                row.push(acc);
                acc *= z;
            }
            row
        })
        .collect()
}

fn check_len(model: &FiniteGaussianModel, len: usize) -> Result<()> {
    if len != model.dim {
        return Err(Error::ModelMismatch(format!(
            "point of length {len} in a model of dimension {}",
            model.dim
        )));
    }
    Ok(())
}

/// `φ(x) = Σ_m c_m Π_j He_{m_j}(x_j)`.
pub fn evaluate(phi: &ChaosVector, x: &[f64]) -> Result<Complex64> {
    let model = phi.model();
    check_len(model, x.len())?;
    let tables: Vec<Vec<f64>> = x.iter().map(|&v| hermite_table(v, model.degree)).collect();
    Ok(phi
        .terms()
        .map(|(m, c)| {
            let w: f64 = m.0.iter().enumerate().map(|(j, &k)| tables[j][k as usize]).product();
            c * w
        })
        .sum())
}

/// `φ_ξ = Σ_m ξ^m/m! e^{⊗̂m}` truncated at degree `n`.
pub fn coherent_state(model: FiniteGaussianModel, xi: &[Complex64], n: usize) -> Result<ChaosVector> {
    check_len(&model, xi.len())?;
    if n > model.degree {
        return Err(Error::ModelMismatch(format!(
            "coherent truncation {n} exceeds the model degree {}",
            model.degree
        )));
    }
    if xi.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Config("coherent state needs a finite ξ".into()));
    }
    let powers = power_table(xi, n);
    let mut v = ChaosVector::zero(model, Role::Test);
    for k in 0..=n {
        for m in model.multi_indices(k) {
            let c = m.monomial(&powers) / m.factorial();
            v.set(m, c)?;
        }
    }
    Ok(v)
}

/// `G_n(ξ) = Σ_{|m|=n} F_m ξ^m` for every degree; `SΦ(ξ) = Σ_n G_n(ξ)`.
pub(crate) fn s_degree_parts(big_phi: &ChaosVector, xi: &[Complex64]) -> Result<Vec<Complex64>> {
    let model = big_phi.model();
    check_len(model, xi.len())?;
    let powers = power_table(xi, model.degree);
    Ok((0..=model.degree)
        .map(|n| big_phi.degree_terms(n).map(|(m, c)| c * m.monomial(&powers)).sum())
        .collect())
}

/// `SΦ(ξ) = ⟨⟨Φ, φ_ξ⟩⟩ = Σ_m F_m ξ^m`.
pub fn s_transform(big_phi: &ChaosVector, xi: &[Complex64]) -> Result<Complex64> {
    Ok(s_degree_parts(big_phi, xi)?.into_iter().sum())
}

fn bilinear_sq(xi: &[Complex64]) -> Complex64 {
    xi.iter().map(|z| z * z).sum()
}

/// `TΦ(ξ) = SΦ(iξ) exp(-½⟨ξ, ξ⟩)` with the bilinear `⟨ξ, ξ⟩ = Σ ξ_j^2`.
pub fn t_transform(big_phi: &ChaosVector, xi: &[Complex64]) -> Result<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let rotated: Vec<Complex64> = xi.iter().map(|z| i * z).collect();
    Ok(s_transform(big_phi, &rotated)? * (-0.5 * bilinear_sq(xi)).exp())
}

/// `SΦ(ξ)` recovered as `TΦ(-iξ) exp(-½⟨ξ, ξ⟩)`.
pub fn s_from_t(big_phi: &ChaosVector, xi: &[Complex64]) -> Result<Complex64> {
    let minus_i = Complex64::new(0.0, -1.0);
    let rotated: Vec<Complex64> = xi.iter().map(|z| minus_i * z).collect();
    Ok(t_transform(big_phi, &rotated)? * (-0.5 * bilinear_sq(xi)).exp())
}

/// Bound on `Σ_{n>N} |⟨η, ξ⟩|^n / n!` by geometric domination of the
/// terms after `N`, with `s = Σ |η_j ξ_j|`. Infinite when `s >= N + 2`.
pub fn coherent_tail_bound(eta: &[Complex64], xi: &[Complex64], n: usize) -> f64 {
    let s: f64 = eta.iter().zip(xi).map(|(a, b)| (a * b).norm()).sum();
    let ratio = s / (n as f64 + 2.0);
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    // s^{N+1}/(N+1)!
    let mut first = 1.0;
    for k in 1..=n + 1 {
        first *= s / k as f64;
    }
    first / (1.0 - ratio)
}

/// `S(φ_η)(ξ)` on the truncated model next to `e^{⟨η,ξ⟩}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoherentPairing {
    pub value: Complex64,
    pub exact: Complex64,
    pub tail_bound: f64,
}

impl CoherentPairing {
    pub fn compute(model: FiniteGaussianModel, eta: &[Complex64], xi: &[Complex64]) -> Result<Self> {
        let phi = coherent_state(model, eta, model.degree)?.with_role(Role::Distribution);
        let value = s_transform(&phi, xi)?;
        let dot: Complex64 = eta.iter().zip(xi).map(|(a, b)| a * b).sum();
        Ok(CoherentPairing {
            value,
            exact: dot.exp(),
            tail_bound: coherent_tail_bound(eta, xi, model.degree),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{pairing, MultiIndex};
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hermite_values() {
        for &x in &[-2.0, -0.3, 0.0, 1.7] {
            assert!((hermite_he(2, x) - (x * x - 1.0)).abs() < 1e-14);
            assert!((hermite_he(3, x) - (x * x * x - 3.0 * x)).abs() < 1e-13);
        }
    }

    #[test]
    fn second_wick_power() {
        let model = FiniteGaussianModel::new(2, 3).unwrap();
        let mut v = ChaosVector::zero(model, Role::Test);
        v.set(MultiIndex(vec![2, 0]), c(1.0, 0.0)).unwrap();
        for &x in &[-1.5, 0.2, 3.0] {
            assert!((evaluate(&v, &[x, 0.7]).unwrap().re - (x * x - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn coherent_norm_is_exponential() {
        let model = FiniteGaussianModel::new(2, 20).unwrap();
        let xi = [c(0.6, 0.0), c(0.0, 0.8)];
        let phi = coherent_state(model, &xi, 20).unwrap();
        assert!((phi.wiener_ito_norm_sq() - 1f64.exp()).abs() < 1e-12);
        let zero = coherent_state(model, &[c(0.0, 0.0); 2], 20).unwrap();
        assert_eq!(zero.nnz(), 1);
    }

    #[test]
    fn coherent_pairing_reaches_e() {
        let model = FiniteGaussianModel::new(1, 20).unwrap();
        let eta = coherent_state(model, &[c(1.0, 0.0)], 20).unwrap().with_role(Role::Distribution);
        let xi = coherent_state(model, &[c(1.0, 0.0)], 20).unwrap();
        let v = pairing(&eta, &xi).unwrap();
        assert!((v.re - 1f64.exp()).abs() < 1e-12);
        assert!(coherent_tail_bound(&[c(1.0, 0.0)], &[c(1.0, 0.0)], 20) < 1e-18);
    }

    #[test]
    fn t_of_constant_is_gaussian() {
        let model = FiniteGaussianModel::new(2, 2).unwrap();
        let one = ChaosVector::constant(model, Role::Distribution, c(1.0, 0.0));
        let t = t_transform(&one, &[c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        assert!((t.re - (-0.5f64).exp()).abs() < 1e-15 && t.im.abs() < 1e-15);
    }

    #[test]
    fn s_at_zero_is_constant_term() {
        let model = FiniteGaussianModel::new(2, 3).unwrap();
        let mut v = ChaosVector::zero(model, Role::Distribution);
        v.set(MultiIndex(vec![0, 0]), c(0.3, -1.0)).unwrap();
        v.set(MultiIndex(vec![1, 2]), c(5.0, 0.0)).unwrap();
        assert_eq!(s_transform(&v, &[c(0.0, 0.0); 2]).unwrap(), c(0.3, -1.0));
    }
}

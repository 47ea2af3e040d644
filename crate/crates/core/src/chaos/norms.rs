//! Mode norms, the weighted test/distribution norms and the pairing.

use std::sync::OnceLock;

use num_complex::Complex64;

use super::{ChaosVector, FiniteGaussianModel, Role};
use crate::error::{Error, Result};
use crate::legendre::{legendre_sequence, materialize_dual};
use crate::numeric::{log_factorial, neumaier_sum};
use crate::weights::WeightFunction;

/// Start of the Euler-Maclaurin tail in [`hs_norm_inclusion`].
const HS_TAIL_START: usize = 1000;

/// `Σ_{j<d} (2j+2)^{-(q-p)}`, with `d = None` for the infinite sum.
pub fn hs_norm_inclusion(q: f64, p: f64, d: Option<usize>) -> Result<f64> {
    let s = q - p;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Config(format!("inclusion needs q > p, got q - p = {s}")));
    }
    let term = |j: usize| (2.0 * j as f64 + 2.0).powf(-s);
    match d {
        Some(d) => Ok(neumaier_sum((0..d).map(term))),
        None => {
            if s <= 1.0 {
                return Err(Error::Divergent(format!("Σ (2j+2)^-{s} diverges for exponent <= 1")));
            }
            let head = neumaier_sum((0..HS_TAIL_START).map(term));
            // Euler-Maclaurin for Σ_{j>=J} (2j+2)^{-s}
            let x = 2.0 * HS_TAIL_START as f64 + 2.0;
            let integral = x.powf(1.0 - s) / (2.0 * (s - 1.0));
            let f = x.powf(-s);
            let d1 = -2.0 * s * x.powf(-s - 1.0);
            let d3 = -8.0 * s * (s + 1.0) * (s + 2.0) * x.powf(-s - 3.0);
            Ok(head + integral + 0.5 * f - d1 / 12.0 + d3 / 720.0)
        }
    }
}

/// `|f_n|_p = |(A^{⊗n})^p f_n|_0` for the degree-`n` part of `v`.
pub fn mode_norm(v: &ChaosVector, n: usize, p: f64) -> f64 {
    mode_norm_sq(v, n, p).sqrt()
}

pub(crate) fn mode_norm_sq(v: &ChaosVector, n: usize, p: f64) -> f64 {
    let model = v.model();
    let log_n_fact = log_factorial(n as u64);
    let lam: Vec<f64> = model.eigenvalues().iter().map(|l| l.ln() * 2.0 * p).collect();
    neumaier_sum(v.degree_terms(n).map(|(m, c)| {
        let mut log_w = m.factorial().ln() - log_n_fact;
        for (j, &k) in m.0.iter().enumerate() {
            log_w += k as f64 * lam[j];
        }
        c.norm_sqr() * log_w.exp()
    }))
}

fn weighted_norm(v: &ChaosVector, p: f64, log_ell: &[f64]) -> Result<f64> {
    let n_max = v.model().degree;
    if log_ell.len() <= n_max {
        return Err(Error::ModelMismatch(format!(
            "weight sequence of length {} for chaos degree {n_max}",
            log_ell.len()
        )));
    }
    Ok(neumaier_sum((0..=n_max).map(|n| mode_norm_sq(v, n, p) * (-log_ell[n]).exp())).sqrt())
}

struct DualData {
    log_ell: Vec<f64>,
}

/// `log ℓ_u(n)` and, on demand, `log ℓ_{u*}(n)` for `n <= n_max`.
pub struct NormWeights {
    name: String,
    weight: Option<WeightFunction>,
    log_ell: Vec<f64>,
    dual: OnceLock<std::result::Result<DualData, Error>>,
    dual_weight: OnceLock<std::result::Result<WeightFunction, Error>>,
}

impl NormWeights {
    pub fn new(u: &WeightFunction, n_max: usize) -> Result<Self> {
        Ok(NormWeights {
            name: u.name().to_string(),
            weight: Some(u.clone()),
            log_ell: legendre_sequence(u, n_max)?,
            dual: OnceLock::new(),
            dual_weight: OnceLock::new(),
        })
    }

    /// A bare sequence `log ℓ(0..)`; distribution norms are unavailable.
    pub fn from_log_ell(name: impl Into<String>, log_ell: Vec<f64>) -> Self {
        NormWeights {
            name: name.into(),
            weight: None,
            log_ell,
            dual: OnceLock::new(),
            dual_weight: OnceLock::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn weight(&self) -> Option<&WeightFunction> {
        self.weight.as_ref()
    }

    pub fn n_max(&self) -> usize {
        self.log_ell.len() - 1
    }

    pub fn log_ell(&self) -> &[f64] {
        &self.log_ell
    }

    /// The materialized dual `u*`.
    pub fn dual_weight(&self) -> Result<&WeightFunction> {
        self.dual_weight
            .get_or_init(|| match &self.weight {
                Some(u) => materialize_dual(u),
                None => Err(Error::Config(format!("{} has no weight function to dualize", self.name))),
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `log ℓ_{u*}(n)` for `n <= n_max`.
    pub fn log_ell_dual(&self) -> Result<&[f64]> {
        self.dual
            .get_or_init(|| {
                let d = self.dual_weight()?;
                Ok(DualData {
                    log_ell: legendre_sequence(d, self.n_max())?,
                })
            })
            .as_ref()
            .map(|d| d.log_ell.as_slice())
            .map_err(Clone::clone)
    }

    /// `‖φ‖_{u,p} = (Σ_n |f_n|_p^2 / ℓ_u(n))^{1/2}`.
    pub fn test_norm(&self, phi: &ChaosVector, p: f64) -> Result<f64> {
        weighted_norm(phi, p, &self.log_ell)
    }

    /// `(Σ_n |F_n|_{-p}^2 / ℓ_{u*}(n))^{1/2}`.
    pub fn dist_norm(&self, big_phi: &ChaosVector, p: f64) -> Result<f64> {
        weighted_norm(big_phi, -p, self.log_ell_dual()?)
    }

    /// Distribution norm with the exact dual weight `1/((n!)^2 ℓ_u(n))` in
    /// place of `ℓ_{u*}(n)`; the pairing is bounded by this norm times the
    /// test norm with constant one.
    pub fn dist_norm_exact_dual(&self, big_phi: &ChaosVector, p: f64) -> Result<f64> {
        let exact: Vec<f64> = self
            .log_ell
            .iter()
            .enumerate()
            .map(|(n, l)| -2.0 * log_factorial(n as u64) - l)
            .collect();
        weighted_norm(big_phi, -p, &exact)
    }

    /// `max_n n! (ℓ_u(n) ℓ_{u*}(n))^{1/2}`.
    pub fn duality_constant(&self, n_max: usize) -> Result<f64> {
        Ok(duality_constant(&self.log_ell[..=n_max], &self.log_ell_dual()?[..=n_max]))
    }
}

/// `K = max_n n! (ℓ(n) ℓ'(n))^{1/2}`, so that
/// `|⟨⟨Φ, φ⟩⟩| <= K · dist_norm · test_norm`.
pub fn duality_constant(log_ell: &[f64], log_ell_dual: &[f64]) -> f64 {
    log_ell
        .iter()
        .zip(log_ell_dual)
        .enumerate()
        .map(|(n, (a, b))| (log_factorial(n as u64) + 0.5 * (a + b)).exp())
        .fold(0.0, f64::max)
}

/// `⟨⟨Φ, φ⟩⟩ = Σ_n n! ⟨F_n, f_n⟩ = Σ_m m! F_m f_m`, bilinear.
pub fn pairing(big_phi: &ChaosVector, phi: &ChaosVector) -> Result<Complex64> {
    if big_phi.model() != phi.model() {
        return Err(Error::ModelMismatch(format!(
            "pairing across models {:?} and {:?}",
            big_phi.model(),
            phi.model()
        )));
    }
    if big_phi.role() != Role::Distribution || phi.role() != Role::Test {
        return Err(Error::ModelMismatch("pairing takes (distribution, test)".into()));
    }
    let terms: Vec<Complex64> = phi
        .terms()
        .map(|(m, f)| big_phi.get(m) * f * m.factorial())
        .collect();
    Ok(Complex64::new(
        neumaier_sum(terms.iter().map(|z| z.re)),
        neumaier_sum(terms.iter().map(|z| z.im)),
    ))
}

impl FiniteGaussianModel {
    /// `Σ_{j<d} λ_j^{-(q-p)}` for this model.
    pub fn hs_norm(&self, q: f64, p: f64) -> Result<f64> {
        hs_norm_inclusion(q, p, Some(self.dim))
    }
}

#[cfg(test)]
mod tests {
    use super::super::MultiIndex;
    use super::*;

    #[test]
    fn hs_examples() {
        assert!((hs_norm_inclusion(1.0, 0.0, Some(2)).unwrap() - 0.75).abs() < 1e-15);
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((hs_norm_inclusion(2.0, 0.0, None).unwrap() - pi2 / 24.0).abs() < 1e-13);
        assert!(matches!(hs_norm_inclusion(1.0, 0.0, None), Err(Error::Divergent(_))));
        assert!(hs_norm_inclusion(0.0, 1.0, Some(3)).is_err());
    }

    #[test]
    fn mode_norm_examples() {
        let model = FiniteGaussianModel::new(1, 3).unwrap();
        let mut v = ChaosVector::zero(model, Role::Test);
        v.set(MultiIndex(vec![1]), Complex64::new(1.0, 0.0)).unwrap();
        assert!((mode_norm(&v, 1, 1.0) - 2.0).abs() < 1e-15);
        let mut w = ChaosVector::zero(model, Role::Test);
        w.set(MultiIndex(vec![2]), Complex64::new(1.0, 0.0)).unwrap();
        assert!((mode_norm(&w, 2, 0.5) - 2.0).abs() < 1e-15);
        assert_eq!(mode_norm(&w, 2, 0.0), 1.0);
    }

    #[test]
    fn test_norm_examples() {
        let model = FiniteGaussianModel::new(2, 4).unwrap();
        let v0 = WeightFunction::power_exp(0.0).unwrap();
        let nw = NormWeights::new(&v0, 4).unwrap();
        let one = ChaosVector::constant(model, Role::Test, Complex64::new(1.0, 0.0));
        assert!((nw.test_norm(&one, 3.0).unwrap() - 1.0).abs() < 1e-15);
        let mut x0 = ChaosVector::zero(model, Role::Test);
        x0.set(MultiIndex(vec![1, 0]), Complex64::new(1.0, 0.0)).unwrap();
        assert!((nw.test_norm(&x0, 0.0).unwrap() - (-0.5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn dist_norm_of_first_mode() {
        let model = FiniteGaussianModel::new(1, 2).unwrap();
        let v0 = WeightFunction::power_exp(0.0).unwrap();
        let nw = NormWeights::new(&v0, 2).unwrap();
        let mut f = ChaosVector::zero(model, Role::Distribution);
        f.set(MultiIndex(vec![1]), Complex64::new(1.0, 0.0)).unwrap();
        // |F_1|_{-1} = 1/2 and ℓ_{v*}(1) = e
        let expected = 0.5 / 1f64.exp().sqrt();
        assert!((nw.dist_norm(&f, 1.0).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn pairing_roles_and_models() {
        let a = FiniteGaussianModel::new(2, 3).unwrap();
        let b = FiniteGaussianModel::new(3, 3).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let t = ChaosVector::constant(a, Role::Test, one);
        let d = ChaosVector::constant(b, Role::Distribution, one);
        assert!(matches!(pairing(&d, &t), Err(Error::ModelMismatch(_))));
        let d2 = ChaosVector::constant(a, Role::Distribution, one);
        assert_eq!(pairing(&d2, &t).unwrap(), one);
        assert!(pairing(&t, &d2).is_err());
    }
}

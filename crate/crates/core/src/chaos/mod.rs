//! Finite-dimensional model of the white-noise triple.
//!
//! The operator `A` keeps its first `d` eigenvalues `λ_j = 2j + 2` and chaos
//! expansions are truncated at degree `N`. A degree-`n` kernel `f_n` is
//! stored through its coefficients `c_m` on the symmetrized tensors
//! `e^{⊗̂m} = sym(e_0^{⊗m_0} ⊗ … ⊗ e_{d-1}^{⊗m_{d-1}})`, `|m| = n`. With
//! this convention `|e^{⊗̂m}|_0^2 = m!/n!` (`m! = Π m_j!`), the Wick monomial
//! `⟨:x^{⊗n}:, e^{⊗̂m}⟩` is `Π_j He_{m_j}(x_j)`, and the Wiener-Itô norm is
//! `Σ_m m! |c_m|^2`.

mod bounds;
mod norms;
mod transforms;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bounds::{
    check_dist_bound, check_test_bound, random_dist_vector, random_test_vector, sample_points, sup_norm_a,
    BoundCheckReport, BoundOptions, SupNormReport,
};
pub use norms::{
    duality_constant, hs_norm_inclusion, mode_norm, pairing, NormWeights,
};
pub use transforms::{
    coherent_state, coherent_tail_bound, evaluate, hermite_he, s_transform, s_from_t, t_transform, CoherentPairing,
};

/// Largest number of multi-indices a model may enumerate.
pub const MAX_MODEL_SIZE: usize = 1 << 20;

/// `d` eigenmodes with `λ_j = 2j + 2`, chaos degrees `0..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGaussianModel {
    pub dim: usize,
    pub degree: usize,
}

impl FiniteGaussianModel {
    pub fn new(dim: usize, degree: usize) -> Result<Self> {
        if dim == 0 || dim > 64 {
            return Err(Error::Config(format!("model dimension must be in 1..=64, got {dim}")));
        }
        if degree > 64 {
            return Err(Error::Config(format!("chaos degree must be at most 64, got {degree}")));
        }
        let m = FiniteGaussianModel { dim, degree };
        if m.size() > MAX_MODEL_SIZE as f64 {
            return Err(Error::Config(format!(
                "model with d = {dim}, N = {degree} has too many multi-indices"
            )));
        }
        Ok(m)
    }

    pub fn eigenvalue(&self, j: usize) -> f64 {
        2.0 * j as f64 + 2.0
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        (0..self.dim).map(|j| self.eigenvalue(j)).collect()
    }

    /// Number of multi-indices with `|m| <= N`, `C(N + d, d)`.
    pub fn size(&self) -> f64 {
        let mut c = 1.0;
        for i in 1..=self.dim {
            c = c * (self.degree + i) as f64 / i as f64;
        }
        c
    }

    /// `|ξ|_p^2 = Σ λ_j^{2p} |ξ_j|^2`.
    pub fn norm_sq(&self, xi: &[Complex64], p: f64) -> f64 {
        xi.iter()
            .enumerate()
            .map(|(j, z)| self.eigenvalue(j).powf(2.0 * p) * z.norm_sqr())
            .sum()
    }

    /// `|x|_p^2` for a real vector.
    pub fn norm_sq_real(&self, x: &[f64], p: f64) -> f64 {
        x.iter()
            .enumerate()
            .map(|(j, v)| self.eigenvalue(j).powf(2.0 * p) * v * v)
            .sum()
    }

    /// All multi-indices of total degree `n`, in lexicographic order.
    pub fn multi_indices(&self, n: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.dim];
        fill(&mut out, &mut cur, 0, n as u32);
        out
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::ModelMismatch(format!(
                "vector of length {len} in a model of dimension {}",
                self.dim
            )));
        }
        Ok(())
    }
}

fn fill(out: &mut Vec<MultiIndex>, cur: &mut Vec<u32>, pos: usize, left: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for k in (0..=left).rev() {
        cur[pos] = k;
        fill(out, cur, pos + 1, left - k);
    }
    cur[pos] = 0;
}

/// Occupation numbers `m = (m_0, …, m_{d-1})`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&m| m as usize).sum()
    }

    /// `m! = Π m_j!`.
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&m| (2..=m).map(f64::from).product::<f64>())
            .product()
    }

    /// `Π_j w_j^{m_j}`.
    pub fn monomial(&self, powers: &[Vec<Complex64>]) -> Complex64 {
        self.0
            .iter()
            .enumerate()
            .fold(Complex64::new(1.0, 0.0), |acc, (j, &m)| acc * powers[j][m as usize])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Test,
    Distribution,
}

/// Truncated chaos expansion `{f_n}_{n <= N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaosVector {
    model: FiniteGaussianModel,
    role: Role,
    /// `coeffs[n]` holds the nonzero coefficients of degree `n`.
    coeffs: Vec<BTreeMap<MultiIndex, Complex64>>,
}

/// One serialized coefficient.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientEntry {
    pub degree: usize,
    pub index: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChaosVectorJson {
    dim: usize,
    degree: usize,
    role: Role,
    coefficients: Vec<CoefficientEntry>,
}

impl ChaosVector {
    pub fn zero(model: FiniteGaussianModel, role: Role) -> Self {
        ChaosVector {
            model,
            role,
            coeffs: vec![BTreeMap::new(); model.degree + 1],
        }
    }

    /// The constant `c`.
    pub fn constant(model: FiniteGaussianModel, role: Role, c: Complex64) -> Self {
        let mut v = ChaosVector::zero(model, role);
        v.set(MultiIndex(vec![0; model.dim]), c).expect("valid index");
        v
    }

    pub fn model(&self) -> &FiniteGaussianModel {
        &self.model
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }

    /// Set the coefficient of `e^{⊗̂m}`; zero removes it.
    pub fn set(&mut self, m: MultiIndex, c: Complex64) -> Result<()> {
        self.model.check_dim(m.0.len())?;
        let n = m.degree();
        if n > self.model.degree {
            return Err(Error::ModelMismatch(format!(
                "degree {n} exceeds the truncation {}",
                self.model.degree
            )));
        }
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::Config("coefficients must be finite".into()));
        }
        if c == Complex64::new(0.0, 0.0) {
            self.coeffs[n].remove(&m);
        } else {
            self.coeffs[n].insert(m, c);
        }
        Ok(())
    }

    pub fn get(&self, m: &MultiIndex) -> Complex64 {
        let n = m.degree();
        self.coeffs
            .get(n)
            .and_then(|c| c.get(m))
            .copied()
            .unwrap_or_default()
    }

    /// Nonzero coefficients of degree `n`.
    pub fn degree_terms(&self, n: usize) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.get(n).into_iter().flat_map(|c| c.iter())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter().flat_map(|c| c.iter())
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.iter().map(BTreeMap::len).sum()
    }

    /// `‖φ‖_0^2 = Σ_n n! |f_n|_0^2 = Σ_m m! |c_m|^2`.
    pub fn wiener_ito_norm_sq(&self) -> f64 {
        self.terms().map(|(m, c)| m.factorial() * c.norm_sqr()).sum()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: ChaosVectorJson =
            serde_json::from_str(s).map_err(|e| Error::Config(format!("chaos vector: {e}")))?;
        let model = FiniteGaussianModel::new(raw.dim, raw.degree)?;
        let mut v = ChaosVector::zero(model, raw.role);
        for entry in raw.coefficients {
            let m = MultiIndex(entry.index);
            model.check_dim(m.0.len())?;
            if m.degree() != entry.degree {
                return Err(Error::Config(format!(
                    "index {:?} has degree {}, entry says {}",
                    m.0,
                    m.degree(),
                    entry.degree
                )));
            }
            if v.coeffs.get(entry.degree).is_some_and(|c| c.contains_key(&m)) {
                return Err(Error::Config(format!("duplicate coefficient for {:?}", m.0)));
            }
            v.set(m, Complex64::new(entry.re, entry.im))?;
        }
        Ok(v)
    }

    pub fn to_json_string(&self) -> String {
        let raw = ChaosVectorJson {
            dim: self.model.dim,
            degree: self.model.degree,
            role: self.role,
            coefficients: self
                .terms()
                .map(|(m, c)| CoefficientEntry {
                    degree: m.degree(),
                    index: m.0.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        };
        serde_json::to_string(&raw).expect("serializable")
    }
}

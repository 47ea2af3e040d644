//! Weight sequences: higher-order Bell numbers, `α(n) = (n! ℓ_u(n))^{-1}`
//! and the admissibility conditions (A1), (A2).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::legendre::{legendre_sequence, seq_envelope, EquivalenceReport, Envelope};
use crate::numeric::{geometric_grid, log_add_exp, log_biguint, log_factorial, log_factorials, ls_slope};
use crate::weights::{classify, tower, ClassThresholds, WeightFunction};
use crate::Verdict;

pub const MAX_BELL_INDEX: usize = 512;
pub const MAX_BELL_ORDER: u32 = 6;

/// An exact value `Σ coeff · Π_j c_j^{e_j}` with `c_j = exp_j(0)` for
/// `j = 2..k-1` (`c_2 = e`, `c_3 = e^e`, ...) and big-integer coefficients.
///
/// For `k <= 2` this is a plain integer.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BellCoefficient {
    /// Exponent vector of `(c_2, c_3, ...)` to coefficient.
    terms: BTreeMap<Vec<u32>, BigUint>,
}

impl BellCoefficient {
    fn constant(value: BigUint) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(Vec::new(), value);
        }
        BellCoefficient { terms }
    }

    /// The integer value when no transcendental constant appears.
    pub fn as_integer(&self) -> Option<BigUint> {
        if self.terms.is_empty() {
            return Some(BigUint::zero());
        }
        if self.terms.len() == 1 {
            let (exps, c) = self.terms.iter().next()?;
            if exps.iter().all(|&e| e == 0) {
                return Some(c.clone());
            }
        }
        None
    }

    /// `(exponents of c_2, c_3, ...)` and coefficient, lowest monomial first.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigUint)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    fn add_scaled(&mut self, other: &BellCoefficient, factor: &BigUint) {
        for (exps, c) in &other.terms {
            *self.terms.entry(trim(exps.clone())).or_insert_with(BigUint::zero) += c * factor;
        }
    }

    fn mul(&self, other: &BellCoefficient) -> BellCoefficient {
        let mut out = BellCoefficient::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let len = ea.len().max(eb.len());
                let exps: Vec<u32> = (0..len)
                    .map(|i| ea.get(i).copied().unwrap_or(0) + eb.get(i).copied().unwrap_or(0))
                    .collect();
                *out.terms.entry(trim(exps)).or_insert_with(BigUint::zero) += ca * cb;
            }
        }
        out
    }

    /// Multiply by `c_j` (`j >= 2`); `c_1 = 1` leaves the value unchanged.
    fn times_constant(&self, j: u32) -> BellCoefficient {
        if j < 2 {
            return self.clone();
        }
        let slot = (j - 2) as usize;
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e = e.clone();
                if e.len() <= slot {
                    e.resize(slot + 1, 0);
                }
                e[slot] += 1;
                (e, c.clone())
            })
            .collect();
        BellCoefficient { terms }
    }

    /// Natural log of the value, by log-sum-exp over the monomials.
    pub fn ln(&self) -> f64 {
        let mut acc = f64::NEG_INFINITY;
        for (exps, c) in &self.terms {
            let mut l = log_biguint(c);
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    // ln c_j = exp_{j-1}(0)
                    l += e as f64 * tower::exp_k_at_zero(i as u32 + 1);
                }
            }
            acc = log_add_exp(acc, l);
        }
        acc
    }
}

fn trim(mut exps: Vec<u32>) -> Vec<u32> {
    while exps.last() == Some(&0) {
        exps.pop();
    }
    exps
}

fn constant_name(j: usize) -> String {
    // c_2 = e, c_3 = e^e, c_4 = e^e^e
    vec!["e"; j - 1].join("^")
}

impl fmt::Display for BellCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (exps, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let mut factors = Vec::new();
            if !c.is_one() || exps.is_empty() {
                factors.push(c.to_string());
            }
            for (i, &e) in exps.iter().enumerate() {
                let name = constant_name(i + 2);
                match e {
                    0 => {}
                    1 => factors.push(name),
                    _ if i == 0 => factors.push(format!("{name}^{e}")),
                    _ => factors.push(format!("({name})^{e}")),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl Serialize for BellCoefficient {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Exact `b_k(n) = n! [r^n] exp_k(r)/exp_k(0)` for `n = 0..=n_max`.
///
/// With `u_k = exp(c_{k-1} (u_{k-1} - 1))` the exponential generating
/// function recurrence `e_{n+1} = Σ_j C(n, j) s_{j+1} e_{n-j}`, where
/// `s_i = c_{k-1} b_{k-1}(i)`, is applied `k - 1` times starting from
/// `b_1 ≡ 1`.
pub fn bell_coefficients(k: u32, n_max: usize) -> Result<Vec<BellCoefficient>> {
    if k == 0 || k > MAX_BELL_ORDER {
        return Err(Error::Range(format!("Bell order must be in 1..={MAX_BELL_ORDER}, got {k}")));
    }
    if n_max > MAX_BELL_INDEX {
        return Err(Error::Range(format!("Bell index limit is {MAX_BELL_INDEX}, got {n_max}")));
    }
    let binom = binomial_rows(n_max);
    let mut prev: Vec<BellCoefficient> = vec![BellCoefficient::constant(BigUint::one()); n_max + 1];
    for order in 2..=k {
        let s: Vec<BellCoefficient> = prev.iter().map(|b| b.times_constant(order - 1)).collect();
        let mut e: Vec<BellCoefficient> = Vec::with_capacity(n_max + 1);
        e.push(BellCoefficient::constant(BigUint::one()));
        for n in 0..n_max {
            let mut next = BellCoefficient::default();
            for j in 0..=n {
                next.add_scaled(&s[j + 1].mul(&e[n - j]), &binom[n][j]);
            }
            e.push(next);
        }
        prev = e;
    }
    Ok(prev)
}

fn binomial_rows(n_max: usize) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut row = Vec::with_capacity(n + 1);
        for j in 0..=n {
            if j == 0 || j == n {
                row.push(BigUint::one());
            } else {
                let v = &rows[n - 1][j - 1] + &rows[n - 1][j];
                row.push(v);
            }
        }
        rows.push(row);
    }
    rows
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    FromU { weight: String },
    Bell { order: u32 },
    Custom,
}

/// `α(n)` for `n = 0..=n_max`, stored as natural logs.
#[derive(Debug, Clone, Serialize)]
pub struct WeightSequence {
    pub log_values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_values: Option<Vec<BellCoefficient>>,
    pub provenance: Provenance,
}

impl WeightSequence {
    pub fn custom(log_values: Vec<f64>) -> Self {
        WeightSequence {
            log_values,
            exact_values: None,
            provenance: Provenance::Custom,
        }
    }

    pub fn n_max(&self) -> usize {
        self.log_values.len().saturating_sub(1)
    }
}

/// `b_k(0..=n_max)` with exact values and their logs.
pub fn bell_numbers(k: u32, n_max: usize) -> Result<WeightSequence> {
    let exact = bell_coefficients(k, n_max)?;
    Ok(WeightSequence {
        log_values: exact.iter().map(BellCoefficient::ln).collect(),
        exact_values: Some(exact),
        provenance: Provenance::Bell { order: k },
    })
}

/// `log α(n) = -log n! - log ℓ_u(n)`.
pub fn alpha_from_u(u: &WeightFunction, n_max: usize) -> Result<WeightSequence> {
    let ell = legendre_sequence(u, n_max)?;
    Ok(WeightSequence {
        log_values: ell
            .iter()
            .enumerate()
            .map(|(n, l)| 0.0 - log_factorial(n as u64) - l)
            .collect(),
        exact_values: None,
        provenance: Provenance::FromU {
            weight: u.name().to_string(),
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct A1Report {
    pub verdict: Verdict,
    /// Smallest `σ` of the grid whose tail trend is non-decreasing.
    pub sigma: Option<f64>,
    /// `(σ, min_n log α(n) + n log σ, tail slope)` per grid point.
    pub profile: Vec<(f64, f64, f64)>,
}

pub fn default_sigma_grid() -> Vec<f64> {
    geometric_grid(1.0, 4.0, 16)
}

/// (A1): `inf_n α(n) σ^n > 0` for some `σ >= 1`.
///
/// On a finite range the infimum is always positive; the check asks for a
/// non-decreasing least-squares trend of `log α(n) + n log σ` over the last
/// third of the range.
pub fn check_a1(alpha: &WeightSequence, sigma_grid: &[f64]) -> Result<A1Report> {
    if sigma_grid.iter().any(|&s| !(s >= 1.0 && s.is_finite())) {
        return Err(Error::Config("sigma grid must lie in [1, inf)".into()));
    }
    let len = alpha.log_values.len();
    if len < 3 {
        return Err(Error::GridTooSmall { needed: 3, got: len });
    }
    let tail = len - (len / 3).max(2);
    let ns: Vec<f64> = (tail..len).map(|n| n as f64).collect();
    let mut sigmas = sigma_grid.to_vec();
    sigmas.sort_by(f64::total_cmp);
    let mut best = None;
    let mut profile = Vec::with_capacity(sigmas.len());
    for &sigma in &sigmas {
        let w: Vec<f64> = alpha
            .log_values
            .iter()
            .enumerate()
            .map(|(n, a)| a + n as f64 * sigma.ln())
            .collect();
        let inf = w.iter().cloned().fold(f64::INFINITY, f64::min);
        let slope = ls_slope(&ns, &w[tail..]);
        if best.is_none() && inf.is_finite() && slope >= -1e-9 {
            best = Some(sigma);
        }
        profile.push((sigma, inf, slope));
    }
    Ok(A1Report {
        verdict: Verdict::from_bool(best.is_some()),
        sigma: best,
        profile,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct A2Report {
    pub verdict: Verdict,
    /// `s(n) = (log α(n) - log n!)/n` for `n = 1..=n_max`.
    pub s: Vec<f64>,
    pub tail_slope: f64,
    pub threshold: f64,
}

pub const DEFAULT_A2_THRESHOLD: f64 = -0.5;

/// (A2): `(α(n)/n!)^{1/n} -> 0`, judged by a falling tail of `s(n)` that
/// ends below `threshold`.
pub fn check_a2(alpha: &WeightSequence, threshold: f64) -> Result<A2Report> {
    let n_max = alpha.n_max();
    if n_max < 20 {
        return Err(Error::GridTooSmall {
            needed: 21,
            got: alpha.log_values.len(),
        });
    }
    let lf = log_factorials(n_max);
    let s: Vec<f64> = (1..=n_max)
        .map(|n| (alpha.log_values[n] - lf[n]) / n as f64)
        .collect();
    let tail = s.len() - s.len() / 3;
    let ns: Vec<f64> = (tail..s.len()).map(|i| (i + 1) as f64).collect();
    let tail_slope = ls_slope(&ns, &s[tail..]);
    let last = s[s.len() - 1];
    Ok(A2Report {
        verdict: Verdict::from_bool(tail_slope < 0.0 && last < threshold),
        s,
        tail_slope,
        threshold,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub beta: f64,
    pub n_max: u64,
    pub verdict: Verdict,
    pub first_violation: Option<u64>,
    /// Smallest slack of the left and right inequality in log-space.
    pub min_lower_slack: f64,
    pub min_upper_slack: f64,
}

/// `(n!)^{-(1+β)} <= (e/n)^{(1+β)n} <= (e 2^{n/2} / n!)^{1+β}` for
/// `1 <= n <= n_max`, in log-space with exact `log n!`.
pub fn stirling_sandwich(beta: f64, n_max: u64) -> Result<SandwichReport> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::domain("beta", beta, 0.0, 1.0));
    }
    let p = 1.0 + beta;
    let mut first = None;
    let mut lo_slack = f64::INFINITY;
    let mut hi_slack = f64::INFINITY;
    for n in 1..=n_max {
        let x = n as f64;
        let lf = log_factorial(n);
        let mid = p * x * (1.0 - x.ln());
        let lower = -p * lf;
        let upper = p * (1.0 + 0.5 * x * std::f64::consts::LN_2 - lf);
        let (a, b) = (mid - lower, upper - mid);
        lo_slack = lo_slack.min(a);
        hi_slack = hi_slack.min(b);
        if first.is_none() && (a < 0.0 || b < 0.0) {
            first = Some(n);
        }
    }
    Ok(SandwichReport {
        beta,
        n_max,
        verdict: Verdict::from_bool(first.is_none()),
        first_violation: first,
        min_lower_slack: lo_slack,
        min_upper_slack: hi_slack,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionReport {
    /// `ℓ_u(n) n!` under a geometric upper envelope: `[E]_u ⊂ (E)_0`.
    pub upper: EquivalenceReport,
    /// `ℓ_u(n) (n!)^2` over a geometric lower envelope: `(E)_1 ⊂ [E]_u`.
    pub lower: EquivalenceReport,
    /// Membership of `u` in `C_{+,1/2,1}` on the evidence range, when a
    /// weight function was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub premise: Option<Verdict>,
    pub verdict: Verdict,
}

/// Sequence-level form of `(E)_1 ⊂ [E]_u ⊂ (E)_0`.
pub fn remark_inclusion_bounds(u: &WeightFunction, n_max: usize) -> Result<InclusionReport> {
    let ell = legendre_sequence(u, n_max)?;
    let mut rep = inclusion_bounds_from_log_ell(&ell)?;
    let premise = classify(u, u.r_max().min(1e6), &ClassThresholds::default())?
        .in_c_plus_half_one
        .verdict;
    rep.premise = Some(premise);
    Ok(rep)
}

/// The same check for a given `log ℓ(0..=n_max)`.
pub fn inclusion_bounds_from_log_ell(log_ell: &[f64]) -> Result<InclusionReport> {
    if log_ell.is_empty() {
        return Err(Error::GridTooSmall { needed: 1, got: 0 });
    }
    let n_max = log_ell.len() - 1;
    let lf = log_factorials(n_max);
    let ones = vec![0.0; n_max + 1];
    let one_fact: Vec<f64> = log_ell.iter().zip(&lf).map(|(l, f)| l + f).collect();
    let two_fact: Vec<f64> = log_ell.iter().zip(&lf).map(|(l, f)| l + 2.0 * f).collect();
    let upper = seq_envelope(&ones, &one_fact, 0, n_max, Envelope::Upper)?;
    let lower = seq_envelope(&ones, &two_fact, 0, n_max, Envelope::Lower)?;
    let verdict = Verdict::from_bool(upper.is_consistent() && lower.is_consistent());
    Ok(InclusionReport {
        upper,
        lower,
        premise: None,
        verdict,
    })
}

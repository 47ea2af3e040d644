//! Legendre transform `ℓ_u(t) = inf_{r>0} u(r)/r^t`, the dual function
//! `u*(r) = sup_{s>0} e^{2 sqrt(rs)}/u(s)`, and geometric equivalence of
//! sequences.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{log_factorial, ls_slope};
use crate::optimize::{maximize, minimize, ScanOptions, SearchStatus};
use crate::weights::WeightFunction;
use crate::Verdict;

/// Lower end of the search range in `y = log r`.
const Y_MIN: f64 = -60.0;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LegendrePoint {
    pub t: f64,
    pub log_ell: f64,
    pub argmin_r: f64,
    pub status: SearchStatus,
}

/// `log ℓ_u(t)` and the minimizer `r*`.
pub fn legendre_transform(u: &WeightFunction, t: f64) -> Result<LegendrePoint> {
    legendre_transform_with(u, t, &ScanOptions::default())
}

pub fn legendre_transform_with(u: &WeightFunction, t: f64, opts: &ScanOptions) -> Result<LegendrePoint> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain("legendre parameter t", t, 0.0, f64::INFINITY));
    }
    if t == 0.0 && u.is_increasing() {
        return Ok(LegendrePoint {
            t,
            log_ell: u.log_eval(u.r_min())?,
            argmin_r: u.r_min(),
            status: SearchStatus::Converged,
        });
    }
    let lo = if u.r_min() > 0.0 { u.r_min().ln() } else { Y_MIN };
    let hi = u.r_max().ln();
    let g = |y: f64| u.log_eval_or_inf(y.exp()) - t * y;
    let e = minimize(g, lo, hi, opts);
    if e.status == SearchStatus::NonFinite {
        return Err(Error::Precision(format!("legendre transform of {} at t = {t}", u.name())));
    }
    if e.at_upper {
        return Err(Error::UnboundedBelow(t));
    }
    Ok(LegendrePoint {
        t,
        log_ell: e.value,
        argmin_r: e.x.exp(),
        status: e.status,
    })
}

/// `log ℓ_u(n)` for `n = 0..=n_max`.
pub fn legendre_sequence(u: &WeightFunction, n_max: usize) -> Result<Vec<f64>> {
    (0..=n_max)
        .into_par_iter()
        .map(|n| legendre_transform(u, n as f64).map(|p| p.log_ell))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct LegendreTable {
    pub weight: String,
    pub t_grid: Vec<f64>,
    pub log_ell: Vec<f64>,
    pub argmin_r: Vec<f64>,
    pub status: Vec<SearchStatus>,
}

impl LegendreTable {
    pub fn compute(u: &WeightFunction, t_grid: &[f64]) -> Result<Self> {
        let points: Vec<LegendrePoint> = t_grid
            .par_iter()
            .map(|&t| legendre_transform(u, t))
            .collect::<Result<_>>()?;
        Ok(LegendreTable {
            weight: u.name().to_string(),
            t_grid: t_grid.to_vec(),
            log_ell: points.iter().map(|p| p.log_ell).collect(),
            argmin_r: points.iter().map(|p| p.argmin_r).collect(),
            status: points.iter().map(|p| p.status).collect(),
        })
    }

    /// Worst optimizer status over the table.
    pub fn worst_status(&self) -> SearchStatus {
        self.status.iter().copied().max().unwrap_or(SearchStatus::Converged)
    }

    /// CSV with columns `t,ell,argmin_r,status`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,ell,argmin_r,status\n");
        for i in 0..self.t_grid.len() {
            out.push_str(&format!(
                "{},{:e},{:e},{}\n",
                self.t_grid[i],
                self.log_ell[i].exp(),
                self.argmin_r[i],
                self.status[i].as_str()
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DualPoint {
    pub r: f64,
    pub log_dual: f64,
    pub argmax_s: f64,
    pub status: SearchStatus,
}

/// `log u*(r)` and the maximizer `s*`.
pub fn dual_function(u: &WeightFunction, r: f64) -> Result<DualPoint> {
    dual_function_with(u, r, &ScanOptions::default())
}

pub fn dual_function_with(u: &WeightFunction, r: f64, opts: &ScanOptions) -> Result<DualPoint> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::domain("dual argument r", r, 0.0, f64::INFINITY));
    }
    if r == 0.0 && u.is_increasing() {
        return Ok(DualPoint {
            r,
            log_dual: -u.log_eval(u.r_min())?,
            argmax_s: u.r_min(),
            status: SearchStatus::Converged,
        });
    }
    let lo = if u.r_min() > 0.0 { u.r_min().ln() } else { Y_MIN };
    let hi = u.r_max().ln();
    let two_sqrt_r = 2.0 * r.sqrt();
    let h = |y: f64| two_sqrt_r * (0.5 * y).exp() - u.log_eval_or_inf(y.exp());
    let e = maximize(h, lo, hi, opts);
    if e.status == SearchStatus::NonFinite {
        return Err(Error::Precision(format!("dual function of {} at r = {r}", u.name())));
    }
    if e.at_upper {
        return Err(Error::UnboundedAbove(r));
    }
    Ok(DualPoint {
        r,
        log_dual: e.value,
        argmax_s: e.x.exp(),
        status: e.status,
    })
}

/// Smallest `min_r (log u(r) - t log r) - log ℓ_u(t)` over `audit`; a
/// correct infimum leaves this non-negative.
pub fn audit_legendre(u: &WeightFunction, point: &LegendrePoint, audit: &[f64]) -> f64 {
    audit
        .iter()
        .filter(|&&r| r > 0.0 && r <= u.r_max())
        .map(|&r| u.log_eval_or_inf(r) - point.t * r.ln() - point.log_ell)
        .fold(f64::INFINITY, f64::min)
}

/// Smallest `log u*(r) - max_s (2 sqrt(rs) - log u(s))` over `audit`; a
/// correct supremum leaves this non-negative.
pub fn audit_dual(u: &WeightFunction, point: &DualPoint, audit: &[f64]) -> f64 {
    audit
        .iter()
        .filter(|&&s| s >= 0.0 && s <= u.r_max())
        .map(|&s| point.log_dual - (2.0 * (point.r * s).sqrt() - u.log_eval_or_inf(s)))
        .fold(f64::INFINITY, f64::min)
}

/// Node resolution of the materialized dual.
pub const DUAL_NODES_PER_DECADE: usize = 256;
pub const DUAL_GRID_MIN: f64 = 1e-8;
pub const DUAL_GRID_MAX: f64 = 1e12;

/// `u*` materialized on a lazily filled grid, 256 nodes per decade.
///
/// Each node stores `log u*(r)` and its slope in `log r`, which by the
/// envelope theorem is `sqrt(r s*)`; interpolation is cubic Hermite in
/// `(log r, log u*)`. Below the grid the dual is evaluated directly.
pub struct DualWeight {
    base: WeightFunction,
    r_max: f64,
    nodes: Vec<OnceLock<std::result::Result<(f64, f64), Error>>>,
    opts: ScanOptions,
}

impl std::fmt::Debug for DualWeight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DualWeight")
            .field("base", &self.base.name())
            .field("r_max", &self.r_max)
            .finish()
    }
}

impl DualWeight {
    fn new(base: WeightFunction, r_max: f64) -> Self {
        let decades = (r_max / DUAL_GRID_MIN).log10();
        let n = (decades * DUAL_NODES_PER_DECADE as f64).ceil() as usize + 1;
        DualWeight {
            base,
            r_max,
            nodes: (0..n).map(|_| OnceLock::new()).collect(),
            opts: ScanOptions::default(),
        }
    }

    pub fn base(&self) -> &WeightFunction {
        &self.base
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    fn step(&self) -> f64 {
        std::f64::consts::LN_10 / DUAL_NODES_PER_DECADE as f64
    }

    fn node_y(&self, i: usize) -> f64 {
        DUAL_GRID_MIN.ln() + i as f64 * self.step()
    }

    fn node(&self, i: usize) -> Result<(f64, f64)> {
        self.nodes[i]
            .get_or_init(|| {
                let r = self.node_y(i).exp();
                let p = dual_function_with(&self.base, r, &self.opts)?;
                Ok((p.log_dual, (r * p.argmax_s).sqrt()))
            })
            .clone()
    }

    pub fn log_eval(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0 && r <= self.r_max) {
            return Err(Error::domain("materialized dual", r, 0.0, self.r_max));
        }
        if r < DUAL_GRID_MIN {
            return Ok(dual_function_with(&self.base, r, &self.opts)?.log_dual);
        }
        let h = self.step();
        let pos = (r.ln() - DUAL_GRID_MIN.ln()) / h;
        let i = (pos.floor() as usize).min(self.nodes.len() - 2);
        let (f0, d0) = self.node(i)?;
        let (f1, d1) = self.node(i + 1)?;
        let s = (pos - i as f64).clamp(0.0, 1.0);
        let s2 = s * s;
        let s3 = s2 * s;
        Ok((2.0 * s3 - 3.0 * s2 + 1.0) * f0
            + (s3 - 2.0 * s2 + s) * h * d0
            + (-2.0 * s3 + 3.0 * s2) * f1
            + (s3 - s2) * h * d1)
    }
}

/// `u*` as a weight function on `[0, 1e12]`.
pub fn materialize_dual(u: &WeightFunction) -> Result<WeightFunction> {
    materialize_dual_with(u, DUAL_GRID_MAX)
}

pub fn materialize_dual_with(u: &WeightFunction, r_max: f64) -> Result<WeightFunction> {
    if !(r_max > DUAL_GRID_MIN && r_max <= DUAL_GRID_MAX) {
        return Err(Error::domain("dual r_max", r_max, DUAL_GRID_MIN, DUAL_GRID_MAX));
    }
    // fail early when the dual does not exist at the top of the range
    dual_function(u, r_max)?;
    Ok(WeightFunction::from_dual(DualWeight::new(u.clone(), r_max)))
}

/// Constants witnessing an equivalence, in log-space.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `K1 c1^n a(n) <= b(n) <= K2 c2^n a(n)`.
    Sequence {
        log_k1: f64,
        log_c1: f64,
        log_k2: f64,
        log_c2: f64,
    },
    /// `c1 u(a1 r) <= v(r) <= c2 u(a2 r)`.
    Function { log_c1: f64, a1: f64, log_c2: f64, a2: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub witness: Witness,
    /// Largest absolute residual against the fitted envelope.
    pub max_residual: f64,
    /// Change of the local growth rate between the middle and the last
    /// part of the range; zero for an exactly geometric ratio.
    pub drift: f64,
    pub lower_bounded: bool,
    pub upper_bounded: bool,
    pub verdict: Verdict,
    pub range: [f64; 2],
}

impl EquivalenceReport {
    /// `(log K1, log c1, log K2, log c2)` for a sequence witness.
    pub fn sequence_constants(&self) -> Option<(f64, f64, f64, f64)> {
        match self.witness {
            Witness::Sequence {
                log_k1,
                log_c1,
                log_k2,
                log_c2,
            } => Some((log_k1, log_c1, log_k2, log_c2)),
            Witness::Function { .. } => None,
        }
    }

    /// `(log c1, a1, log c2, a2)` for a function witness.
    pub fn function_constants(&self) -> Option<(f64, f64, f64, f64)> {
        match self.witness {
            Witness::Function { log_c1, a1, log_c2, a2 } => Some((log_c1, a1, log_c2, a2)),
            Witness::Sequence { .. } => None,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.verdict == Verdict::Consistent
    }
}

/// Largest tolerated change of `Δρ/Δn` between the middle and last thirds.
pub const DRIFT_LIMIT: f64 = 0.25;

/// Which side of the equivalence to require.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Envelope {
    Both,
    /// `b(n) <= K c^n a(n)` only.
    Upper,
    /// `K c^n a(n) <= b(n)` only.
    Lower,
}

/// `a ∼ b` over `0..=n_max`, both sequences given as natural logs.
pub fn seq_equivalent(log_a: &[f64], log_b: &[f64], n_max: usize) -> Result<EquivalenceReport> {
    seq_envelope(log_a, log_b, 0, n_max, Envelope::Both)
}

/// Geometric envelope of `b/a` over `n_lo..=n_hi`.
///
/// `log c` is the least-squares slope of `ρ(n) = log b(n) - log a(n)` over
/// the last third of the range and `K1`, `K2` are the extremes of
/// `ρ(n) - n log c`, so the envelope holds literally on the range. The
/// verdict compares that slope with the one over the middle third: a ratio
/// of geometric order keeps a stable slope, a super-geometric one does not.
pub fn seq_envelope(
    log_a: &[f64],
    log_b: &[f64],
    n_lo: usize,
    n_hi: usize,
    side: Envelope,
) -> Result<EquivalenceReport> {
    if n_hi < n_lo || n_hi >= log_a.len() || n_hi >= log_b.len() {
        return Err(Error::Range(format!(
            "range {n_lo}..={n_hi} not covered by sequences of length {} and {}",
            log_a.len(),
            log_b.len()
        )));
    }
    for n in n_lo..=n_hi {
        if log_a[n].is_nan() || log_a[n] == f64::NEG_INFINITY || log_a[n] == f64::INFINITY {
            return Err(Error::NonPositive { index: n });
        }
        if log_b[n].is_nan() || log_b[n] == f64::NEG_INFINITY || log_b[n] == f64::INFINITY {
            return Err(Error::NonPositive { index: n });
        }
    }
    let ns: Vec<f64> = (n_lo..=n_hi).map(|n| n as f64).collect();
    let rho: Vec<f64> = (n_lo..=n_hi).map(|n| log_b[n] - log_a[n]).collect();
    let len = ns.len();

    let third = len / 3;
    let (log_c, drift) = if third >= 2 {
        let tail = len - third;
        let mid = len - 2 * third;
        let s_tail = ls_slope(&ns[tail..], &rho[tail..]);
        let s_mid = ls_slope(&ns[mid..tail], &rho[mid..tail]);
        (s_tail, s_tail - s_mid)
    } else {
        (ls_slope(&ns, &rho), 0.0)
    };

    let shifted: Vec<f64> = ns.iter().zip(&rho).map(|(n, r)| r - n * log_c).collect();
    let log_k1 = shifted.iter().cloned().fold(f64::INFINITY, f64::min);
    let log_k2 = shifted.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let max_residual = (log_k2 - log_k1).abs();

    // a falling slope means the ratio eventually drops under any geometric
    // lower envelope; a rising one escapes any upper envelope
    let upper_bounded = drift <= DRIFT_LIMIT;
    let lower_bounded = drift >= -DRIFT_LIMIT;
    let ok = match side {
        Envelope::Both => upper_bounded && lower_bounded,
        Envelope::Upper => upper_bounded,
        Envelope::Lower => lower_bounded,
    };
    Ok(EquivalenceReport {
        witness: Witness::Sequence {
            log_k1,
            log_c1: log_c,
            log_k2,
            log_c2: log_c,
        },
        max_residual,
        drift,
        lower_bounded,
        upper_bounded,
        verdict: if ok { Verdict::Consistent } else { Verdict::Violated },
        range: [n_lo as f64, n_hi as f64],
    })
}

/// Dual-sequence check `ℓ_{u*}(n) ℓ_u(n) (n!)^2 ∼ 1` over `0..=n_max`.
pub fn verify_dual_sequence(u: &WeightFunction, n_max: usize) -> Result<DualSequenceReport> {
    verify_dual_sequence_range(u, 0, n_max)
}

#[derive(Debug, Clone, Serialize)]
pub struct DualSequenceReport {
    pub weight: String,
    /// `ρ(n) = log ℓ_{u*}(n) + log ℓ_u(n) + 2 log n!` for `n` in range.
    pub rho: Vec<f64>,
    pub report: EquivalenceReport,
}

pub fn verify_dual_sequence_range(u: &WeightFunction, n_lo: usize, n_hi: usize) -> Result<DualSequenceReport> {
    let dual = materialize_dual(u)?;
    let ell_u = legendre_sequence(u, n_hi)?;
    let ell_dual = legendre_sequence(&dual, n_hi)?;
    let product: Vec<f64> = (0..=n_hi)
        .map(|n| ell_dual[n] + ell_u[n] + 2.0 * log_factorial(n as u64))
        .collect();
    let ones = vec![0.0; n_hi + 1];
    let report = seq_envelope(&ones, &product, n_lo, n_hi, Envelope::Both)?;
    Ok(DualSequenceReport {
        weight: u.name().to_string(),
        rho: product[n_lo..=n_hi].to_vec(),
        report,
    })
}

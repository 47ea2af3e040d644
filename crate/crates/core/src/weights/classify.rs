//! Finite-range evidence for class membership, `(log, x²)`-convexity and
//! function equivalence. Every verdict is "consistent up to `r_max`"; limits
//! cannot be decided on a finite grid.

use serde::Serialize;

use super::WeightFunction;
use crate::error::{Error, Result};
use crate::legendre::{EquivalenceReport, Witness};
use crate::numeric::geometric_grid;
use crate::Verdict;

#[derive(Debug, Clone, Copy)]
pub struct ClassThresholds {
    pub grid_points: usize,
    pub r_min: f64,
    /// A divergent indicator must end above this value.
    pub divergence: f64,
    /// Absolute tolerance on log-values.
    pub tol: f64,
}

impl Default for ClassThresholds {
    fn default() -> Self {
        ClassThresholds {
            grid_points: 64,
            r_min: 1e-2,
            divergence: 1.0,
            tol: 1e-9,
        }
    }
}

/// One indicator ratio sampled on the grid.
#[derive(Debug, Clone, Serialize)]
pub struct IndicatorCheck {
    pub verdict: Verdict,
    /// `(r, ratio)` pairs.
    pub ratios: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexityReport {
    pub verdict: Verdict,
    /// Most negative convexity defect found (chord minus value).
    pub worst_defect: f64,
    /// Triple `(x1, x2, x3)` where the worst defect occurs.
    pub witness: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassMembership {
    pub weight: String,
    pub r_max: f64,
    pub in_c_plus_log: IndicatorCheck,
    pub in_c_plus_half: IndicatorCheck,
    pub in_c_plus_half_one: IndicatorCheck,
    pub log_x2_convex: ConvexityReport,
}

/// Checks convexity of `x ↦ log u(x²)` on consecutive triples of `grid`.
pub fn check_log_x2_convex(u: &WeightFunction, grid: &[f64], tol: f64) -> Result<ConvexityReport> {
    if grid.len() < 3 {
        return Err(Error::GridTooSmall {
            needed: 3,
            got: grid.len(),
        });
    }
    let x_max = u.r_max().sqrt();
    for w in grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Config("convexity grid must be strictly increasing".into()));
        }
    }
    if !(grid[0] >= 0.0) || grid[grid.len() - 1] > x_max {
        return Err(Error::domain("convexity grid", grid[grid.len() - 1], 0.0, x_max));
    }
    let values: Vec<f64> = grid
        .iter()
        .map(|&x| u.log_eval(x * x))
        .collect::<Result<_>>()?;

    let mut worst = f64::INFINITY;
    let mut witness = None;
    for i in 0..grid.len() - 2 {
        let (x1, x2, x3) = (grid[i], grid[i + 1], grid[i + 2]);
        let (f1, f2, f3) = (values[i], values[i + 1], values[i + 2]);
        let chord = ((x3 - x2) * f1 + (x2 - x1) * f3) / (x3 - x1);
        let defect = chord - f2;
        // rounding of the three log-values themselves
        let noise = 8.0 * f64::EPSILON * f1.abs().max(f2.abs()).max(f3.abs());
        let scaled = if defect < 0.0 { defect + noise } else { defect };
        if scaled < worst {
            worst = scaled;
            witness = Some([x1, x2, x3]);
        }
    }
    let verdict = if worst >= -tol {
        Verdict::Consistent
    } else {
        Verdict::Violated
    };
    Ok(ConvexityReport {
        verdict,
        worst_defect: worst,
        witness,
    })
}

/// Default convexity grid: `x = sqrt(r)` for 64 geometric `r` in
/// `[1e-2, min(1e6, r_max)]`.
pub fn default_convexity_grid(u: &WeightFunction) -> Vec<f64> {
    let hi = u.r_max().min(1e6);
    geometric_grid(1e-2, hi, 64).into_iter().map(f64::sqrt).collect()
}

fn strictly_increasing_tail(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] > w[0] * (1.0 + 1e-12) || (w[0] <= 0.0 && w[1] > w[0]))
}

fn divergence_check(ratios: Vec<(f64, f64)>, threshold: f64) -> IndicatorCheck {
    let vals: Vec<f64> = ratios.iter().map(|p| p.1).collect();
    let tail = &vals[vals.len() / 2..];
    let ok = tail.len() >= 2
        && strictly_increasing_tail(tail)
        && tail.last().is_some_and(|&v| v > threshold);
    IndicatorCheck {
        verdict: if ok { Verdict::Consistent } else { Verdict::Violated },
        ratios,
    }
}

/// Classify `u` into `C_{+,log}`, `C_{+,1/2}`, `C_{+,1/2,1}` and test
/// `(log, x²)`-convexity, on a geometric grid up to `r_max`.
///
/// Containment is structural: the `C_{+,1/2}` verdict requires the
/// `C_{+,log}` one, and `C_{+,1/2,1}` requires `C_{+,1/2}`.
pub fn classify(u: &WeightFunction, r_max: f64, th: &ClassThresholds) -> Result<ClassMembership> {
    let r_max = r_max.min(u.r_max());
    if th.grid_points < 20 || !(r_max > th.r_min * 1.5) {
        return Err(Error::GridTooSmall {
            needed: 20,
            got: th.grid_points,
        });
    }
    let grid = geometric_grid(th.r_min, r_max, th.grid_points);
    let logs: Vec<f64> = grid.iter().map(|&r| u.log_eval(r)).collect::<Result<_>>()?;

    let log_ratio: Vec<(f64, f64)> = grid
        .iter()
        .zip(&logs)
        .filter(|(r, _)| **r > std::f64::consts::E)
        .map(|(&r, &l)| (r, l / r.ln()))
        .collect();
    let half_ratio: Vec<(f64, f64)> = grid.iter().zip(&logs).map(|(&r, &l)| (r, l / r.sqrt())).collect();
    let one_ratio: Vec<(f64, f64)> = grid.iter().zip(&logs).map(|(&r, &l)| (r, l / r)).collect();

    let in_log = if log_ratio.len() >= 4 {
        divergence_check(log_ratio, th.divergence)
    } else {
        IndicatorCheck {
            verdict: Verdict::Violated,
            ratios: log_ratio,
        }
    };
    let mut in_half = divergence_check(half_ratio, th.divergence);
    if in_log.verdict == Verdict::Violated {
        in_half.verdict = Verdict::Violated;
    }

    // boundedness of log u(r)/r: non-increasing past the knee, or never
    // exceeding the running max reached before it
    let vals: Vec<f64> = one_ratio.iter().map(|p| p.1).collect();
    let knee = vals.len() / 2;
    let head_max = vals[..knee].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tail = &vals[knee..];
    let non_increasing = tail.windows(2).all(|w| w[1] <= w[0] + th.tol * (1.0 + w[0].abs()));
    let under_head = tail.iter().all(|&v| v <= head_max + th.tol * (1.0 + head_max.abs()));
    let bounded = non_increasing || under_head;
    let in_half_one = IndicatorCheck {
        verdict: if bounded && in_half.verdict == Verdict::Consistent {
            Verdict::Consistent
        } else {
            Verdict::Violated
        },
        ratios: one_ratio,
    };

    let convex = check_log_x2_convex(u, &default_convexity_grid(&u.clone().with_r_max(r_max)?), th.tol)?;

    Ok(ClassMembership {
        weight: u.name().to_string(),
        r_max,
        in_c_plus_log: in_log,
        in_c_plus_half: in_half,
        in_c_plus_half_one: in_half_one,
        log_x2_convex: convex,
    })
}

/// Dyadic scale range `2^{-SCALE_LATTICE} ..= 2^{SCALE_LATTICE}`.
const SCALE_LATTICE: i32 = 10;

enum Scale {
    Found(f64),
    BelowLattice,
    AboveLattice,
}

/// `a` with `log u(a r) = target`, by bisection in `log a`.
fn matching_scale(u: &WeightFunction, r: f64, target: f64) -> Scale {
    let bound = SCALE_LATTICE as f64 * std::f64::consts::LN_2;
    let f = |la: f64| u.log_eval_or_inf(la.exp() * r) - target;
    let (mut lo, mut hi) = (-bound, bound);
    if f(lo) > 0.0 {
        return Scale::BelowLattice;
    }
    if f(hi) < 0.0 {
        return Scale::AboveLattice;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Scale::Found((0.5 * (lo + hi)).exp())
}

/// Evidence for `u ≈ v`: `c1 u(a1 r) <= v(r) <= c2 u(a2 r)` on `grid`.
///
/// For each grid point the matching scale `a(r)` solving
/// `log u(a(r) r) = log v(r)` is found inside the dyadic lattice. The
/// witness uses `a1 = min a(r)`, `a2 = max a(r)` and the extreme residuals
/// of `log v(r) - log u(a r)` for the constants, so the inequalities hold
/// literally on the grid. The verdict is `consistent` when every `a(r)`
/// lies inside the lattice and `a(r)` varies by at most one lattice step
/// (a factor 2) over the upper half of the grid.
pub fn func_equivalent(u: &WeightFunction, v: &WeightFunction, grid: &[f64]) -> Result<EquivalenceReport> {
    if grid.len() < 2 {
        return Err(Error::GridTooSmall {
            needed: 2,
            got: grid.len(),
        });
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || !(grid[0] > 0.0) {
        return Err(Error::Config("equivalence grid must be positive and increasing".into()));
    }
    if !u.is_increasing() {
        return Err(Error::Premise(format!("{} is not increasing", u.name())));
    }
    let targets: Vec<f64> = grid.iter().map(|&r| v.log_eval(r)).collect::<Result<_>>()?;
    let raw: Vec<Scale> = grid
        .iter()
        .zip(&targets)
        .map(|(&r, &t)| matching_scale(u, r, t))
        .collect();
    let lower_bounded = !raw.iter().any(|s| matches!(s, Scale::BelowLattice));
    let upper_bounded = !raw.iter().any(|s| matches!(s, Scale::AboveLattice));
    let scales: Vec<Option<f64>> = raw
        .iter()
        .map(|s| match s {
            Scale::Found(a) => Some(*a),
            _ => None,
        })
        .collect();

    let lattice_lo = 2f64.powi(-SCALE_LATTICE);
    let lattice_hi = 2f64.powi(SCALE_LATTICE);
    let found: Vec<f64> = scales.iter().flatten().copied().collect();
    let all_found = found.len() == scales.len();

    let (a1, a2) = if found.is_empty() {
        (lattice_lo, lattice_hi)
    } else {
        (
            found.iter().cloned().fold(f64::INFINITY, f64::min),
            found.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        )
    };

    let tail = &scales[scales.len() / 2..];
    let tail_found: Vec<f64> = tail.iter().flatten().copied().collect();
    let drift = if tail_found.len() == tail.len() && !tail_found.is_empty() {
        let mx = tail_found.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mn = tail_found.iter().cloned().fold(f64::INFINITY, f64::min);
        (mx / mn).ln()
    } else {
        f64::INFINITY
    };

    let mut log_c1 = f64::INFINITY;
    let mut log_c2 = f64::NEG_INFINITY;
    for (&r, &t) in grid.iter().zip(&targets) {
        log_c1 = log_c1.min(t - u.log_eval_or_inf(a1 * r));
        log_c2 = log_c2.max(t - u.log_eval_or_inf(a2 * r));
    }
    let max_residual = log_c1.abs().max(log_c2.abs());

    let consistent = all_found && drift <= std::f64::consts::LN_2 + 1e-12;
    Ok(EquivalenceReport {
        witness: Witness::Function {
            log_c1,
            a1,
            log_c2,
            a2,
        },
        max_residual,
        drift,
        lower_bounded,
        upper_bounded,
        verdict: if consistent {
            Verdict::Consistent
        } else {
            Verdict::Violated
        },
        range: [grid[0], grid[grid.len() - 1]],
    })
}

//! Iterated exponentials and clamped iterated logarithms.
//!
//! `exp_k(r)` leaves `f64` range already for `k = 3, r ≈ 2`, so values are
//! carried as a [`Tower`]: `exp^level(top)`. Taking a logarithm peels one
//! level without touching `top`, which makes `log exp_k(r) = exp_{k-1}(r)`
//! exact in the representation.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest `x` with `exp(x)` finite in `f64`.
const LN_F64_MAX: f64 = 709.782_712_893_384;

/// Limits of the extended representation.
#[derive(Debug, Clone, Copy)]
pub struct TowerConfig {
    pub max_depth: u32,
    /// Orders `k >= 3` are refused unless this is set.
    pub extended: bool,
}

impl Default for TowerConfig {
    fn default() -> Self {
        TowerConfig {
            max_depth: 8,
            extended: true,
        }
    }
}

/// The value `exp^level(top)`, normalized so that `level > 0` only when the
/// value does not fit in an `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tower {
    level: u32,
    top: f64,
}

impl Tower {
    pub fn new(level: u32, top: f64) -> Self {
        let mut t = Tower { level, top };
        t.normalize();
        t
    }

    pub fn from_f64(x: f64) -> Self {
        Tower { level: 0, top: x }
    }

    fn normalize(&mut self) {
        while self.level > 0 && self.top <= LN_F64_MAX {
            self.top = self.top.exp();
            self.level -= 1;
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn top(&self) -> f64 {
        self.top
    }

    /// The value as an `f64` (`+inf` when it needs a tower).
    pub fn to_f64(&self) -> f64 {
        if self.level == 0 {
            self.top
        } else {
            f64::INFINITY
        }
    }

    /// Natural logarithm; exact peel when `level > 0`.
    pub fn ln(&self) -> Tower {
        if self.level > 0 {
            Tower::new(self.level - 1, self.top)
        } else {
            Tower::from_f64(self.top.ln())
        }
    }

    /// `log_1(x) = log(max(e, x))`.
    pub fn log1(&self) -> Tower {
        if self.level == 0 && self.top <= std::f64::consts::E {
            Tower::from_f64(1.0)
        } else {
            self.ln()
        }
    }
}

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level == 0 {
            write!(f, "{}", self.top)
        } else {
            write!(f, "exp^{}({})", self.level, self.top)
        }
    }
}

/// `exp_k(r)`: `exp_1 = exp`, `exp_k = exp ∘ exp_{k-1}`.
pub fn exp_k(k: u32, r: f64, cfg: &TowerConfig) -> Result<Tower> {
    if k == 0 {
        return Err(Error::Range("exp_k needs k >= 1".into()));
    }
    if k >= 3 && !cfg.extended {
        return Err(Error::Precision(format!("exp_{k}")));
    }
    if !r.is_finite() {
        return Err(Error::Range(format!("exp_k argument {r}")));
    }
    let t = Tower::new(k, r);
    if t.level > cfg.max_depth {
        return Err(Error::Overflow {
            depth: t.level,
            limit: cfg.max_depth,
        });
    }
    Ok(t)
}

/// `exp_j(0)` as an `f64` (`exp_0(0) = 0`).
pub fn exp_k_at_zero(j: u32) -> f64 {
    let mut v = 0.0_f64;
    for _ in 0..j {
        v = v.exp();
    }
    v
}

/// `log_k(r)`: `log_1(r) = log(max(e, r))`, `log_k = log_1 ∘ log_{k-1}`.
pub fn log_k(k: u32, r: f64) -> f64 {
    let mut v = r;
    for _ in 0..k.max(1) {
        v = v.max(std::f64::consts::E).ln();
    }
    v
}

/// `log_k` applied to a tower value.
pub fn log_k_tower(k: u32, x: &Tower) -> f64 {
    let mut v = *x;
    for _ in 0..k.max(1) {
        v = v.log1();
    }
    v.to_f64()
}

/// `exp_j(r) - exp_j(0)` without cancellation near `r = 0`.
///
/// Uses `D_0(r) = r`, `D_j(r) = exp_j(0) * expm1(D_{j-1}(r))`. Returns `+inf`
/// when the difference leaves `f64` range.
pub fn exp_k_minus_base(j: u32, r: f64) -> f64 {
    let mut d = r;
    for level in 1..=j {
        d = exp_k_at_zero(level - 1).exp() * d.exp_m1();
        if !d.is_finite() {
            return f64::INFINITY;
        }
    }
    d
}

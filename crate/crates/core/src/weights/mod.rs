//! Growth functions `u` on `[0, ∞)`, evaluated in log-space.
//!
//! Every family is stored through `log u(r)`; nothing exponentiates a large
//! argument. The catalog holds the power-exponential family
//! `v_β(r) = exp((1+β) r^{1/(1+β)})`, the Bell family
//! `u_k(r) = exp_k(r) / exp_k(0)`, stretched exponentials, the asymptotic
//! form `exp(2 sqrt(r log_{k-1} sqrt r))` of the Bell duals, tabulated
//! weights and numerically materialized duals.

mod classify;
mod config;
mod table;
pub mod tower;

use std::fmt;
use std::sync::Arc;

pub use classify::{
    check_log_x2_convex, classify, func_equivalent, ClassMembership, ClassThresholds, ConvexityReport,
    IndicatorCheck,
};
pub use config::WeightConfig;
pub use table::{LogTable, MAX_TABLE_POINTS};
pub use tower::{exp_k, log_k, log_k_tower, Tower, TowerConfig};

use crate::error::{Error, Result};
use crate::legendre::DualWeight;

/// Domain bound for families that stay finite on all of `f64`.
pub const DEFAULT_R_MAX: f64 = 1e300;

#[derive(Debug, Clone)]
pub enum Family {
    /// `log u(r) = (1+β) r^{1/(1+β)}`, `0 <= β < 1`.
    PowerExp { beta: f64 },
    /// `log u(r) = exp_{k-1}(r) - exp_{k-1}(0)`.
    Bell { order: u32 },
    /// `log u(r) = coef * r^power`.
    Stretched { coef: f64, power: f64 },
    /// `log u(r) = 2 sqrt(r log_{k-1}(sqrt r))`, `k >= 2`.
    BellDual { order: u32 },
    Table(Arc<LogTable>),
    Dual(Arc<DualWeight>),
}

/// A positive continuous growth function, immutable after construction.
#[derive(Debug, Clone)]
pub struct WeightFunction {
    name: String,
    family: Family,
    r_max: f64,
    u_at_zero: f64,
    increasing: bool,
}

impl WeightFunction {
    /// `v_β(r) = exp((1+β) r^{1/(1+β)})`.
    pub fn power_exp(beta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::Config(format!("power_exp needs 0 <= beta < 1, got {beta}")));
        }
        Ok(WeightFunction {
            name: format!("v_{beta}"),
            family: Family::PowerExp { beta },
            r_max: DEFAULT_R_MAX,
            u_at_zero: 1.0,
            increasing: true,
        })
    }

    /// `u_k(r) = exp_k(r) / exp_k(0)`.
    pub fn bell(order: u32) -> Result<Self> {
        if order == 0 || order > 6 {
            return Err(Error::Config(format!("bell order must be in 1..=6, got {order}")));
        }
        // largest r with exp_{k-1}(r) below ~e^700
        let mut r_max = if order == 1 { DEFAULT_R_MAX } else { 700.0 };
        for _ in 2..order {
            r_max = r_max.ln();
        }
        Ok(WeightFunction {
            name: format!("u_{order}"),
            family: Family::Bell { order },
            r_max,
            u_at_zero: 1.0,
            increasing: true,
        })
    }

    /// `u(r) = exp(coef * r^power)`.
    pub fn stretched(coef: f64, power: f64) -> Result<Self> {
        if !(coef > 0.0 && coef.is_finite() && power > 0.0 && power.is_finite()) {
            return Err(Error::Config(format!(
                "stretched needs positive finite coef and power, got {coef}, {power}"
            )));
        }
        Ok(WeightFunction {
            name: format!("exp({coef}*r^{power})"),
            family: Family::Stretched { coef, power },
            r_max: DEFAULT_R_MAX,
            u_at_zero: 1.0,
            increasing: true,
        })
    }

    /// `exp(2 sqrt(r log_{k-1} sqrt r))`, the growth of the Bell duals `u_k*`.
    pub fn bell_dual_asymptotic(order: u32) -> Result<Self> {
        if !(2..=6).contains(&order) {
            return Err(Error::Config(format!("bell_dual order must be in 2..=6, got {order}")));
        }
        Ok(WeightFunction {
            name: format!("exp(2sqrt(r log_{} sqrt r))", order - 1),
            family: Family::BellDual { order },
            r_max: DEFAULT_R_MAX,
            u_at_zero: 1.0,
            increasing: true,
        })
    }

    pub fn from_table(name: impl Into<String>, table: LogTable) -> Self {
        let increasing = table.is_nondecreasing();
        let u_at_zero = table.eval(table.r_min()).map(f64::exp).unwrap_or(f64::NAN);
        WeightFunction {
            name: name.into(),
            r_max: table.r_max(),
            family: Family::Table(Arc::new(table)),
            u_at_zero,
            increasing,
        }
    }

    pub(crate) fn from_dual(dual: DualWeight) -> Self {
        let name = format!("{}*", dual.base().name());
        let r_max = dual.r_max();
        let u_at_zero = (-dual.base().log_u_at_zero()).exp();
        WeightFunction {
            name,
            family: Family::Dual(Arc::new(dual)),
            r_max,
            u_at_zero,
            increasing: true,
        }
    }

    /// Restrict the evaluation domain to `[0, r_max]`.
    pub fn with_r_max(mut self, r_max: f64) -> Result<Self> {
        if !(r_max > 0.0) || r_max > self.r_max {
            return Err(Error::Config(format!(
                "r_max {r_max} must be positive and at most {}",
                self.r_max
            )));
        }
        self.r_max = r_max;
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Lower end of the domain: zero, except for tables starting above zero.
    pub fn r_min(&self) -> f64 {
        match &self.family {
            Family::Table(t) => t.r_min(),
            _ => 0.0,
        }
    }

    pub fn u_at_zero(&self) -> f64 {
        self.u_at_zero
    }

    pub fn log_u_at_zero(&self) -> f64 {
        self.u_at_zero.ln()
    }

    pub fn is_increasing(&self) -> bool {
        self.increasing
    }

    /// `log u(r)`, computed directly in log-space.
    pub fn log_eval(&self, r: f64) -> Result<f64> {
        if !(r >= self.r_min() && r <= self.r_max) {
            return Err(Error::domain(self.name.clone(), r, self.r_min(), self.r_max));
        }
        let v = match &self.family {
            Family::PowerExp { beta } => (1.0 + beta) * r.powf(1.0 / (1.0 + beta)),
            Family::Bell { order } => tower::exp_k_minus_base(order - 1, r),
            Family::Stretched { coef, power } => coef * r.powf(*power),
            Family::BellDual { order } => 2.0 * (r * log_k(order - 1, r.sqrt())).sqrt(),
            Family::Table(t) => t.eval(r)?,
            Family::Dual(d) => d.log_eval(r)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Precision(format!("log {}({r})", self.name)))
        }
    }

    /// `log u(r)` with out-of-domain and overflow mapped to `+inf`; for
    /// optimizers that treat infeasible points as infinitely bad.
    pub(crate) fn log_eval_or_inf(&self, r: f64) -> f64 {
        self.log_eval(r).unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

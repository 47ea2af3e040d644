//! Numerical toolkit for the weight-function calculus of CKS white-noise
//! triples: growth functions and their Legendre transforms, weight
//! sequences, chaos-expansion norms and Hida-measure checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chaos;
pub mod cli;
pub mod error;
pub mod legendre;
pub mod measures;
pub mod numeric;
pub mod optimize;
pub mod rng;
pub mod sequences;
pub mod verify;
pub mod weights;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub use error::{Error, Result};

/// Outcome of a finite-range numerical check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Violated,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Consistent
        } else {
            Verdict::Violated
        }
    }

    pub fn is_consistent(self) -> bool {
        self == Verdict::Consistent
    }
}

/// Lower-case hex SHA-256 of `bytes`.
pub fn digest_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

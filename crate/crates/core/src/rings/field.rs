use std::fmt;

use serde::Serialize;

use crate::arith::is_squarefree;
use crate::error::{Error, Result};

/// ℚ or a quadratic field ℚ(√d), with its fixed integral basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FieldSpec {
    Rational,
    Quadratic(i64),
}

impl FieldSpec {
    pub fn quadratic(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !is_squarefree(d) {
            return Err(Error::InvalidDiscriminant(d));
        }
        Ok(FieldSpec::Quadratic(d))
    }

    pub fn degree(&self) -> usize {
        match self {
            FieldSpec::Rational => 1,
            FieldSpec::Quadratic(_) => 2,
        }
    }

    /// (t, n) with ω² = tω + n.
    pub fn omega_relation(&self) -> (i64, i64) {
        match *self {
            FieldSpec::Rational => (0, 0),
            FieldSpec::Quadratic(d) if d.rem_euclid(4) == 1 => (1, (d - 1) / 4),
            FieldSpec::Quadratic(d) => (0, d),
        }
    }

    pub fn discriminant(&self) -> i64 {
        match *self {
            FieldSpec::Rational => 1,
            FieldSpec::Quadratic(d) if d.rem_euclid(4) == 1 => d,
            FieldSpec::Quadratic(d) => 4 * d,
        }
    }

    pub fn is_totally_real(&self) -> bool {
        match *self {
            FieldSpec::Rational => true,
            FieldSpec::Quadratic(d) => d > 0,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rational => write!(f, "Q"),
            FieldSpec::Quadratic(d) => write!(f, "Q(sqrt {d})"),
        }
    }
}

//! Imaginary quadratic fields Q(sqrt(d)) for squarefree d < 0.
//!
//! Carries the fundamental discriminant, computes the class number exactly
//! by counting reduced primitive positive-definite binary quadratic forms,
//! and classifies how a rational prime splits via the Kronecker symbol of
//! the discriminant.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{is_squarefree, isqrt, kronecker};

/// Default cap on |discriminant| for the form enumeration.
pub const DEFAULT_DISCRIMINANT_CAP: i64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("d = {0} does not define an imaginary quadratic field (need d < 0)")]
    NotImaginary(i64),
    #[error("d = {0} is not squarefree")]
    NotSquarefree(i64),
    #[error("|discriminant| = {discriminant} exceeds the enumeration cap {cap}")]
    CapExceeded { discriminant: i64, cap: i64 },
}

/// How a rational prime behaves in the ring of integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplittingType {
    Split,
    Inert,
    Ramified,
}

/// The field Q(sqrt(d)) for a squarefree negative d.
///
/// The class number is computed on first use and cached; everything else is
/// immutable, so values are freely shareable across threads.
#[derive(Debug)]
pub struct ImaginaryQuadraticField {
    d: i64,
    discriminant: i64,
    class_number: OnceLock<u64>,
}

impl ImaginaryQuadraticField {
    /// Normalized field descriptor. The fundamental discriminant is d when
    /// d = 1 mod 4 and 4d otherwise.
    pub fn new(d: i64) -> Result<ImaginaryQuadraticField, FieldError> {
        if d >= 0 {
            return Err(FieldError::NotImaginary(d));
        }
        if !is_squarefree(d.unsigned_abs()) {
            return Err(FieldError::NotSquarefree(d));
        }
        let discriminant = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        Ok(ImaginaryQuadraticField {
            d,
            discriminant,
            class_number: OnceLock::new(),
        })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    /// Class number by reduced-form count, under the default cap.
    pub fn class_number(&self) -> Result<u64, FieldError> {
        self.class_number_with_cap(DEFAULT_DISCRIMINANT_CAP)
    }

    /// Class number with an explicit cap on |discriminant|.
    pub fn class_number_with_cap(&self, cap: i64) -> Result<u64, FieldError> {
        if -self.discriminant > cap {
            return Err(FieldError::CapExceeded {
                discriminant: self.discriminant,
                cap,
            });
        }
        Ok(*self
            .class_number
            .get_or_init(|| count_reduced_forms(self.discriminant)))
    }

    /// Splitting of a rational prime q: Ramified exactly when q divides the
    /// discriminant, Split when the discriminant is a nonzero square mod q,
    /// Inert otherwise. q = 2 is covered by the Kronecker even conventions.
    pub fn splitting_type(&self, q: u64) -> SplittingType {
        match kronecker(self.discriminant, q as i64) {
            0 => SplittingType::Ramified,
            1 => SplittingType::Split,
            _ => SplittingType::Inert,
        }
    }
}

/// Count reduced primitive forms (a, b, c) of the given discriminant:
/// b^2 - 4ac = D, |b| <= a <= c, gcd(a, b, c) = 1, and b >= 0 whenever
/// |b| = a or a = c.
fn count_reduced_forms(discriminant: i64) -> u64 {
    debug_assert!(discriminant < 0);
    debug_assert!(matches!(discriminant.rem_euclid(4), 0 | 1));
    let parity = discriminant.rem_euclid(2);
    let a_max = isqrt((-discriminant / 3) as u64) as i64;
    let mut count = 0u64;
    for a in 1..=a_max {
        for b in -a..=a {
            if b.rem_euclid(2) != parity {
                continue;
            }
            let numerator = b * b - discriminant;
            if numerator % (4 * a) != 0 {
                continue;
            }
            let c = numerator / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (-b == a || a == c) {
                continue;
            }
            if gcd3(a as u64, b.unsigned_abs(), c as u64) != 1 {
                continue;
            }
            count += 1;
        }
    }
    count
}

fn gcd3(a: u64, b: u64, c: u64) -> u64 {
    crate::arith::gcd(crate::arith::gcd(a, b), c)
}

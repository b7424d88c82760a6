//! The resultant W_n of X^n - 1 and (X+1)^n - 1.
//!
//! Two independent evaluation routes are kept and cross-checked against
//! each other:
//!
//! - exact: the 2n x 2n Sylvester matrix over big integers, eliminated with
//!   fraction-free (division-exact) Gaussian steps so intermediate growth
//!   stays polynomial;
//! - modular: for a prime q = 1 mod n, X^n - 1 splits into distinct linear
//!   factors mod q, so q | W_n exactly when some n-th root of unity u
//!   satisfies (u+1)^n = 1 mod q.
//!
//! The criteria only ever need the modular route; the exact route exists to
//! pin it down. W_n vanishes exactly when 6 | n (the two polynomials then
//! share a primitive sixth root of unity), and every prime q = np + 1 above
//! the Dickson bound divides W_n, which makes witness searches finite.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{element_of_order_hinted, ArithError, Modulus};

/// Default cap on n for exact evaluation.
pub const DEFAULT_EXACT_CAP: u64 = 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WendtError {
    #[error("exact evaluation is capped at n = {cap}, got n = {n}")]
    CapExceeded { n: u64, cap: u64 },
    #[error("bound overflows 64 bits for p = {p}")]
    Overflow { p: u64 },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// One evaluation of W_n, either exact or reduced modulo a prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WendtEvaluation {
    Exact { n: u64, value: BigInt },
    Modular { n: u64, modulus: u64, residue: u64 },
}

/// Exact W_n under the default cap.
pub fn wendt_exact(n: u64) -> Result<BigInt, WendtError> {
    wendt_exact_with_cap(n, DEFAULT_EXACT_CAP)
}

/// Exact W_n: determinant of the Sylvester matrix of X^n - 1 and
/// (X+1)^n - 1, by fraction-free elimination over exact integers.
pub fn wendt_exact_with_cap(n: u64, cap: u64) -> Result<BigInt, WendtError> {
    assert!(n >= 1, "W_n is defined for n >= 1");
    if n > cap {
        return Err(WendtError::CapExceeded { n, cap });
    }
    Ok(fraction_free_determinant(sylvester_matrix(n as usize)))
}

/// Sylvester matrix of f = X^n - 1 (first n rows) and g = (X+1)^n - 1
/// (last n rows), coefficients stored from the leading term down.
fn sylvester_matrix(n: usize) -> Vec<Vec<BigInt>> {
    let mut f = vec![BigInt::zero(); n + 1];
    f[0] = BigInt::one();
    f[n] = -BigInt::one();

    // (X+1)^n has binomial coefficients; subtracting 1 clears the constant.
    let mut g = binomial_row(n);
    g[n] -= 1;

    let size = 2 * n;
    let mut matrix = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for (j, coefficient) in f.iter().enumerate() {
            matrix[i][i + j] = coefficient.clone();
        }
        for (j, coefficient) in g.iter().enumerate() {
            matrix[n + i][i + j] = coefficient.clone();
        }
    }
    matrix
}

/// [C(n,n), C(n,n-1), ..., C(n,0)], leading coefficient first.
fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 1..=n {
        c = c * (n - k + 1) / k;
        row.push(c.clone());
    }
    row
}

/// Bareiss fraction-free elimination; every division is exact.
fn fraction_free_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let size = m.len();
    if size == 0 {
        return BigInt::one();
    }
    let mut sign_flips = 0usize;
    let mut previous_pivot = BigInt::one();
    for k in 0..size - 1 {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..size).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, r);
            sign_flips += 1;
        }
        let pivot_row = m[k].clone();
        let pivot = pivot_row[k].clone();
        for row in m.iter_mut().skip(k + 1) {
            let lead = std::mem::replace(&mut row[k], BigInt::zero());
            for j in k + 1..size {
                let numerator = &row[j] * &pivot - &lead * &pivot_row[j];
                row[j] = numerator / &previous_pivot;
            }
        }
        previous_pivot = pivot;
    }
    let det = m[size - 1][size - 1].clone();
    if sign_flips % 2 == 0 {
        det
    } else {
        -det
    }
}

/// W_n mod q for a prime q = 1 mod n, as the product of (u+1)^n - 1 over
/// the n-th roots of unity u mod q.
pub fn wendt_mod(n: u64, q: u64) -> Result<u64, WendtError> {
    let modulus = Modulus::new(q)?;
    debug_assert!(crate::arith::is_prime(q));
    let zeta = element_of_order_hinted(modulus, n, None)?;
    let mut root = 1u64;
    let mut product = 1u64;
    for _ in 0..n {
        let shifted = if root + 1 == q { 0 } else { root + 1 };
        let term = modulus.pow(shifted, n);
        let term = if term == 0 { q - 1 } else { term - 1 };
        product = modulus.mul(product, term);
        root = modulus.mul(root, zeta);
    }
    Ok(product)
}

/// Does the prime q = 1 mod n divide W_n?
///
/// Enumerates the n-th roots of unity u = zeta^k mod q and tests whether
/// (u+1)^n = 1, exiting on the first hit.
pub fn wendt_divides(n: u64, q: u64) -> Result<bool, WendtError> {
    wendt_divides_hinted(n, q, None)
}

/// [`wendt_divides`] with a known prime factor of `q - 1` (the caller of a
/// witness search knows p with q = np + 1).
pub fn wendt_divides_hinted(n: u64, q: u64, known_factor: Option<u64>) -> Result<bool, WendtError> {
    let modulus = Modulus::new(q)?;
    debug_assert!(crate::arith::is_prime(q));
    let zeta = element_of_order_hinted(modulus, n, known_factor)?;
    let mut root = 1u64;
    for _ in 0..n {
        let shifted = if root + 1 == q { 0 } else { root + 1 };
        if modulus.pow(shifted, n) == 1 {
            return Ok(true);
        }
        root = modulus.mul(root, zeta);
    }
    Ok(false)
}

/// (p-1)^2 (p-2)^2 + 6p - 2. Every prime q = np + 1 above this value
/// divides W_n.
pub fn dickson_bound(p: u64) -> Result<u64, WendtError> {
    debug_assert!(p >= 3 && p % 2 == 1);
    let a = (p - 1).checked_mul(p - 2).ok_or(WendtError::Overflow { p })?;
    let square = a.checked_mul(a).ok_or(WendtError::Overflow { p })?;
    square
        .checked_add(6 * p - 2)
        .ok_or(WendtError::Overflow { p })
}

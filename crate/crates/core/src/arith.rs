//! Machine-word modular arithmetic, deterministic primality, streaming prime
//! generation, and quadratic symbols.
//!
//! Moduli are capped below 2^62 so that the product of two reduced residues
//! always fits a `u128` exactly; there is no wraparound anywhere in the
//! kernel. Primality is a deterministic Miller-Rabin over a fixed published
//! base set valid for the whole `u64` range, so every answer is a theorem,
//! not a probability.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exclusive upper bound on moduli. Two residues below this multiply
/// exactly inside a `u128`.
pub const MODULUS_LIMIT: u64 = 1 << 62;

/// Default span of one sieve segment, in integers.
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("modulus {0} outside the supported range [2, 2^62)")]
    ModulusOutOfRange(u64),
    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: u64, m: u64 },
    #[error("no element of order {n} modulo {q}: {n} does not divide {q} - 1")]
    OrderUnavailable { n: u64, q: u64 },
}

/// A validated modulus `m` with `2 <= m < 2^62`.
///
/// All residue arguments must already lie in `[0, m)`; this is asserted in
/// debug builds and documented as a precondition otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(m: u64) -> Result<Modulus, ArithError> {
        if (2..MODULUS_LIMIT).contains(&m) {
            Ok(Modulus(m))
        } else {
            Err(ArithError::ModulusOutOfRange(m))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// Reduce an arbitrary integer into `[0, m)`.
    #[inline]
    pub fn reduce(self, x: u64) -> u64 {
        x % self.0
    }

    /// Exact product of two residues, reduced.
    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.0 && b < self.0);
        (a as u128 * b as u128 % self.0 as u128) as u64
    }

    /// `a^e mod m` by square-and-multiply. `0^0 = 1` (empty product).
    pub fn pow(self, a: u64, mut e: u64) -> u64 {
        debug_assert!(a < self.0);
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Modular inverse by the extended Euclidean algorithm.
    pub fn inv(self, a: u64) -> Result<u64, ArithError> {
        let m = self.0;
        debug_assert!(a < m);
        let (mut r0, mut r1) = (m as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        if r0 != 1 {
            return Err(ArithError::NotInvertible { a, m });
        }
        Ok(t0.rem_euclid(m as i128) as u64)
    }
}

#[inline]
fn mul_mod_u64(a: u64, b: u64, n: u64) -> u64 {
    (a as u128 * b as u128 % n as u128) as u64
}

fn pow_mod_u64(a: u64, mut e: u64, n: u64) -> u64 {
    let mut base = a % n;
    let mut acc = 1 % n;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, base, n);
        }
        base = mul_mod_u64(base, base, n);
        e >>= 1;
    }
    acc
}

/// Greatest common divisor.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Deterministic primality for the whole `u64` range.
///
/// Trial division by the primes below 40, then Miller-Rabin over the
/// seven-base set {2, 325, 9375, 28178, 450775, 9780504, 1795265022},
/// which is known to be exact for every n < 2^64.
pub fn is_prime(n: u64) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    const BASES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &b in &BASES {
        let a = b % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// True when no square > 1 divides `n`.
pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % (d * d) == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// True when no cube > 1 divides `n`.
pub fn is_cubefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut d = 2u64;
    while d * d * d <= n {
        if n % (d * d * d) == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn isqrt(n: u64) -> u64 {
    n.isqrt()
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let size = limit as usize + 1;
    let mut composite = vec![false; size];
    let mut primes = Vec::new();
    for i in 2..size {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j < size {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn mark_segment(lo: u64, hi: u64, base: &[u64], composite: &mut Vec<bool>) {
    let len = (hi - lo + 1) as usize;
    composite.clear();
    composite.resize(len, false);
    for &p in base {
        if p * p > hi {
            break;
        }
        let first = (p * p).max(lo.div_ceil(p) * p);
        let mut j = first;
        while j <= hi {
            composite[(j - lo) as usize] = true;
            j += p;
        }
    }
    if lo == 1 {
        composite[0] = true;
    } else if lo == 0 {
        composite[0] = true;
        if len > 1 {
            composite[1] = true;
        }
    }
}

/// All primes in `[lo, hi]`, ascending. Memory stays O(sqrt(hi) + span).
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || hi < lo {
        return Vec::new();
    }
    let lo = lo.max(2);
    let base = simple_sieve(isqrt(hi));
    let mut composite = Vec::new();
    mark_segment(lo, hi, &base, &mut composite);
    (lo..=hi).filter(|&n| !composite[(n - lo) as usize]).collect()
}

/// Streaming iterator over the primes `<= bound`.
///
/// Sieves one segment at a time; segments are independent, so a caller may
/// also split the range with [`primes_in_range`] and process pieces in
/// parallel.
pub struct PrimeIter {
    bound: u64,
    segment_size: u64,
    base: Vec<u64>,
    current: Vec<u64>,
    pos: usize,
    next_lo: u64,
}

impl PrimeIter {
    fn new(bound: u64, segment_size: usize) -> PrimeIter {
        let base = if bound >= 4 { simple_sieve(isqrt(bound)) } else { Vec::new() };
        PrimeIter {
            bound,
            segment_size: segment_size.max(16) as u64,
            base,
            current: Vec::new(),
            pos: 0,
            next_lo: 2,
        }
    }

    fn refill(&mut self) -> bool {
        let mut composite = Vec::new();
        while self.next_lo <= self.bound {
            let lo = self.next_lo;
            let hi = lo.saturating_add(self.segment_size - 1).min(self.bound);
            self.next_lo = hi + 1;
            mark_segment(lo, hi, &self.base, &mut composite);
            self.current.clear();
            self.current
                .extend((lo..=hi).filter(|&n| !composite[(n - lo) as usize]));
            self.pos = 0;
            if !self.current.is_empty() {
                return true;
            }
        }
        false
    }
}

impl Iterator for PrimeIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pos >= self.current.len() && !self.refill() {
            return None;
        }
        let p = self.current[self.pos];
        self.pos += 1;
        Some(p)
    }
}

/// Exactly the primes in `[2, bound]`, ascending, with the default segment.
pub fn primes_up_to(bound: u64) -> PrimeIter {
    PrimeIter::new(bound, DEFAULT_SEGMENT_SIZE)
}

/// Same as [`primes_up_to`] with an explicit segment size.
pub fn primes_up_to_segmented(bound: u64, segment_size: usize) -> PrimeIter {
    PrimeIter::new(bound, segment_size)
}

/// The Kronecker symbol (a|n), with the usual conventions for even and
/// negative n: (a|0) is 1 exactly for a = ±1, (a|-1) is the sign of a,
/// and (a|2) is 0 for even a and ±1 according to a mod 8.
pub fn kronecker(a: i64, n: i64) -> i32 {
    let mut a = a as i128;
    let mut n = n as i128;
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut sign = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -sign;
        }
    }
    while n % 2 == 0 {
        if a % 2 == 0 {
            return 0;
        }
        n /= 2;
        if matches!(a.rem_euclid(8), 3 | 5) {
            sign = -sign;
        }
    }
    if n == 1 {
        return sign;
    }
    // Jacobi symbol for odd n >= 3 via quadratic reciprocity.
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Distinct prime factors of `x` by trial division, smallest first.
///
/// A known prime factor may be passed as a hint and is divided out before
/// the trial loop; callers that already know the dominant factor of `q - 1`
/// (it is `p` when `q = np + 1`) avoid the sqrt-range scan entirely.
pub(crate) fn distinct_prime_factors(mut x: u64, known_factor: Option<u64>) -> Vec<u64> {
    let mut factors = Vec::new();
    if let Some(h) = known_factor {
        if h > 1 && x % h == 0 {
            debug_assert!(is_prime(h));
            factors.push(h);
            while x % h == 0 {
                x /= h;
            }
        }
    }
    let mut d = 2u64;
    while (d as u128) * (d as u128) <= x as u128 {
        if x % d == 0 {
            factors.push(d);
            while x % d == 0 {
                x /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if x > 1 {
        factors.push(x);
    }
    factors.sort_unstable();
    factors
}

/// An element of multiplicative order exactly `n` modulo the prime `q`.
///
/// Finds a generator of the full group by factoring `q - 1` with trial
/// division, then raises it to `(q-1)/n`. Fails with `OrderUnavailable`
/// when `n` does not divide `q - 1`.
pub fn element_of_order(q: Modulus, n: u64) -> Result<u64, ArithError> {
    element_of_order_hinted(q, n, None)
}

/// [`element_of_order`] with a known prime factor of `q - 1` as a hint.
pub fn element_of_order_hinted(
    q: Modulus,
    n: u64,
    known_factor: Option<u64>,
) -> Result<u64, ArithError> {
    let qv = q.get();
    debug_assert!(is_prime(qv));
    let group = qv - 1;
    if n == 0 || group % n != 0 {
        return Err(ArithError::OrderUnavailable { n, q: qv });
    }
    if n == 1 {
        return Ok(1);
    }
    let factors = distinct_prime_factors(group, known_factor);
    let generator = (2..qv)
        .find(|&g| factors.iter().all(|&l| q.pow(g, group / l) != 1))
        .expect("the multiplicative group of a prime field is cyclic");
    Ok(q.pow(generator, group / n))
}

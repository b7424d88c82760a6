//! Local-obstruction criteria for the first case of Fermat's Last Theorem
//! over number fields.
//!
//! The library decides, for an odd prime exponent `p` and a supported field
//! description, whether a Wendt-type witness or a Fermat-quotient condition
//! establishes the first case of Fermat's Last Theorem, and it reproduces
//! the associated tables and census statistics at scale.
//!
//! Module map:
//!
//! - [`arith`] — machine-word modular arithmetic, deterministic primality,
//!   segmented prime generation, Kronecker symbols, elements of given order.
//! - [`quad`] — imaginary quadratic fields: fundamental discriminants, class
//!   numbers by reduced-form enumeration, prime splitting.
//! - [`wendt`] — the resultant of `X^n - 1` and `(X+1)^n - 1`, exact over big
//!   integers and modulo primes `q ≡ 1 (mod n)`, plus the Dickson bound.
//! - [`criteria`] — the decision procedures themselves: witness checks and
//!   searches over imaginary quadratic fields, the Sophie Germain
//!   specialization, the `mod p^2` non-congruence condition, and its
//!   extension to pure fields and totally ramified extensions.
//! - [`survey`] — batch runs: smallest-witness tables, full scans over Q(i),
//!   and the condition-(1) census with checkpointed long runs.
//! - [`cli`] — the command-line surface with human/JSON/CSV output.
//!
//! Every criterion here is one-sided: a `NotEstablished` outcome means the
//! criterion is silent for that input, never that a counterexample exists.

pub mod arith;
pub mod cli;
pub mod criteria;
pub mod quad;
pub mod survey;
pub mod wendt;

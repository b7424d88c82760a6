//! The decision procedures.
//!
//! Over an imaginary quadratic field K, the exponent p is settled by a
//! witness q = np + 1: q must be prime, split in K, with n^n and W_n both
//! nonzero mod q, and the class number of K must not vanish mod p. The
//! n = 2 specialization is the Sophie Germain analogue, and over Q(i) the
//! shortcut tries n in {4, 8, 16}.
//!
//! Independently of any witness, the non-congruence
//! `1 + a^p != (1+a)^p mod p^2` for all a up to (p-3)/2 settles p over any
//! field carrying a prime ideal above p of residue degree 1 and
//! ramification index at most p - 1; the supported field descriptions are
//! quadratic fields, pure fields Q(d^(1/n)) in the cases a root argument
//! covers, totally ramified extensions of bounded degree, and raw (e, f)
//! assertions.
//!
//! Everything is one-sided: `NotEstablished` means the criterion is silent,
//! never that a counterexample exists.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{gcd, is_cubefree, is_prime, is_squarefree, ArithError, Modulus, MODULUS_LIMIT};
use crate::quad::{FieldError, ImaginaryQuadraticField, SplittingType};
use crate::wendt::{dickson_bound, wendt_divides_hinted, WendtError};

/// Default cap on witness candidates n during a search.
pub const DEFAULT_SEARCH_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriteriaError {
    #[error("p = {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("n = {0} must be positive")]
    InvalidWitnessCandidate(u64),
    #[error("q = np + 1 overflows the modulus range for n = {n}, p = {p}")]
    Overflow { n: u64, p: u64 },
    #[error("p^2 overflows the modulus range for p = {0}")]
    SquareOverflow(u64),
    #[error("d = {0} does not generate a pure field (need d outside {{-1, 0, 1}})")]
    InvalidRadicand(i64),
    #[error("d = {0} is not cubefree")]
    NotCubefree(i64),
    #[error("d = {0} is not squarefree")]
    NotSquarefree(i64),
    #[error("pure field Q({d}^(1/{n})) at p = {p} is outside the supported cases")]
    Unsupported { d: i64, n: u64, p: u64 },
    #[error("degree must be positive")]
    InvalidDegree,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Wendt(#[from] WendtError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A certified witness: q = np + 1 prime, n even and not divisible by 6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem1Witness {
    pub p: u64,
    pub n: u64,
    pub q: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Established,
    NotEstablished,
}

impl Verdict {
    /// Stable snake_case tag matching the JSON encoding.
    pub fn slug(self) -> &'static str {
        match self {
            Verdict::Established => "established",
            Verdict::NotEstablished => "not_established",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Established => write!(f, "established"),
            Verdict::NotEstablished => write!(f, "not established"),
        }
    }
}

/// Why a criterion reached its verdict. Failures carry the first failing
/// hypothesis, in check order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reason {
    WitnessFound,
    HypothesesSatisfied,
    SixDividesN { n: u64 },
    ClassNumberDivisible { h: u64 },
    QNotPrime { q: u64 },
    QNotSplit { q: u64 },
    PowerObstruction { q: u64, n: u64 },
    WendtDivisible { q: u64, n: u64 },
    SearchExhausted { n_cap: u64 },
    CandidatesExhausted { tried: Vec<u64> },
    ConditionViolated { witness: u64 },
    NoDegreeOnePrime,
    RamificationTooLarge { e: u64 },
    ResidueDegreeNotOne { f: u64 },
}

impl Reason {
    /// Stable kebab-case tag, used by the CSV output.
    pub fn slug(&self) -> &'static str {
        match self {
            Reason::WitnessFound => "witness-found",
            Reason::HypothesesSatisfied => "hypotheses-satisfied",
            Reason::SixDividesN { .. } => "six-divides-n",
            Reason::ClassNumberDivisible { .. } => "class-number-divisible",
            Reason::QNotPrime { .. } => "q-not-prime",
            Reason::QNotSplit { .. } => "q-not-split",
            Reason::PowerObstruction { .. } => "power-obstruction",
            Reason::WendtDivisible { .. } => "wendt-divisible",
            Reason::SearchExhausted { .. } => "search-exhausted",
            Reason::CandidatesExhausted { .. } => "candidates-exhausted",
            Reason::ConditionViolated { .. } => "condition-violated",
            Reason::NoDegreeOnePrime => "no-degree-one-prime",
            Reason::RamificationTooLarge { .. } => "ramification-too-large",
            Reason::ResidueDegreeNotOne { .. } => "residue-degree-not-one",
        }
    }
}

impl std::fmt::Display for Reason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Reason::WitnessFound => write!(f, "witness found"),
            Reason::HypothesesSatisfied => write!(f, "both hypotheses hold"),
            Reason::SixDividesN { n } => write!(f, "6 divides n = {n}, so W_n = 0"),
            Reason::ClassNumberDivisible { h } => {
                write!(f, "class number {h} is divisible by p")
            }
            Reason::QNotPrime { q } => write!(f, "q = {q} is not prime"),
            Reason::QNotSplit { q } => write!(f, "q = {q} is not split in the field"),
            Reason::PowerObstruction { q, n } => write!(f, "n^n = 1 mod q = {q} (n = {n})"),
            Reason::WendtDivisible { q, n } => write!(f, "q = {q} divides W_{n}"),
            Reason::SearchExhausted { n_cap } => {
                write!(f, "no witness with n <= {n_cap}")
            }
            Reason::CandidatesExhausted { tried } => {
                write!(f, "no witness among n in {tried:?}")
            }
            Reason::ConditionViolated { witness } => {
                write!(f, "1 + a^p = (1+a)^p mod p^2 at a = {witness}")
            }
            Reason::NoDegreeOnePrime => {
                write!(f, "no prime of residue degree 1 above p was found")
            }
            Reason::RamificationTooLarge { e } => {
                write!(f, "ramification index {e} exceeds p - 1")
            }
            Reason::ResidueDegreeNotOne { f: deg } => {
                write!(f, "residue degree {deg} is not 1")
            }
        }
    }
}

/// Outcome of a criterion check. `Established` on a witness path always
/// carries the witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub status: Verdict,
    pub reason: Reason,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Theorem1Witness>,
}

impl CriterionOutcome {
    fn established(witness: Theorem1Witness) -> CriterionOutcome {
        CriterionOutcome {
            status: Verdict::Established,
            reason: Reason::WitnessFound,
            witness: Some(witness),
        }
    }

    fn failed(reason: Reason) -> CriterionOutcome {
        CriterionOutcome {
            status: Verdict::NotEstablished,
            reason,
            witness: None,
        }
    }

    pub fn is_established(&self) -> bool {
        self.status == Verdict::Established
    }
}

/// Verdict of the mod p^2 non-congruence for one prime, with every
/// violating a in [1, (p-3)/2].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition1Report {
    pub p: u64,
    pub holds: bool,
    pub witnesses: Vec<u64>,
}

/// How hypothesis 1 (a degree-1 prime above p with small ramification) is
/// meant to be met.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldHypothesis {
    Quadratic { d: i64 },
    PureField { d: i64, n: u64 },
    TotallyRamified { degree: u64 },
    Asserted { e: u64, f: u64 },
}

impl std::fmt::Display for FieldHypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldHypothesis::Quadratic { d } => write!(f, "Q(sqrt({d}))"),
            FieldHypothesis::PureField { d, n } => write!(f, "Q({d}^(1/{n}))"),
            FieldHypothesis::TotallyRamified { degree } => {
                write!(f, "totally ramified of degree {degree}")
            }
            FieldHypothesis::Asserted { e, f: residue } => {
                write!(f, "asserted e={e} f={residue}")
            }
        }
    }
}

/// Which case of the pure-field analysis answered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PureFieldCase {
    Unramified,
    Cubic,
    CongruentExponent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PureFieldVerdict {
    pub exists: bool,
    pub case: PureFieldCase,
}

fn require_odd_prime(p: u64) -> Result<(), CriteriaError> {
    if p >= 3 && p % 2 == 1 && is_prime(p) {
        Ok(())
    } else {
        Err(CriteriaError::NotOddPrime(p))
    }
}

/// Witness check for one candidate n over an imaginary quadratic field.
///
/// Established exactly when, in this order: the class number of K is not 0
/// mod p; q = np + 1 is prime; q splits in K; n^n != 1 mod q; and q does
/// not divide W_n. Candidates with 6 | n are rejected immediately since
/// W_n = 0.
pub fn theorem1_check(
    field: &ImaginaryQuadraticField,
    p: u64,
    n: u64,
) -> Result<CriterionOutcome, CriteriaError> {
    require_odd_prime(p)?;
    theorem1_check_validated(field, p, n)
}

fn theorem1_check_validated(
    field: &ImaginaryQuadraticField,
    p: u64,
    n: u64,
) -> Result<CriterionOutcome, CriteriaError> {
    if n == 0 {
        return Err(CriteriaError::InvalidWitnessCandidate(n));
    }
    if n % 6 == 0 {
        return Ok(CriterionOutcome::failed(Reason::SixDividesN { n }));
    }
    let h = field.class_number()?;
    if h % p == 0 {
        return Ok(CriterionOutcome::failed(Reason::ClassNumberDivisible { h }));
    }
    let q = n
        .checked_mul(p)
        .and_then(|np| np.checked_add(1))
        .filter(|&q| q < MODULUS_LIMIT)
        .ok_or(CriteriaError::Overflow { n, p })?;
    if !is_prime(q) {
        return Ok(CriterionOutcome::failed(Reason::QNotPrime { q }));
    }
    if field.splitting_type(q) != SplittingType::Split {
        return Ok(CriterionOutcome::failed(Reason::QNotSplit { q }));
    }
    let modulus = Modulus::new(q)?;
    if modulus.pow(n % q, n) == 1 {
        return Ok(CriterionOutcome::failed(Reason::PowerObstruction { q, n }));
    }
    if wendt_divides_hinted(n, q, Some(p))? {
        return Ok(CriterionOutcome::failed(Reason::WendtDivisible { q, n }));
    }
    Ok(CriterionOutcome::established(Theorem1Witness { p, n, q }))
}

/// Smallest witness n, searching even n with 6 ∤ n up to
/// min(n_max, Dickson bound), default cap 2^20. Only even n are tried:
/// with p and q odd, q = np + 1 forces n even.
/// The cap actually searched: min(n_max, Dickson bound), with the default
/// 2^20 when no explicit n_max is given. Above the Dickson bound every
/// prime q = np + 1 divides W_n, so nothing past it can witness.
pub fn effective_search_cap(p: u64, n_max: Option<u64>) -> u64 {
    let mut cap = n_max.unwrap_or(DEFAULT_SEARCH_CAP);
    if let Ok(bound) = dickson_bound(p) {
        cap = cap.min(bound);
    }
    cap
}

pub fn theorem1_search(
    field: &ImaginaryQuadraticField,
    p: u64,
    n_max: Option<u64>,
) -> Result<Option<Theorem1Witness>, CriteriaError> {
    require_odd_prime(p)?;
    if field.class_number()? % p == 0 {
        return Ok(None);
    }
    let cap = effective_search_cap(p, n_max);
    let mut n = 2;
    while n <= cap {
        if n % 6 != 0 {
            let outcome = theorem1_check_validated(field, p, n)?;
            if let Some(witness) = outcome.witness {
                return Ok(Some(witness));
            }
        }
        n += 2;
    }
    Ok(None)
}

/// The Sophie Germain analogue: exactly [`theorem1_check`] at n = 2, where
/// q = 2p + 1 and W_2 = -3, so only primality, splitting, and the class
/// number can fail.
pub fn sophie_germain_check(
    field: &ImaginaryQuadraticField,
    p: u64,
) -> Result<CriterionOutcome, CriteriaError> {
    theorem1_check(field, p, 2)
}

/// Over Q(i): tries n = 4, 8, 16 in that order.
pub fn corollary2_check(p: u64) -> Result<CriterionOutcome, CriteriaError> {
    const TRIED: [u64; 3] = [4, 8, 16];
    require_odd_prime(p)?;
    let field = gaussian_field();
    for n in TRIED {
        let outcome = theorem1_check_validated(&field, p, n)?;
        if outcome.is_established() {
            return Ok(outcome);
        }
    }
    Ok(CriterionOutcome::failed(Reason::CandidatesExhausted {
        tried: TRIED.to_vec(),
    }))
}

fn gaussian_field() -> ImaginaryQuadraticField {
    ImaginaryQuadraticField::new(-1).expect("Q(i) is a valid field")
}

fn condition1_modulus(p: u64) -> Result<Modulus, CriteriaError> {
    let square = p
        .checked_mul(p)
        .filter(|&s| s < MODULUS_LIMIT)
        .ok_or(CriteriaError::SquareOverflow(p))?;
    Ok(Modulus::new(square)?)
}

fn condition1_violates(modulus: Modulus, p: u64, a: u64) -> bool {
    let lhs = (modulus.pow(a, p) + 1) % modulus.get();
    lhs == modulus.pow(a + 1, p)
}

/// Full scan of 1 + a^p vs (1+a)^p mod p^2 for a = 1 .. (p-3)/2, collecting
/// every violating a. For p = 3 the range is empty and the condition holds
/// vacuously.
pub fn condition1_check(p: u64) -> Result<Condition1Report, CriteriaError> {
    require_odd_prime(p)?;
    let modulus = condition1_modulus(p)?;
    let witnesses: Vec<u64> = (1..=(p - 3) / 2)
        .filter(|&a| condition1_violates(modulus, p, a))
        .collect();
    Ok(Condition1Report {
        p,
        holds: witnesses.is_empty(),
        witnesses,
    })
}

/// Fast boolean mode: stops at the first violation. Agrees with
/// [`condition1_check`] on `holds`.
pub fn condition1_holds(p: u64) -> Result<bool, CriteriaError> {
    Ok(condition1_first_violation(p)?.is_none())
}

fn condition1_first_violation(p: u64) -> Result<Option<u64>, CriteriaError> {
    require_odd_prime(p)?;
    let modulus = condition1_modulus(p)?;
    Ok((1..=(p - 3) / 2).find(|&a| condition1_violates(modulus, p, a)))
}

/// Does Q(d^(1/n)) carry a prime above p of residue degree 1 with small
/// ramification? Supported cases:
///
/// - n = 3, p = 2 mod 3, p >= 5, d cubefree: always true (cubing is a
///   bijection mod p when p does not divide 3d; otherwise the prime above p
///   is ramified of residue degree 1 with e = 3 <= p - 1);
/// - n = 1 mod (p-1), p ∤ dn, d squarefree: always true, d is its own n-th
///   root mod p;
/// - p ∤ dn: an unramified degree-1 prime exists exactly when X^n - d has a
///   root mod p, i.e. d^((p-1)/gcd(n, p-1)) = 1 mod p.
///
/// Everything else is `Unsupported`.
pub fn pure_field_residue_degree_one(
    d: i64,
    n: u64,
    p: u64,
) -> Result<PureFieldVerdict, CriteriaError> {
    require_odd_prime(p)?;
    if matches!(d, -1 | 0 | 1) {
        return Err(CriteriaError::InvalidRadicand(d));
    }
    if n == 0 {
        return Err(CriteriaError::InvalidDegree);
    }
    let d_mod_p = d.rem_euclid(p as i64) as u64;
    let p_divides_dn = d_mod_p == 0 || n % p == 0;

    if n == 3 && p >= 5 && p % 3 == 2 {
        if !is_cubefree(d.unsigned_abs()) {
            return Err(CriteriaError::NotCubefree(d));
        }
        return Ok(PureFieldVerdict {
            exists: true,
            case: PureFieldCase::Cubic,
        });
    }
    if !p_divides_dn && n % (p - 1) == 1 {
        if !is_squarefree(d.unsigned_abs()) {
            return Err(CriteriaError::NotSquarefree(d));
        }
        return Ok(PureFieldVerdict {
            exists: true,
            case: PureFieldCase::CongruentExponent,
        });
    }
    if !p_divides_dn {
        let modulus = Modulus::new(p)?;
        let g = gcd(n, p - 1);
        let exists = modulus.pow(d_mod_p, (p - 1) / g) == 1;
        return Ok(PureFieldVerdict {
            exists,
            case: PureFieldCase::Unramified,
        });
    }
    Err(CriteriaError::Unsupported { d, n, p })
}

/// The mod p^2 criterion over a described field: established when the
/// non-congruence condition holds for p and the description yields a prime
/// above p of residue degree 1 and ramification index at most p - 1.
///
/// The condition is evaluated first: when it already fails, the outcome is
/// `NotEstablished` even for field descriptions whose hypothesis-1 analysis
/// would be unsupported.
pub fn theorem2_check(
    hypothesis: &FieldHypothesis,
    p: u64,
) -> Result<CriterionOutcome, CriteriaError> {
    if let Some(a) = condition1_first_violation(p)? {
        return Ok(CriterionOutcome::failed(Reason::ConditionViolated {
            witness: a,
        }));
    }
    let failure = match *hypothesis {
        FieldHypothesis::Quadratic { d } => {
            let field = ImaginaryQuadraticField::new(d)?;
            // A degree-1 prime above p exists when p splits or ramifies;
            // e <= 2 <= p - 1 holds for every odd prime.
            match field.splitting_type(p) {
                SplittingType::Split | SplittingType::Ramified => None,
                SplittingType::Inert => Some(Reason::NoDegreeOnePrime),
            }
        }
        FieldHypothesis::PureField { d, n } => {
            let verdict = pure_field_residue_degree_one(d, n, p)?;
            if verdict.exists {
                None
            } else {
                Some(Reason::NoDegreeOnePrime)
            }
        }
        FieldHypothesis::TotallyRamified { degree } => {
            if degree == 0 {
                return Err(CriteriaError::InvalidDegree);
            }
            if degree <= p - 1 {
                None
            } else {
                Some(Reason::RamificationTooLarge { e: degree })
            }
        }
        FieldHypothesis::Asserted { e, f } => {
            if e == 0 {
                return Err(CriteriaError::InvalidDegree);
            }
            if f != 1 {
                Some(Reason::ResidueDegreeNotOne { f })
            } else if e <= p - 1 {
                None
            } else {
                Some(Reason::RamificationTooLarge { e })
            }
        }
    };
    Ok(match failure {
        None => CriterionOutcome {
            status: Verdict::Established,
            reason: Reason::HypothesesSatisfied,
            witness: None,
        },
        Some(reason) => CriterionOutcome::failed(reason),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_up_to;

    fn field(d: i64) -> ImaginaryQuadraticField {
        ImaginaryQuadraticField::new(d).unwrap()
    }

    #[test]
    fn theorem1_examples() {
        let qi = field(-1);
        let outcome = theorem1_check(&qi, 3, 4).unwrap();
        assert!(outcome.is_established());
        assert_eq!(outcome.witness, Some(Theorem1Witness { p: 3, n: 4, q: 13 }));

        let outcome = theorem1_check(&qi, 5, 4).unwrap();
        assert_eq!(outcome.status, Verdict::NotEstablished);
        assert_eq!(outcome.reason, Reason::QNotPrime { q: 21 });
        assert_eq!(outcome.witness, None);

        let outcome = theorem1_check(&field(-3), 5, 2).unwrap();
        assert_eq!(outcome.status, Verdict::NotEstablished);
    }

    #[test]
    fn theorem1_rejects_multiples_of_six() {
        let outcome = theorem1_check(&field(-1), 5, 12).unwrap();
        assert_eq!(outcome.reason, Reason::SixDividesN { n: 12 });
    }

    #[test]
    fn theorem1_class_number_gate() {
        // h(-23) = 3, so p = 3 can never be established over Q(sqrt(-23)).
        let outcome = theorem1_check(&field(-23), 3, 4).unwrap();
        assert_eq!(outcome.reason, Reason::ClassNumberDivisible { h: 3 });
    }

    #[test]
    fn theorem1_search_examples() {
        let qi = field(-1);
        assert_eq!(theorem1_search(&qi, 19, None).unwrap().map(|w| w.n), Some(40));
        assert_eq!(theorem1_search(&qi, 31, None).unwrap().map(|w| w.n), Some(76));
        assert_eq!(theorem1_search(&qi, 97, None).unwrap().map(|w| w.n), Some(4));
        // A cap below the smallest witness exhausts the search.
        assert_eq!(theorem1_search(&qi, 19, Some(38)).unwrap(), None);
    }

    #[test]
    fn theorem1_never_works_over_eisenstein_field_for_p_at_least_5() {
        // Splitting in Q(sqrt(-3)) forces 3 | n, hence 6 | n and W_n = 0.
        let k = field(-3);
        for p in [5u64, 7, 11, 13] {
            assert_eq!(theorem1_search(&k, p, None).unwrap(), None, "p = {p}");
        }
        // ... but p = 3 works with n = 2.
        assert_eq!(theorem1_search(&k, 3, None).unwrap().map(|w| w.n), Some(2));
    }

    #[test]
    fn search_roundtrip_and_witness_shape() {
        let qi = field(-1);
        for p in primes_up_to(200).skip(1) {
            let found = theorem1_search(&qi, p, None).unwrap();
            let witness = found.expect("every small p has a witness over Q(i)");
            assert_eq!(witness.p, p);
            assert_eq!(witness.q, witness.n * p + 1);
            assert_eq!(witness.n % 2, 0);
            assert_ne!(witness.n % 6, 0);
            assert!(is_prime(witness.q));
            assert_eq!((witness.q - 1) % witness.n, 0);
            let check = theorem1_check(&qi, p, witness.n).unwrap();
            assert_eq!(check.witness, Some(witness));
        }
    }

    #[test]
    fn sophie_germain_examples() {
        let outcome = sophie_germain_check(&field(-7), 5).unwrap();
        assert!(outcome.is_established());
        assert_eq!(outcome.witness, Some(Theorem1Witness { p: 5, n: 2, q: 11 }));

        let outcome = sophie_germain_check(&field(-1), 5).unwrap();
        assert_eq!(outcome.reason, Reason::QNotSplit { q: 11 });

        // p | h gates everything regardless of q.
        let outcome = sophie_germain_check(&field(-23), 3).unwrap();
        assert_eq!(outcome.reason, Reason::ClassNumberDivisible { h: 3 });
    }

    #[test]
    fn sophie_germain_is_the_n_equals_2_specialization() {
        for d in [-1i64, -2, -3, -7, -11, -15, -23] {
            let k = field(d);
            for p in primes_up_to(60).skip(1) {
                assert_eq!(
                    sophie_germain_check(&k, p).unwrap(),
                    theorem1_check(&k, p, 2).unwrap(),
                    "d={d} p={p}"
                );
            }
        }
    }

    #[test]
    fn corollary2_examples() {
        let outcome = corollary2_check(3).unwrap();
        assert_eq!(outcome.witness, Some(Theorem1Witness { p: 3, n: 4, q: 13 }));
        let outcome = corollary2_check(5).unwrap();
        assert_eq!(outcome.witness, Some(Theorem1Witness { p: 5, n: 8, q: 41 }));
        let outcome = corollary2_check(7).unwrap();
        assert_eq!(outcome.witness, Some(Theorem1Witness { p: 7, n: 4, q: 29 }));
        // 77, 153 and 305 are all composite.
        let outcome = corollary2_check(19).unwrap();
        assert_eq!(
            outcome.reason,
            Reason::CandidatesExhausted { tried: vec![4, 8, 16] }
        );
    }

    #[test]
    fn condition1_examples() {
        let report = condition1_check(5).unwrap();
        assert!(report.holds);
        assert!(report.witnesses.is_empty());

        // Empty scan range at p = 3.
        let report = condition1_check(3).unwrap();
        assert!(report.holds);

        let report = condition1_check(7).unwrap();
        assert!(!report.holds);
        assert_eq!(report.witnesses, vec![2]);

        assert!(!condition1_holds(13).unwrap());
    }

    #[test]
    fn condition1_fast_mode_agrees_with_report() {
        for p in primes_up_to(600).skip(1) {
            assert_eq!(
                condition1_holds(p).unwrap(),
                condition1_check(p).unwrap().holds,
                "p = {p}"
            );
        }
    }

    #[test]
    fn condition1_rejects_bad_inputs() {
        assert_eq!(condition1_check(2).unwrap_err(), CriteriaError::NotOddPrime(2));
        assert_eq!(condition1_check(9).unwrap_err(), CriteriaError::NotOddPrime(9));
        // 2^32 + 15 is prime but its square does not fit the modulus range.
        assert_eq!(
            condition1_check(4_294_967_311).unwrap_err(),
            CriteriaError::SquareOverflow(4_294_967_311)
        );
    }

    #[test]
    fn exclusion_of_p_congruent_1_mod_3() {
        for p in primes_up_to(200).skip(1) {
            if p % 3 == 1 {
                assert!(!condition1_holds(p).unwrap(), "p = {p}");
            }
        }
    }

    #[test]
    fn pure_field_cases() {
        // Root test: gcd(7, 4) = 1 makes 7th powers a bijection mod 5.
        let v = pure_field_residue_degree_one(3, 7, 5).unwrap();
        assert!(v.exists);
        assert_eq!(v.case, PureFieldCase::Unramified);

        // 9 = 1 mod 4 and 5 does not divide 18.
        let v = pure_field_residue_degree_one(2, 9, 5).unwrap();
        assert!(v.exists);
        assert_eq!(v.case, PureFieldCase::CongruentExponent);

        // Cube roots exist mod every p = 2 mod 3.
        let v = pure_field_residue_degree_one(10, 3, 5).unwrap();
        assert!(v.exists);
        assert_eq!(v.case, PureFieldCase::Cubic);

        // p | d with n != 3 is outside the supported cases.
        assert_eq!(
            pure_field_residue_degree_one(5, 4, 5).unwrap_err(),
            CriteriaError::Unsupported { d: 5, n: 4, p: 5 }
        );

        // A negative root test: X^2 - 2 has no root mod 5.
        let v = pure_field_residue_degree_one(2, 2, 5).unwrap();
        assert!(!v.exists);
        assert_eq!(v.case, PureFieldCase::Unramified);

        assert_eq!(
            pure_field_residue_degree_one(16, 3, 5).unwrap_err(),
            CriteriaError::NotCubefree(16)
        );
        assert_eq!(
            pure_field_residue_degree_one(12, 9, 5).unwrap_err(),
            CriteriaError::NotSquarefree(12)
        );
        assert_eq!(
            pure_field_residue_degree_one(1, 3, 5).unwrap_err(),
            CriteriaError::InvalidRadicand(1)
        );
    }

    #[test]
    fn theorem2_examples() {
        let outcome = theorem2_check(&FieldHypothesis::PureField { d: 3, n: 7 }, 5).unwrap();
        assert!(outcome.is_established());
        assert_eq!(outcome.witness, None);

        let outcome = theorem2_check(&FieldHypothesis::TotallyRamified { degree: 4 }, 5).unwrap();
        assert!(outcome.is_established());

        let outcome = theorem2_check(&FieldHypothesis::Asserted { e: 5, f: 1 }, 5).unwrap();
        assert_eq!(outcome.reason, Reason::RamificationTooLarge { e: 5 });

        let outcome = theorem2_check(&FieldHypothesis::Asserted { e: 1, f: 2 }, 5).unwrap();
        assert_eq!(outcome.reason, Reason::ResidueDegreeNotOne { f: 2 });

        let outcome = theorem2_check(&FieldHypothesis::Asserted { e: 4, f: 1 }, 5).unwrap();
        assert!(outcome.is_established());
    }

    #[test]
    fn theorem2_condition_is_checked_before_the_field() {
        // At p = 7 the pure-field analysis would be unsupported (7 | dn),
        // but the condition already fails, so the outcome is a clean
        // NotEstablished.
        let outcome = theorem2_check(&FieldHypothesis::PureField { d: 3, n: 7 }, 7).unwrap();
        assert_eq!(outcome.status, Verdict::NotEstablished);
        assert_eq!(outcome.reason, Reason::ConditionViolated { witness: 2 });

        // When the condition holds, unsupported combinations do error.
        assert_eq!(
            theorem2_check(&FieldHypothesis::PureField { d: 5, n: 4 }, 5).unwrap_err(),
            CriteriaError::Unsupported { d: 5, n: 4, p: 5 }
        );
    }

    #[test]
    fn theorem2_quadratic_dispatch() {
        // 5 splits in Q(i), 7 is inert, 5 ramifies in Q(sqrt(-5)).
        let outcome = theorem2_check(&FieldHypothesis::Quadratic { d: -1 }, 5).unwrap();
        assert!(outcome.is_established());
        let outcome = theorem2_check(&FieldHypothesis::Quadratic { d: -1 }, 7).unwrap();
        assert_eq!(outcome.status, Verdict::NotEstablished);
        let outcome = theorem2_check(&FieldHypothesis::Quadratic { d: -5 }, 5).unwrap();
        assert!(outcome.is_established());
        // p = 3 has an empty scan range; hypothesis 1 decides alone.
        let outcome = theorem2_check(&FieldHypothesis::Quadratic { d: -2 }, 3).unwrap();
        assert!(outcome.is_established());
    }
}

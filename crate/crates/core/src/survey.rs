//! Batch reproduction of the experimental claims: the smallest-witness
//! table over Q(i), the full scan of exponents below a bound, and the
//! census of primes passing the mod p^2 non-congruence.
//!
//! Long runs stream one record per prime and checkpoint a contiguous
//! completed prefix (last fully processed prime plus running totals) to an
//! atomically replaced file, so a 10^6-scale run survives interruption and
//! resumes deterministically.
//!
//! The census does not re-derive the condition with two modular powers per
//! residue. For a fixed p, the Fermat quotient q_p(a) = (a^(p-1) - 1)/p
//! mod p is additive in a, so a smallest-prime-factor sieve fills the whole
//! table with one modular exponentiation per prime a and one addition per
//! composite a; the condition at a then reduces to the single comparison
//! a*q_p(a) = (a+1)*q_p(a+1) mod p. Results are identical to the direct
//! scan, which stays available as a cross-check.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{primes_in_range, primes_up_to, Modulus};
use crate::criteria::{theorem1_search, CriteriaError, Verdict};
use crate::quad::ImaginaryQuadraticField;

/// Checkpoint files are rewritten at most this often by default.
pub const DEFAULT_CHECKPOINT_INTERVAL: Duration = Duration::from_secs(10);

/// Primes are processed in spans of this width by default.
pub const DEFAULT_CHUNK_SPAN: u64 = 1 << 16;

/// Largest supported scan bound: keeps q = np + 1 inside the modulus range
/// for every candidate n under the default search cap.
pub const MAX_QI_BOUND: u64 = 1 << 40;

/// Largest supported census bound: p^2 must stay below 2^62.
pub const MAX_CENSUS_BOUND: u64 = 1 << 31;

const CHECKPOINT_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum SurveyError {
    #[error("bound must be at least {min}, got {got}")]
    BoundTooSmall { got: u64, min: u64 },
    #[error("bound {got} exceeds the supported maximum {max}")]
    BoundTooLarge { got: u64, max: u64 },
    #[error("checkpoint file {path} is malformed: {detail}")]
    MalformedCheckpoint { path: PathBuf, detail: String },
    #[error("checkpoint file {path} belongs to a different run")]
    CheckpointMismatch { path: PathBuf },
    #[error("failed to build the worker pool: {0}")]
    Parallel(String),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One streamed line of a survey: the prime, its verdict, the witness n
/// when the verdict is Established on a witness path, and elapsed
/// milliseconds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub p: u64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<u64>,
    pub ms: u64,
}

/// Final totals of a census run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusTotals {
    pub bound: u64,
    pub candidates: u64,
    pub holds: u64,
}

/// Final totals of a full scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub pmax: u64,
    pub checked: u64,
    pub failures: Vec<u64>,
}

/// One row of the smallest-witness table. `n` is None when the search
/// exhausted its cap without a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub p: u64,
    pub n: Option<u64>,
}

/// Knobs shared by the batch runs.
#[derive(Debug, Clone)]
pub struct ScanOptions {
    /// Cap on witness candidates n; None means the search default.
    pub n_cap: Option<u64>,
    /// Worker count; 0 or 1 runs sequentially.
    pub jobs: usize,
    /// Checkpoint file for resumable runs.
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_interval: Duration,
    /// Width of the prime spans processed per step.
    pub chunk_span: u64,
}

impl Default for ScanOptions {
    fn default() -> ScanOptions {
        ScanOptions {
            n_cap: None,
            jobs: 1,
            checkpoint: None,
            checkpoint_interval: DEFAULT_CHECKPOINT_INTERVAL,
            chunk_span: DEFAULT_CHUNK_SPAN,
        }
    }
}

/// For each odd prime p < p_max, the smallest witness n over Q(i).
pub fn qi_smallest_n_table(
    p_max: u64,
    n_cap: Option<u64>,
) -> Result<Vec<TableEntry>, SurveyError> {
    if p_max < 3 {
        return Err(SurveyError::BoundTooSmall { got: p_max, min: 3 });
    }
    let field = gaussian_field();
    let mut rows = Vec::new();
    for p in primes_up_to(p_max - 1).skip(1) {
        let witness = theorem1_search(&field, p, n_cap)?;
        rows.push(TableEntry {
            p,
            n: witness.map(|w| w.n),
        });
    }
    Ok(rows)
}

/// Every odd prime p <= p_bound with no witness over Q(i) under the cap.
/// Expected empty well past 10^6. Records stream through `sink` in
/// ascending order of p; on a resumed run only primes after the checkpoint
/// are re-emitted.
pub fn qi_full_scan(
    p_bound: u64,
    options: &ScanOptions,
    mut sink: impl FnMut(&SurveyRecord),
) -> Result<ScanReport, SurveyError> {
    if p_bound > MAX_QI_BOUND {
        return Err(SurveyError::BoundTooLarge {
            got: p_bound,
            max: MAX_QI_BOUND,
        });
    }
    let field = gaussian_field();
    let mut report = ScanReport {
        pmax: p_bound,
        checked: 0,
        failures: Vec::new(),
    };
    let mut next = 3u64;
    let mut checkpointer = Checkpointer::new(options);
    if let Some((last_p, totals)) = checkpointer.load::<ScanReport>()? {
        if totals.pmax != p_bound {
            return Err(checkpointer.mismatch());
        }
        report = totals;
        next = last_p + 1;
    }
    let pool = build_pool(options.jobs)?;
    let n_cap = options.n_cap;
    let span = options.chunk_span.max(1);
    let mut last_done = next.saturating_sub(1);
    while next <= p_bound {
        let hi = next.saturating_add(span - 1).min(p_bound);
        let primes = primes_in_range(next.max(3), hi);
        let records = process_chunk(pool.as_ref(), &primes, |p| {
            let started = Instant::now();
            let witness = theorem1_search(&field, p, n_cap)?;
            Ok(SurveyRecord {
                p,
                verdict: match witness {
                    Some(_) => Verdict::Established,
                    None => Verdict::NotEstablished,
                },
                n: witness.map(|w| w.n),
                ms: started.elapsed().as_millis() as u64,
            })
        })?;
        for record in &records {
            report.checked += 1;
            if record.verdict == Verdict::NotEstablished {
                report.failures.push(record.p);
            }
            sink(record);
            last_done = record.p;
        }
        checkpointer.maybe_save(last_done, &report)?;
        next = hi + 1;
    }
    checkpointer.finish()?;
    Ok(report)
}

/// Count the odd primes p = 2 mod 3 below `bound` and how many of them
/// satisfy the non-congruence, via the Fermat-quotient sieve. One record
/// per candidate prime streams through `sink` (verdict Established when the
/// condition holds).
pub fn condition1_census(
    bound: u64,
    options: &ScanOptions,
    mut sink: impl FnMut(&SurveyRecord),
) -> Result<CensusTotals, SurveyError> {
    if bound < 5 {
        return Err(SurveyError::BoundTooSmall { got: bound, min: 5 });
    }
    if bound > MAX_CENSUS_BOUND {
        return Err(SurveyError::BoundTooLarge {
            got: bound,
            max: MAX_CENSUS_BOUND,
        });
    }
    let mut totals = CensusTotals {
        bound,
        candidates: 0,
        holds: 0,
    };
    let mut next = 5u64;
    let mut checkpointer = Checkpointer::new(options);
    if let Some((last_p, saved)) = checkpointer.load::<CensusTotals>()? {
        if saved.bound != bound {
            return Err(checkpointer.mismatch());
        }
        totals = saved;
        next = last_p + 1;
    }
    let spf = SpfTable::up_to(bound / 2);
    let pool = build_pool(options.jobs)?;
    let mut scratch = QuotientBuffer::default();
    let span = options.chunk_span.max(1);
    let mut last_done = next.saturating_sub(1);
    while next < bound {
        let hi = next
            .saturating_add(span - 1)
            .min(bound.saturating_sub(1));
        let candidates: Vec<u64> = primes_in_range(next, hi)
            .into_iter()
            .filter(|&p| p % 3 == 2 && p % 2 == 1)
            .collect();
        let records: Vec<SurveyRecord> = match pool.as_ref() {
            Some(pool) => pool.install(|| {
                candidates
                    .par_iter()
                    .map_init(QuotientBuffer::default, |buffer, &p| census_one(p, &spf, buffer))
                    .collect()
            }),
            None => candidates
                .iter()
                .map(|&p| census_one(p, &spf, &mut scratch))
                .collect(),
        };
        for record in &records {
            totals.candidates += 1;
            if record.verdict == Verdict::Established {
                totals.holds += 1;
            }
            sink(record);
            last_done = record.p;
        }
        checkpointer.maybe_save(last_done, &totals)?;
        next = hi + 1;
    }
    checkpointer.finish()?;
    Ok(totals)
}

fn gaussian_field() -> ImaginaryQuadraticField {
    ImaginaryQuadraticField::new(-1).expect("Q(i) is a valid field")
}

fn census_one(p: u64, spf: &SpfTable, buffer: &mut QuotientBuffer) -> SurveyRecord {
    let started = Instant::now();
    let holds = condition1_holds_sieved_into(p, spf, buffer);
    SurveyRecord {
        p,
        verdict: if holds {
            Verdict::Established
        } else {
            Verdict::NotEstablished
        },
        n: None,
        ms: started.elapsed().as_millis() as u64,
    }
}

/// Smallest-prime-factor table for the quotient sieve.
pub struct SpfTable {
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn up_to(limit: u64) -> SpfTable {
        assert!(limit <= u32::MAX as u64);
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                let mut j = i * i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        SpfTable { spf }
    }

    #[inline]
    fn smallest(&self, a: u64) -> u64 {
        self.spf[a as usize] as u64
    }
}

#[derive(Default)]
struct QuotientBuffer(Vec<u32>);

/// The non-congruence condition for p via Fermat quotients, using a shared
/// smallest-prime-factor table covering at least (p-1)/2.
pub fn condition1_holds_sieved(p: u64, spf: &SpfTable) -> bool {
    condition1_holds_sieved_into(p, spf, &mut QuotientBuffer::default())
}

fn condition1_holds_sieved_into(p: u64, spf: &SpfTable, buffer: &mut QuotientBuffer) -> bool {
    debug_assert!(p >= 3 && p % 2 == 1);
    let half = (p - 1) / 2;
    let quotients = &mut buffer.0;
    quotients.clear();
    quotients.push(0); // index 0, unused
    quotients.push(0); // q_p(1) = 0
    if half >= 2 {
        let square = Modulus::new(p * p).expect("p^2 below the modulus cap");
        for a in 2..=half {
            let s = spf.smallest(a);
            let value = if s == a {
                // a prime: a^(p-1) = 1 + k*p mod p^2, and q_p(a) = k.
                (square.pow(a, p - 1) - 1) / p % p
            } else {
                (quotients[s as usize] as u64 + quotients[(a / s) as usize] as u64) % p
            };
            quotients.push(value as u32);
        }
    }
    // 1 + a^p = (1+a)^p mod p^2 collapses to a*q_p(a) = (a+1)*q_p(a+1) mod p.
    (1..=(p - 3) / 2).all(|a| {
        let lhs = a * quotients[a as usize] as u64 % p;
        let rhs = (a + 1) * quotients[a as usize + 1] as u64 % p;
        lhs != rhs
    })
}

fn build_pool(jobs: usize) -> Result<Option<rayon::ThreadPool>, SurveyError> {
    if jobs <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map(Some)
        .map_err(|e| SurveyError::Parallel(e.to_string()))
}

fn process_chunk<T, F>(
    pool: Option<&rayon::ThreadPool>,
    primes: &[u64],
    work: F,
) -> Result<Vec<T>, SurveyError>
where
    T: Send,
    F: Fn(u64) -> Result<T, CriteriaError> + Sync,
{
    let collected: Result<Vec<T>, CriteriaError> = match pool {
        Some(pool) => pool.install(|| primes.par_iter().map(|&p| work(p)).collect()),
        None => primes.iter().map(|&p| work(p)).collect(),
    };
    Ok(collected?)
}

/// Three-line checkpoint file: format version, last fully processed prime,
/// serialized running totals. Written to a sibling temp file and renamed,
/// so a reader never sees a torn state.
struct Checkpointer {
    path: Option<PathBuf>,
    interval: Duration,
    last_write: Instant,
}

impl Checkpointer {
    fn new(options: &ScanOptions) -> Checkpointer {
        Checkpointer {
            path: options.checkpoint.clone(),
            interval: options.checkpoint_interval,
            last_write: Instant::now(),
        }
    }

    fn mismatch(&self) -> SurveyError {
        SurveyError::CheckpointMismatch {
            path: self.path.clone().unwrap_or_default(),
        }
    }

    fn load<T: DeserializeOwned>(&self) -> Result<Option<(u64, T)>, SurveyError> {
        let Some(path) = &self.path else {
            return Ok(None);
        };
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines();
        let malformed = |detail: &str| SurveyError::MalformedCheckpoint {
            path: path.clone(),
            detail: detail.to_string(),
        };
        let version: u64 = lines
            .next()
            .and_then(|l| l.trim().parse().ok())
            .ok_or_else(|| malformed("missing version line"))?;
        if version != CHECKPOINT_VERSION {
            return Err(malformed(&format!("unsupported version {version}")));
        }
        let last_p: u64 = lines
            .next()
            .and_then(|l| l.trim().parse().ok())
            .ok_or_else(|| malformed("missing last-prime line"))?;
        let totals_line = lines.next().ok_or_else(|| malformed("missing totals line"))?;
        let totals: T = serde_json::from_str(totals_line)
            .map_err(|e| malformed(&format!("bad totals: {e}")))?;
        Ok(Some((last_p, totals)))
    }

    fn maybe_save<T: Serialize>(&mut self, last_p: u64, totals: &T) -> Result<(), SurveyError> {
        if self.path.is_none() || self.last_write.elapsed() < self.interval {
            return Ok(());
        }
        self.save(last_p, totals)
    }

    fn save<T: Serialize>(&mut self, last_p: u64, totals: &T) -> Result<(), SurveyError> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let mut tmp_name = OsString::from(path.as_os_str());
        tmp_name.push(".tmp");
        let tmp = PathBuf::from(tmp_name);
        {
            let mut file = fs::File::create(&tmp)?;
            writeln!(file, "{CHECKPOINT_VERSION}")?;
            writeln!(file, "{last_p}")?;
            writeln!(
                file,
                "{}",
                serde_json::to_string(totals).expect("totals serialize")
            )?;
            file.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        self.last_write = Instant::now();
        Ok(())
    }

    /// A run that completes has no further use for its checkpoint.
    fn finish(self) -> Result<(), SurveyError> {
        if let Some(path) = &self.path {
            match fs::remove_file(path) {
                Ok(()) => {}
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
                Err(e) => return Err(e.into()),
            }
        }
        Ok(())
    }
}

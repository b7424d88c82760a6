//! Command-line surface.
//!
//! Every subcommand writes its payload to stdout and diagnostics to stderr.
//! The verdict of a criterion is never encoded in the exit code: 0 means
//! the command ran to completion (read the payload), 2 is a usage or
//! argument error, 3 a capability limit (overflow, cap exceeded,
//! unsupported case), and 4 an I/O failure.
//!
//! Formats: `human` is unstable prose; `json` emits one object per line
//! with stable field names; `csv` is headered with fixed columns per
//! subcommand. Survey runs stream one record line per prime (suppressed by
//! `--quiet`) followed by the totals; in CSV mode the totals go to stderr
//! so the table stays uniform.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, ArithError};
use crate::criteria::{
    self, CriteriaError, FieldHypothesis, Reason, Theorem1Witness, Verdict,
};
use crate::quad::{FieldError, ImaginaryQuadraticField};
use crate::survey::{self, ScanOptions, ScanReport, SurveyError, SurveyRecord};
use crate::wendt::{self, WendtError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPABILITY: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Prose for people; not a stable interface.
    Human,
    /// One JSON object per line; stable field names.
    Json,
    /// Headered rows with fixed columns per subcommand.
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "flt1",
    version,
    about = "Local-obstruction criteria for the first case of Fermat's Last Theorem over number fields"
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Human)]
    format: OutputFormat,
    /// Cap on witness candidates n for searches and surveys.
    #[arg(long, global = true)]
    nmax: Option<u64>,
    /// Suppress per-record survey lines; totals still print.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact W_n, or whether a prime q = 1 mod n divides W_n.
    Wendt {
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Prime modulus q; reports the residue of W_n and a verdict.
        #[arg(long = "mod")]
        modulus: Option<u64>,
    },
    /// Class number of the imaginary quadratic field Q(sqrt(d)).
    #[command(name = "class-number")]
    ClassNumber {
        #[arg(allow_negative_numbers = true)]
        d: i64,
    },
    /// Witness check (with --n) or smallest-witness search over Q(sqrt(d)).
    Theorem1 {
        #[arg(long, allow_negative_numbers = true)]
        d: i64,
        #[arg(long)]
        p: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: Option<u64>,
    },
    /// The Sophie Germain analogue: the witness is q = 2p + 1.
    Germain {
        #[arg(long, allow_negative_numbers = true)]
        d: i64,
        #[arg(long)]
        p: u64,
    },
    /// Over Q(i): tries n = 4, 8, 16 in that order.
    Corollary2 {
        #[arg(long)]
        p: u64,
    },
    /// The non-congruence 1 + a^p != (1+a)^p mod p^2, a = 1 .. (p-3)/2.
    Condition1 {
        #[arg(long)]
        p: u64,
        /// Collect every violating a instead of stopping at the first.
        #[arg(long)]
        witnesses: bool,
    },
    /// The mod p^2 criterion over a described field.
    Theorem2 {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Batch runs over prime ranges.
    Survey {
        #[command(subcommand)]
        survey: SurveyCommand,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct FieldArgs {
    /// Quadratic field Q(sqrt(d)), d < 0 squarefree.
    #[arg(long, allow_negative_numbers = true)]
    quadratic: Option<i64>,
    /// Pure field Q(d^(1/n)), written as d,n.
    #[arg(long, value_parser = parse_pure, allow_hyphen_values = true)]
    pure: Option<PureArg>,
    /// Extension totally ramified at p with the given degree over Q.
    #[arg(long = "totally-ramified", value_parser = clap::value_parser!(u64).range(1..))]
    totally_ramified: Option<u64>,
    /// Raw assertion e,f: ramification index and residue degree.
    #[arg(long, value_parser = parse_asserted)]
    asserted: Option<AssertedArg>,
}

impl FieldArgs {
    fn hypothesis(&self) -> FieldHypothesis {
        if let Some(d) = self.quadratic {
            FieldHypothesis::Quadratic { d }
        } else if let Some(PureArg { d, n }) = self.pure {
            FieldHypothesis::PureField { d, n }
        } else if let Some(degree) = self.totally_ramified {
            FieldHypothesis::TotallyRamified { degree }
        } else if let Some(AssertedArg { e, f }) = self.asserted {
            FieldHypothesis::Asserted { e, f }
        } else {
            unreachable!("clap enforces exactly one field argument")
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct PureArg {
    d: i64,
    n: u64,
}

fn parse_pure(s: &str) -> Result<PureArg, String> {
    let (d, n) = s
        .split_once(',')
        .ok_or_else(|| "expected d,n (for example 3,7)".to_string())?;
    let d: i64 = d.trim().parse().map_err(|_| format!("bad radicand {d:?}"))?;
    let n: u64 = n.trim().parse().map_err(|_| format!("bad degree {n:?}"))?;
    if n == 0 {
        return Err("degree must be positive".to_string());
    }
    Ok(PureArg { d, n })
}

#[derive(Debug, Clone, Copy)]
struct AssertedArg {
    e: u64,
    f: u64,
}

fn parse_asserted(s: &str) -> Result<AssertedArg, String> {
    let (e, f) = s
        .split_once(',')
        .ok_or_else(|| "expected e,f (for example 2,1)".to_string())?;
    let e: u64 = e.trim().parse().map_err(|_| format!("bad ramification index {e:?}"))?;
    let f: u64 = f.trim().parse().map_err(|_| format!("bad residue degree {f:?}"))?;
    Ok(AssertedArg { e, f })
}

#[derive(Subcommand, Debug)]
enum SurveyCommand {
    /// Smallest witness n over Q(i) for each odd prime p < pmax.
    Table {
        #[arg(long)]
        pmax: u64,
    },
    /// Scan every odd prime p <= pmax for a witness over Q(i).
    Qi {
        #[arg(long)]
        pmax: u64,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Count primes p = 2 mod 3 below the bound that pass the
    /// non-congruence, via the Fermat-quotient sieve.
    Census {
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

// ---------------------------------------------------------------------------
// Payload schemas. These are the stable JSON surfaces; CSV columns mirror
// them field for field.

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WendtExactPayload {
    pub n: u64,
    /// Decimal string: W_n outgrows every machine word quickly.
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WendtModularPayload {
    pub n: u64,
    pub modulus: u64,
    pub residue: u64,
    pub divides: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassNumberPayload {
    pub d: i64,
    pub discriminant: i64,
    pub h: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionPayload {
    pub p: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub requested_n: Option<u64>,
    pub status: Verdict,
    pub reason: Reason,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Theorem1Witness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_cap: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exhausted: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition1Payload {
    pub p: u64,
    pub holds: bool,
    /// Upper end of the scanned range (p-3)/2.
    pub scan_end: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witnesses: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem2Payload {
    pub p: u64,
    pub field: FieldHypothesis,
    pub status: Verdict,
    pub reason: Reason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRowPayload {
    pub p: u64,
    /// None marks search exhaustion under the cap.
    pub n: Option<u64>,
}

// ---------------------------------------------------------------------------

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure {
            code: EXIT_IO,
            message: e.to_string(),
        }
    }
}

impl From<ArithError> for Failure {
    fn from(e: ArithError) -> Failure {
        Failure {
            code: EXIT_CAPABILITY,
            message: e.to_string(),
        }
    }
}

impl From<FieldError> for Failure {
    fn from(e: FieldError) -> Failure {
        let code = match e {
            FieldError::NotImaginary(_) | FieldError::NotSquarefree(_) => EXIT_USAGE,
            FieldError::CapExceeded { .. } => EXIT_CAPABILITY,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<WendtError> for Failure {
    fn from(e: WendtError) -> Failure {
        match e {
            WendtError::Arith(inner) => inner.into(),
            WendtError::CapExceeded { .. } | WendtError::Overflow { .. } => Failure {
                code: EXIT_CAPABILITY,
                message: e.to_string(),
            },
        }
    }
}

impl From<CriteriaError> for Failure {
    fn from(e: CriteriaError) -> Failure {
        match e {
            CriteriaError::Field(inner) => inner.into(),
            CriteriaError::Wendt(inner) => inner.into(),
            CriteriaError::Arith(inner) => inner.into(),
            CriteriaError::NotOddPrime(_)
            | CriteriaError::InvalidWitnessCandidate(_)
            | CriteriaError::InvalidRadicand(_)
            | CriteriaError::NotCubefree(_)
            | CriteriaError::NotSquarefree(_)
            | CriteriaError::InvalidDegree => Failure {
                code: EXIT_USAGE,
                message: e.to_string(),
            },
            CriteriaError::Overflow { .. }
            | CriteriaError::SquareOverflow(_)
            | CriteriaError::Unsupported { .. } => Failure {
                code: EXIT_CAPABILITY,
                message: e.to_string(),
            },
        }
    }
}

impl From<SurveyError> for Failure {
    fn from(e: SurveyError) -> Failure {
        match e {
            SurveyError::Criteria(inner) => inner.into(),
            SurveyError::BoundTooSmall { .. } => Failure {
                code: EXIT_USAGE,
                message: e.to_string(),
            },
            SurveyError::BoundTooLarge { .. } => Failure {
                code: EXIT_CAPABILITY,
                message: e.to_string(),
            },
            SurveyError::MalformedCheckpoint { .. }
            | SurveyError::CheckpointMismatch { .. }
            | SurveyError::Parallel(_)
            | SurveyError::Io(_) => Failure {
                code: EXIT_IO,
                message: e.to_string(),
            },
        }
    }
}

/// Parse argv, run the command, and return the process exit code. Payload
/// goes to `out`, diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match &cli.command {
        Command::Wendt { n, modulus } => cmd_wendt(*n, *modulus, cli.format, out),
        Command::ClassNumber { d } => cmd_class_number(*d, cli.format, out),
        Command::Theorem1 { d, p, n } => cmd_theorem1(*d, *p, *n, cli, out),
        Command::Germain { d, p } => cmd_germain(*d, *p, cli.format, out),
        Command::Corollary2 { p } => cmd_corollary2(*p, cli.format, out),
        Command::Condition1 { p, witnesses } => cmd_condition1(*p, *witnesses, cli.format, out),
        Command::Theorem2 { p, field } => cmd_theorem2(*p, &field.hypothesis(), cli.format, out),
        Command::Survey { survey } => match survey {
            SurveyCommand::Table { pmax } => cmd_survey_table(*pmax, cli, out),
            SurveyCommand::Qi {
                pmax,
                checkpoint,
                jobs,
            } => cmd_survey_qi(*pmax, checkpoint.clone(), *jobs, cli, out, err),
            SurveyCommand::Census {
                bound,
                checkpoint,
                jobs,
            } => cmd_survey_census(*bound, checkpoint.clone(), *jobs, cli, out, err),
        },
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, payload: &T) -> std::io::Result<()> {
    writeln!(
        out,
        "{}",
        serde_json::to_string(payload).expect("payloads serialize")
    )
}

fn opt_column<T: std::fmt::Display>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn cmd_wendt(
    n: u64,
    modulus: Option<u64>,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    match modulus {
        None => {
            let value = wendt::wendt_exact(n)?;
            let payload = WendtExactPayload {
                n,
                value: value.to_string(),
            };
            match format {
                OutputFormat::Json => emit_json(out, &payload)?,
                OutputFormat::Csv => {
                    writeln!(out, "n,value")?;
                    writeln!(out, "{},{}", payload.n, payload.value)?;
                }
                OutputFormat::Human => writeln!(out, "W_{} = {}", payload.n, payload.value)?,
            }
        }
        Some(q) => {
            if !is_prime(q) {
                return Err(Failure::usage(format!("--mod {q} is not prime")));
            }
            let residue = wendt::wendt_mod(n, q)?;
            let payload = WendtModularPayload {
                n,
                modulus: q,
                residue,
                divides: residue == 0,
            };
            match format {
                OutputFormat::Json => emit_json(out, &payload)?,
                OutputFormat::Csv => {
                    writeln!(out, "n,modulus,residue,divides")?;
                    writeln!(
                        out,
                        "{},{},{},{}",
                        payload.n, payload.modulus, payload.residue, payload.divides
                    )?;
                }
                OutputFormat::Human => {
                    if payload.divides {
                        writeln!(out, "{} divides W_{}", q, n)?;
                    } else {
                        writeln!(out, "{} does not divide W_{} (residue {})", q, n, residue)?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn cmd_class_number(d: i64, format: OutputFormat, out: &mut dyn Write) -> Result<(), Failure> {
    let field = ImaginaryQuadraticField::new(d)?;
    let h = field.class_number()?;
    let payload = ClassNumberPayload {
        d,
        discriminant: field.discriminant(),
        h,
    };
    match format {
        OutputFormat::Json => emit_json(out, &payload)?,
        OutputFormat::Csv => {
            writeln!(out, "d,discriminant,h")?;
            writeln!(out, "{},{},{}", payload.d, payload.discriminant, payload.h)?;
        }
        OutputFormat::Human => writeln!(
            out,
            "h(Q(sqrt({}))) = {}  (discriminant {})",
            d, h, payload.discriminant
        )?,
    }
    Ok(())
}

fn emit_criterion(
    payload: &CriterionPayload,
    field_name: &str,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    match format {
        OutputFormat::Json => emit_json(out, payload)?,
        OutputFormat::Csv => {
            writeln!(out, "p,d,status,n,q,reason")?;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                payload.p,
                opt_column(payload.d),
                payload.status.slug(),
                opt_column(payload.witness.map(|w| w.n)),
                opt_column(payload.witness.map(|w| w.q)),
                payload.reason.slug()
            )?;
        }
        OutputFormat::Human => match (&payload.status, &payload.witness) {
            (Verdict::Established, Some(w)) => writeln!(
                out,
                "established for p = {} over {}: witness n = {}, q = {}",
                payload.p, field_name, w.n, w.q
            )?,
            _ => writeln!(
                out,
                "not established for p = {} over {}: {}",
                payload.p, field_name, payload.reason
            )?,
        },
    }
    Ok(())
}

fn cmd_theorem1(
    d: i64,
    p: u64,
    n: Option<u64>,
    cli: &Cli,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let field = ImaginaryQuadraticField::new(d)?;
    let payload = match n {
        Some(n) => {
            let outcome = criteria::theorem1_check(&field, p, n)?;
            CriterionPayload {
                p,
                d: Some(d),
                requested_n: Some(n),
                status: outcome.status,
                reason: outcome.reason,
                witness: outcome.witness,
                n_cap: None,
                exhausted: None,
            }
        }
        None => {
            let witness = criteria::theorem1_search(&field, p, cli.nmax)?;
            let n_cap = criteria::effective_search_cap(p, cli.nmax);
            match witness {
                Some(w) => CriterionPayload {
                    p,
                    d: Some(d),
                    requested_n: None,
                    status: Verdict::Established,
                    reason: Reason::WitnessFound,
                    witness: Some(w),
                    n_cap: Some(n_cap),
                    exhausted: Some(false),
                },
                None => CriterionPayload {
                    p,
                    d: Some(d),
                    requested_n: None,
                    status: Verdict::NotEstablished,
                    reason: Reason::SearchExhausted { n_cap },
                    witness: None,
                    n_cap: Some(n_cap),
                    exhausted: Some(true),
                },
            }
        }
    };
    emit_criterion(&payload, &format!("Q(sqrt({d}))"), cli.format, out)
}

fn cmd_germain(d: i64, p: u64, format: OutputFormat, out: &mut dyn Write) -> Result<(), Failure> {
    let field = ImaginaryQuadraticField::new(d)?;
    let outcome = criteria::sophie_germain_check(&field, p)?;
    let payload = CriterionPayload {
        p,
        d: Some(d),
        requested_n: Some(2),
        status: outcome.status,
        reason: outcome.reason,
        witness: outcome.witness,
        n_cap: None,
        exhausted: None,
    };
    emit_criterion(&payload, &format!("Q(sqrt({d}))"), format, out)
}

fn cmd_corollary2(p: u64, format: OutputFormat, out: &mut dyn Write) -> Result<(), Failure> {
    let outcome = criteria::corollary2_check(p)?;
    let payload = CriterionPayload {
        p,
        d: Some(-1),
        requested_n: None,
        status: outcome.status,
        reason: outcome.reason,
        witness: outcome.witness,
        n_cap: None,
        exhausted: None,
    };
    emit_criterion(&payload, "Q(i)", format, out)
}

fn cmd_condition1(
    p: u64,
    witnesses: bool,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let payload = if witnesses {
        let report = criteria::condition1_check(p)?;
        Condition1Payload {
            p,
            holds: report.holds,
            scan_end: (p - 3) / 2,
            witnesses: Some(report.witnesses),
        }
    } else {
        let holds = criteria::condition1_holds(p)?;
        Condition1Payload {
            p,
            holds,
            scan_end: (p - 3) / 2,
            witnesses: None,
        }
    };
    match format {
        OutputFormat::Json => emit_json(out, &payload)?,
        OutputFormat::Csv => {
            writeln!(out, "p,holds,scan_end,witnesses")?;
            let listed = payload
                .witnesses
                .as_ref()
                .map(|ws| {
                    ws.iter()
                        .map(|a| a.to_string())
                        .collect::<Vec<_>>()
                        .join(";")
                })
                .unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{}",
                payload.p, payload.holds, payload.scan_end, listed
            )?;
        }
        OutputFormat::Human => {
            if payload.holds {
                writeln!(
                    out,
                    "condition (1) holds for p = {} (a = 1..{} all pass)",
                    p, payload.scan_end
                )?;
            } else {
                match &payload.witnesses {
                    Some(ws) => writeln!(
                        out,
                        "condition (1) fails for p = {} at a = {:?}",
                        p, ws
                    )?,
                    None => writeln!(out, "condition (1) fails for p = {}", p)?,
                }
            }
        }
    }
    Ok(())
}

fn cmd_theorem2(
    p: u64,
    hypothesis: &FieldHypothesis,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let outcome = criteria::theorem2_check(hypothesis, p)?;
    let payload = Theorem2Payload {
        p,
        field: hypothesis.clone(),
        status: outcome.status,
        reason: outcome.reason,
    };
    match format {
        OutputFormat::Json => emit_json(out, &payload)?,
        OutputFormat::Csv => {
            writeln!(out, "p,field,status,reason")?;
            writeln!(
                out,
                "{},{},{},{}",
                payload.p,
                payload.field,
                payload.status.slug(),
                payload.reason.slug()
            )?;
        }
        OutputFormat::Human => match payload.status {
            Verdict::Established => writeln!(
                out,
                "established for p = {} over {}: {}",
                p, payload.field, payload.reason
            )?,
            Verdict::NotEstablished => writeln!(
                out,
                "not established for p = {} over {}: {}",
                p, payload.field, payload.reason
            )?,
        },
    }
    Ok(())
}

fn cmd_survey_table(pmax: u64, cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let rows = survey::qi_smallest_n_table(pmax, cli.nmax)?;
    match cli.format {
        OutputFormat::Csv => {
            writeln!(out, "p,n")?;
            for row in &rows {
                writeln!(out, "{},{}", row.p, opt_column(row.n))?;
            }
        }
        OutputFormat::Json => {
            for row in &rows {
                emit_json(out, &TableRowPayload { p: row.p, n: row.n })?;
            }
        }
        OutputFormat::Human => {
            for row in &rows {
                match row.n {
                    Some(n) => writeln!(out, "p = {:>6}: smallest n = {}", row.p, n)?,
                    None => writeln!(out, "p = {:>6}: no witness under the cap", row.p)?,
                }
            }
        }
    }
    Ok(())
}

fn cmd_survey_qi(
    pmax: u64,
    checkpoint: Option<PathBuf>,
    jobs: Option<usize>,
    cli: &Cli,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let options = ScanOptions {
        n_cap: cli.nmax,
        jobs: jobs.unwrap_or(1),
        checkpoint,
        ..ScanOptions::default()
    };
    if cli.format == OutputFormat::Csv && !cli.quiet {
        writeln!(out, "p,verdict,n,ms")?;
    }
    let mut sink_error: Option<std::io::Error> = None;
    let report = survey::qi_full_scan(pmax, &options, |record| {
        if cli.quiet || sink_error.is_some() {
            return;
        }
        if let Err(e) = write_record(out, cli.format, record) {
            sink_error = Some(e);
        }
    })?;
    if let Some(e) = sink_error {
        return Err(e.into());
    }
    emit_scan_totals(&report, cli.format, out, err)
}

fn emit_scan_totals(
    report: &ScanReport,
    format: OutputFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    match format {
        OutputFormat::Json => emit_json(out, report)?,
        OutputFormat::Human => {
            if report.failures.is_empty() {
                writeln!(
                    out,
                    "checked {} odd primes <= {}; all established",
                    report.checked, report.pmax
                )?;
            } else {
                writeln!(
                    out,
                    "checked {} odd primes <= {}; failures: {:?}",
                    report.checked, report.pmax, report.failures
                )?;
            }
        }
        OutputFormat::Csv => {
            // Keep the stdout table uniform; totals are a diagnostic here.
            writeln!(
                err,
                "checked={} pmax={} failures={}",
                report.checked,
                report.pmax,
                report.failures.len()
            )?;
        }
    }
    Ok(())
}

fn cmd_survey_census(
    bound: u64,
    checkpoint: Option<PathBuf>,
    jobs: Option<usize>,
    cli: &Cli,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let options = ScanOptions {
        n_cap: cli.nmax,
        jobs: jobs.unwrap_or(1),
        checkpoint,
        ..ScanOptions::default()
    };
    if cli.format == OutputFormat::Csv && !cli.quiet {
        writeln!(out, "p,verdict,n,ms")?;
    }
    let mut sink_error: Option<std::io::Error> = None;
    let totals = survey::condition1_census(bound, &options, |record| {
        if cli.quiet || sink_error.is_some() {
            return;
        }
        if let Err(e) = write_record(out, cli.format, record) {
            sink_error = Some(e);
        }
    })?;
    if let Some(e) = sink_error {
        return Err(e.into());
    }
    match cli.format {
        OutputFormat::Json => emit_json(out, &totals)?,
        OutputFormat::Human => {
            let percent = 100.0 * totals.holds as f64 / totals.candidates.max(1) as f64;
            writeln!(
                out,
                "{} of {} candidate primes below {} satisfy condition (1) ({percent:.1}%)",
                totals.holds, totals.candidates, totals.bound
            )?;
        }
        OutputFormat::Csv => {
            writeln!(
                err,
                "bound={} candidates={} holds={}",
                totals.bound, totals.candidates, totals.holds
            )?;
        }
    }
    Ok(())
}

fn write_record(
    out: &mut dyn Write,
    format: OutputFormat,
    record: &SurveyRecord,
) -> std::io::Result<()> {
    match format {
        OutputFormat::Json => emit_json(out, record),
        OutputFormat::Csv => writeln!(
            out,
            "{},{},{},{}",
            record.p,
            record.verdict.slug(),
            opt_column(record.n),
            record.ms
        ),
        OutputFormat::Human => match record.n {
            Some(n) => writeln!(
                out,
                "p = {:>8}: {} with n = {} [{} ms]",
                record.p,
                record.verdict,
                n,
                record.ms
            ),
            None => writeln!(
                out,
                "p = {:>8}: {} [{} ms]",
                record.p, record.verdict, record.ms
            ),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::survey::CensusTotals;

    fn run_cli(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args.iter().copied(), &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn wendt_exact_json() {
        let (code, out, _) = run_cli(&["flt1", "--format", "json", "wendt", "2"]);
        assert_eq!(code, EXIT_OK);
        let payload: WendtExactPayload = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(payload, WendtExactPayload { n: 2, value: "-3".into() });
    }

    #[test]
    fn wendt_modular_verdict() {
        let (code, out, _) = run_cli(&["flt1", "--format", "json", "wendt", "10", "--mod", "31"]);
        assert_eq!(code, EXIT_OK);
        let payload: WendtModularPayload = serde_json::from_str(out.trim()).unwrap();
        assert!(payload.divides);
        assert_eq!(payload.residue, 0);
    }

    #[test]
    fn wendt_cap_is_a_capability_error() {
        let (code, _, err) = run_cli(&["flt1", "wendt", "64"]);
        assert_eq!(code, EXIT_CAPABILITY);
        assert!(err.contains("capped"));
    }

    #[test]
    fn wendt_composite_modulus_is_usage() {
        let (code, _, _) = run_cli(&["flt1", "wendt", "4", "--mod", "15"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn class_number_both_negative_forms() {
        let (code, out, _) = run_cli(&["flt1", "--format", "json", "class-number", "-5"]);
        assert_eq!(code, EXIT_OK);
        let payload: ClassNumberPayload = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(payload.h, 2);
        assert_eq!(payload.discriminant, -20);

        let (code, out, _) = run_cli(&["flt1", "--format", "json", "class-number", "--", "-5"]);
        assert_eq!(code, EXIT_OK);
        let payload: ClassNumberPayload = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(payload.h, 2);
    }

    #[test]
    fn class_number_domain_errors_are_usage() {
        let (code, _, _) = run_cli(&["flt1", "class-number", "-4"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = run_cli(&["flt1", "class-number", "5"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn theorem1_search_payload() {
        let spaced: &[&str] = &["flt1", "--format", "json", "theorem1", "--d", "-1", "--p", "19"];
        let joined: &[&str] = &["flt1", "--format", "json", "theorem1", "--d=-1", "--p", "19"];
        for argv in [spaced, joined] {
            let (code, out, _) = run_cli(argv);
            assert_eq!(code, EXIT_OK);
            let payload: CriterionPayload = serde_json::from_str(out.trim()).unwrap();
            assert_eq!(payload.status, Verdict::Established);
            assert_eq!(
                payload.witness,
                Some(Theorem1Witness { p: 19, n: 40, q: 761 })
            );
            assert_eq!(payload.exhausted, Some(false));
        }
    }

    #[test]
    fn theorem1_check_mode() {
        let (code, out, _) = run_cli(&[
            "flt1", "--format", "json", "theorem1", "--d", "-1", "--p", "5", "--n", "4",
        ]);
        assert_eq!(code, EXIT_OK);
        let payload: CriterionPayload = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(payload.status, Verdict::NotEstablished);
        assert_eq!(payload.reason, Reason::QNotPrime { q: 21 });
    }

    #[test]
    fn verdict_is_not_an_exit_code() {
        // 4*19+1, 8*19+1, 16*19+1 are all composite: NotEstablished, exit 0.
        let (code, out, _) = run_cli(&["flt1", "--format", "json", "corollary2", "--p", "19"]);
        assert_eq!(code, EXIT_OK);
        let payload: CriterionPayload = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(payload.status, Verdict::NotEstablished);
    }

    #[test]
    fn condition1_known_prime() {
        let (code, out, _) = run_cli(&["flt1", "--format", "json", "condition1", "--p", "149"]);
        assert_eq!(code, EXIT_OK);
        let payload: Condition1Payload = serde_json::from_str(out.trim()).unwrap();
        assert!(payload.holds);
        assert_eq!(payload.witnesses, None);

        let (code, out, _) = run_cli(&[
            "flt1", "--format", "json", "condition1", "--p", "7", "--witnesses",
        ]);
        assert_eq!(code, EXIT_OK);
        let payload: Condition1Payload = serde_json::from_str(out.trim()).unwrap();
        assert!(!payload.holds);
        assert_eq!(payload.witnesses, Some(vec![2]));
    }

    #[test]
    fn condition1_bad_p_is_usage() {
        let (code, _, _) = run_cli(&["flt1", "condition1", "--p", "9"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn condition1_overflow_is_capability() {
        let (code, _, _) = run_cli(&["flt1", "condition1", "--p", "4294967311"]);
        assert_eq!(code, EXIT_CAPABILITY);
    }

    #[test]
    fn theorem2_field_forms() {
        let (code, out, _) = run_cli(&[
            "flt1", "--format", "json", "theorem2", "--p", "5", "--pure", "3,7",
        ]);
        assert_eq!(code, EXIT_OK);
        let payload: Theorem2Payload = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(payload.status, Verdict::Established);
        assert_eq!(payload.field, FieldHypothesis::PureField { d: 3, n: 7 });

        let (code, out, _) = run_cli(&[
            "flt1", "--format", "json", "theorem2", "--p", "5", "--totally-ramified", "4",
        ]);
        assert_eq!(code, EXIT_OK);
        let payload: Theorem2Payload = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(payload.status, Verdict::Established);

        // Negative radicand through the comma parser.
        let (code, out, _) = run_cli(&[
            "flt1", "--format", "json", "theorem2", "--p", "5", "--pure", "-7,3",
        ]);
        assert_eq!(code, EXIT_OK);
        let payload: Theorem2Payload = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(payload.field, FieldHypothesis::PureField { d: -7, n: 3 });
    }

    #[test]
    fn theorem2_unsupported_is_capability() {
        let (code, _, _) = run_cli(&["flt1", "theorem2", "--p", "5", "--pure", "5,4"]);
        assert_eq!(code, EXIT_CAPABILITY);
    }

    #[test]
    fn theorem2_requires_exactly_one_field() {
        let (code, _, _) = run_cli(&["flt1", "theorem2", "--p", "5"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = run_cli(&[
            "flt1", "theorem2", "--p", "5", "--quadratic", "-1", "--totally-ramified", "4",
        ]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn usage_errors() {
        let (code, _, _) = run_cli(&["flt1", "theorem1", "--d", "-1"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = run_cli(&["flt1", "no-such-command"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = run_cli(&["flt1", "wendt", "0"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_cli(&["flt1", "--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("Usage"));
    }

    #[test]
    fn survey_table_csv_header() {
        let (code, out, _) = run_cli(&["flt1", "--format", "csv", "survey", "table", "--pmax", "10"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "p,n\n3,4\n5,8\n7,4\n");
    }

    #[test]
    fn survey_qi_quiet_json_totals_only() {
        let (code, out, _) = run_cli(&[
            "flt1", "--format", "json", "--quiet", "survey", "qi", "--pmax", "100",
        ]);
        assert_eq!(code, EXIT_OK);
        let lines: Vec<&str> = out.trim().lines().collect();
        assert_eq!(lines.len(), 1);
        let report: ScanReport = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(report.checked, 24);
        assert!(report.failures.is_empty());
    }

    #[test]
    fn survey_census_json() {
        let (code, out, _) = run_cli(&[
            "flt1", "--format", "json", "--quiet", "survey", "census", "--bound", "150",
        ]);
        assert_eq!(code, EXIT_OK);
        let totals: CensusTotals = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(
            totals,
            CensusTotals { bound: 150, candidates: 18, holds: 16 }
        );
    }

    #[test]
    fn survey_census_bad_bound_is_usage() {
        let (code, _, _) = run_cli(&["flt1", "survey", "census", "--bound", "3"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn survey_checkpoint_directory_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let (code, _, _) = run_cli(&[
            "flt1",
            "survey",
            "census",
            "--bound",
            "150",
            "--checkpoint",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_IO);
    }

    #[test]
    fn payload_json_roundtrips() {
        let wendt_exact = WendtExactPayload { n: 2, value: "-3".into() };
        let wendt_mod = WendtModularPayload { n: 10, modulus: 31, residue: 0, divides: true };
        let class_number = ClassNumberPayload { d: -5, discriminant: -20, h: 2 };
        let criterion = CriterionPayload {
            p: 19,
            d: Some(-1),
            requested_n: None,
            status: Verdict::Established,
            reason: Reason::WitnessFound,
            witness: Some(Theorem1Witness { p: 19, n: 40, q: 761 }),
            n_cap: Some(1 << 20),
            exhausted: Some(false),
        };
        let criterion_failed = CriterionPayload {
            p: 5,
            d: Some(-1),
            requested_n: Some(4),
            status: Verdict::NotEstablished,
            reason: Reason::QNotPrime { q: 21 },
            witness: None,
            n_cap: None,
            exhausted: None,
        };
        let condition = Condition1Payload {
            p: 7,
            holds: false,
            scan_end: 2,
            witnesses: Some(vec![2]),
        };
        let theorem2 = Theorem2Payload {
            p: 5,
            field: FieldHypothesis::PureField { d: 3, n: 7 },
            status: Verdict::Established,
            reason: Reason::HypothesesSatisfied,
        };
        let table_row = TableRowPayload { p: 101, n: None };
        let record = SurveyRecord {
            p: 19,
            verdict: Verdict::Established,
            n: Some(40),
            ms: 3,
        };
        let totals = CensusTotals { bound: 150, candidates: 18, holds: 16 };
        let report = ScanReport { pmax: 100, checked: 24, failures: vec![] };

        macro_rules! roundtrip {
            ($value:expr) => {{
                let text = serde_json::to_string(&$value).unwrap();
                let back = serde_json::from_str(&text).unwrap();
                assert_eq!($value, back);
            }};
        }
        roundtrip!(wendt_exact);
        roundtrip!(wendt_mod);
        roundtrip!(class_number);
        roundtrip!(criterion);
        roundtrip!(criterion_failed);
        roundtrip!(condition);
        roundtrip!(theorem2);
        roundtrip!(table_row);
        roundtrip!(record);
        roundtrip!(totals);
        roundtrip!(report);
    }
}

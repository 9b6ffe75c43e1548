//! The `rcirc` command-line front end.
//!
//! Exit codes: 0 success, 2 degenerate parameters / precondition / singular
//! matrix, 3 argument error, 4 internal verification failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::closed_form::{det_closed_exact, det_pipeline, MIN_ORDER};
use crate::closed_form_inverse::{inverse_closed, inverse_pipeline, MIN_INVERSE_ORDER};
use crate::error::Error;
use crate::rcirculant::{
    det_dft_float, det_exact_oracle, inverse_exact_oracle, is_rcirculant, RCirculantMatrix,
};
use crate::recurrence::{generate_sequence, Preset, RecurrenceParams};
use crate::scalar::{parse_rational, rat, rational_text, Rational};
use crate::verify::{run_verify, Grid, VerifyConfig, DFT_TOLERANCE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "rcirc", version, about = "Exact determinants and inverses of recurrence r-circulant matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print W_0, W_1, ... of the recurrence.
    Seq(SeqArgs),
    /// Determinant of circ_r(W_1, ..., W_n).
    Det(DetArgs),
    /// First row of the inverse of circ_r(W_1, ..., W_n).
    Inv(InvArgs),
    /// Check every route against the exact oracle over a parameter grid.
    Verify(VerifyArgs),
    /// Time the determinant routes and print CSV.
    Bench(BenchArgs),
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn preset_arg(s: &str) -> Result<Preset, String> {
    s.parse::<Preset>().map_err(|e| e.to_string())
}

fn grid_arg(s: &str) -> Result<Grid, String> {
    s.parse::<Grid>().map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Named parameter set; individual flags override its values.
    #[arg(long, value_parser = preset_arg)]
    preset: Option<Preset>,
    #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
    p: Option<Rational>,
    #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
    q: Option<Rational>,
    /// Defaults to 0 without a preset.
    #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
    t: Option<Rational>,
    #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
    a: Option<Rational>,
    #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
    b: Option<Rational>,
    /// Twist applied to wrapped entries; defaults to 1 without a preset.
    #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
    r: Option<Rational>,
}

impl ParamArgs {
    fn resolve(&self) -> Result<RecurrenceParams, CliError> {
        let base = self.preset.map(Preset::params);
        let pick = |given: &Option<Rational>, from_base: Option<&Rational>, name: &str, default: Option<i64>| {
            given
                .clone()
                .or_else(|| from_base.cloned())
                .or_else(|| default.map(rat))
                .ok_or_else(|| CliError::Usage(format!("--{name} is required without --preset")))
        };
        Ok(RecurrenceParams::new(
            pick(&self.p, base.as_ref().map(|b| &b.p), "p", None)?,
            pick(&self.q, base.as_ref().map(|b| &b.q), "q", None)?,
            pick(&self.t, base.as_ref().map(|b| &b.t), "t", Some(0))?,
            pick(&self.a, base.as_ref().map(|b| &b.a), "a", None)?,
            pick(&self.b, base.as_ref().map(|b| &b.b), "b", None)?,
            pick(&self.r, base.as_ref().map(|b| &b.r), "r", Some(1))?,
        ))
    }
}

#[derive(Debug, Args)]
struct SeqArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Number of terms, starting at W_0.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Closed,
    Pipeline,
    Oracle,
    Dft,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Pipeline => "pipeline",
            Method::Oracle => "oracle",
            Method::Dft => "dft",
        }
    }
}

#[derive(Debug, Args)]
struct DetArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, value_enum, default_value = "closed")]
    method: Method,
    /// Cross-check the result against the other routes.
    #[arg(long)]
    check: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InvMethod {
    Closed,
    Pipeline,
    Oracle,
}

#[derive(Debug, Args)]
struct InvArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, value_enum, default_value = "closed")]
    method: InvMethod,
    /// Compare against the Gauss–Jordan inverse.
    #[arg(long)]
    check: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value = "default", value_parser = grid_arg)]
    grid: Grid,
    #[arg(long, default_value_t = 4)]
    n_min: usize,
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of (params, n) cases drawn from the grid with the seed.
    #[arg(long)]
    sample: Option<usize>,
    /// Record closed-form disagreements as errata instead of failures.
    #[arg(long)]
    errata_tolerant: bool,
    #[arg(long, default_value = "report.json")]
    out: PathBuf,
    /// Also print the report on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Comma-separated orders.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "closed,pipeline,oracle,dft")]
    methods: Vec<Method>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn exit_code(err: &CliError) -> i32 {
    match err {
        CliError::Usage(_) => EXIT_USAGE,
        CliError::Lib(e) => match e {
            Error::DegenerateParameters(_)
            | Error::PreconditionViolation(_)
            | Error::SingularMatrix
            | Error::SingularBlock
            | Error::DivisionByZero => EXIT_DEGENERATE,
            Error::UnknownPreset(_)
            | Error::ParseRational(_)
            | Error::UnsupportedOrder { .. }
            | Error::DimensionMismatch { .. } => EXIT_USAGE,
            Error::InternalVerificationFailure(_) | Error::MismatchedExtension { .. } => {
                EXIT_VERIFICATION
            }
        },
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Seq(a) => cmd_seq(&a, out),
        Command::Det(a) => cmd_det(&a, out),
        Command::Inv(a) => cmd_inv(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let message = match &e {
                CliError::Usage(m) => m.clone(),
                CliError::Lib(e) => e.to_string(),
            };
            let _ = writeln!(err, "error: {message}");
            exit_code(&e)
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

fn cmd_seq(args: &SeqArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let params = args.params.resolve()?;
    let values: Vec<String> = generate_sequence(&params, args.count as usize)
        .values()
        .iter()
        .map(rational_text)
        .collect();
    if args.json {
        writeln!(out, "{}", to_json(&values))?;
    } else {
        for v in values {
            writeln!(out, "{v}")?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct DetReport {
    command: &'static str,
    params: RecurrenceParams,
    n: usize,
    method: &'static str,
    value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_zero: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    imag_residue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_match: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn fallback_note(method: &str, min: usize) -> String {
    format!("{method} route needs n >= {min}; computed by the exact oracle")
}

fn cmd_det(args: &DetArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let params = args.params.resolve()?;
    let n = args.n as usize;
    let e = RCirculantMatrix::from_recurrence(&params, n)?;
    let exact_oracle = || det_exact_oracle(&e.materialize());

    let mut report = DetReport {
        command: "det",
        params: params.clone(),
        n,
        method: args.method.name(),
        value: String::new(),
        omega_zero: None,
        imag_residue: None,
        oracle_match: None,
        note: None,
    };
    let mut exact: Option<Rational> = None;
    match args.method {
        Method::Dft => {
            let approx = det_dft_float(&e)?;
            report.value = approx.to_decimal_string();
            report.imag_residue = Some(approx.relative_imag_residue());
            if args.check {
                report.oracle_match = Some(approx.scaled_error(&exact_oracle(), &e) <= DFT_TOLERANCE);
            }
        }
        Method::Oracle => exact = Some(exact_oracle()),
        Method::Closed | Method::Pipeline if n < MIN_ORDER => {
            report.note = Some(fallback_note(args.method.name(), MIN_ORDER));
            exact = Some(exact_oracle());
        }
        Method::Closed => {
            let value = det_closed_exact(&params, n)?;
            let omega_zero = value.is_rational();
            report.omega_zero = Some(omega_zero);
            if !omega_zero {
                return Err(Error::InternalVerificationFailure(format!(
                    "closed-form determinant has a nonzero ω-coefficient: {value}"
                ))
                .into());
            }
            exact = value.to_rational();
        }
        Method::Pipeline => {
            exact = Some(det_pipeline(&params, n)?);
            report.omega_zero = Some(true);
        }
    }
    if let Some(value) = &exact {
        report.value = rational_text(value);
        if args.check {
            let mut agree = *value == exact_oracle();
            if n >= MIN_ORDER {
                agree &= det_pipeline(&params, n)? == *value;
                agree &= det_closed_exact(&params, n)?.to_rational().as_ref() == Some(value);
            }
            report.oracle_match = Some(agree);
        }
    }

    if args.json {
        writeln!(out, "{}", to_json(&report))?;
    } else {
        writeln!(out, "det = {}", report.value)?;
        writeln!(out, "method: {}", report.method)?;
        if let Some(z) = report.omega_zero {
            writeln!(out, "omega_zero: {z}")?;
        }
        if let Some(res) = report.imag_residue {
            writeln!(out, "imag_residue: {res:e}")?;
        }
        if let Some(m) = report.oracle_match {
            writeln!(out, "oracle_match: {m}")?;
        }
        if let Some(note) = &report.note {
            writeln!(out, "note: {note}")?;
        }
    }
    Ok(if report.oracle_match == Some(false) {
        EXIT_VERIFICATION
    } else {
        EXIT_OK
    })
}

#[derive(Debug, Serialize)]
struct InvReport {
    command: &'static str,
    params: RecurrenceParams,
    n: usize,
    method: &'static str,
    first_row: Vec<String>,
    structure_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_match: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

type InverseRoute = fn(&RecurrenceParams, usize) -> crate::Result<RCirculantMatrix>;

fn cmd_inv(args: &InvArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let params = args.params.resolve()?;
    let n = args.n as usize;
    let e = RCirculantMatrix::from_recurrence(&params, n)?.materialize();
    let oracle = || -> Result<RCirculantMatrix, CliError> {
        let inv = inverse_exact_oracle(&e)?;
        Ok(RCirculantMatrix::new(inv.row(0).to_vec(), params.r.clone())?)
    };
    let (method, route): (&'static str, Option<InverseRoute>) = match args.method {
        InvMethod::Closed => ("closed", Some(inverse_closed)),
        InvMethod::Pipeline => ("pipeline", Some(inverse_pipeline)),
        InvMethod::Oracle => ("oracle", None),
    };

    let mut note = None;
    let inverse = match route {
        None => oracle()?,
        Some(route) => match route(&params, n) {
            Err(Error::UnsupportedOrder { .. }) if n < MIN_INVERSE_ORDER => {
                note = Some(fallback_note(method, MIN_INVERSE_ORDER));
                oracle()?
            }
            other => other?,
        },
    };
    let dense = inverse.materialize();
    let structure_ok = is_rcirculant(&dense, &params.r) && (&e * &dense).is_identity();
    let oracle_match = if args.check {
        Some(oracle()?.first_row() == inverse.first_row())
    } else {
        None
    };
    let report = InvReport {
        command: "inv",
        params,
        n,
        method,
        first_row: inverse.first_row().iter().map(rational_text).collect(),
        structure_ok,
        oracle_match,
        note,
    };
    if args.json {
        writeln!(out, "{}", to_json(&report))?;
    } else {
        writeln!(out, "first_row = [{}]", report.first_row.join(", "))?;
        writeln!(out, "method: {}", report.method)?;
        writeln!(out, "structure_ok: {}", report.structure_ok)?;
        if let Some(m) = report.oracle_match {
            writeln!(out, "oracle_match: {m}")?;
        }
        if let Some(note) = &report.note {
            writeln!(out, "note: {note}")?;
        }
    }
    Ok(if !structure_ok || oracle_match == Some(false) {
        EXIT_VERIFICATION
    } else {
        EXIT_OK
    })
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if args.n_min == 0 || args.n_min > args.n_max {
        return Err(CliError::Usage(format!(
            "invalid order range {}..={}",
            args.n_min, args.n_max
        )));
    }
    let report = run_verify(&VerifyConfig {
        grid: args.grid,
        n_min: args.n_min,
        n_max: args.n_max,
        seed: args.seed,
        sample: args.sample,
        errata_tolerant: args.errata_tolerant,
    });
    let json = to_json(&report);
    fs::write(&args.out, format!("{json}\n"))?;
    if args.json {
        writeln!(out, "{json}")?;
    } else {
        let c = &report.counts;
        writeln!(
            out,
            "{} cases: {} determinant checks, {} inverse checks, {} skipped, {} failures, {} float warnings, {} errata entries",
            c.cases, c.determinant_checked, c.inverse_checked, c.skipped, c.failures, c.float_warnings, c.errata
        )?;
        for f in &report.failures {
            writeln!(out, "FAIL {} n={} [{:?}]: {}", f.params, f.n, f.check, f.reason)?;
        }
        writeln!(out, "report written to {}", args.out.display())?;
    }
    Ok(if report.passed {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    })
}

/// First 16 hex digits of the SHA-256 of the canonical rational text.
pub fn value_digest(value: &Rational) -> String {
    let hash = Sha256::digest(rational_text(value).as_bytes());
    hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn bench_one(params: &RecurrenceParams, n: usize, method: Method) -> Result<String, Error> {
    let e = RCirculantMatrix::from_recurrence(params, n)?;
    Ok(match method {
        Method::Closed => {
            let v = det_closed_exact(params, n)?;
            let v = v.to_rational().ok_or_else(|| {
                Error::InternalVerificationFailure("nonzero ω-coefficient".into())
            })?;
            value_digest(&v)
        }
        Method::Pipeline => value_digest(&det_pipeline(params, n)?),
        Method::Oracle => value_digest(&det_exact_oracle(&e.materialize())),
        Method::Dft => det_dft_float(&e)?.to_decimal_string(),
    })
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let params = args.params.resolve()?;
    if args.n.iter().any(|&n| n == 0) {
        return Err(CliError::Usage("orders must be positive".into()));
    }
    let mut csv = String::from("n,method,ms,value_digest\n");
    for &n in &args.n {
        for &method in &args.methods {
            let start = Instant::now();
            let digest = bench_one(&params, n, method);
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let digest = digest.unwrap_or_else(|e| format!("error: {e}").replace(',', ";"));
            csv.push_str(&format!("{n},{},{ms:.3},{digest}\n", method.name()));
        }
    }
    match &args.out {
        Some(path) => fs::write(path, csv)?,
        None => write!(out, "{csv}")?,
    }
    Ok(EXIT_OK)
}

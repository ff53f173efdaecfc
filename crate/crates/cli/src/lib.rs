//! The `antidist` command line: analyze, sweep, generate and verify.

/// `print!` that stays quiet when stdout is closed early, as under `| head`.
#[macro_export]
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout().lock(), $($arg)*);
    }};
}

#[macro_export]
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

pub mod generate;
pub mod sweep;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use antidist_core::io::{parse_input, GramFile};
use antidist_core::{
    analyze, AnalysisOptions, AnalysisReport, Certificate, Decision, Error, Method, SolverConfig,
};
use clap::{Args, Parser, Subcommand};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VERIFICATION: u8 = 2;
pub const EXIT_UNDECIDED: u8 = 3;

/// A failed command: the message for stderr and the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VERIFICATION,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Verification(_) => Failure::verification(e.to_string()),
            other => Failure::usage(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;

#[derive(Debug, Parser)]
#[command(
    name = "antidist",
    version,
    about = "Decide whether a set of pure states is antidistinguishable"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a Gram-matrix or state-set file.
    Analyze(AnalyzeArgs),
    /// Solve the exclusion SDP over a grid of equiangular sets and emit CSV.
    Sweep(sweep::SweepArgs),
    /// Write a named family to a JSON file.
    Generate(generate::GenerateArgs),
    /// Check a certificate file against a Gram matrix.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Verification tolerance for certificates.
    #[arg(long, default_value_t = antidist_core::certificates::DEFAULT_VERIFY_TOL)]
    pub tol: f64,
    /// SDP values at or below this are treated as zero.
    #[arg(long, default_value_t = antidist_core::sdp::DEFAULT_ZERO_TOL)]
    pub zero_tol: f64,
    /// Iteration cap for the SDP solver.
    #[arg(long, default_value_t = SolverConfig::default().max_iter)]
    pub max_iter: usize,
}

impl SolverArgs {
    pub fn solver(&self) -> CliResult<SolverConfig> {
        let cfg = SolverConfig {
            max_iter: self.max_iter,
            ..SolverConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Gram-matrix (`entries`) or state-set (`states`) JSON file.
    pub input: PathBuf,
    #[arg(long, default_value = "auto", value_parser = ["auto", "bounds", "circulant", "sdp"])]
    pub method: String,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Print the full report as JSON.
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Print a one-line CSV summary with a header.
    #[arg(long)]
    pub csv: bool,
    /// Write the certificate, if any, to this file.
    #[arg(long)]
    pub cert: Option<PathBuf>,
    /// Write the JSON report to this file.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Gram-matrix JSON file; only Hermiticity is checked.
    pub gram: PathBuf,
    /// Certificate JSON file.
    pub certificate: PathBuf,
    #[arg(long, default_value_t = antidist_core::certificates::DEFAULT_VERIFY_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub json: bool,
}

pub fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

pub fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn with_path(path: &Path, e: Error) -> Failure {
    let mut f = Failure::from(e);
    f.message = format!("{}: {}", path.display(), f.message);
    f
}

fn to_json<T: serde::Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::usage(e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

fn render_text(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "n: {}", r.n);
    let _ = writeln!(s, "decision: {:?}", r.decision);
    let _ = writeln!(s, "decided by: {}", r.decided_by.as_deref().unwrap_or("-"));
    if let (Some(v), Some(p)) = (r.sdp_value, r.error_probability) {
        let _ = writeln!(s, "sdp value: {v:.10e} (error probability {p:.10e})");
    }
    let _ = writeln!(s, "margins:");
    for (rule, m) in &r.margins {
        let flag = if r.boundary_rules.contains(rule) {
            "  [boundary]"
        } else {
            ""
        };
        let _ = writeln!(s, "  {rule:<20} {m:+.6e}{flag}");
    }
    if let Some(c) = &r.certificate {
        let kind = serde_json::to_value(c)
            .ok()
            .and_then(|v| v.get("kind").and_then(|k| k.as_str()).map(str::to_owned))
            .unwrap_or_default();
        let _ = writeln!(s, "certificate: {kind}");
    }
    for d in &r.diagnostics {
        let _ = writeln!(s, "note: {d}");
    }
    s
}

fn cmd_analyze(a: &AnalyzeArgs) -> CliResult<u8> {
    let text = read_file(&a.input)?;
    let input = parse_input(&text).map_err(|e| with_path(&a.input, e))?;
    let opts = AnalysisOptions {
        method: a.method.parse::<Method>()?,
        solver: a.solver.solver()?,
        zero_tol: a.solver.zero_tol,
        verify_tol: a.solver.tol,
        ..AnalysisOptions::default()
    };
    let report = analyze(&input.gram(), &opts)?;
    if let Some(path) = &a.cert {
        match report.certificate()? {
            Some(c) => write_file(path, &c.to_json()?)?,
            None => eprintln!("no certificate to write"),
        }
    }
    if let Some(path) = &a.out {
        write_file(path, &to_json(&report)?)?;
    }
    if a.json {
        outln!("{}", to_json(&report)?);
    } else if a.csv {
        outln!("n,decision,decided_by,sdp_value,error_probability");
        outln!(
            "{},{:?},{},{},{}",
            report.n,
            report.decision,
            report.decided_by.as_deref().unwrap_or(""),
            opt(report.sdp_value),
            opt(report.error_probability)
        );
    } else {
        out!("{}", render_text(&report));
    }
    Ok(if report.decision == Decision::Undecided {
        EXIT_UNDECIDED
    } else {
        EXIT_OK
    })
}

fn cmd_verify(a: &VerifyArgs) -> CliResult<u8> {
    let gram_text = read_file(&a.gram)?;
    let file: GramFile = serde_json::from_str(&gram_text)
        .map_err(|e| Failure::usage(format!("{}: {e}", a.gram.display())))?;
    let target = file.to_hermitian().map_err(|e| with_path(&a.gram, e))?;
    let cert_text = read_file(&a.certificate)?;
    let cert = Certificate::from_json(&cert_text).map_err(|e| with_path(&a.certificate, e))?;
    let report = match cert.verify(&target, a.tol) {
        Ok(r) => r,
        Err(e @ Error::DimensionMismatch { .. }) => {
            return Err(Failure::verification(e.to_string()))
        }
        Err(e) => return Err(e.into()),
    };
    let accepted = report.accepted();
    if a.json {
        outln!("{}", to_json(&report)?);
    } else {
        outln!("kind: {}", cert.kind());
        let value = serde_json::to_value(&report).map_err(|e| Failure::usage(e.to_string()))?;
        for (k, v) in value
            .as_object()
            .into_iter()
            .flatten()
            .filter(|(k, _)| *k != "kind")
        {
            outln!("  {k}: {v}");
        }
        outln!("{}", if accepted { "verified" } else { "REJECTED" });
    }
    Ok(if accepted { EXIT_OK } else { EXIT_VERIFICATION })
}

pub fn run_command(cli: &Cli) -> CliResult<u8> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Sweep(a) => sweep::cmd_sweep(a),
        Command::Generate(a) => generate::cmd_generate(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

/// Parses `args` and runs the command, mapping failures to exit codes.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match run_command(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::commands::{self, Outcome, Status};
use crate::config::{max_degree_from_env, ExperimentConfig, DEFAULT_SEED};
use crate::error::CliError;
use crate::expansion_file::ExpansionFile;
use crate::report::{csv_path, Report};

#[derive(Debug, Parser)]
#[command(name = "hermitex", version, about = "Hermite-series experiments on Gelfand–Shilov and Pilipović spaces")]
pub struct Cli {
    /// Pass/fail tolerance (each command has its own default).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for random inputs, decimal or 0x-prefixed hex [default: 0x5EED].
    #[arg(long, global = true, value_parser = parse_seed)]
    pub seed: Option<u64>,
    /// Output file: the expansion for analyze/tensor, the report otherwise.
    /// Plot data goes next to it with a .csv extension.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Gauss–Hermite nodes per axis.
    #[arg(long = "quad-nodes", global = true)]
    pub quad_nodes: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Hermite coefficients of a function.
    Analyze(commands::AnalyzeArgs),
    /// Fit the coefficient decay to a Pilipović weight.
    Classify(commands::ClassifyArgs),
    /// Tensor product of two expansions.
    Tensor(commands::TensorArgs),
    /// Compare the three ways of pairing a tensor product.
    Fubini(commands::FubiniArgs),
    /// Compare the direct STFT with the tensor-product route.
    StftCheck(commands::StftArgs),
    /// Check the Bargmann translation and modulation identities.
    BargmannCheck(commands::BargmannArgs),
    /// Convergence rate of Riemann-sum convolutions.
    ConvRate(commands::ConvArgs),
    /// Gelfand–Shilov seminorm estimate.
    Seminorm(commands::SeminormArgs),
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed `{s}`: {e}"))
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::Classify(_) => "classify",
            Command::Tensor(_) => "tensor",
            Command::Fubini(_) => "fubini",
            Command::StftCheck(_) => "stft-check",
            Command::BargmannCheck(_) => "bargmann-check",
            Command::ConvRate(_) => "conv-rate",
            Command::Seminorm(_) => "seminorm",
        }
    }

    fn default_tol(&self) -> f64 {
        match self {
            Command::Analyze(_) => commands::AnalyzeArgs::DEFAULT_TOL,
            Command::Classify(_) => commands::ClassifyArgs::DEFAULT_TOL,
            Command::Tensor(_) => commands::TensorArgs::DEFAULT_TOL,
            Command::Fubini(_) => commands::FubiniArgs::DEFAULT_TOL,
            Command::StftCheck(_) => commands::StftArgs::DEFAULT_TOL,
            Command::BargmannCheck(_) => commands::BargmannArgs::DEFAULT_TOL,
            Command::ConvRate(_) => commands::ConvArgs::DEFAULT_TOL,
            Command::Seminorm(_) => commands::SeminormArgs::DEFAULT_TOL,
        }
    }

    fn writes_expansion(&self) -> bool {
        matches!(self, Command::Analyze(_) | Command::Tensor(_))
    }

    fn describe(&self, cfg: &mut ExperimentConfig) {
        match self {
            Command::Analyze(a) => a.describe(cfg),
            Command::Classify(a) => a.describe(cfg),
            Command::Tensor(a) => a.describe(cfg),
            Command::Fubini(a) => a.describe(cfg),
            Command::StftCheck(a) => a.describe(cfg),
            Command::BargmannCheck(a) => a.describe(cfg),
            Command::ConvRate(a) => a.describe(cfg),
            Command::Seminorm(a) => a.describe(cfg),
        }
    }

    fn execute(&self, cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
        match self {
            Command::Analyze(a) => commands::analyze(cfg, a),
            Command::Classify(a) => commands::classify_cmd(cfg, a),
            Command::Tensor(a) => commands::tensor_cmd(cfg, a),
            Command::Fubini(a) => commands::fubini(cfg, a),
            Command::StftCheck(a) => commands::stft_check(cfg, a),
            Command::BargmannCheck(a) => commands::bargmann_check(cfg, a),
            Command::ConvRate(a) => commands::conv_rate(cfg, a),
            Command::Seminorm(a) => commands::seminorm(cfg, a),
        }
    }
}

fn write_file(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn mark_error(report: &mut Report, err: &CliError) {
    report.verdict("status", "error");
    report.verdict("exit_code", err.exit_code());
    report.verdict("error_code", err.code());
    report.verdict("error", err.to_string().replace('\n', " "));
}

fn emit(cfg: &ExperimentConfig, mut outcome: Outcome, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let code = match &outcome.status {
        Status::Pass => 0,
        Status::Fail => 2,
        Status::Error(e) => e.exit_code(),
    };
    match &outcome.status {
        Status::Error(e) => mark_error(&mut outcome.report, e),
        s => {
            outcome.report.verdict("status", if matches!(s, Status::Pass) { "pass" } else { "fail" });
            outcome.report.verdict("exit_code", code);
        }
    }
    let report = outcome.report.render();
    let stdout_err = |e| CliError::io("<stdout>", e);
    match (&cfg.out, &outcome.expansion) {
        (Some(out), Some(f)) => {
            ExpansionFile::new(f.clone()).write(out)?;
            if let Some(csv) = &outcome.csv {
                write_file(&csv_path(out), &csv.render())?;
            }
            stdout.write_all(report.as_bytes()).map_err(stdout_err)?;
        }
        (None, Some(f)) => {
            stdout.write_all(ExpansionFile::new(f.clone()).to_text().as_bytes()).map_err(stdout_err)?;
        }
        (Some(out), None) => {
            write_file(out, &report)?;
            if let Some(csv) = &outcome.csv {
                write_file(&csv_path(out), &csv.render())?;
            }
        }
        (None, None) => stdout.write_all(report.as_bytes()).map_err(stdout_err)?,
    }
    Ok(code)
}

/// Runs one invocation and returns the process exit code.
pub fn run_with<I, T>(args: I, max_degree: Option<usize>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => 1,
            };
        }
    };
    let cmd = &cli.command;
    let tol = cli.tol.unwrap_or_else(|| cmd.default_tol());
    let cfg = ExperimentConfig::new(cmd.name(), tol, cli.seed.unwrap_or(DEFAULT_SEED))
        .and_then(|c| c.with_quad_nodes(cli.quad_nodes))
        .map(|c| c.with_out(cli.out.clone()).with_max_degree(max_degree));
    let mut cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error[{}]: {e}", e.code());
            return e.exit_code();
        }
    };
    cmd.describe(&mut cfg);

    let result = cmd.execute(&cfg).and_then(|outcome| emit(&cfg, outcome, stdout));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error[{}]: {e}", e.code());
            if let (Some(out), false) = (&cfg.out, cmd.writes_expansion()) {
                let mut report = Report::new();
                cfg.echo(&mut report);
                mark_error(&mut report, &e);
                let _ = std::fs::write(out, report.render());
            }
            e.exit_code()
        }
    }
}

/// [`run_with`] on the process streams, with the degree cap taken from the
/// environment.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    match max_degree_from_env() {
        Ok(cap) => run_with(args, cap, &mut out, &mut err),
        Err(e) => {
            let _ = writeln!(err, "error[{}]: {e}", e.code());
            e.exit_code()
        }
    }
}

//! The `arpr` command-line front end.
//!
//! Every command writes CSV: comma separated, `.` as the decimal point,
//! comment lines starting with `#`. Exit codes: 0 success, 1 usage,
//! 2 data, 3 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::distributions::{open_unit, parse_decimal, LipParams, ParentDistribution};
use crate::error::Error;
use crate::exact::{table_row, CoverageReport, PmfModel};
use crate::lip::{ci_theta, estimate_w, Sample};
use crate::sim::{run_simulation, SimulationConfig, DEFAULT_REPLICATIONS, GENERATOR};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const ESTIMATE_HEADER: &str = "n,eta,M,theta_hat,ci_lower,ci_upper,gamma";
pub const COVERAGE_HEADER: &str = "dist,n,alpha,beta,gamma,theta,coverage,length,mean,bias,method,covered_length";
pub const SIMULATE_HEADER: &str =
    "dist,n,alpha,beta,gamma,reps,seed,generator,theta,coverage,coverage_se,length,length_se,mean,mean_se,bias";

pub const TABLE_NS: [usize; 3] = [500, 800, 1000];
pub const TABLE_BETAS: [f64; 4] = [0.5, 0.6, 0.7, 0.8];
pub const TABLE_ALPHA: f64 = 0.5;
pub const TABLE_GAMMA: f64 = 0.95;

#[derive(Debug, Parser)]
#[command(
    name = "arpr",
    version,
    about = "Low-income proportion estimation and exact interval coverage"
)]
pub struct Cli {
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the low-income proportion and its interval from an income file.
    Estimate(EstimateArgs),
    /// Exact (or binomial-model) coverage and length over an (n, beta) grid.
    Coverage(CoverageArgs),
    /// Reproduce one of the two published coverage tables.
    Table(TableArgs),
    /// Monte Carlo coverage, length and bias.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "0.6", value_parser = decimal)]
    pub alpha: f64,
    #[arg(long, default_value = "0.5", value_parser = decimal)]
    pub beta: f64,
    #[arg(long, default_value = "0.95", value_parser = decimal)]
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Binomial,
}

impl From<Method> for PmfModel {
    fn from(m: Method) -> Self {
        match m {
            Method::Exact => PmfModel::ExactMixture,
            Method::Binomial => PmfModel::BinomialApprox,
        }
    }
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[arg(long, value_parser = dist_spec)]
    pub dist: ParentDistribution,
    /// Comma-separated sample sizes.
    #[arg(long = "n", required = true, value_delimiter = ',')]
    pub ns: Vec<usize>,
    /// Comma-separated quantile levels.
    #[arg(long = "beta", required = true, value_delimiter = ',', value_parser = decimal)]
    pub betas: Vec<f64>,
    #[arg(long, default_value = "0.5", value_parser = decimal)]
    pub alpha: f64,
    #[arg(long, default_value = "0.95", value_parser = decimal)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    pub method: Method,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub which: u8,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = dist_spec)]
    pub dist: ParentDistribution,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_REPLICATIONS)]
    pub reps: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value = "0.6", value_parser = decimal)]
    pub alpha: f64,
    #[arg(long, default_value = "0.5", value_parser = decimal)]
    pub beta: f64,
    #[arg(long, default_value = "0.95", value_parser = decimal)]
    pub gamma: f64,
}

fn decimal(s: &str) -> Result<f64, String> {
    parse_decimal(s).ok_or_else(|| format!("'{s}' is not a decimal number"))
}

fn dist_spec(s: &str) -> Result<ParentDistribution, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failure carrying its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain { .. } | Error::Config(_) => EXIT_USAGE,
            Error::Data { .. } => EXIT_DATA,
            Error::Numerical { .. } => EXIT_NUMERICAL,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let written = match &cli.output {
                Some(path) => {
                    fs::write(path, text.as_bytes()).map_err(|e| format!("cannot write {}: {e}", path.display()))
                }
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => EXIT_OK,
                Err(msg) => {
                    let _ = writeln!(stderr, "error: {msg}");
                    EXIT_USAGE
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Coverage(a) => cmd_coverage(a),
        Command::Table(a) => cmd_table(a.which),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

fn check_level(name: &str, v: f64) -> Result<(), CliError> {
    open_unit("arguments", "value", v).map_err(|_| CliError::usage(format!("--{name} must be in (0, 1), got {v}")))
}

pub fn cmd_estimate(a: &EstimateArgs) -> Result<String, CliError> {
    check_level("alpha", a.alpha)?;
    check_level("beta", a.beta)?;
    check_level("gamma", a.gamma)?;
    let bytes = fs::read(&a.input).map_err(|e| CliError::usage(format!("cannot read {}: {e}", a.input.display())))?;
    let text = String::from_utf8(bytes).map_err(|e| CliError {
        code: EXIT_DATA,
        message: format!("{} is not valid UTF-8: {e}", a.input.display()),
    })?;
    let sample = Sample::parse(&text)?;
    let as_data = |e: Error| match e {
        Error::Domain { .. } => CliError {
            code: EXIT_DATA,
            message: e.to_string(),
        },
        other => other.into(),
    };
    let est = estimate_w(&sample, a.alpha, a.beta).map_err(as_data)?;
    let ci = ci_theta(est.eta, est.trials, a.beta, a.gamma)?;
    Ok(format!(
        "# alpha={},beta={},gamma={}\n{ESTIMATE_HEADER}\n{},{},{},{},{},{},{}\n",
        a.alpha,
        a.beta,
        a.gamma,
        est.n,
        est.eta,
        est.trials,
        est.theta_hat,
        ci.lower.value(),
        ci.upper.value(),
        a.gamma
    ))
}

/// Computes one report per `(n, beta)` cell, `n` outer and `beta` inner.
pub fn coverage_grid(
    dist: &ParentDistribution,
    ns: &[usize],
    betas: &[f64],
    alpha: f64,
    gamma: f64,
    model: PmfModel,
) -> Result<Vec<CoverageReport>, CliError> {
    for &n in ns {
        for &beta in betas {
            LipParams::new(alpha, beta, gamma, n)?;
        }
    }
    let cells: Vec<(usize, f64)> = ns.iter().flat_map(|&n| betas.iter().map(move |&b| (n, b))).collect();
    let rows = cells
        .par_iter()
        .map(|&(n, beta)| table_row(dist, n, alpha, beta, gamma, model))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(rows)
}

/// One CSV row; `digits` rounds every real to that many decimals.
pub fn coverage_row(r: &CoverageReport, digits: Option<usize>) -> String {
    let f = |v: f64| match digits {
        Some(d) => format!("{v:.d$}"),
        None => format!("{v}"),
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        r.distribution,
        r.n,
        r.alpha,
        r.beta,
        r.gamma,
        f(r.theta),
        f(r.coverage),
        f(r.expected_length),
        f(r.mean_theta_hat),
        f(r.bias),
        r.model,
        f(r.covered_length)
    )
}

pub fn cmd_coverage(a: &CoverageArgs) -> Result<String, CliError> {
    check_level("alpha", a.alpha)?;
    check_level("gamma", a.gamma)?;
    for &b in &a.betas {
        check_level("beta", b)?;
    }
    let rows = coverage_grid(&a.dist, &a.ns, &a.betas, a.alpha, a.gamma, a.method.into())?;
    let mut out = format!("{COVERAGE_HEADER}\n");
    for r in &rows {
        out.push_str(&coverage_row(r, None));
        out.push('\n');
    }
    Ok(out)
}

/// Distribution of published table 1 or 2.
pub fn table_distribution(which: u8) -> Result<ParentDistribution, CliError> {
    match which {
        1 => Ok(ParentDistribution::chi_square(3.0)?),
        2 => Ok(ParentDistribution::log_normal(0.0, 1.0)?),
        other => Err(CliError::usage(format!("--which must be 1 or 2, got {other}"))),
    }
}

pub fn cmd_table(which: u8) -> Result<String, CliError> {
    let dist = table_distribution(which)?;
    let rows = coverage_grid(
        &dist,
        &TABLE_NS,
        &TABLE_BETAS,
        TABLE_ALPHA,
        TABLE_GAMMA,
        PmfModel::ExactMixture,
    )?;
    let thetas: Vec<String> = rows
        .iter()
        .take(TABLE_BETAS.len())
        .map(|r| format!("{}={:.4}", r.beta, r.theta))
        .collect();
    let mut out = format!(
        "# table {which}: F = {dist}, alpha = {TABLE_ALPHA}, gamma = {TABLE_GAMMA}\n# theta by beta: {}\n{COVERAGE_HEADER}\n",
        thetas.join(" ")
    );
    for r in &rows {
        out.push_str(&coverage_row(r, Some(4)));
        out.push('\n');
    }
    Ok(out)
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<String, CliError> {
    check_level("alpha", a.alpha)?;
    check_level("beta", a.beta)?;
    check_level("gamma", a.gamma)?;
    let params = LipParams::new(a.alpha, a.beta, a.gamma, a.n)?;
    let cfg = SimulationConfig::new(a.dist, params, a.reps, a.seed)?;
    let r = run_simulation(&cfg)?;
    Ok(format!(
        "# generator: {GENERATOR}\n{SIMULATE_HEADER}\n{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        a.dist,
        a.n,
        a.alpha,
        a.beta,
        a.gamma,
        r.replications,
        r.seed,
        GENERATOR,
        r.theta,
        r.empirical_coverage,
        r.coverage_se,
        r.mean_length,
        r.length_se,
        r.mean_theta_hat,
        r.theta_hat_se,
        r.empirical_bias
    ))
}

//! Command-line front end for `invdiv-core`.
//!
//! Every command writes its whole output in one piece. Exit codes:
//! 0 conclusive, 1 error, 2 inconclusive, 3 budget exhausted.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use invdiv_core::divgeo::DivGeoError;
use invdiv_core::endo::{EndoError, Endomorphism};
use invdiv_core::idealeng::{EngineConfig, Limits};
use invdiv_core::logchern::{self, LogChernError};
use invdiv_core::polyring::{MonomialOrder, Scalar};
use invdiv_core::verdict::{self, AnalysisError, AnalyzeConfig, Verdict};
use num_traits::Zero;
use thiserror::Error;

pub mod problem;
pub mod report;

use problem::Problem;
use report::{AnalyzeReport, BoundReport, ErrorInfo, ParseReport, RankReport};

pub const SCHEMA_VERSION: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_TRIALS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Conclusive = 0,
    Error = 1,
    Inconclusive = 2,
    Budget = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed problem file at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{field}: {message}{}", location(.line, .column))]
    Polynomial {
        field: String,
        line: Option<usize>,
        column: Option<usize>,
        message: String,
    },
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("problem file has no {0}")]
    Missing(&'static str),
    #[error("bad point: {0}")]
    Point(String),
    #[error(transparent)]
    Endo(#[from] EndoError),
    #[error(transparent)]
    Geometry(#[from] DivGeoError),
    #[error(transparent)]
    Chern(#[from] LogChernError),
}

fn location(line: &Option<usize>, column: &Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" (line {l}, column {c})"),
        _ => String::new(),
    }
}

impl CliError {
    pub fn is_budget(&self) -> bool {
        match self {
            CliError::Endo(e) => e.is_budget(),
            CliError::Geometry(e) => e.is_budget(),
            CliError::Chern(LogChernError::Geometry(e)) => e.is_budget(),
            _ => false,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "invdiv", version, about = "Totally invariant divisors of endomorphisms of projective space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the canonical form of a problem file.
    Parse { file: PathBuf },
    /// Run the full pipeline and print a JSON report.
    Analyze(AnalyzeArgs),
    /// Like `analyze`, using the table for surfaces in P^3.
    Classify(AnalyzeArgs),
    /// Threshold, plane-curve cap and c2 comparison for given n, d.
    Bound {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        d: i64,
        #[arg(long = "deg-z")]
        deg_z: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Log-section matrix of the divisor at a point.
    Rank {
        file: PathBuf,
        /// Homogeneous coordinates such as "1:0:-1/2".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Require the point to lie on the divisor.
        #[arg(long)]
        on_divisor: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Grevlex,
    Lex,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "grevlex")]
    pub order: OrderArg,
    /// Run each Gröbner computation modulo a random prime first.
    #[arg(long)]
    pub modular_probe: bool,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub iterate: Option<u32>,
    #[arg(long)]
    pub max_basis: Option<usize>,
    #[arg(long)]
    pub max_coeff_bits: Option<u64>,
    /// Include wall-clock timings (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
    #[arg(long = "deg-z-override")]
    pub deg_z_override: Option<u64>,
}

/// What a command prints and how the process exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub status: ExitStatus,
}

impl Outcome {
    fn error(e: &CliError) -> Outcome {
        Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            status: if e.is_budget() { ExitStatus::Budget } else { ExitStatus::Error },
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { ExitStatus::Error } else { ExitStatus::Conclusive };
            let text = e.render().to_string();
            return Outcome {
                stdout: if e.use_stderr() { String::new() } else { text.clone() },
                stderr: if e.use_stderr() { text } else { String::new() },
                status,
            };
        }
    };
    execute(&cli.command)
}

pub fn execute(command: &Command) -> Outcome {
    let result = match command {
        Command::Parse { file } => cmd_parse(file),
        Command::Analyze(args) => cmd_analyze(args, verdict::Table::General),
        Command::Classify(args) => cmd_analyze(args, verdict::Table::P3),
        Command::Bound { n, d, deg_z, json } => cmd_bound(*n, *d, *deg_z, *json),
        Command::Rank {
            file,
            point,
            on_divisor,
        } => cmd_rank(file, point, *on_divisor),
    };
    result.unwrap_or_else(|e| Outcome::error(&e))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn ok(stdout: String) -> Outcome {
    Outcome {
        stdout,
        stderr: String::new(),
        status: ExitStatus::Conclusive,
    }
}

pub fn cmd_parse(file: &std::path::Path) -> Result<Outcome, CliError> {
    let problem = Problem::load(file)?;
    let validation = match &problem.endomorphism {
        Some(forms) => Some(report::Validation::from(Endomorphism::validate(forms.clone())?)),
        None => None,
    };
    Ok(ok(to_json(&ParseReport {
        schema_version: SCHEMA_VERSION,
        version: VERSION,
        command: "parse",
        echo: problem.echo(),
        validation,
    })))
}

fn analyze_config(args: &AnalyzeArgs, problem: &Problem) -> AnalyzeConfig {
    let budgets = &problem.file.budgets;
    AnalyzeConfig {
        seed: args.seed.unwrap_or(problem.file.seed),
        trials: args.trials.or(budgets.trials).unwrap_or(DEFAULT_TRIALS),
        iterate: args.iterate.or(problem.file.iterate),
        engine: EngineConfig {
            order: match args.order {
                OrderArg::Grevlex => MonomialOrder::Grevlex,
                OrderArg::Lex => MonomialOrder::Lex,
            },
            limits: Limits {
                max_basis: args.max_basis.or(budgets.max_basis),
                max_coeff_bits: args.max_coeff_bits.or(budgets.max_coeff_bits),
            },
            modular_probe: args.modular_probe.then_some(args.seed.unwrap_or(problem.file.seed)),
        },
        deg_z_override: args.deg_z_override,
    }
}

pub fn cmd_analyze(args: &AnalyzeArgs, table: verdict::Table) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let problem = Problem::load(&args.file)?;
    let forms = problem.endomorphism.clone().ok_or(CliError::Missing("endomorphism"))?;
    let form = problem.divisor.clone().ok_or(CliError::Missing("divisor"))?;
    let config = analyze_config(args, &problem);
    let mut rep = AnalyzeReport::new(
        match table {
            verdict::Table::General => "analyze",
            verdict::Table::P3 => "classify",
        },
        problem.echo(),
        &config,
    );

    let f = match Endomorphism::validate_with(forms, &config.engine) {
        Ok(f) => f,
        Err(e) => {
            let e = CliError::from(e);
            rep.error = Some(ErrorInfo::new("validation", &e.to_string(), e.is_budget()));
            return Ok(rep.finish(start, args.timing, status_of_error(e.is_budget())));
        }
    };
    rep.stages.validation = Some(report::Validation::from(f.clone()));

    let result = match table {
        verdict::Table::General => verdict::analyze(&f, &form, &config),
        verdict::Table::P3 => verdict::classify_p3(&f, &form, &config),
    };
    let status = match result {
        Ok(v) => {
            rep.record(&v);
            rep.stages.chern = chern_stage(&v);
            let status = if v.conclusion().is_conclusive() {
                ExitStatus::Conclusive
            } else {
                ExitStatus::Inconclusive
            };
            rep.set_verdict(v);
            status
        }
        Err(err) => {
            let AnalysisError { stage, error, partial } = *err;
            let budget = error.is_budget();
            rep.stages.pipeline = partial;
            rep.error = Some(ErrorInfo::new(
                report::stage_name(stage),
                &error.to_string(),
                budget,
            ));
            status_of_error(budget)
        }
    };
    Ok(rep.finish(start, args.timing, status))
}

fn status_of_error(budget: bool) -> ExitStatus {
    if budget {
        ExitStatus::Budget
    } else {
        ExitStatus::Error
    }
}

fn chern_stage(v: &Verdict) -> Option<report::ChernStage> {
    if !v.invariant {
        return None;
    }
    let deg_z = v.deg_z?;
    let params = logchern::ChernParams::new(v.n as i64, v.d as i64, v.m as i64, deg_z).ok()?;
    Some(report::ChernStage {
        params,
        c2_log_twist: logchern::c2_log_twist(&params),
        c2_pullback_restricted: logchern::c2_pullback_restricted(&params).to_string(),
    })
}

pub fn cmd_bound(n: i64, d: i64, deg_z: Option<u64>, json: bool) -> Result<Outcome, CliError> {
    if n < 2 {
        return Err(LogChernError::Dimension { n }.into());
    }
    if d < 1 {
        return Err(LogChernError::DegreeRange { d, max: n + 1 }.into());
    }
    let rep = BoundReport::new(n, d, deg_z);
    Ok(ok(if json { to_json(&rep) } else { rep.to_text() }))
}

/// Parses `a:b:c` with integer or `p/q` entries.
pub fn parse_point(text: &str, num_vars: usize) -> Result<Vec<Scalar>, CliError> {
    let coords = text
        .split(':')
        .map(|c| {
            c.trim()
                .parse::<Scalar>()
                .map_err(|_| CliError::Point(format!("cannot read coordinate {:?}", c.trim())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if coords.len() != num_vars {
        return Err(CliError::Point(format!(
            "expected {num_vars} coordinates, found {}",
            coords.len()
        )));
    }
    Ok(coords)
}

pub fn cmd_rank(file: &std::path::Path, point: &str, on_divisor: bool) -> Result<Outcome, CliError> {
    let problem = Problem::load(file)?;
    let form = problem.divisor.clone().ok_or(CliError::Missing("divisor"))?;
    let p = parse_point(point, form.num_vars())?;
    let on = form.evaluate(&p).is_zero();
    if on_divisor && !on {
        return Err(CliError::Point(format!("{point} is not on the divisor")));
    }
    let matrix = logchern::log_section_matrix(&form, &p)?;
    Ok(ok(to_json(&RankReport {
        schema_version: SCHEMA_VERSION,
        version: VERSION,
        command: "rank",
        divisor: form,
        on_divisor: on,
        matrix,
    })))
}

//! Scenario files, built-in examples and the command-line front end.
//!
//! A scenario names a chart, a metric, scalar and vector fields, a sampling
//! plan and a list of checks. [`run`] evaluates every listed check at the
//! seeded sample points and returns a [`CheckReport`]; the report bytes depend
//! only on the scenario, the seed and the jet order.

mod builtin;
mod checks;
mod report;
mod scenario;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::builder::TypedValueParser as _;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use builtin::{builtin, BUILTINS};
pub use checks::{
    lookup, Category, CheckDef, Status, IDENTITY_TOL, ORACLE_TOL, QUADRATURE_TOL, REGISTRY,
};
pub use report::{CheckRecord, CheckReport, Environment, PointResidual, Summary, Verdict};
pub use scenario::{
    load, parse_scenario, sample, ChartSpec, CheckEntry, CheckSpec, Model, PatchRef, PatchSpec,
    PeriodicSpec, SampleOverrides, Sampling, Scenario, WarpedSpec, SAMPLER,
};

use crate::error::{Error, Result};
use crate::exprjet::DEFAULT_JET_ORDER;
use crate::soliton::{fit_constants, FitResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Replaces the registry tolerance of checks without their own `tol`.
    pub tol: Option<f64>,
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub jet_order: usize,
    /// Treat report-only checks as asserted.
    pub strict: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            tol: None,
            points: None,
            seed: None,
            jet_order: DEFAULT_JET_ORDER,
            strict: false,
        }
    }
}

impl RunOptions {
    fn overrides(&self) -> SampleOverrides {
        SampleOverrides {
            count: self.points,
            seed: self.seed,
        }
    }
}

fn resolve_checks(sc: &Scenario) -> Result<Vec<(&'static CheckDef, Option<f64>)>> {
    let mut out: Vec<(&'static CheckDef, Option<f64>)> = Vec::new();
    for (i, c) in sc.checks.iter().enumerate() {
        let def = lookup(c.id()).ok_or_else(|| {
            Error::scenario(
                format!("checks[{i}]"),
                format!("unknown check `{}`", c.id()),
            )
        })?;
        if out.iter().any(|(d, _)| d.id == def.id) {
            return Err(Error::scenario(
                format!("checks[{i}]"),
                format!("duplicate check `{}`", def.id),
            ));
        }
        if let Some(t) = c.tol() {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::scenario(
                    format!("checks[{i}].tol"),
                    "tolerance must be a non-negative number",
                ));
            }
        }
        out.push((def, c.tol()));
    }
    Ok(out)
}

fn execute(
    sc: Scenario,
    dir: Option<&Path>,
    opts: &RunOptions,
    keep: impl Fn(&CheckDef) -> bool,
) -> Result<CheckReport> {
    if !(2..=6).contains(&opts.jet_order) {
        return Err(Error::Precondition(format!(
            "jet order {} is outside 2..=6",
            opts.jet_order
        )));
    }
    let selected: Vec<_> = resolve_checks(&sc)?
        .into_iter()
        .filter(|(d, _)| keep(d))
        .collect();
    let model = Model::build(sc, dir, opts.overrides())?;
    let ctx = checks::Context::new(&model, opts.jet_order);
    let mut records = Vec::with_capacity(selected.len());
    for (def, tol) in selected {
        let outcome = ctx.evaluate(def.id).map_err(|e| {
            let message = match e {
                Error::OrderExceeded { .. } => {
                    format!(
                        "{e}; jet order {} is too low for this check",
                        opts.jet_order
                    )
                }
                e => e.to_string(),
            };
            Error::scenario(format!("checks.{}", def.id), message)
        })?;
        let status = if opts.strict {
            Status::Asserted
        } else {
            def.status
        };
        let tolerance = tol.or(opts.tol).unwrap_or(def.tolerance);
        records.push(CheckRecord::new(def.id, status, tolerance, outcome));
    }
    let env = Environment {
        seed: model.seed,
        jet_order: opts.jet_order,
        points: model.points.len(),
        sampler: SAMPLER.to_string(),
        strict: opts.strict,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    Ok(CheckReport::new(model.scenario.name.clone(), env, records))
}

/// Runs every check listed in a scenario. `source` is a path or
/// `builtin:<name>`.
pub fn run(source: &str, opts: &RunOptions) -> Result<CheckReport> {
    let (sc, dir) = load(source)?;
    run_scenario(sc, dir.as_deref(), opts)
}

/// Runs an in-memory scenario; relative references resolve against `dir`.
pub fn run_scenario(sc: Scenario, dir: Option<&Path>, opts: &RunOptions) -> Result<CheckReport> {
    execute(sc, dir, opts, |_| true)
}

/// Runs only the warped-product, base-condition and integral checks.
pub fn run_warp(source: &str, opts: &RunOptions) -> Result<CheckReport> {
    let (sc, dir) = load(source)?;
    if sc.warped.is_none() && sc.periodic.is_none() && !sc.fields.contains_key("phi") {
        return Err(Error::scenario(
            "warped",
            "scenario has no warped product, periodic block or warping field",
        ));
    }
    execute(sc, dir.as_deref(), opts, |d| {
        matches!(
            d.category,
            Category::Warped | Category::Base | Category::Compact
        )
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummary {
    pub scenario: String,
    pub points: usize,
    #[serde(flatten)]
    pub fit: FitResult,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Least-squares constants for the scenario's potential.
pub fn fit(source: &str, opts: &RunOptions) -> Result<FitSummary> {
    let (sc, dir) = load(source)?;
    let mut sc = sc;
    for key in ["lambda", "mu"] {
        sc.fields
            .entry(key.to_string())
            .or_insert_with(|| "0".to_string());
    }
    let model = Model::build(sc, dir.as_deref(), opts.overrides())?;
    let inst = checks::soliton_instance(&model)?;
    let fit = fit_constants(&inst, &model.points)?;
    let mut notes = Vec::new();
    if !fit.lambda_identifiable {
        notes.push("lambda not identifiable".to_string());
    }
    if !fit.mu_identifiable {
        notes.push("mu not identifiable".to_string());
    }
    Ok(FitSummary {
        scenario: model.scenario.name.clone(),
        points: model.points.len(),
        fit,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "qyamabe",
    version,
    about = "Check soliton identities on coordinate charts"
)]
struct Cli {
    /// Tolerance for checks without their own.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Number of sample points.
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Sampling seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value_t = DEFAULT_JET_ORDER, value_parser = clap::value_parser!(u8).range(2..=6).map(usize::from))]
    jet_order: usize,
    /// Promote report-only checks to asserted.
    #[arg(long, global = true)]
    strict: bool,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every check in a scenario (path or builtin:<name>).
    Check { scenario: String },
    /// Fit constant (lambda, mu) to the scenario's potential.
    Fit { scenario: String },
    /// Run the warped-product and integral checks of a scenario.
    Warp { scenario: String },
    /// List built-in scenarios or print one as JSON.
    Builtin {
        #[arg(long)]
        list: bool,
        name: Option<String>,
    },
}

fn emit(text: &str, report: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match report {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
        }
        None => out.write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn fit_csv(s: &FitSummary) -> String {
    format!(
        "scenario,lambda,mu,max_residual,lambda_identifiable,mu_identifiable,points\n{},{:e},{:e},{:e},{},{},{}\n",
        s.scenario,
        s.fit.lambda,
        s.fit.mu,
        s.fit.max_residual,
        s.fit.lambda_identifiable,
        s.fit.mu_identifiable,
        s.points
    )
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let opts = RunOptions {
        tol: cli.tol,
        points: cli.points,
        seed: cli.seed,
        jet_order: cli.jet_order,
        strict: cli.strict,
    };
    let report = cli.report.as_deref();
    match &cli.command {
        Command::Check { scenario } | Command::Warp { scenario } => {
            let rep = match &cli.command {
                Command::Check { .. } => run(scenario, &opts)?,
                _ => run_warp(scenario, &opts)?,
            };
            let text = match cli.format {
                Format::Json => rep.to_json(),
                Format::Csv => rep.to_csv(),
            };
            emit(&text, report, out)?;
            let s = rep.summary;
            let _ = writeln!(
                err,
                "{}: {} pass, {} fail, {} report-only",
                rep.scenario, s.pass, s.fail, s.report_only
            );
            Ok(if rep.failed() {
                EXIT_CHECK_FAILURE
            } else {
                EXIT_OK
            })
        }
        Command::Fit { scenario } => {
            let s = fit(scenario, &opts)?;
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&s).expect("fit serializes") + "\n",
                Format::Csv => fit_csv(&s),
            };
            emit(&text, report, out)?;
            for n in &s.notes {
                let _ = writeln!(err, "{n}");
            }
            let tol = opts.tol.unwrap_or(IDENTITY_TOL);
            Ok(if s.fit.max_residual <= tol {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILURE
            })
        }
        Command::Builtin { list, name } => match (list, name) {
            (true, _) => {
                emit(&(BUILTINS.join("\n") + "\n"), report, out)?;
                Ok(EXIT_OK)
            }
            (false, Some(n)) => {
                let sc = builtin(n)?;
                emit(
                    &(serde_json::to_string_pretty(&sc).expect("scenario serializes") + "\n"),
                    report,
                    out,
                )?;
                Ok(EXIT_OK)
            }
            (false, None) => Err(Error::Precondition("give a builtin name or --list".into())),
        },
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INPUT_ERROR
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT_ERROR
        }
    }
}

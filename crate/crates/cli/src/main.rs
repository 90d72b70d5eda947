//! Command-line front end for the check harness.
//!
//! Two subcommands share one flag set:
//!
//! - `starhilb verify` runs a check suite (`core`, `frobenius`, `circle`,
//!   or `all`) and prints failing records plus a one-line summary; `--out`
//!   additionally writes the full JSON report.
//! - `starhilb sweep` runs a residual sweep (`sweep-weakfunctor` or
//!   `sweep-dirac`) and writes its decay data as CSV to `--out`, with a
//!   JSON sidecar (fitted rate, verdict, threshold) next to it.
//!
//! Options may come from a `--config` TOML file; explicit flags win.
//! Exit codes: `0` all checks passed, `1` some check failed, `2` invalid
//! configuration or usage, `3` I/O failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use starhilb::analysis::{write_sweep_csv, write_sweep_sidecar};
use starhilb::harness::{self, ParamKind, RunConfig, RunOutput, Suite};
use starhilb::{Error, Result};

#[derive(Parser)]
#[command(
    name = "starhilb",
    version,
    about = "Check suites and residual sweeps for truncated Hilbert-space models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a check suite and report per-check pass/fail records.
    Verify(RunArgs),
    /// Run a residual sweep and write its decay data as CSV.
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Suite name: core, frobenius, circle, all (verify);
    /// sweep-weakfunctor, sweep-dirac (sweep).
    #[arg(long)]
    suite: Option<String>,

    /// Comma-separated ascending truncation ranks, for rank-parameterized
    /// suites (core, frobenius, sweep-weakfunctor).
    #[arg(long, value_delimiter = ',')]
    kappas: Option<Vec<u64>>,

    /// Comma-separated ascending mode cutoffs, for cutoff-parameterized
    /// suites (circle, sweep-dirac).
    #[arg(long, value_delimiter = ',')]
    omegas: Option<Vec<u64>>,

    /// Circle circumference used by circle-model checks.
    #[arg(long)]
    length: Option<f64>,

    /// Seed mixed into every check's private random stream.
    #[arg(long)]
    seed: Option<u64>,

    /// Residual tolerance for bounded checks.
    #[arg(long)]
    tolerance: Option<f64>,

    /// Output path: JSON report for verify, CSV data for sweep.
    #[arg(long)]
    out: Option<PathBuf>,

    /// TOML file providing defaults for any of the above; flags override.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// The `--config` file schema: every key optional, unknown keys rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    suite: Option<String>,
    kappas: Option<Vec<u64>>,
    omegas: Option<Vec<u64>>,
    length: Option<f64>,
    seed: Option<u64>,
    tolerance: Option<f64>,
    out: Option<PathBuf>,
}

fn load_file_config(path: &PathBuf) -> Result<FileConfig> {
    let text = fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| {
        Error::ConfigInvalid(format!("config {}: {e}", path.display()))
    })
}

/// Maps the `--kappas`/`--omegas` pair onto the suite's parameter axis,
/// rejecting the wrong axis and ambiguous combinations.
fn resolve_params(
    suite: Suite,
    kappas: Option<Vec<u64>>,
    omegas: Option<Vec<u64>>,
) -> Result<Option<Vec<u64>>> {
    match (kappas, omegas) {
        (None, None) => Ok(None),
        (Some(_), Some(_)) => Err(Error::ConfigInvalid(
            "pass either --kappas or --omegas, not both".into(),
        )),
        (Some(k), None) => match suite.param_kind() {
            ParamKind::Ranks => Ok(Some(k)),
            ParamKind::Cutoffs => Err(Error::ConfigInvalid(format!(
                "the {suite} suite is parameterized by --omegas, not --kappas"
            ))),
            ParamKind::PerSuite => Err(Error::ConfigInvalid(
                "the all suite runs each sub-suite at its default parameters".into(),
            )),
        },
        (None, Some(o)) => match suite.param_kind() {
            ParamKind::Cutoffs => Ok(Some(o)),
            ParamKind::Ranks => Err(Error::ConfigInvalid(format!(
                "the {suite} suite is parameterized by --kappas, not --omegas"
            ))),
            ParamKind::PerSuite => Err(Error::ConfigInvalid(
                "the all suite runs each sub-suite at its default parameters".into(),
            )),
        },
    }
}

fn build_config(args: RunArgs, sweeping: bool) -> Result<RunConfig> {
    let file = match &args.config {
        Some(path) => load_file_config(path)?,
        None => FileConfig::default(),
    };

    let suite_name = args
        .suite
        .or(file.suite)
        .unwrap_or_else(|| if sweeping { String::new() } else { "all".into() });
    if suite_name.is_empty() {
        return Err(Error::ConfigInvalid(
            "sweep needs a suite: sweep-weakfunctor or sweep-dirac".into(),
        ));
    }
    let suite: Suite = suite_name.parse()?;
    if sweeping != suite.is_sweep() {
        return Err(Error::ConfigInvalid(if sweeping {
            format!("{suite} is a verify suite; use `starhilb verify --suite {suite}`")
        } else {
            format!("{suite} is a sweep suite; use `starhilb sweep --suite {suite}`")
        }));
    }

    let params = resolve_params(
        suite,
        args.kappas.or(file.kappas),
        args.omegas.or(file.omegas),
    )?;

    let mut config = RunConfig::new(suite);
    config.params = params;
    if let Some(length) = args.length.or(file.length) {
        config.length = length;
    }
    if let Some(seed) = args.seed.or(file.seed) {
        config.seed = seed;
    }
    if let Some(tolerance) = args.tolerance.or(file.tolerance) {
        config.tolerance = tolerance;
    }
    config.out = args.out.or(file.out);
    Ok(config)
}

fn print_failures_and_summary(output: &RunOutput) {
    for check in &output.report.checks {
        if !check.pass {
            let parameter = check
                .parameter
                .map(|p| format!("@{p}"))
                .unwrap_or_default();
            let note = if check.panicked { " [panicked]" } else { "" };
            println!(
                "FAIL {}{}: value {:e} not {} {:e}{}",
                check.name, parameter, check.value, check.cmp, check.bound, note
            );
        }
    }
    println!(
        "suite={} checks={} passed={} failed={} verdict={}",
        output.report.suite,
        output.report.checks.len(),
        output.report.passed,
        output.report.failed,
        output.report.verdict
    );
}

fn run_verify(args: RunArgs) -> Result<()> {
    let config = build_config(args, false)?;
    let output = harness::run(&config)?;
    print_failures_and_summary(&output);
    if let Some(path) = &config.out {
        let mut text = output.report.to_json();
        text.push('\n');
        fs::write(path, text)?;
        println!("report written to {}", path.display());
    }
    output.as_result()
}

fn run_sweep(args: RunArgs) -> Result<()> {
    let config = build_config(args, true)?;
    let out = config.out.clone().ok_or_else(|| {
        Error::ConfigInvalid("sweep needs an --out path for its CSV data".into())
    })?;
    let sidecar = out.with_extension("json");
    if sidecar == out {
        return Err(Error::ConfigInvalid(
            "sweep --out must not use the .json extension; it is reserved for the sidecar"
                .into(),
        ));
    }
    let output = harness::run(&config)?;
    let data = output.sweep.as_ref().expect("sweep suites produce data");
    write_sweep_csv(&data.report, &data.check_name, fs::File::create(&out)?)?;
    write_sweep_sidecar(&data.report, fs::File::create(&sidecar)?)?;
    print_failures_and_summary(&output);
    println!(
        "sweep={} verdict={} fitted_rate={:.4}; data in {}, sidecar in {}",
        data.check_name,
        data.report.verdict,
        data.report.fitted_rate,
        out.display(),
        sidecar.display()
    );
    output.as_result()
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CheckFailed { .. } => 1,
        Error::Io(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => run_verify(args),
        Command::Sweep(args) => run_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

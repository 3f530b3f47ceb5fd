//! Command-line front end: `run` executes one scenario config, `battery`
//! drives a randomized verification suite, `list-suites` enumerates them.
//!
//! Exit codes: 0 all checks pass; 1 a tolerance check failed (or output
//! could not be written); 2 the config did not parse; 3 the config or
//! arguments failed validation; 4 a physics guard tripped (orthogonal
//! post-selection, grid overflow, ...).

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::battery::{self, BatteryOutcome};
use crate::report::{resolve_out_dir, write_csv, write_report, Check, RunReport};
use crate::scenario::{self, ScenarioConfig, ScenarioError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_PHYSICS: i32 = 4;

#[derive(Parser)]
#[command(
    name = "weakgeo",
    version,
    about = "Exact simulation and geometric verification of pre-measurement pointer shifts, \
             Pancharatnam phases and weak values"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run one scenario config; writes report.json and data.csv.
    Run {
        /// Path to the scenario JSON document.
        config: PathBuf,
        /// Output directory (default: $WEAKGEO_OUT or ./weakgeo-out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Multiply every tolerance by this factor (logged in the report).
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
    /// Run a randomized verification suite; writes report.json and data.csv.
    Battery {
        /// Suite name; see `list-suites`.
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of scenario instances (default: per-suite).
        #[arg(long)]
        count: Option<usize>,
        /// Output directory (default: $WEAKGEO_OUT or ./weakgeo-out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Multiply every tolerance by this factor (logged in the report).
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
    /// List the available battery suites.
    ListSuites,
}

pub fn execute(cli: Cli) -> i32 {
    match cli.command {
        Command::Run {
            config,
            out,
            tolerance_scale,
        } => run_command(&config, out, tolerance_scale),
        Command::Battery {
            suite,
            seed,
            count,
            out,
            tolerance_scale,
        } => battery_command(&suite, seed, count, out, tolerance_scale),
        Command::ListSuites => {
            for info in battery::SUITES {
                println!(
                    "{:<20} (default count {:>4})  {}",
                    info.name, info.default_count, info.description
                );
            }
            EXIT_OK
        }
    }
}

fn run_command(config_path: &PathBuf, out: Option<PathBuf>, tolerance_scale: f64) -> i32 {
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config_path.display());
            return EXIT_PARSE;
        }
    };
    let config: ScenarioConfig = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!(
                "error: {}:{}:{}: {e}",
                config_path.display(),
                e.line(),
                e.column()
            );
            return EXIT_PARSE;
        }
    };

    let started = Instant::now();
    let outcome = match scenario::run_scenario(&config, tolerance_scale) {
        Ok(o) => o,
        Err(ScenarioError::Validation(msg)) => {
            eprintln!("error: invalid scenario: {msg}");
            return EXIT_VALIDATION;
        }
        Err(ScenarioError::Physics(e)) => {
            eprintln!("error: physics guard: {e}");
            return EXIT_PHYSICS;
        }
    };
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;

    let mut report = RunReport {
        schema_version: scenario::SCHEMA_VERSION,
        command: "run".into(),
        kind: config.kind.as_str().into(),
        scenario: Some(serde_json::to_value(&config).expect("config serializes")),
        seed: config.seed,
        count: config.count,
        tolerance_scale,
        values: outcome.values,
        checks: outcome.checks,
        pass: false,
        wall_time_ms: wall_ms,
    };
    report.recompute_pass();
    emit(&report, &outcome.table, out)
}

fn battery_command(
    suite: &str,
    seed: u64,
    count: Option<usize>,
    out: Option<PathBuf>,
    tolerance_scale: f64,
) -> i32 {
    let Some(default_count) = battery::default_count(suite) else {
        eprintln!("error: unknown suite '{suite}'; see `weakgeo list-suites`");
        return EXIT_VALIDATION;
    };
    let count = count.unwrap_or(default_count);

    let started = Instant::now();
    let BatteryOutcome {
        checks,
        table,
        values,
    } = match battery::run_suite(suite, seed, count, tolerance_scale) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: physics guard: {e}");
            return EXIT_PHYSICS;
        }
    };
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;

    let mut report = RunReport {
        schema_version: scenario::SCHEMA_VERSION,
        command: "battery".into(),
        kind: suite.into(),
        scenario: None,
        seed,
        count: Some(count),
        tolerance_scale,
        values,
        checks,
        pass: false,
        wall_time_ms: wall_ms,
    };
    report.recompute_pass();
    emit(&report, &table, out)
}

fn emit(report: &RunReport, table: &crate::report::Table, out: Option<PathBuf>) -> i32 {
    for check in &report.checks {
        print_check(check);
    }

    let dir = resolve_out_dir(out);
    let report_path = dir.join("report.json");
    let csv_path = dir.join("data.csv");
    if let Err(e) = write_report(&report_path, report) {
        eprintln!("error: cannot write {}: {e}", report_path.display());
        return EXIT_TOLERANCE;
    }
    if let Err(e) = write_csv(&csv_path, table) {
        eprintln!("error: cannot write {}: {e}", csv_path.display());
        return EXIT_TOLERANCE;
    }
    println!(
        "{}: report {} ; data {} ({} rows; {:.1} ms)",
        if report.pass { "PASS" } else { "FAIL" },
        report_path.display(),
        csv_path.display(),
        table.rows.len(),
        report.wall_time_ms,
    );
    if report.pass {
        EXIT_OK
    } else {
        EXIT_TOLERANCE
    }
}

fn print_check(check: &Check) {
    let status = if check.pass { "PASS" } else { "FAIL" };
    let detail = match (check.expected, check.rel_err, check.abs_err) {
        (Some(expected), Some(rel), _) => format!(
            "computed {:.6e}, expected {:.6e}, rel err {:.3e}",
            check.computed, expected, rel
        ),
        (Some(expected), None, Some(abs)) => format!(
            "computed {:.6e}, expected {:.6e}, abs err {:.3e}",
            check.computed, expected, abs
        ),
        _ => format!("value {:.6e}", check.computed),
    };
    let note = check
        .note
        .as_deref()
        .map(|n| format!(" [{n}]"))
        .unwrap_or_default();
    println!(
        "  {status} {} ({}): {detail} (tol {:.1e}){note}",
        check.name, check.formula, check.tolerance
    );
}

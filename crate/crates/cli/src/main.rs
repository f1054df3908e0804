//! `cayley`: a command-line harness that verifies the geometry of the ruled
//! cubic surface X0 X1 X2 - X1^3 - X0^2 X3 = 0 over small finite fields and
//! the rationals, suite by suite, against independent recomputations.

mod suites;

use std::collections::HashSet;
use std::io::IsTerminal;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cayley_core::field::{Field, DEFAULT_MAX_ORDER};
use suites::{run_suite, Outcome, SUITES};

#[derive(Parser)]
#[command(name = "cayley", version, about = "Exact verification of a ruled cubic surface")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites over one or more coefficient fields.
    Verify(VerifyArgs),
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// Field to verify over (q2, q3, ..., or rational); repeatable.
    /// Defaults to every finite field of order 4 through 9 plus GF(2), GF(3).
    #[arg(long = "field", value_name = "FIELD")]
    fields: Vec<String>,

    /// Suite to run (repeatable), or "all".
    #[arg(long = "suite", value_name = "SUITE", default_value = "all")]
    suites: Vec<String>,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Worker threads for running suites in parallel (default: all cores).
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,

    /// Raise the bound on the field order (hard cap 64).
    #[arg(long = "max-q", value_name = "BOUND", default_value_t = DEFAULT_MAX_ORDER)]
    max_q: u64,

    /// Leave elapsed-time fields out of the output, making it reproducible
    /// byte for byte.
    #[arg(long)]
    omit_timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// One suite's verdict over one field, in output order.
#[derive(Serialize)]
struct SuiteReport {
    suite: String,
    field: String,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    actual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    artifact: Option<Vec<String>>,
}

#[derive(Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Status {
    Pass,
    Fail,
    Skip,
}

const DEFAULT_FIELDS: &[&str] = &["q2", "q3", "q4", "q5", "q7", "q8", "q9"];

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify(args) => verify(args),
    }
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn verify(args: VerifyArgs) -> ExitCode {
    // resolve suites, expanding "all" and keeping canonical order
    let mut wanted: HashSet<&str> = HashSet::new();
    for name in &args.suites {
        if name == "all" {
            wanted.extend(SUITES);
        } else if let Some(known) = SUITES.iter().find(|s| *s == name) {
            wanted.insert(known);
        } else {
            return usage_error(&format!(
                "unknown suite '{name}'; known suites: all, {}",
                SUITES.join(", ")
            ));
        }
    }
    let suite_names: Vec<&str> = SUITES
        .iter()
        .copied()
        .filter(|s| wanted.contains(s))
        .collect();

    // resolve fields, deduplicating and sorting finite-first by order
    let requested: Vec<&str> = if args.fields.is_empty() {
        DEFAULT_FIELDS.to_vec()
    } else {
        args.fields.iter().map(String::as_str).collect()
    };
    let mut fields: Vec<Field> = Vec::new();
    for name in requested {
        let field = match Field::parse_with_max_order(name, args.max_q) {
            Ok(field) => field,
            Err(e) => return usage_error(&format!("field '{name}': {e}")),
        };
        if !fields.contains(&field) {
            fields.push(field);
        }
    }
    fields.sort_by_key(|f| (f.order().is_none(), f.order(), f.name()));

    if let Some(jobs) = args.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            return usage_error(&format!("--jobs {jobs}: {e}"));
        }
    }

    let tasks: Vec<(&Field, &str)> = fields
        .iter()
        .flat_map(|f| suite_names.iter().map(move |s| (f, *s)))
        .collect();
    use rayon::prelude::*;
    let mut reports: Vec<SuiteReport> = tasks
        .par_iter()
        .map(|(field, suite)| {
            let start = Instant::now();
            let outcome = run_suite(suite, field);
            let elapsed = start.elapsed().as_millis() as u64;
            let mut report = match outcome {
                Outcome::Pass { expected, actual, artifact } => SuiteReport {
                    suite: suite.to_string(),
                    field: field.name(),
                    status: Status::Pass,
                    reason: None,
                    expected: Some(expected),
                    actual: Some(actual),
                    elapsed_ms: Some(elapsed),
                    artifact,
                },
                Outcome::Fail { expected, actual } => SuiteReport {
                    suite: suite.to_string(),
                    field: field.name(),
                    status: Status::Fail,
                    reason: None,
                    expected: Some(expected),
                    actual: Some(actual),
                    elapsed_ms: Some(elapsed),
                    artifact: None,
                },
                Outcome::Skip { reason } => SuiteReport {
                    suite: suite.to_string(),
                    field: field.name(),
                    status: Status::Skip,
                    reason: Some(reason),
                    expected: None,
                    actual: None,
                    elapsed_ms: None,
                    artifact: None,
                },
            };
            if args.omit_timing {
                report.elapsed_ms = None;
            }
            report
        })
        .collect();

    // deterministic order: fields as resolved above, suites canonically
    let field_rank = |name: &str| fields.iter().position(|f| f.name() == name);
    let suite_rank = |name: &str| SUITES.iter().position(|s| *s == name);
    reports.sort_by_key(|r| (field_rank(&r.field), suite_rank(&r.suite)));

    let failed = reports.iter().filter(|r| r.status == Status::Fail).count();
    match args.format {
        Format::Json => {
            let rendered =
                serde_json::to_string_pretty(&reports).expect("reports serialize to JSON");
            println!("{rendered}");
        }
        Format::Text => render_text(&reports),
    }
    if failed > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn render_text(reports: &[SuiteReport]) {
    // honor NO_COLOR and keep piped output free of escape codes
    let color = std::env::var_os("NO_COLOR").map_or(true, |v| v.is_empty())
        && std::io::stdout().is_terminal();
    let paint = |code: &str, text: &str| {
        if color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    };
    let mut passed = 0;
    let mut failed = 0;
    let mut skipped = 0;
    for r in reports {
        let timing = match r.elapsed_ms {
            Some(ms) => format!(" ({ms} ms)"),
            None => String::new(),
        };
        match r.status {
            Status::Pass => {
                passed += 1;
                println!(
                    "{} {}/{}{timing}: {}",
                    paint("32", "PASS"),
                    r.field,
                    r.suite,
                    r.actual.as_deref().unwrap_or_default()
                );
            }
            Status::Fail => {
                failed += 1;
                println!(
                    "{} {}/{}{timing}: expected {}; got {}",
                    paint("31", "FAIL"),
                    r.field,
                    r.suite,
                    r.expected.as_deref().unwrap_or_default(),
                    r.actual.as_deref().unwrap_or_default()
                );
            }
            Status::Skip => {
                skipped += 1;
                println!(
                    "{} {}/{}: {}",
                    paint("33", "SKIP"),
                    r.field,
                    r.suite,
                    r.reason.as_deref().unwrap_or_default()
                );
            }
        }
    }
    let verdict = if failed == 0 { paint("32", "ok") } else { paint("31", "FAILED") };
    let runs = if reports.len() == 1 { "run" } else { "runs" };
    println!(
        "{verdict}: {passed} passed, {failed} failed, {skipped} skipped ({} suite {runs})",
        reports.len()
    );
}

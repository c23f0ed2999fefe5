//! Command-line driver: loop file in, invariant basis out.
//!
//! The pipeline parses the loop, extracts and solves one recurrence per
//! variable, computes a Groebner basis of the full polynomial invariant
//! ideal, and (by default) replays the loop with an exact interpreter to
//! check every emitted invariant at concrete iterations.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::Parser;

use loopinv_core::extract::Classification;
use loopinv_core::pipeline::{run_full, InitValue, PipelineConfig, PipelineError, RunArtifacts};
use loopinv_core::rational::{display_rational, parse_rational};

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_EXTRACT: u8 = 4;
const EXIT_SOLVE: u8 = 5;
const EXIT_IDEAL: u8 = 6;
const EXIT_CHECK_FAILED: u8 = 7;
const EXIT_INTERP: u8 = 8;

/// Compute a basis of all polynomial invariants of a single-path loop.
#[derive(Parser, Debug)]
#[command(
    name = "loopinv",
    version,
    about,
    after_help = "\
EXIT CODES:
    0   success (including a passing check when enabled)
    1   input file could not be read
    2   usage or configuration error
    3   parse error (including out-of-model constructs)
    4   recurrence extraction error (coupled or non-rational updates)
    5   recurrence solving error (e.g. irrational eigenvalues)
    6   ideal computation hit the step cap
    7   invariant check failed
    8   exact interpretation failed (division by zero)

INPUT LANGUAGE:
    while true do v := <rational expression>; ... end
    One assignment per statement; '#' starts a line comment. The loop
    counter (default 'n') starts at 0 and advances by 1 each iteration,
    implicitly or through an explicit 'n := n + 1'."
)]
struct Cli {
    /// Loop source file
    input: std::path::PathBuf,

    /// Loop counter variable name
    #[arg(long, default_value = "n")]
    counter: String,

    /// Initial value 'var=value' with value a rational (like 5 or -3/2),
    /// 'sym' for a symbolic value, or a fresh symbol name (repeatable)
    #[arg(long = "init", value_name = "VAR=VALUE")]
    init: Vec<String>,

    /// Comma-separated list of variables invariants may mention
    /// (default: every non-temporary program variable)
    #[arg(long, value_name = "LIST")]
    vars: Option<String>,

    /// Include history registers (temporaries) among the invariant variables
    #[arg(long)]
    include_temps: bool,

    /// Emit the reduced Groebner basis instead of the raw one
    #[arg(long)]
    reduce: bool,

    /// Iterations to verify by exact interpretation; 0 disables the check
    #[arg(long, default_value_t = 25, value_name = "N")]
    check: u32,

    /// Output format
    #[arg(long, default_value = "text", value_parser = ["text", "json"])]
    format: String,

    /// Cap on the auxiliary polynomial degree in the hypergeometric search
    #[arg(long, default_value_t = 20, value_name = "N")]
    degree_cap: u32,

    /// Cap on Groebner basis reduction steps
    #[arg(long, default_value_t = 2_000_000, value_name = "N")]
    gb_step_cap: usize,

    /// Report per-stage timings on stderr (text) or in the JSON payload
    #[arg(long)]
    timings: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match drive(&cli) {
        Ok(code) => code,
        Err((code, msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(code)
        }
    }
}

fn drive(cli: &Cli) -> Result<ExitCode, (u8, String)> {
    let src = std::fs::read_to_string(&cli.input)
        .map_err(|e| (EXIT_IO, format!("{}: {}", cli.input.display(), e)))?;

    let mut cfg = PipelineConfig {
        counter_name: cli.counter.clone(),
        include_temporaries: cli.include_temps,
        reduce: cli.reduce,
        check_iterations: cli.check,
        degree_cap: cli.degree_cap,
        gb_step_cap: cli.gb_step_cap,
        ..PipelineConfig::default()
    };
    for item in &cli.init {
        let (name, value) = item
            .split_once('=')
            .ok_or((EXIT_CONFIG, format!("--init '{}': expected VAR=VALUE", item)))?;
        let value = value.trim();
        let parsed = if value == "sym" {
            InitValue::Symbolic
        } else if let Some(r) = parse_rational(value) {
            InitValue::Rational(r)
        } else if value.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            && value
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        {
            InitValue::Named(value.to_string())
        } else {
            return Err((
                EXIT_CONFIG,
                format!(
                    "--init '{}': value must be a rational, 'sym', or a symbol name",
                    item
                ),
            ));
        };
        cfg.initial_values.insert(name.trim().to_string(), parsed);
    }
    if let Some(vars) = &cli.vars {
        cfg.relevant_vars = Some(
            vars.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect(),
        );
    }

    let arts = match run_full(&src, &cfg) {
        Ok(a) => a,
        Err(e) => {
            let code = match &e {
                PipelineError::Parse(_) => EXIT_PARSE,
                PipelineError::Extract(_) => EXIT_EXTRACT,
                PipelineError::Solve(_) => EXIT_SOLVE,
                PipelineError::Ideal(_) => EXIT_IDEAL,
                PipelineError::Interp(_) => EXIT_INTERP,
                PipelineError::Config(_) => EXIT_CONFIG,
            };
            return Err((code, e.to_string()));
        }
    };

    match cli.format.as_str() {
        "json" => print_json(&arts, cli.timings),
        _ => print_text(&arts, cli.timings),
    }

    let check_failed = arts.report.check.as_ref().is_some_and(|c| !c.passed);
    Ok(if check_failed {
        ExitCode::from(EXIT_CHECK_FAILED)
    } else {
        ExitCode::SUCCESS
    })
}

fn classification_str(c: &Classification) -> String {
    match c {
        Classification::PSolvable => "P-solvable".into(),
        Classification::ExtendedPSolvable => "extended P-solvable".into(),
        Classification::Unsupported { variable, reason } => {
            format!("unsupported ({}: {})", variable, reason)
        }
    }
}

fn print_text(arts: &RunArtifacts, timings: bool) {
    let rep = &arts.report;
    println!("classification: {}", classification_str(&rep.classification));
    println!("valid from: n >= {}", rep.offset);
    if rep.basis.is_zero_ideal() {
        println!("true (zero ideal: no polynomial invariants)");
    } else {
        let lines: Vec<String> = rep
            .basis
            .generators
            .iter()
            .map(|g| format!("{} == 0", g.to_canonical_string()))
            .collect();
        println!("{}", lines.join(" &&\n"));
    }
    match &rep.check {
        None => println!("check: skipped"),
        Some(c) if c.passed => println!(
            "check: PASS ({} iterations, {} trials)",
            c.iterations, c.trials
        ),
        Some(c) => {
            println!("check: FAIL");
            if let Some(ce) = &c.counterexample {
                println!("  generator: {} == 0", ce.generator);
                println!("  at n = {}, value {}", ce.n, display_rational(&ce.value));
                for (name, val) in &ce.bindings {
                    println!("  {} = {}", name, display_rational(val));
                }
            }
        }
    }
    if timings {
        let t = &rep.timings;
        eprintln!(
            "timings: parse {}us, extract {}us, solve {}us, ideal {}us, check {}us",
            t.parse_us, t.extract_us, t.solve_us, t.ideal_us, t.check_us
        );
    }
}

fn print_json(arts: &RunArtifacts, timings: bool) {
    let rep = &arts.report;
    let check = rep.check.as_ref().map(|c| {
        let counterexample = c.counterexample.as_ref().map(|ce| {
            let bindings: BTreeMap<String, String> = ce
                .bindings
                .iter()
                .map(|(k, v)| (k.clone(), display_rational(v)))
                .collect();
            serde_json::json!({
                "generator": ce.generator,
                "n": ce.n,
                "value": display_rational(&ce.value),
                "bindings": bindings,
            })
        });
        serde_json::json!({
            "passed": c.passed,
            "iterations": c.iterations,
            "trials": c.trials,
            "counterexample": counterexample,
        })
    });
    let mut payload = serde_json::json!({
        "classification": classification_str(&rep.classification),
        "offset": rep.offset,
        "generators": rep.basis.generators.iter()
            .map(|g| g.to_canonical_string()).collect::<Vec<_>>(),
        "check": check,
    });
    if timings {
        payload["timings"] = serde_json::json!({
            "parse_us": rep.timings.parse_us as u64,
            "extract_us": rep.timings.extract_us as u64,
            "solve_us": rep.timings.solve_us as u64,
            "ideal_us": rep.timings.ideal_us as u64,
            "check_us": rep.timings.check_us as u64,
        });
    }
    println!("{}", serde_json::to_string_pretty(&payload).expect("json"));
}

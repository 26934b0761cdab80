pub mod circuit;
pub mod config;
pub mod error;
pub mod report;
pub mod scenarios;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use clap::Parser;
use loqc::Exec;

use crate::circuit::{render_circuit, run_circuit, CircuitFile};
use crate::config::{Args, Format, ScenarioConfig};
use crate::error::CliError;
use crate::report::{render_report, write_atomic};
use crate::scenarios::{run_scenario_with, SCENARIOS};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Parses `argv` and runs it; returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&args, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn emit(bytes: &[u8], out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => stdout.write_all(bytes).map_err(|e| CliError::Output(e.to_string())),
    }
}

fn execute(args: &Args, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let io = |e: std::io::Error| CliError::Output(e.to_string());
    if args.list {
        for s in SCENARIOS {
            let params: Vec<String> = s.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let mc = if s.monte_carlo { " [monte carlo, needs --seed]" } else { "" };
            writeln!(stdout, "{:<20} {}{}", s.name, s.summary, mc).map_err(io)?;
            if !params.is_empty() {
                writeln!(stdout, "{:<20} {}", "", params.join(" ")).map_err(io)?;
            }
        }
        return Ok(EXIT_PASS);
    }
    let exec = if args.sequential { Exec::Sequential } else { Exec::default() };
    let start = Instant::now();

    if let Some(path) = &args.circuit {
        if args.config.is_some() || !args.params.is_empty() {
            return Err(CliError::Config("--circuit takes no --config or --param".into()));
        }
        let file = CircuitFile::load(path)?;
        let report = run_circuit(&file, args.seed, args.trials)?;
        let bytes = render_circuit(&report, args.format.unwrap_or(Format::Json))?;
        emit(&bytes, args.out.as_deref(), stdout)?;
        let _ = writeln!(stderr, "circuit done in {:.3}s", start.elapsed().as_secs_f64());
        return Ok(EXIT_PASS);
    }

    let cfg = ScenarioConfig::from_args(args)?;
    let report = run_scenario_with(&cfg, exec)?;
    let bytes = render_report(&report, cfg.format)?;
    emit(&bytes, cfg.out.as_deref(), stdout)?;
    for c in report.failed_checks() {
        let _ = writeln!(
            stderr,
            "FAIL {}: measured {} expected {} (tol {})",
            c.name, c.measured, c.expected, c.tolerance
        );
    }
    let _ = writeln!(
        stderr,
        "{} {} in {:.3}s",
        report.scenario,
        if report.pass { "passed" } else { "failed" },
        start.elapsed().as_secs_f64()
    );
    Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
}

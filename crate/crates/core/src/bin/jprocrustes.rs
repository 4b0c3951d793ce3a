use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use jprocrustes::cli::{self, ExitStatus, Overrides};
use jprocrustes::StructureMode;

/// Nearest normal J-Hamiltonian, skew-J-Hamiltonian or J-symplectic matrix
/// with prescribed eigenpairs.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Args {
    /// Problem document (JSON); `-` reads standard input.
    #[arg(long)]
    input: PathBuf,

    /// Report destination; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Override the document's mode.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<StructureMode>,

    /// Relative singular-value cutoff.
    #[arg(long)]
    tol_rank: Option<f64>,

    /// Threshold for structure and condition checks.
    #[arg(long)]
    tol_structure: Option<f64>,

    /// Number of feasible samples for the optimality audit.
    #[arg(long)]
    audit: Option<usize>,

    /// Seed for the audit sampler.
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_mode(s: &str) -> Result<StructureMode, String> {
    s.parse().map_err(|e: jprocrustes::Error| e.to_string())
}

fn main() -> ExitCode {
    // clap's own usage-error code (2) would read as "infeasible".
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() {
                ExitStatus::InputError.code()
            } else {
                0
            };
            return ExitCode::from(code as u8);
        }
    };
    let overrides = Overrides {
        mode: args.mode,
        rank_cutoff: args.tol_rank,
        structure_atol: args.tol_structure,
        audit_samples: args.audit,
        seed: args.seed,
    };
    let parsed = if args.input.as_os_str() == "-" {
        cli::parse_instance_reader(std::io::stdin().lock())
    } else {
        cli::parse_instance_file(&args.input)
    };
    let (status, report) = match parsed.and_then(|mut inst| overrides.apply(&mut inst).map(|_| inst)) {
        Ok(inst) => cli::run(&inst),
        Err(e) => (ExitStatus::for_error(&e), cli::error_report(&e)),
    };
    if let Some(msg) = report.get("error").and_then(|v| v.as_str()) {
        eprintln!("jprocrustes: {msg}");
    }
    let text = cli::format_document(&report);
    let written = match &args.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("jprocrustes: cannot write report: {e}");
        return ExitCode::from(ExitStatus::InputError.code() as u8);
    }
    ExitCode::from(status.code() as u8)
}

//! `faprop` command line.
//!
//! Exit status: 0 when every certificate passes, 2 on a violation (counterexamples
//! go to stderr), 1 on a configuration or runtime error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use faprop::config::{ExperimentConfig, ExperimentKind, Format};
use faprop::experiments;

#[derive(Debug, Parser)]
#[command(name = "faprop", version, about = "Truncation and continuity certificates for quantum states and channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Finite-energy check of a spectrum against a grading.
    FaCheck(Common),
    /// F_G(E) on an energy grid.
    Fg(Common),
    /// Truncation error bound Y(r) on an r grid.
    TruncateBound(Common),
    /// Truncation certificate over random channels.
    CertifyTruncation(Common),
    /// Ensemble truncation certificate over random channels.
    CertifyEnsemble(Common),
    /// Robustness profile along a perturbation family.
    Robustness(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON experiment config; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Command {
    fn split(self) -> (ExperimentKind, Common) {
        match self {
            Command::FaCheck(c) => (ExperimentKind::FaCheck, c),
            Command::Fg(c) => (ExperimentKind::FgCurve, c),
            Command::TruncateBound(c) => (ExperimentKind::TruncationBound, c),
            Command::CertifyTruncation(c) => (ExperimentKind::TruncationCertificate, c),
            Command::CertifyEnsemble(c) => (ExperimentKind::EnsembleCertificate, c),
            Command::Robustness(c) => (ExperimentKind::RobustnessProfile, c),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("faprop: {e}");
            ExitCode::from(1)
        }
    }
}

fn execute(cli: Cli) -> faprop::Result<bool> {
    let (kind, args) = cli.command.split();
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = args.out {
        config.output.path = Some(out);
    }
    if let Some(format) = args.format {
        config.output.format = format;
    }
    let pool = faprop::thread_pool()?;
    let report = pool.install(|| experiments::run(kind, &config))?;
    let bytes = report.render(config.output.format)?;
    match &config.output.path {
        Some(path) => std::fs::write(path, &bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    if !report.pass {
        let mut err = std::io::stderr().lock();
        writeln!(err, "faprop: {} violation(s) in {}", report.counterexamples.len(), report.experiment)?;
        for c in &report.counterexamples {
            writeln!(err, "{c}")?;
        }
    }
    Ok(report.pass)
}

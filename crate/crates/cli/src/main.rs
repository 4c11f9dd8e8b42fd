//! `wickquant`: runs one job file and writes a plain-text report (and CSV
//! tables for `cp1-verify`).
//!
//! Exit codes: 0 success, 2 parse error, 3 computation error, 4 a verified
//! property failed, 1 I/O failure.

mod job;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use job::JobSpec;
use run::{Report, Settings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("computation error: {0}")]
    Compute(wickquant::Error),
    #[error("acceptance failure: {0}")]
    Acceptance(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl From<wickquant::Error> for CliError {
    fn from(e: wickquant::Error) -> Self {
        match e {
            wickquant::Error::Parse(s) => CliError::Parse(s),
            other => CliError::Compute(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Compute(_) => 3,
            CliError::Acceptance(_) => 4,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "wickquant",
    version,
    about = "Exact Berezin-Toeplitz computations at a point"
)]
struct Args {
    /// Job file (JSON).
    #[arg(long)]
    job: PathBuf,
    /// Directory for the report and CSV files; the report always goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest truncation degree a job may request.
    #[arg(long, default_value_t = 16)]
    trunc_ceiling: i32,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Seed for randomized suites.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn write_outputs(dir: &Path, job: &JobSpec, report: &Report) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let name = job.outputs.report.as_deref().unwrap_or("report.txt");
    fs::write(dir.join(name), report.text())?;
    let stem = job.outputs.csv.as_deref().unwrap_or("residuals");
    for (suffix, rows) in &report.tables {
        let mut w = csv::Writer::from_path(dir.join(format!("{stem}_{suffix}.csv")))?;
        w.write_record([
            "m",
            "p",
            "q",
            "exact_value",
            "predicted_partial_sum",
            "residual_float",
            "fitted_order",
        ])?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    Ok(())
}

fn execute(args: &Args) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.job).map_err(|e| {
        CliError::Parse(format!("cannot read job file {}: {e}", args.job.display()))
    })?;
    let job = JobSpec::parse(&text)?;
    if args.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build_global()
            .map_err(|e| CliError::Parse(format!("--threads: {e}")))?;
    }
    let settings = Settings {
        trunc_ceiling: args.trunc_ceiling,
        seed: args.seed,
    };
    let report = run::run(&job, &settings)?;
    print!("{}", report.text());
    if let Some(dir) = &args.out {
        write_outputs(dir, &job, &report)?;
    }
    if !report.failed.is_empty() {
        return Err(CliError::Acceptance(format!(
            "{} check(s) failed; first: {}",
            report.failed.len(),
            report.failed[0]
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wickquant: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

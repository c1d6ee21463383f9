use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use phgscat::io::{configure_workers, run_command, Command, ExitStatus, RunConfig, ZetaSpec};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Expand,
    Residues,
    EinsteinLog,
    Perturb,
    ModeScatter,
    NormalForm,
    CheckAll,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Expand => Command::Expand,
            Cmd::Residues => Command::Residues,
            Cmd::EinsteinLog => Command::EinsteinLog,
            Cmd::Perturb => Command::Perturb,
            Cmd::ModeScatter => Command::ModeScatter,
            Cmd::NormalForm => Command::NormalForm,
            Cmd::CheckAll => Command::CheckAll,
        }
    }
}

/// Polyhomogeneous expansions, residues and scattering data for
/// asymptotically hyperbolic metrics.
///
/// Exit status: 0 all checks pass, 1 a check failed, 2 usage error, 3 internal error.
/// PHGSCAT_WORKERS sets the number of worker threads.
#[derive(Debug, Parser)]
#[command(name = "phgscat", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// Metric-spec JSON file.
    #[arg(long)]
    metric: Option<PathBuf>,
    /// Boundary source, e.g. "1,0=1/2;-1,0=1/2".
    #[arg(long)]
    source: Option<String>,
    /// "symbolic" or "a,b,steps".
    #[arg(long, default_value = "symbolic")]
    zeta: String,
    /// Truncation order J (defaults to the metric file's).
    #[arg(long)]
    truncation: Option<usize>,
    /// Report path prefix; writes PREFIX.json and PREFIX.txt.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tolerance for numeric symbol comparisons.
    #[arg(long)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                ExitStatus::Usage.code() as u8
            } else {
                0
            });
        }
    };
    let zeta: ZetaSpec = match cli.zeta.parse() {
        Ok(z) => z,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(ExitStatus::Usage.code() as u8);
        }
    };
    if let Err(e) = configure_workers() {
        eprintln!("error: {e}");
        return ExitCode::from(ExitStatus::Usage.code() as u8);
    }
    let cfg = RunConfig {
        command: cli.command.into(),
        metric: cli.metric,
        source: cli.source,
        zeta,
        truncation: cli.truncation,
        out: cli.out,
        tol: cli.tol,
    };
    let (status, report) = run_command(&cfg);
    match report {
        Ok(r) => {
            if cfg.out.is_none() {
                print!("{}", r.to_text());
            }
            for f in r.failures() {
                eprintln!("FAIL {}: {}", f.name, f.detail);
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(status.code() as u8)
}

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "qcontrol", version, about = "Controlled operations by Hilbert-space extension")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Ideal,
    Calibrated,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Clone, Debug)]
pub struct NoiseArgs {
    /// Defaults to `sampled` when --seed is given, `exact` otherwise.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Base noise configuration; the flags below override single fields.
    #[arg(long, value_enum, default_value_t = Preset::Calibrated)]
    pub preset: Preset,
    #[arg(long)]
    pub noise_phase_sigma: Option<f64>,
    #[arg(long)]
    pub noise_distinguishability: Option<f64>,
    #[arg(long)]
    pub noise_waveplate_sigma: Option<f64>,
    /// Expected counts for a unit-weight outcome (per setting for `tomo`).
    #[arg(long)]
    pub shots: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Controlled version of an operator read from JSON.
    Control {
        /// Operator JSON file.
        op: PathBuf,
        /// Control value on which the operator acts.
        #[arg(long, default_value = "1", value_parser = ["0", "1"])]
        polarity: String,
        #[command(flatten)]
        common: Common,
    },
    /// Truth tables and fidelities of a named gate experiment.
    Experiment {
        /// cnot, ch, cz, cz-pi2, cz-pi4, ef or es.
        name: String,
        #[command(flatten)]
        noise: NoiseArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Process tomography of a controlled gate.
    Tomo {
        /// cnot, ch, cz, cz-pi2 or cz-pi4.
        gate: String,
        #[command(flatten)]
        noise: NoiseArgs,
        /// Poisson resamples for the fidelity error bar.
        #[arg(long, default_value_t = 20)]
        resamples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Two-photon fringes versus the source phase.
    Fringe {
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[command(flatten)]
        noise: NoiseArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Extra-CNOT comparison table.
    Resources {
        #[arg(long, value_parser = ["shor", "explicit"], default_value = "shor")]
        model: String,
        /// Single value or inclusive range `a..b`.
        #[arg(long, default_value = "1..10")]
        n: String,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        /// CNOT share of p+q in the shor model; even split when omitted.
        #[arg(long)]
        p_fraction: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

pub struct Failure {
    pub kind: String,
    pub message: String,
}

impl From<qcontrol::Error> for Failure {
    fn from(e: qcontrol::Error) -> Self {
        Failure {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

impl Failure {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        Failure {
            kind: kind.to_string(),
            message: message.into(),
        }
    }
}

fn fail(f: Failure) -> ExitCode {
    let doc = json!({
        "schema": qcontrol::io::SCHEMA_VERSION,
        "error": { "kind": f.kind, "message": f.message },
    });
    eprintln!("{doc}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(Failure::new("usage", e.to_string().trim_end())),
    };
    let (artifacts, dir) = match run(cli.command) {
        Ok(x) => x,
        Err(f) => return fail(f),
    };
    match output::write_all(&dir, &artifacts) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(Failure::new("io", e.to_string())),
    }
}

fn run(cmd: Command) -> Result<(Vec<output::Artifact>, PathBuf), Failure> {
    match cmd {
        Command::Control { op, polarity, common } => {
            Ok((commands::control(&op, &polarity, common.format)?, common.out))
        }
        Command::Experiment { name, noise, common } => {
            Ok((commands::experiment(&name, &noise, common.format)?, common.out))
        }
        Command::Tomo {
            gate,
            noise,
            resamples,
            common,
        } => Ok((commands::tomo(&gate, &noise, resamples, common.format)?, common.out)),
        Command::Fringe { points, noise, common } => {
            Ok((commands::fringe(points, &noise, common.format)?, common.out))
        }
        Command::Resources {
            model,
            n,
            p,
            q,
            p_fraction,
            common,
        } => Ok((commands::resources(&model, &n, p, q, p_fraction, common.format)?, common.out)),
    }
}

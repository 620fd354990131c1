//! `sfflab`: command-line driver for the SFF laboratory.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{read_config_file, Command, Overrides, RunConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "sfflab", version, about = "Spectral form factor laboratory for Wigner and monoparametric ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// SFF statistics over independent Wigner matrices (wigner_sff.csv)
    SampleWigner(Shared),
    /// Nested or coupled monoparametric moments (mono_moments.csv or mono_coupled.csv)
    SampleMono(Shared),
    /// Running-mean strips for growing sample counts (strip.csv)
    Strip(Shared),
    /// Deterministic prediction curves (predict.csv)
    Predict(Shared),
    /// Oracle and invariant checks (verify.csv)
    Verify(Shared),
    /// All of the above into one directory
    Figures(Shared),
}

/// Options shared by every subcommand. Each one may also be set in the
/// `--config` file; flags take precedence.
#[derive(Args, Debug)]
struct Shared {
    /// File of key=value settings (keys as below, `-` or `_`; `#` comments)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Matrix dimension N
    #[arg(long)]
    n: Option<usize>,
    /// 1 (real symmetric) or 2 (complex Hermitian)
    #[arg(long)]
    beta: Option<u32>,
    /// Entry law: gaussian, rademacher, uniform or sparse
    #[arg(long)]
    law: Option<String>,
    /// Master seed, decimal or 0x-prefixed hex
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    t_min: Option<f64>,
    /// Defaults to pi N
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of grid points
    #[arg(long)]
    points: Option<usize>,
    /// log or linear
    #[arg(long)]
    spacing: Option<String>,
    /// Wigner samples
    #[arg(long)]
    samples: Option<usize>,
    /// Matrix tuples in the monoparametric experiment
    #[arg(long)]
    n_pairs: Option<usize>,
    /// Parameter draws per tuple
    #[arg(long)]
    n_params: Option<usize>,
    /// Comma-separated strip sample counts
    #[arg(long)]
    counts: Option<String>,
    /// circle, sphere:K, circle-point:ANGLE, table:FILE, plane or plane-point:X,Y
    #[arg(long)]
    param_law: Option<String>,
    /// nested or coupled
    #[arg(long)]
    design: Option<String>,
    /// wigner, mono or both
    #[arg(long)]
    strip_mode: Option<String>,
    /// Skip the exponent study in verify
    #[arg(long)]
    quick: bool,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially, 0 uses every core
    #[arg(long)]
    workers: Option<usize>,
}

impl Shared {
    fn overrides(self) -> (Option<PathBuf>, Overrides) {
        let o = Overrides {
            n: self.n,
            beta: self.beta,
            law: self.law,
            seed: self.seed,
            t_min: self.t_min,
            t_max: self.t_max,
            points: self.points,
            spacing: self.spacing,
            samples: self.samples,
            n_pairs: self.n_pairs,
            n_params: self.n_params,
            counts: self.counts,
            param_law: self.param_law,
            design: self.design,
            strip_mode: self.strip_mode,
            quick: self.quick.then_some(true),
            out: self.out,
            workers: self.workers,
        };
        (self.config, o)
    }
}

fn run(sub: Sub) -> Result<(), CliError> {
    let (command, shared) = match sub {
        Sub::SampleWigner(s) => (Command::SampleWigner, s),
        Sub::SampleMono(s) => (Command::SampleMono, s),
        Sub::Strip(s) => (Command::Strip, s),
        Sub::Predict(s) => (Command::Predict, s),
        Sub::Verify(s) => (Command::Verify, s),
        Sub::Figures(s) => (Command::Figures, s),
    };
    let (file, flags) = shared.overrides();
    let base = match file {
        Some(path) => read_config_file(&path)?,
        None => Overrides::default(),
    };
    let cfg = RunConfig::resolve(command, base.overridden_by(flags))?;
    let paths = match command {
        Command::SampleWigner => vec![commands::sample_wigner(&cfg)?],
        Command::SampleMono => vec![commands::sample_mono(&cfg)?],
        Command::Strip => vec![commands::strip(&cfg)?],
        Command::Predict => vec![commands::predict(&cfg)?],
        Command::Verify => vec![commands::verify(&cfg)?],
        Command::Figures => commands::figures(&cfg)?,
    };
    for p in paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

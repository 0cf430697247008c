//! `canosc`: spectral computations for canonical systems from TOML configs.
//!
//! Exit codes: 0 success, 1 usage or computation failure, 2 invalid input,
//! 3 inconclusive result under `--strict`.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Invalid;

#[derive(Debug, Parser)]
#[command(name = "canosc", version, about = "Oscillation theory for 2x2 canonical systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Write plot-ready columns to this file.
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Read every angle (config files and angle flags) in degrees.
    #[arg(long, global = true)]
    pub degrees: bool,
    /// Exit with code 3 when a result is inconclusive.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Run sweeps on the calling thread only.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct System {
    /// System configuration (TOML).
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct Boundary {
    /// Truncation point; defaults to the end of the data.
    #[arg(long = "L", value_name = "L")]
    pub l: Option<f64>,
    /// Boundary angle at L; defaults to the tail angle plus pi/2.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Spectral window [s, t).
    #[arg(long, num_args = 2, value_names = ["S", "T"], allow_negative_numbers = true, required = true)]
    pub window: Vec<f64>,
    /// Integration tolerance; defaults to the config value.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a system configuration.
    Validate(System),
    /// Prüfer angle trajectory theta(x; t). CSV: x,theta.
    Theta {
        #[command(flatten)]
        system: System,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta0: f64,
        #[arg(long = "L", value_name = "L")]
        l: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Count eigenvalues in a window; `--halfline` counts for the half-line
    /// problem along a truncation schedule. CSV (half-line): L,F.
    Count {
        #[command(flatten)]
        system: System,
        #[command(flatten)]
        boundary: Boundary,
        #[arg(long)]
        halfline: bool,
        /// Truncation lengths for `--halfline`; defaults to eight even steps.
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<f64>>,
        #[arg(long, default_value_t = 10.0)]
        threshold: f64,
    },
    /// Locate eigenvalues in a window. CSV: index,lambda.
    Locate {
        #[command(flatten)]
        system: System,
        #[command(flatten)]
        boundary: Boundary,
    },
    /// Semiboundedness from the angle profile. CSV: x,phi.
    Classify(System),
    /// Whole-line semiboundedness from left and right half-line configs.
    Wholeline {
        #[arg(long, value_name = "PATH")]
        left: PathBuf,
        #[arg(long, value_name = "PATH")]
        right: PathBuf,
    },
    /// Bounds on the bottom of the essential spectrum. CSV: x,phi.
    EssBounds {
        #[command(flatten)]
        system: System,
        #[arg(long, default_value_t = 0.5)]
        tail_fraction: f64,
    },
    /// Limits of the m-function at -infinity and 0-. CSV: x,phi.
    MEndpoints {
        #[command(flatten)]
        system: System,
        /// Also evaluate m at these negative spectral parameters.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        at: Option<Vec<f64>>,
    },
    /// Whether 0 is an eigenvalue. CSV: x,phi.
    ZeroEig {
        #[command(flatten)]
        system: System,
        /// fitted, flat or power.
        #[arg(long, default_value = "fitted")]
        tail: String,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Diagonal system H1(T) = diag(h, 1 - h). CSV: T,h.
    ToDiagonal {
        #[command(flatten)]
        system: System,
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
        #[arg(long, default_value_t = 64)]
        cells_per_ramp: usize,
    },
    /// Exponential type of the transfer matrix. CSV: r,log_norm (with --fit).
    Type {
        #[command(flatten)]
        system: System,
        /// Compare with growth along the imaginary axis on [R_MIN, R_MAX].
        #[arg(long, num_args = 2, value_names = ["R_MIN", "R_MAX"])]
        fit: Option<Vec<f64>>,
    },
    /// Order of growth of the transfer matrix. CSV: r,log_max.
    Order {
        #[command(flatten)]
        system: System,
        #[arg(long = "L", value_name = "L")]
        l: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        r_min: f64,
        #[arg(long, default_value_t = 1e6)]
        r_max: f64,
        #[arg(long, default_value_t = 16)]
        radii: usize,
        #[arg(long, default_value_t = 16)]
        phases: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Canonical system of a Schrödinger operator. CSV: x,X,phi.
    SchrodingerImport {
        /// Two-column potential file `x V(x)`.
        #[arg(long, value_name = "PATH")]
        potential: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        e0: f64,
        /// Also write the imported system as a config file.
        #[arg(long, value_name = "PATH")]
        emit_config: Option<PathBuf>,
    },
    /// Molchanov-type criteria. CSV: x,G (or x and one column per window).
    Molchanov {
        #[arg(long, value_name = "PATH")]
        potential: PathBuf,
        #[arg(long, allow_negative_numbers = true, default_value_t = -1.0)]
        e0: f64,
        /// Geometric evaluation grid A B N.
        #[arg(long, num_args = 3, value_names = ["A", "B", "N"])]
        grid: Vec<f64>,
        /// Classic window integrals with these window lengths.
        #[arg(long, value_delimiter = ',')]
        classic: Option<Vec<f64>>,
    },
    /// Hadamard products A and C with zeros n^alpha. CSV: R,integral (with --h2).
    Hadamard {
        #[arg(long)]
        alpha: f64,
        #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
        z: Vec<f64>,
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Membership integral over [-R, R].
        #[arg(long, value_name = "R")]
        h2: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(doc) => {
            print!("{}", doc.document.render());
            if doc.inconclusive && cli.global.strict {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Invalid>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

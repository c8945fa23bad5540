//! `flaglet` command-line tool.
//!
//! Every command prints one JSON summary line on stdout. Exit status is 0 on
//! success, 2 for bad arguments, 3 for malformed input files and 4 when a
//! numerical check fails.

mod commands;
mod dump;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flaglet::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "flaglet", version, about = "Exact wavelets on the ball")]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Binary,
    Json,
}

/// `L`, `P` and the radial scale, given directly or through the ball radius.
#[derive(Args, Clone, Debug)]
pub struct BandArgs {
    #[arg(long = "L")]
    pub l: usize,
    #[arg(long = "P")]
    pub p: usize,
    /// Laguerre scale factor.
    #[arg(long, conflicts_with = "radius")]
    pub tau: Option<f64>,
    /// Ball radius; sets tau so the outermost radial node lands on it.
    #[arg(long = "R")]
    pub radius: Option<f64>,
}

#[derive(Args, Clone, Debug)]
pub struct FamilyArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub nu: f64,
    #[arg(long)]
    pub j0: usize,
    #[arg(long)]
    pub j0p: usize,
}

#[derive(Subcommand)]
pub enum Command {
    /// Ball samples (FLAG01) to Fourier-Laguerre coefficients.
    Transform {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "binary")]
        format: Format,
    },
    /// Fourier-Laguerre coefficients to ball samples.
    Inverse {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Samples to compare the result against; the residual is reported.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Flaglet analysis of a coefficient file into a directory.
    Wavelets {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Flaglet synthesis of a coefficient directory.
    Synthesize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "binary")]
        format: Format,
    },
    /// Builds the harmonic windows and reports the admissibility residual.
    Admissibility {
        #[arg(long = "L")]
        l: usize,
        #[arg(long = "P")]
        p: usize,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        /// Writes the windows as FLAG01.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exact Fourier-Bessel coefficients on a log-spaced wavenumber grid.
    Bessel {
        #[arg(long)]
        input: PathBuf,
        /// Output stem; writes `<stem>.json` and `<stem>.flag`.
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        kmin: f64,
        #[arg(long)]
        kmax: f64,
        #[arg(long)]
        nk: usize,
    },
    /// Uniform mock catalog with planted voids.
    Mock {
        #[arg(long)]
        n: usize,
        #[arg(long = "R")]
        radius: f64,
        #[arg(long)]
        seed: u64,
        /// `r,theta,phi,radius,depth`; repeatable.
        #[arg(long = "void", value_parser = commands::parse_void)]
        voids: Vec<flaglet::voidfinder::PlantedVoid>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Void search on a CSV catalog.
    Voids {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        band: BandArgs,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        threshold: f64,
        /// Recorded in the report, e.g. the seed of the mock searched.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Grayscale PNG of a shell or meridian plane.
    Render {
        /// Ball samples to draw; otherwise a flaglet is rendered.
        #[arg(long, conflicts_with_all = ["l", "p", "tau", "radius", "lambda", "nu", "j0", "j0p"])]
        input: Option<PathBuf>,
        #[arg(long = "L")]
        l: Option<usize>,
        #[arg(long = "P")]
        p: Option<usize>,
        #[arg(long, conflicts_with = "radius")]
        tau: Option<f64>,
        #[arg(long = "R")]
        radius: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long)]
        j0: Option<usize>,
        #[arg(long)]
        j0p: Option<usize>,
        #[arg(long)]
        j: Option<usize>,
        #[arg(long)]
        jp: Option<usize>,
        /// Render the scaling function instead of a flaglet.
        #[arg(long)]
        scaling: bool,
        /// Radial translation of the rendered flaglet.
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        /// Radial shell index to draw.
        #[arg(long, conflicts_with = "meridian")]
        shell: Option<usize>,
        /// Azimuth of the meridian plane to draw.
        #[arg(long)]
        meridian: Option<f64>,
        /// Pixels per side of a meridian image.
        #[arg(long, default_value_t = 256)]
        size: usize,
        #[arg(long)]
        output: PathBuf,
    },
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Input(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
            Failure::Numerical(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Format(_) | Error::Json(_) | Error::Csv(_) => Failure::Input(msg),
            Error::Io(ref io) if io.kind() == std::io::ErrorKind::NotFound => Failure::Usage(msg),
            Error::Io(_) => Failure::Input(msg),
            Error::Admissibility { .. } | Error::NoConvergence { .. } | Error::NegativeRadicand(_) => {
                Failure::Numerical(msg)
            }
            Error::InvalidParameter(_) | Error::ShapeMismatch { .. } | Error::FamilyMismatch(_) => Failure::Usage(msg),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<Error>() {
            Ok(inner) => inner.into(),
            Err(e) => Failure::Input(format!("{e:#}")),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

//! `nakags`: batch preprocessing for low-light Gaussian-Splatting pipelines.
//!
//! Subcommands compose the library stages: `enhance`, `correct`,
//! `fit-correction`, and `metrics` cover the photometric side; `align`,
//! `pool`, `prune`, and `pipeline` cover the geometric side. Machine-readable
//! JSON goes to stdout, diagnostics to stderr. Exit codes: 0 success,
//! 1 output failure, 2 bad input or flags, 3 degenerate alignment.

mod error;
mod photo;
mod geo;

use clap::{Parser, Subcommand};

use error::CliError;

#[derive(Parser)]
#[command(
    name = "nakags",
    version,
    about = "Low-light enhancement and point-cloud preprocessing for Gaussian-Splatting pipelines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply Naka-Rushton enhancement to a PNG file or a directory of PNGs
    Enhance(photo::EnhanceArgs),
    /// Apply a fitted correction-map raster to an enhanced image
    Correct(photo::CorrectArgs),
    /// Fit correction maps against a ground-truth image
    FitCorrection(photo::FitCorrectionArgs),
    /// Report the loss terms plus PSNR/SSIM between two images as JSON
    Metrics(photo::MetricsArgs),
    /// Align a point cloud onto target camera centers
    Align(geo::AlignArgs),
    /// Voxel-pool a point cloud
    Pool(geo::PoolArgs),
    /// Progressively prune a point cloud
    Prune(geo::PruneArgs),
    /// Run align -> pool -> prune from a config file
    Pipeline(geo::PipelineArgs),
}

fn main() {
    if let Err(e) = configure_threads() {
        eprintln!("nakags: {}", e.message);
        std::process::exit(e.code);
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Enhance(args) => photo::enhance(args),
        Command::Correct(args) => photo::correct(args),
        Command::FitCorrection(args) => photo::fit_correction(args),
        Command::Metrics(args) => photo::metrics(args),
        Command::Align(args) => geo::align(args),
        Command::Pool(args) => geo::pool(args),
        Command::Prune(args) => geo::prune(args),
        Command::Pipeline(args) => geo::pipeline(args),
    };
    if let Err(e) = result {
        eprintln!("nakags: {}", e.message);
        std::process::exit(e.code);
    }
}

/// NAKAGS_THREADS caps the worker count for batch fan-out (0 = auto).
fn configure_threads() -> Result<(), CliError> {
    match std::env::var("NAKAGS_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw
                .parse()
                .map_err(|_| CliError::usage(format!("NAKAGS_THREADS must be an integer, got `{raw}`")))?;
            if n == 0 {
                return Ok(());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::usage(format!("thread pool: {e}")))
        }
    }
}

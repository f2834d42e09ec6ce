//! Photometric subcommands: enhance, correct, fit-correction, metrics.

use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;

use nakags_core::chroma::{self, FitConfig};
use nakags_core::image::{psnr, ssim, BlurParams};
use nakags_core::io::{read_maps, read_png, write_maps, write_png, PngDepth};
use nakags_core::naka::{naka_transform, NakaParams};
use nakags_core::objective::{compound_loss, LossReport, LossWeights};

use crate::error::{input_err, output_err, CliError};

#[derive(Args)]
pub struct EnhanceArgs {
    /// Input PNG file or directory of PNGs
    #[arg(long)]
    input: PathBuf,
    /// Output directory (created if missing)
    #[arg(long)]
    output: PathBuf,
    /// Half-saturation intensity of the response curve
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    /// Curve steepness exponent
    #[arg(long, default_value_t = 1.0)]
    exponent: f64,
    /// Gaussian sigma used by the frequency-decoupled correction stages;
    /// accepted here so one flag set drives the whole pipeline
    #[arg(long, default_value_t = 2.0)]
    blur_sigma: f64,
    /// Output bit depth (8 or 16)
    #[arg(long, default_value = "16")]
    depth: String,
}

pub fn enhance(args: EnhanceArgs) -> Result<(), CliError> {
    let params = NakaParams::new(args.sigma, args.exponent).map_err(input_err)?;
    BlurParams::new(args.blur_sigma).map_err(input_err)?;
    let depth: PngDepth = args.depth.parse().map_err(input_err)?;

    let files = collect_inputs(&args.input)?;
    std::fs::create_dir_all(&args.output).map_err(output_err)?;

    let results: Vec<Result<(), CliError>> = files
        .par_iter()
        .map(|path| {
            let img = read_png(path).map_err(input_err)?;
            let enhanced = naka_transform(&img, &params).map_err(input_err)?;
            let name = path
                .file_name()
                .ok_or_else(|| CliError::usage(format!("{} has no file name", path.display())))?;
            write_png(&enhanced, args.output.join(name), depth).map_err(output_err)?;
            Ok(())
        })
        .collect();
    // report the first failure in input order; reads outrank writes so a
    // missing input is diagnosed as such
    for r in results {
        r?;
    }
    Ok(())
}

fn collect_inputs(input: &Path) -> Result<Vec<PathBuf>, CliError> {
    let meta = std::fs::metadata(input).map_err(|e| {
        CliError::usage(format!("cannot read {}: {e}", input.display()))
    })?;
    if meta.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(input)
        .map_err(input_err)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("png"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::usage(format!(
            "no PNG files in {}",
            input.display()
        )));
    }
    Ok(files)
}

#[derive(Args)]
pub struct CorrectArgs {
    /// Naka-enhanced input image
    #[arg(long)]
    naka: PathBuf,
    /// Correction-map raster produced by fit-correction
    #[arg(long)]
    maps: PathBuf,
    /// Output PNG path
    #[arg(long)]
    output: PathBuf,
    /// Gaussian sigma of the frequency decomposition
    #[arg(long, default_value_t = 2.0)]
    blur_sigma: f64,
    /// Output bit depth (8 or 16)
    #[arg(long, default_value = "16")]
    depth: String,
}

pub fn correct(args: CorrectArgs) -> Result<(), CliError> {
    let blur = BlurParams::new(args.blur_sigma).map_err(input_err)?;
    let depth: PngDepth = args.depth.parse().map_err(input_err)?;
    let naka = read_png(&args.naka).map_err(input_err)?;
    let maps = read_maps(&args.maps).map_err(input_err)?;
    let corrected = chroma::apply_correction(&naka, &maps, &blur).map_err(input_err)?;
    write_png(&corrected, &args.output, depth).map_err(output_err)
}

#[derive(Args)]
pub struct FitCorrectionArgs {
    /// Low-light input image
    #[arg(long)]
    low: PathBuf,
    /// Naka-enhanced image to correct
    #[arg(long)]
    naka: PathBuf,
    /// Ground-truth image
    #[arg(long)]
    gt: PathBuf,
    /// Destination for the fitted correction-map raster
    #[arg(long)]
    maps_out: PathBuf,
    /// Coarse grid resolution, `WxH` or a single square size
    #[arg(long, default_value = "16x16")]
    grid: String,
    /// Number of descent iterations
    #[arg(long, default_value_t = 200)]
    iters: usize,
    /// Initial probe step size
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    /// Probe-direction seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Gaussian sigma of the frequency decomposition
    #[arg(long, default_value_t = 2.0)]
    blur_sigma: f64,
    /// Optional directory for viewable map previews (mul.png, add.png)
    #[arg(long)]
    preview_dir: Option<PathBuf>,
}

pub fn fit_correction(args: FitCorrectionArgs) -> Result<(), CliError> {
    let (grid_w, grid_h) = parse_grid(&args.grid)?;
    let cfg = FitConfig {
        grid_w,
        grid_h,
        iterations: args.iters,
        step_size: args.step,
        seed: args.seed,
    };
    let blur = BlurParams::new(args.blur_sigma).map_err(input_err)?;
    let weights = LossWeights::default();

    let low = read_png(&args.low).map_err(input_err)?;
    let naka = read_png(&args.naka).map_err(input_err)?;
    let gt = read_png(&args.gt).map_err(input_err)?;

    let (maps, trace) =
        chroma::fit_correction(&low, &naka, &gt, &blur, &cfg, &weights).map_err(input_err)?;
    write_maps(&maps, &args.maps_out).map_err(output_err)?;
    if let Some(dir) = &args.preview_dir {
        std::fs::create_dir_all(dir).map_err(output_err)?;
        write_png(&maps.preview_mul(), dir.join("mul.png"), PngDepth::Eight)
            .map_err(output_err)?;
        write_png(&maps.preview_add(), dir.join("add.png"), PngDepth::Eight)
            .map_err(output_err)?;
    }

    let corrected = chroma::apply_correction(&naka, &maps, &blur).map_err(input_err)?;
    let report = compound_loss(&corrected, &gt, &maps, &weights).map_err(input_err)?;
    eprintln!(
        "fit: {} iterations, loss {:.6} -> {:.6}",
        args.iters,
        trace.first().unwrap(),
        trace.last().unwrap()
    );
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    Ok(())
}

fn parse_grid(s: &str) -> Result<(usize, usize), CliError> {
    let parse = |t: &str| {
        t.parse::<usize>()
            .map_err(|_| CliError::usage(format!("bad grid size `{s}`")))
    };
    match s.split_once(['x', 'X']) {
        Some((w, h)) => Ok((parse(w)?, parse(h)?)),
        None => {
            let n = parse(s)?;
            Ok((n, n))
        }
    }
}

#[derive(Args)]
pub struct MetricsArgs {
    /// Image under evaluation
    #[arg(long)]
    pred: PathBuf,
    /// Reference image
    #[arg(long)]
    gt: PathBuf,
    /// Optional correction-map raster for the regularization term;
    /// identity maps are assumed when omitted
    #[arg(long)]
    maps: Option<PathBuf>,
}

pub fn metrics(args: MetricsArgs) -> Result<(), CliError> {
    let pred = read_png(&args.pred).map_err(input_err)?;
    let gt = read_png(&args.gt).map_err(input_err)?;
    let maps = match &args.maps {
        Some(path) => read_maps(path).map_err(input_err)?,
        None => chroma::identity_maps(pred.width(), pred.height()).map_err(input_err)?,
    };
    let weights = LossWeights::default();
    let report = compound_loss(&pred, &gt, &maps, &weights).map_err(input_err)?;
    let quality = (
        psnr(&pred, &gt).map_err(input_err)?,
        ssim(&pred, &gt).map_err(input_err)?,
    );
    println!("{}", report_json(&report, Some(quality)));
    Ok(())
}

/// Fixed-key JSON for reports; non-finite values (the equal-image PSNR
/// sentinel) serialize as null.
fn report_json(report: &LossReport, quality: Option<(f64, f64)>) -> String {
    let finite = |v: f64| {
        if v.is_finite() {
            serde_json::json!(v)
        } else {
            serde_json::Value::Null
        }
    };
    let mut obj = serde_json::json!({
        "rgb": report.rgb,
        "chroma": report.chroma,
        "ssim_loss": report.ssim,
        "edge": report.edge,
        "reg": report.reg,
        "mse": report.mse,
        "gray": report.gray,
        "bright": report.bright,
        "total": report.total,
    });
    if let Some((psnr_db, ssim_val)) = quality {
        obj["psnr_db"] = finite(psnr_db);
        obj["ssim"] = finite(ssim_val);
    }
    serde_json::to_string_pretty(&obj).expect("report serializes")
}

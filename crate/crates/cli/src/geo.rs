//! Geometric subcommands: align, pool, prune, pipeline.

use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;

use nakags_core::io::{read_cameras, read_config, read_ply, write_ply, PlyFormat};
use nakags_core::ppm::{
    apply_transform, estimate_alignment, progressive_prune, run_ppm, voxel_pool, AlignMode,
    PruneConfig, PruneReport,
};

use crate::error::{align_err, input_err, output_err, CliError};

#[derive(Args)]
pub struct AlignArgs {
    /// Input point cloud
    #[arg(long)]
    ply: PathBuf,
    /// Source camera centers (the cloud's frame); required unless mode is none
    #[arg(long)]
    src_cams: Option<PathBuf>,
    /// Target camera centers (the training frame); required unless mode is none
    #[arg(long)]
    dst_cams: Option<PathBuf>,
    /// Alignment mode: sim3, rigid, or none
    #[arg(long, default_value = "sim3")]
    mode: String,
    /// Output point cloud
    #[arg(long)]
    output: PathBuf,
    /// Output encoding: ascii or binary
    #[arg(long, default_value = "binary")]
    format: String,
}

pub fn align(args: AlignArgs) -> Result<(), CliError> {
    let mode = AlignMode::from_str(&args.mode).map_err(input_err)?;
    let format = PlyFormat::from_str(&args.format).map_err(input_err)?;
    let cloud = read_ply(&args.ply).map_err(input_err)?;
    let transform = match mode {
        AlignMode::None => nakags_core::ppm::Transform::identity(),
        _ => {
            let (src_path, dst_path) = match (&args.src_cams, &args.dst_cams) {
                (Some(s), Some(d)) => (s, d),
                _ => {
                    return Err(CliError::usage(format!(
                        "mode `{mode}` requires --src-cams and --dst-cams"
                    )))
                }
            };
            let src = read_cameras(src_path).map_err(input_err)?;
            let dst = read_cameras(dst_path).map_err(input_err)?;
            estimate_alignment(&src, &dst, mode).map_err(align_err)?
        }
    };
    let aligned = apply_transform(&cloud, &transform);
    write_ply(&aligned, &args.output, format).map_err(output_err)
}

#[derive(Args)]
pub struct PoolArgs {
    /// Input point cloud
    #[arg(long)]
    ply: PathBuf,
    /// Voxel edge length in world units
    #[arg(long, default_value_t = 0.01)]
    voxel: f64,
    /// Output point cloud
    #[arg(long)]
    output: PathBuf,
    /// Output encoding: ascii or binary
    #[arg(long, default_value = "binary")]
    format: String,
}

pub fn pool(args: PoolArgs) -> Result<(), CliError> {
    let format = PlyFormat::from_str(&args.format).map_err(input_err)?;
    let cloud = read_ply(&args.ply).map_err(input_err)?;
    let pooled = voxel_pool(&cloud, args.voxel).map_err(input_err)?;
    write_ply(&pooled, &args.output, format).map_err(output_err)
}

#[derive(Args)]
pub struct PruneArgs {
    /// Input point cloud (typically already pooled)
    #[arg(long)]
    ply: PathBuf,
    /// Output point cloud
    #[arg(long)]
    output: PathBuf,
    /// Initial pruning threshold in world units
    #[arg(long, default_value_t = 0.005)]
    tau0: f64,
    /// Threshold update rate
    #[arg(long, default_value_t = 0.01)]
    beta: f64,
    /// Keep-probability denominator guard
    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,
    /// Number of pruning iterations
    #[arg(long, default_value_t = 6)]
    iters: usize,
    /// Deterministic draw seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Retention floor as a fraction of the input count
    #[arg(long, default_value_t = 0.3)]
    min_keep: f64,
    /// Reuse the input cloud's nearest-neighbor distances instead of
    /// recomputing them each iteration
    #[arg(long)]
    no_recompute_nn: bool,
    /// Report destination: a path, or `-` for stdout (default stdout)
    #[arg(long, default_value = "-")]
    report: String,
    /// Output encoding: ascii or binary
    #[arg(long, default_value = "binary")]
    format: String,
}

pub fn prune(args: PruneArgs) -> Result<(), CliError> {
    let format = PlyFormat::from_str(&args.format).map_err(input_err)?;
    let cfg = PruneConfig {
        tau0: args.tau0,
        beta: args.beta,
        epsilon: args.epsilon,
        iterations: args.iters,
        min_keep_fraction: args.min_keep,
        seed: args.seed,
        recompute_nn: !args.no_recompute_nn,
        ..PruneConfig::default()
    };
    cfg.validate().map_err(input_err)?;
    let cloud = read_ply(&args.ply).map_err(input_err)?;
    let (pruned, report) = progressive_prune(&cloud, &cfg).map_err(input_err)?;
    write_ply(&pruned, &args.output, format).map_err(output_err)?;
    emit_report(&report, &args.report)
}

#[derive(Args)]
pub struct PipelineArgs {
    /// Pipeline configuration JSON
    #[arg(long)]
    config: PathBuf,
    /// Override the config's output path
    #[arg(long)]
    output: Option<PathBuf>,
    /// Override the config's report destination (`-` for stdout)
    #[arg(long)]
    report: Option<String>,
    /// Override the config's pruning seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output encoding: ascii or binary
    #[arg(long, default_value = "binary")]
    format: String,
}

pub fn pipeline(args: PipelineArgs) -> Result<(), CliError> {
    let format = PlyFormat::from_str(&args.format).map_err(input_err)?;
    let config = read_config(&args.config).map_err(input_err)?;
    let mode = config.align_mode().map_err(input_err)?;
    let mut prune_cfg = config.prune_config().map_err(input_err)?;
    // flag > config file > built-in default
    if let Some(seed) = args.seed {
        prune_cfg.seed = seed;
    }

    let input = config
        .paths
        .input
        .as_ref()
        .ok_or_else(|| CliError::usage("config is missing paths.input"))?;
    let output = args
        .output
        .clone()
        .or_else(|| config.paths.output.as_ref().map(PathBuf::from))
        .ok_or_else(|| CliError::usage("config is missing paths.output"))?;
    let report_dest = args
        .report
        .clone()
        .or_else(|| config.paths.report.clone())
        .unwrap_or_else(|| "-".to_string());

    let cloud = read_ply(input).map_err(input_err)?;
    let cams = match mode {
        AlignMode::None => None,
        _ => {
            let src_path = config
                .paths
                .src_cameras
                .as_ref()
                .ok_or_else(|| CliError::usage("config is missing paths.src_cameras"))?;
            let dst_path = config
                .paths
                .dst_cameras
                .as_ref()
                .ok_or_else(|| CliError::usage("config is missing paths.dst_cameras"))?;
            Some((
                read_cameras(src_path).map_err(input_err)?,
                read_cameras(dst_path).map_err(input_err)?,
            ))
        }
    };
    let (pruned, report) = run_ppm(
        &cloud,
        cams.as_ref().map(|(s, _)| s),
        cams.as_ref().map(|(_, d)| d),
        mode,
        &prune_cfg,
    )
    .map_err(align_err)?;

    write_ply(&pruned, &output, format).map_err(output_err)?;
    emit_report(&report, &report_dest)
}

fn emit_report(report: &PruneReport, dest: &str) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    if dest == "-" {
        println!("{json}");
        Ok(())
    } else {
        std::fs::write(dest, json).map_err(output_err)
    }
}

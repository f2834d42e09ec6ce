//! Cross-module integration: the photometric chain end to end, and the
//! geometric chain against a synthesize-then-verify oracle.

use nakags_core::chroma::{apply_correction, fit_correction, identity_maps, FitConfig};
use nakags_core::image::{psnr, BlurParams, ImageBuffer};
use nakags_core::io;
use nakags_core::naka::{naka_transform, NakaParams};
use nakags_core::objective::{compound_loss, LossWeights};
use nakags_core::ppm::{
    apply_transform, estimate_alignment, progressive_prune, run_ppm, voxel_pool, AlignMode,
    CameraSet, PointCloud, PruneConfig, Transform,
};
use nakags_core::rng::SplitMix64;

/// Smooth synthetic ground truth: blurred random field stretched to [0, 1].
fn synthetic_gt(w: usize, h: usize, seed: u64) -> ImageBuffer {
    let mut rng = SplitMix64::new(seed);
    let noise = ImageBuffer::new(w, h, 3, (0..w * h * 3).map(|_| rng.next_f64()).collect()).unwrap();
    let smooth = nakags_core::image::gaussian_blur(&noise, &BlurParams::new(3.0).unwrap()).unwrap();
    let (lo, hi) = (smooth.min(), smooth.max());
    smooth.map(|v| (v - lo) / (hi - lo)).unwrap()
}

/// Low-light degradation: linearize with gamma 2.2, then gain 0.1.
fn darken(gt: &ImageBuffer) -> ImageBuffer {
    gt.map(|v| 0.1 * v.powf(2.2)).unwrap()
}

#[test]
fn enhancement_chain_recovers_signal() {
    let gt = synthetic_gt(48, 48, 11);
    let low = darken(&gt);
    let naka = naka_transform(&low, &NakaParams::default()).unwrap();
    let blur = BlurParams::default();

    let psnr_low = psnr(&low, &gt).unwrap();
    let psnr_naka = psnr(&naka, &gt).unwrap();
    assert!(
        psnr_naka > psnr_low + 3.0,
        "naka {psnr_naka:.2} dB vs low {psnr_low:.2} dB"
    );

    let cfg = FitConfig {
        grid_w: 8,
        grid_h: 8,
        iterations: 120,
        seed: 5,
        ..FitConfig::default()
    };
    let weights = LossWeights::default();
    let (maps, trace) = fit_correction(&low, &naka, &gt, &blur, &cfg, &weights).unwrap();
    assert!(trace.windows(2).all(|w| w[1] <= w[0]));

    let corrected = apply_correction(&naka, &maps, &blur).unwrap();
    let psnr_corrected = psnr(&corrected, &gt).unwrap();
    assert!(
        psnr_corrected > psnr_naka,
        "fit did not improve: {psnr_corrected:.2} vs {psnr_naka:.2}"
    );

    // the reported loss of the fitted maps matches an independent evaluation
    let report = compound_loss(&corrected, &gt, &maps, &weights).unwrap();
    assert!((report.total - trace.last().unwrap()).abs() < 1e-12);
}

#[test]
fn identity_maps_round_trip_through_raster_format() {
    let dir = tempfile::tempdir().unwrap();
    let maps = identity_maps(32, 24).unwrap();
    let path = dir.path().join("maps.bin");
    io::write_maps(&maps, &path).unwrap();
    let back = io::read_maps(&path).unwrap();
    assert_eq!(back.mul().data(), maps.mul().data());
    assert_eq!(back.add().data(), maps.add().data());
}

fn synthetic_scene(n: usize, seed: u64) -> PointCloud {
    let mut rng = SplitMix64::new(seed);
    let positions = (0..n)
        .map(|_| {
            [
                rng.next_f64() * 2.0 - 1.0,
                rng.next_f64() * 2.0 - 1.0,
                rng.next_f64() * 2.0 - 1.0,
            ]
        })
        .collect();
    PointCloud::from_positions(positions).unwrap()
}

fn scene_cameras(seed: u64) -> CameraSet {
    let mut rng = SplitMix64::new(seed);
    let centers: Vec<[f64; 3]> = (0..5)
        .map(|_| {
            [
                rng.next_f64() * 2.0 - 1.0,
                rng.next_f64() * 2.0 - 1.0,
                rng.next_f64() * 2.0 - 1.0,
            ]
        })
        .collect();
    CameraSet::new((0..5).map(|i| format!("cam{i}")).collect(), centers).unwrap()
}

fn known_sim3() -> Transform {
    // 90 degrees about z, doubled scale, unit x translation
    Transform {
        scale: 2.0,
        rotation: [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
        translation: [1.0, 0.0, 0.0],
    }
}

#[test]
fn run_ppm_places_cloud_in_target_frame() {
    let cloud = synthetic_scene(200, 21);
    let src_cams = scene_cameras(22);
    let truth = known_sim3();
    let dst_cams = CameraSet::new(
        src_cams.ids().to_vec(),
        src_cams
            .centers()
            .iter()
            .map(|&c| truth.apply_point(c))
            .collect(),
    )
    .unwrap();

    let cfg = PruneConfig {
        seed: 42,
        ..PruneConfig::default()
    };
    let (out, report) = run_ppm(&cloud, Some(&src_cams), Some(&dst_cams), AlignMode::Sim3, &cfg)
        .unwrap();

    // oracle: the same stages composed by hand with the recovered transform
    let recovered = estimate_alignment(&src_cams, &dst_cams, AlignMode::Sim3).unwrap();
    let aligned = apply_transform(&cloud, &recovered);
    let pooled = voxel_pool(&aligned, cfg.voxel_size).unwrap();
    let (expected, expected_report) = progressive_prune(&pooled, &cfg).unwrap();

    assert_eq!(report.initial_count, pooled.len());
    assert_eq!(report.final_count, expected_report.final_count);
    assert_eq!(out.positions(), expected.positions());

    // the output bounding box sits where the known transform puts the scene
    let truth_aligned = apply_transform(&cloud, &truth);
    let (lo_t, hi_t) = truth_aligned.bounding_box().unwrap();
    let (lo, hi) = out.bounding_box().unwrap();
    for a in 0..3 {
        assert!(lo[a] >= lo_t[a] - 1e-6 && hi[a] <= hi_t[a] + 1e-6);
    }
}

#[test]
fn prune_reports_serialize_with_pinned_keys() {
    let cloud = synthetic_scene(64, 31);
    let (_, report) = progressive_prune(&cloud, &PruneConfig::default()).unwrap();
    let json = serde_json::to_value(&report).unwrap();
    assert!(json.get("initial_count").is_some());
    assert!(json.get("final_count").is_some());
    let iterations = json.get("iterations").unwrap().as_array().unwrap();
    if let Some(first) = iterations.first() {
        for key in ["tau_applied", "points_before", "points_after", "rolled_back"] {
            assert!(first.get(key).is_some(), "missing {key}");
        }
    }
}

#[test]
fn ppm_composes_with_ply_io() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = synthetic_scene(128, 41);
    let input = dir.path().join("in.ply");
    io::write_ply(&cloud, &input, io::PlyFormat::BinaryLe).unwrap();
    let loaded = io::read_ply(&input).unwrap();

    let cfg = PruneConfig {
        voxel_size: 0.2,
        seed: 9,
        ..PruneConfig::default()
    };
    let (out, report) = run_ppm(&loaded, None, None, AlignMode::None, &cfg).unwrap();
    assert!(report.initial_count <= 128);
    assert_eq!(report.final_count, out.len());

    let output = dir.path().join("out.ply");
    io::write_ply(&out, &output, io::PlyFormat::BinaryLe).unwrap();
    let reread = io::read_ply(&output).unwrap();
    assert_eq!(reread.len(), out.len());
}

//! Similarity-transform estimation from camera centers (Umeyama) and
//! transform application.

use nalgebra::{Matrix3, Vector3};

use super::{AlignMode, CameraSet, PointCloud, Transform};
use crate::error::{Error, Result};

/// Relative singular-value threshold below which the centered covariance is
/// treated as rank-deficient.
const RANK_TOL: f64 = 1e-9;

/// Closed-form least-squares similarity aligning `src` camera centers onto
/// `dst`, minimizing `sum ||dst_i - (s R src_i + t)||^2`.
///
/// Correspondences are matched by camera id, so the two sets may list their
/// cameras in different orders. Rigid mode fixes the scale to 1; `none`
/// returns the identity without touching the centers.
pub fn estimate_alignment(src: &CameraSet, dst: &CameraSet, mode: AlignMode) -> Result<Transform> {
    if mode == AlignMode::None {
        return Ok(Transform::identity());
    }
    let pairs = match_by_id(src, dst)?;
    if pairs.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: pairs.len(),
        });
    }

    let n = pairs.len() as f64;
    let mut mu_s = Vector3::zeros();
    let mut mu_d = Vector3::zeros();
    for (s, d) in &pairs {
        mu_s += s;
        mu_d += d;
    }
    mu_s /= n;
    mu_d /= n;

    let mut cov = Matrix3::zeros();
    let mut var_s = 0.0;
    for (s, d) in &pairs {
        let cs = s - mu_s;
        let cd = d - mu_d;
        cov += cd * cs.transpose();
        var_s += cs.norm_squared();
    }
    cov /= n;
    var_s /= n;

    let svd = cov.svd(true, true);
    let sv = svd.singular_values;
    let max_sv = sv.max();
    let rank = sv.iter().filter(|&&v| v > RANK_TOL * max_sv).count();
    if max_sv == 0.0 || rank < 2 {
        return Err(Error::DegenerateGeometry(format!(
            "centered covariance rank {rank} < 2 (collinear or coincident centers)"
        )));
    }
    let u = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");

    let mut sign = Vector3::new(1.0, 1.0, 1.0);
    if (u * v_t).determinant() < 0.0 {
        sign[2] = -1.0;
    }
    let rotation = u * Matrix3::from_diagonal(&sign) * v_t;
    let scale = match mode {
        AlignMode::Sim3 => sv.dot(&sign) / var_s,
        _ => 1.0,
    };
    if scale.is_nan() || scale <= 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "estimated scale {scale} is not positive"
        )));
    }
    let translation = mu_d - scale * (rotation * mu_s);

    Ok(Transform {
        scale,
        rotation: [
            [rotation[(0, 0)], rotation[(0, 1)], rotation[(0, 2)]],
            [rotation[(1, 0)], rotation[(1, 1)], rotation[(1, 2)]],
            [rotation[(2, 0)], rotation[(2, 1)], rotation[(2, 2)]],
        ],
        translation: [translation[0], translation[1], translation[2]],
    })
}

fn match_by_id(src: &CameraSet, dst: &CameraSet) -> Result<Vec<(Vector3<f64>, Vector3<f64>)>> {
    if src.len() != dst.len() {
        return Err(Error::CameraIdMismatch(format!(
            "{} source cameras vs {} target cameras",
            src.len(),
            dst.len()
        )));
    }
    let dst_by_id: std::collections::HashMap<&str, [f64; 3]> = dst
        .ids()
        .iter()
        .map(String::as_str)
        .zip(dst.centers().iter().copied())
        .collect();
    src.ids()
        .iter()
        .zip(src.centers())
        .map(|(id, &s)| {
            let d = dst_by_id.get(id.as_str()).ok_or_else(|| {
                Error::CameraIdMismatch(format!("id `{id}` missing from target set"))
            })?;
            Ok((Vector3::from(s), Vector3::from(*d)))
        })
        .collect()
}

/// Map a cloud through a similarity: positions `p -> s R p + t`, normals
/// rotated without scaling, colors unchanged.
pub fn apply_transform(cloud: &PointCloud, t: &Transform) -> PointCloud {
    let positions = cloud
        .positions()
        .iter()
        .map(|&p| t.apply_point(p))
        .collect();
    let normals = cloud
        .normals()
        .map(|ns| ns.iter().map(|&n| t.rotate_vector(n)).collect());
    PointCloud::new(positions, cloud.colors().map(|c| c.to_vec()), normals)
        .expect("transform preserves validity")
}

/// Translate the centroid to the origin and scale so the largest
/// centroid-distance is 1. Returns the normalized cloud and the transform
/// that was applied.
pub fn normalize_scene(cloud: &PointCloud) -> Result<(PointCloud, Transform)> {
    if cloud.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let n = cloud.len() as f64;
    let mut centroid = [0.0; 3];
    for p in cloud.positions() {
        for a in 0..3 {
            centroid[a] += p[a];
        }
    }
    for c in &mut centroid {
        *c /= n;
    }
    let max_dist = cloud
        .positions()
        .iter()
        .map(|p| {
            let d = [p[0] - centroid[0], p[1] - centroid[1], p[2] - centroid[2]];
            (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
        })
        .fold(0.0f64, f64::max);
    if max_dist == 0.0 {
        return Err(Error::DegenerateGeometry(
            "all points coincident, scene scale undefined".into(),
        ));
    }
    let scale = 1.0 / max_dist;
    let transform = Transform {
        scale,
        rotation: Transform::identity().rotation,
        translation: [
            -centroid[0] * scale,
            -centroid[1] * scale,
            -centroid[2] * scale,
        ],
    };
    Ok((apply_transform(cloud, &transform), transform))
}

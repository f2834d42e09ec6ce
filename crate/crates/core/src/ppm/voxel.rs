//! Voxel-grid pooling: bin points into axis-aligned cubes and replace each
//! occupied voxel by one aggregate point.

use std::collections::BTreeMap;

use super::PointCloud;
use crate::error::{Error, Result};

#[derive(Default)]
struct VoxelAccumulator {
    count: usize,
    pos_sum: [f64; 3],
    col_sum: [f64; 3],
    nrm_sum: [f64; 3],
    first_normal: [f64; 3],
}

/// Pool a cloud on a grid of edge length `voxel_size`.
///
/// Each occupied voxel yields one point at the position centroid, with the
/// mean color and the renormalized mean normal of its members. Output order
/// is ascending lexicographic voxel index, so pooling is deterministic
/// regardless of input order.
pub fn voxel_pool(cloud: &PointCloud, voxel_size: f64) -> Result<PointCloud> {
    if voxel_size <= 0.0 || !voxel_size.is_finite() {
        return Err(Error::invalid(
            "voxel_size",
            format!("must be > 0, got {voxel_size}"),
        ));
    }
    if cloud.is_empty() {
        return Ok(cloud.clone());
    }

    // BTreeMap iteration gives the lexicographic output order directly
    let mut voxels: BTreeMap<(i64, i64, i64), VoxelAccumulator> = BTreeMap::new();
    for (i, p) in cloud.positions().iter().enumerate() {
        let key = (
            (p[0] / voxel_size).floor() as i64,
            (p[1] / voxel_size).floor() as i64,
            (p[2] / voxel_size).floor() as i64,
        );
        let acc = voxels.entry(key).or_default();
        if acc.count == 0 {
            if let Some(normals) = cloud.normals() {
                acc.first_normal = normals[i];
            }
        }
        acc.count += 1;
        for a in 0..3 {
            acc.pos_sum[a] += p[a];
            if let Some(colors) = cloud.colors() {
                acc.col_sum[a] += colors[i][a];
            }
            if let Some(normals) = cloud.normals() {
                acc.nrm_sum[a] += normals[i][a];
            }
        }
    }

    let mut positions = Vec::with_capacity(voxels.len());
    let mut colors = cloud.colors().map(|_| Vec::with_capacity(voxels.len()));
    let mut normals = cloud.normals().map(|_| Vec::with_capacity(voxels.len()));
    for acc in voxels.values() {
        let n = acc.count as f64;
        positions.push([
            acc.pos_sum[0] / n,
            acc.pos_sum[1] / n,
            acc.pos_sum[2] / n,
        ]);
        if let Some(colors) = &mut colors {
            colors.push([
                acc.col_sum[0] / n,
                acc.col_sum[1] / n,
                acc.col_sum[2] / n,
            ]);
        }
        if let Some(normals) = &mut normals {
            let m = [acc.nrm_sum[0] / n, acc.nrm_sum[1] / n, acc.nrm_sum[2] / n];
            let len = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
            // opposing normals can cancel; fall back to the first member
            if len < 1e-12 {
                normals.push(acc.first_normal);
            } else {
                normals.push([m[0] / len, m[1] / len, m[2] / len]);
            }
        }
    }
    PointCloud::new(positions, colors, normals)
}

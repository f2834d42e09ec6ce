//! Distance-adaptive progressive pruning with a retention floor and
//! rollback.

use super::{nearest_neighbor_distances, PointCloud, PruneConfig, PruneIteration, PruneReport};
use crate::error::{Error, Result};
use crate::rng::counter_uniform;

/// Keep probability `min(1, d_min / (tau + epsilon))`: points in over-dense
/// regions (small nearest-neighbor distance) are the most likely to go.
pub fn keep_probability(d_min: f64, tau: f64, epsilon: f64) -> Result<f64> {
    if d_min < 0.0 || !d_min.is_finite() {
        return Err(Error::invalid(
            "d_min",
            format!("must be >= 0, got {d_min}"),
        ));
    }
    if tau <= 0.0 || !tau.is_finite() {
        return Err(Error::invalid("tau", format!("must be > 0, got {tau}")));
    }
    if epsilon < 0.0 || !epsilon.is_finite() {
        return Err(Error::invalid(
            "epsilon",
            format!("must be >= 0, got {epsilon}"),
        ));
    }
    Ok((d_min / (tau + epsilon)).min(1.0))
}

/// Threshold schedule `tau * exp(beta * m_t / m_0)`.
pub fn threshold_update(tau: f64, beta: f64, m_t: usize, m_0: usize) -> Result<f64> {
    if m_0 == 0 {
        return Err(Error::invalid("m_0", "initial count must be >= 1"));
    }
    if m_t > m_0 {
        return Err(Error::invalid(
            "m_t",
            format!("remaining count {m_t} exceeds initial count {m_0}"),
        ));
    }
    Ok(tau * (beta * (m_t as f64 / m_0 as f64)).exp())
}

/// Run the progressive pruning schedule over a candidate cloud.
///
/// Each iteration draws an independent keep decision per surviving point
/// with probability [`keep_probability`]; the draw for point `k` at
/// iteration `t` is `counter_uniform(seed, k, t)`, addressed by the point's
/// index in the input cloud, so the outcome is independent of evaluation
/// order and thread count. After an iteration the threshold is advanced via
/// [`threshold_update`] with `M_0` fixed to the input count.
///
/// If an iteration would leave fewer than `ceil(min_keep_fraction * M_0)`
/// points, its removals are rolled back, the iteration is recorded with
/// `rolled_back`, and pruning halts. Clouds with fewer than two points pass
/// through unchanged.
pub fn progressive_prune(cloud: &PointCloud, cfg: &PruneConfig) -> Result<(PointCloud, PruneReport)> {
    cfg.validate()?;
    let m0 = cloud.len();
    let mut report = PruneReport {
        initial_count: m0,
        final_count: m0,
        iterations: Vec::new(),
    };
    if m0 < 2 {
        return Ok((cloud.clone(), report));
    }
    let min_keep = (cfg.min_keep_fraction * m0 as f64).ceil() as usize;
    let reused_distances = if cfg.recompute_nn {
        None
    } else {
        Some(nearest_neighbor_distances(cloud)?)
    };

    let mut alive: Vec<usize> = (0..m0).collect();
    let mut tau = cfg.tau0;
    for t in 0..cfg.iterations {
        if alive.len() < 2 {
            break;
        }
        let distances: Vec<f64> = match &reused_distances {
            Some(d) => alive.iter().map(|&i| d[i]).collect(),
            None => nearest_neighbor_distances(&cloud.select(&alive))?,
        };
        let before = alive.len();
        let mut kept = Vec::with_capacity(before);
        for (&index, &d_min) in alive.iter().zip(&distances) {
            let p = keep_probability(d_min, tau, cfg.epsilon)?;
            if counter_uniform(cfg.seed, index as u64, t as u64) < p {
                kept.push(index);
            }
        }
        if kept.len() < min_keep {
            report.iterations.push(PruneIteration {
                tau_applied: tau,
                points_before: before,
                points_after: before,
                rolled_back: true,
            });
            break;
        }
        report.iterations.push(PruneIteration {
            tau_applied: tau,
            points_before: before,
            points_after: kept.len(),
            rolled_back: false,
        });
        alive = kept;
        tau = threshold_update(tau, cfg.beta, alive.len(), m0)?;
    }
    report.final_count = alive.len();
    Ok((cloud.select(&alive), report))
}

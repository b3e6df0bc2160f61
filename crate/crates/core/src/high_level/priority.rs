use super::{PriorityWeights, ScoreBreakdown};
use crate::grid::OccupancySet;

/// Snapshot of one road's queue at the scheduling clock.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QueueStats {
    /// Waiting time of each queued vehicle, head first.
    pub waits: Vec<f64>,
    /// Average arrival rate of the road.
    pub arrival_rate: f64,
}

impl QueueStats {
    pub fn len(&self) -> usize {
        self.waits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waits.is_empty()
    }
}

/// Score terms for a candidate whose tentative allocation is `tentative`.
///
/// * `P_d = w_d * max j_t(tentative U A_pre) * dt`
/// * `P_w = w_w * sum_n wait_n / n` over the road queue
/// * `P_sta = w_sta * queue length * arrival rate`
pub fn priority(
    tentative: &OccupancySet,
    a_pre: &OccupancySet,
    queue: &QueueStats,
    w: &PriorityWeights,
) -> ScoreBreakdown {
    let dt = tentative.spec().dt;
    let horizon = tentative.max_jt().max(a_pre.max_jt()).unwrap_or(0);
    let waited: f64 = queue
        .waits
        .iter()
        .enumerate()
        .map(|(n, t)| t / (n + 1) as f64)
        .sum();
    ScoreBreakdown {
        p_d: w.omega_d * horizon as f64 * dt,
        p_w: w.omega_w * waited,
        p_sta: w.omega_sta * queue.len() as f64 * queue.arrival_rate,
    }
}

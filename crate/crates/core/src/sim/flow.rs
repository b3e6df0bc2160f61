use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{IntersectionConfig, Maneuver, MotionRequest, Road};

/// Maneuver fractions of a traffic flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowMix {
    pub left: f64,
    pub straight: f64,
    pub right: f64,
}

impl FlowMix {
    /// Half left-turners, a quarter each straight and right.
    pub fn flow1() -> Self {
        Self {
            left: 0.5,
            straight: 0.25,
            right: 0.25,
        }
    }

    /// Half straight, a quarter each left and right.
    pub fn flow2() -> Self {
        Self {
            left: 0.25,
            straight: 0.5,
            right: 0.25,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.left, self.straight, self.right];
        if parts.iter().any(|p| !(*p >= 0.0)) || (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "maneuver fractions must be >= 0 and sum to 1, got {parts:?}"
            )));
        }
        Ok(())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Maneuver {
        let u: f64 = rng.random();
        if u < self.left {
            Maneuver::TurnLeft
        } else if u < self.left + self.straight {
            Maneuver::GoStraight
        } else {
            Maneuver::TurnRight
        }
    }
}

/// `n` requests with uniformly chosen roads, maneuvers drawn from `mix`
/// and per-road Poisson arrivals at `rate`. Ids follow arrival order.
pub fn generate_flow(
    mix: &FlowMix,
    n: usize,
    rate: f64,
    cfg: &IntersectionConfig,
    seed: u64,
) -> Result<Vec<MotionRequest>> {
    mix.validate()?;
    let gap = Exp::new(rate).map_err(|e| Error::Config(format!("arrival rate: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clock = vec![0.0; cfg.roads];
    let mut drafts = Vec::with_capacity(n);
    for _ in 0..n {
        let road = rng.random_range(0..cfg.roads);
        let maneuver = mix.sample(&mut rng);
        clock[road] += gap.sample(&mut rng);
        drafts.push((clock[road], road + 1, maneuver));
    }
    drafts.sort_by(|a, b| a.0.total_cmp(&b.0));
    drafts
        .into_iter()
        .enumerate()
        .map(|(i, (t, road, m))| MotionRequest::new(i as u32 + 1, Road(road), m, t, cfg))
        .collect()
}

use serde::{Deserialize, Serialize};

use super::system::{posterior, Recommendation, RecommendationSystem};
use crate::error::{RecoError, Result};

/// The move from prior to Buy posterior, split into three belief shifts:
/// drop the bad product, raise the good one, then tilt the controversial odds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefDecomposition {
    pub prior: [f64; 4],
    pub step1: [f64; 4],
    pub step2: [f64; 4],
    pub posterior: [f64; 4],
    pub k: f64,
}

impl BeliefDecomposition {
    /// `step1 - prior`, `step2 - step1` and `posterior - step2`.
    pub fn step_deltas(&self) -> [[f64; 4]; 3] {
        let diff = |a: &[f64; 4], b: &[f64; 4]| std::array::from_fn(|s| a[s] - b[s]);
        [
            diff(&self.step1, &self.prior),
            diff(&self.step2, &self.step1),
            diff(&self.posterior, &self.step2),
        ]
    }
}

pub fn belief_decomposition(system: &RecommendationSystem) -> Result<BeliefDecomposition> {
    let q = system.quality().as_array();
    let [q_h, q1, q2, q_l] = q;
    if q1 + q2 <= 0.0 {
        return Err(RecoError::DecompositionUndefined("no controversial products (q1 + q2 = 0)"));
    }
    // q1 + q2 > 0 already rules out q_L = 1
    let p = posterior(system, Recommendation::Buy)?.probs;
    let m = 1.0 - q_l;
    let step1 = [q_h / m, q1 / m, q2 / m, 0.0];
    let k = (1.0 - p[0]) * m / (q1 + q2);
    let step2 = [p[0], k * q1 / m, k * q2 / m, 0.0];
    Ok(BeliefDecomposition { prior: q, step1, step2, posterior: p, k })
}

use serde::{Deserialize, Serialize};

use super::distribution::TypeDistribution;
use super::quality::{check_type, payoff_unchecked, QualityDistribution, Version, PROB_SUM_TOL};
use crate::error::{RecoError, Result};

/// Smallest admissible threshold.
pub const R_MIN: f64 = 1e-9;
/// Largest admissible threshold.
pub const R_MAX: f64 = 1.0 - 1e-9;
/// Stand-ins for the `R → 0` and `R → 1` limits.
pub const R_EXTREME_LOW: f64 = 1e-6;
pub const R_EXTREME_HIGH: f64 = 1.0 - 1e-6;

pub(crate) fn check_threshold(r: f64) -> Result<()> {
    if (R_MIN..=R_MAX).contains(&r) {
        Ok(())
    } else {
        Err(RecoError::ThresholdOutOfRange(r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Recommendation {
    Buy,
    DontBuy,
    Neutral,
    /// No recommendation observed; labels the prior.
    None,
}

/// Belief over product versions after observing a recommendation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Posterior {
    pub recommendation: Recommendation,
    pub probs: [f64; 4],
}

impl Posterior {
    pub fn prior(q: &QualityDistribution) -> Self {
        Self { recommendation: Recommendation::None, probs: q.as_array() }
    }

    pub fn prob(&self, v: Version) -> f64 {
        self.probs[v.index()]
    }

    pub fn p_high(&self) -> f64 {
        self.probs[0]
    }

    pub fn p_first(&self) -> f64 {
        self.probs[1]
    }

    pub fn p_second(&self) -> f64 {
        self.probs[2]
    }

    pub fn p_low(&self) -> f64 {
        self.probs[3]
    }

    pub fn is_probability_vector(&self) -> bool {
        self.probs.iter().all(|p| *p >= 0.0)
            && (self.probs.iter().sum::<f64>() - 1.0).abs() <= PROB_SUM_TOL
    }
}

/// Bayes' rule: normalizes `prior ⊙ likelihood`.
pub fn bayes_update(
    prior: &QualityDistribution,
    likelihood: [f64; 4],
    label: Recommendation,
) -> Result<Posterior> {
    let q = prior.as_array();
    let mut joint = [0.0; 4];
    for s in 0..4 {
        joint[s] = q[s] * likelihood[s];
    }
    let mass: f64 = joint.iter().sum();
    if !(mass > 0.0) {
        return Err(RecoError::UnreachableRecommendation(label));
    }
    Ok(Posterior { recommendation: label, probs: joint.map(|x| x / mass) })
}

/// A decision environment together with a single buy threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationSystem {
    quality: QualityDistribution,
    sender_types: TypeDistribution,
    receiver_types: TypeDistribution,
    threshold: f64,
}

impl RecommendationSystem {
    /// Senders and receivers drawn from the same population.
    pub fn new(quality: QualityDistribution, types: TypeDistribution, threshold: f64) -> Result<Self> {
        check_threshold(threshold)?;
        Ok(Self { quality, receiver_types: types.clone(), sender_types: types, threshold })
    }

    pub fn with_distinct_receivers(
        quality: QualityDistribution,
        sender_types: TypeDistribution,
        receiver_types: TypeDistribution,
        threshold: f64,
    ) -> Result<Self> {
        check_threshold(threshold)?;
        Ok(Self { quality, sender_types, receiver_types, threshold })
    }

    pub fn with_threshold(&self, threshold: f64) -> Result<Self> {
        check_threshold(threshold)?;
        Ok(Self { threshold, ..self.clone() })
    }

    pub fn quality(&self) -> &QualityDistribution {
        &self.quality
    }

    pub fn sender_types(&self) -> &TypeDistribution {
        &self.sender_types
    }

    pub fn receiver_types(&self) -> &TypeDistribution {
        &self.receiver_types
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn has_distinct_populations(&self) -> bool {
        self.sender_types != self.receiver_types
    }
}

/// What a sender of type `i` recommends; a payoff of exactly `r` earns a Buy.
pub fn sender_recommendation(version: Version, i: f64, r: f64) -> Result<Recommendation> {
    check_type(i)?;
    check_threshold(r)?;
    Ok(if payoff_unchecked(version, i) >= r { Recommendation::Buy } else { Recommendation::DontBuy })
}

/// Probabilities `(φ_1, φ_2)` that a random sender recommends versions (1,0) and (0,1).
pub fn phi_pair(f: &TypeDistribution, r: f64) -> (f64, f64) {
    let phi2 = f.cdf(0.5 - r);
    if f.is_symmetric() {
        // exact equality keeps p1/p2 = q1/q2 free of rounding
        (phi2, phi2)
    } else {
        (1.0 - f.cdf(r - 0.5), phi2)
    }
}

fn buy_likelihood(f: &TypeDistribution, r: f64) -> [f64; 4] {
    let (phi1, phi2) = phi_pair(f, r);
    [1.0, phi1, phi2, 0.0]
}

fn dont_buy_likelihood(f: &TypeDistribution, r: f64) -> [f64; 4] {
    let (phi1, phi2) = phi_pair(f, r);
    [0.0, 1.0 - phi1, 1.0 - phi2, 1.0]
}

/// `(π^B, π^D)`.
pub fn recommendation_probabilities(system: &RecommendationSystem) -> (f64, f64) {
    let q = system.quality.as_array();
    let l = buy_likelihood(&system.sender_types, system.threshold);
    let pi_buy = q[0] + q[1] * l[1] + q[2] * l[2];
    let pi_dont = q[1] * (1.0 - l[1]) + q[2] * (1.0 - l[2]) + q[3];
    (pi_buy, pi_dont)
}

/// Posterior after a Buy or DontBuy recommendation.
pub fn posterior(system: &RecommendationSystem, r: Recommendation) -> Result<Posterior> {
    let f = &system.sender_types;
    let likelihood = match r {
        Recommendation::Buy => buy_likelihood(f, system.threshold),
        Recommendation::DontBuy => dont_buy_likelihood(f, system.threshold),
        Recommendation::None => return Ok(Posterior::prior(&system.quality)),
        Recommendation::Neutral => return Err(RecoError::UnreachableRecommendation(r)),
    };
    bayes_update(&system.quality, likelihood, r)
}

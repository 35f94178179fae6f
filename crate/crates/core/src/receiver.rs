//! Receiver utilities, objective/subjective effects and acceptance.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{posterior, Recommendation, RecommendationSystem};

/// Tolerance for the `2 Δ_O` comparisons and for treating `Δ_S` as zero.
pub const EFFECT_TOL: f64 = 1e-12;

/// `U_i = p_H + (1/2 + i) p_1 + (1/2 - i) p_2` under `belief`.
pub fn expected_utility(i: f64, belief: &[f64; 4]) -> f64 {
    belief[0] + (0.5 + i) * belief[1] + (0.5 - i) * belief[2]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectPair {
    pub recommendation: Recommendation,
    pub delta_o: f64,
    pub delta_s: f64,
}

impl EffectPair {
    /// Effects of moving from `prior` to `posterior`.
    pub fn between(recommendation: Recommendation, prior: &[f64; 4], posterior: &[f64; 4]) -> Self {
        let d: [f64; 4] = std::array::from_fn(|s| posterior[s] - prior[s]);
        Self {
            recommendation,
            delta_o: d[0] + 0.5 * d[1] + 0.5 * d[2],
            delta_s: d[2] - d[1],
        }
    }

    /// Utility change `U_i^r - U_i^0 = Δ_O - i Δ_S`.
    pub fn gain(&self, i: f64) -> f64 {
        self.delta_o - i * self.delta_s
    }
}

pub fn effects(system: &RecommendationSystem, r: Recommendation) -> Result<EffectPair> {
    let p = posterior(system, r)?;
    Ok(EffectPair::between(r, &system.quality().as_array(), &p.probs))
}

/// Types `i` that follow the recommendation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "region", content = "i_tilde")]
pub enum AcceptanceRegion {
    All,
    /// `i ≥ ĩ` accept.
    UpperSet(f64),
    /// `i ≤ ĩ` accept.
    LowerSet(f64),
}

impl AcceptanceRegion {
    pub fn contains(&self, i: f64) -> bool {
        match *self {
            Self::All => true,
            Self::UpperSet(t) => i >= t,
            Self::LowerSet(t) => i <= t,
        }
    }

    pub fn indifferent_type(&self) -> Option<f64> {
        match *self {
            Self::All => None,
            Self::UpperSet(t) | Self::LowerSet(t) => Some(t),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::All => "All",
            Self::UpperSet(_) => "UpperSet",
            Self::LowerSet(_) => "LowerSet",
        }
    }
}

/// Buy-recommendation effects, which settle acceptance of both recommendations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceptanceRule {
    pub buy: EffectPair,
}

impl AcceptanceRule {
    pub fn new(system: &RecommendationSystem) -> Result<Self> {
        Ok(Self { buy: effects(system, Recommendation::Buy)? })
    }

    /// `Δ_O^B ≥ i Δ_S^B`; indifferent types accept.
    pub fn accepts(&self, i: f64) -> bool {
        self.buy.delta_o >= i * self.buy.delta_s
    }

    pub fn indifferent_type(&self) -> Option<f64> {
        (self.buy.delta_s.abs() >= EFFECT_TOL).then(|| self.buy.delta_o / self.buy.delta_s)
    }

    pub fn region(&self) -> AcceptanceRegion {
        let (o, s) = (self.buy.delta_o, self.buy.delta_s);
        if s.abs() <= 2.0 * o + EFFECT_TOL {
            return AcceptanceRegion::All;
        }
        let t = o / s;
        if s < 0.0 {
            if t <= -0.5 { AcceptanceRegion::All } else { AcceptanceRegion::UpperSet(t) }
        } else if t >= 0.5 {
            AcceptanceRegion::All
        } else {
            AcceptanceRegion::LowerSet(t)
        }
    }
}

pub fn accepts(system: &RecommendationSystem, i: f64) -> Result<bool> {
    Ok(AcceptanceRule::new(system)?.accepts(i))
}

/// `ĩ = Δ_O^B / Δ_S^B`, or `None` when `Δ_S^B` vanishes.
pub fn indifferent_type(system: &RecommendationSystem) -> Result<Option<f64>> {
    Ok(AcceptanceRule::new(system)?.indifferent_type())
}

pub fn acceptance_region(system: &RecommendationSystem) -> Result<AcceptanceRegion> {
    Ok(AcceptanceRule::new(system)?.region())
}

use serde::{Deserialize, Serialize};

use crate::error::{RecoError, Result};

/// Tolerance on the sum of a probability vector.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// One of the four product versions, identified by its quality vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Version {
    /// (1,1): objectively good.
    High,
    /// (1,0): controversial, preferred by types i > 0.
    First,
    /// (0,1): controversial, preferred by types i < 0.
    Second,
    /// (0,0): objectively bad.
    Low,
}

impl Version {
    pub const ALL: [Version; 4] = [Version::High, Version::First, Version::Second, Version::Low];

    /// Position of this version in a `[H, 1, 2, L]` probability vector.
    pub fn index(self) -> usize {
        match self {
            Version::High => 0,
            Version::First => 1,
            Version::Second => 2,
            Version::Low => 3,
        }
    }

    /// The quality vector `(Q_1, Q_2)`.
    pub fn qualities(self) -> (f64, f64) {
        match self {
            Version::High => (1.0, 1.0),
            Version::First => (1.0, 0.0),
            Version::Second => (0.0, 1.0),
            Version::Low => (0.0, 0.0),
        }
    }

    pub fn is_controversial(self) -> bool {
        matches!(self, Version::First | Version::Second)
    }
}

pub(crate) fn check_type(i: f64) -> Result<()> {
    if (-0.5..=0.5).contains(&i) {
        Ok(())
    } else {
        Err(RecoError::Domain { what: "receiver type", value: i })
    }
}

/// Payoff `(1/2 + i) Q_1 + (1/2 - i) Q_2` of consuming `version` for type `i`.
pub fn payoff(version: Version, i: f64) -> Result<f64> {
    check_type(i)?;
    Ok(payoff_unchecked(version, i))
}

#[inline]
pub(crate) fn payoff_unchecked(version: Version, i: f64) -> f64 {
    let (q1, q2) = version.qualities();
    (0.5 + i) * q1 + (0.5 - i) * q2
}

/// Prior over product versions, stored as `[q_H, q_1, q_2, q_L]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct QualityDistribution {
    probs: [f64; 4],
}

impl QualityDistribution {
    pub fn new(q_high: f64, q_first: f64, q_second: f64, q_low: f64) -> Result<Self> {
        Self::from_array([q_high, q_first, q_second, q_low])
    }

    pub fn from_array(probs: [f64; 4]) -> Result<Self> {
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(RecoError::InvalidQuality(format!(
                "components must be finite and non-negative, got {bad}"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(RecoError::InvalidQuality(format!(
                "components must sum to 1, got {sum}"
            )));
        }
        Ok(Self { probs })
    }

    /// Builds the prior from prevalence `Q`, good odds `σ` and controversial odds `λ`.
    pub fn from_params(prevalence: f64, good_odds: f64, controversial_odds: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&prevalence) {
            return Err(RecoError::InvalidQuality(format!(
                "prevalence must lie in [0, 1/2], got {prevalence}"
            )));
        }
        if !(good_odds > 0.0 && good_odds.is_finite()) {
            return Err(RecoError::InvalidQuality(format!(
                "good-product odds must be positive, got {good_odds}"
            )));
        }
        if !(controversial_odds > 0.0 && controversial_odds.is_finite()) {
            return Err(RecoError::InvalidQuality(format!(
                "controversial odds must be positive, got {controversial_odds}"
            )));
        }
        let (q, s, l) = (prevalence, good_odds, controversial_odds);
        let q_high = (1.0 - 2.0 * q) * s / (1.0 + s);
        let q_low = (1.0 - 2.0 * q) / (1.0 + s);
        let q_first = 2.0 * q * l / (l + 1.0);
        let q_second = 2.0 * q / (l + 1.0);
        Self::new(q_high, q_first, q_second, q_low)
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.probs
    }

    pub fn prob(&self, version: Version) -> f64 {
        self.probs[version.index()]
    }

    pub fn q_high(&self) -> f64 {
        self.probs[0]
    }

    pub fn q_first(&self) -> f64 {
        self.probs[1]
    }

    pub fn q_second(&self) -> f64 {
        self.probs[2]
    }

    pub fn q_low(&self) -> f64 {
        self.probs[3]
    }

    /// Prevalence of controversial products, `(q_1 + q_2) / 2`.
    pub fn prevalence(&self) -> f64 {
        0.5 * (self.probs[1] + self.probs[2])
    }

    /// Odds of a good product, `q_H / q_L`; undefined when `q_L = 0`.
    pub fn good_odds(&self) -> Option<f64> {
        (self.probs[3] > 0.0).then(|| self.probs[0] / self.probs[3])
    }

    /// Odds between the controversial versions, `q_1 / q_2`; undefined when `q_2 = 0`.
    pub fn controversial_odds(&self) -> Option<f64> {
        (self.probs[2] > 0.0).then(|| self.probs[1] / self.probs[2])
    }
}

impl TryFrom<[f64; 4]> for QualityDistribution {
    type Error = RecoError;

    fn try_from(value: [f64; 4]) -> Result<Self> {
        Self::from_array(value)
    }
}

impl From<QualityDistribution> for [f64; 4] {
    fn from(value: QualityDistribution) -> Self {
        value.probs
    }
}

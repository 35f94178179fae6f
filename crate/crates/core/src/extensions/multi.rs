//! Several independent recommendations, and the infinite-learning limit.

use serde::{Deserialize, Serialize};

use super::three_level::neutral_buyer_integral;
use crate::error::{RecoError, Result};
use crate::model::{bayes_update, phi_pair, Posterior, QualityDistribution, Recommendation, TypeDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiRecCount {
    b: u32,
    d: u32,
}

impl MultiRecCount {
    pub fn new(b: u32, d: u32) -> Result<Self> {
        if b == 0 && d == 0 {
            return Err(RecoError::Domain { what: "recommendation count", value: 0.0 });
        }
        Ok(Self { b, d })
    }

    pub fn buys(&self) -> u32 {
        self.b
    }

    pub fn dont_buys(&self) -> u32 {
        self.d
    }

    /// Buy or DontBuy when unanimous; mixed counts are labelled Neutral.
    pub fn label(&self) -> Recommendation {
        match (self.b, self.d) {
            (_, 0) => Recommendation::Buy,
            (0, _) => Recommendation::DontBuy,
            _ => Recommendation::Neutral,
        }
    }
}

/// Likelihood of observing exactly these counts in a fixed order.
fn count_likelihood(f: &TypeDistribution, r: f64, c: &MultiRecCount) -> [f64; 4] {
    let (phi1, phi2) = phi_pair(f, r);
    let pow = |x: f64, n: u32| x.powi(n as i32);
    [
        if c.d == 0 { 1.0 } else { 0.0 },
        pow(phi1, c.b) * pow(1.0 - phi1, c.d),
        pow(phi2, c.b) * pow(1.0 - phi2, c.d),
        if c.b == 0 { 1.0 } else { 0.0 },
    ]
}

pub fn multi_posterior(q: &QualityDistribution, f: &TypeDistribution, r: f64, counts: &MultiRecCount) -> Result<Posterior> {
    crate::model::check_threshold(r)?;
    bayes_update(q, count_likelihood(f, r, counts), counts.label())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "cutoff")]
pub enum ControversialPolicy {
    /// Types `i ≥ cutoff` buy.
    BuyAtOrAbove(f64),
    /// Types `i ≤ cutoff` buy.
    BuyAtOrBelow(f64),
    AlwaysBuy,
    NeverBuy,
}

impl ControversialPolicy {
    pub fn buys(&self, i: f64) -> bool {
        match *self {
            Self::BuyAtOrAbove(t) => i >= t,
            Self::BuyAtOrBelow(t) => i <= t,
            Self::AlwaysBuy => true,
            Self::NeverBuy => false,
        }
    }
}

/// Behaviour once infinitely many recommendations reveal whether the product
/// is good, bad or controversial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfiniteLearningPolicy {
    pub buy_good: bool,
    pub buy_bad: bool,
    pub controversial: ControversialPolicy,
}

/// `ĩ_∞ = (σ-1)/(2(1+σ)) · (λ+1)/(λ-1)`; undefined at `λ = 1`.
pub fn infinite_cutoff(sigma: f64, lambda: f64) -> Option<f64> {
    (lambda != 1.0).then(|| (sigma - 1.0) / (2.0 * (1.0 + sigma)) * (lambda + 1.0) / (lambda - 1.0))
}

pub fn infinite_learning_policy(q: &QualityDistribution) -> Result<InfiniteLearningPolicy> {
    let sigma = q.good_odds().ok_or(RecoError::ParameterUndefined("good-product odds"))?;
    let lambda = q.controversial_odds().ok_or(RecoError::ParameterUndefined("controversial odds"))?;
    let controversial = match infinite_cutoff(sigma, lambda) {
        Some(t) if lambda > 1.0 => ControversialPolicy::BuyAtOrAbove(t),
        Some(t) => ControversialPolicy::BuyAtOrBelow(t),
        None if sigma <= 1.0 => ControversialPolicy::AlwaysBuy,
        None => ControversialPolicy::NeverBuy,
    };
    Ok(InfiniteLearningPolicy { buy_good: true, buy_bad: false, controversial })
}

/// Value of infinite learning for receivers distributed by `f`:
/// `q_H (1 - q_H - Q - (q_1 - q_2) E[i]) + 2Q ∫ max(g, 0) dF` with `g` the
/// gain from buying a product known to be controversial.
pub fn infinite_learning_value(q: &QualityDistribution, f: &TypeDistribution) -> f64 {
    let [qh, q1, q2, _] = q.as_array();
    let prev = q.prevalence();
    qh * (1.0 - qh - prev - (q1 - q2) * f.mean()) + 2.0 * prev * neutral_buyer_integral(q, f)
}

/// Whether infinite learning fails to beat the best single threshold.
/// Boundary odds `σ ∈ {λ, 1/λ}` count as inside the interval, i.e. a gain is possible.
pub fn infinite_no_gain(lambda: f64, sigma: f64) -> Result<bool> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(RecoError::Domain { what: "controversial odds", value: lambda });
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(RecoError::Domain { what: "good-product odds", value: sigma });
    }
    let (lo, hi) = (lambda.min(1.0 / lambda), lambda.max(1.0 / lambda));
    Ok(lambda == 1.0 || sigma < lo || sigma > hi)
}

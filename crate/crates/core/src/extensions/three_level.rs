//! Buy / neutral / don't-buy recommendations from two thresholds.

use serde::{Deserialize, Serialize};

use crate::error::{RecoError, Result};
use crate::model::{bayes_update, check_threshold, phi_pair, Posterior, QualityDistribution, Recommendation, TypeDistribution};
use crate::receiver::expected_utility;

/// Thresholds `R1 ≤ R2`: Buy at payoff ≥ `R2`, DontBuy below `R1`, Neutral in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPair {
    r1: f64,
    r2: f64,
}

impl ThresholdPair {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        check_threshold(r1)?;
        check_threshold(r2)?;
        if r1 > r2 {
            return Err(RecoError::Domain { what: "R1 above R2", value: r1 });
        }
        Ok(Self { r1, r2 })
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    /// `(β1, β2) = (F(1/2 - R1), F(1/2 - R2))`.
    pub fn betas(&self, f: &TypeDistribution) -> (f64, f64) {
        (f.cdf(0.5 - self.r1), f.cdf(0.5 - self.r2))
    }
}

fn likelihood(f: &TypeDistribution, pair: &ThresholdPair, r: Recommendation) -> Option<[f64; 4]> {
    let (b1, b2) = phi_pair(f, pair.r2);
    let (n1, n2) = phi_pair(f, pair.r1);
    match r {
        Recommendation::Buy => Some([1.0, b1, b2, 0.0]),
        Recommendation::Neutral => Some([0.0, n1 - b1, n2 - b2, 0.0]),
        Recommendation::DontBuy => Some([0.0, 1.0 - n1, 1.0 - n2, 1.0]),
        Recommendation::None => None,
    }
}

/// Probabilities of `(Buy, Neutral, DontBuy)`.
pub fn three_level_probabilities(q: &QualityDistribution, f: &TypeDistribution, pair: &ThresholdPair) -> [f64; 3] {
    let qa = q.as_array();
    [Recommendation::Buy, Recommendation::Neutral, Recommendation::DontBuy].map(|r| {
        let l = likelihood(f, pair, r).expect("labelled recommendation");
        (0..4).map(|s| qa[s] * l[s]).sum()
    })
}

pub fn three_level_posterior(
    q: &QualityDistribution,
    f: &TypeDistribution,
    pair: &ThresholdPair,
    r: Recommendation,
) -> Result<Posterior> {
    match likelihood(f, pair, r) {
        Some(l) => bayes_update(q, l, r),
        None => Ok(Posterior::prior(q)),
    }
}

/// Indifferent type after a Neutral recommendation under symmetric types.
///
/// Values outside `[-1/2, 1/2]` mean all or no types buy; with `q_1 = q_2` the
/// corners encode the answer directly (−1/2: all buy, +1/2: none buy).
pub fn intermediate_indifferent_type(q: &QualityDistribution) -> f64 {
    let [qh, q1, q2, ql] = q.as_array();
    if q1 == q2 {
        return if ql >= qh { -0.5 } else { 0.5 };
    }
    if qh + ql == 0.0 {
        // indifferent everywhere; ties buy
        return if q1 > q2 { -0.5 } else { 0.5 };
    }
    0.5 * (qh - ql) * (q1 + q2) / ((q1 - q2) * (qh + ql))
}

/// Utility gain from buying after a Neutral recommendation, `U_i^N - U_i^0`.
pub fn neutral_gain(q: &QualityDistribution, i: f64) -> f64 {
    let [qh, q1, q2, ql] = q.as_array();
    let m = q1 + q2;
    if m == 0.0 {
        return 0.0;
    }
    expected_utility(i, &[0.0, q1 / m, q2 / m, 0.0]) - expected_utility(i, &[qh, q1, q2, ql])
}

/// `∫ max(g, 0) dF` where `g` is the neutral gain: the buyers are `{g ≥ 0}`.
pub(crate) fn neutral_buyer_integral(q: &QualityDistribution, f: &TypeDistribution) -> f64 {
    let [qh, q1, q2, ql] = q.as_array();
    let prev = q.prevalence();
    if prev == 0.0 {
        return 0.0;
    }
    let g0 = 0.5 * (ql - qh);
    let slope = (1.0 - 2.0 * prev) * (q1 - q2) / (2.0 * prev);
    let t = intermediate_indifferent_type(q).clamp(-0.5, 0.5);
    let (lo, hi) = if q1 > q2 {
        (t, 0.5)
    } else if q1 < q2 {
        (-0.5, t)
    } else if g0 >= 0.0 {
        (-0.5, 0.5)
    } else {
        return 0.0;
    };
    if hi <= lo {
        return 0.0;
    }
    g0 * (f.cdf(hi) - f.cdf(lo)) + slope * f.partial_moment(lo, hi)
}

fn require_symmetric(f: &TypeDistribution) -> Result<()> {
    if f.is_symmetric() {
        Ok(())
    } else {
        Err(RecoError::UnsupportedConfiguration("two-threshold formulas need a symmetric type distribution"))
    }
}

/// Value for shares `β1 ≥ β2` of senders clearing the low and high threshold,
/// with receivers distributed by `f`.
pub fn two_threshold_value_betas(q: &QualityDistribution, f: &TypeDistribution, beta1: f64, beta2: f64) -> f64 {
    let qh = q.q_high();
    let prev = q.prevalence();
    let buy_part = qh + prev * beta2 - (qh + 2.0 * prev * beta2) * (qh + prev);
    buy_part + 2.0 * prev * (beta1 - beta2) * neutral_buyer_integral(q, f)
}

pub fn two_threshold_value(q: &QualityDistribution, f: &TypeDistribution, pair: &ThresholdPair) -> Result<f64> {
    require_symmetric(f)?;
    let (b1, b2) = pair.betas(f);
    Ok(two_threshold_value_betas(q, f, b1, b2))
}

/// `(∂V/∂β2, ∂V/∂β1)`; neither depends on the betas themselves.
pub fn two_threshold_partials(q: &QualityDistribution, f: &TypeDistribution) -> Result<(f64, f64)> {
    require_symmetric(f)?;
    let prev = q.prevalence();
    let n = neutral_buyer_integral(q, f);
    Ok((prev * (q.q_low() - q.q_high()) - 2.0 * prev * n, 2.0 * prev * n))
}

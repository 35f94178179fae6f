//! Receiver value functions and the value of a recommendation system.

use serde::{Deserialize, Serialize};

use crate::error::{RecoError, Result};
use crate::model::{
    posterior, recommendation_probabilities, QualityDistribution, Recommendation,
    RecommendationSystem, TypeDistribution,
};
use crate::quad::integrate;
use crate::receiver::{effects, expected_utility, AcceptanceRegion, AcceptanceRule, EffectPair};

/// Allowed gap between the closed form and the direct integral.
pub const VALUE_CROSS_CHECK_TOL: f64 = 1e-9;

/// `V_0(i)`: expected payoff choosing on the prior alone.
pub fn value_no_rec(i: f64, q: &QualityDistribution) -> f64 {
    expected_utility(i, &q.as_array())
}

/// `V_A(i) = π^B U_i^B + (1 - π^B) U_i^0`.
pub fn value_accepting(system: &RecommendationSystem, i: f64) -> Result<f64> {
    let (pi_b, _) = recommendation_probabilities(system);
    let u_b = expected_utility(i, &posterior(system, Recommendation::Buy)?.probs);
    Ok(pi_b * u_b + (1.0 - pi_b) * value_no_rec(i, system.quality()))
}

/// `V_N(i) = π^B U_i^0 + (1 - π^B) U_i^D`.
pub fn value_rejecting(system: &RecommendationSystem, i: f64) -> Result<f64> {
    let (pi_b, _) = recommendation_probabilities(system);
    let u0 = value_no_rec(i, system.quality());
    let u_d = if pi_b < 1.0 {
        expected_utility(i, &posterior(system, Recommendation::DontBuy)?.probs)
    } else {
        u0
    };
    Ok(pi_b * u0 + (1.0 - pi_b) * u_d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValueCase {
    AllAccept,
    UpperAccept,
    LowerAccept,
}

impl From<AcceptanceRegion> for ValueCase {
    fn from(r: AcceptanceRegion) -> Self {
        match r {
            AcceptanceRegion::All => Self::AllAccept,
            AcceptanceRegion::UpperSet(_) => Self::UpperAccept,
            AcceptanceRegion::LowerSet(_) => Self::LowerAccept,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueReport {
    pub value: f64,
    pub pi_buy: f64,
    pub buy: EffectPair,
    /// Absent when a don't-buy recommendation never occurs.
    pub dont_buy: Option<EffectPair>,
    pub region: AcceptanceRegion,
    /// Gain of the types that follow the recommendation.
    pub accepting: f64,
    /// Gain of the types that act against it.
    pub rejecting: f64,
    pub case: ValueCase,
}

/// Flat export form of a [`ValueReport`].
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueRecord {
    pub value: f64,
    pub pi_buy: f64,
    pub delta_O_B: f64,
    pub delta_S_B: f64,
    pub delta_O_D: Option<f64>,
    pub delta_S_D: Option<f64>,
    pub region: String,
    pub i_tilde: Option<f64>,
}

impl From<&ValueReport> for ValueRecord {
    fn from(r: &ValueReport) -> Self {
        Self {
            value: r.value,
            pi_buy: r.pi_buy,
            delta_O_B: r.buy.delta_o,
            delta_S_B: r.buy.delta_s,
            delta_O_D: r.dont_buy.map(|e| e.delta_o),
            delta_S_D: r.dont_buy.map(|e| e.delta_s),
            region: r.region.label().to_string(),
            i_tilde: r.region.indifferent_type(),
        }
    }
}

struct Parts {
    pi_buy: f64,
    buy: EffectPair,
    dont_buy: Option<EffectPair>,
    region: AcceptanceRegion,
}

fn parts(system: &RecommendationSystem) -> Result<Parts> {
    let (pi_buy, pi_dont) = recommendation_probabilities(system);
    let buy = effects(system, Recommendation::Buy)?;
    let dont_buy = if pi_dont > 0.0 { Some(effects(system, Recommendation::DontBuy)?) } else { None };
    let region = AcceptanceRule { buy }.region();
    Ok(Parts { pi_buy, buy, dont_buy, region })
}

/// Intervals of followers and contrarians.
fn split(region: AcceptanceRegion) -> ((f64, f64), (f64, f64)) {
    match region {
        AcceptanceRegion::All => ((-0.5, 0.5), (0.5, 0.5)),
        AcceptanceRegion::UpperSet(t) => ((t, 0.5), (-0.5, t)),
        AcceptanceRegion::LowerSet(t) => ((-0.5, t), (t, 0.5)),
    }
}

fn closed_form(p: &Parts, g: &TypeDistribution) -> (f64, f64) {
    let ((alo, ahi), (rlo, rhi)) = split(p.region);
    let weighted = |e: &EffectPair, lo: f64, hi: f64| {
        if hi <= lo {
            return 0.0;
        }
        e.delta_o * (g.cdf(hi) - g.cdf(lo)) - e.delta_s * g.partial_moment(lo, hi)
    };
    let accepting = p.pi_buy * weighted(&p.buy, alo, ahi);
    let rejecting = match &p.dont_buy {
        Some(e) => (1.0 - p.pi_buy) * weighted(e, rlo, rhi),
        None => 0.0,
    };
    (accepting, rejecting)
}

/// `∫_a^b h dG` for affine `h`, by parts: only `∫ G` needs quadrature.
fn integrate_affine(h: impl Fn(f64) -> f64, g: &TypeDistribution, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let slope = (h(b) - h(a)) / (b - a);
    let mut cuts = vec![a];
    cuts.extend(g.kinks(a, b));
    cuts.push(b);
    let area: f64 = cuts.windows(2).map(|w| integrate(|x| g.cdf(x), w[0], w[1])).sum();
    h(b) * g.cdf(b) - h(a) * g.cdf(a) - slope * area
}

/// Direct integral of `V_A - V_0` over followers and `V_N - V_0` over contrarians.
fn direct_integral(system: &RecommendationSystem, p: &Parts) -> Result<f64> {
    let g = system.receiver_types();
    let q = system.quality();
    let ((alo, ahi), (rlo, rhi)) = split(p.region);
    let p_buy = posterior(system, Recommendation::Buy)?.probs;
    let accept_gain = |i: f64| p.pi_buy * (expected_utility(i, &p_buy) - value_no_rec(i, q));
    let mut total = integrate_affine(accept_gain, g, alo, ahi);
    if p.dont_buy.is_some() && rhi > rlo {
        let p_dont = posterior(system, Recommendation::DontBuy)?.probs;
        let reject_gain =
            |i: f64| (1.0 - p.pi_buy) * (expected_utility(i, &p_dont) - value_no_rec(i, q));
        total += integrate_affine(reject_gain, g, rlo, rhi);
    }
    Ok(total)
}

/// Closed-form value only; use inside optimization loops.
pub fn system_value_fast(system: &RecommendationSystem) -> Result<f64> {
    let p = parts(system)?;
    let (a, r) = closed_form(&p, system.receiver_types());
    Ok(a + r)
}

/// Closed-form value, verified against the direct integral.
pub fn system_value(system: &RecommendationSystem) -> Result<ValueReport> {
    let p = parts(system)?;
    let (accepting, rejecting) = closed_form(&p, system.receiver_types());
    let value = accepting + rejecting;
    let integral = direct_integral(system, &p)?;
    if (value - integral).abs() > VALUE_CROSS_CHECK_TOL {
        return Err(RecoError::IntegralMismatch { closed: value, integral });
    }
    Ok(ValueReport {
        value,
        pi_buy: p.pi_buy,
        buy: p.buy,
        dont_buy: p.dont_buy,
        region: p.region,
        accepting,
        rejecting,
        case: p.region.into(),
    })
}

/// `(Q, σ, λ)` view of a prior; odds are absent when their denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityParams {
    pub prevalence: f64,
    pub good_odds: Option<f64>,
    pub controversial_odds: Option<f64>,
}

pub fn reparameterize(q: &QualityDistribution) -> QualityParams {
    QualityParams {
        prevalence: q.prevalence(),
        good_odds: q.good_odds(),
        controversial_odds: q.controversial_odds(),
    }
}

impl QualityParams {
    pub fn to_quality(&self) -> Result<QualityDistribution> {
        let sigma = self.good_odds.ok_or(RecoError::ParameterUndefined("good-product odds"))?;
        let lambda =
            self.controversial_odds.ok_or(RecoError::ParameterUndefined("controversial odds"))?;
        QualityDistribution::from_params(self.prevalence, sigma, lambda)
    }
}

/// Parameters of a system with a symmetric type distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricParams {
    pub prevalence: f64,
    pub good_odds: f64,
    /// Share of senders recommending a controversial version, `F(1/2 - R)`.
    pub beta: f64,
    pub controversial_odds: f64,
}

impl SymmetricParams {
    pub fn new(prevalence: f64, good_odds: f64, beta: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&prevalence) {
            return Err(RecoError::Domain { what: "prevalence", value: prevalence });
        }
        if !(good_odds > 0.0 && good_odds.is_finite()) {
            return Err(RecoError::Domain { what: "good-product odds", value: good_odds });
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(RecoError::Domain { what: "beta", value: beta });
        }
        Ok(Self { prevalence, good_odds, beta, controversial_odds: 1.0 })
    }

    pub fn with_controversial_odds(self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(RecoError::Domain { what: "controversial odds", value: lambda });
        }
        Ok(Self { controversial_odds: lambda, ..self })
    }

    pub fn quality(&self) -> Result<QualityDistribution> {
        QualityDistribution::from_params(self.prevalence, self.good_odds, self.controversial_odds)
    }
}

/// Value under a symmetric type distribution, `π^B Δ_O^B` in closed form.
pub fn symmetric_value(p: &SymmetricParams) -> f64 {
    let (q, s, b) = (p.prevalence, p.good_odds, p.beta);
    (1.0 - 2.0 * q) * (s + q * (b - s + s * s * (1.0 - b))) / ((s + 1.0) * (s + 1.0))
}

//! Products, payoffs, type distributions, sender behavior and posteriors.

mod decomposition;
mod distribution;
mod quality;
mod system;

pub use decomposition::{belief_decomposition, BeliefDecomposition};
pub use distribution::TypeDistribution;
pub use quality::{payoff, QualityDistribution, Version, PROB_SUM_TOL};
pub use system::{
    bayes_update, phi_pair, posterior, recommendation_probabilities, sender_recommendation,
    Posterior, Recommendation, RecommendationSystem, R_EXTREME_HIGH, R_EXTREME_LOW, R_MAX, R_MIN,
};

pub(crate) use quality::payoff_unchecked;
pub(crate) use system::check_threshold;

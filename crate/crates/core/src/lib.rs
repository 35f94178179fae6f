//! Value and design of recommendation systems when receivers disagree about
//! which product version is better.
//!
//! Senders recommend Buy when their own payoff clears a threshold `R`; a
//! Bayesian receiver updates on the recommendation and decides whether to
//! follow it. The crate computes posteriors, acceptance, the value of the
//! system, optimal thresholds and several extensions, and ships a Monte Carlo
//! oracle that checks every closed form independently.

// `!(x > 0.0)` is used on purpose so NaN lands in the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod design;
pub mod error;
pub mod extensions;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod receiver;
pub mod value;

pub use error::{RecoError, Result};
pub use model::{
    belief_decomposition, payoff, phi_pair, posterior, recommendation_probabilities,
    sender_recommendation, BeliefDecomposition, Posterior, QualityDistribution, Recommendation,
    RecommendationSystem, TypeDistribution, Version,
};
pub use receiver::{
    acceptance_region, accepts, effects, expected_utility, indifferent_type, AcceptanceRegion,
    AcceptanceRule, EffectPair,
};
pub use value::{
    reparameterize, symmetric_value, system_value, system_value_fast, QualityParams,
    SymmetricParams, ValueCase, ValueRecord, ValueReport,
};
pub use design::{DesignVerdict, VerdictKind};
pub use oracle::{EstimateWithError, SimulationConfig};

//! Distinct populations, two-threshold systems and multiple recommendations.

mod distinct;
mod multi;
mod three_level;

pub use distinct::{distinct_monotonicity, distinct_value};
pub use multi::{
    infinite_cutoff, infinite_learning_policy, infinite_learning_value, infinite_no_gain,
    multi_posterior, ControversialPolicy, InfiniteLearningPolicy, MultiRecCount,
};
pub use three_level::{
    intermediate_indifferent_type, neutral_gain, three_level_posterior, three_level_probabilities,
    two_threshold_partials, two_threshold_value, two_threshold_value_betas, ThresholdPair,
};


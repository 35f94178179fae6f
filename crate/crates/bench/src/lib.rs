//! Fixed systems shared by the benchmarks.

use reco_core::design::power_system;
use reco_core::{QualityDistribution, RecommendationSystem, TypeDistribution};

pub fn uniform_system() -> RecommendationSystem {
    RecommendationSystem::new(QualityDistribution::new(0.4, 0.2, 0.2, 0.2).unwrap(), TypeDistribution::uniform(), 0.5)
        .unwrap()
}

/// Power-law types with a non-trivial acceptance region.
pub fn upper_set_system() -> RecommendationSystem {
    let q = QualityDistribution::new(0.1, 0.4, 0.4, 0.1).unwrap();
    RecommendationSystem::new(q, TypeDistribution::power(3.0).unwrap(), 0.5).unwrap()
}

/// Tabulated types: every moment goes through quadrature.
pub fn tabulated_system() -> RecommendationSystem {
    let f = TypeDistribution::tabulated(vec![(-0.5, 0.0), (-0.1, 0.2), (0.3, 0.9), (0.5, 1.0)]).unwrap();
    RecommendationSystem::new(QualityDistribution::new(0.2, 0.3, 0.2, 0.3).unwrap(), f, 0.6).unwrap()
}

pub fn interior_system() -> RecommendationSystem {
    power_system(2.0, 0.2, 1.0, 0.5).unwrap()
}

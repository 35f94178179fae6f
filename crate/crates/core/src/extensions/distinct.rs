//! Senders and receivers drawn from different type distributions.

use crate::design::VerdictKind;
use crate::error::{RecoError, Result};
use crate::model::{QualityDistribution, RecommendationSystem, TypeDistribution};
use crate::value::{system_value, ValueReport, VALUE_CROSS_CHECK_TOL};

const RATIO_TOL: f64 = 1e-12;

/// Value when senders follow a symmetric `f` and receivers are drawn from `g`.
///
/// Every receiver follows, so `V = π^B [Δ_O^B - Δ_S^B E_G[i]]`; the report is
/// additionally checked against the `G`-weighted integral.
pub fn distinct_value(
    q: &QualityDistribution,
    f: &TypeDistribution,
    g: &TypeDistribution,
    r: f64,
) -> Result<ValueReport> {
    if !f.is_symmetric() {
        return Err(RecoError::UnsupportedConfiguration("sender distribution must be symmetric"));
    }
    let system = RecommendationSystem::with_distinct_receivers(*q, f.clone(), g.clone(), r)?;
    let report = system_value(&system)?;
    let closed = report.pi_buy * (report.buy.delta_o - report.buy.delta_s * g.mean());
    if (closed - report.value).abs() > VALUE_CROSS_CHECK_TOL {
        return Err(RecoError::IntegralMismatch { closed, integral: report.value });
    }
    Ok(ValueReport { value: closed, ..report })
}

/// Direction of `V(R)` for symmetric senders and receivers with mean type `mean_g`.
///
/// `dV/dβ = Q(q_L - q_H) + (q_1 - q_2) E_G[i] (q_H + q_L)`, so `V` falls in `R`
/// exactly when `σ < (Q + (q_1 - q_2) E_G[i]) / (Q - (q_1 - q_2) E_G[i])`.
pub fn distinct_monotonicity(q: &QualityDistribution, mean_g: f64) -> Result<VerdictKind> {
    let sigma = q.good_odds().ok_or(RecoError::ParameterUndefined("good-product odds"))?;
    let tilt = (q.q_first() - q.q_second()) * mean_g;
    let den = q.prevalence() - tilt;
    if den <= 0.0 {
        return Err(RecoError::IndeterminateConfiguration(format!(
            "ratio denominator Q - (q1 - q2) E_G[i] = {den} is not positive"
        )));
    }
    let ratio = (q.prevalence() + tilt) / den;
    Ok(if (sigma - ratio).abs() < RATIO_TOL {
        VerdictKind::ConstantInR
    } else if sigma < ratio {
        VerdictKind::DecreasingInR
    } else {
        VerdictKind::IncreasingInR
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn q(a: [f64; 4]) -> QualityDistribution {
        QualityDistribution::from_array(a).unwrap()
    }

    #[test]
    fn symmetric_receivers_reduce_to_objective_effect() {
        let qd = q([0.3, 0.3, 0.1, 0.3]);
        let u = TypeDistribution::uniform();
        let sym = TypeDistribution::piecewise_symmetric(0.2, 0.8).unwrap();
        let r = distinct_value(&qd, &u, &sym, 0.6).unwrap();
        assert_abs_diff_eq!(r.value, r.pi_buy * r.buy.delta_o, epsilon = 1e-12);
    }

    #[test]
    fn power_receivers() {
        let qd = q([0.3, 0.3, 0.1, 0.3]);
        let g = TypeDistribution::power(2.0).unwrap();
        let r = distinct_value(&qd, &TypeDistribution::uniform(), &g, 0.6).unwrap();
        let expected = r.pi_buy * (r.buy.delta_o - r.buy.delta_s / 6.0);
        assert_abs_diff_eq!(r.value, expected, epsilon = 1e-14);
        assert!(distinct_value(&qd, &g, &g, 0.6).is_err());
    }

    #[test]
    fn monotonicity() {
        assert_eq!(distinct_monotonicity(&q([0.4, 0.2, 0.2, 0.2]), 0.0).unwrap(), VerdictKind::IncreasingInR);
        assert_eq!(distinct_monotonicity(&q([0.2, 0.2, 0.2, 0.4]), 0.3).unwrap(), VerdictKind::DecreasingInR);
        // ratio (0.2 + 0.2/6) / (0.2 - 0.2/6) = 7/5 exceeds σ = 1
        let qd = q([0.3, 0.3, 0.1, 0.3]);
        assert_eq!(distinct_monotonicity(&qd, 1.0 / 6.0).unwrap(), VerdictKind::DecreasingInR);
        assert!(matches!(
            distinct_monotonicity(&q([0.1, 0.8, 0.0, 0.1]), 0.5),
            Err(RecoError::IndeterminateConfiguration(_))
        ));
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{RecoError, Result};

const SYMMETRY_TOL: f64 = 1e-12;

/// A continuous CDF of types on `[-1/2, 1/2]`.
///
/// Deserialization goes through the validating constructors, so a value
/// obtained from serde always satisfies the family invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawDistribution")]
pub enum TypeDistribution {
    Uniform,
    /// `F(i) = (i + 1/2)^a`.
    Power { a: f64 },
    /// Three linear pieces through `(-c, β)` and `(c, 1-β)` with `c = r_ref - 1/2`.
    /// The outer pieces are flat when `β = 0`, the middle one when `β = 1/2`.
    PiecewiseSymmetric { beta_target: f64, r_ref: f64 },
    /// Linear interpolation between `(i, F(i))` knots.
    Tabulated { points: Vec<(f64, f64)> },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawDistribution {
    Uniform,
    Power { a: f64 },
    PiecewiseSymmetric { beta_target: f64, r_ref: f64 },
    Tabulated { points: Vec<(f64, f64)> },
}

impl TryFrom<RawDistribution> for TypeDistribution {
    type Error = RecoError;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        match raw {
            RawDistribution::Uniform => Ok(Self::Uniform),
            RawDistribution::Power { a } => Self::power(a),
            RawDistribution::PiecewiseSymmetric { beta_target, r_ref } => {
                Self::piecewise_symmetric(beta_target, r_ref)
            }
            RawDistribution::Tabulated { points } => Self::tabulated(points),
        }
    }
}

impl TypeDistribution {
    pub fn uniform() -> Self {
        Self::Uniform
    }

    pub fn power(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(RecoError::InvalidDistribution(format!(
                "power exponent must be positive, got {a}"
            )));
        }
        Ok(Self::Power { a })
    }

    pub fn piecewise_symmetric(beta_target: f64, r_ref: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&beta_target) {
            return Err(RecoError::InvalidDistribution(format!(
                "beta_target must lie in [0, 1/2], got {beta_target}"
            )));
        }
        if !(r_ref > 0.5 && r_ref < 1.0) {
            return Err(RecoError::InvalidDistribution(format!(
                "r_ref must lie in (1/2, 1), got {r_ref}"
            )));
        }
        Ok(Self::PiecewiseSymmetric { beta_target, r_ref })
    }

    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |msg: &str| Err(RecoError::InvalidDistribution(format!("tabulated: {msg}")));
        if points.len() < 2 {
            return bad("need at least two points");
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return bad("non-finite point");
        }
        if points[0] != (-0.5, 0.0) || points[points.len() - 1] != (0.5, 1.0) {
            return bad("must start at (-0.5, 0) and end at (0.5, 1)");
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return bad("abscissae must be strictly increasing");
            }
            if w[1].1 < w[0].1 {
                return bad("CDF values must be non-decreasing");
            }
        }
        Ok(Self::Tabulated { points })
    }

    /// Knots of the piecewise-linear families.
    fn knots(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            Self::PiecewiseSymmetric { beta_target: b, r_ref } => {
                let c = r_ref - 0.5;
                Some(vec![(-0.5, 0.0), (-c, *b), (c, 1.0 - b), (0.5, 1.0)])
            }
            Self::Tabulated { points } => Some(points.clone()),
            _ => None,
        }
    }

    pub fn cdf(&self, i: f64) -> f64 {
        if i <= -0.5 {
            return 0.0;
        }
        if i >= 0.5 {
            return 1.0;
        }
        match self {
            Self::Uniform => i + 0.5,
            Self::Power { a } => (i + 0.5).powf(*a),
            Self::PiecewiseSymmetric { beta_target: b, r_ref } => {
                let c = r_ref - 0.5;
                if i < -c {
                    b * (i + 0.5) / (0.5 - c)
                } else if i <= c {
                    b + (1.0 - 2.0 * b) * (i + c) / (2.0 * c)
                } else {
                    1.0 - b + b * (i - c) / (0.5 - c)
                }
            }
            Self::Tabulated { points } => interpolate(points, i),
        }
    }

    /// `∫_lo^hi F(i) di`, with the bounds clamped to the support.
    pub fn cdf_integral(&self, lo: f64, hi: f64) -> f64 {
        let (lo, hi) = (lo.max(-0.5), hi.min(0.5));
        if hi <= lo {
            return 0.0;
        }
        match self {
            Self::Uniform => 0.5 * ((hi + 0.5).powi(2) - (lo + 0.5).powi(2)),
            Self::Power { a } => {
                ((hi + 0.5).powf(a + 1.0) - (lo + 0.5).powf(a + 1.0)) / (a + 1.0)
            }
            Self::PiecewiseSymmetric { .. } | Self::Tabulated { .. } => {
                // F is linear between knots, so the trapezoid rule is exact per segment
                let knots = self.knots().expect("family has knots");
                knots
                    .windows(2)
                    .map(|w| {
                        let (a, b) = (lo.max(w[0].0), hi.min(w[1].0));
                        if b <= a {
                            0.0
                        } else {
                            0.5 * (b - a) * (self.cdf(a) + self.cdf(b))
                        }
                    })
                    .sum()
            }
        }
    }

    /// Points where the density may jump, inside `(lo, hi)`.
    pub fn kinks(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.knots()
            .map(|k| k.into_iter().map(|p| p.0).filter(|&x| x > lo && x < hi).collect())
            .unwrap_or_default()
    }

    /// `∫_lo^hi i dF(i)`, with the bounds clamped to the support.
    pub fn partial_moment(&self, lo: f64, hi: f64) -> f64 {
        let (lo, hi) = (lo.max(-0.5), hi.min(0.5));
        if hi <= lo {
            return 0.0;
        }
        match self {
            Self::Uniform => 0.5 * (hi * hi - lo * lo),
            Self::Power { a } => {
                let g = |x: f64| a / (a + 1.0) * x.powf(a + 1.0) - 0.5 * x.powf(*a);
                g(hi + 0.5) - g(lo + 0.5)
            }
            Self::PiecewiseSymmetric { .. } | Self::Tabulated { .. } => {
                let knots = self.knots().expect("family has knots");
                knots
                    .windows(2)
                    .map(|w| {
                        let (x0, f0) = w[0];
                        let (x1, f1) = w[1];
                        let (a, b) = (lo.max(x0), hi.min(x1));
                        if b <= a {
                            0.0
                        } else {
                            (f1 - f0) / (x1 - x0) * 0.5 * (b * b - a * a)
                        }
                    })
                    .sum()
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Uniform => 0.0,
            Self::Power { a } => (a - 1.0) / (2.0 * (a + 1.0)),
            Self::PiecewiseSymmetric { .. } => 0.0,
            Self::Tabulated { .. } => self.partial_moment(-0.5, 0.5),
        }
    }

    /// `E[i | lo ≤ i ≤ hi]`.
    pub fn conditional_mean(&self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo <= hi) || lo < -0.5 || hi > 0.5 {
            return Err(RecoError::EmptyInterval { lo, hi });
        }
        let mass = self.cdf(hi) - self.cdf(lo);
        if mass <= 0.0 {
            return Err(RecoError::EmptyInterval { lo, hi });
        }
        Ok(self.partial_moment(lo, hi) / mass)
    }

    /// Smallest `i` with `F(i) ≥ u`.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self {
            Self::Uniform => u - 0.5,
            Self::Power { a } => u.powf(1.0 / a) - 0.5,
            Self::PiecewiseSymmetric { .. } => {
                let knots = self.knots().expect("piecewise family has knots");
                invert_linear(&knots, u)
            }
            Self::Tabulated { .. } => {
                if u <= 0.0 {
                    return -0.5;
                }
                let (mut lo, mut hi) = (-0.5_f64, 0.5_f64);
                while hi - lo > 1e-12 {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(mid) >= u {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        }
    }

    /// Whether `F(i) + F(-i) = 1` on the whole support.
    pub fn is_symmetric(&self) -> bool {
        match self {
            Self::Uniform | Self::PiecewiseSymmetric { .. } => true,
            Self::Power { a } => *a == 1.0,
            // a linear interpolant is symmetric iff it is at every knot and its mirror
            Self::Tabulated { points } => points
                .iter()
                .all(|&(x, _)| (self.cdf(x) + self.cdf(-x) - 1.0).abs() <= SYMMETRY_TOL),
        }
    }
}

fn interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    let k = points.partition_point(|p| p.0 <= x);
    if k == 0 {
        return points[0].1;
    }
    if k == points.len() {
        return points[k - 1].1;
    }
    let (x0, y0) = points[k - 1];
    let (x1, y1) = points[k];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

fn invert_linear(points: &[(f64, f64)], u: f64) -> f64 {
    for w in points.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        if u <= y1 && y1 > y0 {
            return if u <= y0 { x0 } else { x0 + (u - y0) * (x1 - x0) / (y1 - y0) };
        }
    }
    0.5
}

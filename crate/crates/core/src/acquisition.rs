//! Acquisition functions for minimization and their maximization over the unit cube.
//!
//! Every score is oriented so that larger is better: EI and PI measure
//! improvement below the incumbent, and the confidence-bound score is the
//! negated lower bound `−(μ − β·σ)`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gp::GpModel;
use crate::optim::golden_section_max;
use crate::scalar::Scalar;

/// Coordinate sweeps applied to each refinement start.
pub const REFINE_SWEEPS: usize = 2;
/// Golden-section evaluations per coordinate during refinement.
pub const REFINE_LINE_EVALS: usize = 14;
/// Half-width of the per-coordinate bracket on each sweep.
pub const REFINE_HALF_WIDTHS: [f64; REFINE_SWEEPS] = [0.1, 0.02];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AcquisitionKind {
    Ei,
    Pi,
    Lcb,
}

impl AcquisitionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AcquisitionKind::Ei => "ei",
            AcquisitionKind::Pi => "pi",
            AcquisitionKind::Lcb => "lcb",
        }
    }
}

impl fmt::Display for AcquisitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AcquisitionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ei" => Ok(AcquisitionKind::Ei),
            "pi" => Ok(AcquisitionKind::Pi),
            "lcb" | "ucb" => Ok(AcquisitionKind::Lcb),
            other => Err(format!("unknown acquisition kind `{other}` (expected ei, pi or lcb)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcquisitionConfig {
    pub kind: AcquisitionKind,
    /// Exploration margin in standardized units.
    pub xi: f64,
    pub beta: f64,
    /// Multiply the score by the probability of feasibility when a constraint model is available.
    /// When off, the optimizer folds the constraint into the objective as a penalty.
    pub feasibility_weighting: bool,
    pub n_candidates: usize,
    pub n_refine_starts: usize,
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        Self {
            kind: AcquisitionKind::Ei,
            xi: 0.01,
            beta: 2.0,
            feasibility_weighting: true,
            n_candidates: 2048,
            n_refine_starts: 10,
        }
    }
}

impl AcquisitionConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.xi >= 0.0 && self.xi.is_finite()) {
            return Err(format!("xi must be >= 0, got {}", self.xi));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(format!("beta must be > 0, got {}", self.beta));
        }
        if self.n_candidates == 0 {
            return Err("n_candidates must be >= 1".into());
        }
        if self.n_refine_starts == 0 {
            return Err("n_refine_starts must be >= 1".into());
        }
        Ok(())
    }
}

/// Standard normal density.
pub fn normal_pdf<T: Scalar>(z: T) -> T {
    (T::lit(-0.5) * z * z).exp() / T::TAU().sqrt()
}

/// Standard normal distribution function.
pub fn normal_cdf<T: Scalar>(z: T) -> T {
    T::lit(0.5 * libm::erfc(-z.as_f64() / std::f64::consts::SQRT_2))
}

/// Expected improvement below `best − xi`.
pub fn expected_improvement<T: Scalar>(mean: T, std: T, best: T, xi: T) -> T {
    let gap = best - xi - mean;
    if !(std > T::zero()) {
        return gap.max(T::zero());
    }
    let z = gap / std;
    (gap * normal_cdf(z) + std * normal_pdf(z)).max(T::zero())
}

/// Probability that the outcome falls below `best − xi`.
pub fn probability_of_improvement<T: Scalar>(mean: T, std: T, best: T, xi: T) -> T {
    let gap = best - xi - mean;
    if !(std > T::zero()) {
        return if gap > T::zero() { T::one() } else { T::zero() };
    }
    normal_cdf(gap / std)
}

/// `−(mean − beta·std)`.
pub fn lower_confidence_bound<T: Scalar>(mean: T, std: T, beta: T) -> T {
    beta * std - mean
}

/// Probability that a constraint value modelled as `N(mean_g, std_g²)` is `≤ 0`.
pub fn feasibility_probability<T: Scalar>(mean_g: T, std_g: T) -> T {
    if !(std_g > T::zero()) {
        return if mean_g <= T::zero() { T::one() } else { T::zero() };
    }
    normal_cdf(-mean_g / std_g)
}

/// Scores points of the unit cube given fitted surrogates.
#[derive(Debug, Clone, Copy)]
pub struct Acquisition<'a, T> {
    pub objective: &'a GpModel<T>,
    /// Model of the constraint `g`, feasible where `g ≤ 0`, in raw units.
    pub constraint: Option<&'a GpModel<T>>,
    pub config: &'a AcquisitionConfig,
    /// Best feasible objective value in standardized units; `None` when nothing feasible is known.
    pub incumbent: Option<T>,
}

impl<T: Scalar> Acquisition<'_, T> {
    fn feasibility(&self, x: &[T]) -> Option<T> {
        let c = self.constraint?;
        let (m, v) = c.predict_raw(x);
        Some(feasibility_probability(m, v.sqrt()))
    }

    pub fn score(&self, x: &[T]) -> T {
        let weighting = self.config.feasibility_weighting;
        let pof = if weighting { self.feasibility(x) } else { None };
        let incumbent = match (self.incumbent, pof) {
            (Some(best), _) => best,
            // nothing feasible yet: chase feasibility alone
            (None, Some(p)) => return p,
            (None, None) => self
                .objective
                .dataset()
                .targets()
                .iter()
                .copied()
                .fold(T::infinity(), T::min),
        };
        let (mean, var) = self.objective.predict(x);
        let std = var.sqrt();
        let xi = T::lit(self.config.xi);
        let raw = match self.config.kind {
            AcquisitionKind::Ei => expected_improvement(mean, std, incumbent, xi),
            AcquisitionKind::Pi => probability_of_improvement(mean, std, incumbent, xi),
            AcquisitionKind::Lcb => lower_confidence_bound(mean, std, T::lit(self.config.beta)),
        };
        match (pof, self.config.kind) {
            (None, _) => raw,
            (Some(p), AcquisitionKind::Lcb) => raw + p.max(T::min_positive_value()).ln(),
            (Some(p), _) => raw * p,
        }
    }
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(n);
    let mut k = 2u64;
    while primes.len() < n {
        if primes.iter().all(|p| k % p != 0) {
            primes.push(k);
        }
        k += 1;
    }
    primes
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// `n` points of a Halton sequence with a seeded random shift (mod 1).
pub fn shifted_halton<T: Scalar>(n: usize, dims: usize, seed: u64) -> Vec<Vec<T>> {
    let primes = first_primes(dims);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dims).map(|_| rng.gen::<f64>()).collect();
    (0..n as u64)
        .map(|i| {
            primes
                .iter()
                .zip(&shift)
                .map(|(&p, &s)| T::lit((radical_inverse(i + 1, p) + s).fract()))
                .collect()
        })
        .collect()
}

/// Returns the maximizer of the acquisition score over `[0,1]^dims`.
///
/// Scores `n_candidates` shifted-Halton points, refines the best
/// `n_refine_starts` by coordinate-wise golden-section search and returns the
/// best point found. Ties go to the lowest candidate index.
pub fn maximize_acquisition<T: Scalar>(acq: &Acquisition<'_, T>, seed: u64) -> Vec<T> {
    maximize_with_score(acq, seed).0
}

/// As [`maximize_acquisition`], also returning the score.
pub fn maximize_with_score<T: Scalar>(acq: &Acquisition<'_, T>, seed: u64) -> (Vec<T>, T) {
    let dims = acq.objective.dataset().dims();
    let candidates = shifted_halton::<T>(acq.config.n_candidates, dims, seed);
    let sanitize = |v: T| if v.is_nan() { T::neg_infinity() } else { v };
    let scores: Vec<T> = candidates.iter().map(|x| sanitize(acq.score(x))).collect();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    // stable sort keeps index order among equal scores
    order.sort_by(|&i, &j| scores[j].partial_cmp(&scores[i]).unwrap_or(std::cmp::Ordering::Equal));
    let mut best: Option<(usize, Vec<T>, T)> = None;
    for &idx in order.iter().take(acq.config.n_refine_starts) {
        let (x, s) = refine(acq, candidates[idx].clone(), scores[idx]);
        let better = match &best {
            None => true,
            Some((bi, _, bs)) => s > *bs || (s == *bs && idx < *bi),
        };
        if better {
            best = Some((idx, x, s));
        }
    }
    let (_, x, s) = best.expect("at least one candidate");
    (x, s)
}

fn refine<T: Scalar>(acq: &Acquisition<'_, T>, mut x: Vec<T>, mut score: T) -> (Vec<T>, T) {
    for half_width in REFINE_HALF_WIDTHS {
        let w = T::lit(half_width);
        for k in 0..x.len() {
            let lo = (x[k] - w).max(T::zero());
            let hi = (x[k] + w).min(T::one());
            let mut probe = x.clone();
            let (arg, val) = golden_section_max(
                |t| {
                    probe[k] = t;
                    acq.score(&probe)
                },
                lo,
                hi,
                REFINE_LINE_EVALS,
            );
            if val > score {
                score = val;
                x[k] = arg;
            }
        }
    }
    (x, score)
}

//! Shot-noise Monte Carlo for photon-counting estimates.
//!
//! Counts are multinomial, drawn as a chain of conditional binomials from a
//! ChaCha8 generator seeded per call. Equal seeds give identical counts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Allowed excess of a probability vector over unit mass.
pub const MASS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotConfig {
    n_shots: u64,
    seed: u64,
}

impl ShotConfig {
    pub fn new(n_shots: u64, seed: u64) -> Result<Self> {
        if n_shots == 0 {
            return Err(Error::OutOfRange {
                name: "n_shots",
                value: 0.0,
                range: "[1, inf)",
            });
        }
        Ok(Self { n_shots, seed })
    }

    pub fn n_shots(&self) -> u64 {
        self.n_shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Counts and per-bin estimates of one simulated acquisition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotOutcome {
    pub counts: Vec<u64>,
    /// Shots landing in the residual (undetected) bin.
    pub discarded: u64,
    /// `count / n`.
    pub estimates: Vec<f64>,
    /// `√(p̂ (1 - p̂) / n)`.
    pub std_errors: Vec<f64>,
    pub n_shots: u64,
    pub seed: u64,
}

fn validate(probabilities: &[f64]) -> Result<()> {
    for &p in probabilities {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityOutOfRange {
                value: p,
                context: "shot probabilities",
            });
        }
    }
    let mass: f64 = probabilities.iter().sum();
    if mass > 1.0 + MASS_TOL {
        return Err(Error::ProbabilityOutOfRange {
            value: mass,
            context: "total shot probability",
        });
    }
    Ok(())
}

fn draw_counts(rng: &mut ChaCha8Rng, probabilities: &[f64], n: u64) -> (Vec<u64>, u64) {
    let mut remaining_n = n;
    let mut remaining_mass = 1.0;
    let mut counts = Vec::with_capacity(probabilities.len());
    for &p in probabilities {
        let k = if remaining_n == 0 || p == 0.0 {
            0
        } else {
            let q = if remaining_mass > 0.0 {
                (p / remaining_mass).clamp(0.0, 1.0)
            } else {
                1.0
            };
            Binomial::new(remaining_n, q).expect("q in [0, 1]").sample(rng)
        };
        counts.push(k);
        remaining_n -= k;
        remaining_mass -= p;
    }
    (counts, remaining_n)
}

fn outcome(counts: Vec<u64>, discarded: u64, s: &ShotConfig) -> ShotOutcome {
    let n = s.n_shots as f64;
    let estimates: Vec<f64> = counts.iter().map(|&k| k as f64 / n).collect();
    let std_errors = estimates.iter().map(|&p| (p * (1.0 - p) / n).sqrt()).collect();
    ShotOutcome {
        counts,
        discarded,
        estimates,
        std_errors,
        n_shots: s.n_shots,
        seed: s.seed,
    }
}

/// Simulates `n_shots` detections over the given outcome probabilities.
/// Any mass missing from `probabilities` goes to the discard bin.
pub fn simulate_shots(probabilities: &[f64], s: &ShotConfig) -> Result<ShotOutcome> {
    validate(probabilities)?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let (counts, discarded) = draw_counts(&mut rng, probabilities, s.n_shots);
    Ok(outcome(counts, discarded, s))
}

/// Γ estimated from two independent acquisitions, forward then backward,
/// with first-order error propagation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    pub p_forward: f64,
    pub p_backward: f64,
    pub p_forward_std_err: f64,
    pub p_backward_std_err: f64,
    pub ratio: f64,
    pub gamma: f64,
    pub gamma_std_err: f64,
    /// No backward click was recorded.
    pub diverged: bool,
    pub n_shots: u64,
    pub seed: u64,
}

/// Samples the forward and backward success probabilities with `s.n_shots`
/// each and forms `Γ̂ = (p̂_F / p̂_B) exp(βQ)`.
pub fn estimate_gamma(p_forward: f64, p_backward: f64, beta_q: f64, s: &ShotConfig) -> Result<GammaEstimate> {
    validate(&[p_forward])?;
    validate(&[p_backward])?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let (fwd, fwd_miss) = draw_counts(&mut rng, &[p_forward], s.n_shots);
    let (bwd, bwd_miss) = draw_counts(&mut rng, &[p_backward], s.n_shots);
    let fwd = outcome(fwd, fwd_miss, s);
    let bwd = outcome(bwd, bwd_miss, s);
    let (pf, pb) = (fwd.estimates[0], bwd.estimates[0]);
    let (sf, sb) = (fwd.std_errors[0], bwd.std_errors[0]);
    let diverged = bwd.counts[0] == 0;
    let (ratio, gamma, gamma_std_err) = if diverged {
        (f64::INFINITY, f64::INFINITY, f64::INFINITY)
    } else {
        let ratio = pf / pb;
        let gamma = ratio * beta_q.exp();
        let rel_f = if pf > 0.0 { sf / pf } else { 0.0 };
        let rel = (rel_f.powi(2) + (sb / pb).powi(2)).sqrt();
        (ratio, gamma, gamma * rel)
    };
    Ok(GammaEstimate {
        p_forward: pf,
        p_backward: pb,
        p_forward_std_err: sf,
        p_backward_std_err: sb,
        ratio,
        gamma,
        gamma_std_err,
        diverged,
        n_shots: s.n_shots,
        seed: s.seed,
    })
}

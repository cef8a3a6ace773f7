//! Monte Carlo near-duplicate search: plant a noisy copy of one of `M`
//! random points and look for it with a code-derived hash, retrying on
//! shifted data until the pair collides.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::codes::BlockCode;
use crate::error::{Error, Result};

/// Recorded in every report so runs can be reproduced elsewhere.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.3), seed_from_u64(seed), stream = trial index";

/// Labels up to this many bits are counted in a flat array.
const DENSE_LABEL_BITS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// Code description, kept for reporting.
    pub code: String,
    /// Dataset size `M`.
    pub points: usize,
    pub gamma: f64,
    pub trials: u64,
    pub seed: u64,
    /// Total hashing rounds allowed per trial; `None` means `ceil(4/P)`.
    pub max_rounds: Option<u64>,
}

impl ExperimentConfig {
    pub fn new(code: impl Into<String>, points: usize, gamma: f64, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            code: code.into(),
            points,
            gamma,
            trials,
            seed,
            max_rounds: None,
        }
    }

    fn validate(&self, code: &BlockCode) -> Result<()> {
        if self.points < 2 {
            return Err(Error::InvalidParameter("dataset needs at least 2 points".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("at least one trial is required".into()));
        }
        if !(0.0..0.5).contains(&self.gamma) {
            return Err(Error::InvalidProbability(self.gamma));
        }
        if code.n() > 64 {
            return Err(Error::TooLarge {
                what: "harness code length".into(),
                limit: 64,
            });
        }
        if self.max_rounds == Some(0) {
            return Err(Error::InvalidParameter("max_rounds must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    /// Round in which the planted pair collided, or `None` if censored.
    pub round: Option<u64>,
    /// Weight of the planted error.
    pub error_weight: u32,
    /// Non-planted points sharing the query's first-round bucket.
    pub bucket_size: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rng: String,
    pub n: usize,
    pub k: usize,
    pub max_rounds: u64,
    pub empirical_p1: f64,
    pub predicted_p1: f64,
    /// Binomial standard deviation of `empirical_p1` under the prediction.
    pub sigma_p1: f64,
    pub empirical_bucket_mean: f64,
    /// `M / 2^k`.
    pub predicted_bucket: f64,
    pub rounds_histogram: BTreeMap<u64, u64>,
    pub censored: u64,
    pub mean_rounds: Option<f64>,
    /// `lg(1/p1) / k` from the empirical first-round rate.
    pub rho_estimate: Option<f64>,
    /// `lg(1/P) / k` from the exact collision probability.
    pub rho_predicted: f64,
}

impl ExperimentReport {
    /// Distance of the empirical first-round rate from the prediction, in
    /// binomial standard deviations.
    pub fn z_score(&self) -> f64 {
        if self.sigma_p1 == 0.0 {
            if self.empirical_p1 == self.predicted_p1 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.empirical_p1 - self.predicted_p1) / self.sigma_p1
        }
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn noise<R: Rng>(n: usize, gamma: f64, rng: &mut R) -> u64 {
    let mut e = 0;
    for b in 0..n {
        if rng.gen_bool(gamma) {
            e |= 1 << b;
        }
    }
    e
}

enum Buckets {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

impl Buckets {
    fn new(k: usize) -> Buckets {
        if k <= DENSE_LABEL_BITS {
            Buckets::Dense(vec![0; 1 << k])
        } else {
            Buckets::Sparse(HashMap::new())
        }
    }

    fn clear(&mut self) {
        match self {
            Buckets::Dense(v) => v.fill(0),
            Buckets::Sparse(m) => m.clear(),
        }
    }

    fn add(&mut self, label: u64) {
        match self {
            Buckets::Dense(v) => v[label as usize] += 1,
            Buckets::Sparse(m) => *m.entry(label).or_default() += 1,
        }
    }

    fn get(&self, label: u64) -> u32 {
        match self {
            Buckets::Dense(v) => v[label as usize],
            Buckets::Sparse(m) => m.get(&label).copied().unwrap_or(0),
        }
    }
}

/// Runs every trial and returns one row per trial.
pub fn run_trials(code: &BlockCode, cfg: &ExperimentConfig, max_rounds: u64) -> Result<Vec<TrialRow>> {
    cfg.validate(code)?;
    let n = code.n();
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut points = vec![0u64; cfg.points];
    let mut buckets = Buckets::new(code.k());
    let mut rows = Vec::with_capacity(cfg.trials as usize);
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial);
        for p in points.iter_mut() {
            *p = rng.gen::<u64>() & mask;
        }
        let planted = rng.gen_range(0..cfg.points);
        let x = points[planted];
        let e = noise(n, cfg.gamma, &mut rng);
        let y = x ^ e;

        buckets.clear();
        for &p in &points {
            buckets.add(code.hash_u64(p));
        }
        let hy = code.hash_u64(y);
        let hx = code.hash_u64(x);
        let bucket_size = buckets.get(hy) as u64 - (hx == hy) as u64;

        let mut round = (hx == hy).then_some(1);
        let mut r = 1;
        while round.is_none() && r < max_rounds {
            r += 1;
            // Shifting every point by v changes only the labels; the planted
            // pair is all that decides success.
            let v = rng.gen::<u64>() & mask;
            if code.hash_u64(x ^ v) == code.hash_u64(y ^ v) {
                round = Some(r);
            }
        }
        rows.push(TrialRow {
            trial,
            round,
            error_weight: e.count_ones(),
            bucket_size,
        });
    }
    Ok(rows)
}

/// Default cap on rounds: `ceil(4 / P)`.
pub fn default_max_rounds(p: f64) -> u64 {
    if p <= 0.0 {
        u64::MAX
    } else {
        (4.0 / p).ceil().min(u64::MAX as f64) as u64
    }
}

pub fn summarize(code: &BlockCode, cfg: &ExperimentConfig, max_rounds: u64, rows: &[TrialRow]) -> Result<ExperimentReport> {
    let predicted_p1 = code.collision_probability(cfg.gamma)?;
    let trials = rows.len() as f64;
    let first = rows.iter().filter(|r| r.round == Some(1)).count() as f64;
    let empirical_p1 = first / trials;
    let mut rounds_histogram = BTreeMap::new();
    let mut censored = 0;
    let mut round_sum = 0u64;
    for r in rows {
        match r.round {
            Some(k) => {
                *rounds_histogram.entry(k).or_insert(0) += 1;
                round_sum += k;
            }
            None => censored += 1,
        }
    }
    let found = rows.len() as u64 - censored;
    let k = code.k();
    Ok(ExperimentReport {
        config: cfg.clone(),
        rng: RNG_NAME.to_string(),
        n: code.n(),
        k,
        max_rounds,
        empirical_p1,
        predicted_p1,
        sigma_p1: (predicted_p1 * (1.0 - predicted_p1) / trials).sqrt(),
        empirical_bucket_mean: rows.iter().map(|r| r.bucket_size as f64).sum::<f64>() / trials,
        predicted_bucket: cfg.points as f64 / 2f64.powi(k as i32),
        rounds_histogram,
        censored,
        mean_rounds: (found > 0).then(|| round_sum as f64 / found as f64),
        rho_estimate: rho_from(empirical_p1, k).ok(),
        rho_predicted: rho_from(predicted_p1, k)?,
    })
}

fn rho_from(p1: f64, k: usize) -> Result<f64> {
    if p1 <= 0.0 {
        return Err(Error::InvalidParameter(
            "no first-round collisions; increase the number of trials".into(),
        ));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("rho needs k >= 1".into()));
    }
    Ok(-p1.log2() / k as f64)
}

pub fn run_experiment(code: &BlockCode, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_with_rows(code, cfg).map(|(r, _)| r)
}

pub fn run_experiment_with_rows(code: &BlockCode, cfg: &ExperimentConfig) -> Result<(ExperimentReport, Vec<TrialRow>)> {
    cfg.validate(code)?;
    let max_rounds = cfg
        .max_rounds
        .unwrap_or_else(|| default_max_rounds(code.collision_probability(cfg.gamma).unwrap_or(0.0)));
    let rows = run_trials(code, cfg, max_rounds)?;
    Ok((summarize(code, cfg, max_rounds, &rows)?, rows))
}

/// `lg(1/p1) / lg(1/p2)` with `p2 = 2^-k`.
pub fn estimate_rho(report: &ExperimentReport) -> Result<f64> {
    rho_from(report.empirical_p1, report.k)
}

/// Fraction of independent uniform pairs whose labels agree.
pub fn random_pair_collision_rate(code: &BlockCode, pairs: u64, seed: u64) -> Result<f64> {
    if code.n() > 64 {
        return Err(Error::TooLarge {
            what: "harness code length".into(),
            limit: 64,
        });
    }
    let n = code.n();
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..pairs)
        .filter(|_| {
            let a = rng.gen::<u64>() & mask;
            let b = rng.gen::<u64>() & mask;
            code.hash_u64(a) == code.hash_u64(b)
        })
        .count();
    Ok(hits as f64 / pairs as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{golay_code, projection_code};

    #[test]
    fn zero_noise_always_collides() {
        let code = projection_code(20, 8).unwrap();
        let cfg = ExperimentConfig::new("projection:20,8", 64, 0.0, 200, 1);
        let r = run_experiment(&code, &cfg).unwrap();
        assert_eq!(r.empirical_p1, 1.0);
        assert_eq!(r.predicted_p1, 1.0);
        assert_eq!(r.z_score(), 0.0);
        assert_eq!(r.rounds_histogram.get(&1), Some(&200));
    }

    #[test]
    fn golay_first_round_rate_matches_prediction() {
        let code = golay_code();
        let cfg = ExperimentConfig::new("golay", 16, 0.3, 10_000, 42);
        let r = run_experiment(&code, &cfg).unwrap();
        assert!((r.predicted_p1 - 0.0145642).abs() < 1e-6);
        assert!(r.z_score().abs() < 3.0, "z = {}", r.z_score());
        // Retries keep the planted error, so heavy errors stay censored.
        let found: u64 = r.rounds_histogram.values().sum();
        assert_eq!(found + r.censored, 10_000);
        assert!(r.censored > 0 && r.censored < 10_000);
    }

    #[test]
    fn deterministic_reports() {
        let code = golay_code();
        let cfg = ExperimentConfig::new("golay", 256, 0.2, 300, 9);
        let a = serde_json::to_string(&run_experiment(&code, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_experiment(&code, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        let other = ExperimentConfig { seed: 10, ..cfg };
        assert_ne!(a, serde_json::to_string(&run_experiment(&code, &other).unwrap()).unwrap());
    }

    #[test]
    fn unrelated_pairs_collide_at_two_to_minus_k() {
        let code = golay_code();
        let pairs = 400_000;
        let rate = random_pair_collision_rate(&code, pairs, 5).unwrap();
        let p = 2f64.powi(-12);
        assert!((rate - p).abs() < 3.0 * (p * (1.0 - p) / pairs as f64).sqrt());
    }

    #[test]
    fn rho_of_projection() {
        let code = projection_code(30, 10).unwrap();
        let cfg = ExperimentConfig::new("projection:30,10", 32, 0.1, 2000, 3);
        let r = run_experiment(&code, &cfg).unwrap();
        assert!((r.rho_predicted + (0.9f64).log2()).abs() < 1e-12);
        let est = estimate_rho(&r).unwrap();
        assert!((est - r.rho_predicted).abs() < 0.02);
    }

    #[test]
    fn rho_rejects_zero_rate() {
        let code = projection_code(30, 30).unwrap();
        let cfg = ExperimentConfig {
            max_rounds: Some(1),
            ..ExperimentConfig::new("projection:30,30", 4, 0.45, 5, 3)
        };
        let r = run_experiment(&code, &cfg).unwrap();
        if r.empirical_p1 == 0.0 {
            assert!(estimate_rho(&r).is_err());
            assert_eq!(r.censored, 5);
        }
        assert_eq!(r.max_rounds, 1);
    }

    #[test]
    fn invalid_configs() {
        let code = golay_code();
        assert!(run_experiment(&code, &ExperimentConfig::new("golay", 1, 0.1, 1, 0)).is_err());
        assert!(run_experiment(&code, &ExperimentConfig::new("golay", 8, 0.5, 1, 0)).is_err());
        assert!(run_experiment(&code, &ExperimentConfig::new("golay", 8, 0.1, 0, 0)).is_err());
    }
}

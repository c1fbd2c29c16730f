//! Seeded Monte Carlo check of the analytic contribution profile.
//!
//! Each respondent draws from a dedicated ChaCha substream keyed by
//! (seed, respondent index), and all tallies are exact integers, so a report
//! is bit-identical for any thread count or respondent partitioning. The
//! Uniform scenario embodies the equally-likely assumption the analytic
//! profile is built on; Weighted scenarios deliberately violate it to show
//! how far a biased instrument drifts from the audit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::design::{contribution_profile, QuestionnaireDesign};
use crate::error::{Error, Result};
use crate::moments::ScaleSpec;

/// Respondent counts handled by one parallel task.
const RESPONDENTS_PER_TASK: u64 = 1 << 14;

/// Stream-id stride separating the runs of a convergence sweep.
const SWEEP_STREAM_STRIDE: u64 = 1 << 40;

/// Response distribution the simulated respondents draw from.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    /// Every response value equally likely (the instrument is unbiased).
    Uniform,
    /// One probability vector per item, in design order; each vector must
    /// match the item's support size (k entries for a k-point item, 2 for a
    /// dichotomous one) and sum to 1.
    Weighted(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub design: QuestionnaireDesign,
    pub respondents: u64,
    pub seed: u64,
    pub scenario: Scenario,
}

impl SimulationConfig {
    pub fn uniform(design: QuestionnaireDesign, respondents: u64, seed: u64) -> Self {
        SimulationConfig {
            design,
            respondents,
            seed,
            scenario: Scenario::Uniform,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.respondents < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 respondents, got {}",
                self.respondents
            )));
        }
        if self.respondents >= SWEEP_STREAM_STRIDE {
            return Err(Error::InvalidConfig(format!(
                "respondent count must stay below 2^40, got {}",
                self.respondents
            )));
        }
        if let Scenario::Weighted(weights) = &self.scenario {
            if weights.len() != self.design.len() {
                return Err(Error::InvalidConfig(format!(
                    "{} probability vectors for {} items",
                    weights.len(),
                    self.design.len()
                )));
            }
            for (item, probs) in self.design.items().iter().zip(weights) {
                if probs.len() != item.scale.support_size() {
                    return Err(Error::InvalidConfig(format!(
                        "item `{}`: {} probabilities for a support of {}",
                        item.id,
                        probs.len(),
                        item.scale.support_size()
                    )));
                }
                if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "item `{}`: probabilities must be finite and nonnegative",
                        item.id
                    )));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidConfig(format!(
                        "item `{}`: probabilities sum to {total}, expected 1",
                        item.id
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One item's empirical result next to its analytic share.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemSimulation {
    pub id: String,
    /// Share predicted by the variance decomposition under independence and
    /// equal likelihood, regardless of scenario.
    pub analytic_contribution: f64,
    /// Unbiased (N-1 divisor) sample variance of the item's answers.
    pub empirical_variance: f64,
    /// Item sample variance over the sample variance of the realized sum.
    pub empirical_contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub seed: u64,
    pub respondents: u64,
    pub items: Vec<ItemSimulation>,
    /// Sample variance of the realized sum-scores.
    pub sum_variance: f64,
    /// Largest |empirical - analytic| contribution over the items.
    pub max_abs_error: f64,
}

/// Run one seeded simulation. Reports are deterministic for a fixed config
/// regardless of how respondents are partitioned across threads.
pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationReport> {
    run_with_stream_base(config, 0)
}

/// One report per sample size, each drawn from its own substream family of
/// the same seed. Sizes must be strictly ascending and at least 2.
pub fn convergence_sweep(
    config: &SimulationConfig,
    sizes: &[u64],
) -> Result<Vec<SimulationReport>> {
    if sizes.is_empty() {
        return Err(Error::InvalidConfig("no sample sizes given".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(format!(
            "sample sizes must be strictly ascending, got {sizes:?}"
        )));
    }
    sizes
        .iter()
        .enumerate()
        .map(|(run, &respondents)| {
            let run_config = SimulationConfig {
                respondents,
                ..config.clone()
            };
            run_with_stream_base(&run_config, run as u64 * SWEEP_STREAM_STRIDE)
        })
        .collect()
}

fn run_with_stream_base(config: &SimulationConfig, stream_base: u64) -> Result<SimulationReport> {
    config.validate()?;
    let samplers = build_samplers(config);
    let n_items = samplers.len();
    let n = config.respondents;

    let tasks = n.div_ceil(RESPONDENTS_PER_TASK);
    let tally = (0..tasks)
        .into_par_iter()
        .map(|task| {
            let start = task * RESPONDENTS_PER_TASK;
            let end = (start + RESPONDENTS_PER_TASK).min(n);
            let mut tally = Tally::zero(n_items);
            for respondent in start..end {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(stream_base + respondent);
                tally.absorb(&samplers, &mut rng);
            }
            tally
        })
        .reduce(|| Tally::zero(n_items), Tally::merge);

    let analytic = contribution_profile(&config.design);
    let sum_variance = sample_variance(tally.sum_of_scores, tally.sum_of_score_squares, n);

    let mut max_abs_error: f64 = 0.0;
    let items = config
        .design
        .items()
        .iter()
        .enumerate()
        .map(|(j, item)| {
            let empirical_variance =
                sample_variance(tally.item_sums[j], tally.item_square_sums[j], n);
            let empirical_contribution = if sum_variance > 0.0 {
                empirical_variance / sum_variance
            } else {
                0.0
            };
            let analytic_contribution = analytic.items[j].contribution;
            max_abs_error = max_abs_error.max((empirical_contribution - analytic_contribution).abs());
            ItemSimulation {
                id: item.id.clone(),
                analytic_contribution,
                empirical_variance,
                empirical_contribution,
            }
        })
        .collect();

    Ok(SimulationReport {
        seed: config.seed,
        respondents: n,
        items,
        sum_variance,
        max_abs_error,
    })
}

/// Unbiased sample variance from exact integer power sums:
/// (N sum(x^2) - sum(x)^2) / (N (N-1)).
fn sample_variance(sum: i128, square_sum: i128, n: u64) -> f64 {
    let n = n as i128;
    let numerator = n * square_sum - sum * sum;
    numerator as f64 / (n * (n - 1)) as f64
}

enum ItemSampler {
    UniformConsecutive { first: i64, len: u32 },
    UniformPair { low: i64, high: i64 },
    Weighted { support: Vec<i64>, cumulative: Vec<f64> },
}

impl ItemSampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> i64 {
        match self {
            ItemSampler::UniformConsecutive { first, len } => {
                first + i64::from(rng.random_range(0..*len))
            }
            ItemSampler::UniformPair { low, high } => {
                if rng.random_range(0..2u32) == 0 {
                    *low
                } else {
                    *high
                }
            }
            ItemSampler::Weighted {
                support,
                cumulative,
            } => {
                let u: f64 = rng.random();
                for (value, bound) in support.iter().zip(cumulative) {
                    if u < *bound {
                        return *value;
                    }
                }
                *support.last().expect("non-empty support")
            }
        }
    }
}

fn build_samplers(config: &SimulationConfig) -> Vec<ItemSampler> {
    config
        .design
        .items()
        .iter()
        .enumerate()
        .map(|(j, item)| {
            let weights = match &config.scenario {
                Scenario::Uniform => None,
                Scenario::Weighted(all) => Some(&all[j]),
            };
            match (item.scale, weights) {
                (ScaleSpec::Likert { k }, None) => {
                    ItemSampler::UniformConsecutive { first: 1, len: k }
                }
                (ScaleSpec::Dichotomous { low, high }, None) => {
                    ItemSampler::UniformPair { low, high }
                }
                (scale, Some(probs)) => {
                    let support: Vec<i64> = match scale {
                        ScaleSpec::Likert { k } => (1..=i64::from(k)).collect(),
                        ScaleSpec::Dichotomous { low, high } => vec![low, high],
                    };
                    let mut acc = 0.0;
                    let cumulative = probs
                        .iter()
                        .map(|p| {
                            acc += p;
                            acc
                        })
                        .collect();
                    ItemSampler::Weighted {
                        support,
                        cumulative,
                    }
                }
            }
        })
        .collect()
}

/// Exact integer power sums; merging is associative and commutative, so any
/// partitioning of respondents reduces to the same totals.
#[derive(Clone)]
struct Tally {
    item_sums: Vec<i128>,
    item_square_sums: Vec<i128>,
    sum_of_scores: i128,
    sum_of_score_squares: i128,
}

impl Tally {
    fn zero(n_items: usize) -> Self {
        Tally {
            item_sums: vec![0; n_items],
            item_square_sums: vec![0; n_items],
            sum_of_scores: 0,
            sum_of_score_squares: 0,
        }
    }

    fn absorb(&mut self, samplers: &[ItemSampler], rng: &mut ChaCha8Rng) {
        let mut score = 0i128;
        for (j, sampler) in samplers.iter().enumerate() {
            let x = i128::from(sampler.draw(rng));
            self.item_sums[j] += x;
            self.item_square_sums[j] += x * x;
            score += x;
        }
        self.sum_of_scores += score;
        self.sum_of_score_squares += score * score;
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.item_sums.iter_mut().zip(&other.item_sums) {
            *a += b;
        }
        for (a, b) in self.item_square_sums.iter_mut().zip(&other.item_square_sums) {
            *a += b;
        }
        self.sum_of_scores += other.sum_of_scores;
        self.sum_of_score_squares += other.sum_of_score_squares;
        self
    }
}

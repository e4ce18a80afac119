//! Sampling from solved distributions: i.i.d. draws via inverse CDF, exact
//! rejection sampling of the tilted conditional, and top-k reporting.
//!
//! Randomness comes from a seeded splitmix64 stream, a counter-based 64-bit
//! generator, so every report is reproducible bit-for-bit from its seed.
//! Reports carry the generator identifier.

use crate::types::{Distribution, InverseTemperature, TaskSpec};
use std::collections::BTreeMap;
use thiserror::Error;

/// Identifier of the generator recorded in every report.
pub const RNG_ALGORITHM: &str = "splitmix64";

/// Guard against non-terminating rejection loops.
const MAX_PROPOSALS: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplerError {
    #[error("proposal has zero mass everywhere the target is positive")]
    SupportViolation,
    #[error("rejection sampling used {0} proposals without reaching the requested acceptances")]
    NonTerminating(u64),
    #[error("sample count must be at least 1")]
    EmptySample,
    #[error("observation index {index} out of range for {n_observations} observations")]
    UnknownObservation { index: usize, n_observations: usize },
}

/// splitmix64: successive outputs of a 64-bit counter passed through a
/// finalizer. Weyl increment and mixing constants are the reference ones.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Inverse-CDF draw over the label order.
fn draw(cdf: &[f64], u: f64) -> usize {
    match cdf.binary_search_by(|edge| edge.partial_cmp(&u).expect("finite cdf")) {
        Ok(i) => i + 1,
        Err(i) => i,
    }
    .min(cdf.len() - 1)
}

fn cumulative(dist: &Distribution) -> Vec<f64> {
    let mut cdf = Vec::with_capacity(dist.len());
    let mut acc = 0.0;
    for p in dist.iter() {
        acc += p;
        cdf.push(acc);
    }
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    cdf
}

/// i.i.d. samples with empirical counts and model probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleReport {
    /// Drawn labels in draw order.
    pub samples: Vec<String>,
    /// Empirical count per distinct sampled label.
    pub distinct: BTreeMap<String, u64>,
    /// Model probability per distinct sampled label.
    pub source_probabilities: BTreeMap<String, f64>,
    pub seed: u64,
    pub rng_algorithm: &'static str,
}

/// Draws `n` i.i.d. samples from `dist` via inverse CDF over the label
/// order; deterministic given the seed.
pub fn sample(
    dist: &Distribution,
    labels: &[String],
    n: usize,
    seed: u64,
) -> Result<SampleReport, SamplerError> {
    assert_eq!(
        dist.len(),
        labels.len(),
        "sample: distribution and labels disagree"
    );
    if n == 0 {
        return Err(SamplerError::EmptySample);
    }
    let cdf = cumulative(dist);
    let mut rng = SplitMix64::new(seed);
    let mut samples = Vec::with_capacity(n);
    let mut distinct: BTreeMap<String, u64> = BTreeMap::new();
    let mut source_probabilities: BTreeMap<String, f64> = BTreeMap::new();
    for _ in 0..n {
        let index = draw(&cdf, rng.next_f64());
        let label = &labels[index];
        *distinct.entry(label.clone()).or_insert(0) += 1;
        source_probabilities
            .entry(label.clone())
            .or_insert_with(|| dist.get(index));
        samples.push(label.clone());
    }
    Ok(SampleReport {
        samples,
        distinct,
        source_probabilities,
        seed,
        rng_algorithm: RNG_ALGORITHM,
    })
}

/// Accepted draws targeting p(x) ∝ proposal(x) · e^{βU(x,y)}.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectionReport {
    pub accepted: Vec<String>,
    pub proposals_used: u64,
    pub acceptance_rate: f64,
    pub seed: u64,
    pub rng_algorithm: &'static str,
}

/// Rejection-samples the observation-`y` conditional tilted from `proposal`:
/// draws x ~ proposal and accepts with probability e^{β(U(x,y) − U_max)},
/// where U_max is the maximum utility over the proposal's support. This is
/// the exact scheme for the target ∝ proposal · e^{βU}, with the tightest
/// envelope for the given proposal; when the proposal is the solved prior,
/// the target is the solved conditional.
pub fn rejection_sample(
    task: &TaskSpec,
    beta: InverseTemperature,
    proposal: &Distribution,
    observation: usize,
    n: usize,
    seed: u64,
) -> Result<RejectionReport, SamplerError> {
    assert_eq!(
        proposal.len(),
        task.n_actions(),
        "rejection_sample: proposal and action space disagree"
    );
    if observation >= task.n_observations() {
        return Err(SamplerError::UnknownObservation {
            index: observation,
            n_observations: task.n_observations(),
        });
    }
    if n == 0 {
        return Err(SamplerError::EmptySample);
    }
    if proposal.support().next().is_none() {
        return Err(SamplerError::SupportViolation);
    }
    let utilities = task.utility().row(observation);
    let u_max = proposal
        .support()
        .map(|i| utilities[i])
        .fold(f64::NEG_INFINITY, f64::max);

    let cdf = cumulative(proposal);
    let mut rng = SplitMix64::new(seed);
    let mut accepted = Vec::with_capacity(n);
    let mut proposals_used: u64 = 0;
    while accepted.len() < n {
        if proposals_used >= MAX_PROPOSALS {
            return Err(SamplerError::NonTerminating(proposals_used));
        }
        let index = draw(&cdf, rng.next_f64());
        proposals_used += 1;
        let accept_probability = (beta.value() * (utilities[index] - u_max)).exp();
        if rng.next_f64() < accept_probability {
            accepted.push(task.actions().label(index).to_string());
        }
    }
    Ok(RejectionReport {
        acceptance_rate: accepted.len() as f64 / proposals_used as f64,
        accepted,
        proposals_used,
        seed,
        rng_algorithm: RNG_ALGORITHM,
    })
}

/// The `k` highest-probability entries, descending, ties broken by label
/// order.
pub fn top_k(dist: &Distribution, labels: &[String], k: usize) -> Vec<(String, f64)> {
    assert_eq!(
        dist.len(),
        labels.len(),
        "top_k: distribution and labels disagree"
    );
    let mut order: Vec<usize> = (0..dist.len()).collect();
    order.sort_by(|&a, &b| {
        dist.get(b)
            .partial_cmp(&dist.get(a))
            .expect("finite probabilities")
            .then(a.cmp(&b))
    });
    order
        .into_iter()
        .take(k)
        .map(|i| (labels[i].clone(), dist.get(i)))
        .collect()
}

//! Information-theoretic measures over the domain types.
//!
//! Internal computation is in natural logarithms so the inverse temperature
//! keeps units of nats per utility unit; reported information quantities are
//! in bits. The continuous extension 0 · log 0 = 0 applies throughout.

use crate::types::{ConditionalPolicy, CoreError, Distribution, InverseTemperature, TaskSpec};

/// Shannon entropy in bits.
pub fn entropy(d: &Distribution) -> f64 {
    entropy_nats(d.as_slice()) / std::f64::consts::LN_2
}

pub(crate) fn entropy_nats(mass: &[f64]) -> f64 {
    let neg_sum: f64 = mass.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum();
    // avoid -0.0 on deterministic distributions
    (-neg_sum).max(0.0)
}

/// Kullback-Leibler divergence D(p ‖ q) in bits.
///
/// Requires support(p) ⊆ support(q); a positive p-entry over a zero q-entry
/// is a [`CoreError::SupportViolation`].
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<f64, CoreError> {
    Ok(kl_divergence_nats(p, q)? / std::f64::consts::LN_2)
}

pub(crate) fn kl_divergence_nats(p: &Distribution, q: &Distribution) -> Result<f64, CoreError> {
    if p.len() != q.len() {
        return Err(CoreError::ShapeMismatch {
            context: "kl divergence operands",
            expected: p.len(),
            found: q.len(),
        });
    }
    let mut sum = 0.0;
    for (index, (pi, qi)) in p.iter().zip(q.iter()).enumerate() {
        if pi > 0.0 {
            if qi == 0.0 {
                return Err(CoreError::SupportViolation { index });
            }
            sum += pi * (pi / qi).ln();
        }
    }
    Ok(sum.max(0.0))
}

/// Marginal action distribution p(x) = Σ_y p(y) p(x|y).
pub fn marginal(p_y: &Distribution, policy: &ConditionalPolicy) -> Distribution {
    assert_eq!(
        p_y.len(),
        policy.n_observations(),
        "marginal: p(y) and policy row count disagree"
    );
    let mix = raw_mixture(p_y, policy);
    Distribution::new(mix).expect("mixture of distributions is a distribution")
}

/// Exact mixture without the construction-time clamping, used internally so
/// KL terms against the mixture can never hit a manufactured zero.
fn raw_mixture(p_y: &Distribution, policy: &ConditionalPolicy) -> Vec<f64> {
    let mut mix = vec![0.0; policy.n_actions()];
    for (y, row) in policy.rows().iter().enumerate() {
        let weight = p_y[y];
        if weight == 0.0 {
            continue;
        }
        for (m, p) in mix.iter_mut().zip(row.iter()) {
            *m += weight * p;
        }
    }
    mix
}

/// Mutual information I(x; y) = Σ_y p(y) D(p(x|y) ‖ p(x)) in bits.
pub fn mutual_information(p_y: &Distribution, policy: &ConditionalPolicy) -> f64 {
    mutual_information_nats(p_y, policy) / std::f64::consts::LN_2
}

pub(crate) fn mutual_information_nats(p_y: &Distribution, policy: &ConditionalPolicy) -> f64 {
    assert_eq!(
        p_y.len(),
        policy.n_observations(),
        "mutual information: p(y) and policy row count disagree"
    );
    let mix = raw_mixture(p_y, policy);
    let mut nats = 0.0;
    for (y, row) in policy.rows().iter().enumerate() {
        let weight = p_y[y];
        if weight == 0.0 {
            continue;
        }
        for (p, m) in row.iter().zip(mix.iter()) {
            if p > 0.0 {
                nats += weight * p * (p / m).ln();
            }
        }
    }
    nats.max(0.0)
}

/// Expected utility E[U] = Σ_{x,y} p(y) p(x|y) U(x, y).
pub fn expected_utility(task: &TaskSpec, policy: &ConditionalPolicy) -> f64 {
    assert_eq!(
        task.n_observations(),
        policy.n_observations(),
        "expected utility: task and policy row count disagree"
    );
    assert_eq!(
        task.n_actions(),
        policy.n_actions(),
        "expected utility: task and policy action count disagree"
    );
    let mut total = 0.0;
    for (y, row) in policy.rows().iter().enumerate() {
        let weight = task.p_y()[y];
        if weight == 0.0 {
            continue;
        }
        let utilities = task.utility().row(y);
        total += weight
            * row
                .iter()
                .zip(utilities.iter())
                .map(|(p, u)| p * u)
                .sum::<f64>();
    }
    total
}

/// The trade-off objective E[U] − (1/β) I(x; y), in utility units.
///
/// The mutual-information term is evaluated in nats so β keeps its units.
pub fn objective(task: &TaskSpec, policy: &ConditionalPolicy, beta: InverseTemperature) -> f64 {
    expected_utility(task, policy) - mutual_information_nats(task.p_y(), policy) / beta.value()
}

//! Single-context bounded-rational solution for a fixed prior: the Boltzmann
//! posterior q(x) ∝ p₀(x) e^{βU(x)}, its log partition sum, and the
//! free-energy difference E_q[U] − (1/β) D(q ‖ p₀).
//!
//! All exponentiation is max-shifted over the prior's support, so utilities
//! scaled by β may sit hundreds of nats apart without overflow. A utility of
//! −∞ is accepted and excludes the action outright; NaN and +∞ are rejected.

use crate::measures::kl_divergence_nats;
use crate::types::{CoreError, Distribution, InverseTemperature};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FreeEnergyError {
    #[error("prior carries no mass on any finite-utility action")]
    DegeneratePrior,
    #[error("utility at index {index} is NaN or +inf")]
    NonFiniteUtility { index: usize },
    #[error("support violation at index {index}: q > 0 where p0 = 0")]
    SupportViolation { index: usize },
    #[error("expected {expected} utilities, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
}

fn check_inputs(p0: &Distribution, utilities: &[f64]) -> Result<(), FreeEnergyError> {
    if utilities.len() != p0.len() {
        return Err(FreeEnergyError::ShapeMismatch {
            expected: p0.len(),
            found: utilities.len(),
        });
    }
    for (index, &u) in utilities.iter().enumerate() {
        if u.is_nan() || u == f64::INFINITY {
            return Err(FreeEnergyError::NonFiniteUtility { index });
        }
    }
    Ok(())
}

/// Largest β·U over the prior's support, the shift that keeps every
/// exponent non-positive.
fn support_shift(
    p0: &Distribution,
    utilities: &[f64],
    beta: InverseTemperature,
) -> Result<f64, FreeEnergyError> {
    let mut shift = f64::NEG_INFINITY;
    for (i, &u) in utilities.iter().enumerate() {
        if p0[i] > 0.0 && u > f64::NEG_INFINITY {
            shift = shift.max(beta.value() * u);
        }
    }
    if shift == f64::NEG_INFINITY {
        return Err(FreeEnergyError::DegeneratePrior);
    }
    Ok(shift)
}

/// The optimizing posterior q(x) ∝ p₀(x) e^{βU(x)}.
///
/// Zero-mass prior entries stay exactly zero.
pub fn boltzmann_posterior(
    p0: &Distribution,
    utilities: &[f64],
    beta: InverseTemperature,
) -> Result<Distribution, FreeEnergyError> {
    check_inputs(p0, utilities)?;
    let shift = support_shift(p0, utilities, beta)?;
    let weights: Vec<f64> = p0
        .iter()
        .zip(utilities.iter())
        .map(|(p, &u)| {
            if p > 0.0 && u > f64::NEG_INFINITY {
                p * (beta.value() * u - shift).exp()
            } else {
                0.0
            }
        })
        .collect();
    Distribution::from_weights(weights).map_err(|_| FreeEnergyError::DegeneratePrior)
}

/// ln Z = ln Σ_x p₀(x) e^{βU(x)}, evaluated in shifted form.
pub fn log_partition(
    p0: &Distribution,
    utilities: &[f64],
    beta: InverseTemperature,
) -> Result<f64, FreeEnergyError> {
    check_inputs(p0, utilities)?;
    let shift = support_shift(p0, utilities, beta)?;
    let sum: f64 = p0
        .iter()
        .zip(utilities.iter())
        .filter(|(p, &u)| *p > 0.0 && u > f64::NEG_INFINITY)
        .map(|(p, &u)| p * (beta.value() * u - shift).exp())
        .sum();
    Ok(shift + sum.ln())
}

/// ΔF[q] = E_q[U] − (1/β) D(q ‖ p₀), in utility units.
///
/// For q = [`boltzmann_posterior`] this equals (1/β) ln Z; for any other q it
/// is strictly smaller.
pub fn free_energy_difference(
    q: &Distribution,
    p0: &Distribution,
    utilities: &[f64],
    beta: InverseTemperature,
) -> Result<f64, FreeEnergyError> {
    check_inputs(p0, utilities)?;
    if q.len() != p0.len() {
        return Err(FreeEnergyError::ShapeMismatch {
            expected: p0.len(),
            found: q.len(),
        });
    }
    let kl = kl_divergence_nats(q, p0).map_err(|err| match err {
        CoreError::SupportViolation { index } => FreeEnergyError::SupportViolation { index },
        _ => FreeEnergyError::ShapeMismatch {
            expected: p0.len(),
            found: q.len(),
        },
    })?;
    let expected: f64 = q
        .iter()
        .zip(utilities.iter())
        .filter(|(p, _)| *p > 0.0)
        .map(|(p, &u)| p * u)
        .sum();
    Ok(expected - kl / beta.value())
}

/// Full report for one prior/utility/β triple.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeEnergyReport {
    pub posterior: Distribution,
    /// ln Z in nats.
    pub log_partition: f64,
    /// ΔF at the optimizing posterior, equal to ln Z / β.
    pub delta_f: f64,
    pub expected_utility: f64,
    pub kl_cost_bits: f64,
}

/// Solves the single-context problem and reports the posterior together with
/// its diagnostics.
pub fn analyze(
    p0: &Distribution,
    utilities: &[f64],
    beta: InverseTemperature,
) -> Result<FreeEnergyReport, FreeEnergyError> {
    let posterior = boltzmann_posterior(p0, utilities, beta)?;
    let log_partition = log_partition(p0, utilities, beta)?;
    let expected_utility: f64 = posterior
        .iter()
        .zip(utilities.iter())
        .filter(|(p, _)| *p > 0.0)
        .map(|(p, &u)| p * u)
        .sum();
    let kl_nats = kl_divergence_nats(&posterior, p0).expect("posterior support within prior");
    Ok(FreeEnergyReport {
        posterior,
        log_partition,
        delta_f: expected_utility - kl_nats / beta.value(),
        expected_utility,
        kl_cost_bits: kl_nats / std::f64::consts::LN_2,
    })
}

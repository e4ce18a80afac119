//! Alternating self-consistent solver for the full multi-task problem at a
//! fixed inverse temperature.
//!
//! Each iteration applies the Boltzmann update to every policy row against
//! the current prior, then replaces the prior with the policy's marginal.
//! The objective E[U] − (1/β) I(x;y) is non-decreasing along this iteration,
//! and actions whose prior mass is clamped to zero never return: support can
//! only shrink within a single solve.
//!
//! Convergence requires two conditions. The prior must move less than
//! `tolerance` in sup-norm, and no surviving action may still be growing
//! geometrically. The second check matters because a reopened near-zero
//! entry (for example a warm start floored at 1e-12 during an annealed
//! sweep) can grow by a factor per iteration while its absolute change sits
//! far below any reasonable tolerance; the growth-factor check keeps the
//! solver iterating until such a mode either takes off or dies.

use crate::measures;
use crate::types::{ConditionalPolicy, Distribution, InverseTemperature, TaskSpec, MASS_CLAMP};
use thiserror::Error;

/// A surviving action counts as stationary once its per-iteration growth
/// factor is below 1 + this margin.
const SUPPORT_GROWTH_MARGIN: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
}

/// Options for [`solve`].
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Initial prior over actions; `None` selects the uniform distribution,
    /// which is strictly positive and preserves problem symmetries. A given
    /// prior must be strictly positive on every action.
    pub init_prior: Option<Distribution>,
    /// Sup-norm threshold on the prior change per iteration.
    pub tolerance: f64,
    /// Iteration budget; hitting it flags the result as not converged.
    pub max_iterations: usize,
    /// Record the objective after every full iteration in
    /// [`SolveResult::objective_trace`].
    pub record_objective_trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            init_prior: None,
            tolerance: 1e-10,
            max_iterations: 100_000,
            record_objective_trace: false,
        }
    }
}

impl SolverOptions {
    /// Per-point options for annealed sweeps: a bounded relaxation budget per
    /// β step. Quasi-static annealing needs each step to relax only a little
    /// beyond its warm start; a large budget would let near-critical points
    /// jump across a phase transition in a single step instead of resolving
    /// it over many.
    pub fn for_annealing() -> Self {
        Self {
            max_iterations: 150,
            ..Self::default()
        }
    }
}

/// Converged (or budget-capped) solution with its diagnostics.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub policy: ConditionalPolicy,
    /// Marginal of the policy under p(y); equals the self-consistent prior.
    pub prior: Distribution,
    pub iterations: usize,
    pub converged: bool,
    /// Some action's mass was still growing geometrically when the solve
    /// stopped: the iterate sat on a destabilized branch and had not
    /// finished reallocating. Always false on converged results. Along an
    /// annealed sweep this flags the phase-transition points, as opposed to
    /// runs that merely ran out of budget while decaying a stable tail.
    pub growth_active: bool,
    /// E[U] − (1/β) I(x;y) in utility units.
    pub objective: f64,
    pub expected_utility: f64,
    pub mutual_information_bits: f64,
    pub h_marginal_bits: f64,
    pub h_conditional_bits: f64,
    /// Objective after each full iteration; empty unless requested.
    pub objective_trace: Vec<f64>,
}

fn clamp_normalize(mass: &mut [f64]) {
    let mut sum = 0.0;
    for value in mass.iter_mut() {
        if *value < MASS_CLAMP {
            *value = 0.0;
        }
        sum += *value;
    }
    if (sum - 1.0).abs() > 1e-12 {
        for value in mass.iter_mut() {
            *value /= sum;
        }
    }
}

/// Trade-off objective of a raw row set, measured against its own mixture.
fn raw_objective(task: &TaskSpec, rows: &[Vec<f64>], beta: f64) -> f64 {
    let p_y = task.p_y();
    let nx = task.n_actions();
    let mut mix = vec![0.0; nx];
    let mut expected = 0.0;
    for (y, row) in rows.iter().enumerate() {
        let w = p_y[y];
        if w == 0.0 {
            continue;
        }
        let utilities = task.utility().row(y);
        for i in 0..nx {
            mix[i] += w * row[i];
            expected += w * row[i] * utilities[i];
        }
    }
    let mut mi_nats = 0.0;
    for (y, row) in rows.iter().enumerate() {
        let w = p_y[y];
        if w == 0.0 {
            continue;
        }
        for i in 0..nx {
            if row[i] > 0.0 {
                mi_nats += w * row[i] * (row[i] / mix[i]).ln();
            }
        }
    }
    expected - mi_nats.max(0.0) / beta
}

/// Runs the alternating iteration on `task` at inverse temperature `beta`.
///
/// The returned pair always satisfies prior = marginal(p(y), policy) to
/// construction precision; `converged` reports whether the stopping rule was
/// met within the iteration budget.
pub fn solve(
    task: &TaskSpec,
    beta: InverseTemperature,
    options: &SolverOptions,
) -> Result<SolveResult, SolveError> {
    if !(options.tolerance > 0.0 && options.tolerance.is_finite()) {
        return Err(SolveError::InvalidOptions(format!(
            "tolerance must be positive and finite, got {}",
            options.tolerance
        )));
    }
    if options.max_iterations == 0 {
        return Err(SolveError::InvalidOptions(
            "max_iterations must be at least 1".into(),
        ));
    }

    let ny = task.n_observations();
    let nx = task.n_actions();
    let b = beta.value();
    let p_y = task.p_y();

    let mut prior: Vec<f64> = match &options.init_prior {
        None => vec![1.0 / nx as f64; nx],
        Some(init) => {
            if init.len() != nx {
                return Err(SolveError::InvalidTask(format!(
                    "init prior has {} entries for {} actions",
                    init.len(),
                    nx
                )));
            }
            if init.iter().any(|p| p <= 0.0) {
                return Err(SolveError::InvalidOptions(
                    "init prior must be strictly positive on every action".into(),
                ));
            }
            init.as_slice().to_vec()
        }
    };

    let mut rows = vec![vec![0.0; nx]; ny];
    let mut new_prior = vec![0.0; nx];
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut last_growth_max = 0.0f64;

    while iterations < options.max_iterations {
        iterations += 1;

        new_prior.iter_mut().for_each(|v| *v = 0.0);
        for y in 0..ny {
            let utilities = task.utility().row(y);
            let mut shift = f64::NEG_INFINITY;
            for i in 0..nx {
                if prior[i] > 0.0 {
                    shift = shift.max(b * utilities[i]);
                }
            }
            let row = &mut rows[y];
            let mut z = 0.0;
            for i in 0..nx {
                let w = if prior[i] > 0.0 {
                    prior[i] * (b * utilities[i] - shift).exp()
                } else {
                    0.0
                };
                row[i] = w;
                z += w;
            }
            let inv_z = 1.0 / z;
            let weight = p_y[y];
            for i in 0..nx {
                row[i] *= inv_z;
                new_prior[i] += weight * row[i];
            }
        }

        // Growth factor of every surviving action, taken before clamping.
        let mut growth_max = 0.0f64;
        for i in 0..nx {
            if prior[i] > 0.0 {
                growth_max = growth_max.max(new_prior[i] / prior[i]);
            }
        }

        last_growth_max = growth_max;
        clamp_normalize(&mut new_prior);

        let mut delta = 0.0f64;
        for i in 0..nx {
            delta = delta.max((new_prior[i] - prior[i]).abs());
        }
        std::mem::swap(&mut prior, &mut new_prior);

        if options.record_objective_trace {
            trace.push(raw_objective(task, &rows, b));
        }

        if delta < options.tolerance && growth_max <= 1.0 + SUPPORT_GROWTH_MARGIN {
            converged = true;
            break;
        }
    }

    let policy = ConditionalPolicy::new(
        rows.into_iter()
            .map(|row| Distribution::new(row).expect("normalized policy row"))
            .collect(),
    )
    .expect("policy rows share the action count");
    let prior = measures::marginal(p_y, &policy);

    let expected_utility = measures::expected_utility(task, &policy);
    let mi_nats = crate::measures::mutual_information_nats(p_y, &policy);
    let h_marginal_bits = measures::entropy(&prior);
    let h_conditional_bits = (0..ny)
        .map(|y| p_y[y] * measures::entropy(policy.row(y)))
        .sum::<f64>();

    Ok(SolveResult {
        policy,
        prior,
        iterations,
        converged,
        growth_active: !converged && last_growth_max > 1.0 + SUPPORT_GROWTH_MARGIN,
        objective: expected_utility - mi_nats / b,
        expected_utility,
        mutual_information_bits: mi_nats / std::f64::consts::LN_2,
        h_marginal_bits,
        h_conditional_bits,
        objective_trace: trace,
    })
}

/// Sup-norm defect of a result under the two self-consistency equations:
/// the policy against the Boltzmann update of the returned prior, and the
/// prior against the policy's marginal.
pub fn fixed_point_residual(
    task: &TaskSpec,
    beta: InverseTemperature,
    result: &SolveResult,
) -> f64 {
    let mut residual = 0.0f64;
    for y in 0..task.n_observations() {
        let target =
            crate::free_energy::boltzmann_posterior(&result.prior, task.utility().row(y), beta)
                .expect("valid task utilities");
        let row = result.policy.row(y);
        for i in 0..task.n_actions() {
            residual = residual.max((row.get(i) - target.get(i)).abs());
        }
    }
    let mix = measures::marginal(task.p_y(), &result.policy);
    for i in 0..task.n_actions() {
        residual = residual.max((result.prior.get(i) - mix.get(i)).abs());
    }
    residual
}

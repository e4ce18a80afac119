//! Bounded-rational decision policies for multi-task problems.
//!
//! A decision-maker observing which of several tasks it faces picks actions
//! under a budget on the mutual information between observations and
//! actions. The optimal trade-off maximizes expected utility minus
//! (1/β) · I(x;y); its self-consistent solution couples a Boltzmann policy
//! per observation with the shared marginal prior, and is computed here by
//! an alternating (Blahut-Arimoto-type) iteration.
//!
//! Modules:
//! - [`types`]: labeled spaces, utility tables, simplex points, task specs.
//! - [`measures`]: entropy, KL divergence, marginal, mutual information,
//!   expected utility, and the trade-off objective.
//! - [`free_energy`]: the single-context Boltzmann posterior and the
//!   free-energy difference it optimizes.
//! - [`solver`]: the alternating solver for a full task at fixed β.
//! - [`sweep`]: β-sweeps, the rate-utility curve, and transition detection.
//! - [`tasks`]: built-in benchmark tasks, grid utilities, and task-file I/O.
//! - [`sampler`]: seeded sampling, rejection sampling, and top-k reporting.
//!
//! ```
//! use ratebound::prelude::*;
//!
//! let task = ratebound::tasks::two_task_problem();
//! let beta = InverseTemperature::new(100.0).unwrap();
//! let result = solve(&task, beta, &SolverOptions::default()).unwrap();
//! assert!(result.converged);
//! assert!((result.expected_utility - 1.0).abs() < 1e-6);
//! assert!((result.mutual_information_bits - 1.0).abs() < 1e-6);
//! ```

pub mod free_energy;
pub mod measures;
pub mod sampler;
pub mod solver;
pub mod sweep;
pub mod tasks;
pub mod types;

pub use solver::{fixed_point_residual, solve, SolveError, SolveResult, SolverOptions};
pub use types::{
    ActionSpace, ConditionalPolicy, CoreError, Distribution, InverseTemperature, ObservationSpace,
    TaskSpec, UtilityTable,
};

/// The names almost every caller wants in scope.
pub mod prelude {
    pub use crate::measures::{
        entropy, expected_utility, kl_divergence, marginal, mutual_information, objective,
    };
    pub use crate::solver::{fixed_point_residual, solve, SolveResult, SolverOptions};
    pub use crate::sweep::{
        detect_transition, rate_utility_curve, sweep, Spacing, SweepRecord, SweepSchedule,
    };
    pub use crate::types::{
        ActionSpace, ConditionalPolicy, Distribution, InverseTemperature, ObservationSpace,
        TaskSpec, UtilityTable,
    };
}

//! Run manifest embedded in (or written beside) every output artifact.
//!
//! The manifest records everything needed to re-run the command: the command
//! line, task source, β or schedule, solver options, seed, and tool version.
//! Re-running it reproduces the artifact payload byte-for-byte; the recorded
//! wall time is the one field that varies between runs.

use ratebound::solver::SolverOptions;
use ratebound::sweep::{Spacing, SweepSchedule};
use serde::Serialize;
use std::time::Instant;

#[derive(Debug, Clone, Serialize)]
pub struct SolverOptionsManifest {
    pub init_prior: String,
    pub tolerance: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScheduleManifest {
    pub beta_min: f64,
    pub beta_max: f64,
    pub points: usize,
    pub spacing: String,
    pub annealed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command_line: Vec<String>,
    pub task_source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleManifest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver_options: Option<SolverOptionsManifest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub wall_time_ms: f64,
}

impl RunManifest {
    pub fn new(command_line: Vec<String>, task_source: String) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command_line,
            task_source,
            beta: None,
            schedule: None,
            solver_options: None,
            seed: None,
            wall_time_ms: 0.0,
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn with_schedule(mut self, schedule: &SweepSchedule) -> Self {
        self.schedule = Some(ScheduleManifest {
            beta_min: schedule.beta_min,
            beta_max: schedule.beta_max,
            points: schedule.points,
            spacing: match schedule.spacing {
                Spacing::Logarithmic => "logarithmic",
                Spacing::Linear => "linear",
                Spacing::InverseLinear => "inverse_linear",
            }
            .to_string(),
            annealed: schedule.annealed,
        });
        self
    }

    pub fn with_solver_options(mut self, options: &SolverOptions) -> Self {
        self.solver_options = Some(SolverOptionsManifest {
            init_prior: match options.init_prior {
                None => "uniform".to_string(),
                Some(_) => "explicit".to_string(),
            },
            tolerance: options.tolerance,
            max_iterations: options.max_iterations,
        });
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn finish(mut self, started: Instant) -> Self {
        self.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
        self
    }
}

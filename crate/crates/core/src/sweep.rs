//! β-sweeps: tracing the rationality transition, the rate-utility curve, and
//! locating phase transitions by the marginal-entropy peak.
//!
//! The annealed mode sweeps from `beta_max` downward, warm-starting every
//! solve from the previous point's prior floored at [`WARM_START_FLOOR`] so
//! support collapsed at high β can reopen as β decreases. A warm-started
//! point that still has geometrically growing actions when its budget runs
//! out marks a phase transition: the continuation branch destabilized and
//! mass is reallocating. Such a point is re-run from the schedule's base
//! initialization so the record reflects the relaxation from the unbiased
//! symmetric start rather than a half-dead branch. Budget-capped points
//! that are merely decaying a stable tail keep their warm-started result. Use a bounded per-point budget ([`SolverOptions::for_annealing`])
//! for annealed sweeps: critical points cannot equilibrate at any finite
//! budget, and a huge budget only makes them jump the transition in one step
//! instead of resolving it across neighboring β points.

use crate::solver::{solve, SolveError, SolveResult, SolverOptions};
use crate::types::{Distribution, InverseTemperature, TaskSpec};
use thiserror::Error;

/// Floor applied to warm-start priors so collapsed support can reopen.
pub const WARM_START_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("schedule needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("no records given")]
    EmptyInput,
    #[error("solver failed at beta {beta}: {source}")]
    Solve {
        beta: f64,
        #[source]
        source: SolveError,
    },
}

/// How the β grid is spaced between `beta_min` and `beta_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    /// Geometric in β.
    Logarithmic,
    /// Arithmetic in β.
    Linear,
    /// Arithmetic in 1/β, the axis of the transition plots.
    InverseLinear,
}

#[derive(Debug, Clone)]
pub struct SweepSchedule {
    pub beta_min: f64,
    pub beta_max: f64,
    pub points: usize,
    pub spacing: Spacing,
    /// Sweep from `beta_max` downward, warm-starting each solve from the
    /// previous β's result.
    pub annealed: bool,
}

impl SweepSchedule {
    pub fn new(
        beta_min: f64,
        beta_max: f64,
        points: usize,
        spacing: Spacing,
        annealed: bool,
    ) -> Result<Self, SweepError> {
        if points < 2 {
            return Err(SweepError::TooFewPoints(points));
        }
        if !(beta_min.is_finite() && beta_max.is_finite() && beta_min > 0.0) {
            return Err(SweepError::InvalidSchedule(format!(
                "beta range must be positive and finite, got [{beta_min}, {beta_max}]"
            )));
        }
        if beta_min >= beta_max {
            return Err(SweepError::InvalidSchedule(format!(
                "beta_min {beta_min} must be below beta_max {beta_max}"
            )));
        }
        Ok(Self {
            beta_min,
            beta_max,
            points,
            spacing,
            annealed,
        })
    }

    /// Schedule over an inverse-temperature axis `1/β ∈ [inv_min, inv_max]`,
    /// spaced linearly in 1/β.
    pub fn from_inv_beta_range(
        inv_min: f64,
        inv_max: f64,
        points: usize,
        annealed: bool,
    ) -> Result<Self, SweepError> {
        if !(inv_min.is_finite() && inv_max.is_finite() && inv_min > 0.0 && inv_min < inv_max) {
            return Err(SweepError::InvalidSchedule(format!(
                "inverse-beta range must be positive with inv_min < inv_max, got [{inv_min}, {inv_max}]"
            )));
        }
        Self::new(
            1.0 / inv_max,
            1.0 / inv_min,
            points,
            Spacing::InverseLinear,
            annealed,
        )
    }

    /// The β grid in sweep order: descending when annealed, ascending
    /// otherwise.
    pub fn beta_grid(&self) -> Vec<f64> {
        let n = self.points;
        let mut grid: Vec<f64> = (0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Logarithmic => {
                        (self.beta_min.ln() + t * (self.beta_max / self.beta_min).ln()).exp()
                    }
                    Spacing::Linear => self.beta_min + t * (self.beta_max - self.beta_min),
                    Spacing::InverseLinear => {
                        // walk 1/β from its largest value down so β ascends
                        let inv_low = 1.0 / self.beta_max;
                        let inv_high = 1.0 / self.beta_min;
                        1.0 / (inv_high - t * (inv_high - inv_low))
                    }
                }
            })
            .collect();
        // close the grid exactly on the endpoints
        grid[0] = self.beta_min;
        grid[n - 1] = self.beta_max;
        if self.annealed {
            grid.reverse();
        }
        grid
    }
}

/// All scalar diagnostics of one solve at one β; the row type of the
/// rate-utility curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub beta: f64,
    pub inv_beta: f64,
    pub expected_utility: f64,
    pub mutual_information_bits: f64,
    pub h_marginal_bits: f64,
    pub h_conditional_bits: f64,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SweepRecord {
    fn from_result(beta: f64, result: &SolveResult) -> Self {
        Self {
            beta,
            inv_beta: 1.0 / beta,
            expected_utility: result.expected_utility,
            mutual_information_bits: result.mutual_information_bits,
            h_marginal_bits: result.h_marginal_bits,
            h_conditional_bits: result.h_conditional_bits,
            objective: result.objective,
            iterations: result.iterations,
            converged: result.converged,
        }
    }
}

fn floored_warm_start(prior: &Distribution) -> Distribution {
    let floored: Vec<f64> = prior.iter().map(|p| p.max(WARM_START_FLOOR)).collect();
    Distribution::from_weights(floored).expect("floored prior has positive mass")
}

/// Runs one solve per β point. Non-converged points are recorded, not fatal;
/// solver configuration errors abort the sweep.
pub fn sweep(
    task: &TaskSpec,
    schedule: &SweepSchedule,
    options: &SolverOptions,
) -> Result<Vec<SweepRecord>, SweepError> {
    let grid = schedule.beta_grid();
    let mut records = Vec::with_capacity(grid.len());
    let mut warm: Option<Distribution> = None;
    for beta_value in grid {
        let beta =
            InverseTemperature::new(beta_value).expect("schedule grid is positive and finite");
        let result = match (&warm, schedule.annealed) {
            (Some(prev), true) => {
                let mut point_options = options.clone();
                point_options.init_prior = Some(floored_warm_start(prev));
                let continued =
                    solve(task, beta, &point_options).map_err(|source| SweepError::Solve {
                        beta: beta_value,
                        source,
                    })?;
                if continued.converged || !continued.growth_active {
                    continued
                } else {
                    // The continuation branch destabilized: a transition
                    // point. Record the relaxation from the base
                    // initialization instead.
                    solve(task, beta, options).map_err(|source| SweepError::Solve {
                        beta: beta_value,
                        source,
                    })?
                }
            }
            _ => solve(task, beta, options).map_err(|source| SweepError::Solve {
                beta: beta_value,
                source,
            })?,
        };
        if schedule.annealed {
            warm = Some(result.prior.clone());
        }
        records.push(SweepRecord::from_result(beta_value, &result));
    }
    Ok(records)
}

/// Like [`sweep`], but evaluates non-annealed grids on up to `threads`
/// worker threads. Annealed schedules are inherently sequential and fall
/// back to [`sweep`].
pub fn sweep_parallel(
    task: &TaskSpec,
    schedule: &SweepSchedule,
    options: &SolverOptions,
    threads: usize,
) -> Result<Vec<SweepRecord>, SweepError> {
    if schedule.annealed || threads <= 1 {
        return sweep(task, schedule, options);
    }
    let grid = schedule.beta_grid();
    let workers = threads.min(grid.len());
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<Result<SweepRecord, SweepError>>> = Vec::new();
    slots.resize_with(grid.len(), || None);
    let slots = std::sync::Mutex::new(slots);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if index >= grid.len() {
                    break;
                }
                let beta_value = grid[index];
                let beta = InverseTemperature::new(beta_value)
                    .expect("schedule grid is positive and finite");
                let outcome = solve(task, beta, options)
                    .map(|result| SweepRecord::from_result(beta_value, &result))
                    .map_err(|source| SweepError::Solve {
                        beta: beta_value,
                        source,
                    });
                slots.lock().unwrap()[index] = Some(outcome);
            });
        }
    });

    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|slot| slot.expect("every grid point was evaluated"))
        .collect()
}

/// The rate-utility frontier: (expected utility, rate in bits) pairs sorted
/// by expected utility ascending. Rates are taken verbatim from the records.
pub fn rate_utility_curve(records: &[SweepRecord]) -> Result<Vec<(f64, f64)>, SweepError> {
    if records.is_empty() {
        return Err(SweepError::EmptyInput);
    }
    let mut pairs: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (r.expected_utility, r.mutual_information_bits))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite expected utilities"));
    Ok(pairs)
}

/// An interior peak of the marginal entropy H(x) along a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    /// Index into the record sequence.
    pub index: usize,
    /// Peak marginal entropy in bits.
    pub h_marginal_bits: f64,
}

/// Minimum excess of a peak over both endpoints to count as a transition.
const TRANSITION_MIN_EXCESS_BITS: f64 = 0.01;

/// Locates the phase-transition signature: a strict interior local maximum
/// of H(x) exceeding both endpoint values by at least 0.01 bits. Returns
/// `None` when the sweep has no such peak.
pub fn detect_transition(records: &[SweepRecord]) -> Result<Option<Transition>, SweepError> {
    if records.len() < 3 {
        return Err(SweepError::TooFewPoints(records.len()));
    }
    let mut peak = 0usize;
    for (i, record) in records.iter().enumerate() {
        if record.h_marginal_bits > records[peak].h_marginal_bits {
            peak = i;
        }
    }
    if peak == 0 || peak == records.len() - 1 {
        return Ok(None);
    }
    let h = records[peak].h_marginal_bits;
    let strict_local_max =
        h > records[peak - 1].h_marginal_bits && h > records[peak + 1].h_marginal_bits;
    let exceeds_ends = h >= records[0].h_marginal_bits + TRANSITION_MIN_EXCESS_BITS
        && h >= records[records.len() - 1].h_marginal_bits + TRANSITION_MIN_EXCESS_BITS;
    if strict_local_max && exceeds_ends {
        Ok(Some(Transition {
            index: peak,
            h_marginal_bits: h,
        }))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tasks::two_task_problem;
    use crate::types::{ActionSpace, Distribution, ObservationSpace, UtilityTable};

    fn single_observation_task() -> TaskSpec {
        TaskSpec::new(
            ActionSpace::new(["a", "b", "c"]).unwrap(),
            ObservationSpace::new(["y0"]).unwrap(),
            UtilityTable::from_rows(vec![vec![0.1, 0.9, 0.4]]).unwrap(),
            Distribution::uniform(1),
        )
        .unwrap()
    }

    #[test]
    fn schedule_validation() {
        assert!(matches!(
            SweepSchedule::new(1.0, 2.0, 1, Spacing::Linear, false),
            Err(SweepError::TooFewPoints(1))
        ));
        assert!(matches!(
            SweepSchedule::new(2.0, 1.0, 10, Spacing::Linear, false),
            Err(SweepError::InvalidSchedule(_))
        ));
        assert!(matches!(
            SweepSchedule::new(0.0, 1.0, 10, Spacing::Linear, false),
            Err(SweepError::InvalidSchedule(_))
        ));
    }

    #[test]
    fn grids_hit_endpoints_in_sweep_order() {
        let schedule = SweepSchedule::new(1.0, 20.0, 5, Spacing::Logarithmic, false).unwrap();
        let grid = schedule.beta_grid();
        assert_eq!(grid[0], 1.0);
        assert_eq!(grid[4], 20.0);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));

        let annealed = SweepSchedule::new(1.0, 20.0, 5, Spacing::Logarithmic, true).unwrap();
        let grid = annealed.beta_grid();
        assert_eq!(grid[0], 20.0);
        assert_eq!(grid[4], 1.0);

        let inv = SweepSchedule::from_inv_beta_range(0.05, 1.0, 4, true).unwrap();
        let grid = inv.beta_grid();
        assert_eq!(grid[0], 20.0);
        assert_eq!(grid[3], 1.0);
        // uniform in 1/beta
        let inv_betas: Vec<f64> = grid.iter().map(|b| 1.0 / b).collect();
        let step = inv_betas[1] - inv_betas[0];
        for w in inv_betas.windows(2) {
            assert!((w[1] - w[0] - step).abs() < 1e-12);
        }
    }

    #[test]
    fn near_equal_points_give_near_identical_records() {
        let task = two_task_problem();
        let schedule = SweepSchedule::new(3.0, 3.0 + 1e-9, 2, Spacing::Linear, false).unwrap();
        let records = sweep(&task, &schedule, &SolverOptions::default()).unwrap();
        assert_eq!(records.len(), 2);
        assert!((records[0].expected_utility - records[1].expected_utility).abs() < 1e-6);
        assert!(
            (records[0].mutual_information_bits - records[1].mutual_information_bits).abs() < 1e-6
        );
        assert!((records[0].h_marginal_bits - records[1].h_marginal_bits).abs() < 1e-6);
    }

    #[test]
    fn record_identity_holds() {
        let task = two_task_problem();
        let schedule = SweepSchedule::new(0.5, 50.0, 20, Spacing::Logarithmic, true).unwrap();
        let records = sweep(&task, &schedule, &SolverOptions::for_annealing()).unwrap();
        for r in &records {
            let identity = r.h_marginal_bits - r.h_conditional_bits;
            assert!((r.mutual_information_bits - identity).abs() < 1e-9);
        }
    }

    #[test]
    fn single_observation_sweep_is_flat_at_zero_rate() {
        let task = single_observation_task();
        let schedule = SweepSchedule::new(0.1, 10.0, 12, Spacing::Logarithmic, false).unwrap();
        let records = sweep(&task, &schedule, &SolverOptions::default()).unwrap();
        for r in &records {
            assert!(r.mutual_information_bits < 1e-9);
        }
        let curve = rate_utility_curve(&records).unwrap();
        assert!(curve.iter().all(|(_, rate)| *rate < 1e-9));
        assert_eq!(detect_transition(&records).unwrap(), None);
    }

    #[test]
    fn rate_utility_curve_sorts_deterministically() {
        let task = two_task_problem();
        let schedule = SweepSchedule::from_inv_beta_range(0.05, 1.0, 50, true).unwrap();
        let records = sweep(&task, &schedule, &SolverOptions::for_annealing()).unwrap();
        let forward = rate_utility_curve(&records).unwrap();
        let mut reversed = records.clone();
        reversed.reverse();
        assert_eq!(forward, rate_utility_curve(&reversed).unwrap());
        assert!(forward.windows(2).all(|w| w[0].0 <= w[1].0));

        assert_eq!(rate_utility_curve(&[]).unwrap_err(), SweepError::EmptyInput);
    }

    #[test]
    fn detect_transition_needs_three_points() {
        let task = two_task_problem();
        let schedule = SweepSchedule::new(1.0, 2.0, 2, Spacing::Linear, false).unwrap();
        let records = sweep(&task, &schedule, &SolverOptions::default()).unwrap();
        assert_eq!(
            detect_transition(&records).unwrap_err(),
            SweepError::TooFewPoints(2)
        );
    }

    #[test]
    fn parallel_matches_sequential_for_non_annealed() {
        let task = two_task_problem();
        let schedule = SweepSchedule::new(0.5, 20.0, 16, Spacing::Logarithmic, false).unwrap();
        let sequential = sweep(&task, &schedule, &SolverOptions::default()).unwrap();
        let parallel = sweep_parallel(&task, &schedule, &SolverOptions::default(), 4).unwrap();
        assert_eq!(sequential, parallel);
    }
}

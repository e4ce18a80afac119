//! Experiment-level integration tests beyond the acceptance criteria:
//! the grid merge along an annealed sweep, the long two-task sweep, and
//! large-sample behavior of the samplers.

use ratebound::sampler::{sample, top_k};
use ratebound::solver::{solve, SolverOptions};
use ratebound::sweep::{detect_transition, sweep, SweepSchedule};
use ratebound::tasks::{grid_task, two_task_problem};
use ratebound::types::{Distribution, InverseTemperature};

fn beta(b: f64) -> InverseTemperature {
    InverseTemperature::new(b).unwrap()
}

#[test]
fn grid_sweep_merges_task3_patterns_into_the_shared_set() {
    let task = grid_task(3).unwrap();

    // At beta = 10 the prior carries the 9 shared four-pixel patterns at
    // 2/27 and the 9 eight-pixel patterns at 1/27; at beta = 0.1 the
    // eight-pixel set has merged away and only the shared 9 remain.
    let high = solve(&task, beta(10.0), &SolverOptions::default()).unwrap();
    assert_eq!(high.prior.support_size_above(1e-6), 18);
    let low = solve(&task, beta(0.1), &SolverOptions::default()).unwrap();
    assert_eq!(low.prior.support_size_above(1e-6), 9);

    // Along the annealed sweep the marginal entropy runs from the 18-pattern
    // mixture value down to log2(9) as the sets merge; the decline is
    // monotone, so the peak detector reports no interior peak here.
    let schedule = SweepSchedule::from_inv_beta_range(0.05, 12.0, 60, true).unwrap();
    let records = sweep(&task, &schedule, &SolverOptions::for_annealing()).unwrap();
    let first = records.first().unwrap();
    let last = records.last().unwrap();
    let mixed_entropy =
        -(2.0 / 3.0) * (2.0f64 / 27.0).log2() - (1.0 / 3.0) * (1.0f64 / 27.0).log2();
    assert!((first.h_marginal_bits - mixed_entropy).abs() < 1e-3);
    assert!((last.h_marginal_bits - 9.0f64.log2()).abs() < 1e-3);
    assert_eq!(detect_transition(&records).unwrap(), None);
    for pair in records.windows(2) {
        assert!(pair[1].h_marginal_bits <= pair[0].h_marginal_bits + 1e-6);
    }
}

#[test]
fn two_task_long_sweep_is_monotone_between_the_limits() {
    let task = two_task_problem();
    let schedule = SweepSchedule::from_inv_beta_range(0.01, 1.0, 200, true).unwrap();
    let records = sweep(&task, &schedule, &SolverOptions::for_annealing()).unwrap();

    let first = records.first().unwrap();
    let last = records.last().unwrap();
    assert!((first.expected_utility - 1.0).abs() < 1e-6);
    assert!((first.mutual_information_bits - 1.0).abs() < 1e-6);
    assert!((last.expected_utility - 0.7).abs() < 1e-6);
    assert!(last.mutual_information_bits < 1e-6);

    for pair in records.windows(2) {
        assert!(pair[1].expected_utility <= pair[0].expected_utility + 1e-9);
        assert!(pair[1].mutual_information_bits <= pair[0].mutual_information_bits + 1e-9);
    }
}

#[test]
fn sampled_grid_conditional_only_emits_maximal_utility_patterns() {
    let task = grid_task(3).unwrap();
    let solved = solve(&task, beta(10.0), &SolverOptions::default()).unwrap();
    let report = sample(
        solved.policy.row(0),
        task.actions().labels(),
        100_000,
        20_240_101,
    )
    .unwrap();
    let task1 = task.observations().index_of("task1").unwrap();
    for (label, count) in &report.distinct {
        let x = task.actions().index_of(label).unwrap();
        assert_eq!(
            task.utility().get(task1, x),
            4.0,
            "pattern {label} x{count}"
        );
    }
    // nine patterns, each near 1/9 of the draws
    assert_eq!(report.distinct.len(), 9);
    for count in report.distinct.values() {
        assert!((*count as f64 / 100_000.0 - 1.0 / 9.0).abs() < 0.01);
    }
}

#[test]
fn top_k_exposes_the_two_tier_grid_prior() {
    let task = grid_task(3).unwrap();
    let solved = solve(&task, beta(10.0), &SolverOptions::default()).unwrap();
    let top = top_k(&solved.prior, task.actions().labels(), 18);
    assert_eq!(top.len(), 18);
    for (label, p) in &top[..9] {
        assert!((p - 2.0 / 27.0).abs() < 1e-6, "{label}: {p}");
    }
    for (label, p) in &top[9..] {
        assert!((p - 1.0 / 27.0).abs() < 1e-6, "{label}: {p}");
    }
    // tier membership: the first nine are the shared task-1 maximizers,
    // the next nine the eight-pixel patterns
    for (label, _) in &top[..9] {
        let x = task.actions().index_of(label).unwrap();
        assert_eq!(task.utility().get(0, x), 4.0);
    }
    for (label, _) in &top[9..] {
        let x = task.actions().index_of(label).unwrap();
        assert_eq!(task.utility().get(2, x), 8.0);
    }
}

#[test]
fn empirical_frequencies_converge_at_one_million_draws() {
    // fixed 1024-atom distribution with a long tail
    let weights: Vec<f64> = (0..1024).map(|i| 1.0 / (1.0 + i as f64)).collect();
    let dist = Distribution::from_weights(weights).unwrap();
    let labels: Vec<String> = (0..1024).map(|i| format!("a{i}")).collect();
    let n = 1_000_000;
    let report = sample(&dist, &labels, n, 77).unwrap();
    let mut worst = 0.0f64;
    for (i, label) in labels.iter().enumerate() {
        let count = report.distinct.get(label).copied().unwrap_or(0);
        let gap = (count as f64 / n as f64 - dist.get(i)).abs();
        worst = worst.max(gap);
    }
    assert!(worst < 0.005, "max |freq - prob| = {worst}");
}

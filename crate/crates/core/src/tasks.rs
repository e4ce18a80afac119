//! Built-in benchmark tasks, grid utility functions, and task-file I/O.
//!
//! The task file is a JSON document with top-level fields `actions` (list of
//! strings), `observations` (list of strings), `utility` (one row per
//! observation, `utility[y][x]`), and an optional `p_y` that defaults to the
//! uniform distribution over observations.

use crate::types::{
    ActionSpace, CoreError, Distribution, ObservationSpace, TaskSpec, UtilityTable,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TaskError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error in `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("grid side {n} is too large; at most 4 (65536 patterns) is supported")]
    GridTooLarge { n: usize },
    #[error("grid side {n} is too small; at least 2 is required")]
    GridTooSmall { n: usize },
    #[error("unknown grid task id {0}; valid ids are 1, 2, 3")]
    InvalidTaskId(u8),
    #[error("invalid grid pattern: {0}")]
    InvalidPattern(String),
}

/// The two-task benchmark: four action vectors, two tasks with p(y) = ½ each.
///
/// Task y1 pays the first component of the action vector; task y2 pays the
/// absolute difference of the two components. The action "[0.7,0]" is second
/// best in both tasks while each task's maximizer is worthless in the other.
pub fn two_task_problem() -> TaskSpec {
    let actions =
        ActionSpace::new(["[0,0]", "[0,1]", "[0.7,0]", "[1,1]"]).expect("distinct action labels");
    let observations = ObservationSpace::new(["y1", "y2"]).expect("distinct observation labels");
    let utility = UtilityTable::from_rows(vec![vec![0.0, 0.0, 0.7, 1.0], vec![0.0, 1.0, 0.7, 0.0]])
        .expect("finite utilities");
    TaskSpec::new(
        actions,
        observations,
        utility,
        Distribution::new(vec![0.5, 0.5]).expect("valid p_y"),
    )
    .expect("consistent shapes")
}

/// A binary colored/white pattern on an N×N grid, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridPattern {
    cells: Vec<u8>,
    side: usize,
}

impl GridPattern {
    /// Builds from row-major cells; the length must be a perfect square and
    /// every cell 0 or 1.
    pub fn new(cells: Vec<u8>) -> Result<Self, TaskError> {
        let len = cells.len();
        let side = (len as f64).sqrt().round() as usize;
        if side * side != len || len == 0 {
            return Err(TaskError::InvalidPattern(format!(
                "{len} cells do not form a square grid"
            )));
        }
        if let Some(bad) = cells.iter().find(|&&c| c > 1) {
            return Err(TaskError::InvalidPattern(format!(
                "cell value {bad} is not binary"
            )));
        }
        Ok(Self { cells, side })
    }

    /// Parses a row-major bitstring label such as "110110000".
    pub fn from_label(label: &str) -> Result<Self, TaskError> {
        let cells: Result<Vec<u8>, _> = label
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(TaskError::InvalidPattern(format!(
                    "character `{other}` in pattern label"
                ))),
            })
            .collect();
        Self::new(cells?)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn cell(&self, row: usize, col: usize) -> u8 {
        self.cells[row * self.side + col]
    }

    /// Row-major bitstring label, the canonical action identifier.
    pub fn label(&self) -> String {
        self.cells.iter().map(|&c| char::from(b'0' + c)).collect()
    }

    pub fn colored_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c == 1).count()
    }

    pub fn has_all_white_row(&self) -> bool {
        (0..self.side).any(|r| (0..self.side).all(|c| self.cell(r, c) == 0))
    }

    pub fn has_all_white_column(&self) -> bool {
        (0..self.side).any(|c| (0..self.side).all(|r| self.cell(r, c) == 0))
    }
}

/// Utility of one grid pattern in one of the three grid tasks.
///
/// Task 1 pays the colored-pixel count when the pattern keeps at least one
/// all-white row and at least one all-white column, else zero. Task 2 pays 4
/// for exactly four colored pixels, else zero. Task 3 pays the colored count
/// when it is even (zero counts as even), else zero.
pub fn grid_utility(pattern: &GridPattern, task_id: u8) -> Result<f64, TaskError> {
    let count = pattern.colored_count() as f64;
    match task_id {
        1 => {
            if pattern.has_all_white_row() && pattern.has_all_white_column() {
                Ok(count)
            } else {
                Ok(0.0)
            }
        }
        2 => Ok(if pattern.colored_count() == 4 {
            4.0
        } else {
            0.0
        }),
        3 => Ok(if pattern.colored_count().is_multiple_of(2) {
            count
        } else {
            0.0
        }),
        other => Err(TaskError::InvalidTaskId(other)),
    }
}

/// The three-task N×N binary-grid problem with all 2^(N²) patterns as
/// actions and a uniform task distribution.
pub fn grid_task(n: usize) -> Result<TaskSpec, TaskError> {
    if n < 2 {
        return Err(TaskError::GridTooSmall { n });
    }
    if n > 4 {
        return Err(TaskError::GridTooLarge { n });
    }
    let cells = n * n;
    let n_patterns = 1usize << cells;
    let mut labels = Vec::with_capacity(n_patterns);
    let mut rows: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(n_patterns)).collect();
    for code in 0..n_patterns {
        let pattern = GridPattern::new(
            (0..cells)
                .map(|j| ((code >> (cells - 1 - j)) & 1) as u8)
                .collect(),
        )
        .expect("square binary cells");
        labels.push(pattern.label());
        for (t, row) in rows.iter_mut().enumerate() {
            row.push(grid_utility(&pattern, t as u8 + 1).expect("valid task id"));
        }
    }
    let actions = ActionSpace::new(labels).expect("bitstring labels are distinct");
    let observations = ObservationSpace::new(["task1", "task2", "task3"]).expect("distinct labels");
    let utility = UtilityTable::from_rows(rows).expect("finite utilities");
    Ok(
        TaskSpec::new(actions, observations, utility, Distribution::uniform(3))
            .expect("consistent shapes"),
    )
}

/// Serialized form of a task document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaskFile {
    pub actions: Vec<String>,
    pub observations: Vec<String>,
    pub utility: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_y: Option<Vec<f64>>,
}

fn schema_err(field: impl Into<String>, message: impl Into<String>) -> TaskError {
    TaskError::Schema {
        field: field.into(),
        message: message.into(),
    }
}

fn label_error(field: &str, err: CoreError) -> TaskError {
    schema_err(field, err.to_string())
}

/// Parses and fully validates a task document.
pub fn load_task(text: &str) -> Result<TaskSpec, TaskError> {
    let file: TaskFile =
        serde_json::from_str(text).map_err(|err| TaskError::Parse(err.to_string()))?;
    task_from_file(&file)
}

/// Validates a deserialized document and builds the task.
pub fn task_from_file(file: &TaskFile) -> Result<TaskSpec, TaskError> {
    let actions =
        ActionSpace::new(file.actions.clone()).map_err(|err| label_error("actions", err))?;
    let observations = ObservationSpace::new(file.observations.clone())
        .map_err(|err| label_error("observations", err))?;

    if file.utility.len() != observations.len() {
        return Err(schema_err(
            "utility",
            format!(
                "expected {} rows (one per observation), found {}",
                observations.len(),
                file.utility.len()
            ),
        ));
    }
    for (y, row) in file.utility.iter().enumerate() {
        if row.len() != actions.len() {
            return Err(schema_err(
                format!("utility[{y}]"),
                format!(
                    "expected {} entries (one per action), found {}",
                    actions.len(),
                    row.len()
                ),
            ));
        }
        if let Some(x) = row.iter().position(|u| !u.is_finite()) {
            return Err(schema_err(
                format!("utility[{y}][{x}]"),
                "utility must be finite",
            ));
        }
    }
    let utility =
        UtilityTable::from_rows(file.utility.clone()).map_err(|err| label_error("utility", err))?;

    let p_y = match &file.p_y {
        None => Distribution::uniform(observations.len()),
        Some(mass) => {
            if mass.len() != observations.len() {
                return Err(schema_err(
                    "p_y",
                    format!(
                        "expected {} entries, found {}",
                        observations.len(),
                        mass.len()
                    ),
                ));
            }
            Distribution::new(mass.clone()).map_err(|err| label_error("p_y", err))?
        }
    };

    TaskSpec::new(actions, observations, utility, p_y)
        .map_err(|err| schema_err("task", err.to_string()))
}

/// Serializes a task to the document schema. Round-trips exactly through
/// [`load_task`].
pub fn save_task(task: &TaskSpec) -> String {
    let file = TaskFile {
        actions: task.actions().labels().to_vec(),
        observations: task.observations().labels().to_vec(),
        utility: task.utility().rows().map(|r| r.to_vec()).collect(),
        p_y: Some(task.p_y().as_slice().to_vec()),
    };
    serde_json::to_string_pretty(&file).expect("task file serializes")
}

/// Re-checks every core invariant on a constructed task; returns one message
/// per violation, empty when the task is valid.
pub fn validate_task(task: &TaskSpec) -> Vec<String> {
    let mut violations = Vec::new();
    if task.actions().is_empty() {
        violations.push("actions: empty label set".to_string());
    }
    if task.observations().is_empty() {
        violations.push("observations: empty label set".to_string());
    }
    for (what, labels) in [
        ("actions", task.actions().labels()),
        ("observations", task.observations().labels()),
    ] {
        let mut seen = std::collections::HashSet::new();
        for label in labels {
            if !seen.insert(label.as_str()) {
                violations.push(format!("{what}: duplicate label `{label}`"));
            }
        }
    }
    if task.utility().n_observations() != task.observations().len() {
        violations.push(format!(
            "utility: {} rows for {} observations",
            task.utility().n_observations(),
            task.observations().len()
        ));
    }
    if task.utility().n_actions() != task.actions().len() {
        violations.push(format!(
            "utility: {} columns for {} actions",
            task.utility().n_actions(),
            task.actions().len()
        ));
    }
    for (y, row) in task.utility().rows().enumerate() {
        for (x, u) in row.iter().enumerate() {
            if !u.is_finite() {
                violations.push(format!("utility[{y}][{x}]: not finite"));
            }
        }
    }
    if task.p_y().len() != task.observations().len() {
        violations.push(format!(
            "p_y: {} entries for {} observations",
            task.p_y().len(),
            task.observations().len()
        ));
    }
    let sum: f64 = task.p_y().iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        violations.push(format!("p_y: sums to {sum}, not 1"));
    }
    if task.p_y().iter().any(|p| !(0.0..=1.0).contains(&p)) {
        violations.push("p_y: entry outside [0, 1]".to_string());
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_task_utilities() {
        let task = two_task_problem();
        assert_eq!(
            task.actions().labels(),
            ["[0,0]", "[0,1]", "[0.7,0]", "[1,1]"]
        );
        assert_eq!(task.utility().row(0), [0.0, 0.0, 0.7, 1.0]);
        assert_eq!(task.utility().row(1), [0.0, 1.0, 0.7, 0.0]);
        let idx = task.actions().index_of("[0.7,0]").unwrap();
        assert_eq!(task.utility().get(0, idx), 0.7);
        assert_eq!(task.utility().get(1, idx), 0.7);
        let idx = task.actions().index_of("[1,1]").unwrap();
        assert_eq!(task.utility().get(0, idx), 1.0);
        assert_eq!(task.utility().get(1, idx), 0.0);
        assert_eq!(task.p_y().as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn two_task_maximizers_disjoint_with_shared_runner_up() {
        let task = two_task_problem();
        let argmax = |y: usize| {
            let row = task.utility().row(y);
            (0..row.len())
                .max_by(|&a, &b| row[a].partial_cmp(&row[b]).unwrap())
                .unwrap()
        };
        let (m1, m2) = (argmax(0), argmax(1));
        assert_ne!(m1, m2);
        // second-best is the same action in both tasks
        let second = |y: usize, skip: usize| {
            let row = task.utility().row(y);
            (0..row.len())
                .filter(|&i| i != skip)
                .max_by(|&a, &b| row[a].partial_cmp(&row[b]).unwrap())
                .unwrap()
        };
        let s1 = second(0, m1);
        let s2 = second(1, m2);
        assert_eq!(s1, s2);
        assert_eq!(task.actions().label(s1), "[0.7,0]");
    }

    #[test]
    fn grid_utility_examples() {
        let all_white = GridPattern::new(vec![0; 9]).unwrap();
        for t in 1..=3 {
            assert_eq!(grid_utility(&all_white, t).unwrap(), 0.0);
        }

        // 2x2 block colored in the upper-left corner, row 3 and column 3 white
        let block = GridPattern::from_label("110110000").unwrap();
        assert_eq!(grid_utility(&block, 1).unwrap(), 4.0);
        assert_eq!(grid_utility(&block, 2).unwrap(), 4.0);
        assert_eq!(grid_utility(&block, 3).unwrap(), 4.0);

        // eight colored pixels, one white: even count but no all-white row
        let eight = GridPattern::from_label("111111110").unwrap();
        assert_eq!(grid_utility(&eight, 1).unwrap(), 0.0);
        assert_eq!(grid_utility(&eight, 2).unwrap(), 0.0);
        assert_eq!(grid_utility(&eight, 3).unwrap(), 8.0);

        assert_eq!(
            grid_utility(&block, 4).unwrap_err(),
            TaskError::InvalidTaskId(4)
        );
    }

    #[test]
    fn grid_task_shapes_and_bounds() {
        assert_eq!(grid_task(3).unwrap().n_actions(), 512);
        assert_eq!(grid_task(3).unwrap().n_observations(), 3);
        assert_eq!(grid_task(2).unwrap().n_actions(), 16);
        assert_eq!(grid_task(4).unwrap().n_actions(), 65536);
        assert_eq!(grid_task(9).unwrap_err(), TaskError::GridTooLarge { n: 9 });
        assert_eq!(grid_task(5).unwrap_err(), TaskError::GridTooLarge { n: 5 });
        assert_eq!(grid_task(1).unwrap_err(), TaskError::GridTooSmall { n: 1 });
    }

    #[test]
    fn grid3_exhaustive_structure() {
        let task = grid_task(3).unwrap();
        let u = task.utility();
        let max = |t: usize| (0..512).map(|x| u.get(t, x)).fold(f64::MIN, f64::max);
        assert_eq!(max(0), 4.0);
        assert_eq!(max(1), 4.0);
        assert_eq!(max(2), 8.0);

        let task1_max: Vec<usize> = (0..512).filter(|&x| u.get(0, x) == 4.0).collect();
        let task2_max: Vec<usize> = (0..512).filter(|&x| u.get(1, x) == 4.0).collect();
        let task3_max: Vec<usize> = (0..512).filter(|&x| u.get(2, x) == 8.0).collect();
        assert_eq!(task1_max.len(), 9);
        assert_eq!(task3_max.len(), 9);
        assert!(task1_max.iter().all(|x| task2_max.contains(x)));

        for x in 0..512 {
            let u2 = u.get(1, x);
            assert!(u2 == 0.0 || u2 == 4.0);
            assert_eq!(u.get(2, x) as usize % 2, 0);
        }
    }

    #[test]
    fn task_file_round_trip() {
        let task = two_task_problem();
        let text = save_task(&task);
        let loaded = load_task(&text).unwrap();
        assert_eq!(loaded, task);

        let grid = grid_task(2).unwrap();
        let loaded = load_task(&save_task(&grid)).unwrap();
        assert_eq!(loaded, grid);
    }

    #[test]
    fn p_y_defaults_to_uniform() {
        let text = r#"{
            "actions": ["a", "b"],
            "observations": ["y1", "y2", "y3"],
            "utility": [[0.0, 1.0], [1.0, 0.0], [0.5, 0.5]]
        }"#;
        let task = load_task(text).unwrap();
        for y in 0..3 {
            assert!((task.p_y()[y] - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn schema_errors_name_the_field() {
        let bad_row = r#"{
            "actions": ["a", "b"],
            "observations": ["y1", "y2"],
            "utility": [[0.0, 1.0], [1.0]]
        }"#;
        match load_task(bad_row).unwrap_err() {
            TaskError::Schema { field, .. } => assert_eq!(field, "utility[1]"),
            other => panic!("expected schema error, got {other:?}"),
        }

        let bad_py = r#"{
            "actions": ["a", "b"],
            "observations": ["y1", "y2"],
            "utility": [[0.0, 1.0], [1.0, 0.0]],
            "p_y": [0.9, 0.9]
        }"#;
        match load_task(bad_py).unwrap_err() {
            TaskError::Schema { field, .. } => assert_eq!(field, "p_y"),
            other => panic!("expected schema error, got {other:?}"),
        }

        let dup = r#"{
            "actions": ["a", "a"],
            "observations": ["y1"],
            "utility": [[0.0, 1.0]]
        }"#;
        match load_task(dup).unwrap_err() {
            TaskError::Schema { field, .. } => assert_eq!(field, "actions"),
            other => panic!("expected schema error, got {other:?}"),
        }

        // out-of-range numbers are rejected by the parser itself
        let overflow = r#"{
            "actions": ["a", "b"],
            "observations": ["y1"],
            "utility": [[0.0, 1e999]]
        }"#;
        assert!(matches!(load_task(overflow), Err(TaskError::Parse(_))));

        // a programmatically built document still gets the finiteness check
        let file = TaskFile {
            actions: vec!["a".into(), "b".into()],
            observations: vec!["y1".into()],
            utility: vec![vec![0.0, f64::NAN]],
            p_y: None,
        };
        match task_from_file(&file).unwrap_err() {
            TaskError::Schema { field, .. } => assert_eq!(field, "utility[0][1]"),
            other => panic!("expected schema error, got {other:?}"),
        }

        assert!(matches!(load_task("not json"), Err(TaskError::Parse(_))));
    }

    #[test]
    fn validate_task_accepts_builtins() {
        assert!(validate_task(&two_task_problem()).is_empty());
        assert!(validate_task(&grid_task(2).unwrap()).is_empty());
    }
}

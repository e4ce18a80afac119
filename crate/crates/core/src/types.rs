//! Domain types: labeled action/observation spaces, utility tables, points on
//! the probability simplex, conditional policies, and the inverse temperature.
//!
//! All types are immutable values after construction and validate their
//! invariants in the constructor, so every downstream computation can assume
//! well-formed inputs. Probabilities below [`MASS_CLAMP`] are snapped to zero
//! and the distribution renormalized, which keeps denormal noise out of
//! support-sensitive computations.

use thiserror::Error;

/// Probability entries below this threshold are treated as exact zeros.
pub const MASS_CLAMP: f64 = 1e-15;

/// Tolerance on the total mass accepted by [`Distribution::new`].
const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("label set is empty")]
    EmptyLabels,
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("{context}: expected {expected}, found {found}")]
    ShapeMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("utility at [{row}][{col}] is not finite")]
    NonFiniteUtility { row: usize, col: usize },
    #[error("probability at index {index} is {value}, outside [0, 1]")]
    InvalidProbability { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("weights must be non-negative with positive sum")]
    InvalidWeights,
    #[error("support violation at index {index}: p > 0 where q = 0")]
    SupportViolation { index: usize },
    #[error("inverse temperature must be positive and finite, got {0}")]
    InvalidBeta(f64),
}

fn validate_labels(labels: &[String]) -> Result<(), CoreError> {
    if labels.is_empty() {
        return Err(CoreError::EmptyLabels);
    }
    let mut seen = std::collections::HashSet::with_capacity(labels.len());
    for label in labels {
        if !seen.insert(label.as_str()) {
            return Err(CoreError::DuplicateLabel(label.clone()));
        }
    }
    Ok(())
}

/// Ordered set of unique action labels; index ↔ label is a bijection.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSpace {
    labels: Vec<String>,
}

impl ActionSpace {
    pub fn new<I, S>(labels: I) -> Result<Self, CoreError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        validate_labels(&labels)?;
        Ok(Self { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Ordered set of unique observation (task) labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSpace {
    labels: Vec<String>,
}

impl ObservationSpace {
    pub fn new<I, S>(labels: I) -> Result<Self, CoreError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        validate_labels(&labels)?;
        Ok(Self { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Dense utility matrix U(x, y), stored row-major as `[observation][action]`.
///
/// Entries are plain utility units and must be finite.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityTable {
    values: Vec<f64>,
    n_observations: usize,
    n_actions: usize,
}

impl UtilityTable {
    /// Build from per-observation rows. All rows must have equal length and
    /// finite entries.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, CoreError> {
        if rows.is_empty() {
            return Err(CoreError::ShapeMismatch {
                context: "utility table rows",
                expected: 1,
                found: 0,
            });
        }
        let n_actions = rows[0].len();
        if n_actions == 0 {
            return Err(CoreError::ShapeMismatch {
                context: "utility table columns",
                expected: 1,
                found: 0,
            });
        }
        let n_observations = rows.len();
        let mut values = Vec::with_capacity(n_observations * n_actions);
        for (y, row) in rows.iter().enumerate() {
            if row.len() != n_actions {
                return Err(CoreError::ShapeMismatch {
                    context: "utility row length",
                    expected: n_actions,
                    found: row.len(),
                });
            }
            for (x, &u) in row.iter().enumerate() {
                if !u.is_finite() {
                    return Err(CoreError::NonFiniteUtility { row: y, col: x });
                }
                values.push(u);
            }
        }
        Ok(Self {
            values,
            n_observations,
            n_actions,
        })
    }

    pub fn n_observations(&self) -> usize {
        self.n_observations
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    /// Utility row U(·, y) for one observation.
    pub fn row(&self, observation: usize) -> &[f64] {
        let start = observation * self.n_actions;
        &self.values[start..start + self.n_actions]
    }

    pub fn get(&self, observation: usize, action: usize) -> f64 {
        self.values[observation * self.n_actions + action]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_actions)
    }
}

/// A point on the probability simplex over a finite labeled space.
///
/// Invariants: every entry is in [0, 1], entries sum to 1 within 1e-12, and
/// no entry lies in the open interval (0, [`MASS_CLAMP`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    mass: Vec<f64>,
}

impl Distribution {
    /// Accepts a near-normalized probability vector (total mass within 1e-9
    /// of one), clamps sub-[`MASS_CLAMP`] entries to zero, and renormalizes
    /// when the total drifts beyond 1e-12.
    pub fn new(mass: Vec<f64>) -> Result<Self, CoreError> {
        for (index, &value) in mass.iter().enumerate() {
            if !value.is_finite() || !(-MASS_CLAMP..=1.0 + SUM_TOLERANCE).contains(&value) {
                return Err(CoreError::InvalidProbability { index, value });
            }
        }
        let sum: f64 = mass.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(CoreError::NotNormalized { sum });
        }
        Ok(Self::finish(mass))
    }

    /// Normalizes an arbitrary non-negative weight vector.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self, CoreError> {
        if weights.is_empty() {
            return Err(CoreError::InvalidWeights);
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(CoreError::InvalidWeights);
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(CoreError::InvalidWeights);
        }
        let mass = weights.into_iter().map(|w| w / sum).collect();
        Ok(Self::finish(mass))
    }

    /// Uniform distribution over `n` outcomes.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution needs at least one outcome");
        Self {
            mass: vec![1.0 / n as f64; n],
        }
    }

    /// All mass on a single outcome.
    pub fn point_mass(n: usize, index: usize) -> Self {
        assert!(index < n, "point mass index out of range");
        let mut mass = vec![0.0; n];
        mass[index] = 1.0;
        Self { mass }
    }

    fn finish(mut mass: Vec<f64>) -> Self {
        for value in mass.iter_mut() {
            if *value < MASS_CLAMP {
                *value = 0.0;
            }
        }
        let sum: f64 = mass.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            for value in mass.iter_mut() {
                *value /= sum;
            }
        }
        Self { mass }
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.mass[index]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.mass
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.mass.iter().copied()
    }

    /// Indices carrying strictly positive mass.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0.0)
            .map(|(i, _)| i)
    }

    /// Number of entries with mass strictly above `threshold`.
    pub fn support_size_above(&self, threshold: f64) -> usize {
        self.mass.iter().filter(|&&m| m > threshold).count()
    }

    /// Total variation distance to another distribution of the same length.
    pub fn total_variation(&self, other: &Distribution) -> f64 {
        assert_eq!(self.len(), other.len(), "total variation: length mismatch");
        0.5 * self
            .mass
            .iter()
            .zip(other.mass.iter())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.mass[index]
    }
}

/// One distribution over actions per observation: p(x | y).
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalPolicy {
    rows: Vec<Distribution>,
}

impl ConditionalPolicy {
    pub fn new(rows: Vec<Distribution>) -> Result<Self, CoreError> {
        if rows.is_empty() {
            return Err(CoreError::ShapeMismatch {
                context: "policy rows",
                expected: 1,
                found: 0,
            });
        }
        let n_actions = rows[0].len();
        for row in &rows {
            if row.len() != n_actions {
                return Err(CoreError::ShapeMismatch {
                    context: "policy row length",
                    expected: n_actions,
                    found: row.len(),
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn n_observations(&self) -> usize {
        self.rows.len()
    }

    pub fn n_actions(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, observation: usize) -> &Distribution {
        &self.rows[observation]
    }

    pub fn rows(&self) -> &[Distribution] {
        &self.rows
    }
}

/// A complete multi-task decision problem: the shared action space, the
/// observation (task) space, the utility table, and the task distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    actions: ActionSpace,
    observations: ObservationSpace,
    utility: UtilityTable,
    p_y: Distribution,
}

impl TaskSpec {
    pub fn new(
        actions: ActionSpace,
        observations: ObservationSpace,
        utility: UtilityTable,
        p_y: Distribution,
    ) -> Result<Self, CoreError> {
        if utility.n_observations() != observations.len() {
            return Err(CoreError::ShapeMismatch {
                context: "utility observation count",
                expected: observations.len(),
                found: utility.n_observations(),
            });
        }
        if utility.n_actions() != actions.len() {
            return Err(CoreError::ShapeMismatch {
                context: "utility action count",
                expected: actions.len(),
                found: utility.n_actions(),
            });
        }
        if p_y.len() != observations.len() {
            return Err(CoreError::ShapeMismatch {
                context: "task distribution length",
                expected: observations.len(),
                found: p_y.len(),
            });
        }
        Ok(Self {
            actions,
            observations,
            utility,
            p_y,
        })
    }

    pub fn actions(&self) -> &ActionSpace {
        &self.actions
    }

    pub fn observations(&self) -> &ObservationSpace {
        &self.observations
    }

    pub fn utility(&self) -> &UtilityTable {
        &self.utility
    }

    pub fn p_y(&self) -> &Distribution {
        &self.p_y
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn n_observations(&self) -> usize {
        self.observations.len()
    }
}

/// Inverse temperature β in nats per utility unit; must be positive and
/// finite. The limits β → 0 and β → ∞ are approached with small or large
/// finite values, never stored as 0 or ∞.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct InverseTemperature {
    beta: f64,
}

impl InverseTemperature {
    pub fn new(beta: f64) -> Result<Self, CoreError> {
        if !beta.is_finite() || beta <= 0.0 {
            return Err(CoreError::InvalidBeta(beta));
        }
        Ok(Self { beta })
    }

    pub fn value(&self) -> f64 {
        self.beta
    }
}

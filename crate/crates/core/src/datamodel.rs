//! Core domain types: datasets, supports, selection paths, coefficient
//! matrices.
//!
//! Variable and task indices are 0-based everywhere in memory; only
//! file and report output shifts to 1-based.

use std::collections::BTreeMap;
use std::sync::Arc;

use ndarray::{Array1, Array2};
use thiserror::Error;

/// Solver outputs below this magnitude are stored as exact zeros so that
/// support queries are well-defined.
pub const ZERO_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("dataset must have n >= 1, p >= 1 and at least one task")]
    Empty,
    #[error("design for task {task} is {rows}x{cols}, expected {n}x{p}")]
    DesignShape {
        task: usize,
        rows: usize,
        cols: usize,
        n: usize,
        p: usize,
    },
    #[error("response for task {task} has length {len}, expected {n}")]
    ResponseLength { task: usize, len: usize, n: usize },
    #[error("variable index {index} out of range for p = {p}")]
    IndexOutOfRange { index: usize, p: usize },
    #[error("duplicate variable index {index}")]
    DuplicateIndex { index: usize },
}

#[derive(Clone, Debug)]
enum DesignStorage {
    /// All tasks regress on one matrix; enables cross-task reuse in the
    /// projector.
    Shared(Arc<Array2<f64>>),
    PerTask(Vec<Arc<Array2<f64>>>),
}

/// Designs and responses for T regression tasks over a common variable set.
#[derive(Clone, Debug)]
pub struct MultiTaskDataset {
    n: usize,
    p: usize,
    designs: DesignStorage,
    responses: Arc<Vec<Array1<f64>>>,
}

impl MultiTaskDataset {
    /// Dataset where every task shares one design matrix.
    pub fn shared(design: Array2<f64>, responses: Vec<Array1<f64>>) -> Result<Self, DataError> {
        let (n, p) = design.dim();
        if n == 0 || p == 0 || responses.is_empty() {
            return Err(DataError::Empty);
        }
        for (t, y) in responses.iter().enumerate() {
            if y.len() != n {
                return Err(DataError::ResponseLength {
                    task: t,
                    len: y.len(),
                    n,
                });
            }
        }
        Ok(Self {
            n,
            p,
            designs: DesignStorage::Shared(Arc::new(design)),
            responses: Arc::new(responses),
        })
    }

    /// Dataset with one design matrix per task.
    pub fn per_task(
        designs: Vec<Array2<f64>>,
        responses: Vec<Array1<f64>>,
    ) -> Result<Self, DataError> {
        if designs.is_empty() || designs.len() != responses.len() {
            return Err(DataError::Empty);
        }
        let (n, p) = designs[0].dim();
        if n == 0 || p == 0 {
            return Err(DataError::Empty);
        }
        for (t, x) in designs.iter().enumerate() {
            let (rows, cols) = x.dim();
            if (rows, cols) != (n, p) {
                return Err(DataError::DesignShape {
                    task: t,
                    rows,
                    cols,
                    n,
                    p,
                });
            }
        }
        for (t, y) in responses.iter().enumerate() {
            if y.len() != n {
                return Err(DataError::ResponseLength {
                    task: t,
                    len: y.len(),
                    n,
                });
            }
        }
        Ok(Self {
            n,
            p,
            designs: DesignStorage::PerTask(designs.into_iter().map(Arc::new).collect()),
            responses: Arc::new(responses),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn num_tasks(&self) -> usize {
        self.responses.len()
    }

    /// Shared-design mode is a stored property, not a matrix comparison.
    pub fn is_shared_design(&self) -> bool {
        matches!(self.designs, DesignStorage::Shared(_))
    }

    pub fn design(&self, task: usize) -> &Array2<f64> {
        match &self.designs {
            DesignStorage::Shared(x) => x,
            DesignStorage::PerTask(xs) => &xs[task],
        }
    }

    pub fn response(&self, task: usize) -> &Array1<f64> {
        &self.responses[task]
    }

    pub fn responses(&self) -> &[Array1<f64>] {
        &self.responses
    }

    /// View of one task as a T=1 dataset; design storage is shared, not
    /// copied.
    pub fn single_task(&self, task: usize) -> MultiTaskDataset {
        let design = match &self.designs {
            DesignStorage::Shared(x) => Arc::clone(x),
            DesignStorage::PerTask(xs) => Arc::clone(&xs[task]),
        };
        MultiTaskDataset {
            n: self.n,
            p: self.p,
            designs: DesignStorage::Shared(design),
            responses: Arc::new(vec![self.responses[task].clone()]),
        }
    }
}

/// Ordered set of distinct variable indices; order equals selection order
/// when produced by a greedy path.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(
        indices: I,
        p: usize,
    ) -> Result<Self, DataError> {
        let mut set = Self::new();
        for index in indices {
            if index >= p {
                return Err(DataError::IndexOutOfRange { index, p });
            }
            if set.contains(index) {
                return Err(DataError::DuplicateIndex { index });
            }
            set.indices.push(index);
        }
        Ok(set)
    }

    /// Appends an index, rejecting duplicates.
    pub fn push(&mut self, index: usize) -> Result<(), DataError> {
        if self.contains(index) {
            return Err(DataError::DuplicateIndex { index });
        }
        self.indices.push(index);
        Ok(())
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.contains(&index)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    /// Ascending copy of the indices.
    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.indices.clone();
        v.sort_unstable();
        v
    }

    /// Set inclusion, ignoring order.
    pub fn is_subset_of(&self, other: &SupportSet) -> bool {
        self.indices.iter().all(|&j| other.contains(j))
    }

    /// Set equality, ignoring order.
    pub fn same_members(&self, other: &SupportSet) -> bool {
        self.len() == other.len() && self.is_subset_of(other)
    }
}

/// One greedy step: the chosen variable and the path statistics after it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionStep {
    pub selected_index: usize,
    pub rss_after: f64,
    pub bic_after: f64,
}

/// The nested model sequence produced by a greedy forward pass, with RSS
/// and BIC recorded after every step.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionPath {
    pub steps: Vec<SelectionStep>,
    pub rss_empty: f64,
    pub bic_empty: f64,
}

impl SelectionPath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Support of the model after `k` steps (`k = 0` is the empty model).
    pub fn support_prefix(&self, k: usize) -> SupportSet {
        let mut set = SupportSet::new();
        for step in &self.steps[..k] {
            set.indices.push(step.selected_index);
        }
        set
    }
}

/// Sparse p x T coefficient matrix; absent entries are exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientMatrix {
    p: usize,
    num_tasks: usize,
    entries: BTreeMap<(usize, usize), f64>,
}

impl CoefficientMatrix {
    pub fn zeros(p: usize, num_tasks: usize) -> Self {
        Self {
            p,
            num_tasks,
            entries: BTreeMap::new(),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn num_tasks(&self) -> usize {
        self.num_tasks
    }

    /// Stores an entry; magnitudes below [`ZERO_TOLERANCE`] become exact
    /// zeros.
    pub fn set(&mut self, variable: usize, task: usize, value: f64) {
        assert!(variable < self.p && task < self.num_tasks, "entry out of range");
        assert!(value.is_finite(), "coefficient must be finite");
        if value.abs() < ZERO_TOLERANCE {
            self.entries.remove(&(variable, task));
        } else {
            self.entries.insert((variable, task), value);
        }
    }

    pub fn get(&self, variable: usize, task: usize) -> f64 {
        self.entries.get(&(variable, task)).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries.iter().map(|(&(j, t), &v)| (j, t, v))
    }

    pub fn num_nonzero(&self) -> usize {
        self.entries.len()
    }
}

/// Variables with a nonzero coefficient in at least one task, in ascending
/// index order.
pub fn union_support(matrix: &CoefficientMatrix) -> SupportSet {
    let mut rows: Vec<usize> = matrix.entries.keys().map(|&(j, _)| j).collect();
    rows.sort_unstable();
    rows.dedup();
    SupportSet { indices: rows }
}

/// All (variable, task) positions holding a nonzero coefficient.
pub fn exact_support(matrix: &CoefficientMatrix) -> Vec<(usize, usize)> {
    matrix.entries.keys().copied().collect()
}

/// Ground truth for a synthetic instance.
#[derive(Clone, Debug)]
pub struct TrueModel {
    pub coefficients: CoefficientMatrix,
    pub relevant_set: SupportSet,
    pub noise_sigma: f64,
}

impl TrueModel {
    /// Builds the model, deriving the relevant set from the coefficients.
    pub fn new(coefficients: CoefficientMatrix, noise_sigma: f64) -> Self {
        assert!(noise_sigma > 0.0, "noise sigma must be positive");
        let relevant_set = union_support(&coefficients);
        Self {
            coefficients,
            relevant_set,
            noise_sigma,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_support_of_zero_matrix_is_empty() {
        let b = CoefficientMatrix::zeros(10, 2);
        assert!(union_support(&b).is_empty());
        assert!(exact_support(&b).is_empty());
    }

    #[test]
    fn union_support_by_definition() {
        let mut b = CoefficientMatrix::zeros(10, 2);
        b.set(3, 0, 1.0);
        b.set(3, 1, -2.0);
        b.set(7, 1, 0.5);
        assert_eq!(union_support(&b).as_slice(), &[3, 7]);
        assert_eq!(exact_support(&b), vec![(3, 0), (3, 1), (7, 1)]);
    }

    #[test]
    fn tiny_values_snap_to_zero() {
        let mut b = CoefficientMatrix::zeros(4, 1);
        b.set(1, 0, 1e-13);
        assert_eq!(b.get(1, 0), 0.0);
        assert!(union_support(&b).is_empty());
    }

    #[test]
    fn support_set_rejects_duplicates_and_oob() {
        assert!(SupportSet::from_indices([1, 1], 4).is_err());
        assert!(SupportSet::from_indices([5], 4).is_err());
        let mut s = SupportSet::from_indices([2, 0], 4).unwrap();
        assert!(s.push(2).is_err());
        s.push(3).unwrap();
        assert_eq!(s.as_slice(), &[2, 0, 3]);
        assert_eq!(s.sorted(), vec![0, 2, 3]);
    }

    #[test]
    fn dataset_shape_validation() {
        use ndarray::arr2;
        let x = arr2(&[[1.0, 2.0], [3.0, 4.0]]);
        let bad = vec![Array1::from(vec![1.0])];
        assert!(MultiTaskDataset::shared(x.clone(), bad).is_err());
        let good = vec![Array1::from(vec![1.0, 2.0])];
        let d = MultiTaskDataset::shared(x, good).unwrap();
        assert!(d.is_shared_design());
        assert_eq!((d.n(), d.p(), d.num_tasks()), (2, 2, 1));
    }

    #[test]
    fn single_task_view_keeps_design() {
        use ndarray::arr2;
        let x = arr2(&[[1.0, 2.0], [3.0, 4.0]]);
        let ys = vec![
            Array1::from(vec![1.0, 2.0]),
            Array1::from(vec![3.0, 4.0]),
        ];
        let d = MultiTaskDataset::shared(x, ys).unwrap();
        let v = d.single_task(1);
        assert_eq!(v.num_tasks(), 1);
        assert_eq!(v.response(0), d.response(1));
        assert!(std::ptr::eq(v.design(0), d.design(1)));
    }
}

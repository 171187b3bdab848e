//! Incremental least-squares engine.
//!
//! Per task we maintain a Cholesky factor of the Gram matrix of the
//! selected columns. Extending the model by one column appends one row to
//! the factor (one forward solve and a square root), so RSS values,
//! candidate RSS gains and OLS coefficients never require refactoring.
//!
//! The engine keeps Gram-and-correlation state (`L`, `c`, `z`), not
//! explicit residual vectors; residual correlations are recovered as
//! `X_j'y - (X_j'X_M) beta` through triangular solves.

use ndarray::{Array1, Array2};
use thiserror::Error;

use crate::datamodel::{MultiTaskDataset, SupportSet};
use crate::util::{dot, sq_norm};

#[derive(Debug, Error)]
pub enum ProjectorError {
    #[error("variable index {index} out of range for p = {p}")]
    IndexOutOfRange { index: usize, p: usize },
    #[error("variable {index} is already selected")]
    AlreadySelected { index: usize },
    #[error("column {index} is numerically collinear with the selected set")]
    DegenerateColumn { index: usize },
    #[error("no coefficients for the empty model")]
    EmptyModel,
    #[error("task states do not share the same selected set")]
    SupportMismatch,
}

/// Scale-aware threshold on the residualized squared column norm below
/// which a candidate is treated as collinear.
pub fn degenerate_threshold(n: usize) -> f64 {
    1e-10 * n as f64
}

/// Lower-triangular factor stored as packed rows.
#[derive(Clone, Debug, Default)]
struct LowerTriangular {
    rows: Vec<Vec<f64>>,
}

impl LowerTriangular {
    fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Solves `L x = b` in place.
    fn solve_lower(&self, b: &mut [f64]) {
        for i in 0..self.dim() {
            let row = &self.rows[i];
            let s = dot(&row[..i], &b[..i]);
            b[i] = (b[i] - s) / row[i];
        }
    }

    /// Solves `L' x = b` in place.
    fn solve_upper(&self, b: &mut [f64]) {
        for i in (0..self.dim()).rev() {
            let mut s = b[i];
            for r in i + 1..self.dim() {
                s -= self.rows[r][i] * b[r];
            }
            b[i] = s / self.rows[i][i];
        }
    }

    fn push_row(&mut self, mut row: Vec<f64>, pivot: f64) {
        row.push(pivot);
        self.rows.push(row);
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        if j <= i {
            self.rows[i][j]
        } else {
            0.0
        }
    }
}

/// A candidate's RSS gain, with a flag for columns the selected set
/// already spans.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CandidateGain {
    pub gain: f64,
    pub degenerate: bool,
}

/// Per-task incremental factorization of the selected-column Gram matrix.
pub struct CholeskyState<'d> {
    design: &'d Array2<f64>,
    response: &'d Array1<f64>,
    selected: SupportSet,
    factor: LowerTriangular,
    /// X_M' y in selection order.
    c: Vec<f64>,
    /// Forward-solved c, kept current: L z = c.
    z: Vec<f64>,
    rss: f64,
    response_sq_norm: f64,
}

impl<'d> CholeskyState<'d> {
    /// Empty-model state for one task; RSS starts at `||y||^2`.
    pub fn init(dataset: &'d MultiTaskDataset, task: usize) -> Self {
        Self::from_parts(dataset.design(task), dataset.response(task))
    }

    /// Builds a state directly from a design/response pair.
    pub fn from_parts(design: &'d Array2<f64>, response: &'d Array1<f64>) -> Self {
        let ynorm = sq_norm(response.as_slice().expect("contiguous response"));
        Self {
            design,
            response,
            selected: SupportSet::new(),
            factor: LowerTriangular::default(),
            c: Vec::new(),
            z: Vec::new(),
            rss: ynorm,
            response_sq_norm: ynorm,
        }
    }

    pub fn selected(&self) -> &SupportSet {
        &self.selected
    }

    pub fn rss(&self) -> f64 {
        self.rss
    }

    pub fn response_sq_norm(&self) -> f64 {
        self.response_sq_norm
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    fn n(&self) -> usize {
        self.design.nrows()
    }

    fn p(&self) -> usize {
        self.design.ncols()
    }

    fn column(&self, j: usize) -> Vec<f64> {
        self.design.column(j).to_vec()
    }

    fn check_candidate(&self, j: usize) -> Result<(), ProjectorError> {
        if j >= self.p() {
            return Err(ProjectorError::IndexOutOfRange {
                index: j,
                p: self.p(),
            });
        }
        if self.selected.contains(j) {
            return Err(ProjectorError::AlreadySelected { index: j });
        }
        Ok(())
    }

    /// Residualizes column `j` against the selected set.
    ///
    /// Returns `(u, resid_sq_norm, resid_corr)` where `u = L^{-1} X_M'X_j`,
    /// `resid_sq_norm = ||X_j||^2 - ||u||^2` and `resid_corr = X_j'r`.
    fn residualize(&self, j: usize) -> (Vec<f64>, f64, f64) {
        let col = self.column(j);
        let mut u: Vec<f64> = self
            .selected
            .iter()
            .map(|m| dot(&self.column(m), &col))
            .collect();
        self.factor.solve_lower(&mut u);
        let col_sq = sq_norm(&col);
        let resid_sq = col_sq - sq_norm(&u);
        let y = self.response.as_slice().expect("contiguous response");
        let corr = dot(&col, y) - dot(&u, &self.z);
        (u, resid_sq, corr)
    }

    /// RSS reduction from adding column `j` to this task's model.
    pub fn candidate_gain(&self, j: usize) -> Result<CandidateGain, ProjectorError> {
        self.check_candidate(j)?;
        let (_, resid_sq, corr) = self.residualize(j);
        if resid_sq <= degenerate_threshold(self.n()) {
            return Ok(CandidateGain {
                gain: 0.0,
                degenerate: true,
            });
        }
        Ok(CandidateGain {
            gain: corr * corr / resid_sq,
            degenerate: false,
        })
    }

    /// Adds column `j` to the model, appending one row to the factor.
    pub fn extend(&mut self, j: usize) -> Result<(), ProjectorError> {
        self.check_candidate(j)?;
        let (u, resid_sq, corr) = self.residualize(j);
        if resid_sq <= degenerate_threshold(self.n()) {
            return Err(ProjectorError::DegenerateColumn { index: j });
        }
        let pivot = resid_sq.sqrt();
        let col = self.column(j);
        let y = self.response.as_slice().expect("contiguous response");
        self.c.push(dot(&col, y));
        self.z.push(corr / pivot);
        self.factor.push_row(u, pivot);
        self.selected.push(j).expect("checked above");
        self.rss = (self.rss - corr * corr / resid_sq).max(0.0);
        Ok(())
    }

    /// OLS coefficients on the selected set, in selection order.
    pub fn coefficients(&self) -> Result<Vec<f64>, ProjectorError> {
        if self.is_empty() {
            return Err(ProjectorError::EmptyModel);
        }
        let mut beta = self.z.clone();
        self.factor.solve_upper(&mut beta);
        Ok(beta)
    }

    /// Fitted values `X_M beta` for the current model.
    pub fn fitted(&self) -> Result<Vec<f64>, ProjectorError> {
        let beta = self.coefficients()?;
        let mut out = vec![0.0; self.n()];
        for (pos, j) in self.selected.iter().enumerate() {
            let col = self.design.column(j);
            for (o, &x) in out.iter_mut().zip(col.iter()) {
                *o += beta[pos] * x;
            }
        }
        Ok(out)
    }

    /// Entry (i, j) of the factor; test hook for factorization checks.
    pub fn factor_entry(&self, i: usize, j: usize) -> f64 {
        self.factor.entry(i, j)
    }
}

/// Total gain of candidate `j` summed over per-task states sharing one
/// selected set.
///
/// In shared-design mode the residualized column is computed once and
/// reused; only the response correlation differs per task.
pub fn batched_gains(states: &[CholeskyState<'_>], j: usize) -> Result<f64, ProjectorError> {
    let first = states.first().ok_or(ProjectorError::SupportMismatch)?;
    for s in &states[1..] {
        if s.selected != first.selected {
            return Err(ProjectorError::SupportMismatch);
        }
    }
    let shared = states
        .iter()
        .all(|s| std::ptr::eq(s.design, first.design));
    if shared {
        first.check_candidate(j)?;
        let (u, resid_sq, _) = first.residualize(j);
        if resid_sq <= degenerate_threshold(first.n()) {
            return Ok(0.0);
        }
        let col = first.column(j);
        let mut total = 0.0;
        for s in states {
            let y = s.response.as_slice().expect("contiguous response");
            let corr = dot(&col, y) - dot(&u, &s.z);
            total += corr * corr / resid_sq;
        }
        Ok(total)
    } else {
        let mut total = 0.0;
        for s in states {
            total += s.candidate_gain(j)?.gain;
        }
        Ok(total)
    }
}

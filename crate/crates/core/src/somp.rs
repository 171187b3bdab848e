//! Simultaneous orthogonal matching pursuit: greedy forward selection
//! minimizing the residual sum of squares summed over all tasks, with
//! modified-BIC truncation of the resulting path.
//!
//! The per-step candidate scan runs on cached quantities that are updated
//! incrementally: one matrix-vector product against the design plus O(p k)
//! work per step, instead of refactoring anything. The cached state is the
//! growing matrix `U = L^{-1} X_M' X` (one row appended per step), the
//! residualized squared column norms `d_j`, and per task the correlations
//! `X'y` and their projections onto the selected span. In shared-design
//! mode `U` and `d` are computed once for all tasks.

use ndarray::Array2;
use rayon::prelude::*;
use thiserror::Error;

use crate::bic::{bic_score, BicParams};
use crate::datamodel::{MultiTaskDataset, SelectionPath, SelectionStep, SupportSet};
use crate::projector::degenerate_threshold;
use crate::util::sq_norm;

#[derive(Debug, Error)]
pub enum SompError {
    #[error("no non-degenerate candidate column at the first step")]
    NoValidCandidate,
}

/// Knobs for the greedy loop.
#[derive(Clone, Debug)]
pub struct SompConfig {
    /// Number of greedy steps; clamped to `min(n - 1, p)`. `None` means
    /// the full clamp value.
    pub max_steps: Option<usize>,
    /// Override of the degenerate residualized-norm threshold.
    pub candidate_tolerance: Option<f64>,
    /// Scan candidates with a thread pool; results are identical either way.
    pub parallel_candidates: bool,
}

impl Default for SompConfig {
    fn default() -> Self {
        Self {
            max_steps: None,
            candidate_tolerance: None,
            parallel_candidates: false,
        }
    }
}

/// Per-step report handed to the progress callback.
#[derive(Clone, Copy, Debug)]
pub struct StepInfo {
    pub step: usize,
    pub selected_index: usize,
    pub rss: f64,
    pub bic: f64,
}

/// Caches tied to one distinct design matrix.
struct GroupState<'d> {
    design: &'d Array2<f64>,
    /// Squared column norms residualized against the selected set.
    resid_sq: Vec<f64>,
    /// Rows of `U = L^{-1} X_M' X`, one per selected variable.
    u_rows: Vec<Vec<f64>>,
    /// Diagonal pivots of the Cholesky factor, in selection order.
    pivots: Vec<f64>,
}

impl<'d> GroupState<'d> {
    fn new(design: &'d Array2<f64>) -> Self {
        let p = design.ncols();
        let resid_sq = (0..p)
            .map(|j| {
                let col = design.column(j).to_vec();
                sq_norm(&col)
            })
            .collect();
        Self {
            design,
            resid_sq,
            u_rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Appends the selected column `f`, producing the new row of `U` and
    /// the new Cholesky pivot.
    fn extend(&mut self, f: usize) -> (Vec<f64>, f64) {
        let pivot = self.resid_sq[f].sqrt();
        let col = self.design.column(f).to_owned();
        let q = self.design.t().dot(&col);
        let mut row = q.to_vec();
        for u in &self.u_rows {
            let coeff = u[f];
            for (r, &uj) in row.iter_mut().zip(u.iter()) {
                *r -= coeff * uj;
            }
        }
        for r in row.iter_mut() {
            *r /= pivot;
        }
        for (d, &r) in self.resid_sq.iter_mut().zip(row.iter()) {
            *d = (*d - r * r).max(0.0);
        }
        self.pivots.push(pivot);
        self.u_rows.push(row.clone());
        (row, pivot)
    }
}

struct TaskState {
    group: usize,
    /// X' y for this task.
    xty: Vec<f64>,
    /// Projection of each candidate correlation onto the selected span.
    proj: Vec<f64>,
    rss: f64,
}

/// Runs the greedy loop over all tasks.
pub fn run_somp(
    dataset: &MultiTaskDataset,
    config: &SompConfig,
) -> Result<SelectionPath, SompError> {
    run_somp_with_progress(dataset, config, |_| {})
}

/// As [`run_somp`], invoking `progress` after every recorded step.
pub fn run_somp_with_progress<F: FnMut(StepInfo)>(
    dataset: &MultiTaskDataset,
    config: &SompConfig,
    mut progress: F,
) -> Result<SelectionPath, SompError> {
    let n = dataset.n();
    let p = dataset.p();
    let num_tasks = dataset.num_tasks();
    let step_cap = (n.saturating_sub(1)).min(p).max(1);
    let max_steps = config.max_steps.unwrap_or(step_cap).min(step_cap);
    let eps = config
        .candidate_tolerance
        .unwrap_or_else(|| degenerate_threshold(n));

    let mut groups: Vec<GroupState<'_>> = if dataset.is_shared_design() {
        vec![GroupState::new(dataset.design(0))]
    } else {
        (0..num_tasks)
            .map(|t| GroupState::new(dataset.design(t)))
            .collect()
    };
    let mut tasks: Vec<TaskState> = (0..num_tasks)
        .map(|t| {
            let y = dataset.response(t);
            let xty = dataset.design(t).t().dot(y).to_vec();
            let rss = sq_norm(y.as_slice().expect("contiguous response"));
            TaskState {
                group: if dataset.is_shared_design() { 0 } else { t },
                xty,
                proj: vec![0.0; p],
                rss,
            }
        })
        .collect();

    let total_ynorm: f64 = tasks.iter().map(|t| t.rss).sum();
    let bic_params = BicParams::new(n, num_tasks, p);
    let bic_empty = bic_score(total_ynorm, 0, &bic_params);

    let mut selected_mask = vec![false; p];
    let mut path = SelectionPath {
        steps: Vec::new(),
        rss_empty: total_ynorm,
        bic_empty,
    };

    for step in 0..max_steps {
        let best = scan_candidates(&groups, &tasks, &selected_mask, eps, config.parallel_candidates);
        let Some((_, f)) = best else {
            if step == 0 {
                return Err(SompError::NoValidCandidate);
            }
            break;
        };

        selected_mask[f] = true;
        let group_rows: Vec<(Vec<f64>, f64)> =
            groups.iter_mut().map(|g| g.extend(f)).collect();
        for task in tasks.iter_mut() {
            let (row, pivot) = &group_rows[task.group];
            let zeta = (task.xty[f] - task.proj[f]) / pivot;
            task.rss = (task.rss - zeta * zeta).max(0.0);
            for (m, &r) in task.proj.iter_mut().zip(row.iter()) {
                *m += zeta * r;
            }
        }

        let rss_total: f64 = tasks.iter().map(|t| t.rss).sum();
        let bic = bic_score(rss_total, step + 1, &bic_params);
        path.steps.push(SelectionStep {
            selected_index: f,
            rss_after: rss_total,
            bic_after: bic,
        });
        progress(StepInfo {
            step: step + 1,
            selected_index: f,
            rss: rss_total,
            bic,
        });

        if rss_total < 1e-12 * total_ynorm {
            break;
        }
    }
    Ok(path)
}

/// Best candidate by total gain: maximal gain, ties to the smallest index.
///
/// A candidate is skipped when its residualized norm is degenerate in any
/// design group, since the model could not be extended with it. The
/// reduction is associative and uses exact comparisons, so the result is
/// independent of chunking and thread count.
fn scan_candidates(
    groups: &[GroupState<'_>],
    tasks: &[TaskState],
    selected_mask: &[bool],
    eps: f64,
    parallel: bool,
) -> Option<(f64, usize)> {
    let p = selected_mask.len();
    let eval = |j: usize| -> Option<(f64, usize)> {
        if selected_mask[j] {
            return None;
        }
        if groups.iter().any(|g| g.resid_sq[j] <= eps) {
            return None;
        }
        let mut gain = 0.0;
        for task in tasks {
            let corr = task.xty[j] - task.proj[j];
            gain += corr * corr / groups[task.group].resid_sq[j];
        }
        Some((gain, j))
    };
    let combine = |a: Option<(f64, usize)>, b: Option<(f64, usize)>| match (a, b) {
        (Some((ga, ja)), Some((gb, jb))) => {
            if gb > ga || (gb == ga && jb < ja) {
                Some((gb, jb))
            } else {
                Some((ga, ja))
            }
        }
        (x, None) => x,
        (None, y) => y,
    };
    if parallel {
        (0..p)
            .into_par_iter()
            .fold(|| None, |acc, j| combine(acc, eval(j)))
            .reduce(|| None, combine)
    } else {
        (0..p).fold(None, |acc, j| combine(acc, eval(j)))
    }
}

/// Path prefix minimizing the modified BIC; step 0 is the empty model.
/// Ties resolve to the smaller (sparser) prefix.
pub fn select_by_bic(path: &SelectionPath) -> (usize, SupportSet) {
    let mut best_k = 0;
    let mut best = path.bic_empty;
    for (i, step) in path.steps.iter().enumerate() {
        if step.bic_after < best {
            best = step.bic_after;
            best_k = i + 1;
        }
    }
    (best_k, path.support_prefix(best_k))
}

//! Single-task comparison methods (SIS, ISIS and per-task OMP) and the
//! composed pipelines used in the experiment harness.

use rayon::prelude::*;
use thiserror::Error;

use crate::alasso::{self, AlassoConfig, AlassoError};
use crate::bic::BicParams;
use crate::datamodel::{CoefficientMatrix, MultiTaskDataset, SelectionPath, SupportSet};
use crate::projector::CholeskyState;
use crate::somp::{self, SompConfig, SompError};
use crate::util::{dot, sq_norm};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("task {task}: {source}")]
    Alasso {
        task: usize,
        #[source]
        source: AlassoError,
    },
    #[error("task {task}: {source}")]
    Somp {
        task: usize,
        #[source]
        source: SompError,
    },
    #[error(transparent)]
    JointSomp(#[from] SompError),
    #[error("screening returned an empty set for task {task}")]
    EmptyScreen { task: usize },
}

/// Sizes for the single-task screeners; `None` fields fall back to the
/// conventional defaults derived from `n`.
#[derive(Clone, Debug, Default)]
pub struct BaselineConfig {
    /// SIS keeps this many variables (default `n - 1`).
    pub sis_model_size: Option<usize>,
    /// Variables added per ISIS iteration (default `floor(n / log n)`).
    pub isis_per_iter: Option<usize>,
    /// ISIS iteration count (default `floor(log n - 1)`).
    pub isis_iterations: Option<usize>,
    /// Per-task OMP step cap (default `min(n - 1, p)`).
    pub omp_max_steps: Option<usize>,
}

impl BaselineConfig {
    pub fn sis_size(&self, n: usize, p: usize) -> usize {
        self.sis_model_size
            .unwrap_or_else(|| n.saturating_sub(1))
            .clamp(1, p)
    }

    pub fn isis_per_iter(&self, n: usize) -> usize {
        self.isis_per_iter
            .unwrap_or_else(|| ((n as f64) / (n as f64).ln()).floor() as usize)
            .max(1)
    }

    pub fn isis_iterations(&self, n: usize) -> usize {
        self.isis_iterations
            .unwrap_or_else(|| ((n as f64).ln() - 1.0).floor().max(1.0) as usize)
            .max(1)
    }
}

/// Marginal-correlation ranking on unit-normalized columns: the top `size`
/// variables by `|X_j'y| / ||X_j||`, ties to the smaller index.
pub fn sis_screen(dataset: &MultiTaskDataset, task: usize, size: usize) -> SupportSet {
    let scores = marginal_scores(dataset, task, dataset.response(task).as_slice().unwrap());
    top_by_score(&scores, size, |_| true)
}

fn marginal_scores(dataset: &MultiTaskDataset, task: usize, residual: &[f64]) -> Vec<f64> {
    let design = dataset.design(task);
    (0..dataset.p())
        .map(|j| {
            let col = design.column(j).to_vec();
            let norm = sq_norm(&col).sqrt();
            if norm == 0.0 {
                0.0
            } else {
                dot(&col, residual).abs() / norm
            }
        })
        .collect()
}

fn top_by_score<F: Fn(usize) -> bool>(scores: &[f64], size: usize, eligible: F) -> SupportSet {
    let mut order: Vec<usize> = (0..scores.len()).filter(|&j| eligible(j)).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    let mut set = SupportSet::new();
    for &j in order.iter().take(size) {
        set.push(j).expect("indices distinct");
    }
    set
}

/// Iterative SIS: repeated marginal ranking against the OLS residual of
/// everything accumulated so far. Columns that are exactly collinear with
/// the accumulated set are dropped rather than kept in the output.
pub fn isis_screen(dataset: &MultiTaskDataset, task: usize, config: &BaselineConfig) -> SupportSet {
    let n = dataset.n();
    let per_iter = config.isis_per_iter(n);
    let iterations = config.isis_iterations(n);
    let y = dataset.response(task).to_vec();

    let mut state = CholeskyState::init(dataset, task);
    let mut accumulated = SupportSet::new();
    let mut residual = y.clone();
    for _iter in 0..iterations {
        if accumulated.len() >= dataset.p() {
            break;
        }
        let scores = marginal_scores(dataset, task, &residual);
        let batch = top_by_score(&scores, per_iter, |j| !accumulated.contains(j));
        if batch.is_empty() {
            break;
        }
        for j in batch.iter() {
            if state.extend(j).is_ok() {
                accumulated.push(j).expect("not yet accumulated");
            }
        }
        if state.is_empty() {
            break;
        }
        let fitted = state.fitted().expect("nonempty model");
        residual = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    }
    accumulated
}

/// Single-task orthogonal matching pursuit; same engine as the joint loop,
/// restricted to one task (so BIC is recorded with T = 1).
pub fn omp_single(
    dataset: &MultiTaskDataset,
    task: usize,
    max_steps: Option<usize>,
) -> Result<SelectionPath, SompError> {
    let view = dataset.single_task(task);
    let config = SompConfig {
        max_steps,
        ..Default::default()
    };
    somp::run_somp(&view, &config)
}

/// The estimation pipelines compared in the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PipelineMethod {
    SisAlasso,
    IsisAlasso,
    Omp,
    Somp,
    SompAlasso,
}

impl PipelineMethod {
    pub const ALL: [PipelineMethod; 5] = [
        PipelineMethod::SisAlasso,
        PipelineMethod::IsisAlasso,
        PipelineMethod::Omp,
        PipelineMethod::Somp,
        PipelineMethod::SompAlasso,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PipelineMethod::SisAlasso => "SIS-ALASSO",
            PipelineMethod::IsisAlasso => "ISIS-ALASSO",
            PipelineMethod::Omp => "OMP",
            PipelineMethod::Somp => "SOMP",
            PipelineMethod::SompAlasso => "SOMP-ALASSO",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        let canon = name.trim().to_ascii_uppercase().replace('_', "-");
        Self::ALL.iter().copied().find(|m| m.name() == canon)
    }
}

/// Shared settings for every pipeline.
#[derive(Clone, Debug, Default)]
pub struct PipelineConfig {
    pub baseline: BaselineConfig,
    pub somp: SompConfig,
    pub alasso: AlassoConfig,
    /// Ambient dimension used in per-task BIC penalties; defaults to the
    /// dataset's p.
    pub bic_p_override: Option<usize>,
}

impl PipelineConfig {
    fn bic_p(&self, dataset: &MultiTaskDataset) -> usize {
        self.bic_p_override.unwrap_or_else(|| dataset.p())
    }
}

/// Runs one estimation pipeline end to end, returning the p x T
/// coefficient estimate.
pub fn run_pipeline(
    dataset: &MultiTaskDataset,
    method: PipelineMethod,
    config: &PipelineConfig,
) -> Result<CoefficientMatrix, BaselineError> {
    match method {
        PipelineMethod::SisAlasso => {
            let size = config.baseline.sis_size(dataset.n(), dataset.p());
            screen_then_alasso(dataset, config, |task| sis_screen(dataset, task, size))
        }
        PipelineMethod::IsisAlasso => screen_then_alasso(dataset, config, |task| {
            isis_screen(dataset, task, &config.baseline)
        }),
        PipelineMethod::Omp => {
            let results: Result<Vec<(usize, Vec<(usize, f64)>)>, BaselineError> = (0..dataset
                .num_tasks())
                .into_par_iter()
                .map(|task| {
                    let path = omp_single(dataset, task, config.baseline.omp_max_steps)
                        .map_err(|source| BaselineError::Somp { task, source })?;
                    let (_, support) = somp::select_by_bic(&path);
                    Ok((task, ols_on_support(dataset, task, &support)))
                })
                .collect();
            Ok(assemble(dataset, results?))
        }
        PipelineMethod::Somp => {
            let path = somp::run_somp(dataset, &config.somp)?;
            let (_, support) = somp::select_by_bic(&path);
            let results: Vec<(usize, Vec<(usize, f64)>)> = (0..dataset.num_tasks())
                .into_par_iter()
                .map(|task| (task, ols_on_support(dataset, task, &support)))
                .collect();
            Ok(assemble(dataset, results))
        }
        PipelineMethod::SompAlasso => {
            let path = somp::run_somp(dataset, &config.somp)?;
            let (_, support) = somp::select_by_bic(&path);
            if support.is_empty() {
                return Ok(CoefficientMatrix::zeros(dataset.p(), dataset.num_tasks()));
            }
            alasso::exact_support_pipeline(dataset, &support, &config.alasso, config.bic_p(dataset))
                .map_err(|source| BaselineError::Alasso { task: 0, source })
        }
    }
}

fn screen_then_alasso<F: Fn(usize) -> SupportSet + Sync>(
    dataset: &MultiTaskDataset,
    config: &PipelineConfig,
    screen: F,
) -> Result<CoefficientMatrix, BaselineError> {
    let bic_p = config.bic_p(dataset);
    let params = BicParams::new(dataset.n(), 1, bic_p);
    let results: Result<Vec<(usize, Vec<(usize, f64)>)>, BaselineError> = (0..dataset.num_tasks())
        .into_par_iter()
        .map(|task| {
            let screened = screen(task);
            if screened.is_empty() {
                return Err(BaselineError::EmptyScreen { task });
            }
            let weights =
                alasso::compute_weights(dataset, task, &screened, config.alasso.weight_epsilon)
                    .map_err(|source| BaselineError::Alasso { task, source })?;
            let fits = alasso::fit_alasso_path(dataset, task, &screened, &weights, &config.alasso)
                .map_err(|source| BaselineError::Alasso { task, source })?;
            let best = alasso::select_fit(&fits, &params);
            Ok((task, best.nonzeros().collect()))
        })
        .collect();
    Ok(assemble(dataset, results?))
}

/// OLS coefficients on a fixed support, skipping degenerate columns.
fn ols_on_support(
    dataset: &MultiTaskDataset,
    task: usize,
    support: &SupportSet,
) -> Vec<(usize, f64)> {
    let mut state = CholeskyState::init(dataset, task);
    let mut kept = Vec::new();
    for j in support.iter() {
        if state.extend(j).is_ok() {
            kept.push(j);
        }
    }
    if kept.is_empty() {
        return Vec::new();
    }
    let beta = state.coefficients().expect("nonempty model");
    kept.into_iter().zip(beta).collect()
}

fn assemble(
    dataset: &MultiTaskDataset,
    per_task: Vec<(usize, Vec<(usize, f64)>)>,
) -> CoefficientMatrix {
    let mut matrix = CoefficientMatrix::zeros(dataset.p(), dataset.num_tasks());
    for (task, entries) in per_task {
        for (j, b) in entries {
            matrix.set(j, task, b);
        }
    }
    matrix
}

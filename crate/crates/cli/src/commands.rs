//! `screen` and `fit` on user-supplied CSV datasets.

use std::io::Write;
use std::path::Path;

use ndarray::Array1;
use serde::Serialize;
use somp_core::alasso::{compute_weights, fit_alasso_path, select_fit, AlassoConfig};
use somp_core::bic::BicParams;
use somp_core::somp::{run_somp, select_by_bic, SompConfig};
use somp_core::{MultiTaskDataset, SelectionPath, SupportSet};

use crate::config::OutputFormat;
use crate::error::CliError;
use crate::io::{columns_as_responses, open_sink, read_matrix, standardize_columns};

/// Settings shared by the two dataset commands.
pub struct DatasetOptions {
    pub standardize: bool,
    pub bic_p_override: Option<usize>,
    pub format: OutputFormat,
}

pub fn load_dataset(
    x_path: &Path,
    y_path: &Path,
    standardize: bool,
) -> Result<MultiTaskDataset, CliError> {
    let mut x = read_matrix(x_path)?;
    let y = read_matrix(y_path)?;
    if x.nrows() != y.nrows() {
        return Err(CliError::Data(format!(
            "{} has {} rows but {} has {}",
            x_path.display(),
            x.nrows(),
            y_path.display(),
            y.nrows()
        )));
    }
    if standardize {
        standardize_columns(&mut x)?;
    }
    Ok(MultiTaskDataset::shared(x, columns_as_responses(&y))?)
}

fn screen_dataset(dataset: &MultiTaskDataset) -> Result<(SelectionPath, SupportSet), CliError> {
    let config = SompConfig {
        parallel_candidates: true,
        ..Default::default()
    };
    let path = run_somp(dataset, &config)?;
    let (_, support) = select_by_bic(&path);
    Ok((path, support))
}

#[derive(Serialize)]
struct PathStep {
    step: usize,
    variable: usize,
    rss: f64,
    bic: f64,
}

#[derive(Serialize)]
struct ScreenReport {
    path: Vec<PathStep>,
    /// 1-based indices of the selected support, in selection order.
    selected: Vec<usize>,
}

fn screen_report(path: &SelectionPath, support: &SupportSet) -> ScreenReport {
    ScreenReport {
        path: path
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| PathStep {
                step: i + 1,
                variable: s.selected_index + 1,
                rss: s.rss_after,
                bic: s.bic_after,
            })
            .collect(),
        selected: support.iter().map(|j| j + 1).collect(),
    }
}

/// Greedy screening of a CSV dataset. The CSV output lists the whole
/// path; `in_selected` marks the prefix kept by the selection score.
pub fn screen(
    x_path: &Path,
    y_path: &Path,
    output: Option<&Path>,
    opts: &DatasetOptions,
) -> Result<(), CliError> {
    let dataset = load_dataset(x_path, y_path, opts.standardize)?;
    let (path, support) = screen_dataset(&dataset)?;
    let report = screen_report(&path, &support);
    let mut sink = open_sink(output)?;
    match opts.format {
        OutputFormat::Csv => {
            writeln!(sink, "step,variable,rss,bic,in_selected")?;
            for s in &report.path {
                let kept = u8::from(s.step <= report.selected.len());
                writeln!(sink, "{},{},{},{},{}", s.step, s.variable, s.rss, s.bic, kept)?;
            }
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut sink, &report)
                .map_err(|e| CliError::Data(e.to_string()))?;
            writeln!(sink)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct FitCoefficient {
    variable: usize,
    task: usize,
    value: f64,
}

#[derive(Serialize)]
struct FitTask {
    task: usize,
    /// 1-based variables with nonzero coefficients.
    support: Vec<usize>,
    rss: Option<f64>,
    error: Option<String>,
}

#[derive(Serialize)]
struct FitReport {
    /// 1-based screened variables, in selection order.
    screened: Vec<usize>,
    coefficients: Vec<FitCoefficient>,
    tasks: Vec<FitTask>,
}

fn fit_task(
    dataset: &MultiTaskDataset,
    task: usize,
    screened: &SupportSet,
    params: &BicParams,
) -> Result<(Vec<FitCoefficient>, f64), CliError> {
    let y: &Array1<f64> = dataset.response(task);
    let mean = y.sum() / y.len() as f64;
    if y.iter().all(|&v| v == mean) {
        return Err(CliError::Data(format!(
            "response column {} has zero variance",
            task + 1
        )));
    }
    let config = AlassoConfig::default();
    let weights = compute_weights(dataset, task, screened, config.weight_epsilon)?;
    let fits = fit_alasso_path(dataset, task, screened, &weights, &config)?;
    let chosen = select_fit(&fits, params);
    let coefficients = chosen
        .nonzeros()
        .map(|(j, b)| FitCoefficient {
            variable: j + 1,
            task: task + 1,
            value: b,
        })
        .collect();
    Ok((coefficients, chosen.rss))
}

/// Screens, then refines each task independently. A failing task is
/// reported in its summary row; the other tasks still produce estimates.
pub fn fit(
    x_path: &Path,
    y_path: &Path,
    output: Option<&Path>,
    opts: &DatasetOptions,
) -> Result<(), CliError> {
    let dataset = load_dataset(x_path, y_path, opts.standardize)?;
    let (_, support) = screen_dataset(&dataset)?;
    let params = BicParams::new(
        dataset.n(),
        1,
        opts.bic_p_override.unwrap_or_else(|| dataset.p()),
    );

    let mut report = FitReport {
        screened: support.iter().map(|j| j + 1).collect(),
        coefficients: Vec::new(),
        tasks: Vec::new(),
    };
    let mut failures = 0usize;
    for task in 0..dataset.num_tasks() {
        match fit_task(&dataset, task, &support, &params) {
            Ok((coefficients, rss)) => {
                report.tasks.push(FitTask {
                    task: task + 1,
                    support: coefficients.iter().map(|c| c.variable).collect(),
                    rss: Some(rss),
                    error: None,
                });
                report.coefficients.extend(coefficients);
            }
            Err(e) => {
                failures += 1;
                eprintln!("task {}: {e}", task + 1);
                report.tasks.push(FitTask {
                    task: task + 1,
                    support: Vec::new(),
                    rss: None,
                    error: Some(e.to_string()),
                });
            }
        }
    }
    if failures == dataset.num_tasks() {
        return Err(CliError::Numerical("every task failed to fit".into()));
    }

    let mut sink = open_sink(output)?;
    match opts.format {
        OutputFormat::Csv => {
            // kind=coef rows carry the sparse estimate (the per-task
            // support is exactly its coef rows); kind=rss rows carry the
            // training RSS, one per successful task
            writeln!(sink, "kind,variable,task,value")?;
            for c in &report.coefficients {
                writeln!(sink, "coef,{},{},{}", c.variable, c.task, c.value)?;
            }
            for t in &report.tasks {
                if let Some(rss) = t.rss {
                    writeln!(sink, "rss,,{},{}", t.task, rss)?;
                }
            }
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut sink, &report)
                .map_err(|e| CliError::Data(e.to_string()))?;
            writeln!(sink)?;
        }
    }
    Ok(())
}

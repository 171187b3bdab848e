//! Evaluation quantities: coverage probability, zero fractions, exact-fit
//! indicator, support sizes, estimation error, test-set R-squared, and
//! their Monte Carlo aggregation.

use serde::Serialize;
use thiserror::Error;

use crate::datamodel::{
    exact_support, union_support, CoefficientMatrix, MultiTaskDataset, TrueModel,
};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("truth is {tp}x{tt}, estimate is {ep}x{et}")]
    DimensionMismatch {
        tp: usize,
        tt: usize,
        ep: usize,
        et: usize,
    },
    #[error("test responses have zero variance; R^2 is undefined")]
    ZeroVariance,
    #[error("cannot aggregate an empty replicate list")]
    EmptyInput,
}

/// Support-recovery quality of one estimate against the truth.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupportMetrics {
    /// Does the estimated support contain every true member?
    pub covered: bool,
    /// Fraction of true zeros estimated as zero.
    pub frac_correct_zeros: f64,
    /// Fraction of true nonzeros estimated as zero.
    pub frac_incorrect_zeros: f64,
    /// Estimated support equals the true support exactly.
    pub exactly_fitted: bool,
    pub support_size: usize,
}

fn support_metrics_from_sets(
    truth: &[usize],
    estimate: &[usize],
    universe: usize,
) -> SupportMetrics {
    let in_truth = |j: &usize| truth.binary_search(j).is_ok();
    let true_count = truth.len();
    let false_count = universe - true_count;
    let est_true = estimate.iter().filter(|j| in_truth(j)).count();
    let est_false = estimate.len() - est_true;
    let covered = est_true == true_count;
    let frac_correct_zeros = if false_count == 0 {
        1.0
    } else {
        (false_count - est_false) as f64 / false_count as f64
    };
    let frac_incorrect_zeros = if true_count == 0 {
        0.0
    } else {
        (true_count - est_true) as f64 / true_count as f64
    };
    SupportMetrics {
        covered,
        frac_correct_zeros,
        frac_incorrect_zeros,
        exactly_fitted: covered && est_false == 0,
        support_size: estimate.len(),
    }
}

fn check_dims(truth: &TrueModel, estimate: &CoefficientMatrix) -> Result<(), MetricsError> {
    let t = &truth.coefficients;
    if t.p() != estimate.p() || t.num_tasks() != estimate.num_tasks() {
        return Err(MetricsError::DimensionMismatch {
            tp: t.p(),
            tt: t.num_tasks(),
            ep: estimate.p(),
            et: estimate.num_tasks(),
        });
    }
    Ok(())
}

/// Union-support (row-support) recovery metrics.
pub fn union_metrics(
    truth: &TrueModel,
    estimate: &CoefficientMatrix,
) -> Result<SupportMetrics, MetricsError> {
    check_dims(truth, estimate)?;
    let true_set = truth.relevant_set.sorted();
    let est_set = union_support(estimate).sorted();
    Ok(support_metrics_from_sets(
        &true_set,
        &est_set,
        truth.coefficients.p(),
    ))
}

/// Entrywise-support recovery metrics over the p x T grid.
pub fn exact_metrics(
    truth: &TrueModel,
    estimate: &CoefficientMatrix,
) -> Result<SupportMetrics, MetricsError> {
    check_dims(truth, estimate)?;
    let num_tasks = truth.coefficients.num_tasks();
    let flatten = |pairs: Vec<(usize, usize)>| -> Vec<usize> {
        let mut v: Vec<usize> = pairs.into_iter().map(|(j, t)| j * num_tasks + t).collect();
        v.sort_unstable();
        v
    };
    let true_set = flatten(exact_support(&truth.coefficients));
    let est_set = flatten(exact_support(estimate));
    Ok(support_metrics_from_sets(
        &true_set,
        &est_set,
        truth.coefficients.p() * num_tasks,
    ))
}

/// Squared Frobenius distance between the true and estimated coefficients.
pub fn estimation_error(
    truth: &TrueModel,
    estimate: &CoefficientMatrix,
) -> Result<f64, MetricsError> {
    check_dims(truth, estimate)?;
    let mut err = 0.0;
    for (j, t, v) in truth.coefficients.iter() {
        let d = v - estimate.get(j, t);
        err += d * d;
    }
    // entries present only in the estimate
    for (j, t, v) in estimate.iter() {
        if truth.coefficients.get(j, t) == 0.0 {
            err += v * v;
        }
    }
    Ok(err)
}

/// Test-set R-squared of the estimate's predictions, against per-task
/// mean baselines.
pub fn r2_test(test: &MultiTaskDataset, estimate: &CoefficientMatrix) -> Result<f64, MetricsError> {
    let n = test.n();
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for t in 0..test.num_tasks() {
        let y = test.response(t);
        let mean = y.sum() / n as f64;
        let mut pred = vec![0.0f64; n];
        for (j, task, b) in estimate.iter() {
            if task == t {
                for (pi, &x) in pred.iter_mut().zip(test.design(t).column(j).iter()) {
                    *pi += b * x;
                }
            }
        }
        for (i, &yi) in y.iter().enumerate() {
            ss_res += (yi - pred[i]) * (yi - pred[i]);
            ss_tot += (yi - mean) * (yi - mean);
        }
    }
    if ss_tot == 0.0 {
        return Err(MetricsError::ZeroVariance);
    }
    Ok(1.0 - ss_res / ss_tot)
}

/// All per-replicate quantities for one method.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReplicateReport {
    pub union: SupportMetrics,
    pub exact: SupportMetrics,
    pub estimation_error: f64,
    pub r2_test: f64,
}

impl ReplicateReport {
    pub fn evaluate(
        truth: &TrueModel,
        estimate: &CoefficientMatrix,
        test: &MultiTaskDataset,
    ) -> Result<Self, MetricsError> {
        Ok(Self {
            union: union_metrics(truth, estimate)?,
            exact: exact_metrics(truth, estimate)?,
            estimation_error: estimation_error(truth, estimate)?,
            r2_test: r2_test(test, estimate)?,
        })
    }
}

/// Mean and sample standard deviation of one metric over replicates.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub sd: f64,
}

fn summarize(values: impl Iterator<Item = f64> + Clone) -> MetricSummary {
    let n = values.clone().count();
    let mean = values.clone().sum::<f64>() / n as f64;
    let sd = if n < 2 {
        0.0
    } else {
        (values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    MetricSummary { mean, sd }
}

/// Aggregated support metrics (fractions in [0, 1]; reports scale to
/// percentages at the formatting layer).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SupportAggregate {
    pub coverage: MetricSummary,
    pub correct_zeros: MetricSummary,
    pub incorrect_zeros: MetricSummary,
    pub exactly_fitted: MetricSummary,
    pub support_size: MetricSummary,
}

fn aggregate_support<F: Fn(&ReplicateReport) -> &SupportMetrics>(
    reports: &[ReplicateReport],
    pick: F,
) -> SupportAggregate {
    let bools = |f: &dyn Fn(&SupportMetrics) -> bool| {
        summarize(
            reports
                .iter()
                .map(|r| if f(pick(r)) { 1.0 } else { 0.0 })
                .collect::<Vec<_>>()
                .into_iter(),
        )
    };
    let reals = |f: &dyn Fn(&SupportMetrics) -> f64| {
        summarize(
            reports
                .iter()
                .map(|r| f(pick(r)))
                .collect::<Vec<_>>()
                .into_iter(),
        )
    };
    SupportAggregate {
        coverage: bools(&|m| m.covered),
        correct_zeros: reals(&|m| m.frac_correct_zeros),
        incorrect_zeros: reals(&|m| m.frac_incorrect_zeros),
        exactly_fitted: bools(&|m| m.exactly_fitted),
        support_size: reals(&|m| m.support_size as f64),
    }
}

/// One method's row of the results table.
#[derive(Clone, Debug, Serialize)]
pub struct AggregateReport {
    pub method: String,
    pub replicates: usize,
    pub union: SupportAggregate,
    pub exact: SupportAggregate,
    pub estimation_error: MetricSummary,
    pub r2_test: MetricSummary,
}

/// Per-metric mean and sample standard deviation over replicates.
pub fn aggregate(
    reports: &[ReplicateReport],
    method: &str,
) -> Result<AggregateReport, MetricsError> {
    if reports.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    Ok(AggregateReport {
        method: method.to_string(),
        replicates: reports.len(),
        union: aggregate_support(reports, |r| &r.union),
        exact: aggregate_support(reports, |r| &r.exact),
        estimation_error: summarize(
            reports
                .iter()
                .map(|r| r.estimation_error)
                .collect::<Vec<_>>()
                .into_iter(),
        ),
        r2_test: summarize(
            reports
                .iter()
                .map(|r| r.r2_test)
                .collect::<Vec<_>>()
                .into_iter(),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::TrueModel;
    use ndarray::{Array1, Array2};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn truth_with(entries: &[(usize, usize, f64)], p: usize, num_tasks: usize) -> TrueModel {
        let mut b = CoefficientMatrix::zeros(p, num_tasks);
        for &(j, t, v) in entries {
            b.set(j, t, v);
        }
        TrueModel::new(b, 1.0)
    }

    #[test]
    fn perfect_recovery_metrics() {
        let truth = truth_with(&[(1, 0, 2.0), (4, 1, -1.0)], 6, 2);
        let m = union_metrics(&truth, &truth.coefficients).unwrap();
        assert!(m.covered && m.exactly_fitted);
        assert_eq!(m.frac_correct_zeros, 1.0);
        assert_eq!(m.frac_incorrect_zeros, 0.0);
        assert_eq!(m.support_size, 2);
        let e = exact_metrics(&truth, &truth.coefficients).unwrap();
        assert!(e.exactly_fitted);
        assert_eq!(e.support_size, 2);
        assert_eq!(estimation_error(&truth, &truth.coefficients).unwrap(), 0.0);
    }

    #[test]
    fn empty_estimate_metrics() {
        let truth = truth_with(&[(1, 0, 2.0), (4, 1, -1.0)], 6, 2);
        let empty = CoefficientMatrix::zeros(6, 2);
        let m = union_metrics(&truth, &empty).unwrap();
        assert!(!m.covered);
        assert_eq!(m.frac_correct_zeros, 1.0);
        assert_eq!(m.frac_incorrect_zeros, 1.0);
        assert!(!m.exactly_fitted);
        let err = estimation_error(&truth, &empty).unwrap();
        assert_eq!(err, 5.0);
    }

    #[test]
    fn full_estimate_covers_without_exact_fit() {
        let truth = truth_with(&[(1, 0, 2.0)], 4, 1);
        let mut full = CoefficientMatrix::zeros(4, 1);
        for j in 0..4 {
            full.set(j, 0, 1.0);
        }
        let m = union_metrics(&truth, &full).unwrap();
        assert!(m.covered);
        assert_eq!(m.frac_correct_zeros, 0.0);
        assert_eq!(m.frac_incorrect_zeros, 0.0);
        assert!(!m.exactly_fitted);
    }

    #[test]
    fn union_and_exact_coincide_for_single_task() {
        let truth = truth_with(&[(0, 0, 1.0), (3, 0, 2.0)], 5, 1);
        let mut est = CoefficientMatrix::zeros(5, 1);
        est.set(0, 0, 0.9);
        est.set(2, 0, 0.1);
        let u = union_metrics(&truth, &est).unwrap();
        let e = exact_metrics(&truth, &est).unwrap();
        assert_eq!(u, e);
    }

    #[test]
    fn randomized_metrics_match_double_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(401);
        for _ in 0..30 {
            let p = 8;
            let num_tasks = 3;
            let mut tb = CoefficientMatrix::zeros(p, num_tasks);
            let mut eb = CoefficientMatrix::zeros(p, num_tasks);
            for j in 0..p {
                for t in 0..num_tasks {
                    if rng.gen_bool(0.3) {
                        tb.set(j, t, rng.gen_range(0.5..2.0));
                    }
                    if rng.gen_bool(0.3) {
                        eb.set(j, t, rng.gen_range(0.5..2.0));
                    }
                }
            }
            if crate::datamodel::union_support(&tb).is_empty() {
                continue;
            }
            let truth = TrueModel::new(tb.clone(), 1.0);
            let got = exact_metrics(&truth, &eb).unwrap();
            // naive double loop
            let mut tz = 0;
            let mut tnz = 0;
            let mut est_zero_true_zero = 0;
            let mut est_zero_true_nonzero = 0;
            let mut est_nnz = 0;
            for j in 0..p {
                for t in 0..num_tasks {
                    let tv = tb.get(j, t) != 0.0;
                    let ev = eb.get(j, t) != 0.0;
                    if tv {
                        tnz += 1;
                        if !ev {
                            est_zero_true_nonzero += 1;
                        }
                    } else {
                        tz += 1;
                        if !ev {
                            est_zero_true_zero += 1;
                        }
                    }
                    if ev {
                        est_nnz += 1;
                    }
                }
            }
            assert_eq!(got.support_size, est_nnz);
            assert_eq!(got.covered, est_zero_true_nonzero == 0);
            assert!(
                (got.frac_correct_zeros - est_zero_true_zero as f64 / tz as f64).abs() < 1e-15
            );
            assert!(
                (got.frac_incorrect_zeros - est_zero_true_nonzero as f64 / tnz as f64).abs()
                    < 1e-15
            );
            // frobenius oracle
            let mut err = 0.0;
            for j in 0..p {
                for t in 0..num_tasks {
                    let d = tb.get(j, t) - eb.get(j, t);
                    err += d * d;
                }
            }
            assert!((estimation_error(&truth, &eb).unwrap() - err).abs() < 1e-12);
        }
    }

    #[test]
    fn complementarity_of_zero_counts() {
        let truth = truth_with(&[(0, 0, 1.0), (2, 1, 1.0)], 6, 2);
        let mut est = CoefficientMatrix::zeros(6, 2);
        est.set(0, 0, 1.0);
        est.set(5, 1, 0.4);
        let m = union_metrics(&truth, &est).unwrap();
        let p = 6.0;
        let s = 2.0;
        let est_false = 1.0; // variable 5
        assert!((m.frac_correct_zeros * (p - s) + est_false - (p - s)).abs() < 1e-12);
    }

    #[test]
    fn r2_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(409);
        let n = 20;
        let x = Array2::from_shape_fn((n, 3), |_| {
            rng.sample::<f64, _>(rand_distr::StandardNormal)
        });
        let y = Array1::from_iter((0..n).map(|i| 2.0 * x[[i, 1]]));
        let test = MultiTaskDataset::shared(x, vec![y]).unwrap();
        let mut perfect = CoefficientMatrix::zeros(3, 1);
        perfect.set(1, 0, 2.0);
        assert!((r2_test(&test, &perfect).unwrap() - 1.0).abs() < 1e-12);

        // zero estimate on centered responses -> R^2 = 0
        let x = Array2::from_shape_fn((4, 2), |_| {
            rng.sample::<f64, _>(rand_distr::StandardNormal)
        });
        let y = Array1::from(vec![1.0, -1.0, 2.0, -2.0]);
        let test = MultiTaskDataset::shared(x, vec![y]).unwrap();
        let zero = CoefficientMatrix::zeros(2, 1);
        assert!(r2_test(&test, &zero).unwrap().abs() < 1e-12);
    }

    #[test]
    fn r2_zero_variance_is_an_error() {
        let x = Array2::zeros((3, 2));
        let y = Array1::from(vec![1.0, 1.0, 1.0]);
        let test = MultiTaskDataset::shared(x, vec![y]).unwrap();
        let zero = CoefficientMatrix::zeros(2, 1);
        assert!(matches!(
            r2_test(&test, &zero),
            Err(MetricsError::ZeroVariance)
        ));
    }

    #[test]
    fn r2_matches_double_loop_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(419);
        let n = 15;
        let x = Array2::from_shape_fn((n, 4), |_| {
            rng.sample::<f64, _>(rand_distr::StandardNormal)
        });
        let ys: Vec<Array1<f64>> = (0..2)
            .map(|_| {
                Array1::from_iter(
                    (0..n).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)),
                )
            })
            .collect();
        let test = MultiTaskDataset::shared(x.clone(), ys.clone()).unwrap();
        let mut est = CoefficientMatrix::zeros(4, 2);
        est.set(0, 0, 0.5);
        est.set(3, 1, -1.2);
        let got = r2_test(&test, &est).unwrap();
        let mut num = 0.0;
        let mut den = 0.0;
        for (t, y) in ys.iter().enumerate() {
            let mean = y.sum() / n as f64;
            for i in 0..n {
                let pred: f64 = (0..4).map(|j| est.get(j, t) * x[[i, j]]).sum();
                num += (y[i] - pred) * (y[i] - pred);
                den += (y[i] - mean) * (y[i] - mean);
            }
        }
        assert!((got - (1.0 - num / den)).abs() < 1e-12);
    }

    #[test]
    fn aggregate_trivia_and_two_pass_oracle() {
        let truth = truth_with(&[(0, 0, 1.0)], 3, 1);
        let make = |covered: bool, err: f64| {
            let mut est = CoefficientMatrix::zeros(3, 1);
            if covered {
                est.set(0, 0, 1.0 - err.sqrt());
            }
            ReplicateReport {
                union: union_metrics(&truth, &est).unwrap(),
                exact: exact_metrics(&truth, &est).unwrap(),
                estimation_error: err,
                r2_test: 0.5,
            }
        };
        let single = aggregate(&[make(true, 0.25)], "X").unwrap();
        assert_eq!(single.union.coverage.mean, 1.0);
        assert_eq!(single.union.coverage.sd, 0.0);
        assert_eq!(single.estimation_error.mean, 0.25);

        let pair = aggregate(&[make(true, 0.0), make(false, 1.0)], "X").unwrap();
        assert_eq!(pair.union.coverage.mean, 0.5);

        // two-pass oracle over a fuzzed batch
        let mut rng = ChaCha8Rng::seed_from_u64(421);
        let reports: Vec<ReplicateReport> = (0..100)
            .map(|_| make(rng.gen_bool(0.5), rng.gen_range(0.0..4.0)))
            .collect();
        let agg = aggregate(&reports, "fuzz").unwrap();
        let errs: Vec<f64> = reports.iter().map(|r| r.estimation_error).collect();
        let mean = errs.iter().sum::<f64>() / errs.len() as f64;
        let sd = (errs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (errs.len() - 1) as f64)
            .sqrt();
        assert!((agg.estimation_error.mean - mean).abs() < 1e-12);
        assert!((agg.estimation_error.sd - sd).abs() < 1e-12);
        assert!(agg.union.coverage.mean >= 0.0 && agg.union.coverage.mean <= 1.0);

        assert!(matches!(aggregate(&[], "X"), Err(MetricsError::EmptyInput)));
    }
}

//! Replicated synthetic experiments and their report tables.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use somp_core::baselines::{run_pipeline, PipelineConfig};
use somp_core::metrics::{aggregate, AggregateReport, ReplicateReport, SupportAggregate};
use somp_core::simgen::{derive_replicate_seed, generate};
use somp_core::somp::SompConfig;

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::io::open_sink;

fn pipeline_config(config: &RunConfig) -> PipelineConfig {
    PipelineConfig {
        somp: SompConfig {
            parallel_candidates: true,
            ..Default::default()
        },
        bic_p_override: config.bic_p_override,
        ..Default::default()
    }
}

/// One replicate: generate, run every requested pipeline, score.
fn run_replicate(config: &RunConfig, replicate: usize) -> Result<Vec<ReplicateReport>, CliError> {
    let mut spec = config.simulation.clone();
    spec.seed = derive_replicate_seed(config.simulation.seed, replicate as u64);
    let instance = generate(&spec)?;
    let pipeline = pipeline_config(config);
    let mut reports = Vec::with_capacity(config.methods.len());
    for &method in &config.methods {
        let estimate = run_pipeline(&instance.train, method, &pipeline)?;
        let report = ReplicateReport::evaluate(&instance.truth, &estimate, &instance.test)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        reports.push(report);
    }
    Ok(reports)
}

/// Runs all replicates (in parallel) and aggregates per method.
///
/// Also returns the per-replicate raw reports, indexed
/// `[replicate][method]`, for the optional raw dump.
pub fn run_simulation(
    config: &RunConfig,
) -> Result<(Vec<AggregateReport>, Vec<Vec<ReplicateReport>>), CliError> {
    config.simulation.validate()?;
    // collected by replicate index, so ordering and output bytes do not
    // depend on the worker count
    let per_replicate: Result<Vec<Vec<ReplicateReport>>, CliError> = (0..config.replicates)
        .into_par_iter()
        .map(|r| run_replicate(config, r))
        .collect();
    let per_replicate = per_replicate?;

    let mut tables = Vec::with_capacity(config.methods.len());
    for (m, &method) in config.methods.iter().enumerate() {
        let column: Vec<ReplicateReport> = per_replicate.iter().map(|reps| reps[m]).collect();
        tables.push(
            aggregate(&column, method.name()).map_err(|e| CliError::Numerical(e.to_string()))?,
        );
    }
    Ok((tables, per_replicate))
}

fn pct(fraction: f64) -> String {
    format!("{:.1}", fraction * 100.0)
}

fn support_columns(agg: &SupportAggregate) -> [String; 5] {
    [
        pct(agg.coverage.mean),
        pct(agg.correct_zeros.mean),
        pct(agg.incorrect_zeros.mean),
        pct(agg.exactly_fitted.mean),
        agg.support_size.mean.to_string(),
    ]
}

pub const TABLE_HEADER: &str = "method,replicates,\
union_coverage,union_correct_zeros,union_incorrect_zeros,union_exactly_fitted,union_size,\
exact_coverage,exact_correct_zeros,exact_incorrect_zeros,exact_exactly_fitted,exact_size,\
estimation_error,estimation_error_sd,r2_test,r2_test_sd";

/// CSV table, one row per method. Recovery rates are percentages with one
/// decimal; the remaining columns use the shortest decimal form that
/// parses back to the same float.
pub fn format_table(reports: &[AggregateReport]) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in reports {
        let u = support_columns(&r.union);
        let e = support_columns(&r.exact);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.method,
            r.replicates,
            u[0],
            u[1],
            u[2],
            u[3],
            u[4],
            e[0],
            e[1],
            e[2],
            e[3],
            e[4],
            r.estimation_error.mean,
            r.estimation_error.sd,
            r.r2_test.mean,
            r.r2_test.sd,
        ));
    }
    out
}

#[derive(Serialize)]
struct JsonReport<'a> {
    config: &'a RunConfig,
    methods: &'a [AggregateReport],
}

pub fn format_json(config: &RunConfig, reports: &[AggregateReport]) -> String {
    let mut text = serde_json::to_string_pretty(&JsonReport {
        config,
        methods: reports,
    })
    .expect("report serialization cannot fail");
    text.push('\n');
    text
}

/// One row per replicate per method, for downstream analysis.
pub fn format_raw(config: &RunConfig, per_replicate: &[Vec<ReplicateReport>]) -> String {
    let mut out = String::from(
        "replicate,method,\
union_covered,union_correct_zeros,union_incorrect_zeros,union_exactly_fitted,union_size,\
exact_covered,exact_correct_zeros,exact_incorrect_zeros,exact_exactly_fitted,exact_size,\
estimation_error,r2_test\n",
    );
    for (r, reports) in per_replicate.iter().enumerate() {
        for (method, rep) in config.methods.iter().zip(reports) {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r + 1,
                method.name(),
                u8::from(rep.union.covered),
                rep.union.frac_correct_zeros,
                rep.union.frac_incorrect_zeros,
                u8::from(rep.union.exactly_fitted),
                rep.union.support_size,
                u8::from(rep.exact.covered),
                rep.exact.frac_correct_zeros,
                rep.exact.frac_incorrect_zeros,
                u8::from(rep.exact.exactly_fitted),
                rep.exact.support_size,
                rep.estimation_error,
                rep.r2_test,
            ));
        }
    }
    out
}

/// Full simulate command: run, format, write.
pub fn simulate(config: &RunConfig) -> Result<(), CliError> {
    let (tables, per_replicate) = run_simulation(config)?;
    let text = match config.format {
        OutputFormat::Csv => format_table(&tables),
        OutputFormat::Json => format_json(config, &tables),
    };
    let mut sink = open_sink(config.output.as_deref())?;
    sink.write_all(text.as_bytes())?;
    if let Some(raw_path) = &config.raw_output {
        std::fs::write(raw_path, format_raw(config, &per_replicate))
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", raw_path.display())))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_config, Overrides};
    use somp_core::baselines::PipelineMethod;
    use somp_core::somp::{run_somp, select_by_bic};

    fn tiny_config(extra: &str) -> RunConfig {
        let text = format!(
            "scenario = sim1\nn = 30\np = 20\ns = 2\ntasks = 3\nsnr = 20\nseed = 5\nreplicates = 2\nmethods = somp\n{extra}"
        );
        parse_config(&text, &Overrides::default()).unwrap()
    }

    #[test]
    fn single_replicate_matches_manual_chain() {
        let mut config = tiny_config("");
        config.replicates = 1;
        let (tables, _) = run_simulation(&config).unwrap();

        let mut spec = config.simulation.clone();
        spec.seed = derive_replicate_seed(config.simulation.seed, 0);
        let instance = generate(&spec).unwrap();
        let path = run_somp(&instance.train, &Default::default()).unwrap();
        let (_, support) = select_by_bic(&path);
        let estimate = run_pipeline(
            &instance.train,
            PipelineMethod::Somp,
            &pipeline_config(&config),
        )
        .unwrap();
        let manual = ReplicateReport::evaluate(&instance.truth, &estimate, &instance.test).unwrap();

        assert_eq!(tables[0].union.support_size.mean, support.len() as f64);
        assert_eq!(tables[0].estimation_error.mean, manual.estimation_error);
        assert_eq!(tables[0].r2_test.mean, manual.r2_test);
    }

    #[test]
    fn table_has_fixed_header_and_one_row_per_method() {
        let config = tiny_config("");
        let (tables, _) = run_simulation(&config).unwrap();
        let text = format_table(&tables);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], TABLE_HEADER);
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("SOMP,2,"));
    }

    #[test]
    fn csv_numeric_fields_reprint_identically() {
        let config = tiny_config("");
        let (tables, _) = run_simulation(&config).unwrap();
        let text = format_table(&tables);
        for line in text.lines().skip(1) {
            for field in line.split(',').skip(2) {
                let v: f64 = field.parse().unwrap();
                // one-decimal percentages re-parse to one-decimal strings,
                // everything else is shortest round-trip
                if field.contains('.') && field.split('.').nth(1).unwrap().len() == 1 {
                    assert_eq!(format!("{v:.1}"), field);
                } else {
                    assert_eq!(v.to_string(), field);
                }
            }
        }
    }

    #[test]
    fn json_round_trips_config_and_metrics() {
        let config = tiny_config("");
        let (tables, _) = run_simulation(&config).unwrap();
        let text = format_json(&config, &tables);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["config"]["replicates"], 2);
        assert_eq!(value["methods"][0]["method"], "SOMP");
        let mean = value["methods"][0]["estimation_error"]["mean"]
            .as_f64()
            .unwrap();
        assert_eq!(mean, tables[0].estimation_error.mean);
    }

    #[test]
    fn identical_configs_give_identical_output() {
        let config = tiny_config("");
        let (a, _) = run_simulation(&config).unwrap();
        let (b, _) = run_simulation(&config).unwrap();
        assert_eq!(format_table(&a), format_table(&b));
    }

    #[test]
    fn raw_dump_has_one_row_per_replicate_per_method() {
        let config = tiny_config("");
        let (_, per_replicate) = run_simulation(&config).unwrap();
        let raw = format_raw(&config, &per_replicate);
        assert_eq!(raw.lines().count(), 1 + 2 * config.methods.len());
    }
}

//! Flat `key = value` experiment configuration with command line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use somp_core::baselines::PipelineMethod;
use somp_core::simgen::{NoiseSpec, Scenario, SimulationSpec};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(CliError::Config(format!(
                "unknown format '{other}', expected csv or json"
            ))),
        }
    }
}

/// Fully resolved settings for a `simulate` run.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub simulation: SimulationSpec,
    #[serde(serialize_with = "method_names")]
    pub methods: Vec<PipelineMethod>,
    pub replicates: usize,
    /// None = use all available cores.
    pub threads: Option<usize>,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub standardize: bool,
    pub bic_p_override: Option<usize>,
    /// Optional per-replicate dump, one row per replicate per method.
    #[serde(skip)]
    pub raw_output: Option<PathBuf>,
}

fn method_names<S: serde::Serializer>(v: &[PipelineMethod], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|m| m.name()))
}

/// Command line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

pub const DEFAULT_REPLICATES: usize = 200;

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("key '{key}': cannot parse '{value}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        other => Err(CliError::Config(format!(
            "key '{key}': expected a boolean, got '{other}'"
        ))),
    }
}

/// Parses the flat config text. Keys and their defaults:
///
/// | key          | meaning                                   | default  |
/// |--------------|-------------------------------------------|----------|
/// | scenario     | sim1 .. sim5                              | required |
/// | n            | training rows                             | required |
/// | p            | variables                                 | required |
/// | s            | relevant variables                        | required |
/// | tasks        | number of response columns                | required |
/// | t_nonzero    | nonzero tasks per relevant row            | tasks    |
/// | snr / sigma  | noise level (exactly one)                 | required |
/// | rho          | design correlation (sim3 / sim4)          | none     |
/// | seed         | base RNG seed                             | 0        |
/// | test_n       | test rows                                 | n        |
/// | replicates   | replicate count                           | 200      |
/// | methods      | comma list of pipelines                   | all five |
/// | threads      | worker count, or `auto`                   | auto     |
/// | output       | report path                               | stdout   |
/// | format       | csv or json                               | csv      |
/// | standardize  | center and scale design columns           | false    |
/// | bic_p        | ambient p for the per-task penalties      | none     |
/// | raw_output   | per-replicate dump path                   | none     |
pub fn parse_config(text: &str, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("line {}: expected 'key = value'", lineno + 1))
        })?;
        let key = key.trim().to_ascii_lowercase();
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::Config(format!("duplicate key '{key}'")));
        }
    }

    const KNOWN: &[&str] = &[
        "scenario",
        "n",
        "p",
        "s",
        "tasks",
        "t_nonzero",
        "snr",
        "sigma",
        "rho",
        "seed",
        "test_n",
        "replicates",
        "methods",
        "threads",
        "output",
        "format",
        "standardize",
        "bic_p",
        "raw_output",
    ];
    for key in map.keys() {
        if !KNOWN.contains(&key.as_str()) {
            return Err(CliError::Config(format!("unknown key '{key}'")));
        }
    }

    let require = |key: &str| -> Result<&String, CliError> {
        map.get(key)
            .ok_or_else(|| CliError::Config(format!("missing required key '{key}'")))
    };

    let scenario = Scenario::parse(require("scenario")?)
        .ok_or_else(|| CliError::Config(format!("unknown scenario '{}'", map["scenario"])))?;
    let n: usize = parse_num("n", require("n")?)?;
    let num_tasks: usize = parse_num("tasks", require("tasks")?)?;

    let noise = match (map.get("snr"), map.get("sigma")) {
        (Some(v), None) => NoiseSpec::Snr(parse_num("snr", v)?),
        (None, Some(v)) => NoiseSpec::Sigma(parse_num("sigma", v)?),
        (Some(_), Some(_)) => {
            return Err(CliError::Config("give either snr or sigma, not both".into()))
        }
        (None, None) => return Err(CliError::Config("missing noise level: snr or sigma".into())),
    };

    let simulation = SimulationSpec {
        scenario,
        n,
        p: parse_num("p", require("p")?)?,
        s: parse_num("s", require("s")?)?,
        num_tasks,
        t_nonzero: match map.get("t_nonzero") {
            Some(v) => parse_num("t_nonzero", v)?,
            None => num_tasks,
        },
        noise,
        rho: map.get("rho").map(|v| parse_num("rho", v)).transpose()?,
        seed: match overrides.seed {
            Some(s) => s,
            None => match map.get("seed") {
                Some(v) => parse_num("seed", v)?,
                None => 0,
            },
        },
        test_n: map.get("test_n").map(|v| parse_num("test_n", v)).transpose()?,
    };
    simulation.validate()?;

    let methods = match map.get("methods") {
        Some(list) => {
            let mut parsed = Vec::new();
            for name in list.split(',') {
                let m = PipelineMethod::parse(name)
                    .ok_or_else(|| CliError::Config(format!("unknown method '{}'", name.trim())))?;
                if !parsed.contains(&m) {
                    parsed.push(m);
                }
            }
            if parsed.is_empty() {
                return Err(CliError::Config("methods list is empty".into()));
            }
            parsed
        }
        None => PipelineMethod::ALL.to_vec(),
    };

    let replicates = match map.get("replicates") {
        Some(v) => parse_num("replicates", v)?,
        None => DEFAULT_REPLICATES,
    };
    if replicates == 0 {
        return Err(CliError::Config("replicates must be at least 1".into()));
    }

    let threads = match overrides.threads {
        Some(t) => Some(t),
        None => match map.get("threads").map(String::as_str) {
            None | Some("auto") => None,
            Some(v) => Some(parse_num("threads", v)?),
        },
    };
    if threads == Some(0) {
        return Err(CliError::Config("threads must be at least 1".into()));
    }

    Ok(RunConfig {
        simulation,
        methods,
        replicates,
        threads,
        output: overrides
            .output
            .clone()
            .or_else(|| map.get("output").map(PathBuf::from)),
        format: match overrides.format {
            Some(f) => f,
            None => match map.get("format") {
                Some(v) => OutputFormat::parse(v)?,
                None => OutputFormat::Csv,
            },
        },
        standardize: match map.get("standardize") {
            Some(v) => parse_bool("standardize", v)?,
            None => false,
        },
        bic_p_override: map.get("bic_p").map(|v| parse_num("bic_p", v)).transpose()?,
        raw_output: map.get("raw_output").map(PathBuf::from),
    })
}

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text, overrides)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "scenario = sim1\nn = 20\np = 30\ns = 3\ntasks = 4\nsnr = 10\n";

    #[test]
    fn minimal_config_fills_defaults() {
        let c = parse_config(BASE, &Overrides::default()).unwrap();
        assert_eq!(c.replicates, DEFAULT_REPLICATES);
        assert_eq!(c.methods.len(), 5);
        assert_eq!(c.simulation.t_nonzero, 4);
        assert_eq!(c.simulation.seed, 0);
        assert_eq!(c.format, OutputFormat::Csv);
        assert!(!c.standardize);
        assert!(c.threads.is_none());
    }

    #[test]
    fn overrides_beat_file_values() {
        let text = format!("{BASE}seed = 7\nthreads = 2\nformat = csv\n");
        let ov = Overrides {
            seed: Some(99),
            threads: Some(5),
            format: Some(OutputFormat::Json),
            ..Default::default()
        };
        let c = parse_config(&text, &ov).unwrap();
        assert_eq!(c.simulation.seed, 99);
        assert_eq!(c.threads, Some(5));
        assert_eq!(c.format, OutputFormat::Json);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_config(&format!("{BASE}bogus = 1\n"), &Overrides::default()).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn both_noise_keys_rejected() {
        let text = "scenario = sim1\nn = 20\np = 30\ns = 3\ntasks = 4\nsnr = 10\nsigma = 1\n";
        assert!(parse_config(text, &Overrides::default()).is_err());
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = format!("# experiment\n\n{BASE}replicates = 3 # small\n");
        let c = parse_config(&text, &Overrides::default()).unwrap();
        assert_eq!(c.replicates, 3);
    }

    #[test]
    fn method_list_parsed_case_insensitively() {
        let text = format!("{BASE}methods = somp-alasso, SIS_ALASSO\n");
        let c = parse_config(&text, &Overrides::default()).unwrap();
        assert_eq!(c.methods.len(), 2);
        assert_eq!(c.methods[0].name(), "SOMP-ALASSO");
        assert_eq!(c.methods[1].name(), "SIS-ALASSO");
    }

    #[test]
    fn invalid_spec_surfaces_as_config_error() {
        let text = "scenario = sim3\nn = 20\np = 30\ns = 4\ntasks = 2\nsnr = 10\nrho = 0.5\n";
        let err = parse_config(text, &Overrides::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}

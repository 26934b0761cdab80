use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "loqc", version, about = "Run linear-optics scenarios and circuit files")]
pub struct Args {
    /// Named scenario to run.
    #[arg(long)]
    pub scenario: Option<String>,
    /// JSON config: {"scenario", "params", "seed", "trials", "out", "format"}.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// JSON circuit description to simulate instead of a scenario.
    #[arg(long, conflicts_with = "scenario")]
    pub circuit: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Scenario parameter, repeatable: --param eta=0.9
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    /// Print scenario names with their parameters and exit.
    #[arg(long)]
    pub list: bool,
    /// Run sequentially even when built with the parallel feature.
    #[arg(long)]
    pub sequential: bool,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("'{v}' is not a number"))?;
    Ok((k.trim().to_string(), v))
}

/// Contents of a --config file. Every field is optional; flags win.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub params: BTreeMap<String, f64>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl ScenarioConfig {
    pub fn new(scenario: &str) -> Self {
        ScenarioConfig {
            scenario: scenario.to_string(),
            params: BTreeMap::new(),
            seed: None,
            trials: None,
            out: None,
            format: Format::Json,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = Some(trials);
        self
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// Merges a config file (if any) under the command-line flags.
    pub fn from_args(args: &Args) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let scenario = args
            .scenario
            .clone()
            .or(file.scenario)
            .ok_or_else(|| CliError::Config("no scenario given (--scenario or config \"scenario\")".into()))?;
        let mut params = file.params;
        for (k, v) in &args.params {
            params.insert(k.clone(), *v);
        }
        Ok(ScenarioConfig {
            scenario,
            params,
            seed: args.seed.or(file.seed),
            trials: args.trials.or(file.trials),
            out: args.out.clone().or(file.out),
            format: args.format.or(file.format).unwrap_or_default(),
        })
    }
}

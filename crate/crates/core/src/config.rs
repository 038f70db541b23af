//! JSON run configurations.
//!
//! A file holds either one configuration object or an array of them. Only
//! `problem`, `algorithm` and `u0` are required:
//!
//! ```json
//! { "problem": "P1", "algorithm": "ma-tr", "u0": [0, 0] }
//! ```
//!
//! Unknown keys are rejected so typos surface instead of silently falling
//! back to defaults.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::correction::ModelForm;
use crate::drivers::{
    run_basic_ma, run_ma_tr, run_trust_region, Algorithm, BasicMaSettings, MaTrSettings, RunTrace, StoppingCriteria,
    TrustRegionSettings,
};
use crate::error::{Error, Result};
use crate::problem::{catalog, problem, ProblemPair};
use crate::report::ExportFormat;
use crate::subproblem::SubproblemOptions;
use crate::trust_region::{TrustRegionConstants, DEFAULT_RHO_DEGENERACY};

fn one() -> f64 {
    1.0
}

fn default_kappa() -> f64 {
    0.1
}

fn default_rho_degeneracy() -> f64 {
    DEFAULT_RHO_DEGENERACY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: ExportFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: String,
    pub algorithm: Algorithm,
    pub u0: Vec<f64>,
    #[serde(default = "one")]
    pub delta0: f64,
    #[serde(default)]
    pub constants: TrustRegionConstants,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default)]
    pub initial_modifiers: Option<Vec<f64>>,
    #[serde(default)]
    pub noise_level: f64,
    /// Seeds measurement noise and the multi-start sampler.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub stopping: StoppingCriteria,
    #[serde(default)]
    pub model_form: ModelForm,
    #[serde(default)]
    pub subproblem: SubproblemOptions,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_rho_degeneracy")]
    pub rho_degeneracy: f64,
    /// Half-width of the basic-ma search box.
    #[serde(default)]
    pub search_bound: Option<f64>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub format: Option<ExportFormat>,
    pub seed: Option<u64>,
    pub max_iterations: Option<usize>,
    pub tolerance: Option<f64>,
}

#[derive(Debug)]
pub enum ConfigError {
    Io { path: PathBuf, source: std::io::Error },
    Parse { line: usize, column: usize, message: String },
    /// `entry` is the array index for batch files.
    Invalid { entry: Option<usize>, field: String, message: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            ConfigError::Parse { line, column, message } => {
                write!(f, "line {line}, column {column}: {message}")
            }
            ConfigError::Invalid { entry: Some(i), field, message } => write!(f, "[{i}].{field}: {message}"),
            ConfigError::Invalid { entry: None, field, message } => write!(f, "{field}: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            ConfigError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl ConfigError {
    fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            entry: None,
            field: field.into(),
            message: message.into(),
        }
    }

    fn at_entry(self, index: usize) -> Self {
        match self {
            ConfigError::Invalid { field, message, .. } => ConfigError::Invalid {
                entry: Some(index),
                field,
                message,
            },
            other => other,
        }
    }

    /// Names the field when the error carries one.
    pub fn field_name(&self) -> Option<&str> {
        match self {
            ConfigError::Invalid { field, .. } => Some(field),
            _ => None,
        }
    }
}

/// Prefixes library parameter errors with the config section they came from.
fn scoped(section: &str, err: Error) -> ConfigError {
    match err {
        Error::InvalidParameter { name, reason } if section.is_empty() => ConfigError::field(name, reason),
        Error::InvalidParameter { name, reason } => ConfigError::field(format!("{section}.{name}"), reason),
        other => ConfigError::field(section, other.to_string()),
    }
}

impl RunConfig {
    /// Minimal configuration with every optional field at its default.
    pub fn new(problem: impl Into<String>, algorithm: Algorithm, u0: Vec<f64>) -> Self {
        Self {
            problem: problem.into(),
            algorithm,
            u0,
            delta0: 1.0,
            constants: TrustRegionConstants::default(),
            alpha: 1.0,
            initial_modifiers: None,
            noise_level: 0.0,
            seed: 0,
            stopping: StoppingCriteria::default(),
            model_form: ModelForm::default(),
            subproblem: SubproblemOptions::default(),
            kappa: default_kappa(),
            rho_degeneracy: default_rho_degeneracy(),
            search_bound: None,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> std::result::Result<Vec<RunConfig>, ConfigError> {
        let parse_err = |e: serde_json::Error| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        };
        let batch = text.trim_start().starts_with('[');
        let configs: Vec<RunConfig> = if batch {
            serde_json::from_str(text).map_err(parse_err)?
        } else {
            vec![serde_json::from_str(text).map_err(parse_err)?]
        };
        if configs.is_empty() {
            return Err(ConfigError::field("<root>", "empty configuration list"));
        }
        for (i, c) in configs.iter().enumerate() {
            c.validate()
                .map_err(|e| if batch { e.at_entry(i) } else { e })?;
        }
        Ok(configs)
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(path) = &overrides.output {
            let format = overrides
                .format
                .or(self.output.as_ref().map(|o| o.format))
                .unwrap_or_default();
            self.output = Some(OutputSpec {
                path: path.clone(),
                format,
            });
        } else if let (Some(format), Some(out)) = (overrides.format, self.output.as_mut()) {
            out.format = format;
        }
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
        if let Some(n) = overrides.max_iterations {
            self.stopping.max_iterations = n;
        }
        if let Some(tol) = overrides.tolerance {
            self.stopping.tolerance = tol;
        }
    }

    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        let problem = self.build_problem_unchecked()?;
        if self.u0.len() != problem.dim() {
            return Err(ConfigError::field(
                "u0",
                format!("{} has dimension {}, got {} components", self.problem, problem.dim(), self.u0.len()),
            ));
        }
        if let Some(i) = self.u0.iter().position(|c| !c.is_finite()) {
            return Err(ConfigError::field(format!("u0[{i}]"), "must be finite"));
        }
        if let Some(m) = &self.initial_modifiers {
            if m.len() != problem.dim() {
                return Err(ConfigError::field("initial_modifiers", "length must match the problem dimension"));
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(ConfigError::field(
                "alpha",
                format!("filter gain must lie in (0, 1], got {}", self.alpha),
            ));
        }
        if self.algorithm == Algorithm::TrustRegion && self.alpha != 1.0 {
            return Err(ConfigError::field("alpha", "trust-region uses unfiltered modifiers; alpha must be 1"));
        }
        self.stopping.validate().map_err(|e| scoped("stopping", e))?;
        self.constants.validate().map_err(|e| scoped("constants", e))?;
        self.subproblem.validate().map_err(|e| scoped("subproblem", e))?;
        self.trust_region_settings().validate().map_err(|e| scoped("", e))?;
        if let Some(b) = self.search_bound {
            if !(b > 0.0 && b.is_finite()) {
                return Err(ConfigError::field("search_bound", "must be positive and finite"));
            }
        }
        Ok(())
    }

    fn build_problem_unchecked(&self) -> std::result::Result<ProblemPair, ConfigError> {
        let base = problem(&self.problem).map_err(|_| {
            let known: Vec<&str> = catalog().iter().map(|e| e.id).collect();
            ConfigError::field("problem", format!("unknown problem {:?}; known: {}", self.problem, known.join(", ")))
        })?;
        base.with_noise(self.noise_level, self.seed)
            .map_err(|e| scoped("", e))
    }

    /// Catalog problem with this configuration's noise level and seed.
    pub fn build_problem(&self) -> Result<ProblemPair> {
        problem(&self.problem)?.with_noise(self.noise_level, self.seed)
    }

    pub fn trust_region_settings(&self) -> TrustRegionSettings {
        TrustRegionSettings {
            delta0: self.delta0,
            constants: self.constants,
            subproblem: self.subproblem,
            kappa: self.kappa,
            rho_degeneracy: self.rho_degeneracy,
        }
    }

    pub fn basic_ma_settings(&self) -> BasicMaSettings {
        let defaults = BasicMaSettings::default();
        BasicMaSettings {
            alpha: self.alpha,
            initial_modifiers: self.initial_modifiers.clone(),
            search_bound: self.search_bound.unwrap_or(defaults.search_bound),
            seed: self.seed,
            ..defaults
        }
    }

    pub fn ma_tr_settings(&self) -> MaTrSettings {
        MaTrSettings {
            trust_region: self.trust_region_settings(),
            alpha: self.alpha,
            initial_modifiers: self.initial_modifiers.clone(),
            model_form: self.model_form,
        }
    }

    /// Builds the problem and runs the selected driver.
    pub fn execute(&self) -> Result<RunTrace> {
        let problem = self.build_problem()?;
        match self.algorithm {
            Algorithm::BasicMa => run_basic_ma(&problem, &self.u0, &self.basic_ma_settings(), &self.stopping),
            Algorithm::TrustRegion => {
                run_trust_region(&problem, &self.u0, &self.trust_region_settings(), &self.stopping)
            }
            Algorithm::MaTr => run_ma_tr(&problem, &self.u0, &self.ma_tr_settings(), &self.stopping),
        }
    }
}

/// Reads and validates one configuration file.
pub fn load_config(path: impl AsRef<Path>) -> std::result::Result<Vec<RunConfig>, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    RunConfig::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_one(text: &str) -> RunConfig {
        RunConfig::from_json(text).unwrap().remove(0)
    }

    #[test]
    fn minimal_config_takes_defaults() {
        let c = parse_one(r#"{"problem": "P1", "algorithm": "ma-tr", "u0": [0, 0]}"#);
        assert_eq!(c.delta0, 1.0);
        assert_eq!(c.constants.eta1, 0.1);
        assert_eq!(c.constants.eta2, 0.9);
        assert_eq!(c.alpha, 1.0);
        assert_eq!(c.stopping.tolerance, 1e-6);
        assert_eq!(c, RunConfig::new("P1", Algorithm::MaTr, vec![0.0, 0.0]));
    }

    #[test]
    fn eta_ordering_rejected() {
        let err = RunConfig::from_json(
            r#"{"problem": "P1", "algorithm": "ma-tr", "u0": [0, 0],
                "constants": {"eta1": 0.95, "eta2": 0.9}}"#,
        )
        .unwrap_err();
        assert_eq!(err.field_name(), Some("constants.eta1"));
    }

    #[test]
    fn zero_gain_rejected() {
        let err = RunConfig::from_json(r#"{"problem": "P1", "algorithm": "ma-tr", "u0": [0, 0], "alpha": 0}"#)
            .unwrap_err();
        assert_eq!(err.field_name(), Some("alpha"));
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = RunConfig::from_json("{\n  \"problem\": \"P1\",\n  \"algorithm\": \"ma-tr\"\n  \"u0\": [0, 0]\n}")
            .unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 4, .. }), "{err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = RunConfig::from_json(r#"{"problem": "P1", "algorithm": "ma-tr", "u0": [0, 0], "detla0": 2}"#)
            .unwrap_err();
        assert!(err.to_string().contains("detla0"), "{err}");
        let err = RunConfig::from_json(
            r#"{"problem": "P1", "algorithm": "ma-tr", "u0": [0, 0], "constants": {"eta_1": 0.2}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("eta_1"), "{err}");
    }

    #[test]
    fn batch_errors_name_the_entry() {
        let err = RunConfig::from_json(
            r#"[{"problem": "P1", "algorithm": "ma-tr", "u0": [0, 0]},
                {"problem": "P2", "algorithm": "basic-ma", "u0": [1, 2]}]"#,
        )
        .unwrap_err();
        assert_eq!(err.to_string().split(':').next(), Some("[1].u0"));
    }

    #[test]
    fn unknown_problem_rejected() {
        let err = RunConfig::from_json(r#"{"problem": "P9", "algorithm": "ma-tr", "u0": [0]}"#).unwrap_err();
        assert_eq!(err.field_name(), Some("problem"));
    }

    #[test]
    fn overrides_replace_file_values() {
        let mut c = RunConfig::new("P1", Algorithm::MaTr, vec![0.0, 0.0]);
        c.apply(&Overrides {
            output: Some("out.json".into()),
            format: Some(ExportFormat::Json),
            seed: Some(7),
            max_iterations: Some(3),
            tolerance: Some(1e-3),
        });
        assert_eq!(c.seed, 7);
        assert_eq!(c.stopping.max_iterations, 3);
        assert_eq!(c.stopping.tolerance, 1e-3);
        let out = c.output.unwrap();
        assert_eq!(out.path, PathBuf::from("out.json"));
        assert_eq!(out.format, ExportFormat::Json);
    }

    #[test]
    fn trust_region_requires_unit_gain() {
        let mut c = RunConfig::new("P1", Algorithm::TrustRegion, vec![0.0, 0.0]);
        c.alpha = 0.5;
        assert_eq!(c.validate().unwrap_err().field_name(), Some("alpha"));
    }
}

//! Run configuration: a sectioned `key = value` file, overridden by
//! command-line settings, over built-in defaults.
//!
//! ```ini
//! [extract]
//! include = **/*.java
//! exclude = **/generated/**
//! junit = both
//!
//! [classify]
//! frameworkClasses = junit.framework.TestCase
//! dominanceThreshold = 0.5
//!
//! [layout]
//! desiredEdgeLength = 128
//! seed = 7
//!
//! [indicators]
//! complexScenarioMinProdMethods = 10
//! ```

use std::path::{Path, PathBuf};

use ini::{Ini, ParseOption};
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::{ExtractionConfig, JUnitStyle};
use crate::indicators::Thresholds;
use crate::layout::{default_params, LayoutParams};
use crate::testmodel::ClassifyConfig;

pub const CONFIG_ENV: &str = "TESTSCOPE_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("config syntax error: {0}")]
    Syntax(String),
    #[error("unknown config section [{0}]")]
    UnknownSection(String),
    #[error("unknown key `{key}` in [{section}]")]
    UnknownKey { section: String, key: String },
    #[error("invalid value `{value}` for {section}.{key}: {reason}")]
    InvalidValue {
        section: String,
        key: String,
        value: String,
        reason: String,
    },
    #[error("malformed setting `{0}`, expected section.key=value")]
    MalformedSetting(String),
}

/// Layout settings on top of the node-count dependent defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct LayoutOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub desired_edge_length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gravity_constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rounds: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oscillation_sensitivity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_sensitivity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Weak attraction along coverage edges in the system-wide layout.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage_attraction: Option<bool>,
}

impl LayoutOverrides {
    pub fn params_for(&self, node_count: usize) -> LayoutParams {
        let mut p = default_params(node_count);
        macro_rules! over {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { p.$f = v; })* };
        }
        over!(
            desired_edge_length,
            gravity_constant,
            initial_temperature,
            min_temperature,
            max_temperature,
            max_rounds,
            oscillation_sensitivity,
            rotation_sensitivity,
            seed
        );
        p
    }

    pub fn coverage_attraction(&self) -> bool {
        self.coverage_attraction.unwrap_or(true)
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub extract: ExtractionConfig,
    pub classify: ClassifyConfig,
    pub layout: LayoutOverrides,
    pub thresholds: Thresholds,
}

fn list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

impl RunConfig {
    pub fn from_ini_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        cfg.merge_ini_str(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_ini_str(&text)
    }

    /// Applies every `section.key = value` of an INI text.
    pub fn merge_ini_str(&mut self, text: &str) -> Result<(), ConfigError> {
        let opt = ParseOption {
            enabled_escape: false,
            ..Default::default()
        };
        let ini = Ini::load_from_str_opt(text, opt).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if let Some((key, _)) = props.iter().next() {
                    return Err(ConfigError::UnknownKey {
                        section: String::new(),
                        key: key.to_string(),
                    });
                }
                continue;
            };
            for (key, value) in props.iter() {
                self.apply(section, key, value)?;
            }
        }
        self.validate()
    }

    /// Applies a `section.key=value` override.
    pub fn apply_setting(&mut self, setting: &str) -> Result<(), ConfigError> {
        let malformed = || ConfigError::MalformedSetting(setting.to_string());
        let (path, value) = setting.split_once('=').ok_or_else(malformed)?;
        let (section, key) = path.trim().split_once('.').ok_or_else(malformed)?;
        self.apply(section, key, value.trim())
    }

    pub fn apply(&mut self, section: &str, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        let invalid = |reason: &str| ConfigError::InvalidValue {
            section: section.to_string(),
            key: key.to_string(),
            value: value.to_string(),
            reason: reason.to_string(),
        };
        let unknown = || ConfigError::UnknownKey {
            section: section.to_string(),
            key: key.to_string(),
        };
        let boolean = || match value.to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" | "1" => Ok(true),
            "false" | "no" | "off" | "0" => Ok(false),
            _ => Err(invalid("expected a boolean")),
        };
        let real = || value.parse::<f64>().map_err(|_| invalid("expected a number"));
        let regex = || Regex::new(value).map_err(|e| invalid(&e.to_string()));
        match section {
            "extract" => {
                let e = &mut self.extract;
                match key {
                    "roots" => e.roots = list(value).into_iter().map(PathBuf::from).collect(),
                    "include" => e.include_globs = list(value),
                    "exclude" => e.exclude_globs = list(value),
                    "encoding" => e.source_encoding = value.to_string(),
                    "followSymlinks" => e.follow_symlinks = boolean()?,
                    "generatorHeaders" => {
                        let patterns = list(value);
                        for p in &patterns {
                            Regex::new(p).map_err(|err| invalid(&err.to_string()))?;
                        }
                        e.generator_headers = patterns;
                    }
                    "junit" => {
                        let style = JUnitStyle::parse(value).ok_or_else(|| invalid("expected 3, 4 or both"))?;
                        e.junit_style = style;
                        self.classify.junit_style = style;
                    }
                    _ => return Err(unknown()),
                }
            }
            "classify" => {
                let c = &mut self.classify;
                match key {
                    "testClassPattern" => c.test_class_pattern = regex()?,
                    "testCommandPattern" => c.test_command_pattern = regex()?,
                    "setupNames" => c.setup_names = list(value),
                    "teardownNames" => c.teardown_names = list(value),
                    "frameworkClasses" => c.framework_classes = list(value),
                    "dominanceThreshold" => {
                        let v = real()?;
                        if !(v > 0.0 && v <= 1.0) {
                            return Err(invalid("expected a ratio in (0, 1]"));
                        }
                        c.dominance_threshold = v;
                        self.thresholds.dominance_min = v;
                    }
                    "setupCoverage" => c.setup_coverage = boolean()?,
                    "constructorCoverage" => c.constructor_coverage = boolean()?,
                    _ => return Err(unknown()),
                }
            }
            "layout" => {
                let l = &mut self.layout;
                match key {
                    "desiredEdgeLength" => l.desired_edge_length = Some(real()?),
                    "gravityConstant" => l.gravity_constant = Some(real()?),
                    "initialTemperature" => l.initial_temperature = Some(real()?),
                    "minTemperature" => l.min_temperature = Some(real()?),
                    "maxTemperature" => l.max_temperature = Some(real()?),
                    "maxRounds" => {
                        l.max_rounds = Some(value.parse().map_err(|_| invalid("expected a positive integer"))?)
                    }
                    "oscillationSensitivity" => l.oscillation_sensitivity = Some(real()?),
                    "rotationSensitivity" => l.rotation_sensitivity = Some(real()?),
                    "seed" => l.seed = Some(value.parse().map_err(|_| invalid("expected an unsigned integer"))?),
                    "coverageAttraction" => l.coverage_attraction = Some(boolean()?),
                    _ => return Err(unknown()),
                }
                l.params_for(1).validate().map_err(|reason| invalid(&reason))?;
            }
            "indicators" => {
                self.thresholds.set(key, value).map_err(|e| match e {
                    crate::indicators::ThresholdError::Unknown(_) => unknown(),
                    crate::indicators::ThresholdError::Invalid { reason, .. } => invalid(&reason),
                })?;
                if key == "dominanceMin" {
                    self.classify.dominance_threshold = self.thresholds.dominance_min;
                }
            }
            _ => return Err(ConfigError::UnknownSection(section.to_string())),
        }
        Ok(())
    }

    /// Whole-config checks that single settings cannot catch.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.layout.params_for(1).validate().map_err(|reason| ConfigError::InvalidValue {
            section: "layout".into(),
            key: "*".into(),
            value: String::new(),
            reason,
        })?;
        self.thresholds.validate().map_err(|e| ConfigError::InvalidValue {
            section: "indicators".into(),
            key: "*".into(),
            value: String::new(),
            reason: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_apply() {
        let cfg = RunConfig::from_ini_str(
            "[extract]\nexclude = **/gen/**, **/tmp/**\njunit = 3\n\
             [classify]\ntestClassPattern = ^Check\\w+$\nsetupCoverage = off\n\
             [layout]\nseed = 9\n\
             [indicators]\ncomplexScenarioMinProdMethods = 3\n",
        )
        .unwrap();
        assert_eq!(cfg.extract.exclude_globs, ["**/gen/**", "**/tmp/**"]);
        assert_eq!(cfg.classify.junit_style, JUnitStyle::Three);
        assert!(cfg.classify.test_class_pattern.is_match("CheckParser"));
        assert!(!cfg.classify.setup_coverage);
        assert_eq!(cfg.layout.params_for(4).seed, 9);
        assert_eq!(cfg.thresholds.complex_scenario_min_prod_methods, 3);
    }

    #[test]
    fn bad_settings_are_rejected() {
        assert!(matches!(
            RunConfig::from_ini_str("[nope]\na = 1\n"),
            Err(ConfigError::UnknownSection(_))
        ));
        assert!(matches!(
            RunConfig::from_ini_str("[layout]\nbogus = 1\n"),
            Err(ConfigError::UnknownKey { .. })
        ));
        assert!(matches!(
            RunConfig::from_ini_str("[layout]\nminTemperature = 500\n"),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(
            RunConfig::from_ini_str("[indicators]\ndominanceMin = 2\n"),
            Err(ConfigError::InvalidValue { .. })
        ));
        let mut cfg = RunConfig::default();
        assert!(matches!(cfg.apply_setting("layout"), Err(ConfigError::MalformedSetting(_))));
        cfg.apply_setting("classify.dominanceThreshold=0.6").unwrap();
        assert_eq!(cfg.thresholds.dominance_min, 0.6);
    }
}

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::detect::{AreaMethod, DetectionCondition};
use crate::estimate::{MarkKind, T_THRESHOLD};
use crate::simulate::ProcessVariant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Ht,
    Oo,
    Kuronen,
    Detected,
}

impl Estimator {
    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Ht => "HT",
            Estimator::Oo => "OO",
            Estimator::Kuronen => "Kuronen",
            Estimator::Detected => "detected",
        }
    }
}

impl std::str::FromStr for Estimator {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ht" => Ok(Estimator::Ht),
            "oo" => Ok(Estimator::Oo),
            "kuronen" => Ok(Estimator::Kuronen),
            "detected" => Ok(Estimator::Detected),
            other => Err(HarnessError::Config(format!("unknown estimator {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegeneratePolicy {
    /// Leave the plot out and count it.
    #[default]
    Skip,
    Abort,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub name: String,
    pub process: ProcessVariant,
    pub plots: usize,
    /// Conditions for which Kuronen weights are computed; all when absent.
    #[serde(default)]
    pub kuronen_conditions: Option<Vec<String>>,
}

fn default_radius() -> f64 {
    10.0
}

fn default_threshold() -> usize {
    T_THRESHOLD
}

fn default_levels() -> Vec<f64> {
    vec![0.90, 0.95, 0.99]
}

fn default_intensities() -> Vec<f64> {
    (1..=10).map(|k| 500.0 * k as f64).collect()
}

fn default_pairs() -> Vec<[f64; 2]> {
    vec![[6.0, 3.0], [12.0, 12.0], [15.0, 20.0], [21.0, 35.0]]
}

fn default_conditions() -> Vec<String> {
    vec!["full".into(), "centre".into(), "any".into()]
}

fn default_estimators() -> Vec<Estimator> {
    vec![Estimator::Ht, Estimator::Oo, Estimator::Kuronen, Estimator::Detected]
}

fn default_marks() -> Vec<String> {
    vec!["N".into(), "G".into()]
}

/// Experiment description read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Worker threads; 0 uses all cores.
    #[serde(default)]
    pub threads: usize,
    #[serde(default = "default_radius")]
    pub plot_radius: f64,
    #[serde(default = "default_intensities")]
    pub intensities: Vec<f64>,
    /// Mean DBH (cm) and basal area (m^2/ha) pairs for Weibull recovery.
    #[serde(default = "default_pairs")]
    pub dg_pairs: Vec<[f64; 2]>,
    #[serde(default = "default_conditions")]
    pub conditions: Vec<String>,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<Estimator>,
    #[serde(default = "default_marks")]
    pub marks: Vec<String>,
    #[serde(default = "default_levels")]
    pub ci_levels: Vec<f64>,
    #[serde(default = "default_threshold")]
    pub t_threshold: usize,
    #[serde(default)]
    pub degenerate_policy: DegeneratePolicy,
    #[serde(default)]
    pub area_method: AreaMethod,
    pub datasets: Vec<DatasetConfig>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String, HarnessError> {
        toml::to_string(self).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.datasets.is_empty() {
            return bad("at least one dataset is required".into());
        }
        if self.intensities.is_empty() || self.intensities.iter().any(|&n| !(n > 0.0)) {
            return bad("intensities must be a non-empty list of positive values".into());
        }
        if self.dg_pairs.is_empty() || self.dg_pairs.iter().flatten().any(|&v| !(v > 0.0)) {
            return bad("dg_pairs must be a non-empty list of positive pairs".into());
        }
        if self.ci_levels.iter().any(|&l| !(l > 0.0 && l < 1.0)) {
            return bad("ci_levels must lie in (0, 1)".into());
        }
        if !(self.plot_radius > 0.0) {
            return bad("plot_radius must be positive".into());
        }
        for d in &self.datasets {
            if d.plots == 0 {
                return bad(format!("dataset {} has no plots", d.name));
            }
            for c in d.kuronen_conditions.iter().flatten() {
                self.parse_condition(c)?;
            }
        }
        self.parsed_conditions()?;
        self.parsed_marks()?;
        Ok(())
    }

    fn parse_condition(&self, s: &str) -> Result<DetectionCondition, HarnessError> {
        s.parse().map_err(|_| HarnessError::Config(format!("unknown condition {s:?}")))
    }

    pub fn parsed_conditions(&self) -> Result<Vec<DetectionCondition>, HarnessError> {
        self.conditions.iter().map(|c| self.parse_condition(c)).collect()
    }

    pub fn parsed_marks(&self) -> Result<Vec<MarkKind>, HarnessError> {
        self.marks
            .iter()
            .map(|m| m.parse().map_err(|_| HarnessError::Config(format!("unknown mark {m:?}"))))
            .collect()
    }

    /// Whether Kuronen weights are wanted for `cond` in `dataset`.
    pub fn kuronen_for(&self, dataset: &DatasetConfig, cond: DetectionCondition) -> bool {
        if !self.estimators.contains(&Estimator::Kuronen) {
            return false;
        }
        match &dataset.kuronen_conditions {
            None => true,
            Some(list) => list.iter().any(|c| self.parse_condition(c).ok() == Some(cond)),
        }
    }
}

//! Horvitz-Thompson-like totals, variance estimates and approximate intervals.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal, StudentsT};
use thiserror::Error;

/// Detected-tree count below which intervals use the t distribution.
pub const T_THRESHOLD: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("marks and probabilities differ in length ({marks} vs {probs})")]
    LengthMismatch { marks: usize, probs: usize },
    #[error("probability at index {index} is {value}, expected a value in (0, 1]")]
    InvalidProbability { index: usize, value: f64 },
    #[error("mark at index {index} is {value}, expected a finite non-negative value")]
    InvalidMark { index: usize, value: f64 },
    #[error("interval undefined for {n_detected} detected trees")]
    UndefinedInterval { n_detected: usize },
    #[error("invalid interval input: {0}")]
    InvalidInput(String),
}

/// What each detected tree contributes to the total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MarkKind {
    /// One per stem.
    StemCount,
    /// Cross-section area in square meters from a DBH in centimeters.
    BasalArea,
}

impl MarkKind {
    pub fn mark(&self, dbh_cm: f64) -> f64 {
        match self {
            MarkKind::StemCount => 1.0,
            MarkKind::BasalArea => std::f64::consts::PI * dbh_cm * dbh_cm / 40000.0,
        }
    }

    pub fn short_name(&self) -> &'static str {
        match self {
            MarkKind::StemCount => "N",
            MarkKind::BasalArea => "G",
        }
    }
}

impl std::str::FromStr for MarkKind {
    type Err = EstimateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "N" | "n" | "stems" => Ok(MarkKind::StemCount),
            "G" | "g" | "basal_area" => Ok(MarkKind::BasalArea),
            other => Err(EstimateError::InvalidInput(format!("unknown mark kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub tau_hat: f64,
    pub var_hat: f64,
    pub n_detected: usize,
    /// `(level, lo, hi)` triples.
    pub ci: Vec<(f64, f64, f64)>,
}

fn check_inputs(marks: &[f64], probs: &[f64]) -> Result<(), EstimateError> {
    if marks.len() != probs.len() {
        return Err(EstimateError::LengthMismatch { marks: marks.len(), probs: probs.len() });
    }
    for (index, &value) in marks.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(EstimateError::InvalidMark { index, value });
        }
    }
    for (index, &value) in probs.iter().enumerate() {
        if !(value > 0.0 && value <= 1.0) {
            return Err(EstimateError::InvalidProbability { index, value });
        }
    }
    Ok(())
}

/// Sum of `m_i / p_i` over detected trees.
pub fn ht_estimate(marks: &[f64], probs: &[f64]) -> Result<f64, EstimateError> {
    check_inputs(marks, probs)?;
    Ok(marks.iter().zip(probs).map(|(m, p)| m / p).sum())
}

/// Variance estimate `sum (1/p^2 - 1/p) m^2` with independent detections.
pub fn ht_variance(marks: &[f64], probs: &[f64]) -> Result<f64, EstimateError> {
    check_inputs(marks, probs)?;
    Ok(marks
        .iter()
        .zip(probs)
        .map(|(m, p)| (1.0 / (p * p) - 1.0 / p) * m * m)
        .sum::<f64>()
        .max(0.0))
}

/// Plug-in total for benchmark weights.
pub fn weighted_estimate(marks: &[f64], weights: &[f64]) -> Result<f64, EstimateError> {
    ht_estimate(marks, weights)
}

/// Converts a window total to a per-hectare value.
pub fn per_hectare(total: f64, radius: f64) -> f64 {
    total * 10000.0 / (std::f64::consts::PI * radius * radius)
}

/// Two-sided critical value for `level` with `n_detected` detections.
pub fn critical_value(n_detected: usize, level: f64, threshold: usize) -> Result<f64, EstimateError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(EstimateError::InvalidInput(format!("level {level} outside (0, 1)")));
    }
    if n_detected == 0 {
        return Err(EstimateError::UndefinedInterval { n_detected });
    }
    let upper = 0.5 + level / 2.0;
    if n_detected >= threshold {
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        return Ok(normal.inverse_cdf(upper));
    }
    if n_detected == 1 {
        return Err(EstimateError::UndefinedInterval { n_detected });
    }
    Ok(t_quantile((n_detected - 1) as f64, upper))
}

/// Student t quantile refined by Newton steps to relative tolerance 1e-10.
pub fn t_quantile(df: f64, prob: f64) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    let mut x = dist.inverse_cdf(prob);
    for _ in 0..50 {
        let step = (dist.cdf(x) - prob) / dist.pdf(x);
        x -= step;
        if step.abs() <= 1e-10 * x.abs().max(1e-300) {
            break;
        }
    }
    x
}

/// `tau +- q sqrt(var)` using the configured t/normal rule.
pub fn confidence_interval(
    tau: f64,
    var: f64,
    n_detected: usize,
    level: f64,
) -> Result<(f64, f64), EstimateError> {
    confidence_interval_with(tau, var, n_detected, level, T_THRESHOLD)
}

pub fn confidence_interval_with(
    tau: f64,
    var: f64,
    n_detected: usize,
    level: f64,
    threshold: usize,
) -> Result<(f64, f64), EstimateError> {
    if !(var >= 0.0) || !var.is_finite() {
        return Err(EstimateError::InvalidInput(format!("variance {var} must be finite and non-negative")));
    }
    if n_detected == 0 {
        return Err(EstimateError::UndefinedInterval { n_detected });
    }
    if var == 0.0 {
        if !(level > 0.0 && level < 1.0) {
            return Err(EstimateError::InvalidInput(format!("level {level} outside (0, 1)")));
        }
        return Ok((tau, tau));
    }
    let q = critical_value(n_detected, level, threshold)?;
    let half = q * var.sqrt();
    Ok((tau - half, tau + half))
}

/// Point estimate, variance and one interval per level.
///
/// Levels whose interval is undefined (no or a single detection) are left out.
pub fn estimate_total(
    marks: &[f64],
    probs: &[f64],
    levels: &[f64],
    threshold: usize,
) -> Result<EstimateResult, EstimateError> {
    let tau_hat = ht_estimate(marks, probs)?;
    let var_hat = ht_variance(marks, probs)?;
    let n_detected = marks.len();
    let mut ci = Vec::with_capacity(levels.len());
    for &level in levels {
        match confidence_interval_with(tau_hat, var_hat, n_detected, level, threshold) {
            Ok((lo, hi)) => ci.push((level, lo, hi)),
            Err(EstimateError::UndefinedInterval { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(EstimateResult { tau_hat, var_hat, n_detected, ci })
}

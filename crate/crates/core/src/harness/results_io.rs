use std::collections::HashMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::config::Estimator;
use super::experiment::{aggregate, EstimateRow, ExperimentResults, PlotEstimate, PlotSummary};
use super::HarnessError;
use crate::estimate::MarkKind;
use crate::sstats::LEstimate;

pub const PLOTS_FILE: &str = "plots.csv";
pub const ESTIMATES_FILE: &str = "estimates.csv";
pub const MEAN_L_FILE: &str = "lmean.csv";
pub const ERRORS_FILE: &str = "errors.csv";
pub const COVERAGE_FILE: &str = "coverage.csv";
pub const DATASETS_FILE: &str = "datasets.csv";

const ESTIMATE_COLUMNS: [&str; 9] =
    ["dataset", "plot", "condition", "estimator", "mark", "truth", "estimate", "variance", "n_detected"];

pub(crate) fn write_serialized<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut wtr = csv::WriterBuilder::new().has_headers(true).from_writer(file);
    if rows.is_empty() {
        wtr.write_record(header)?;
    }
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush().map_err(|e| HarnessError::io(path, e))
}

fn read_serialized<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, HarnessError> {
    let mut rdr = csv::Reader::from_path(path)?;
    rdr.deserialize().map(|r| r.map_err(HarnessError::from)).collect()
}

fn estimator_from_name(s: &str) -> Result<Estimator, HarnessError> {
    s.parse()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_results(results: &ExperimentResults, dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    write_serialized(
        &dir.join(PLOTS_FILE),
        &results.plots,
        &[
            "dataset", "plot", "stream", "intensity", "mean_dbh", "basal_area", "dbh_shape", "dbh_scale", "radius",
            "status", "n_trees", "truth_n", "truth_g", "l_deviation",
        ],
    )?;

    let path = dir.join(ESTIMATES_FILE);
    let mut wtr = csv::Writer::from_path(&path)?;
    let mut header: Vec<String> = ESTIMATE_COLUMNS.iter().map(|s| s.to_string()).collect();
    for level in &results.levels {
        header.push(format!("lo_{level}"));
        header.push(format!("hi_{level}"));
    }
    wtr.write_record(&header)?;
    for r in &results.estimates {
        let mut rec = vec![
            r.dataset.clone(),
            r.plot.to_string(),
            r.est.condition.clone(),
            r.est.estimator.name().to_string(),
            r.est.mark.short_name().to_string(),
            r.truth.to_string(),
            r.est.estimate.to_string(),
            r.est.variance.to_string(),
            r.est.n_detected.to_string(),
        ];
        for &level in &results.levels {
            let ci = r.est.ci.iter().find(|c| c.0 == level);
            rec.push(fmt_opt(ci.map(|c| c.1)));
            rec.push(fmt_opt(ci.map(|c| c.2)));
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|e| HarnessError::io(&path, e))?;

    let path = dir.join(MEAN_L_FILE);
    let mut wtr = csv::Writer::from_path(&path)?;
    wtr.write_record(["dataset", "r", "L"])?;
    for (name, l) in &results.mean_l {
        for (r, v) in l.r().iter().zip(l.values()) {
            wtr.write_record([name.clone(), r.to_string(), v.to_string()])?;
        }
    }
    wtr.flush().map_err(|e| HarnessError::io(&path, e))?;

    write_serialized(
        &dir.join(ERRORS_FILE),
        &results.errors,
        &["dataset", "condition", "estimator", "mark", "plots", "rmse_pct", "me_pct"],
    )?;
    write_serialized(
        &dir.join(COVERAGE_FILE),
        &results.coverage,
        &["dataset", "condition", "mark", "level", "plots", "covered", "coverage_pct"],
    )?;
    write_serialized(
        &dir.join(DATASETS_FILE),
        &results.datasets,
        &["dataset", "plots", "used", "degenerate", "infeasible", "mean_truth_n_ha", "l_dev_mean", "l_dev_of_mean"],
    )
}

fn parse_f64(s: &str, line: u64) -> Result<f64, HarnessError> {
    s.parse()
        .map_err(|_| HarnessError::Parse { line, message: format!("not a number: {s:?}") })
}

/// Reloads per-plot results written by `write_results` and recomputes the
/// summary tables.
pub fn load_results(dir: &Path) -> Result<ExperimentResults, HarnessError> {
    let plots: Vec<PlotSummary> = read_serialized(&dir.join(PLOTS_FILE))?;

    let mut rdr = csv::Reader::from_path(dir.join(ESTIMATES_FILE))?;
    let header = rdr.headers()?.clone();
    let mut levels = Vec::new();
    for name in header.iter().skip(ESTIMATE_COLUMNS.len()) {
        if let Some(l) = name.strip_prefix("lo_") {
            levels.push(parse_f64(l, 1)?);
        }
    }
    let mut estimates = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let field = |k: usize| rec.get(k).unwrap_or("");
        let mark: MarkKind = field(4)
            .parse()
            .map_err(|_| HarnessError::Parse { line, message: format!("unknown mark {:?}", field(4)) })?;
        let mut ci = Vec::new();
        for (j, &level) in levels.iter().enumerate() {
            let lo = field(ESTIMATE_COLUMNS.len() + 2 * j);
            let hi = field(ESTIMATE_COLUMNS.len() + 2 * j + 1);
            if !lo.is_empty() {
                ci.push((level, parse_f64(lo, line)?, parse_f64(hi, line)?));
            }
        }
        estimates.push(EstimateRow {
            dataset: field(0).to_string(),
            plot: field(1)
                .parse()
                .map_err(|_| HarnessError::Parse { line, message: "bad plot index".into() })?,
            truth: parse_f64(field(5), line)?,
            est: PlotEstimate {
                condition: field(2).to_string(),
                estimator: estimator_from_name(field(3))?,
                mark,
                estimate: parse_f64(field(6), line)?,
                variance: parse_f64(field(7), line)?,
                n_detected: field(8)
                    .parse()
                    .map_err(|_| HarnessError::Parse { line, message: "bad detected count".into() })?,
                ci,
            },
        });
    }

    let mut rdr = csv::Reader::from_path(dir.join(MEAN_L_FILE))?;
    let mut curves: Vec<(String, Vec<f64>, Vec<f64>)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let name = rec.get(0).unwrap_or("").to_string();
        let slot = *index.entry(name.clone()).or_insert_with(|| {
            curves.push((name, Vec::new(), Vec::new()));
            curves.len() - 1
        });
        curves[slot].1.push(parse_f64(rec.get(1).unwrap_or(""), line)?);
        curves[slot].2.push(parse_f64(rec.get(2).unwrap_or(""), line)?);
    }
    let mean_l = curves
        .into_iter()
        .map(|(name, r, v)| Ok((name, LEstimate::new(r, v)?)))
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(aggregate(levels, plots, estimates, mean_l))
}

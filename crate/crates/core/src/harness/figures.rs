use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::Estimator;
use super::experiment::ExperimentResults;
use super::results_io::write_serialized;
use super::HarnessError;
use crate::estimate::{per_hectare, MarkKind};

pub const FIG3_FILE: &str = "fig3.csv";
pub const FIG4_FILE: &str = "fig4.csv";
pub const FIG4_SVG: &str = "fig4.svg";

/// Stem density estimate against the simulated truth, per plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardErrorPoint {
    pub dataset: String,
    pub plot: usize,
    pub condition: String,
    pub true_n_ha: f64,
    pub est_n_ha: f64,
    pub se_ha: f64,
}

/// Dataset deviation measure against the HT stem density bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationBiasPoint {
    pub dataset: String,
    pub condition: String,
    pub deviation: f64,
    pub me_pct: f64,
}

pub fn standard_error_points(results: &ExperimentResults) -> Vec<StandardErrorPoint> {
    let radius: HashMap<(&str, usize), f64> =
        results.plots.iter().map(|p| ((p.dataset.as_str(), p.plot), p.radius)).collect();
    results
        .estimates
        .iter()
        .filter(|r| r.est.estimator == Estimator::Ht && r.est.mark == MarkKind::StemCount)
        .map(|r| {
            let radius = radius.get(&(r.dataset.as_str(), r.plot)).copied().unwrap_or(f64::NAN);
            StandardErrorPoint {
                dataset: r.dataset.clone(),
                plot: r.plot,
                condition: r.est.condition.clone(),
                true_n_ha: per_hectare(r.truth, radius),
                est_n_ha: per_hectare(r.est.estimate, radius),
                se_ha: per_hectare(r.est.variance.sqrt(), radius),
            }
        })
        .collect()
}

pub fn deviation_bias_points(results: &ExperimentResults) -> Vec<DeviationBiasPoint> {
    let mut out = Vec::new();
    for d in &results.datasets {
        for e in results.errors.iter().filter(|e| {
            e.dataset == d.dataset && e.estimator == Estimator::Ht.name() && e.mark == MarkKind::StemCount.short_name()
        }) {
            out.push(DeviationBiasPoint {
                dataset: d.dataset.clone(),
                condition: e.condition.clone(),
                deviation: d.l_dev_mean,
                me_pct: e.me_pct,
            });
        }
    }
    out
}

fn scatter_svg(points: &[StandardErrorPoint]) -> String {
    let (w, h, pad) = (640.0, 420.0, 50.0);
    let xmax = points.iter().map(|p| p.true_n_ha).fold(1.0f64, f64::max);
    let ymax = points.iter().map(|p| p.se_ha).filter(|v| v.is_finite()).fold(1.0f64, f64::max);
    let colour = |c: &str| match c {
        "full" => "#1b9e77",
        "centre" => "#d95f02",
        "any" => "#7570b3",
        _ => "#666666",
    };
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{pad}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/><line x1="{pad}" y1="{pad}" x2="{pad}" y2="{y0}" stroke="black"/>"#,
        y0 = h - pad,
        x1 = w - pad
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">simulated stems/ha (max {xmax:.0})</text>"#, w / 2.0, h - 12.0);
    let _ = writeln!(s, r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">estimated SE, stems/ha (max {ymax:.0})</text>"#, h / 2.0, h / 2.0);
    for p in points.iter().filter(|p| p.se_ha.is_finite() && p.true_n_ha.is_finite()) {
        let x = pad + (w - 2.0 * pad) * p.true_n_ha / xmax;
        let y = h - pad - (h - 2.0 * pad) * p.se_ha / ymax;
        let _ = writeln!(s, r#"<circle cx="{x:.1}" cy="{y:.1}" r="1.5" fill="{}" fill-opacity="0.5"/>"#, colour(&p.condition));
    }
    for (k, c) in ["full", "centre", "any"].iter().enumerate() {
        let y = pad + 16.0 * k as f64;
        let _ = writeln!(s, r#"<circle cx="{}" cy="{y}" r="4" fill="{}"/><text x="{}" y="{}">{c}</text>"#, pad + 10.0, colour(c), pad + 20.0, y + 4.0);
    }
    s.push_str("</svg>\n");
    s
}

/// Writes the figure data files into `dir`.
pub fn emit_figures(results: &ExperimentResults, dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let se = standard_error_points(results);
    write_serialized(
        &dir.join(FIG4_FILE),
        &se,
        &["dataset", "plot", "condition", "true_n_ha", "est_n_ha", "se_ha"],
    )?;
    write_serialized(
        &dir.join(FIG3_FILE),
        &deviation_bias_points(results),
        &["dataset", "condition", "deviation", "me_pct"],
    )?;
    let path = dir.join(FIG4_SVG);
    std::fs::write(&path, scatter_svg(&se)).map_err(|e| HarnessError::io(&path, e))
}

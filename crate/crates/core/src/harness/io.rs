use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::detect::Tree;

/// One row of a plot file: `plot_id,tree_id,x,y,dbh`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRecord {
    pub plot_id: String,
    pub tree_id: String,
    pub x: f64,
    pub y: f64,
    pub dbh: f64,
}

/// Trees of one plot in file order. Tree ids are kept in `Tree::tag`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotGroup {
    pub plot_id: String,
    pub trees: Vec<Tree>,
}

/// Reads a plot file and groups rows by `plot_id` in order of first appearance.
pub fn ingest_plots(path: &Path) -> Result<Vec<PlotGroup>, HarnessError> {
    let file = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    read_plots(file)
}

pub fn read_plots<R: std::io::Read>(reader: R) -> Result<Vec<PlotGroup>, HarnessError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut groups: Vec<PlotGroup> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for result in rdr.records() {
        let record = result.map_err(|e| HarnessError::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let rec: PlotRecord = record
            .deserialize(Some(&headers))
            .map_err(|e| HarnessError::Parse { line, message: e.to_string() })?;
        if !(rec.dbh > 0.0 && rec.dbh.is_finite()) || !rec.x.is_finite() || !rec.y.is_finite() {
            return Err(HarnessError::Parse {
                line,
                message: format!("tree {} of plot {}: dbh must be positive and coordinates finite", rec.tree_id, rec.plot_id),
            });
        }
        let slot = *index.entry(rec.plot_id.clone()).or_insert_with(|| {
            groups.push(PlotGroup { plot_id: rec.plot_id.clone(), trees: Vec::new() });
            groups.len() - 1
        });
        let mut tree = Tree::new(rec.x, rec.y, rec.dbh);
        tree.tag = Some(rec.tree_id);
        groups[slot].trees.push(tree);
    }
    Ok(groups)
}

/// Writes plots in the same format `ingest_plots` reads.
pub fn write_plots(path: &Path, plots: &[PlotGroup]) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_plots_to(file, plots)
}

pub fn write_plots_to<W: std::io::Write>(writer: W, plots: &[PlotGroup]) -> Result<(), HarnessError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["plot_id", "tree_id", "x", "y", "dbh"])?;
    for plot in plots {
        for (k, t) in plot.trees.iter().enumerate() {
            let id = t.tag.clone().unwrap_or_else(|| k.to_string());
            wtr.write_record([
                plot.plot_id.clone(),
                id,
                t.location.x.to_string(),
                t.location.y.to_string(),
                t.dbh.to_string(),
            ])?;
        }
    }
    wtr.flush().map_err(|e| HarnessError::Io { path: "<writer>".into(), message: e.to_string() })?;
    Ok(())
}

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DatasetConfig, DegeneratePolicy, Estimator, ExperimentConfig};
use super::io::PlotGroup;
use super::HarnessError;
use crate::detect::{detect_plot, AreaMethod, DetectionCondition, OrderedPlot, WeightRequest};
use crate::estimate::{estimate_total, weighted_estimate, MarkKind};
use crate::simulate::{
    recover_weibull, DbhDistribution, GaussianField, MaternScale, PlotSimulator, ProcessSpec, ProcessVariant, SimulateError,
    SimulatedPlot,
};
use crate::sstats::{deviation_measure, estimate_l, mean_l, LEstimate, DEFAULT_R_MAX};

/// What to estimate on each plot.
#[derive(Debug, Clone)]
pub struct EstimationSettings {
    pub conditions: Vec<DetectionCondition>,
    pub estimators: Vec<Estimator>,
    pub marks: Vec<MarkKind>,
    pub levels: Vec<f64>,
    pub t_threshold: usize,
    pub area_method: AreaMethod,
    /// Conditions with Kuronen weights.
    pub kuronen_conditions: Vec<DetectionCondition>,
}

impl EstimationSettings {
    pub fn for_dataset(cfg: &ExperimentConfig, dataset: &DatasetConfig) -> Result<Self, HarnessError> {
        let conditions = cfg.parsed_conditions()?;
        let kuronen_conditions = conditions.iter().copied().filter(|&c| cfg.kuronen_for(dataset, c)).collect();
        Ok(Self {
            conditions,
            estimators: cfg.estimators.clone(),
            marks: cfg.parsed_marks()?,
            levels: cfg.ci_levels.clone(),
            t_threshold: cfg.t_threshold,
            area_method: cfg.area_method,
            kuronen_conditions,
        })
    }
}

/// One estimator result on one plot.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotEstimate {
    pub condition: String,
    pub estimator: Estimator,
    pub mark: MarkKind,
    pub estimate: f64,
    /// Variance estimate; `NaN` except for HT.
    pub variance: f64,
    pub n_detected: usize,
    /// `(level, lo, hi)` for HT; empty otherwise.
    pub ci: Vec<(f64, f64, f64)>,
}

/// All requested estimators, conditions and marks on one plot.
pub fn estimate_plot(plot: &OrderedPlot, s: &EstimationSettings) -> Result<Vec<PlotEstimate>, HarnessError> {
    let mut out = Vec::new();
    let radius = plot.radius();
    for &cond in &s.conditions {
        let request = WeightRequest {
            kuronen: s.kuronen_conditions.contains(&cond),
            oo: s.estimators.contains(&Estimator::Oo),
        };
        let records = detect_plot(plot, cond, s.area_method, request)?;
        let counted: Vec<usize> = records
            .iter()
            .zip(plot.trees())
            .enumerate()
            .filter(|(_, (r, t))| r.detected && t.in_window(radius))
            .map(|(i, _)| i)
            .collect();
        let n_detected = counted.len();
        let oo = records.first().map(|r| r.oo).unwrap_or(1.0);
        for &mark in &s.marks {
            let m: Vec<f64> = counted.iter().map(|&i| mark.mark(plot.trees()[i].dbh)).collect();
            for &est in &s.estimators {
                let mut row = PlotEstimate {
                    condition: cond.name(),
                    estimator: est,
                    mark,
                    estimate: f64::NAN,
                    variance: f64::NAN,
                    n_detected,
                    ci: Vec::new(),
                };
                match est {
                    Estimator::Ht => {
                        let p: Vec<f64> = counted.iter().map(|&i| records[i].probability).collect();
                        let r = estimate_total(&m, &p, &s.levels, s.t_threshold)?;
                        row.estimate = r.tau_hat;
                        row.variance = r.var_hat;
                        row.ci = r.ci;
                    }
                    Estimator::Oo => {
                        let w = vec![oo; m.len()];
                        row.estimate = weighted_estimate(&m, &w)?;
                    }
                    Estimator::Kuronen => {
                        if !request.kuronen {
                            continue;
                        }
                        let w: Vec<f64> = counted.iter().map(|&i| records[i].kuronen).collect();
                        row.estimate = weighted_estimate(&m, &w)?;
                    }
                    Estimator::Detected => row.estimate = m.iter().sum(),
                }
                out.push(row);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotStatus {
    Ok,
    Degenerate,
    Infeasible,
}

/// Per-plot description written to `plots.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSummary {
    pub dataset: String,
    pub plot: usize,
    pub stream: u64,
    pub intensity: f64,
    pub mean_dbh: f64,
    pub basal_area: f64,
    pub dbh_shape: f64,
    pub dbh_scale: f64,
    pub radius: f64,
    pub status: PlotStatus,
    pub n_trees: usize,
    pub truth_n: f64,
    pub truth_g: f64,
    pub l_deviation: f64,
}

/// One line of `estimates.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub dataset: String,
    pub plot: usize,
    pub truth: f64,
    pub est: PlotEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorTableRow {
    pub dataset: String,
    pub condition: String,
    pub estimator: String,
    pub mark: String,
    pub plots: usize,
    pub rmse_pct: f64,
    pub me_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub dataset: String,
    pub condition: String,
    pub mark: String,
    pub level: f64,
    pub plots: usize,
    pub covered: usize,
    pub coverage_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub dataset: String,
    pub plots: usize,
    pub used: usize,
    pub degenerate: usize,
    pub infeasible: usize,
    pub mean_truth_n_ha: f64,
    /// Mean of per-plot deviation measures.
    pub l_dev_mean: f64,
    /// Deviation measure of the mean L-function.
    pub l_dev_of_mean: f64,
}

/// Everything an experiment produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResults {
    pub levels: Vec<f64>,
    pub plots: Vec<PlotSummary>,
    pub estimates: Vec<EstimateRow>,
    pub mean_l: Vec<(String, LEstimate)>,
    pub datasets: Vec<DatasetSummary>,
    pub errors: Vec<ErrorTableRow>,
    pub coverage: Vec<CoverageRow>,
}

struct PlotOutcome {
    summary: PlotSummary,
    rows: Vec<EstimateRow>,
    l: Option<LEstimate>,
}

struct DatasetPlan {
    config: DatasetConfig,
    settings: EstimationSettings,
    /// Indexed by `pair * intensities + intensity`.
    simulators: Vec<(f64, [f64; 2], PlotSimulator)>,
}

fn plan_datasets(cfg: &ExperimentConfig) -> Result<Vec<DatasetPlan>, HarnessError> {
    let mut dbh: HashMap<(u64, u64, u64), DbhDistribution> = HashMap::new();
    let mut fields: HashMap<(u64, MaternScale), Arc<GaussianField>> = HashMap::new();
    let mut plans = Vec::new();
    for ds in &cfg.datasets {
        let settings = EstimationSettings::for_dataset(cfg, ds)?;
        let field = match ds.process {
            ProcessVariant::Lgcp { range, scale } => Some(match fields.get(&(range.to_bits(), scale)) {
                Some(f) => f.clone(),
                None => {
                    let f = Arc::new(GaussianField::matern(range, 1.0, scale)?);
                    fields.insert((range.to_bits(), scale), f.clone());
                    f
                }
            }),
            _ => None,
        };
        let mut simulators = Vec::new();
        for pair in &cfg.dg_pairs {
            for &n in &cfg.intensities {
                let key = (pair[0].to_bits(), pair[1].to_bits(), n.to_bits());
                let w = match dbh.get(&key) {
                    Some(w) => *w,
                    None => {
                        let w = recover_weibull(pair[0], pair[1], n)?;
                        dbh.insert(key, w);
                        w
                    }
                };
                let spec = ProcessSpec::new(ds.process, n, w)?;
                let sim = match &field {
                    Some(f) => PlotSimulator::with_field(spec, f.clone()),
                    None => PlotSimulator::new(spec)?,
                };
                simulators.push((n, *pair, sim));
            }
        }
        plans.push(DatasetPlan { config: ds.clone(), settings, simulators });
    }
    Ok(plans)
}

fn simulation_skippable(e: &SimulateError) -> bool {
    matches!(e, SimulateError::InfeasibleCount { .. } | SimulateError::RejectionCapExceeded { .. })
}

fn run_plot(
    cfg: &ExperimentConfig,
    plan: &DatasetPlan,
    dataset_index: usize,
    k: usize,
) -> Result<PlotOutcome, HarnessError> {
    let n_int = cfg.intensities.len();
    let slot = (k / n_int) % cfg.dg_pairs.len() * n_int + k % n_int;
    let (intensity, pair, sim) = &plan.simulators[slot];
    let stream = ((dataset_index as u64) << 32) | k as u64;
    let dbh = sim.spec().dbh;
    let mut summary = PlotSummary {
        dataset: plan.config.name.clone(),
        plot: k,
        stream,
        intensity: *intensity,
        mean_dbh: pair[0],
        basal_area: pair[1],
        dbh_shape: dbh.shape,
        dbh_scale: dbh.scale,
        radius: cfg.plot_radius,
        status: PlotStatus::Ok,
        n_trees: 0,
        truth_n: f64::NAN,
        truth_g: f64::NAN,
        l_deviation: f64::NAN,
    };
    let simulated: SimulatedPlot = match sim.simulate(cfg.seed, stream) {
        Ok(p) => p,
        Err(e) if simulation_skippable(&e) && cfg.degenerate_policy == DegeneratePolicy::Skip => {
            log::debug!("{} plot {k}: {e}", plan.config.name);
            summary.status = PlotStatus::Infeasible;
            return Ok(PlotOutcome { summary, rows: Vec::new(), l: None });
        }
        Err(e) => return Err(e.into()),
    };
    summary.n_trees = simulated.plot.len();
    summary.truth_n = simulated.truth_n;
    summary.truth_g = simulated.truth_g;
    let l = estimate_l(&simulated.centres(), simulated.plot.radius(), DEFAULT_R_MAX);
    summary.l_deviation = deviation_measure(&l);
    let estimates = match estimate_plot(&simulated.plot, &plan.settings) {
        Ok(e) => e,
        Err(e) if e.is_degenerate() && cfg.degenerate_policy == DegeneratePolicy::Skip => {
            log::debug!("{} plot {k}: {e}", plan.config.name);
            summary.status = PlotStatus::Degenerate;
            return Ok(PlotOutcome { summary, rows: Vec::new(), l: None });
        }
        Err(e) => return Err(e),
    };
    let rows = estimates
        .into_iter()
        .map(|est| EstimateRow {
            dataset: plan.config.name.clone(),
            plot: k,
            truth: simulated.truth(est.mark),
            est,
        })
        .collect();
    Ok(PlotOutcome { summary, rows, l: Some(l) })
}

/// Simulates every dataset, estimates on each plot and aggregates.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResults, HarnessError> {
    cfg.validate()?;
    let plans = plan_datasets(cfg)?;
    let tasks: Vec<(usize, usize)> = plans
        .iter()
        .enumerate()
        .flat_map(|(d, p)| (0..p.config.plots).map(move |k| (d, k)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| HarnessError::InvalidInput(e.to_string()))?;
    log::info!("running {} plots over {} datasets", tasks.len(), plans.len());
    let outcomes: Vec<Result<PlotOutcome, HarnessError>> =
        pool.install(|| tasks.par_iter().map(|&(d, k)| run_plot(cfg, &plans[d], d, k)).collect());
    let mut plots = Vec::with_capacity(outcomes.len());
    let mut estimates = Vec::new();
    let mut curves: Vec<(String, Vec<LEstimate>)> = plans.iter().map(|p| (p.config.name.clone(), Vec::new())).collect();
    for (outcome, &(d, _)) in outcomes.into_iter().zip(&tasks) {
        let o = outcome?;
        plots.push(o.summary);
        estimates.extend(o.rows);
        if let Some(l) = o.l {
            curves[d].1.push(l);
        }
    }
    let mean_l = curves
        .into_iter()
        .filter(|(_, ls)| !ls.is_empty())
        .map(|(name, ls)| Ok((name, mean_l(&ls)?)))
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(aggregate(cfg.ci_levels.clone(), plots, estimates, mean_l))
}

/// Simulates every configured plot without estimating. Plot ids are
/// `<dataset>/<index>`; infeasible plots are left out under the skip policy.
pub fn simulate_plots(cfg: &ExperimentConfig) -> Result<Vec<PlotGroup>, HarnessError> {
    cfg.validate()?;
    let plans = plan_datasets(cfg)?;
    let tasks: Vec<(usize, usize)> = plans
        .iter()
        .enumerate()
        .flat_map(|(d, p)| (0..p.config.plots).map(move |k| (d, k)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| HarnessError::InvalidInput(e.to_string()))?;
    let n_int = cfg.intensities.len();
    let outcomes: Vec<Result<Option<PlotGroup>, HarnessError>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(d, k)| {
                let plan = &plans[d];
                let slot = (k / n_int) % cfg.dg_pairs.len() * n_int + k % n_int;
                let stream = ((d as u64) << 32) | k as u64;
                match plan.simulators[slot].2.simulate(cfg.seed, stream) {
                    Ok(p) => Ok(Some(PlotGroup {
                        plot_id: format!("{}/{k}", plan.config.name),
                        trees: p.plot.trees().to_vec(),
                    })),
                    Err(e) if simulation_skippable(&e) && cfg.degenerate_policy == DegeneratePolicy::Skip => Ok(None),
                    Err(e) => Err(e.into()),
                }
            })
            .collect()
    });
    outcomes.into_iter().filter_map(|r| r.transpose()).collect()
}

/// Builds the summary tables from per-plot results.
pub fn aggregate(
    levels: Vec<f64>,
    plots: Vec<PlotSummary>,
    estimates: Vec<EstimateRow>,
    mean_l: Vec<(String, LEstimate)>,
) -> ExperimentResults {
    let datasets = dataset_table(&plots, &mean_l);
    let errors = error_table(&estimates);
    let coverage = coverage_table(&estimates, &levels);
    ExperimentResults { levels, plots, estimates, mean_l, datasets, errors, coverage }
}

fn ordered_groups<'a, K: Eq + std::hash::Hash + Clone, T>(
    items: impl Iterator<Item = (K, &'a T)>,
) -> Vec<(K, Vec<&'a T>)>
where
    T: 'a,
{
    let mut index: HashMap<K, usize> = HashMap::new();
    let mut groups: Vec<(K, Vec<&T>)> = Vec::new();
    for (key, item) in items {
        let slot = *index.entry(key.clone()).or_insert_with(|| {
            groups.push((key, Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(item);
    }
    groups
}

/// RMSE% and ME% per dataset, condition, estimator and mark, normalized by
/// the mean true value.
pub fn error_table(rows: &[EstimateRow]) -> Vec<ErrorTableRow> {
    let groups = ordered_groups(rows.iter().map(|r| {
        ((r.dataset.clone(), r.est.condition.clone(), r.est.estimator, r.est.mark), r)
    }));
    groups
        .into_iter()
        .map(|((dataset, condition, estimator, mark), rs)| {
            let n = rs.len() as f64;
            let mean_truth = rs.iter().map(|r| r.truth).sum::<f64>() / n;
            let me = rs.iter().map(|r| r.est.estimate - r.truth).sum::<f64>() / n;
            let mse = rs.iter().map(|r| (r.est.estimate - r.truth).powi(2)).sum::<f64>() / n;
            ErrorTableRow {
                dataset,
                condition,
                estimator: estimator.name().to_string(),
                mark: mark.short_name().to_string(),
                plots: rs.len(),
                rmse_pct: 100.0 / mean_truth * mse.sqrt(),
                me_pct: 100.0 / mean_truth * me,
            }
        })
        .collect()
}

/// Share of HT intervals containing the true total. Plots whose interval is
/// undefined are left out of the denominator.
pub fn coverage_table(rows: &[EstimateRow], levels: &[f64]) -> Vec<CoverageRow> {
    let groups = ordered_groups(
        rows.iter()
            .filter(|r| r.est.estimator == Estimator::Ht)
            .map(|r| ((r.dataset.clone(), r.est.condition.clone(), r.est.mark), r)),
    );
    let mut out = Vec::new();
    for ((dataset, condition, mark), rs) in groups {
        for &level in levels {
            let (mut plots, mut covered) = (0, 0);
            for r in &rs {
                if let Some(&(_, lo, hi)) = r.est.ci.iter().find(|c| c.0 == level) {
                    plots += 1;
                    let slack = 1e-9 * (1.0 + r.truth.abs());
                    if lo - slack <= r.truth && r.truth <= hi + slack {
                        covered += 1;
                    }
                }
            }
            out.push(CoverageRow {
                dataset: dataset.clone(),
                condition: condition.clone(),
                mark: mark.short_name().to_string(),
                level,
                plots,
                covered,
                coverage_pct: 100.0 * covered as f64 / plots as f64,
            });
        }
    }
    out
}

fn dataset_table(plots: &[PlotSummary], mean_l: &[(String, LEstimate)]) -> Vec<DatasetSummary> {
    let groups = ordered_groups(plots.iter().map(|p| (p.dataset.clone(), p)));
    groups
        .into_iter()
        .map(|(dataset, ps)| {
            let used: Vec<&&PlotSummary> = ps.iter().filter(|p| p.status == PlotStatus::Ok).collect();
            let n_used = used.len() as f64;
            let mean_truth_n_ha = used
                .iter()
                .map(|p| crate::estimate::per_hectare(p.truth_n, p.radius))
                .sum::<f64>()
                / n_used;
            let l_dev_mean = used.iter().map(|p| p.l_deviation).sum::<f64>() / n_used;
            let l_dev_of_mean = mean_l
                .iter()
                .find(|(name, _)| *name == dataset)
                .map(|(_, l)| deviation_measure(l))
                .unwrap_or(f64::NAN);
            DatasetSummary {
                plots: ps.len(),
                used: used.len(),
                degenerate: ps.iter().filter(|p| p.status == PlotStatus::Degenerate).count(),
                infeasible: ps.iter().filter(|p| p.status == PlotStatus::Infeasible).count(),
                dataset,
                mean_truth_n_ha,
                l_dev_mean,
                l_dev_of_mean,
            }
        })
        .collect()
}

impl ExperimentResults {
    pub fn write(&self, dir: &Path) -> Result<(), HarnessError> {
        super::results_io::write_results(self, dir)
    }

    pub fn load(dir: &Path) -> Result<Self, HarnessError> {
        super::results_io::load_results(dir)
    }

    /// Error table row lookup.
    pub fn error(&self, dataset: &str, condition: &str, estimator: Estimator, mark: MarkKind) -> Option<&ErrorTableRow> {
        self.errors.iter().find(|r| {
            r.dataset == dataset && r.condition == condition && r.estimator == estimator.name() && r.mark == mark.short_name()
        })
    }

    pub fn coverage(&self, dataset: &str, condition: &str, mark: MarkKind, level: f64) -> Option<&CoverageRow> {
        self.coverage.iter().find(|r| {
            r.dataset == dataset && r.condition == condition && r.mark == mark.short_name() && r.level == level
        })
    }

    pub fn dataset(&self, dataset: &str) -> Option<&DatasetSummary> {
        self.datasets.iter().find(|d| d.dataset == dataset)
    }
}

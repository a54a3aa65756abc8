use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use occlusion_ht::detect::{order_trees, DetectionCondition};
use occlusion_ht::estimate::MarkKind;
use occlusion_ht::harness::{
    emit_figures, estimate_plot, extract_subplots, ingest_plots, run_experiment, simulate_plots, write_plots,
    EstimationSettings, Estimator, ExperimentConfig, ExperimentResults, HarnessError, PlotGroup,
};
use occlusion_ht::sstats::{deviation_measure, estimate_l, DEFAULT_R_MAX};

#[derive(Parser)]
#[command(name = "occlusion-ht", version, about = "Occlusion-corrected estimation for circular sample plots")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the configured datasets and write plots.csv.
    Simulate,
    /// Estimate totals on every plot of a plot file.
    Estimate {
        plots: PathBuf,
        /// full, centre, any or alpha=<value>; repeatable.
        #[arg(long = "condition", default_values_t = vec!["full".to_string(), "centre".to_string(), "any".to_string()])]
        conditions: Vec<String>,
        #[arg(long, default_value_t = 10.0)]
        radius: f64,
        #[arg(long = "level", default_values_t = vec![0.9, 0.95, 0.99])]
        levels: Vec<f64>,
    },
    /// Run the configured experiment and print the error table.
    Evaluate,
    /// Run the configured experiment and print the coverage table.
    Coverage,
    /// Estimate L-functions and deviation measures for a plot file.
    Lfun {
        plots: PathBuf,
        #[arg(long, default_value_t = 10.0)]
        radius: f64,
    },
    /// Cut 126 circular subplots from each rectangular plot.
    Subplots {
        plots: PathBuf,
        #[arg(long, default_value_t = 30.0)]
        width: f64,
        #[arg(long, default_value_t = 30.0)]
        height: f64,
        #[arg(long, default_value_t = 10.0)]
        radius: f64,
    },
    /// Write figure data for a results directory.
    Figures { results: PathBuf },
}

fn load_config(g: &Global) -> Result<ExperimentConfig, HarnessError> {
    let path = g
        .config
        .as_ref()
        .ok_or_else(|| HarnessError::Config("--config is required for this command".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    if let Some(t) = g.threads {
        cfg.threads = t;
    }
    if let Some(out) = &g.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn out_dir(g: &Global) -> Result<PathBuf, HarnessError> {
    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| HarnessError::io(&dir, e))?;
    Ok(dir)
}

fn run_configured(g: &Global) -> Result<ExperimentResults, HarnessError> {
    let cfg = load_config(g)?;
    let results = run_experiment(&cfg)?;
    results.write(&cfg.output_dir)?;
    for d in &results.datasets {
        if d.degenerate + d.infeasible > 0 {
            eprintln!("{}: skipped {} degenerate and {} infeasible plots", d.dataset, d.degenerate, d.infeasible);
        }
    }
    Ok(results)
}

fn estimate_file(path: &Path, conditions: &[String], radius: f64, levels: &[f64], out: &Path) -> Result<(), HarnessError> {
    let conditions = conditions
        .iter()
        .map(|c| c.parse::<DetectionCondition>())
        .collect::<Result<Vec<_>, _>>()?;
    let settings = EstimationSettings {
        kuronen_conditions: conditions.iter().copied().filter(|c| c.is_preset()).collect(),
        conditions,
        estimators: vec![Estimator::Ht, Estimator::Oo, Estimator::Kuronen, Estimator::Detected],
        marks: vec![MarkKind::StemCount, MarkKind::BasalArea],
        levels: levels.to_vec(),
        t_threshold: occlusion_ht::estimate::T_THRESHOLD,
        area_method: Default::default(),
    };
    let target = out.join("estimates.csv");
    let mut wtr = csv::Writer::from_path(&target)?;
    let mut header: Vec<String> =
        ["plot_id", "condition", "estimator", "mark", "estimate", "variance", "n_detected"].map(String::from).into();
    for l in levels {
        header.push(format!("lo_{l}"));
        header.push(format!("hi_{l}"));
    }
    wtr.write_record(&header)?;
    for group in ingest_plots(path)? {
        let plot = order_trees(group.trees, radius)?;
        for e in estimate_plot(&plot, &settings)? {
            let mut rec = vec![
                group.plot_id.clone(),
                e.condition,
                e.estimator.name().to_string(),
                e.mark.short_name().to_string(),
                e.estimate.to_string(),
                e.variance.to_string(),
                e.n_detected.to_string(),
            ];
            for l in levels {
                match e.ci.iter().find(|c| c.0 == *l) {
                    Some(c) => rec.extend([c.1.to_string(), c.2.to_string()]),
                    None => rec.extend([String::new(), String::new()]),
                }
            }
            wtr.write_record(&rec)?;
        }
    }
    wtr.flush().map_err(|e| HarnessError::io(&target, e))
}

fn lfun_file(path: &Path, radius: f64, out: &Path) -> Result<(), HarnessError> {
    let mut curves = csv::Writer::from_path(out.join("lfun.csv"))?;
    let mut devs = csv::Writer::from_path(out.join("deviation.csv"))?;
    curves.write_record(["plot_id", "r", "L"])?;
    devs.write_record(["plot_id", "n_trees", "deviation"])?;
    for group in ingest_plots(path)? {
        let centres: Vec<_> = group.trees.iter().filter(|t| t.in_window(radius)).map(|t| t.location).collect();
        let l = estimate_l(&centres, radius, DEFAULT_R_MAX);
        for (r, v) in l.r().iter().zip(l.values()) {
            curves.write_record([group.plot_id.clone(), r.to_string(), v.to_string()])?;
        }
        devs.write_record([group.plot_id.clone(), centres.len().to_string(), deviation_measure(&l).to_string()])?;
    }
    curves.flush().map_err(|e| HarnessError::io(out, e))?;
    devs.flush().map_err(|e| HarnessError::io(out, e))
}

fn subplot_file(path: &Path, width: f64, height: f64, radius: f64, out: &Path) -> Result<(), HarnessError> {
    let mut groups = Vec::new();
    for rect in ingest_plots(path)? {
        for s in extract_subplots(&rect.plot_id, &rect.trees, width, height, radius)? {
            groups.push(PlotGroup { plot_id: s.plot_id(), trees: s.plot.trees().to_vec() });
        }
    }
    write_plots(&out.join("subplots.csv"), &groups)
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    let g = &cli.global;
    match cli.command {
        Command::Simulate => {
            let cfg = load_config(g)?;
            let plots = simulate_plots(&cfg)?;
            std::fs::create_dir_all(&cfg.output_dir).map_err(|e| HarnessError::io(&cfg.output_dir, e))?;
            let target = cfg.output_dir.join("plots.csv");
            write_plots(&target, &plots)?;
            println!("wrote {} plots to {}", plots.len(), target.display());
        }
        Command::Estimate { plots, conditions, radius, levels } => {
            estimate_file(&plots, &conditions, radius, &levels, &out_dir(g)?)?;
        }
        Command::Evaluate => {
            let results = run_configured(g)?;
            println!("dataset,condition,estimator,mark,plots,rmse_pct,me_pct");
            for r in &results.errors {
                println!(
                    "{},{},{},{},{},{:.2},{:.2}",
                    r.dataset, r.condition, r.estimator, r.mark, r.plots, r.rmse_pct, r.me_pct
                );
            }
        }
        Command::Coverage => {
            let results = run_configured(g)?;
            println!("dataset,condition,mark,level,plots,coverage_pct");
            for r in &results.coverage {
                println!("{},{},{},{},{},{:.1}", r.dataset, r.condition, r.mark, r.level, r.plots, r.coverage_pct);
            }
        }
        Command::Lfun { plots, radius } => lfun_file(&plots, radius, &out_dir(g)?)?,
        Command::Subplots { plots, width, height, radius } => {
            subplot_file(&plots, width, height, radius, &out_dir(g)?)?
        }
        Command::Figures { results } => {
            let loaded = ExperimentResults::load(&results)?;
            let dir = g.out.clone().unwrap_or(results);
            emit_figures(&loaded, &dir)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

//! A small simulation experiment with error and coverage tables.

use occlusion_ht::harness::{run_experiment, ExperimentConfig};

const CONFIG: &str = r#"
seed = 11
output_dir = "experiment-output"
intensities = [1000.0, 2500.0]
dg_pairs = [[12.0, 12.0], [15.0, 20.0]]

[[datasets]]
name = "Poisson"
process = { kind = "poisson" }
plots = 40
kuronen_conditions = ["full"]

[[datasets]]
name = "Cluster 4"
process = { kind = "lgcp", range = 4.0 }
plots = 20
kuronen_conditions = []
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let results = run_experiment(&cfg)?;
    println!("{:<10} {:<7} {:<9} {:<2} {:>7} {:>7}", "dataset", "cond", "estimator", "", "RMSE%", "ME%");
    for e in &results.errors {
        println!(
            "{:<10} {:<7} {:<9} {:<2} {:>7.2} {:>7.2}",
            e.dataset, e.condition, e.estimator, e.mark, e.rmse_pct, e.me_pct
        );
    }
    for c in results.coverage.iter().filter(|c| c.mark == "N") {
        println!("{} {} {:.0}%: {:.1}% of {} plots", c.dataset, c.condition, 100.0 * c.level, c.coverage_pct, c.plots);
    }
    for d in &results.datasets {
        println!("{}: L deviation {:.3}", d.dataset, d.l_dev_mean);
    }
    Ok(())
}

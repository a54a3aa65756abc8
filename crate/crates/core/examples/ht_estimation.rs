//! Totals, variance and confidence intervals from detected marks.

use occlusion_ht::estimate::{estimate_total, per_hectare, MarkKind, T_THRESHOLD};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dbh = [31.0, 24.5, 18.0, 40.2, 12.3, 27.7];
    let probs = [1.0, 0.93, 0.71, 0.98, 0.52, 0.84];
    for mark in [MarkKind::StemCount, MarkKind::BasalArea] {
        let marks: Vec<f64> = dbh.iter().map(|&d| mark.mark(d)).collect();
        let r = estimate_total(&marks, &probs, &[0.9, 0.95, 0.99], T_THRESHOLD)?;
        println!(
            "{}: total {:.4} ({:.2} per ha), variance {:.5}, {} detected",
            mark.short_name(),
            r.tau_hat,
            per_hectare(r.tau_hat, 10.0),
            r.var_hat,
            r.n_detected
        );
        for (level, lo, hi) in r.ci {
            println!("  {:.0}% interval [{lo:.4}, {hi:.4}]", 100.0 * level);
        }
    }
    Ok(())
}

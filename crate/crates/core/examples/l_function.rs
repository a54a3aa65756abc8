//! L-function estimates and the signed deviation measure for three patterns.

use occlusion_ht::simulate::{recover_weibull, MaternScale, PlotSimulator, ProcessSpec, ProcessVariant};
use occlusion_ht::sstats::{deviation_measure, estimate_l, mean_l, DEFAULT_R_MAX};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dbh = recover_weibull(12.0, 12.0, 2000.0)?;
    let variants = [
        ProcessVariant::Poisson,
        ProcessVariant::GibbsHardCore { h: 1.0 },
        ProcessVariant::Lgcp { range: 4.0, scale: MaternScale::Smoothness },
    ];
    for v in variants {
        let sim = PlotSimulator::new(ProcessSpec::new(v, 2000.0, dbh)?)?;
        let mut curves = Vec::new();
        let mut devs = Vec::new();
        for k in 0..20 {
            let plot = sim.simulate(5, k)?;
            let l = estimate_l(&plot.centres(), plot.plot.radius(), DEFAULT_R_MAX);
            devs.push(deviation_measure(&l));
            curves.push(l);
        }
        let mean = mean_l(&curves)?;
        let at = |r: f64| {
            let i = mean.r().iter().position(|&x| x >= r).unwrap();
            mean.values()[i]
        };
        println!(
            "{:<10} mean per-plot deviation {:>6.3}, deviation of mean L {:>6.3}, L(1) = {:.3}, L(3) = {:.3}",
            v.name(),
            devs.iter().sum::<f64>() / devs.len() as f64,
            deviation_measure(&mean),
            at(1.0),
            at(3.0)
        );
    }
    Ok(())
}

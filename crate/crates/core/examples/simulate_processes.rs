//! One plot from each point process with a recovered DBH distribution.

use occlusion_ht::simulate::{recover_weibull, MaternScale, PlotSimulator, ProcessSpec, ProcessVariant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let intensity = 1000.0;
    let dbh = recover_weibull(15.0, 20.0, intensity)?;
    println!("Weibull shape {:.3}, scale {:.3}, mean {:.2} cm", dbh.shape, dbh.scale, dbh.mean());
    let variants = [
        ProcessVariant::Poisson,
        ProcessVariant::Nonoverlapping,
        ProcessVariant::GibbsHardCore { h: 1.5 },
        ProcessVariant::Lgcp { range: 4.0, scale: MaternScale::Smoothness },
    ];
    for v in variants {
        let sim = PlotSimulator::new(ProcessSpec::new(v, intensity, dbh)?)?;
        let plot = sim.simulate(42, 0)?;
        println!(
            "{:<14} {} trees kept, truth N = {} G = {:.3} m^2, {} attempt(s)",
            v.name(),
            plot.plot.len(),
            plot.truth_n,
            plot.truth_g,
            plot.attempts
        );
    }
    Ok(())
}

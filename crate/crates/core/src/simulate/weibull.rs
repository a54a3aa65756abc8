use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use rand::Rng;
use rand_distr::{Distribution, Weibull};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::SimulateError;

/// Largest shape admitted by the recovery search.
pub const MAX_SHAPE: f64 = 20.0;
const MIN_SHAPE: f64 = 0.2;
const OBJECTIVE_TOL: f64 = 1e-8;

/// Weibull DBH law in centimeters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbhDistribution {
    pub shape: f64,
    pub scale: f64,
}

impl DbhDistribution {
    pub fn new(shape: f64, scale: f64) -> Result<Self, SimulateError> {
        if !(shape > 0.0 && shape.is_finite() && scale > 0.0 && scale.is_finite()) {
            return Err(SimulateError::InvalidParameter(format!(
                "Weibull shape {shape} and scale {scale} must be positive"
            )));
        }
        Ok(Self { shape, scale })
    }

    pub fn mean(&self) -> f64 {
        self.scale * gamma(1.0 + 1.0 / self.shape)
    }

    /// E[d^2] in cm^2.
    pub fn mean_square(&self) -> f64 {
        self.scale * self.scale * gamma(1.0 + 2.0 / self.shape)
    }

    /// Expected basal area in m^2/ha at `intensity` stems/ha.
    pub fn expected_basal_area(&self, intensity: f64) -> f64 {
        intensity * std::f64::consts::PI / 40000.0 * self.mean_square()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        Weibull::new(self.scale, self.shape)
            .expect("validated parameters")
            .sample(rng)
    }
}

struct MomentGap {
    mean: f64,
    mean_square: f64,
}

impl MomentGap {
    fn value(&self, log_shape: f64, log_scale: f64) -> f64 {
        let clamped = log_shape.clamp(MIN_SHAPE.ln(), MAX_SHAPE.ln());
        let penalty = (log_shape - clamped).powi(2) * 1e3;
        let shape = clamped.exp();
        let scale = log_scale.exp();
        let m1 = scale * gamma(1.0 + 1.0 / shape);
        let m2 = scale * scale * gamma(1.0 + 2.0 / shape);
        (m1 - self.mean).abs() + (m2 - self.mean_square).abs() + penalty
    }
}

impl CostFunction for MomentGap {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<Self::Output, argmin::core::Error> {
        let v = self.value(p[0], p[1]);
        Ok(if v.is_finite() { v } else { f64::MAX })
    }
}

fn nelder_mead(problem: &MomentGap, start: [f64; 2], step: f64) -> Option<(Vec<f64>, f64)> {
    let simplex = vec![
        start.to_vec(),
        vec![start[0] + step, start[1]],
        vec![start[0], start[1] + step],
    ];
    let solver = NelderMead::new(simplex).with_sd_tolerance(1e-14).ok()?;
    let res = Executor::new(
        MomentGap { mean: problem.mean, mean_square: problem.mean_square },
        solver,
    )
    .configure(|state| state.max_iters(2000))
    .run()
    .ok()?;
    let best = res.state.best_param?;
    let cost = res.state.best_cost;
    cost.is_finite().then_some((best, cost))
}

/// Weibull parameters matching a mean DBH `d` (cm) and basal area `g`
/// (m^2/ha) at `n` stems/ha as closely as possible.
pub fn recover_weibull(d: f64, g: f64, n: f64) -> Result<DbhDistribution, SimulateError> {
    if !(d > 0.0 && g > 0.0 && n > 0.0) || !(d.is_finite() && g.is_finite() && n.is_finite()) {
        return Err(SimulateError::InvalidParameter(format!(
            "Weibull recovery needs positive inputs, got D={d}, G={g}, N={n}"
        )));
    }
    let problem = MomentGap { mean: d, mean_square: g / (n * std::f64::consts::PI / 40000.0) };
    let mut best: Option<(Vec<f64>, f64)> = None;
    for shape in [1.5, 3.0, 6.0, 12.0] {
        let scale = d / gamma(1.0 + 1.0 / shape);
        let mut start = [f64::ln(shape), scale.ln()];
        let mut step = 0.2;
        for _ in 0..6 {
            let Some((p, cost)) = nelder_mead(&problem, start, step) else { break };
            start = [p[0], p[1]];
            step *= 0.3;
            let done = cost < OBJECTIVE_TOL;
            if best.as_ref().is_none_or(|b| cost < b.1) {
                best = Some((p, cost));
            }
            if done {
                break;
            }
        }
    }
    let (p, cost) = best.ok_or(SimulateError::OptimizationFailure { objective: f64::NAN })?;
    if !cost.is_finite() {
        return Err(SimulateError::OptimizationFailure { objective: cost });
    }
    log::debug!("weibull recovery D={d} G={g} N={n}: objective {cost:.3e}");
    DbhDistribution::new(p[0].clamp(MIN_SHAPE.ln(), MAX_SHAPE.ln()).exp(), p[1].exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn first_pair_basal_area() {
        let w = recover_weibull(6.0, 3.0, 1000.0).unwrap();
        assert!((w.expected_basal_area(1000.0) / 3.0 - 1.0).abs() < 0.01, "{w:?}");
    }

    #[test]
    fn second_pair_basal_area() {
        let w = recover_weibull(12.0, 12.0, 2000.0).unwrap();
        assert!((w.expected_basal_area(2000.0) / 12.0 - 1.0).abs() < 0.01, "{w:?}");
    }

    #[test]
    fn all_design_pairs_hit_basal_area() {
        for (d, g) in [(6.0, 3.0), (12.0, 12.0), (15.0, 20.0), (21.0, 35.0)] {
            for k in 1..=10 {
                let n = 500.0 * k as f64;
                let w = recover_weibull(d, g, n).unwrap();
                let ratio = w.expected_basal_area(n) / g;
                assert!((ratio - 1.0).abs() < 0.01, "D={d} G={g} N={n}: {w:?} ratio {ratio}");
            }
        }
    }

    #[test]
    fn consistent_moments_give_zero_objective() {
        let truth = DbhDistribution::new(2.7, 14.0).unwrap();
        let n = 1200.0;
        let g = truth.expected_basal_area(n);
        let w = recover_weibull(truth.mean(), g, n).unwrap();
        let gap = MomentGap { mean: truth.mean(), mean_square: truth.mean_square() }
            .value(w.shape.ln(), w.scale.ln());
        assert!(gap < 1e-6, "objective {gap}, {w:?}");
        assert!((w.shape - 2.7).abs() < 1e-3 && (w.scale - 14.0).abs() < 1e-3);
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(recover_weibull(0.0, 3.0, 1000.0).is_err());
        assert!(recover_weibull(6.0, -1.0, 1000.0).is_err());
    }

    #[test]
    fn sampler_moments() {
        let w = DbhDistribution::new(3.2, 15.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 1_000_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x = w.sample(&mut rng);
            s1 += x;
            s2 += x * x;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        let true_var = w.mean_square() - w.mean().powi(2);
        let m4 = w.scale.powi(4) * gamma(1.0 + 4.0 / w.shape);
        let m3 = w.scale.powi(3) * gamma(1.0 + 3.0 / w.shape);
        let mu = w.mean();
        let central4 = m4 - 4.0 * mu * m3 + 6.0 * mu * mu * w.mean_square() - 3.0 * mu.powi(4);
        let se_mean = (true_var / n as f64).sqrt();
        let se_var = ((central4 - true_var * true_var) / n as f64).sqrt();
        assert!((mean - mu).abs() < 3.0 * se_mean);
        assert!((var - true_var).abs() < 3.0 * se_var);
    }
}

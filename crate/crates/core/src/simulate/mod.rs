//! Marked point pattern simulators and plot cropping.

mod gibbs;
mod lgcp;
mod poisson;
mod weibull;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detect::{order_trees, DetectError, OrderedPlot, Tree};
use crate::estimate::MarkKind;
use crate::geom::PlanePoint;

pub use gibbs::{gibbs_hardcore_points, lattice_capacity};
pub use lgcp::{bessel_k, matern_covariance, EmbeddingMethod, GaussianField, MaternScale};
pub use poisson::{nonoverlapping_pattern, poisson_pattern};
pub use weibull::{recover_weibull, DbhDistribution, MAX_SHAPE};

/// Radius of the circular simulation window for Poisson-type processes.
pub const DISC_WINDOW_RADIUS: f64 = 11.0;
/// Side of the square simulation window for Gibbs and LGCP processes.
pub const SQUARE_WINDOW_SIDE: f64 = 40.0;
/// Radius of the simulated field plot.
pub const PLOT_RADIUS: f64 = 10.0;
/// Patterns drawn before giving up on an uncovered plot centre.
pub const MAX_PATTERN_ATTEMPTS: usize = 1000;
/// Insertion attempts per point for nonoverlapping discs.
pub const NONOVERLAP_ATTEMPTS: usize = 10000;

#[derive(Debug, Error)]
pub enum SimulateError {
    #[error("invalid simulation parameter: {0}")]
    InvalidParameter(String),
    #[error("Weibull recovery did not converge (objective {objective})")]
    OptimizationFailure { objective: f64 },
    #[error("{requested} points with hard core {h} m exceed the lattice capacity {capacity}")]
    InfeasibleCount { requested: usize, capacity: usize, h: f64 },
    #[error("plot centre covered in all {attempts} simulated patterns")]
    RejectionCapExceeded { attempts: usize },
    #[error(transparent)]
    Detect(#[from] DetectError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProcessVariant {
    Poisson,
    Nonoverlapping,
    GibbsHardCore { h: f64 },
    Lgcp {
        range: f64,
        #[serde(default)]
        scale: MaternScale,
    },
}

impl ProcessVariant {
    pub fn name(&self) -> String {
        match self {
            ProcessVariant::Poisson => "Poisson".into(),
            ProcessVariant::Nonoverlapping => "Nonoverlapping".into(),
            ProcessVariant::GibbsHardCore { h } => format!("Gibbs {h}"),
            ProcessVariant::Lgcp { range, .. } => format!("Cluster {range}"),
        }
    }

    /// Simulation window area in m^2.
    pub fn window_area(&self) -> f64 {
        match self {
            ProcessVariant::Poisson | ProcessVariant::Nonoverlapping => {
                std::f64::consts::PI * DISC_WINDOW_RADIUS * DISC_WINDOW_RADIUS
            }
            _ => SQUARE_WINDOW_SIDE * SQUARE_WINDOW_SIDE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub variant: ProcessVariant,
    /// Stems per hectare.
    pub intensity: f64,
    pub dbh: DbhDistribution,
}

impl ProcessSpec {
    pub fn new(variant: ProcessVariant, intensity: f64, dbh: DbhDistribution) -> Result<Self, SimulateError> {
        if !(intensity > 0.0 && intensity.is_finite()) {
            return Err(SimulateError::InvalidParameter(format!("intensity {intensity} must be positive")));
        }
        match variant {
            ProcessVariant::GibbsHardCore { h } if !(h > 0.0 && h.is_finite()) => {
                return Err(SimulateError::InvalidParameter(format!("hard core distance {h} must be positive")));
            }
            ProcessVariant::Lgcp { range, .. } if !(range > 0.0 && range.is_finite()) => {
                return Err(SimulateError::InvalidParameter(format!("field range {range} must be positive")));
            }
            _ => {}
        }
        Ok(Self { variant, intensity, dbh })
    }

    /// Expected number of points in the simulation window.
    pub fn expected_count(&self) -> f64 {
        self.intensity * self.variant.window_area() / 10000.0
    }
}

#[derive(Debug, Clone)]
pub struct SimulatedPlot {
    pub plot: OrderedPlot,
    /// Number of trees with centre in the plot.
    pub truth_n: f64,
    /// Basal area (m^2) of trees with centre in the plot.
    pub truth_g: f64,
    pub spec: ProcessSpec,
    pub seed: u64,
    pub stream: u64,
    pub attempts: usize,
    pub truncated: bool,
}

impl SimulatedPlot {
    pub fn truth(&self, mark: MarkKind) -> f64 {
        match mark {
            MarkKind::StemCount => self.truth_n,
            MarkKind::BasalArea => self.truth_g,
        }
    }

    /// Centres of trees inside the plot, the point set used for L-functions.
    pub fn centres(&self) -> Vec<PlanePoint> {
        let r = self.plot.radius();
        self.plot
            .trees()
            .iter()
            .filter(|t| t.in_window(r))
            .map(|t| t.location)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub enum CropOutcome {
    Accepted { plot: OrderedPlot, truth_n: f64, truth_g: f64 },
    OriginCovered,
}

/// Keeps trees whose disc meets the plot and computes window totals.
pub fn crop_to_plot(trees: Vec<Tree>, radius: f64) -> Result<CropOutcome, SimulateError> {
    let mut kept = Vec::with_capacity(trees.len());
    for t in trees {
        let rho = t.radius();
        let dist = t.location.norm();
        if dist <= rho {
            return Ok(CropOutcome::OriginCovered);
        }
        if dist - rho <= radius {
            kept.push(t);
        }
    }
    let (mut truth_n, mut truth_g) = (0.0, 0.0);
    for t in kept.iter().filter(|t| t.in_window(radius)) {
        truth_n += 1.0;
        truth_g += MarkKind::BasalArea.mark(t.dbh);
    }
    let plot = order_trees(kept, radius)?;
    Ok(CropOutcome::Accepted { plot, truth_n, truth_g })
}

pub(crate) fn draw_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("positive Poisson mean");
    d.sample(rng) as usize
}

pub(crate) fn mark_points<R: Rng + ?Sized>(points: &[PlanePoint], dbh: &DbhDistribution, rng: &mut R) -> Vec<Tree> {
    points
        .iter()
        .map(|p| Tree::new(p.x, p.y, dbh.sample(rng)))
        .collect()
}

/// Random generator for plot `stream` under master `seed`.
pub fn plot_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Simulates plots for one process spec.
#[derive(Debug, Clone)]
pub struct PlotSimulator {
    spec: ProcessSpec,
    field: Option<Arc<GaussianField>>,
}

impl PlotSimulator {
    pub fn new(spec: ProcessSpec) -> Result<Self, SimulateError> {
        let field = match spec.variant {
            ProcessVariant::Lgcp { range, scale } => Some(Arc::new(GaussianField::matern(range, 1.0, scale)?)),
            _ => None,
        };
        Ok(Self { spec, field })
    }

    /// Reuses a precomputed field sampler; its range must match the spec.
    pub fn with_field(spec: ProcessSpec, field: Arc<GaussianField>) -> Self {
        Self { spec, field: Some(field) }
    }

    pub fn spec(&self) -> &ProcessSpec {
        &self.spec
    }

    /// One uncropped pattern and whether insertion was truncated.
    pub fn pattern<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Vec<Tree>, bool), SimulateError> {
        let spec = &self.spec;
        match spec.variant {
            ProcessVariant::Poisson => Ok((poisson_pattern(spec.intensity, &spec.dbh, rng), false)),
            ProcessVariant::Nonoverlapping => Ok(nonoverlapping_pattern(spec.intensity, &spec.dbh, rng)),
            ProcessVariant::GibbsHardCore { h } => {
                let n = draw_count(spec.expected_count(), rng);
                let points = gibbs_hardcore_points(n, h, SQUARE_WINDOW_SIDE, rng)?;
                Ok((mark_points(&points, &spec.dbh, rng), false))
            }
            ProcessVariant::Lgcp { .. } => {
                let field = self.field.as_ref().expect("field sampler for LGCP spec");
                let n = draw_count(spec.expected_count(), rng);
                let points = field.sample_points(n, rng);
                Ok((mark_points(&points, &spec.dbh, rng), false))
            }
        }
    }

    /// Draws patterns until the plot centre is uncovered.
    pub fn simulate(&self, seed: u64, stream: u64) -> Result<SimulatedPlot, SimulateError> {
        let mut rng = plot_rng(seed, stream);
        for attempt in 1..=MAX_PATTERN_ATTEMPTS {
            let (trees, truncated) = self.pattern(&mut rng)?;
            if truncated {
                log::debug!("stream {stream}: nonoverlapping insertion stopped early");
            }
            if let CropOutcome::Accepted { plot, truth_n, truth_g } = crop_to_plot(trees, PLOT_RADIUS)? {
                return Ok(SimulatedPlot {
                    plot,
                    truth_n,
                    truth_g,
                    spec: self.spec,
                    seed,
                    stream,
                    attempts: attempt,
                    truncated,
                });
            }
        }
        Err(SimulateError::RejectionCapExceeded { attempts: MAX_PATTERN_ATTEMPTS })
    }
}

/// Convenience wrapper building a simulator for a single plot.
pub fn simulate_plot(spec: &ProcessSpec, seed: u64, stream: u64) -> Result<SimulatedPlot, SimulateError> {
    PlotSimulator::new(*spec)?.simulate(seed, stream)
}

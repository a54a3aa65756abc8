use std::sync::Arc;

use num_complex::Complex;
use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{SimulateError, SQUARE_WINDOW_SIDE};
use crate::geom::PlanePoint;

/// Grid spacing of the simulated field in meters.
pub const FIELD_SPACING: f64 = 0.25;
const MAX_EMBEDDING: usize = 1024;

/// Modified Bessel function of the second kind, `K_nu(x)` for `x > 0`,
/// from its integral `int_0^inf exp(-x cosh t) cosh(nu t) dt`.
pub fn bessel_k(nu: f64, x: f64) -> f64 {
    assert!(x > 0.0, "bessel_k needs a positive argument");
    let step = 1.0 / 32.0;
    let log_f = |t: f64| -x * t.cosh() + (nu * t).cosh().ln();
    let peak = log_f(if nu > x { (nu / x).asinh() } else { 0.0 });
    let mut sum = 0.5 * log_f(0.0).exp();
    let mut t = step;
    loop {
        let lf = log_f(t);
        sum += lf.exp();
        if lf < peak - 40.0 && x * t.sinh() > nu {
            break;
        }
        t += step;
    }
    sum * step
}

/// How a Matern range parameter scales distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaternScale {
    /// `x = sqrt(2 nu) h / range`, the convention of common geostatistics
    /// packages.
    #[default]
    Smoothness,
    /// `x = h / range`.
    Plain,
}

/// Matern covariance with smoothness 2: `var * (x^2 / 2) K_2(x)`.
pub fn matern_covariance(h: f64, range: f64, variance: f64, scale: MaternScale) -> f64 {
    if h <= 0.0 {
        return variance;
    }
    let x = match scale {
        MaternScale::Smoothness => 2.0 * h / range,
        MaternScale::Plain => h / range,
    };
    if x > 700.0 {
        return 0.0;
    }
    variance * 0.5 * x * x * bessel_k(2.0, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingMethod {
    /// Non-negative circulant spectrum; the field law is exact on the grid.
    Circulant,
    /// Negative spectrum clipped to zero, a truncated spectral synthesis.
    Spectral,
}

/// Stationary Gaussian field on the square simulation window.
pub struct GaussianField {
    nodes: usize,
    size: usize,
    scale: Vec<f64>,
    method: EmbeddingMethod,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for GaussianField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GaussianField")
            .field("nodes", &self.nodes)
            .field("size", &self.size)
            .field("method", &self.method)
            .finish()
    }
}

fn fft2(data: &mut [Complex<f64>], size: usize, fft: &Arc<dyn Fft<f64>>) {
    fft.process(data);
    let mut column = vec![Complex::new(0.0, 0.0); size];
    for c in 0..size {
        for r in 0..size {
            column[r] = data[r * size + c];
        }
        fft.process(&mut column);
        for r in 0..size {
            data[r * size + c] = column[r];
        }
    }
}

impl GaussianField {
    /// Matern field with smoothness 2 at the standard window and grid spacing.
    pub fn matern(range: f64, variance: f64, scale: MaternScale) -> Result<Self, SimulateError> {
        Self::new(SQUARE_WINDOW_SIDE, FIELD_SPACING, |h| matern_covariance(h, range, variance, scale))
    }

    pub fn new<C: Fn(f64) -> f64>(side: f64, spacing: f64, covariance: C) -> Result<Self, SimulateError> {
        if !(side > 0.0 && spacing > 0.0) {
            return Err(SimulateError::InvalidParameter(format!("field side {side} and spacing {spacing}")));
        }
        let nodes = (side / spacing).round() as usize;
        let mut size = (2 * nodes).next_power_of_two();
        let mut planner = FftPlanner::new();
        loop {
            let fft = planner.plan_fft_forward(size);
            let lag: Vec<f64> = (0..size).map(|k| k.min(size - k) as f64 * spacing).collect();
            let mut base: Vec<Complex<f64>> = Vec::with_capacity(size * size);
            for r in 0..size {
                for c in 0..size {
                    base.push(Complex::new(covariance(lag[r].hypot(lag[c])), 0.0));
                }
            }
            fft2(&mut base, size, &fft);
            let max = base.iter().map(|z| z.re).fold(0.0f64, f64::max);
            let min = base.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
            let ok = min >= -1e-10 * max.max(1e-300);
            if ok || size >= MAX_EMBEDDING {
                let method = if ok { EmbeddingMethod::Circulant } else { EmbeddingMethod::Spectral };
                if !ok {
                    log::warn!("circulant embedding has negative eigenvalue {min:.3e}; clipping to a spectral synthesis");
                }
                let norm = (size * size) as f64;
                let scale = base.iter().map(|z| (z.re.max(0.0) / norm).sqrt()).collect();
                return Ok(Self { nodes, size, scale, method, fft });
            }
            size *= 2;
        }
    }

    pub fn method(&self) -> EmbeddingMethod {
        self.method
    }

    /// Grid nodes per side.
    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Field values at the grid nodes, row-major from the lower-left corner.
    pub fn sample_field<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut data: Vec<Complex<f64>> = self
            .scale
            .iter()
            .map(|&s| {
                let a: f64 = StandardNormal.sample(rng);
                let b: f64 = StandardNormal.sample(rng);
                Complex::new(s * a, s * b)
            })
            .collect();
        fft2(&mut data, self.size, &self.fft);
        let mut out = Vec::with_capacity(self.nodes * self.nodes);
        for r in 0..self.nodes {
            for c in 0..self.nodes {
                out.push(data[r * self.size + c].re);
            }
        }
        out
    }

    /// `n` locations drawn i.i.d. from the density proportional to
    /// `exp(field)`, cell by cell, uniform within a cell.
    pub fn sample_points<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<PlanePoint> {
        let field = self.sample_field(rng);
        if n == 0 {
            return Vec::new();
        }
        let top = field.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = field.iter().map(|z| (z - top).exp()).collect();
        let pick = WeightedIndex::new(&weights).expect("positive cell weights");
        let cell = SQUARE_WINDOW_SIDE / self.nodes as f64;
        let half = SQUARE_WINDOW_SIDE / 2.0;
        (0..n)
            .map(|_| {
                let k = pick.sample(rng);
                let (r, c) = (k / self.nodes, k % self.nodes);
                PlanePoint::new(
                    -half + (c as f64 + rng.random::<f64>()) * cell,
                    -half + (r as f64 + rng.random::<f64>()) * cell,
                )
            })
            .collect()
    }
}

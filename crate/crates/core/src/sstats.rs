//! L-function estimation on disc windows and the signed deviation measure.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::PlanePoint;

/// Number of grid nodes on `[0, r_max]`.
pub const GRID_NODES: usize = 513;
pub const DEFAULT_R_MAX: f64 = 5.0;
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SstatsError {
    #[error("invalid L-function input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LEstimate {
    r: Vec<f64>,
    values: Vec<f64>,
}

impl LEstimate {
    pub fn new(r: Vec<f64>, values: Vec<f64>) -> Result<Self, SstatsError> {
        if r.len() != values.len() || r.is_empty() {
            return Err(SstatsError::InvalidInput(format!(
                "grid of {} nodes with {} values",
                r.len(),
                values.len()
            )));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SstatsError::InvalidInput("grid must be strictly increasing".into()));
        }
        if r.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(SstatsError::InvalidInput("non-finite grid or value".into()));
        }
        Ok(Self { r, values })
    }

    /// The identity `L(r) = r` on the given grid.
    pub fn identity(r: Vec<f64>) -> Result<Self, SstatsError> {
        let values = r.clone();
        Self::new(r, values)
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Uniform grid of `GRID_NODES` points on `[0, r_max]`.
pub fn r_grid(r_max: f64) -> Vec<f64> {
    let n = GRID_NODES - 1;
    (0..=n).map(|k| r_max * k as f64 / n as f64).collect()
}

/// Ripley's isotropic weight for a point at distance `a` from the centre of
/// a disc window of radius `radius` and a pair distance `d`.
pub fn isotropic_weight(a: f64, d: f64, radius: f64) -> f64 {
    if d <= 0.0 || a + d <= radius {
        return 1.0;
    }
    if a <= 0.0 {
        return 1.0;
    }
    let kappa = (radius * radius - a * a - d * d) / (2.0 * a * d);
    if kappa >= 1.0 {
        return 1.0;
    }
    let inside = std::f64::consts::PI - kappa.max(-1.0).acos();
    if inside <= 0.0 {
        return f64::INFINITY;
    }
    std::f64::consts::PI / inside
}

/// Isotropically corrected `L(r) = sqrt(K(r) / pi)` on a 513-node grid.
pub fn estimate_l(points: &[PlanePoint], radius: f64, r_max: f64) -> LEstimate {
    let r = r_grid(r_max);
    let n = points.len();
    if n < 2 {
        return LEstimate { values: r.clone(), r };
    }
    let step = r_max / (GRID_NODES - 1) as f64;
    let mut bins = vec![0.0; GRID_NODES];
    for (i, &p) in points.iter().enumerate() {
        let a = p.norm();
        for (j, &q) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = p.distance(q);
            if d > r_max {
                continue;
            }
            let mut k = ((d / step).ceil() as usize).min(GRID_NODES - 1);
            while k > 0 && r[k - 1] >= d {
                k -= 1;
            }
            while r[k] < d {
                k += 1;
            }
            bins[k] += isotropic_weight(a, d, radius);
        }
    }
    let area = std::f64::consts::PI * radius * radius;
    let scale = area / (n as f64 * (n - 1) as f64);
    let mut acc = 0.0;
    let values = bins
        .iter()
        .map(|b| {
            acc += b;
            (acc * scale / std::f64::consts::PI).sqrt()
        })
        .collect();
    LEstimate { r, values }
}

/// Signed gap `r* - L(r*)` at the largest absolute deviation, smallest `r*`
/// among ties.
pub fn deviation_measure(l: &LEstimate) -> f64 {
    let devs: Vec<f64> = l.r.iter().zip(&l.values).map(|(r, v)| r - v).collect();
    let max = devs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    devs.iter()
        .copied()
        .find(|d| d.abs() >= max - TIE_TOL)
        .unwrap_or(0.0)
}

/// Pointwise mean of estimates on a shared grid.
pub fn mean_l(estimates: &[LEstimate]) -> Result<LEstimate, SstatsError> {
    let first = estimates
        .first()
        .ok_or_else(|| SstatsError::InvalidInput("no estimates to average".into()))?;
    let mut sum = vec![0.0; first.values.len()];
    for e in estimates {
        if e.r != first.r {
            return Err(SstatsError::InvalidInput("estimates use different grids".into()));
        }
        for (s, v) in sum.iter_mut().zip(&e.values) {
            *s += v;
        }
    }
    let m = estimates.len() as f64;
    LEstimate::new(first.r.clone(), sum.into_iter().map(|s| s / m).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pattern(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<PlanePoint> {
        (0..n)
            .map(|_| {
                let r = radius * rng.random::<f64>().sqrt();
                let t = rng.random_range(0.0..std::f64::consts::TAU);
                PlanePoint::new(r * t.cos(), r * t.sin())
            })
            .collect()
    }

    // Brute force: the arc of the circle around x_i inside the window is
    // found from the two circle intersection points.
    fn brute_force_l(points: &[PlanePoint], radius: f64, grid: &[f64]) -> Vec<f64> {
        let n = points.len();
        let in_window_angle = |c: (f64, f64), d: f64| -> f64 {
            let dist = (c.0 * c.0 + c.1 * c.1).sqrt();
            if dist + d <= radius {
                return std::f64::consts::TAU;
            }
            // Intersection of |x| = R and |x - c| = d.
            let along = (dist * dist + radius * radius - d * d) / (2.0 * dist);
            let h = (radius * radius - along * along).max(0.0).sqrt();
            let (ux, uy) = (c.0 / dist, c.1 / dist);
            let p1 = (along * ux - h * uy, along * uy + h * ux);
            // The inside arc is symmetric about the direction towards the
            // window centre and ends at the intersection points.
            let (vx, vy) = (p1.0 - c.0, p1.1 - c.1);
            let cos_half = -(vx * ux + vy * uy) / d;
            2.0 * cos_half.clamp(-1.0, 1.0).acos()
        };
        let area = std::f64::consts::PI * radius * radius;
        grid.iter()
            .map(|&r| {
                let mut k = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        let dx = points[j].x - points[i].x;
                        let dy = points[j].y - points[i].y;
                        let d = (dx * dx + dy * dy).sqrt();
                        if d <= r {
                            k += std::f64::consts::TAU / in_window_angle((points[i].x, points[i].y), d);
                        }
                    }
                }
                (k * area / (n * (n - 1)) as f64 / std::f64::consts::PI).sqrt()
            })
            .collect()
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..50 {
            let n = rng.random_range(2..60);
            let pts = random_pattern(&mut rng, n, 10.0);
            let got = estimate_l(&pts, 10.0, 5.0);
            let want = brute_force_l(&pts, 10.0, got.r());
            for (k, (g, w)) in got.values().iter().zip(&want).enumerate() {
                assert!((g - w).abs() <= 1e-12 * (1.0 + w.abs()), "trial {trial} node {k}: {g} vs {w}");
            }
        }
    }

    #[test]
    fn trivial_patterns_give_identity() {
        let one = estimate_l(&[PlanePoint::new(1.0, 2.0)], 10.0, 5.0);
        assert_eq!(one.r(), one.values());
        assert_eq!(one.r().len(), GRID_NODES);
        assert_eq!(one.r()[GRID_NODES - 1], 5.0);
        let none = estimate_l(&[], 10.0, 5.0);
        assert_eq!(deviation_measure(&none), 0.0);
    }

    #[test]
    fn lattice_has_empty_annulus() {
        let pitch = 1.5;
        let mut pts = Vec::new();
        for row in -8i32..=8 {
            for col in -8i32..=8 {
                let x = col as f64 * pitch + if row % 2 != 0 { pitch / 2.0 } else { 0.0 };
                let y = row as f64 * pitch * 3f64.sqrt() / 2.0;
                if x.hypot(y) <= 10.0 {
                    pts.push(PlanePoint::new(x, y));
                }
            }
        }
        let l = estimate_l(&pts, 10.0, 5.0);
        for (r, v) in l.r().iter().zip(l.values()) {
            if *r > 0.0 && *r < pitch - 1e-9 {
                assert_eq!(*v, 0.0);
                assert!(*v < *r);
            }
        }
        let want = brute_force_l(&pts, 10.0, l.r());
        assert!((l.values()[400] - want[400]).abs() < 1e-12);
        assert!(deviation_measure(&l) > 0.0);
    }

    #[test]
    fn deviation_examples() {
        let r = r_grid(5.0);
        assert_eq!(deviation_measure(&LEstimate::identity(r.clone()).unwrap()), 0.0);
        let up = LEstimate::new(r.clone(), r.iter().map(|x| x + 0.3).collect()).unwrap();
        assert!((deviation_measure(&up) + 0.3).abs() < 1e-12);
        let step = LEstimate::new(r.clone(), r.iter().map(|&x| if x >= 2.0 { x - 0.2 } else { x }).collect()).unwrap();
        assert!((deviation_measure(&step) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn mean_examples() {
        let r = r_grid(5.0);
        let a = LEstimate::identity(r.clone()).unwrap();
        let b = LEstimate::new(r.clone(), r.iter().map(|x| x + 0.4).collect()).unwrap();
        assert_eq!(mean_l(&[a.clone(), a.clone()]).unwrap(), a);
        let m = mean_l(&[a, b]).unwrap();
        for (x, v) in m.r().iter().zip(m.values()) {
            assert!((v - x - 0.2).abs() < 1e-12);
        }
        let other = LEstimate::identity(r_grid(4.0)).unwrap();
        assert!(mean_l(&[m, other]).is_err());
        assert!(mean_l(&[]).is_err());
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(LEstimate::new(vec![0.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(LEstimate::new(vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(LEstimate::new(vec![0.0, 1.0], vec![0.0, f64::NAN]).is_err());
    }

    proptest! {
        #[test]
        fn weight_at_least_one(a in 0.0f64..10.0, d in 0.0f64..5.0) {
            let w = isotropic_weight(a, d, 10.0);
            prop_assert!(w >= 1.0);
            if a + d <= 10.0 {
                prop_assert_eq!(w, 1.0);
            }
        }

        #[test]
        fn deviation_antisymmetric(offsets in prop::collection::vec(-2.0f64..2.0, GRID_NODES)) {
            let r = r_grid(5.0);
            let values: Vec<f64> = r.iter().zip(&offsets).map(|(x, o)| x + o).collect();
            let mirrored: Vec<f64> = r.iter().zip(&values).map(|(x, v)| 2.0 * x - v).collect();
            let a = deviation_measure(&LEstimate::new(r.clone(), values).unwrap());
            let b = deviation_measure(&LEstimate::new(r, mirrored).unwrap());
            prop_assert!((a + b).abs() < 1e-9);
        }
    }
}

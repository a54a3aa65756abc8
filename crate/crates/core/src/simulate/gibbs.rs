use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::SimulateError;
use crate::geom::PlanePoint;

fn lattice_sites(h: f64, side: f64) -> Vec<PlanePoint> {
    let half = side / 2.0;
    let row_pitch = h * 3f64.sqrt() / 2.0;
    let mut sites = Vec::new();
    let mut row = 0usize;
    loop {
        let y = -half + row as f64 * row_pitch;
        if y > half + 1e-12 {
            break;
        }
        let offset = if row % 2 == 1 { h / 2.0 } else { 0.0 };
        let mut col = 0usize;
        loop {
            let x = -half + offset + col as f64 * h;
            if x > half + 1e-12 {
                break;
            }
            sites.push(PlanePoint::new(x.min(half), y.min(half)));
            col += 1;
        }
        row += 1;
    }
    sites
}

/// Number of sites of the pitch-`h` triangular lattice in the square window.
pub fn lattice_capacity(h: f64, side: f64) -> usize {
    lattice_sites(h, side).len()
}

struct CellGrid {
    cell: f64,
    cols: usize,
    half: f64,
    cells: Vec<Vec<u32>>,
}

impl CellGrid {
    fn new(h: f64, side: f64) -> Self {
        let cols = ((side / h).ceil() as usize).max(1);
        Self { cell: side / cols as f64, cols, half: side / 2.0, cells: vec![Vec::new(); cols * cols] }
    }

    fn coords(&self, p: PlanePoint) -> (usize, usize) {
        let cx = (((p.x + self.half) / self.cell) as usize).min(self.cols - 1);
        let cy = (((p.y + self.half) / self.cell) as usize).min(self.cols - 1);
        (cx, cy)
    }

    fn insert(&mut self, i: usize, p: PlanePoint) {
        let (cx, cy) = self.coords(p);
        self.cells[cy * self.cols + cx].push(i as u32);
    }

    fn remove(&mut self, i: usize, p: PlanePoint) {
        let (cx, cy) = self.coords(p);
        let cell = &mut self.cells[cy * self.cols + cx];
        let at = cell.iter().position(|&j| j as usize == i).expect("point registered in its cell");
        cell.swap_remove(at);
    }

    fn is_free(&self, points: &[PlanePoint], skip: usize, q: PlanePoint, h: f64) -> bool {
        let (cx, cy) = self.coords(q);
        let h2 = h * h;
        for yy in cy.saturating_sub(1)..=(cy + 1).min(self.cols - 1) {
            for xx in cx.saturating_sub(1)..=(cx + 1).min(self.cols - 1) {
                for &j in &self.cells[yy * self.cols + xx] {
                    let j = j as usize;
                    if j != skip && (points[j] - q).norm_sq() < h2 {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// `n` points in the centred square of side `side` with pairwise distance
/// at least `h`, from a Metropolis-Hastings run started on a lattice.
pub fn gibbs_hardcore_points<R: Rng + ?Sized>(
    n: usize,
    h: f64,
    side: f64,
    rng: &mut R,
) -> Result<Vec<PlanePoint>, SimulateError> {
    let sites = lattice_sites(h, side);
    if n > sites.len() {
        return Err(SimulateError::InfeasibleCount { requested: n, capacity: sites.len(), h });
    }
    let mut points: Vec<PlanePoint> = index::sample(rng, sites.len(), n).into_iter().map(|k| sites[k]).collect();
    if n == 0 {
        return Ok(points);
    }
    let mut grid = CellGrid::new(h, side);
    for (i, &p) in points.iter().enumerate() {
        grid.insert(i, p);
    }
    let half = side / 2.0;
    let jitter = Normal::new(0.0, h / 2.0).expect("positive jitter scale");
    for _ in 0..2000 * n {
        let i = rng.random_range(0..n);
        let q = if rng.random::<bool>() {
            PlanePoint::new(rng.random_range(-half..half), rng.random_range(-half..half))
        } else {
            let p = points[i];
            PlanePoint::new(p.x + jitter.sample(rng), p.y + jitter.sample(rng))
        };
        if q.x.abs() > half || q.y.abs() > half || !grid.is_free(&points, i, q, h) {
            continue;
        }
        grid.remove(i, points[i]);
        points[i] = q;
        grid.insert(i, q);
    }
    Ok(points)
}

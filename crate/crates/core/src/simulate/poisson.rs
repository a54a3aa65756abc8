use rand::Rng;

use super::{draw_count, DbhDistribution, DISC_WINDOW_RADIUS, NONOVERLAP_ATTEMPTS};
use crate::detect::Tree;

fn uniform_in_disc<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> (f64, f64) {
    let r = radius * rng.random::<f64>().sqrt();
    let t = rng.random_range(0.0..std::f64::consts::TAU);
    (r * t.cos(), r * t.sin())
}

/// Poisson count of uniform locations with i.i.d. DBH in the disc window.
pub fn poisson_pattern<R: Rng + ?Sized>(intensity: f64, dbh: &DbhDistribution, rng: &mut R) -> Vec<Tree> {
    let area = std::f64::consts::PI * DISC_WINDOW_RADIUS * DISC_WINDOW_RADIUS;
    let n = draw_count(intensity * area / 10000.0, rng);
    (0..n)
        .map(|_| {
            let (x, y) = uniform_in_disc(DISC_WINDOW_RADIUS, rng);
            Tree::new(x, y, dbh.sample(rng))
        })
        .collect()
}

/// Sequential insertion of non-overlapping stem discs.
///
/// Returns the trees and whether insertion stopped before the drawn count.
pub fn nonoverlapping_pattern<R: Rng + ?Sized>(
    intensity: f64,
    dbh: &DbhDistribution,
    rng: &mut R,
) -> (Vec<Tree>, bool) {
    let area = std::f64::consts::PI * DISC_WINDOW_RADIUS * DISC_WINDOW_RADIUS;
    let n = draw_count(intensity * area / 10000.0, rng);
    let mut trees: Vec<Tree> = Vec::with_capacity(n);
    for k in 0..n {
        let mut placed = false;
        for _ in 0..NONOVERLAP_ATTEMPTS {
            let (x, y) = uniform_in_disc(DISC_WINDOW_RADIUS, rng);
            let cand = Tree::new(x, y, dbh.sample(rng));
            let rho = cand.radius();
            let free = trees.iter().all(|t| {
                let gap = rho + t.radius();
                cand.location.distance(t.location) >= gap
            });
            if free {
                trees.push(cand);
                placed = true;
                break;
            }
        }
        if !placed {
            log::info!("nonoverlapping insertion stopped at {k} of {n} points");
            return (trees, true);
        }
    }
    (trees, false)
}

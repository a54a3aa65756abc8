use super::HarnessError;
use crate::detect::{order_trees, OrderedPlot, Tree};
use crate::geom::PlanePoint;

/// Rows of the subplot centre grid.
pub const GRID_ROWS: usize = 12;
/// Side of the central square holding the subplot centres.
pub const INNER_SIDE: f64 = 10.0;

/// Triangular grid of 126 centres in the central square of a
/// `width` x `height` rectangle with its lower-left corner at the origin.
pub fn subplot_centres(width: f64, height: f64) -> Vec<PlanePoint> {
    let row_pitch = 3f64.sqrt() / 2.0;
    let (cx, cy) = (width / 2.0, height / 2.0);
    let y0 = cy - row_pitch * (GRID_ROWS - 1) as f64 / 2.0;
    let x0 = cx - INNER_SIDE / 2.0;
    let mut out = Vec::with_capacity(126);
    for row in 0..GRID_ROWS {
        let y = y0 + row as f64 * row_pitch;
        let (offset, count) = if row % 2 == 0 { (0.0, 11) } else { (0.5, 10) };
        for col in 0..count {
            out.push(PlanePoint::new(x0 + offset + col as f64, y));
        }
    }
    out
}

/// A circular plot cut out of a rectangular one.
#[derive(Debug, Clone)]
pub struct Subplot {
    pub source_id: String,
    pub index: usize,
    pub centre: PlanePoint,
    pub plot: OrderedPlot,
}

impl Subplot {
    pub fn plot_id(&self) -> String {
        format!("{}/{}", self.source_id, self.index)
    }
}

/// Circular plots of radius `radius` centred on the subplot grid. Trees
/// whose disc covers a centre are left out of that subplot.
pub fn extract_subplots(
    source_id: &str,
    trees: &[Tree],
    width: f64,
    height: f64,
    radius: f64,
) -> Result<Vec<Subplot>, HarnessError> {
    let need = INNER_SIDE + 2.0 * radius;
    if width < need || height < need {
        return Err(HarnessError::InvalidInput(format!(
            "rectangle {width} x {height} is smaller than {need} x {need}"
        )));
    }
    subplot_centres(width, height)
        .into_iter()
        .enumerate()
        .map(|(index, centre)| {
            let local: Vec<Tree> = trees
                .iter()
                .filter_map(|t| {
                    let p = t.location - centre;
                    let dist = p.norm();
                    let rho = t.radius();
                    if dist <= rho || dist - rho > radius {
                        return None;
                    }
                    let mut moved = t.clone();
                    moved.location = p;
                    Some(moved)
                })
                .collect();
            let plot = order_trees(local, radius)?;
            Ok(Subplot { source_id: source_id.to_string(), index, centre, plot })
        })
        .collect()
}

//! Occlusion geometry seen from the plot centre: shadow sets of stem discs,
//! their dilations and erosions, arcs of probe circles, and areas inside
//! the plot window.

pub mod intervals;
mod prim;
pub mod shape;
mod union;

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use intervals::{angular_distance, arc_fraction, normalize_angle, AngularIntervalSet};
pub use shape::{shadow_of, PlanePoint, ShadowSet, StemDisc};

use prim::{arcs_between_crossings, probe_crossings, Carrier, PolarBounds, Prim};
use union::AngularIndex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("coordinates or radius are not finite")]
    NonFinite,
    #[error("stem radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("stem disc at ({x}, {y}) with radius {radius} covers the origin")]
    OriginCovered { x: f64, y: f64, radius: f64 },
    #[error("morphological radius must be finite and non-negative, got {0}")]
    InvalidRadius(f64),
    #[error("erosion disc of radius {beta} around a point at distance {distance} reaches the origin")]
    ErosionReachesOrigin { distance: f64, beta: f64 },
    #[error("probe radius must be positive, got {0}")]
    InvalidProbe(f64),
}

/// A morphological operation with a centred disc of radius `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MorphTransform {
    Erode(f64),
    Identity,
    Dilate(f64),
}

impl MorphTransform {
    /// Transform for a detection parameter `alpha` and a stem of diameter
    /// `dbh_cm`: radius `|α|·d/2` in meters.
    pub fn from_alpha(alpha: f64, dbh_cm: f64) -> Self {
        let beta = alpha.abs() * dbh_cm / 200.0;
        if alpha > 0.0 {
            MorphTransform::Dilate(beta)
        } else if alpha < 0.0 {
            MorphTransform::Erode(beta)
        } else {
            MorphTransform::Identity
        }
    }

    pub fn beta(&self) -> f64 {
        match *self {
            MorphTransform::Erode(b) | MorphTransform::Dilate(b) => b,
            MorphTransform::Identity => 0.0,
        }
    }

    /// Fold zero radii into `Identity` and reject invalid ones.
    pub fn normalized(self) -> Result<Self, GeomError> {
        let b = self.beta();
        if !b.is_finite() || b < 0.0 {
            return Err(GeomError::InvalidRadius(b));
        }
        Ok(if b == 0.0 { MorphTransform::Identity } else { self })
    }
}

/// Segment test against one shadow.
pub fn occludes_point(shadow: &ShadowSet, p: PlanePoint) -> bool {
    shadow.contains(p)
}

/// A union of shadow sets with an angular index for fast point queries.
#[derive(Debug, Clone)]
pub struct ShadowUnion {
    shadows: Vec<ShadowSet>,
    index: AngularIndex,
}

impl Default for ShadowUnion {
    fn default() -> Self {
        Self::new()
    }
}

const SCAN_SAMPLES: usize = 4096;
const BISECT_TOL: f64 = 1e-9;
const COVER_TOL: f64 = 1e-12;

fn shadow_bounds(s: &ShadowSet) -> PolarBounds {
    PolarBounds {
        rmin: s.near_distance(),
        rmax: f64::INFINITY,
        mid: s.central_angle(),
        half: s.half_angle(),
    }
}

impl ShadowUnion {
    pub fn new() -> Self {
        Self {
            shadows: Vec::new(),
            index: AngularIndex::new(),
        }
    }

    pub fn from_shadows(shadows: impl IntoIterator<Item = ShadowSet>) -> Self {
        let mut u = Self::new();
        for s in shadows {
            u.push(s);
        }
        u
    }

    pub fn push(&mut self, s: ShadowSet) {
        self.index.push(shadow_bounds(&s));
        self.shadows.push(s);
    }

    pub fn shadows(&self) -> &[ShadowSet] {
        &self.shadows
    }

    pub fn len(&self) -> usize {
        self.shadows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shadows.is_empty()
    }

    /// Whether `p` lies in some shadow.
    pub fn contains(&self, p: PlanePoint) -> bool {
        self.index
            .at_point(p)
            .any(|id| self.shadows[id as usize].contains(p))
    }

    pub fn dilated_membership(&self, p: PlanePoint, beta: f64) -> bool {
        if beta == 0.0 {
            return self.contains(p);
        }
        self.shadows.iter().any(|s| s.distance(p) <= beta)
    }

    /// Whether the disc `B(p, β)` lies inside the union, decided on its
    /// boundary circle.
    pub fn eroded_membership(&self, p: PlanePoint, beta: f64) -> Result<bool, GeomError> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(GeomError::InvalidRadius(beta));
        }
        if beta == 0.0 {
            return Ok(self.contains(p));
        }
        let d = p.norm();
        if d <= beta {
            return Err(GeomError::ErosionReachesOrigin { distance: d, beta });
        }
        if !self.contains(p) {
            return Ok(false);
        }
        let mut cand = Vec::new();
        self.index
            .in_window(p.angle(), (beta / d).asin(), d - beta, d + beta, &mut cand);
        let mut arcs = Vec::new();
        let mut carriers = Vec::with_capacity(3);
        let mut crossings = Vec::with_capacity(6);
        for &id in &cand {
            let s = self.shadows[id as usize];
            carriers.clear();
            crossings.clear();
            Prim::Shadow(s).carriers(&mut carriers);
            for c in &carriers {
                probe_crossings(c, p, beta, &mut crossings);
            }
            arcs_between_crossings(p, beta, &mut crossings, |q| s.contains(q), &mut arcs);
        }
        Ok(AngularIntervalSet::from_arcs(arcs).covers_circle(COVER_TOL))
    }

    /// Angles of the probe circle of radius `r` inside the union transformed
    /// by `t`. Erosion uses an angular scan refined by bisection.
    pub fn occluded_arcs(&self, r: f64, t: MorphTransform) -> Result<AngularIntervalSet, GeomError> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(GeomError::InvalidProbe(r));
        }
        match t.normalized()? {
            MorphTransform::Identity => Ok(self.probe_arcs(r, 0.0)),
            MorphTransform::Dilate(b) => Ok(self.probe_arcs(r, b)),
            MorphTransform::Erode(b) => self.eroded_arcs_scan(r, b),
        }
    }

    fn probe_arcs(&self, r: f64, beta: f64) -> AngularIntervalSet {
        let mut arcs = Vec::new();
        let mut carriers = Vec::with_capacity(4);
        let mut crossings = Vec::with_capacity(8);
        for &s in &self.shadows {
            if s.near_distance() - beta > r {
                continue;
            }
            let prim = if beta == 0.0 {
                Prim::Shadow(s)
            } else {
                Prim::Dilated { shadow: s, beta }
            };
            push_probe_arcs(&prim, r, &mut carriers, &mut crossings, &mut arcs);
        }
        AngularIntervalSet::from_arcs(arcs)
    }

    fn eroded_arcs_scan(&self, r: f64, beta: f64) -> Result<AngularIntervalSet, GeomError> {
        if r <= beta {
            return Err(GeomError::ErosionReachesOrigin { distance: r, beta });
        }
        let member = |ang: f64| -> Result<bool, GeomError> {
            self.eroded_membership(PlanePoint::from_polar(r, ang), beta)
        };
        let ident = self.probe_arcs(r, 0.0);
        if ident.is_empty() {
            return Ok(AngularIntervalSet::empty());
        }
        let step = TAU / SCAN_SAMPLES as f64;
        let mut out = Vec::new();
        for (start, end) in circular_arcs(&ident) {
            if end - start >= TAU {
                // whole circle occluded: scan cyclically
                let flags: Vec<bool> = (0..SCAN_SAMPLES)
                    .map(|k| member(k as f64 * step))
                    .collect::<Result<_, _>>()?;
                let Some(pivot) = flags.iter().position(|f| !f) else {
                    return Ok(AngularIntervalSet::full());
                };
                let angles: Vec<f64> = (0..=SCAN_SAMPLES)
                    .map(|k| (pivot + k) as f64 * step)
                    .collect();
                let rolled: Vec<bool> = (0..=SCAN_SAMPLES)
                    .map(|k| flags[(pivot + k) % SCAN_SAMPLES])
                    .collect();
                collect_runs(&angles, &rolled, &member, &mut out)?;
                continue;
            }
            // endpoints lie on the union boundary and are never interior
            let n = (((end - start) / step).ceil() as usize).max(8);
            let mut angles = Vec::with_capacity(n + 1);
            let mut flags = Vec::with_capacity(n + 1);
            for k in 0..=n {
                let a = start + (end - start) * k as f64 / n as f64;
                angles.push(a);
                flags.push(if k == 0 || k == n { false } else { member(a)? });
            }
            collect_runs(&angles, &flags, &member, &mut out)?;
        }
        Ok(AngularIntervalSet::from_arcs(out))
    }

    /// Eroded probe arcs from the offset of the union boundary: an angle is
    /// eroded iff it is occluded and farther than `β` from that boundary.
    pub fn eroded_arcs_exact(&self, r: f64, beta: f64) -> Result<AngularIntervalSet, GeomError> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(GeomError::InvalidProbe(r));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(GeomError::InvalidRadius(beta));
        }
        let ident = self.probe_arcs(r, 0.0);
        if beta == 0.0 || ident.is_empty() {
            return Ok(ident);
        }
        if r <= beta {
            return Err(GeomError::ErosionReachesOrigin { distance: r, beta });
        }
        let clip = r + beta + 1.0;
        let prims: Vec<Prim> = self
            .shadows
            .iter()
            .filter(|s| s.near_distance() < clip)
            .map(|s| Prim::Shadow(*s))
            .collect();
        let boundary = union::union_boundary(&prims, clip);
        let offsets = union::offset_primitives(&boundary, beta);
        let mut arcs = Vec::new();
        let mut carriers = Vec::with_capacity(4);
        let mut crossings = Vec::with_capacity(8);
        for prim in offsets.iter().filter(|p| p.bounds(clip).contains_radius(r)) {
            push_probe_arcs(prim, r, &mut carriers, &mut crossings, &mut arcs);
        }
        let near_boundary = AngularIntervalSet::from_arcs(arcs);
        Ok(ident.intersection(&near_boundary.complement()))
    }

    /// Area of the transformed union inside `B(o, R)` by radial quadrature
    /// of probe-circle arc lengths.
    pub fn morph_area(&self, t: MorphTransform, radius: f64) -> Result<f64, GeomError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeomError::InvalidProbe(radius));
        }
        let t = t.normalized()?;
        if self.shadows.is_empty() {
            return Ok(0.0);
        }
        let beta = t.beta();
        let mut breaks = vec![0.0, radius];
        for s in &self.shadows {
            let c = s.center_distance();
            let rho = s.disc().radius();
            let tl = s.tangent_length();
            for b in [
                s.near_distance() - beta,
                s.near_distance() + beta,
                tl,
                (tl * tl + beta * beta).sqrt(),
                c - rho - beta,
                c + rho + beta,
                c,
                beta,
                beta * c / rho,
            ] {
                if b > 0.0 && b < radius {
                    breaks.push(b);
                }
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

        let f = |r: f64| -> Result<f64, GeomError> {
            if r <= 0.0 {
                return Ok(0.0);
            }
            match t {
                MorphTransform::Erode(b) if r <= b => Ok(0.0),
                MorphTransform::Erode(b) => Ok(r * self.eroded_arcs_scan(r, b)?.measure()),
                _ => Ok(r * self.probe_arcs(r, beta).measure()),
            }
        };
        let tol = 1e-4;
        let mut total = 0.0;
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let share = tol * (b - a) / radius;
            total += adaptive_simpson(&f, a, b, share)?;
        }
        Ok(total)
    }

    /// Exact area of the transformed union inside `B(o, R)`.
    pub fn morph_area_exact(&self, t: MorphTransform, radius: f64) -> Result<f64, GeomError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeomError::InvalidProbe(radius));
        }
        let t = t.normalized()?;
        if self.shadows.is_empty() {
            return Ok(0.0);
        }
        match t {
            MorphTransform::Identity => {
                let prims: Vec<Prim> = self.shadows.iter().map(|s| Prim::Shadow(*s)).collect();
                Ok(union::union_area(&prims, radius, None))
            }
            MorphTransform::Dilate(beta) => {
                let prims: Vec<Prim> = self
                    .shadows
                    .iter()
                    .map(|s| Prim::Dilated { shadow: *s, beta })
                    .collect();
                Ok(union::union_area(&prims, radius, None))
            }
            MorphTransform::Erode(beta) => {
                let boundary = self.boundary(radius + beta + 1.0);
                Ok(self.eroded_area_from_boundary(&boundary, beta, radius))
            }
        }
    }

    /// Union boundary inside `B(o, clip)`, reusable across erosion radii
    /// up to `clip - R - 1`.
    pub fn boundary(&self, clip: f64) -> UnionBoundary {
        let prims: Vec<Prim> = self
            .shadows
            .iter()
            .filter(|s| s.near_distance() < clip)
            .map(|s| Prim::Shadow(*s))
            .collect();
        UnionBoundary {
            curves: union::union_boundary(&prims, clip),
            clip,
        }
    }

    /// Exact eroded area inside `B(o, R)` from a precomputed boundary: the
    /// window minus the `β`-neighbourhood of the visible region.
    pub fn eroded_area_from_boundary(&self, boundary: &UnionBoundary, beta: f64, radius: f64) -> f64 {
        debug_assert!(boundary.clip >= radius + beta);
        let window = PI * radius * radius;
        if beta == 0.0 {
            let prims: Vec<Prim> = self.shadows.iter().map(|s| Prim::Shadow(*s)).collect();
            return union::union_area(&prims, radius, None);
        }
        let prims = union::offset_primitives(&boundary.curves, beta);
        let visible = |p: PlanePoint| !self.contains(p);
        let grown = union::union_area(&prims, radius, Some(&visible));
        (window - grown).max(0.0)
    }
}

/// Boundary curves of a shadow union, cached for repeated erosion queries.
#[derive(Debug, Clone)]
pub struct UnionBoundary {
    curves: Vec<prim::Curve>,
    clip: f64,
}

impl UnionBoundary {
    pub fn clip(&self) -> f64 {
        self.clip
    }

    pub fn piece_count(&self) -> usize {
        self.curves.len()
    }
}

fn push_probe_arcs(
    prim: &Prim,
    r: f64,
    carriers: &mut Vec<Carrier>,
    crossings: &mut Vec<f64>,
    arcs: &mut Vec<(f64, f64)>,
) {
    carriers.clear();
    crossings.clear();
    prim.carriers(carriers);
    for c in carriers.iter() {
        probe_crossings(c, PlanePoint::ORIGIN, r, crossings);
    }
    arcs_between_crossings(PlanePoint::ORIGIN, r, crossings, |q| prim.contains(q, 0.0), arcs);
}

/// Intervals of a normalized set as circular arcs, joining the pieces split
/// at angle zero.
fn circular_arcs(set: &AngularIntervalSet) -> Vec<(f64, f64)> {
    let iv = set.intervals();
    if iv.len() == 1 && iv[0].0 <= 0.0 && iv[0].1 >= TAU {
        return vec![(0.0, TAU)];
    }
    let mut out: Vec<(f64, f64)> = iv.to_vec();
    if out.len() >= 2 && out[0].0 <= 0.0 && out[out.len() - 1].1 >= TAU {
        let first = out.remove(0);
        let last = out.last_mut().unwrap();
        last.1 = TAU + first.1;
    }
    out
}

/// Turn sampled flags into arcs, bisecting every false/true transition.
fn collect_runs<F>(angles: &[f64], flags: &[bool], member: &F, out: &mut Vec<(f64, f64)>) -> Result<(), GeomError>
where
    F: Fn(f64) -> Result<bool, GeomError>,
{
    let mut open: Option<f64> = None;
    for k in 1..angles.len() {
        match (flags[k - 1], flags[k]) {
            (false, true) => open = Some(bisect(angles[k - 1], angles[k], member)?),
            (true, false) => {
                let end = bisect(angles[k], angles[k - 1], member)?;
                if let Some(start) = open.take() {
                    out.push((start, end));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// Locate the transition between `outside` (flag false) and `inside`.
fn bisect<F>(mut outside: f64, mut inside: f64, member: &F) -> Result<f64, GeomError>
where
    F: Fn(f64) -> Result<bool, GeomError>,
{
    while (inside - outside).abs() > BISECT_TOL {
        let mid = 0.5 * (inside + outside);
        if member(mid)? {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(0.5 * (inside + outside))
}

const SIMPSON_MAX_DEPTH: u32 = 40;
const SIMPSON_MIN_DEPTH: u32 = 4;

fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64, GeomError>
where
    F: Fn(f64) -> Result<f64, GeomError>,
{
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, GeomError>
where
    F: Fn(f64) -> Result<f64, GeomError>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || (depth <= SIMPSON_MAX_DEPTH - SIMPSON_MIN_DEPTH && delta.abs() <= 15.0 * tol) {
        return Ok(left + right + delta / 15.0);
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Probe-circle arcs of `T(∪ shadows)` at radius `r`.
pub fn occluded_arcs(shadows: &[ShadowSet], r: f64, t: MorphTransform) -> Result<AngularIntervalSet, GeomError> {
    ShadowUnion::from_shadows(shadows.iter().copied()).occluded_arcs(r, t)
}

/// Whether `p` is within distance `β` of the union.
pub fn dilated_membership(p: PlanePoint, shadows: &[ShadowSet], beta: f64) -> bool {
    shadows.iter().any(|s| s.distance(p) <= beta)
}

/// Whether `B(p, β)` lies inside the union.
pub fn eroded_membership(p: PlanePoint, shadows: &[ShadowSet], beta: f64) -> Result<bool, GeomError> {
    ShadowUnion::from_shadows(shadows.iter().copied()).eroded_membership(p, beta)
}

/// Area of `T(∪ shadows) ∩ B(o, R)` by radial quadrature.
pub fn morph_area(shadows: &[ShadowSet], t: MorphTransform, radius: f64) -> Result<f64, GeomError> {
    ShadowUnion::from_shadows(shadows.iter().copied()).morph_area(t, radius)
}

#[cfg(test)]
mod tests;

//! Exact areas of unions of primitives clipped to a centred disc, by
//! summing the line integral of `(x dy - y dx) / 2` over the pieces of the
//! union boundary.

use std::f64::consts::{PI, TAU};

use super::intervals::normalize_angle;
use super::prim::{carrier_intersections, Curve, PolarBounds, Prim};
use super::shape::PlanePoint;

const BUCKETS: usize = 256;
const STRICT_EPS: f64 = 1e-10;
const PARAM_TOL: f64 = 1e-9;
const MIN_PIECE: f64 = 1e-12;

/// Buckets of polar angle, each listing the items whose footprint may
/// reach into it.
#[derive(Debug, Clone)]
pub(crate) struct AngularIndex {
    buckets: Vec<Vec<u32>>,
    bounds: Vec<PolarBounds>,
}

fn bucket_of(angle: f64) -> usize {
    ((normalize_angle(angle) / TAU * BUCKETS as f64) as usize).min(BUCKETS - 1)
}

impl AngularIndex {
    pub(crate) fn new() -> Self {
        Self {
            buckets: vec![Vec::new(); BUCKETS],
            bounds: Vec::new(),
        }
    }

    pub(crate) fn build(bounds: impl IntoIterator<Item = PolarBounds>) -> Self {
        let mut idx = Self::new();
        for b in bounds {
            idx.push(b);
        }
        idx
    }

    pub(crate) fn push(&mut self, b: PolarBounds) {
        let id = self.bounds.len() as u32;
        for k in Self::span(b.mid, b.half) {
            self.buckets[k].push(id);
        }
        self.bounds.push(b);
    }

    fn span(mid: f64, half: f64) -> impl Iterator<Item = usize> {
        let (first, count) = if half >= PI {
            (0, BUCKETS)
        } else {
            let lo = bucket_of(mid - half);
            let width = TAU / BUCKETS as f64;
            let n = ((2.0 * half) / width).ceil() as usize + 2;
            (lo, n.min(BUCKETS))
        };
        (0..count).map(move |k| (first + k) % BUCKETS)
    }

    pub(crate) fn bounds(&self, id: u32) -> &PolarBounds {
        &self.bounds[id as usize]
    }

    /// Items whose footprint may contain `p`.
    pub(crate) fn at_point(&self, p: PlanePoint) -> impl Iterator<Item = u32> + '_ {
        let r = p.norm();
        self.buckets[bucket_of(p.angle())]
            .iter()
            .copied()
            .filter(move |&id| self.bounds[id as usize].contains_radius(r))
    }

    /// Items whose footprint may meet the angular window `mid ± half` at
    /// radii in `[rmin, rmax]`, sorted and without repeats.
    pub(crate) fn in_window(&self, mid: f64, half: f64, rmin: f64, rmax: f64, out: &mut Vec<u32>) {
        self.in_window_after(mid, half, rmin, rmax, 0, out);
    }

    /// As [`in_window`](Self::in_window), keeping only ids at least `from`.
    pub(crate) fn in_window_after(&self, mid: f64, half: f64, rmin: f64, rmax: f64, from: u32, out: &mut Vec<u32>) {
        out.clear();
        let q = PolarBounds {
            rmin,
            rmax,
            mid,
            half,
        };
        for k in Self::span(mid, half) {
            for &id in &self.buckets[k] {
                if id >= from && self.bounds[id as usize].overlaps(&q) {
                    out.push(id);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
    }
}

struct Piece {
    owner: u32,
    curve: Curve,
    params: Vec<f64>,
    bbox: BBox,
}

#[derive(Debug, Clone, Copy)]
struct BBox {
    lo: PlanePoint,
    hi: PlanePoint,
}

impl BBox {
    const EMPTY: BBox = BBox {
        lo: PlanePoint::new(f64::INFINITY, f64::INFINITY),
        hi: PlanePoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
    };

    fn of_curve(c: &Curve) -> BBox {
        let pad = 1e-9;
        match *c {
            Curve::Arc { center, radius, .. } => BBox {
                lo: PlanePoint::new(center.x - radius - pad, center.y - radius - pad),
                hi: PlanePoint::new(center.x + radius + pad, center.y + radius + pad),
            },
            Curve::Segment { a, b } => BBox {
                lo: PlanePoint::new(a.x.min(b.x) - pad, a.y.min(b.y) - pad),
                hi: PlanePoint::new(a.x.max(b.x) + pad, a.y.max(b.y) + pad),
            },
        }
    }

    fn join(self, o: BBox) -> BBox {
        BBox {
            lo: PlanePoint::new(self.lo.x.min(o.lo.x), self.lo.y.min(o.lo.y)),
            hi: PlanePoint::new(self.hi.x.max(o.hi.x), self.hi.y.max(o.hi.y)),
        }
    }

    fn meets(&self, o: &BBox) -> bool {
        self.lo.x <= o.hi.x && o.lo.x <= self.hi.x && self.lo.y <= o.hi.y && o.lo.y <= self.hi.y
    }
}

/// Split every primitive curve at its crossings with other curves and with
/// the circle of radius `clip`; returns the pieces with their breakpoints
/// and the crossing angles on the clip circle.
fn split_curves(prims: &[Prim], index: &AngularIndex, clip: f64, reach: f64) -> (Vec<Piece>, Vec<f64>) {
    let mut pieces = Vec::new();
    let mut first_of = Vec::with_capacity(prims.len() + 1);
    let mut prim_box = Vec::with_capacity(prims.len());
    let mut buf = Vec::new();
    for (k, p) in prims.iter().enumerate() {
        first_of.push(pieces.len());
        buf.clear();
        p.curves(reach, &mut buf);
        let mut pb = BBox::EMPTY;
        for &curve in &buf {
            let bbox = BBox::of_curve(&curve);
            pb = pb.join(bbox);
            pieces.push(Piece {
                owner: k as u32,
                curve,
                params: Vec::new(),
                bbox,
            });
        }
        prim_box.push(pb);
    }
    first_of.push(pieces.len());

    let mut pts = Vec::new();
    let mut cand = Vec::new();
    for k in 0..prims.len() {
        let b = *index.bounds(k as u32);
        index.in_window_after(b.mid, b.half, b.rmin, b.rmax, k as u32 + 1, &mut cand);
        for &m in cand.iter() {
            let m = m as usize;
            if !prim_box[k].meets(&prim_box[m]) {
                continue;
            }
            for i in first_of[k]..first_of[k + 1] {
                for j in first_of[m]..first_of[m + 1] {
                    if !pieces[i].bbox.meets(&pieces[j].bbox) {
                        continue;
                    }
                    pts.clear();
                    let (ci, cj) = (pieces[i].curve, pieces[j].curve);
                    carrier_intersections(&ci.carrier(), &cj.carrier(), &mut pts);
                    for &x in &pts {
                        let ti = ci.param_of(x);
                        let tj = cj.param_of(x);
                        if in_range(ti) && in_range(tj) {
                            pieces[i].params.push(ti.clamp(0.0, 1.0));
                            pieces[j].params.push(tj.clamp(0.0, 1.0));
                        }
                    }
                }
            }
        }
    }

    let window = super::prim::Carrier::Circle {
        center: PlanePoint::ORIGIN,
        radius: clip,
    };
    let mut window_angles = Vec::new();
    for piece in pieces.iter_mut() {
        pts.clear();
        carrier_intersections(&piece.curve.carrier(), &window, &mut pts);
        for &x in &pts {
            let t = piece.curve.param_of(x);
            if in_range(t) {
                piece.params.push(t.clamp(0.0, 1.0));
                window_angles.push(x.angle());
            }
        }
    }
    (pieces, window_angles)
}

fn in_range(t: f64) -> bool {
    (-PARAM_TOL..=1.0 + PARAM_TOL).contains(&t)
}

fn strictly_covered(
    p: PlanePoint,
    skip: Option<u32>,
    prims: &[Prim],
    index: &AngularIndex,
    extra: Option<&dyn Fn(PlanePoint) -> bool>,
) -> bool {
    index
        .at_point(p)
        .any(|id| Some(id) != skip && prims[id as usize].contains(p, STRICT_EPS))
        || extra.is_some_and(|f| f(p))
}

/// Visit the sub-curves of the union boundary that lie inside the clip
/// disc, as `(owner, curve, t0, t1)`, with consecutive kept sub-curves of
/// one curve merged.
fn boundary_walk<F>(
    prims: &[Prim],
    index: &AngularIndex,
    pieces: &mut [Piece],
    clip: f64,
    extra: Option<&dyn Fn(PlanePoint) -> bool>,
    mut visit: F,
) where
    F: FnMut(&Curve, f64, f64),
{
    for piece in pieces.iter_mut() {
        let params = &mut piece.params;
        params.push(0.0);
        params.push(1.0);
        params.sort_by(f64::total_cmp);
        let mut run: Option<(f64, f64)> = None;
        for w in params.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            if t1 - t0 <= MIN_PIECE {
                continue;
            }
            let m = piece.curve.point_at(0.5 * (t0 + t1));
            let keep = m.norm() < clip && !strictly_covered(m, Some(piece.owner), prims, index, extra);
            match (keep, run) {
                (true, Some((a, _))) => run = Some((a, t1)),
                (true, None) => run = Some((t0, t1)),
                (false, Some((a, b))) => {
                    visit(&piece.curve, a, b);
                    run = None;
                }
                (false, None) => {}
            }
        }
        if let Some((a, b)) = run {
            visit(&piece.curve, a, b);
        }
    }
}

fn index_for(prims: &[Prim], reach: f64) -> AngularIndex {
    AngularIndex::build(prims.iter().map(|p| p.bounds(reach)))
}

/// Area of `(∪ prims ∪ extra) ∩ B(o, radius)`, where `extra` is an
/// additional membership oracle whose boundary is covered by the
/// primitives.
pub(crate) fn union_area(prims: &[Prim], radius: f64, extra: Option<&dyn Fn(PlanePoint) -> bool>) -> f64 {
    let reach = radius * 1.05 + 1.0;
    let kept: Vec<Prim> = prims
        .iter()
        .copied()
        .filter(|p| p.bounds(reach).rmin < radius)
        .collect();
    let index = index_for(&kept, reach);
    let (mut pieces, mut angles) = split_curves(&kept, &index, radius, reach);
    let mut area = 0.0;
    boundary_walk(&kept, &index, &mut pieces, radius, extra, |c, a, b| {
        area += c.green(a, b);
    });

    let on_window = |ang: f64| PlanePoint::from_polar(radius, ang);
    if angles.is_empty() {
        if strictly_covered(on_window(0.0), None, &kept, &index, extra) {
            area += PI * radius * radius;
        }
        return area;
    }
    angles.sort_by(f64::total_cmp);
    let n = angles.len();
    for k in 0..n {
        let a = angles[k];
        let b = if k + 1 < n { angles[k + 1] } else { angles[0] + TAU };
        if b - a <= MIN_PIECE {
            continue;
        }
        if strictly_covered(on_window(0.5 * (a + b)), None, &kept, &index, extra) {
            area += 0.5 * radius * radius * (b - a);
        }
    }
    area
}

/// Boundary of the union of primitives within distance `clip` of the
/// origin, as maximal sub-curves.
pub(crate) fn union_boundary(prims: &[Prim], clip: f64) -> Vec<Curve> {
    let reach = clip * 1.05 + 1.0;
    let index = index_for(prims, reach);
    let (mut pieces, _) = split_curves(prims, &index, clip, reach);
    let mut out = Vec::new();
    boundary_walk(prims, &index, &mut pieces, clip, None, |c, a, b| {
        out.push(c.sub(a, b));
    });
    out
}

/// Primitives whose union is the set of points within `beta` of the given
/// boundary curves.
pub(crate) fn offset_primitives(boundary: &[Curve], beta: f64) -> Vec<Prim> {
    let mut out = Vec::with_capacity(boundary.len() * 2);
    let mut vertices = Vec::with_capacity(boundary.len() * 2);
    for c in boundary {
        match *c {
            Curve::Segment { a, b } => {
                if a.distance(b) > 0.0 {
                    out.push(Prim::Strip { a, b, beta });
                }
            }
            Curve::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                let (start, sweep) = if sweep >= 0.0 {
                    (start, sweep)
                } else {
                    (start + sweep, -sweep)
                };
                if sweep > 0.0 {
                    out.push(Prim::Sector {
                        center,
                        radius,
                        start: normalize_angle(start),
                        sweep,
                        beta,
                    });
                }
            }
        }
        let (a, b) = c.endpoints();
        vertices.push(a);
        vertices.push(b);
    }
    vertices.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
    let mut unique: Vec<PlanePoint> = Vec::with_capacity(vertices.len());
    for v in vertices {
        // coincident discs would be counted twice by the boundary walk
        let dup = unique
            .iter()
            .rev()
            .take_while(|u| v.x - u.x <= 1e-9)
            .any(|u| u.distance(v) <= 1e-9);
        if !dup {
            unique.push(v);
        }
    }
    out.extend(unique.into_iter().map(|center| Prim::Disc {
        center,
        radius: beta,
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::shape::{shadow_of, StemDisc};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hit_or_miss(inside: impl Fn(PlanePoint) -> bool, radius: f64, n: usize, seed: u64) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0usize;
        for _ in 0..n {
            let p = PlanePoint::new(rng.random_range(-radius..radius), rng.random_range(-radius..radius));
            if p.norm() <= radius && inside(p) {
                hits += 1;
            }
        }
        let box_area = 4.0 * radius * radius;
        let f = hits as f64 / n as f64;
        (box_area * f, box_area * (f * (1.0 - f) / n as f64).sqrt())
    }

    #[test]
    fn two_overlapping_discs() {
        let prims = [
            Prim::Disc {
                center: PlanePoint::new(1.0, 0.0),
                radius: 1.0,
            },
            Prim::Disc {
                center: PlanePoint::new(2.0, 0.0),
                radius: 1.0,
            },
        ];
        // lens overlap of unit discs at distance 1
        let lens = 2.0 * (0.5f64).acos() - 0.5 * 3.0f64.sqrt();
        let expected = 2.0 * PI - lens;
        assert!((union_area(&prims, 10.0, None) - expected).abs() < 1e-10);
    }

    #[test]
    fn disc_clipped_by_window() {
        let prims = [Prim::Disc {
            center: PlanePoint::new(3.0, 0.0),
            radius: 1.0,
        }];
        // lens of circles (0,3) and (3,1)
        let (r1, r2, d): (f64, f64, f64) = (3.0, 1.0, 3.0);
        let a1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).acos();
        let a2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).acos();
        let lens = r1 * r1 * a1 + r2 * r2 * a2
            - 0.5 * ((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)).sqrt();
        assert!((union_area(&prims, 3.0, None) - lens).abs() < 1e-10);
    }

    #[test]
    fn single_shadow_area_matches_sampling() {
        let s = shadow_of(StemDisc::new(PlanePoint::new(5.0, 0.0), 0.5).unwrap()).unwrap();
        let a = union_area(&[Prim::Shadow(s)], 10.0, None);
        let (mc, se) = hit_or_miss(|p| s.contains(p), 10.0, 2_000_000, 1);
        assert!((a - mc).abs() < 4.0 * se, "{a} vs {mc} ± {se}");
        assert!((a - 7.88).abs() < 0.02, "{a}");
    }

    #[test]
    fn many_shadows_match_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for round in 0..5 {
            let mut shadows = Vec::new();
            while shadows.len() < 25 {
                let p = PlanePoint::from_polar(rng.random_range(0.5..10.5), rng.random_range(0.0..TAU));
                let rho = rng.random_range(0.05..0.3);
                if let Ok(d) = StemDisc::new(p, rho) {
                    shadows.push(shadow_of(d).unwrap());
                }
            }
            let beta = 0.15;
            let ident: Vec<Prim> = shadows.iter().map(|s| Prim::Shadow(*s)).collect();
            let dil: Vec<Prim> = shadows.iter().map(|s| Prim::Dilated { shadow: *s, beta }).collect();
            let a = union_area(&ident, 10.0, None);
            let (mc, se) = hit_or_miss(|p| shadows.iter().any(|s| s.contains(p)), 10.0, 400_000, round);
            assert!((a - mc).abs() < 4.0 * se + 1e-9, "ident {a} vs {mc} ± {se}");
            let a = union_area(&dil, 10.0, None);
            let (mc, se) = hit_or_miss(|p| shadows.iter().any(|s| s.distance(p) <= beta), 10.0, 400_000, round);
            assert!((a - mc).abs() < 4.0 * se + 1e-9, "dil {a} vs {mc} ± {se}");
        }
    }

    #[test]
    fn offset_of_single_segment_is_stadium() {
        let boundary = [Curve::Segment {
            a: PlanePoint::new(1.0, 1.0),
            b: PlanePoint::new(4.0, 1.0),
        }];
        let prims = offset_primitives(&boundary, 0.5);
        let a = union_area(&prims, 20.0, None);
        assert!((a - (3.0 + PI * 0.25)).abs() < 1e-10);
    }
}

//! Convex and near-convex building blocks whose unions make up occluded
//! regions and their morphological transforms.

use std::f64::consts::{PI, TAU};

use super::intervals::{angular_distance, normalize_angle};
use super::shape::{segment_distance, PlanePoint, ShadowSet};

/// A full circle or a full line; curves of a primitive lie on carriers.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Carrier {
    Circle { center: PlanePoint, radius: f64 },
    Line { point: PlanePoint, dir: PlanePoint },
}

/// A boundary piece of a primitive, oriented with the interior on its left.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Curve {
    /// Arc from `start` through a signed `sweep` (positive is counter-clockwise).
    Arc {
        center: PlanePoint,
        radius: f64,
        start: f64,
        sweep: f64,
    },
    Segment { a: PlanePoint, b: PlanePoint },
}

impl Curve {
    pub(crate) fn point_at(&self, t: f64) -> PlanePoint {
        match *self {
            Curve::Arc {
                center,
                radius,
                start,
                sweep,
            } => center + PlanePoint::from_polar(radius, start + t * sweep),
            Curve::Segment { a, b } => a + (b - a) * t,
        }
    }

    pub(crate) fn carrier(&self) -> Carrier {
        match *self {
            Curve::Arc { center, radius, .. } => Carrier::Circle { center, radius },
            Curve::Segment { a, b } => {
                let d = b - a;
                Carrier::Line {
                    point: a,
                    dir: d * (1.0 / d.norm()),
                }
            }
        }
    }

    /// Parameter of a point assumed to lie on the carrier; may fall
    /// outside `[0, 1]`.
    pub(crate) fn param_of(&self, p: PlanePoint) -> f64 {
        match *self {
            Curve::Arc {
                center,
                start,
                sweep,
                ..
            } => {
                let ang = (p - center).angle();
                let delta = if sweep >= 0.0 {
                    normalize_angle(ang - start)
                } else {
                    normalize_angle(start - ang)
                };
                let span = sweep.abs();
                if delta > span && TAU - delta < delta - span {
                    -(TAU - delta) / span
                } else {
                    delta / span
                }
            }
            Curve::Segment { a, b } => {
                let d = b - a;
                (p - a).dot(d) / d.norm_sq()
            }
        }
    }

    /// Line integral of `(x dy - y dx) / 2` over the parameter range `[t0, t1]`.
    pub(crate) fn green(&self, t0: f64, t1: f64) -> f64 {
        match *self {
            Curve::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                let a = start + t0 * sweep;
                let b = start + t1 * sweep;
                let (sa, ca) = a.sin_cos();
                let (sb, cb) = b.sin_cos();
                0.5 * (radius * radius * (b - a)
                    + radius * (center.x * (sb - sa) - center.y * (cb - ca)))
            }
            Curve::Segment { .. } => {
                let p = self.point_at(t0);
                let q = self.point_at(t1);
                0.5 * p.cross(q)
            }
        }
    }

    pub(crate) fn sub(&self, t0: f64, t1: f64) -> Curve {
        match *self {
            Curve::Arc {
                center,
                radius,
                start,
                sweep,
            } => Curve::Arc {
                center,
                radius,
                start: start + t0 * sweep,
                sweep: (t1 - t0) * sweep,
            },
            Curve::Segment { .. } => Curve::Segment {
                a: self.point_at(t0),
                b: self.point_at(t1),
            },
        }
    }

    pub(crate) fn endpoints(&self) -> (PlanePoint, PlanePoint) {
        (self.point_at(0.0), self.point_at(1.0))
    }
}

/// Intersection points of two carriers (tangencies are ignored).
pub(crate) fn carrier_intersections(a: &Carrier, b: &Carrier, out: &mut Vec<PlanePoint>) {
    match (*a, *b) {
        (
            Carrier::Circle {
                center: c1,
                radius: r1,
            },
            Carrier::Circle {
                center: c2,
                radius: r2,
            },
        ) => {
            let v = c2 - c1;
            let d = v.norm();
            if d < 1e-14 || d > r1 + r2 || d < (r1 - r2).abs() {
                return;
            }
            let e = v * (1.0 / d);
            let x = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
            let h2 = r1 * r1 - x * x;
            if h2 <= 0.0 {
                return;
            }
            let h = h2.sqrt();
            let base = c1 + e * x;
            out.push(base + e.perp() * h);
            out.push(base - e.perp() * h);
        }
        (Carrier::Circle { center, radius }, Carrier::Line { point, dir })
        | (Carrier::Line { point, dir }, Carrier::Circle { center, radius }) => {
            let w = point - center;
            let b = w.dot(dir);
            let c = w.norm_sq() - radius * radius;
            let disc = b * b - c;
            if disc <= 0.0 {
                return;
            }
            let s = disc.sqrt();
            out.push(point + dir * (-b + s));
            out.push(point + dir * (-b - s));
        }
        (Carrier::Line { point: p, dir: u }, Carrier::Line { point: q, dir: v }) => {
            let den = u.cross(v);
            if den.abs() < 1e-14 {
                return;
            }
            let t = (q - p).cross(v) / den;
            out.push(p + u * t);
        }
    }
}

/// Angles, about `center`, where the circle `(center, radius)` crosses
/// `carrier`.
pub(crate) fn probe_crossings(carrier: &Carrier, center: PlanePoint, radius: f64, out: &mut Vec<f64>) {
    let mut pts = Vec::with_capacity(2);
    carrier_intersections(&Carrier::Circle { center, radius }, carrier, &mut pts);
    out.extend(pts.into_iter().map(|p| (p - center).angle()));
}

/// Arcs of the circle `(center, radius)` inside a region, given every
/// angle where the circle may cross the region boundary. Pushes
/// `(start, end)` pairs with `end` possibly beyond `2π`.
pub(crate) fn arcs_between_crossings<F>(
    center: PlanePoint,
    radius: f64,
    crossings: &mut [f64],
    inside: F,
    out: &mut Vec<(f64, f64)>,
) where
    F: Fn(PlanePoint) -> bool,
{
    if crossings.is_empty() {
        if inside(center + PlanePoint::from_polar(radius, 0.0)) {
            out.push((0.0, TAU));
        }
        return;
    }
    crossings.sort_by(f64::total_cmp);
    let n = crossings.len();
    for k in 0..n {
        let a = crossings[k];
        let b = if k + 1 < n {
            crossings[k + 1]
        } else {
            crossings[0] + TAU
        };
        if b - a <= 0.0 {
            continue;
        }
        let mid = 0.5 * (a + b);
        if inside(center + PlanePoint::from_polar(radius, mid)) {
            out.push((a, b));
        }
    }
}

/// Conservative polar footprint: every point of the primitive has norm in
/// `[rmin, rmax]` and polar angle within `half` of `mid`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PolarBounds {
    pub rmin: f64,
    pub rmax: f64,
    pub mid: f64,
    pub half: f64,
}

impl PolarBounds {
    fn full(rmin: f64, rmax: f64) -> Self {
        Self {
            rmin,
            rmax,
            mid: 0.0,
            half: PI,
        }
    }

    fn of_disc(center: PlanePoint, radius: f64) -> Self {
        let d = center.norm();
        if d <= radius {
            return Self::full(0.0, d + radius);
        }
        Self {
            rmin: d - radius,
            rmax: d + radius,
            mid: center.angle(),
            half: (radius / d).asin(),
        }
    }

    pub(crate) fn is_full(&self) -> bool {
        self.half >= PI
    }

    pub(crate) fn contains_radius(&self, r: f64) -> bool {
        r >= self.rmin && r <= self.rmax
    }

    pub(crate) fn overlaps(&self, o: &PolarBounds) -> bool {
        if self.rmin > o.rmax || o.rmin > self.rmax {
            return false;
        }
        self.is_full() || o.is_full() || angular_distance(self.mid, o.mid) <= self.half + o.half
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Prim {
    Shadow(ShadowSet),
    Dilated {
        shadow: ShadowSet,
        beta: f64,
    },
    /// Points within `beta` of the segment `[a, b]` whose projection falls
    /// inside the segment.
    Strip {
        a: PlanePoint,
        b: PlanePoint,
        beta: f64,
    },
    /// Annular sector of radial half-width `beta` around a counter-clockwise arc.
    Sector {
        center: PlanePoint,
        radius: f64,
        start: f64,
        sweep: f64,
        beta: f64,
    },
    Disc {
        center: PlanePoint,
        radius: f64,
    },
}

impl Prim {
    /// Closed membership of the region shrunk by `eps` (`eps = 0` is the
    /// closed region itself).
    pub(crate) fn contains(&self, p: PlanePoint, eps: f64) -> bool {
        match *self {
            Prim::Shadow(s) => {
                if eps == 0.0 {
                    s.contains(p)
                } else {
                    s.contains_strictly(p, eps)
                }
            }
            Prim::Dilated { shadow, beta } => {
                if eps == 0.0 {
                    shadow.distance(p) <= beta
                } else {
                    shadow.distance(p) < beta - eps
                }
            }
            Prim::Strip { a, b, beta } => {
                let d = b - a;
                let len = d.norm();
                let u = d * (1.0 / len);
                let w = p - a;
                let t = w.dot(u);
                let off = w.cross(u).abs();
                if eps == 0.0 {
                    t >= 0.0 && t <= len && off <= beta
                } else {
                    t > eps && t < len - eps && off < beta - eps
                }
            }
            Prim::Sector {
                center,
                radius,
                start,
                sweep,
                beta,
            } => {
                let q = p - center;
                let s = q.norm();
                let inner = (radius - beta).max(0.0);
                if eps == 0.0 {
                    if s > radius + beta || s < inner {
                        return false;
                    }
                    if s == 0.0 {
                        return true;
                    }
                    normalize_angle(q.angle() - start) <= sweep
                } else {
                    if s >= radius + beta - eps || s <= inner + eps {
                        return false;
                    }
                    let delta = normalize_angle(q.angle() - start);
                    delta * s > eps && (sweep - delta) * s > eps
                }
            }
            Prim::Disc { center, radius } => {
                if eps == 0.0 {
                    p.distance(center) <= radius
                } else {
                    p.distance(center) < radius - eps
                }
            }
        }
    }

    pub(crate) fn carriers(&self, out: &mut Vec<Carrier>) {
        match *self {
            Prim::Shadow(s) => {
                let (u1, u2) = s.ray_directions();
                out.push(Carrier::Circle {
                    center: s.disc().center(),
                    radius: s.disc().radius(),
                });
                out.push(Carrier::Line {
                    point: PlanePoint::ORIGIN,
                    dir: u1,
                });
                out.push(Carrier::Line {
                    point: PlanePoint::ORIGIN,
                    dir: u2,
                });
            }
            Prim::Dilated { shadow, beta } => {
                let (u1, u2) = shadow.ray_directions();
                let (t1, t2) = shadow.tangent_points();
                let (n1, n2) = shadow.tangent_normals();
                out.push(Carrier::Circle {
                    center: shadow.disc().center(),
                    radius: shadow.disc().radius() + beta,
                });
                out.push(Carrier::Line {
                    point: t1 + n1 * beta,
                    dir: u1,
                });
                out.push(Carrier::Line {
                    point: t2 + n2 * beta,
                    dir: u2,
                });
            }
            Prim::Strip { a, b, beta } => {
                let d = b - a;
                let u = d * (1.0 / d.norm());
                let n = u.perp();
                out.push(Carrier::Line {
                    point: a + n * beta,
                    dir: u,
                });
                out.push(Carrier::Line {
                    point: a - n * beta,
                    dir: u,
                });
                out.push(Carrier::Line { point: a, dir: n });
                out.push(Carrier::Line { point: b, dir: n });
            }
            Prim::Sector {
                center,
                radius,
                start,
                sweep,
                beta,
            } => {
                out.push(Carrier::Circle {
                    center,
                    radius: radius + beta,
                });
                if radius > beta {
                    out.push(Carrier::Circle {
                        center,
                        radius: radius - beta,
                    });
                }
                out.push(Carrier::Line {
                    point: center,
                    dir: PlanePoint::from_polar(1.0, start),
                });
                out.push(Carrier::Line {
                    point: center,
                    dir: PlanePoint::from_polar(1.0, start + sweep),
                });
            }
            Prim::Disc { center, radius } => out.push(Carrier::Circle { center, radius }),
        }
    }

    /// Boundary curves, counter-clockwise. Unbounded primitives are cut off
    /// where their rays reach distance `reach` from the origin, so only the
    /// part inside that disc is faithful.
    pub(crate) fn curves(&self, reach: f64, out: &mut Vec<Curve>) {
        match *self {
            Prim::Shadow(s) => {
                let (u1, u2) = s.ray_directions();
                let (t1, t2) = s.tangent_points();
                let (start, sweep) = s.near_arc();
                if reach > s.tangent_length() {
                    out.push(Curve::Segment { a: u1 * reach, b: t1 });
                }
                out.push(Curve::Arc {
                    center: s.disc().center(),
                    radius: s.disc().radius(),
                    start,
                    sweep,
                });
                if reach > s.tangent_length() {
                    out.push(Curve::Segment { a: t2, b: u2 * reach });
                }
            }
            Prim::Dilated { shadow, beta } => {
                let (u1, u2) = shadow.ray_directions();
                let (t1, t2) = shadow.tangent_points();
                let (n1, n2) = shadow.tangent_normals();
                let (start, sweep) = shadow.near_arc();
                let s1 = t1 + n1 * beta;
                let s2 = t2 + n2 * beta;
                let run = (reach * reach - beta * beta).max(0.0).sqrt() - shadow.tangent_length();
                if run > 0.0 {
                    out.push(Curve::Segment {
                        a: s1 + u1 * run,
                        b: s1,
                    });
                }
                out.push(Curve::Arc {
                    center: shadow.disc().center(),
                    radius: shadow.disc().radius() + beta,
                    start,
                    sweep,
                });
                if run > 0.0 {
                    out.push(Curve::Segment {
                        a: s2,
                        b: s2 + u2 * run,
                    });
                }
            }
            Prim::Strip { a, b, beta } => {
                let d = b - a;
                let n = (d * (1.0 / d.norm())).perp() * beta;
                let c = [a - n, b - n, b + n, a + n];
                for k in 0..4 {
                    out.push(Curve::Segment {
                        a: c[k],
                        b: c[(k + 1) % 4],
                    });
                }
            }
            Prim::Sector {
                center,
                radius,
                start,
                sweep,
                beta,
            } => {
                let end = start + sweep;
                let outer = radius + beta;
                let inner = radius - beta;
                out.push(Curve::Arc {
                    center,
                    radius: outer,
                    start,
                    sweep,
                });
                if inner > 0.0 {
                    out.push(Curve::Segment {
                        a: center + PlanePoint::from_polar(outer, end),
                        b: center + PlanePoint::from_polar(inner, end),
                    });
                    out.push(Curve::Arc {
                        center,
                        radius: inner,
                        start: end,
                        sweep: -sweep,
                    });
                    out.push(Curve::Segment {
                        a: center + PlanePoint::from_polar(inner, start),
                        b: center + PlanePoint::from_polar(outer, start),
                    });
                } else {
                    out.push(Curve::Segment {
                        a: center + PlanePoint::from_polar(outer, end),
                        b: center,
                    });
                    out.push(Curve::Segment {
                        a: center,
                        b: center + PlanePoint::from_polar(outer, start),
                    });
                }
            }
            Prim::Disc { center, radius } => out.push(Curve::Arc {
                center,
                radius,
                start: 0.0,
                sweep: TAU,
            }),
        }
    }

    pub(crate) fn bounds(&self, reach: f64) -> PolarBounds {
        match *self {
            Prim::Shadow(s) => PolarBounds {
                rmin: s.near_distance(),
                rmax: reach,
                mid: s.central_angle(),
                half: s.half_angle(),
            },
            Prim::Dilated { shadow, beta } => {
                let near = shadow.near_distance();
                if beta >= near {
                    return PolarBounds::full(0.0, reach);
                }
                PolarBounds {
                    rmin: near - beta,
                    rmax: reach,
                    mid: shadow.central_angle(),
                    half: (shadow.half_angle() + (beta / near).asin()).min(PI),
                }
            }
            Prim::Strip { a, b, beta } => {
                let dist0 = segment_distance(PlanePoint::ORIGIN, a, b);
                let rmax = a.norm().max(b.norm()) + beta;
                if dist0 <= beta {
                    return PolarBounds::full(0.0, rmax);
                }
                let aa = a.angle();
                let diff = normalize_angle(b.angle() - aa);
                let signed = if diff > PI { diff - TAU } else { diff };
                PolarBounds {
                    rmin: dist0 - beta,
                    rmax,
                    mid: normalize_angle(aa + 0.5 * signed),
                    half: (0.5 * signed.abs() + (beta / dist0).asin()).min(PI),
                }
            }
            Prim::Sector {
                center,
                radius,
                beta,
                ..
            } => PolarBounds::of_disc(center, radius + beta),
            Prim::Disc { center, radius } => PolarBounds::of_disc(center, radius),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::shape::{shadow_of, StemDisc};

    fn shadow() -> ShadowSet {
        shadow_of(StemDisc::new(PlanePoint::new(5.0, 0.0), 0.5).unwrap()).unwrap()
    }

    fn closed_loop_area(prim: &Prim) -> f64 {
        let mut cs = Vec::new();
        prim.curves(50.0, &mut cs);
        cs.iter().map(|c| c.green(0.0, 1.0)).sum()
    }

    #[test]
    fn curves_form_closed_loops() {
        let prims = [
            Prim::Strip {
                a: PlanePoint::new(1.0, 2.0),
                b: PlanePoint::new(4.0, -1.0),
                beta: 0.3,
            },
            Prim::Sector {
                center: PlanePoint::new(3.0, 3.0),
                radius: 0.5,
                start: 4.0,
                sweep: 1.3,
                beta: 0.2,
            },
            Prim::Sector {
                center: PlanePoint::new(3.0, 3.0),
                radius: 0.1,
                start: 4.0,
                sweep: 1.3,
                beta: 0.2,
            },
            Prim::Shadow(shadow()),
            Prim::Dilated {
                shadow: shadow(),
                beta: 0.2,
            },
        ];
        for p in &prims {
            let mut cs = Vec::new();
            p.curves(50.0, &mut cs);
            let n = cs.len();
            for k in 0..n {
                let end = cs[k].point_at(1.0);
                let next = cs[(k + 1) % n].point_at(0.0);
                let is_open_ray = matches!(p, Prim::Shadow(_) | Prim::Dilated { .. }) && k == n - 1;
                if !is_open_ray {
                    assert!(end.distance(next) < 1e-9, "{p:?} gap after curve {k}");
                }
            }
        }
    }

    #[test]
    fn green_areas_of_bounded_primitives() {
        let strip = Prim::Strip {
            a: PlanePoint::new(1.0, 2.0),
            b: PlanePoint::new(4.0, -2.0),
            beta: 0.3,
        };
        assert!((closed_loop_area(&strip) - 5.0 * 0.6).abs() < 1e-12);
        let sector = Prim::Sector {
            center: PlanePoint::new(3.0, 3.0),
            radius: 0.5,
            start: 4.0,
            sweep: 1.3,
            beta: 0.2,
        };
        let expected = 0.5 * 1.3 * (0.7f64.powi(2) - 0.3f64.powi(2));
        assert!((closed_loop_area(&sector) - expected).abs() < 1e-12);
        let pie = Prim::Sector {
            center: PlanePoint::new(3.0, 3.0),
            radius: 0.1,
            start: 4.0,
            sweep: 1.3,
            beta: 0.2,
        };
        assert!((closed_loop_area(&pie) - 0.5 * 1.3 * 0.09).abs() < 1e-12);
        let disc = Prim::Disc {
            center: PlanePoint::new(-2.0, 1.0),
            radius: 0.4,
        };
        assert!((closed_loop_area(&disc) - PI * 0.16).abs() < 1e-12);
    }

    #[test]
    fn arc_param_round_trip() {
        let c = Curve::Arc {
            center: PlanePoint::new(1.0, 1.0),
            radius: 2.0,
            start: 5.5,
            sweep: 1.5,
        };
        for t in [0.0, 0.25, 0.5, 0.999] {
            assert!((c.param_of(c.point_at(t)) - t).abs() < 1e-12);
        }
        let cw = Curve::Arc {
            center: PlanePoint::new(1.0, 1.0),
            radius: 2.0,
            start: 0.5,
            sweep: -1.5,
        };
        for t in [0.0, 0.3, 0.7, 1.0] {
            assert!((cw.param_of(cw.point_at(t)) - t).abs() < 1e-12);
        }
        assert!(cw.param_of(cw.point_at(-0.01)) < 0.0);
    }

    #[test]
    fn bounds_cover_members() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let prims = [
            Prim::Dilated {
                shadow: shadow(),
                beta: 0.4,
            },
            Prim::Strip {
                a: PlanePoint::new(1.0, 2.0),
                b: PlanePoint::new(-4.0, 1.0),
                beta: 0.3,
            },
            Prim::Sector {
                center: PlanePoint::new(-1.0, 0.5),
                radius: 0.5,
                start: 4.0,
                sweep: 1.3,
                beta: 0.2,
            },
        ];
        for prim in &prims {
            let b = prim.bounds(20.0);
            for _ in 0..20000 {
                let p = PlanePoint::new(rng.random_range(-12.0..12.0), rng.random_range(-12.0..12.0));
                if p.norm() < 20.0 && prim.contains(p, 0.0) {
                    assert!(b.contains_radius(p.norm()));
                    assert!(b.is_full() || angular_distance(p.angle(), b.mid) <= b.half + 1e-12);
                }
            }
        }
    }
}

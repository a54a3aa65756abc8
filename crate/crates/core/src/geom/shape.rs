use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::intervals::normalize_angle;
use super::GeomError;

/// A point of the plane, in meters, with the plot centre at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub const ORIGIN: PlanePoint = PlanePoint { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(radius * c, radius * s)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Polar angle in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        normalize_angle(self.y.atan2(self.x))
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn distance(self, o: Self) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Rotate a quarter turn counter-clockwise.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }
}

impl Add for PlanePoint {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for PlanePoint {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for PlanePoint {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

/// Distance from `p` to the segment `[a, b]`.
pub fn segment_distance(p: PlanePoint, a: PlanePoint, b: PlanePoint) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Distance from `p` to the ray starting at `start` with unit direction `dir`.
pub fn ray_distance(p: PlanePoint, start: PlanePoint, dir: PlanePoint) -> f64 {
    let v = p - start;
    if v.dot(dir) <= 0.0 {
        v.norm()
    } else {
        v.cross(dir).abs()
    }
}

/// Cross-section of a stem at breast height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StemDisc {
    center: PlanePoint,
    radius: f64,
}

impl StemDisc {
    /// Fails if the radius is not positive or the disc reaches the origin.
    pub fn new(center: PlanePoint, radius: f64) -> Result<Self, GeomError> {
        if !center.is_finite() || !radius.is_finite() {
            return Err(GeomError::NonFinite);
        }
        if radius <= 0.0 {
            return Err(GeomError::NonPositiveRadius(radius));
        }
        if center.norm() <= radius {
            return Err(GeomError::OriginCovered {
                x: center.x,
                y: center.y,
                radius,
            });
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> PlanePoint {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// The region hidden from the origin by one stem disc: every point `p`
/// whose sight line `[origin, p]` meets the closed disc.
///
/// The set is convex. Its boundary is the near arc of the disc (the part
/// facing the origin) continued by two radial rays leaving the tangent
/// points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowSet {
    disc: StemDisc,
    center_distance: f64,
    central_angle: f64,
    half_angle: f64,
    near_distance: f64,
    tangent_length: f64,
}

/// Build the shadow cast by `disc`.
pub fn shadow_of(disc: StemDisc) -> Result<ShadowSet, GeomError> {
    // re-validate: StemDisc is Copy + Deserialize, so invariants may have been bypassed
    let disc = StemDisc::new(disc.center, disc.radius)?;
    let r = disc.center.norm();
    let rho = disc.radius;
    Ok(ShadowSet {
        disc,
        center_distance: r,
        central_angle: disc.center.angle(),
        half_angle: (rho / r).asin(),
        near_distance: r - rho,
        tangent_length: ((r - rho) * (r + rho)).sqrt(),
    })
}

impl ShadowSet {
    pub fn disc(&self) -> &StemDisc {
        &self.disc
    }

    /// Direction of the disc centre, in `[0, 2π)`.
    pub fn central_angle(&self) -> f64 {
        self.central_angle
    }

    /// Half the opening angle of the tangent cone.
    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    /// Distance from the origin to the nearest point of the disc.
    pub fn near_distance(&self) -> f64 {
        self.near_distance
    }

    pub fn center_distance(&self) -> f64 {
        self.center_distance
    }

    /// Distance from the origin to either tangent point.
    pub fn tangent_length(&self) -> f64 {
        self.tangent_length
    }

    /// Unit directions of the two boundary rays, counter-clockwise one first.
    pub(crate) fn ray_directions(&self) -> (PlanePoint, PlanePoint) {
        (
            PlanePoint::from_polar(1.0, self.central_angle + self.half_angle),
            PlanePoint::from_polar(1.0, self.central_angle - self.half_angle),
        )
    }

    /// Tangent points, counter-clockwise one first.
    pub(crate) fn tangent_points(&self) -> (PlanePoint, PlanePoint) {
        let (u_ccw, u_cw) = self.ray_directions();
        (u_ccw * self.tangent_length, u_cw * self.tangent_length)
    }

    /// Outward unit normals of the boundary at the tangent points.
    pub(crate) fn tangent_normals(&self) -> (PlanePoint, PlanePoint) {
        let (u_ccw, u_cw) = self.ray_directions();
        (u_ccw.perp(), u_cw.perp() * -1.0)
    }

    /// Start angle (about the disc centre) and sweep of the near arc, from
    /// the counter-clockwise tangent point to the clockwise one.
    pub(crate) fn near_arc(&self) -> (f64, f64) {
        (
            self.central_angle + self.half_angle + FRAC_PI_2,
            std::f64::consts::PI - 2.0 * self.half_angle,
        )
    }

    /// Canonical membership: the segment from the origin to `p` meets the
    /// closed disc.
    pub fn contains(&self, p: PlanePoint) -> bool {
        segment_distance(self.disc.center, PlanePoint::ORIGIN, p) <= self.disc.radius
    }

    /// Like [`contains`](Self::contains) but excluding a band of width
    /// `eps` along the boundary.
    pub(crate) fn contains_strictly(&self, p: PlanePoint, eps: f64) -> bool {
        segment_distance(self.disc.center, PlanePoint::ORIGIN, p) < self.disc.radius - eps
    }

    /// Euclidean distance from `p` to the shadow (zero inside).
    pub fn distance(&self, p: PlanePoint) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        let to_disc = (p.distance(self.disc.center) - self.disc.radius).max(0.0);
        let (t_ccw, t_cw) = self.tangent_points();
        let (u_ccw, u_cw) = self.ray_directions();
        to_disc
            .min(ray_distance(p, t_ccw, u_ccw))
            .min(ray_distance(p, t_cw, u_cw))
    }
}

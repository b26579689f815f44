//! Tolerance-aware Euclidean primitives.
//!
//! Everything here is a pure function of its arguments. Predicates that need a
//! threshold take a [`Tolerance`] explicitly so that results do not depend on
//! hidden global state.

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

pub type Point = Point3<f64>;
pub type Vec3 = Vector3<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("unit spheres are separated: centers {distance} apart")]
    Separated { distance: f64 },
    #[error("unit spheres coincide: centers {distance} apart")]
    Coincident { distance: f64 },
    #[error("degenerate triangle (collinear or coincident vertices)")]
    Degenerate,
    #[error("line through two coincident points")]
    DegenerateLine,
    #[error("plane normal has zero length")]
    ZeroNormal,
    #[error("tolerances must be finite and strictly positive (geom_eps={geom_eps}, rank_rel_eps={rank_rel_eps})")]
    InvalidTolerance { geom_eps: f64, rank_rel_eps: f64 },
}

/// Numerical thresholds shared by every module.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Absolute threshold for lengths, coincidence and coplanarity.
    pub geom_eps: f64,
    /// Singular values below `rank_rel_eps * sigma_max` count as zero.
    pub rank_rel_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            geom_eps: 1e-9,
            rank_rel_eps: 1e-7,
        }
    }
}

impl Tolerance {
    pub fn new(geom_eps: f64, rank_rel_eps: f64) -> Result<Self, GeomError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(geom_eps) || !ok(rank_rel_eps) {
            return Err(GeomError::InvalidTolerance {
                geom_eps,
                rank_rel_eps,
            });
        }
        Ok(Self {
            geom_eps,
            rank_rel_eps,
        })
    }

    pub fn with_geom_eps(self, geom_eps: f64) -> Result<Self, GeomError> {
        Self::new(geom_eps, self.rank_rel_eps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane {
    pub base: Point,
    normal: Vec3,
}

impl Plane {
    pub fn new(base: Point, normal: Vec3) -> Result<Self, GeomError> {
        let norm = normal.norm();
        if norm.is_nan() || norm <= 0.0 || !norm.is_finite() {
            return Err(GeomError::ZeroNormal);
        }
        Ok(Self {
            base,
            normal: normal / norm,
        })
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    pub fn signed_distance(&self, p: &Point) -> f64 {
        (p - self.base).dot(&self.normal)
    }

    pub fn project(&self, p: &Point) -> Point {
        p - self.normal * self.signed_distance(p)
    }

    /// Orthonormal in-plane directions from [`orthonormal_basis`].
    pub fn basis(&self) -> (Vec3, Vec3) {
        orthonormal_basis(&self.normal)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle3 {
    pub center: Point,
    pub radius: f64,
    axis: Vec3,
}

impl Circle3 {
    pub fn new(center: Point, radius: f64, axis: Vec3) -> Result<Self, GeomError> {
        let norm = axis.norm();
        if norm.is_nan() || norm <= 0.0 || !norm.is_finite() {
            return Err(GeomError::ZeroNormal);
        }
        Ok(Self {
            center,
            radius: radius.max(0.0),
            axis: axis / norm,
        })
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    /// Point at parameter angle `t` in the deterministic basis of the circle plane.
    pub fn point_at(&self, t: f64) -> Point {
        let (e1, e2) = orthonormal_basis(&self.axis);
        self.center + (e1 * t.cos() + e2 * t.sin()) * self.radius
    }
}

/// Deterministic orthonormal pair spanning the plane orthogonal to `axis`:
/// `axis × x̂`, falling back to `axis × ŷ` when `axis` is nearly parallel to x̂.
pub fn orthonormal_basis(axis: &Vec3) -> (Vec3, Vec3) {
    let a = axis.normalize();
    let mut e1 = a.cross(&Vec3::x());
    if e1.norm() < 1e-6 {
        e1 = a.cross(&Vec3::y());
    }
    let e1 = e1.normalize();
    let e2 = a.cross(&e1);
    (e1, e2)
}

/// The circle of points at distance 1 from both `u` and `w`.
pub fn unit_ball_intersection(u: &Point, w: &Point, tol: &Tolerance) -> Result<Circle3, GeomError> {
    let d = w - u;
    let dist = d.norm();
    if dist > 2.0 + tol.geom_eps {
        return Err(GeomError::Separated { distance: dist });
    }
    if dist <= tol.geom_eps {
        return Err(GeomError::Coincident { distance: dist });
    }
    let radius = (1.0 - dist * dist / 4.0).max(0.0).sqrt();
    Circle3::new(nalgebra::center(u, w), radius, d)
}

fn triangle_frame(a: &Point, b: &Point, c: &Point, tol: &Tolerance) -> Result<(Vec3, Vec3, Vec3), GeomError> {
    let u = b - a;
    let v = c - a;
    let w = u.cross(&v);
    let shortest = u.norm().min(v.norm()).min((c - b).norm());
    if shortest <= tol.geom_eps || w.norm() <= tol.geom_eps {
        return Err(GeomError::Degenerate);
    }
    Ok((u, v, w))
}

/// Radius of the circle through three points: `|ab|·|bc|·|ca| / (4·area)`.
pub fn circumradius(a: &Point, b: &Point, c: &Point, tol: &Tolerance) -> Result<f64, GeomError> {
    let (u, v, w) = triangle_frame(a, b, c, tol)?;
    let area2 = w.norm();
    Ok(u.norm() * v.norm() * (c - b).norm() / (2.0 * area2))
}

pub fn circumcenter(a: &Point, b: &Point, c: &Point, tol: &Tolerance) -> Result<Point, GeomError> {
    let (u, v, w) = triangle_frame(a, b, c, tol)?;
    let num = w.cross(&u) * v.norm_squared() + v.cross(&w) * u.norm_squared();
    Ok(a + num / (2.0 * w.norm_squared()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Positive => 1.0,
            Side::Negative => -1.0,
        }
    }
}

/// A point at distance exactly 1 from `a`, `b` and `c`, on the requested side of
/// their plane (positive = direction of `(b-a)×(c-a)`). `None` when the
/// circumradius is at least 1.
pub fn apex_at_unit_distance(
    a: &Point,
    b: &Point,
    c: &Point,
    side: Side,
    tol: &Tolerance,
) -> Result<Option<Point>, GeomError> {
    let r = circumradius(a, b, c, tol)?;
    if r >= 1.0 {
        return Ok(None);
    }
    let center = circumcenter(a, b, c, tol)?;
    let normal = (b - a).cross(&(c - a)).normalize();
    let height = (1.0 - r * r).sqrt();
    Ok(Some(center + normal * (side.sign() * height)))
}

/// Reflection of `p` across the line through `a` and `b` (rotation by π about it).
pub fn reflect_across_line(p: &Point, a: &Point, b: &Point, tol: &Tolerance) -> Result<Point, GeomError> {
    let d = b - a;
    let len2 = d.norm_squared();
    if len2.sqrt() <= tol.geom_eps {
        return Err(GeomError::DegenerateLine);
    }
    let foot = a + d * ((p - a).dot(&d) / len2);
    Ok(Point::from(foot.coords * 2.0 - p.coords))
}

pub fn distance_to_plane(p: &Point, h: &Plane) -> f64 {
    h.signed_distance(p).abs()
}

/// The point of `c` closest (in unsigned distance) to `h`.
///
/// When the circle meets the plane, the intersection point with the smaller
/// parameter angle in `[0, 2π)` is returned. When every point of the circle is
/// equidistant, the point at parameter angle 0 is returned.
pub fn point_on_circle_nearest_plane(c: &Circle3, h: &Plane) -> Point {
    if c.radius == 0.0 {
        return c.center;
    }
    let (e1, e2) = orthonormal_basis(&c.axis);
    let n = h.normal();
    let s_c = h.signed_distance(&c.center);
    let alpha = e1.dot(&n);
    let beta = e2.dot(&n);
    let amp = c.radius * alpha.hypot(beta);
    if amp <= 1e-14 {
        return c.point_at(0.0);
    }
    let phi = beta.atan2(alpha);
    let t = if s_c.abs() <= amp {
        let delta = (-s_c / amp).clamp(-1.0, 1.0).acos();
        let t1 = (phi + delta).rem_euclid(TAU);
        let t2 = (phi - delta).rem_euclid(TAU);
        t1.min(t2)
    } else if s_c > 0.0 {
        phi + std::f64::consts::PI
    } else {
        phi
    };
    c.point_at(t)
}

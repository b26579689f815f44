//! Integral curves: closed polygonal curves with unit edges, possibly with
//! several components.

use crate::geom::{unit_ball_intersection, Plane, Point, Tolerance, Vec3};
use nalgebra::{Matrix3, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, UnitSphere};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("component {component}, edge {edge}: length {length} is not a positive integer")]
    NonIntegerEdge {
        component: usize,
        edge: usize,
        length: f64,
    },
    #[error("component {component}, edge {edge}: length {length} is not 1")]
    NonUnitEdge {
        component: usize,
        edge: usize,
        length: f64,
    },
    #[error("component {component} has {len} edges; at least 3 are required")]
    ComponentTooShort { component: usize, len: usize },
    #[error("component {component} has a non-finite coordinate")]
    NonFinite { component: usize },
}

/// A closed curve made of unit segments. Each component is a cyclic vertex list.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IntegralCurve {
    components: Vec<Vec<Point>>,
}

impl IntegralCurve {
    pub fn new(components: Vec<Vec<Point>>, tol: &Tolerance) -> Result<Self, CurveError> {
        for (ci, comp) in components.iter().enumerate() {
            validate_component(ci, comp, tol)?;
        }
        Ok(Self { components })
    }

    /// No unit-edge check; the validator reports bad input instead.
    pub(crate) fn unchecked(components: Vec<Vec<Point>>) -> Self {
        Self { components }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Unit-subdivides a curve whose edges have positive integer lengths.
    pub fn from_integer_curve(raw: &[Vec<Point>], tol: &Tolerance) -> Result<Self, CurveError> {
        let mut components = Vec::with_capacity(raw.len());
        for (ci, comp) in raw.iter().enumerate() {
            if comp.iter().any(|p| !p.coords.iter().all(|x| x.is_finite())) {
                return Err(CurveError::NonFinite { component: ci });
            }
            let mut out = Vec::new();
            for (ei, a) in comp.iter().enumerate() {
                let b = &comp[(ei + 1) % comp.len()];
                let length = (b - a).norm();
                let steps = length.round();
                if steps < 1.0 || (length - steps).abs() > tol.geom_eps {
                    return Err(CurveError::NonIntegerEdge {
                        component: ci,
                        edge: ei,
                        length,
                    });
                }
                let steps = steps as usize;
                out.push(*a);
                for s in 1..steps {
                    out.push(a + (b - a) * (s as f64 / steps as f64));
                }
            }
            if out.len() < 3 {
                return Err(CurveError::ComponentTooShort {
                    component: ci,
                    len: out.len(),
                });
            }
            components.push(out);
        }
        Self::new(components, tol)
    }

    pub fn components(&self) -> &[Vec<Point>] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Vec<Point>> {
        self.components
    }

    /// Total number of unit edges, `|γ|`.
    pub fn len(&self) -> usize {
        self.components.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Oriented unit segments of every component, in cyclic order.
    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.components.iter().flat_map(|c| cyclic_edges(c))
    }
}

pub(crate) fn cyclic_edges(c: &[Point]) -> impl Iterator<Item = (Point, Point)> + '_ {
    (0..c.len()).map(move |i| (c[i], c[(i + 1) % c.len()]))
}

fn validate_component(ci: usize, comp: &[Point], tol: &Tolerance) -> Result<(), CurveError> {
    if comp.len() < 3 {
        return Err(CurveError::ComponentTooShort {
            component: ci,
            len: comp.len(),
        });
    }
    if comp.iter().any(|p| !p.coords.iter().all(|x| x.is_finite())) {
        return Err(CurveError::NonFinite { component: ci });
    }
    for (ei, (a, b)) in cyclic_edges(comp).enumerate() {
        let length = (b - a).norm();
        if (length - 1.0).abs() > tol.geom_eps {
            return Err(CurveError::NonUnitEdge {
                component: ci,
                edge: ei,
                length,
            });
        }
    }
    Ok(())
}

/// Four points with unit consecutive distances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rhombus {
    pub vertices: [Point; 4],
}

impl Rhombus {
    pub fn new(a: Point, b: Point, c: Point, d: Point) -> Self {
        Self {
            vertices: [a, b, c, d],
        }
    }

    pub fn edges(&self) -> [(Point, Point); 4] {
        let v = &self.vertices;
        [(v[0], v[1]), (v[1], v[2]), (v[2], v[3]), (v[3], v[0])]
    }

    /// Largest deviation of a side length from 1.
    pub fn side_error(&self) -> f64 {
        self.edges()
            .iter()
            .map(|(a, b)| ((b - a).norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Unsigned distances of a vertex sequence to a plane.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightSequence(pub Vec<f64>);

impl HeightSequence {
    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }
}

pub fn height_profile(path: &[Point], h: &Plane) -> HeightSequence {
    HeightSequence(path.iter().map(|p| h.signed_distance(p).abs()).collect())
}

/// Pair of vertex indices at maximal distance, first in lexicographic order.
/// Distances equal up to rounding (1e-12 on squares) count as ties.
pub fn farthest_vertex_pair(c: &[Point]) -> (usize, usize) {
    let mut best = (0, 0);
    let mut best_d = -1.0;
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            let d = (c[j] - c[i]).norm_squared();
            if d > best_d + 1e-12 {
                best_d = d;
                best = (i, j);
            }
        }
    }
    best
}

/// True iff every vertex lies strictly within `eps` of `c[center]`.
pub fn is_packing(c: &[Point], center: usize, eps: f64) -> bool {
    c.iter().all(|p| (p - c[center]).norm() < eps)
}

pub fn max_distance_from(c: &[Point], center: usize) -> f64 {
    c.iter().map(|p| (p - c[center]).norm()).fold(0.0, f64::max)
}

/// Least-squares plane through `points` (smallest second-moment direction).
pub fn best_fit_plane(points: &[Point]) -> Plane {
    let n = points.len().max(1) as f64;
    let centroid = Point::from(points.iter().fold(Vec3::zeros(), |acc, p| acc + p.coords) / n);
    let mut m = Matrix3::zeros();
    for p in points {
        let d = p - centroid;
        m += d * d.transpose();
    }
    let eig = SymmetricEigen::new(m);
    let (k, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let normal = eig.eigenvectors.column(k).into_owned();
    Plane::new(centroid, normal).unwrap_or_else(|_| Plane::new(centroid, Vec3::z()).unwrap())
}

/// Largest distance from a vertex to `h`.
pub fn planarity_residual(points: &[Point], h: &Plane) -> f64 {
    points.iter().map(|p| h.signed_distance(p).abs()).fold(0.0, f64::max)
}

/// The best-fit plane, if every vertex lies within `geom_eps` of it.
pub fn is_planar(points: &[Point], tol: &Tolerance) -> Option<Plane> {
    let h = best_fit_plane(points);
    (planarity_residual(points, &h) <= tol.geom_eps).then_some(h)
}

/// A random closed unit-edge polygon with `n ≥ 3` edges.
///
/// Draws `n − 2` uniform unit steps and, when the endpoint lands strictly
/// between distance 0 and 2 from the start, closes with two unit edges through
/// a uniformly chosen point of the closing circle. Otherwise it resamples.
pub fn random_closed_curve<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Point> {
    assert!(n >= 3, "a closed unit curve needs at least 3 edges");
    let tol = Tolerance::default();
    loop {
        let mut pts = Vec::with_capacity(n);
        let mut cur = Point::origin();
        pts.push(cur);
        for _ in 0..n - 2 {
            let [x, y, z]: [f64; 3] = UnitSphere.sample(rng);
            cur += Vec3::new(x, y, z);
            pts.push(cur);
        }
        let d = cur.coords.norm();
        if !(d > 1e-6 && d < 2.0 - 1e-6) {
            continue;
        }
        let Ok(circle) = unit_ball_intersection(&cur, &Point::origin(), &tol) else {
            continue;
        };
        pts.push(circle.point_at(rng.random::<f64>() * TAU));
        return pts;
    }
}

/// Regular planar unit-side polygon in the xy-plane, first vertex at the origin.
pub fn regular_polygon(k: usize) -> Vec<Point> {
    let radius = 1.0 / (2.0 * (std::f64::consts::PI / k as f64).sin());
    let offset = Vec3::new(radius, 0.0, 0.0);
    (0..k)
        .map(|i| {
            let t = TAU * i as f64 / k as f64;
            Point::new(radius * t.cos(), radius * t.sin(), 0.0) - offset
        })
        .collect()
}

/// JSON-friendly coordinate triple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coords(pub [f64; 3]);

impl From<Point> for Coords {
    fn from(p: Point) -> Self {
        Coords([p.x, p.y, p.z])
    }
}

impl From<Coords> for Point {
    fn from(c: Coords) -> Self {
        Point::new(c.0[0], c.0[1], c.0[2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn square() -> Vec<Point> {
        vec![
            Point::new(0., 0., 0.),
            Point::new(1., 0., 0.),
            Point::new(1., 1., 0.),
            Point::new(0., 1., 0.),
        ]
    }

    #[test]
    fn unit_triangle_is_unchanged() {
        let t = regular_polygon(3);
        let c = IntegralCurve::from_integer_curve(std::slice::from_ref(&t), &tol()).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.components()[0], t);
    }

    #[test]
    fn side_two_triangle_subdivides_to_hexagon() {
        let big: Vec<Point> = regular_polygon(3).iter().map(|p| Point::from(p.coords * 2.0)).collect();
        let c = IntegralCurve::from_integer_curve(std::slice::from_ref(&big), &tol()).unwrap();
        assert_eq!(c.len(), 6);
        let comp = &c.components()[0];
        for i in 0..3 {
            assert_eq!(comp[2 * i], big[i]);
            let mid = nalgebra::center(&big[i], &big[(i + 1) % 3]);
            assert!((comp[2 * i + 1] - mid).norm() < 1e-12);
        }
    }

    #[test]
    fn fractional_edge_rejected() {
        let raw = vec![vec![
            Point::new(0., 0., 0.),
            Point::new(1.5, 0., 0.),
            Point::new(0.75, 1.0, 0.),
        ]];
        let err = IntegralCurve::from_integer_curve(&raw, &tol()).unwrap_err();
        assert!(matches!(err, CurveError::NonIntegerEdge { edge: 0, .. }));
    }

    #[test]
    fn digon_is_too_short() {
        let raw = vec![vec![Point::new(0., 0., 0.), Point::new(1., 0., 0.)]];
        assert!(matches!(
            IntegralCurve::from_integer_curve(&raw, &tol()),
            Err(CurveError::ComponentTooShort { .. })
        ));
    }

    #[test]
    fn farthest_pairs() {
        let (i, j) = farthest_vertex_pair(&square());
        assert_eq!((i, j), (0, 2));
        assert_eq!(farthest_vertex_pair(&regular_polygon(3)), (0, 1));
        let hex = regular_polygon(6);
        let (i, j) = farthest_vertex_pair(&hex);
        assert!(((hex[j] - hex[i]).norm() - 2.0).abs() < 1e-12);
        assert_eq!(j - i, 3);
    }

    #[test]
    fn planarity() {
        assert!(is_planar(&square(), &tol()).is_some());
        assert!(is_planar(&regular_polygon(3), &tol()).is_some());
        // unit rhombus folded 90° about its diagonal (0,0,0)-(1,1,0)
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let folded = vec![
            Point::new(0., 0., 0.),
            Point::new(0.5 + 0.5, 0.5 - 0.5, 0.),
            Point::new(1., 1., 0.),
            Point::new(0.5, 0.5, s),
        ];
        assert!(IntegralCurve::new(vec![folded.clone()], &tol()).is_ok());
        assert!(is_planar(&folded, &tol()).is_none());
    }

    #[test]
    fn packing_is_strict() {
        assert!(is_packing(&regular_polygon(3), 1, 2.0));
        let hex = regular_polygon(6);
        assert!(!is_packing(&hex, 0, 2.0 - 1e-12));
        assert!(is_packing(&hex, 0, 2.000001));
    }

    #[test]
    fn heights() {
        let h = Plane::new(Point::origin(), Vec3::z()).unwrap();
        let path = [Point::new(0., 0., 0.), Point::new(0., 0., 1.), Point::new(0., 0., 2.)];
        assert_eq!(height_profile(&path, &h).0, vec![0.0, 1.0, 2.0]);
        let mixed = [Point::new(0., 0., -1.), Point::new(0., 0., 1.)];
        assert_eq!(height_profile(&mixed, &h).0, vec![1.0, 1.0]);
        assert_eq!(height_profile(&square(), &h).max(), 0.0);
    }

    #[test]
    fn random_curves_close_with_unit_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 3..20 {
            let c = random_closed_curve(n, &mut rng);
            assert_eq!(c.len(), n);
            assert!(IntegralCurve::new(vec![c], &tol()).is_ok());
        }
    }
}

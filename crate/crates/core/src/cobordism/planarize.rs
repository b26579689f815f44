//! Pushing every vertex of a curve into one plane by rhombus pivots.

use super::{pair_budget, pivot_in_place, CobordismError, PivotMove};
use crate::curve::{farthest_vertex_pair, is_planar, planarity_residual, IntegralCurve};
use crate::geom::{
    orthonormal_basis, point_on_circle_nearest_plane, unit_ball_intersection, GeomError, Plane, Point, Tolerance,
};
use crate::registry::{Named, Registry};
use nalgebra::{Matrix2, SymmetricEigen};
use std::sync::Arc;

/// Picks a plane through the line `(points[a], points[b])`.
pub trait PlaneChoice: Named + Send + Sync {
    fn choose(&self, points: &[Point], a: usize, b: usize) -> Plane;
}

/// Minimizes the sum of squared vertex heights among planes containing the line.
#[derive(Clone, Copy, Debug, Default)]
pub struct LeastSquaresPlane;

impl Named for LeastSquaresPlane {
    fn name(&self) -> &'static str {
        "least-squares"
    }
}

impl PlaneChoice for LeastSquaresPlane {
    fn choose(&self, points: &[Point], a: usize, b: usize) -> Plane {
        let base = points[a];
        let (e1, e2) = orthonormal_basis(&(points[b] - base));
        let mut m = Matrix2::zeros();
        for p in points {
            let d = p - base;
            let x = nalgebra::Vector2::new(d.dot(&e1), d.dot(&e2));
            m += x * x.transpose();
        }
        let eig = SymmetricEigen::new(m);
        let k = if eig.eigenvalues[0] <= eig.eigenvalues[1] { 0 } else { 1 };
        let c = eig.eigenvectors.column(k);
        Plane::new(base, e1 * c[0] + e2 * c[1]).expect("unit combination of an orthonormal pair")
    }
}

/// The plane whose normal is the first deterministic basis vector orthogonal to the line.
#[derive(Clone, Copy, Debug, Default)]
pub struct BasisPlane;

impl Named for BasisPlane {
    fn name(&self) -> &'static str {
        "basis"
    }
}

impl PlaneChoice for BasisPlane {
    fn choose(&self, points: &[Point], a: usize, b: usize) -> Plane {
        let (e1, _) = orthonormal_basis(&(points[b] - points[a]));
        Plane::new(points[a], e1).expect("unit normal")
    }
}

pub fn plane_choices() -> Registry<dyn PlaneChoice> {
    Registry::<dyn PlaneChoice>::new("plane choice")
        .with(Arc::new(LeastSquaresPlane))
        .with(Arc::new(BasisPlane))
        .with_default("least-squares")
}

/// Lexicographic progress measure: (max height, vertices at max, first index at max).
fn descent_metric(heights: &[f64]) -> (f64, usize, usize) {
    let max = heights.iter().copied().fold(0.0, f64::max);
    let count = heights.iter().filter(|&&h| h == max).count();
    let first = heights.iter().position(|&h| h == max).unwrap_or(0);
    (max, count, first)
}

fn metric_decreased(before: (f64, usize, usize), after: (f64, usize, usize)) -> bool {
    after.0 < before.0 || (after.0 == before.0 && (after.1, after.2) < (before.1, before.2))
}

/// Height-minimizing pivot target for a vertex whose neighbours coincide: the
/// pivot locus is the unit sphere around them.
fn sphere_target(center: &Point, old: &Point, h: &Plane) -> Point {
    let s = h.signed_distance(center);
    if s.abs() >= 1.0 {
        return center - h.normal() * s.signum();
    }
    let foot = h.project(center);
    let r = (1.0 - s * s).sqrt();
    let toward = h.project(old) - foot;
    let dir = if toward.norm() > 1e-12 {
        toward.normalize()
    } else {
        h.basis().0
    };
    foot + dir * r
}

/// Planarizes one cyclic component in place, returning the pivots applied.
pub fn planarize_component(
    points: &mut [Point],
    component: usize,
    choice: &dyn PlaneChoice,
    tol: &Tolerance,
) -> Result<Vec<PivotMove>, CobordismError> {
    let n = points.len();
    let budget = pair_budget(n);
    if is_planar(points, tol).is_some() {
        return Ok(Vec::new());
    }
    let (a, b) = farthest_vertex_pair(points);
    let h = choice.choose(points, a, b);
    let flat = tol.geom_eps * 1e-3;
    let paths: [Vec<usize>; 2] = [(a..=b).collect(), (b..=a + n).map(|i| i % n).collect()];
    let mut moves = Vec::new();

    for path in &paths {
        if path.len() < 3 {
            continue;
        }
        loop {
            let heights: Vec<f64> = path.iter().map(|&i| h.signed_distance(&points[i]).abs()).collect();
            let interior = &heights[1..path.len() - 1];
            // first maximum, so that heights[j-1] < heights[j] >= heights[j+1]
            let (j, hmax) = interior
                .iter()
                .enumerate()
                .fold((0, -1.0), |acc, (k, &v)| if v > acc.1 { (k + 1, v) } else { acc });
            if hmax <= flat {
                break;
            }
            let (ip, i, inx) = (path[j - 1], path[j], path[j + 1]);
            let (prev, old, next) = (points[ip], points[i], points[inx]);
            if (next - prev).norm() >= 2.0 - tol.geom_eps {
                return Err(CobordismError::InvariantViolated(format!(
                    "straight triple at the highest vertex {i} of component {component}"
                )));
            }
            let target = match unit_ball_intersection(&prev, &next, tol) {
                Ok(circle) => point_on_circle_nearest_plane(&circle, &h),
                Err(GeomError::Coincident { .. }) => sphere_target(&prev, &old, &h),
                Err(e) => return Err(e.into()),
            };
            let before = descent_metric(&heights);
            let Some(mv) = pivot_in_place(points, component, i, target, tol)? else {
                return Err(CobordismError::InvariantViolated(format!(
                    "highest vertex {i} of component {component} cannot be lowered"
                )));
            };
            let after_heights: Vec<f64> = path.iter().map(|&k| h.signed_distance(&points[k]).abs()).collect();
            if !metric_decreased(before, descent_metric(&after_heights)) {
                return Err(CobordismError::InvariantViolated(format!(
                    "planarize descent stalled at vertex {i} of component {component}"
                )));
            }
            moves.push(mv);
            if moves.len() > budget {
                return Err(CobordismError::BudgetExceeded {
                    stage: "planarize",
                    moves: moves.len(),
                    budget,
                });
            }
        }
    }

    let residual = planarity_residual(points, &h);
    if residual > tol.geom_eps || is_planar(points, tol).is_none() {
        return Err(CobordismError::NotPlanar { component, residual });
    }
    Ok(moves)
}

/// Planarizes every component of `curve`.
pub fn planarize(
    curve: &IntegralCurve,
    choice: &dyn PlaneChoice,
    tol: &Tolerance,
) -> Result<(IntegralCurve, Vec<PivotMove>), CobordismError> {
    let mut comps = curve.components().to_vec();
    let mut moves = Vec::new();
    for (ci, comp) in comps.iter_mut().enumerate() {
        moves.extend(planarize_component(comp, ci, choice, tol)?);
    }
    Ok((IntegralCurve::new(comps, tol)?, moves))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{random_closed_curve, regular_polygon};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn folded_rhombus() -> Vec<Point> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        vec![
            Point::new(0., 0., 0.),
            Point::new(1., 0., 0.),
            Point::new(1., 1., 0.),
            Point::new(0.5, 0.5, s),
        ]
    }

    #[test]
    fn planar_input_is_untouched() {
        let tol = Tolerance::default();
        let mut pts = regular_polygon(7);
        let before = pts.clone();
        let moves = planarize_component(&mut pts, 0, &LeastSquaresPlane, &tol).unwrap();
        assert!(moves.is_empty());
        assert_eq!(pts, before);
    }

    #[test]
    fn folded_rhombus_flattens_within_budget() {
        let tol = Tolerance::default();
        for choice in [&LeastSquaresPlane as &dyn PlaneChoice, &BasisPlane] {
            let mut pts = folded_rhombus();
            let moves = planarize_component(&mut pts, 0, choice, &tol).unwrap();
            assert!(moves.len() <= 6);
            assert!(is_planar(&pts, &tol).is_some());
        }
    }

    #[test]
    fn least_squares_plane_contains_line() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts = random_closed_curve(9, &mut rng);
        let (a, b) = farthest_vertex_pair(&pts);
        let h = LeastSquaresPlane.choose(&pts, a, b);
        assert!(h.signed_distance(&pts[a]).abs() < 1e-12);
        assert!(h.signed_distance(&pts[b]).abs() < 1e-12);
        let basis = BasisPlane.choose(&pts, a, b);
        let sq = |pl: &Plane| pts.iter().map(|p| pl.signed_distance(p).powi(2)).sum::<f64>();
        assert!(sq(&h) <= sq(&basis) + 1e-12);
    }

    #[test]
    fn random_curves_planarize_within_pair_budget() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [5, 8, 12, 17] {
            for _ in 0..10 {
                let mut pts = random_closed_curve(n, &mut rng);
                let moves = planarize_component(&mut pts, 0, &LeastSquaresPlane, &tol).unwrap();
                assert!(moves.len() <= pair_budget(n));
                assert!(is_planar(&pts, &tol).is_some());
            }
        }
    }
}

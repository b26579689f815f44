use super::chain::{Cell, DomeChain, SegmentTally};
use super::SurfaceError;
use crate::cobordism::TriangleFace;
use crate::curve::{IntegralCurve, Rhombus};
use crate::geom::{Point, Tolerance};
use nalgebra::{Rotation3, Unit};

/// Two rhombi sharing their first vertex, joined by two unit triangles into a hexagon.
#[derive(Clone, Debug, PartialEq)]
pub struct HexagonJoin {
    /// `[v4 v3 v2 v2' v3' v4']`.
    pub hexagon: IntegralCurve,
    /// `[v1 v2 v2']` and `[v1 v4' v4]`.
    pub triangles: [TriangleFace; 2],
}

impl HexagonJoin {
    /// The chain `T1 + T2 − ρ + ρ'`, whose boundary is the hexagon.
    pub fn chain(&self, rho: &Rhombus, rho2: &Rhombus) -> DomeChain {
        DomeChain {
            cells: vec![
                (1, Cell::Triangle(self.triangles[0])),
                (1, Cell::Triangle(self.triangles[1])),
                (-1, Cell::Rhombus(*rho)),
                (1, Cell::Rhombus(*rho2)),
            ],
        }
    }

    /// Keyed segments of `∂(chain) − hexagon` with non-zero multiplicity.
    pub fn chain_defect(&self, rho: &Rhombus, rho2: &Rhombus, tol: &Tolerance) -> super::ChainDefect {
        let mut tally = SegmentTally::new(tol);
        tally.add_chain(1, &self.chain(rho, rho2));
        tally.add_cycle(-1, &self.hexagon.components()[0]);
        tally.defect()
    }
}

/// Joins `ρ = [v1 v2 v3 v4]` and `ρ' = [v1' v2' v3' v4']` positioned with
/// `v1 = v1'`, `|v2 v2'| = |v4 v4'| = 1`.
pub fn hexagon_join(rho: &Rhombus, rho2: &Rhombus, tol: &Tolerance) -> Result<HexagonJoin, SurfaceError> {
    let [v1, v2, v3, v4] = rho.vertices;
    let [w1, w2, w3, w4] = rho2.vertices;
    let shared = (w1 - v1).norm();
    let d2 = (w2 - v2).norm();
    let d4 = (w4 - v4).norm();
    let side = rho.side_error().max(rho2.side_error());
    if shared > tol.geom_eps || (d2 - 1.0).abs() > tol.geom_eps || (d4 - 1.0).abs() > tol.geom_eps || side > tol.geom_eps
    {
        return Err(SurfaceError::PositioningViolated {
            shared,
            d2,
            d4,
        });
    }
    let hexagon = IntegralCurve::new(vec![vec![v4, v3, v2, w2, w3, w4]], tol)?;
    Ok(HexagonJoin {
        hexagon,
        triangles: [TriangleFace::new(v1, v2, w2), TriangleFace::new(v1, w4, v4)],
    })
}

/// The unit rhombus with angle `alpha` at the origin, `v2 = (1, 0, 0)`, and a
/// copy rotated about its short-diagonal bisector by the angle (found by
/// bisection) that puts `v2'`, `v4'` at unit distance from `v2`, `v4`.
pub fn rhombus_pair_for_join(alpha: f64) -> Result<(Rhombus, Rhombus), SurfaceError> {
    let v1 = Point::origin();
    let v2 = Point::new(1.0, 0.0, 0.0);
    let v4 = Point::new(alpha.cos(), alpha.sin(), 0.0);
    let v3 = v2 + v4.coords;
    let rho = Rhombus::new(v1, v2, v3, v4);
    let axis = Unit::new_normalize(v2.coords + v4.coords);
    let gap = |theta: f64| (Rotation3::from_axis_angle(&axis, theta) * v2 - v2).norm() - 1.0;
    let (mut lo, mut hi) = (0.0, std::f64::consts::PI);
    if gap(hi) < 0.0 {
        return Err(SurfaceError::Malformed(format!("angle {alpha} too small for a join")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rot = Rotation3::from_axis_angle(&axis, 0.5 * (lo + hi));
    let rho2 = Rhombus::new(v1, rot * v2, rot * v3, rot * v4);
    Ok((rho, rho2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_pair_turns_a_right_angle() {
        let (rho, rho2) = rhombus_pair_for_join(std::f64::consts::FRAC_PI_2).unwrap();
        // the rotated square lies in a perpendicular half-plane
        let n1 = (rho.vertices[1] - rho.vertices[0]).cross(&(rho.vertices[3] - rho.vertices[0]));
        let n2 = (rho2.vertices[1] - rho2.vertices[0]).cross(&(rho2.vertices[3] - rho2.vertices[0]));
        assert!(n1.dot(&n2).abs() < 1e-9);
    }

    #[test]
    fn join_gives_a_unit_hexagon() {
        let tol = Tolerance::default();
        let (rho, rho2) = rhombus_pair_for_join(100f64.to_radians()).unwrap();
        let j = hexagon_join(&rho, &rho2, &tol).unwrap();
        assert_eq!(j.hexagon.len(), 6);
        for t in &j.triangles {
            assert!(t.side_error() < 1e-9);
        }
        assert!(j.chain_defect(&rho, &rho2, &tol).is_zero());
    }

    #[test]
    fn misplaced_pairs_are_rejected() {
        let tol = Tolerance::default();
        let (rho, _) = rhombus_pair_for_join(1.7).unwrap();
        assert!(matches!(hexagon_join(&rho, &rho, &tol), Err(SurfaceError::PositioningViolated { .. })));
        let mut shifted = rho;
        for v in &mut shifted.vertices {
            v.z += 0.3;
        }
        assert!(hexagon_join(&rho, &shifted, &tol).is_err());
    }
}

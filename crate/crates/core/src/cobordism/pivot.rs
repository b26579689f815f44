use super::{CobordismError, PivotMove};
use crate::curve::{IntegralCurve, Rhombus};
use crate::geom::{Point, Tolerance};

/// Moves vertex `i` of a cyclic component to `p`.
///
/// Returns `None` (and leaves the component untouched) when `p` coincides with
/// the current vertex.
pub fn pivot_in_place(
    points: &mut [Point],
    component: usize,
    i: usize,
    p: Point,
    tol: &Tolerance,
) -> Result<Option<PivotMove>, CobordismError> {
    let n = points.len();
    let prev = points[(i + n - 1) % n];
    let next = points[(i + 1) % n];
    let to_prev = (p - prev).norm();
    let to_next = (p - next).norm();
    if (to_prev - 1.0).abs() > tol.geom_eps || (to_next - 1.0).abs() > tol.geom_eps {
        return Err(CobordismError::NotOnPivotCircle {
            component,
            vertex: i,
            to_prev,
            to_next,
        });
    }
    let old = points[i];
    if (p - old).norm() <= tol.geom_eps {
        return Ok(None);
    }
    points[i] = p;
    Ok(Some(PivotMove {
        component,
        vertex: i,
        old_point: old,
        new_point: p,
        rhombus: Rhombus::new(prev, old, next, p),
        degenerate: (next - prev).norm() <= tol.geom_eps,
    }))
}

/// Pivot on an [`IntegralCurve`], returning the new curve and the move (if any).
pub fn apply_pivot(
    curve: &IntegralCurve,
    component: usize,
    i: usize,
    p: Point,
    tol: &Tolerance,
) -> Result<(IntegralCurve, Option<PivotMove>), CobordismError> {
    let mut comps = curve.components().to_vec();
    let mv = pivot_in_place(&mut comps[component], component, i, p, tol)?;
    Ok((IntegralCurve::new(comps, tol)?, mv))
}

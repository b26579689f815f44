use super::steinitz::{max_prefix_norm, steinitz_order_with, SteinitzStrategy, Vec2, STEINITZ_BOUND};
use super::{pair_budget, pivot_in_place, CobordismError, PivotMove};
use crate::curve::{is_planar, max_distance_from, planarity_residual, best_fit_plane, IntegralCurve};
use crate::geom::{Point, Tolerance};

#[derive(Clone, Debug, PartialEq)]
pub struct PackOutcome {
    pub moves: Vec<PivotMove>,
    /// Steinitz order of the edge vectors that was realized.
    pub order: Vec<usize>,
    pub max_prefix_norm: f64,
}

/// Reorders the edges of a planar component so that every vertex lies within
/// 2 of vertex 0, one adjacent transposition (one pivot) at a time.
pub fn pack_component(
    points: &mut [Point],
    component: usize,
    strategy: &dyn SteinitzStrategy,
    tol: &Tolerance,
) -> Result<PackOutcome, CobordismError> {
    let n = points.len();
    let plane = is_planar(points, tol).ok_or_else(|| CobordismError::NotPlanar {
        component,
        residual: planarity_residual(points, &best_fit_plane(points)),
    })?;
    let (e1, e2) = plane.basis();
    let vectors: Vec<Vec2> = (0..n)
        .map(|i| {
            let u = points[(i + 1) % n] - points[i];
            Vec2::new(u.dot(&e1), u.dot(&e2))
        })
        .collect();
    let order = steinitz_order_with(strategy, &vectors, tol)?;
    let prefix = max_prefix_norm(&vectors, &order);

    let mut rank = vec![0; n];
    for (pos, &edge) in order.iter().enumerate() {
        rank[edge] = pos;
    }
    // arrangement[j] = original index of the edge currently at position j
    let mut arrangement: Vec<usize> = (0..n).collect();
    let mut moves = Vec::new();
    let mut swapped = true;
    while swapped {
        swapped = false;
        for j in 0..n - 1 {
            if rank[arrangement[j]] > rank[arrangement[j + 1]] {
                let i = j + 1;
                let target = Point::from(points[j].coords + points[(j + 2) % n].coords - points[i].coords);
                if let Some(mv) = pivot_in_place(points, component, i, target, tol)? {
                    moves.push(mv);
                }
                arrangement.swap(j, j + 1);
                swapped = true;
            }
        }
    }

    let budget = pair_budget(n);
    if moves.len() > budget {
        return Err(CobordismError::BudgetExceeded {
            stage: "pack",
            moves: moves.len(),
            budget,
        });
    }
    let distance = max_distance_from(points, 0);
    if distance > STEINITZ_BOUND + tol.geom_eps {
        return Err(CobordismError::NotPacking { component, distance });
    }
    Ok(PackOutcome {
        moves,
        order,
        max_prefix_norm: prefix,
    })
}

/// Packs every component of a planar curve around its vertex 0.
pub fn pack(
    curve: &IntegralCurve,
    strategy: &dyn SteinitzStrategy,
    tol: &Tolerance,
) -> Result<(IntegralCurve, Vec<PivotMove>), CobordismError> {
    let mut comps = curve.components().to_vec();
    let mut moves = Vec::new();
    for (ci, comp) in comps.iter_mut().enumerate() {
        moves.extend(pack_component(comp, ci, strategy, tol)?.moves);
    }
    Ok((IntegralCurve::new(comps, tol)?, moves))
}

//! Reordering zero-sum unit vectors so that every prefix sum stays short.

use super::CobordismError;
use crate::geom::Tolerance;
use crate::registry::{Named, Registry};
use std::collections::HashMap;
use std::sync::Arc;

pub type Vec2 = nalgebra::Vector2<f64>;

/// Prefix-sum bound used for planar curves.
pub const STEINITZ_BOUND: f64 = 2.0;

/// A search for a permutation whose prefix sums stay within `bound`.
pub trait SteinitzStrategy: Named + Send + Sync {
    fn order(&self, vectors: &[Vec2], bound: f64) -> Option<Vec<usize>>;
}

pub fn prefix_norms(vectors: &[Vec2], order: &[usize]) -> Vec<f64> {
    let mut s = Vec2::zeros();
    order
        .iter()
        .map(|&i| {
            s += vectors[i];
            s.norm()
        })
        .collect()
}

pub fn max_prefix_norm(vectors: &[Vec2], order: &[usize]) -> f64 {
    prefix_norms(vectors, order).into_iter().fold(0.0, f64::max)
}

/// Accepts the given order when it already satisfies the bound.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityOrder;

impl Named for IdentityOrder {
    fn name(&self) -> &'static str {
        "identity"
    }
}

impl SteinitzStrategy for IdentityOrder {
    fn order(&self, vectors: &[Vec2], bound: f64) -> Option<Vec<usize>> {
        let order: Vec<usize> = (0..vectors.len()).collect();
        (max_prefix_norm(vectors, &order) <= bound).then_some(order)
    }
}

/// Always appends the vector giving the shortest next prefix sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct GreedyOrder;

impl Named for GreedyOrder {
    fn name(&self) -> &'static str {
        "greedy"
    }
}

impl SteinitzStrategy for GreedyOrder {
    fn order(&self, vectors: &[Vec2], bound: f64) -> Option<Vec<usize>> {
        let n = vectors.len();
        let mut used = vec![false; n];
        let mut s = Vec2::zeros();
        let mut order = Vec::with_capacity(n);
        for _ in 0..n {
            let (best, norm) = (0..n)
                .filter(|&i| !used[i])
                .map(|i| (i, (s + vectors[i]).norm()))
                .fold((usize::MAX, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
            if norm > bound {
                return None;
            }
            used[best] = true;
            s += vectors[best];
            order.push(best);
        }
        Some(order)
    }
}

/// Exhaustive depth-first search, children tried shortest-prefix first.
#[derive(Clone, Copy, Debug)]
pub struct BacktrackOrder {
    pub max_n: usize,
}

impl Default for BacktrackOrder {
    fn default() -> Self {
        Self { max_n: 10 }
    }
}

impl Named for BacktrackOrder {
    fn name(&self) -> &'static str {
        "backtrack"
    }
}

impl BacktrackOrder {
    fn dfs(vectors: &[Vec2], bound: f64, s: Vec2, used: &mut [bool], order: &mut Vec<usize>) -> bool {
        if order.len() == vectors.len() {
            return true;
        }
        let mut children: Vec<(usize, f64)> = (0..vectors.len())
            .filter(|&i| !used[i])
            .map(|i| (i, (s + vectors[i]).norm()))
            .filter(|&(_, norm)| norm <= bound)
            .collect();
        children.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        for (i, _) in children {
            used[i] = true;
            order.push(i);
            if Self::dfs(vectors, bound, s + vectors[i], used, order) {
                return true;
            }
            order.pop();
            used[i] = false;
        }
        false
    }
}

impl SteinitzStrategy for BacktrackOrder {
    fn order(&self, vectors: &[Vec2], bound: f64) -> Option<Vec<usize>> {
        if vectors.len() > self.max_n {
            return None;
        }
        let mut used = vec![false; vectors.len()];
        let mut order = Vec::with_capacity(vectors.len());
        Self::dfs(vectors, bound, Vec2::zeros(), &mut used, &mut order).then_some(order)
    }
}

/// Breadth-first search keeping the `width` partial orders with the shortest
/// current prefix; partial orders using the same vector set are merged.
#[derive(Clone, Copy, Debug)]
pub struct BeamOrder {
    pub width: usize,
}

impl Default for BeamOrder {
    fn default() -> Self {
        Self { width: 256 }
    }
}

impl Named for BeamOrder {
    fn name(&self) -> &'static str {
        "beam"
    }
}

#[derive(Clone)]
struct Partial {
    sum: Vec2,
    used: Vec<u64>,
    order: Vec<usize>,
}

impl SteinitzStrategy for BeamOrder {
    fn order(&self, vectors: &[Vec2], bound: f64) -> Option<Vec<usize>> {
        let n = vectors.len();
        let words = n.div_ceil(64).max(1);
        let mut beam = vec![Partial {
            sum: Vec2::zeros(),
            used: vec![0; words],
            order: Vec::new(),
        }];
        for _ in 0..n {
            let mut next: HashMap<Vec<u64>, Partial> = HashMap::new();
            for state in &beam {
                for i in 0..n {
                    if state.used[i / 64] >> (i % 64) & 1 == 1 {
                        continue;
                    }
                    let sum = state.sum + vectors[i];
                    if sum.norm() > bound {
                        continue;
                    }
                    let mut used = state.used.clone();
                    used[i / 64] |= 1 << (i % 64);
                    let keep = next.get(&used).is_none_or(|p| sum.norm() < p.sum.norm());
                    if keep {
                        let mut order = state.order.clone();
                        order.push(i);
                        next.insert(used.clone(), Partial { sum, used, order });
                    }
                }
            }
            let mut states: Vec<Partial> = next.into_values().collect();
            if states.is_empty() {
                return None;
            }
            states.sort_by(|a, b| a.sum.norm().total_cmp(&b.sum.norm()).then_with(|| a.order.cmp(&b.order)));
            states.truncate(self.width);
            beam = states;
        }
        beam.into_iter().next().map(|p| p.order)
    }
}

/// Identity if it already works, then greedy, then backtracking for short
/// inputs and beam search for long ones.
#[derive(Clone, Copy, Debug, Default)]
pub struct AutoOrder;

impl Named for AutoOrder {
    fn name(&self) -> &'static str {
        "auto"
    }
}

impl SteinitzStrategy for AutoOrder {
    fn order(&self, vectors: &[Vec2], bound: f64) -> Option<Vec<usize>> {
        IdentityOrder
            .order(vectors, bound)
            .or_else(|| GreedyOrder.order(vectors, bound))
            .or_else(|| {
                let bt = BacktrackOrder::default();
                if vectors.len() <= bt.max_n {
                    bt.order(vectors, bound)
                } else {
                    BeamOrder::default().order(vectors, bound)
                }
            })
    }
}

pub fn steinitz_strategies() -> Registry<dyn SteinitzStrategy> {
    Registry::<dyn SteinitzStrategy>::new("Steinitz strategy")
        .with(Arc::new(AutoOrder))
        .with(Arc::new(IdentityOrder))
        .with(Arc::new(GreedyOrder))
        .with(Arc::new(BacktrackOrder::default()))
        .with(Arc::new(BeamOrder::default()))
        .with_default("auto")
}

/// Validates the input and runs `strategy`, checking the bound on the result.
pub fn steinitz_order_with(
    strategy: &dyn SteinitzStrategy,
    vectors: &[Vec2],
    tol: &Tolerance,
) -> Result<Vec<usize>, CobordismError> {
    for (index, v) in vectors.iter().enumerate() {
        let length = v.norm();
        if (length - 1.0).abs() > tol.geom_eps {
            return Err(CobordismError::NotUnit { index, length });
        }
    }
    let residual = vectors.iter().sum::<Vec2>().norm();
    if residual > tol.geom_eps {
        return Err(CobordismError::NotClosed { residual });
    }
    let bound = STEINITZ_BOUND + tol.geom_eps;
    let order = strategy
        .order(vectors, bound)
        .ok_or(CobordismError::SearchFailed { n: vectors.len() })?;
    let mut seen = vec![false; vectors.len()];
    let is_perm = order.len() == vectors.len() && order.iter().all(|&i| i < seen.len() && !std::mem::replace(&mut seen[i], true));
    if !is_perm || max_prefix_norm(vectors, &order) > bound {
        return Err(CobordismError::InvariantViolated(format!(
            "strategy `{}` returned an invalid order",
            strategy.name()
        )));
    }
    Ok(order)
}

/// [`steinitz_order_with`] using the `auto` strategy.
pub fn steinitz_order(vectors: &[Vec2], tol: &Tolerance) -> Result<Vec<usize>, CobordismError> {
    steinitz_order_with(&AutoOrder, vectors, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn star(k: usize, perm: &[usize]) -> Vec<Vec2> {
        perm.iter()
            .map(|&i| {
                let t = TAU * i as f64 / k as f64;
                Vec2::new(t.cos(), t.sin())
            })
            .collect()
    }

    #[test]
    fn opposite_pair_keeps_identity() {
        let v = vec![Vec2::new(1., 0.), Vec2::new(-1., 0.)];
        assert_eq!(steinitz_order(&v, &tol()).unwrap(), vec![0, 1]);
    }

    #[test]
    fn open_input_rejected() {
        let v = vec![Vec2::new(1., 0.), Vec2::new(0., 1.)];
        assert!(matches!(steinitz_order(&v, &tol()), Err(CobordismError::NotClosed { .. })));
        let v = vec![Vec2::new(2., 0.), Vec2::new(-2., 0.)];
        assert!(matches!(steinitz_order(&v, &tol()), Err(CobordismError::NotUnit { .. })));
    }

    #[test]
    fn every_strategy_handles_a_bad_starting_order() {
        // 8 directions sorted by angle: the identity order walks a regular octagon
        // whose far vertex is ~2.61 away.
        let v = star(8, &[0, 1, 2, 3, 4, 5, 6, 7]);
        assert!(IdentityOrder.order(&v, 2.0).is_none());
        for name in ["auto", "greedy", "backtrack", "beam"] {
            let s = steinitz_strategies().get(name).unwrap();
            let order = steinitz_order_with(s.as_ref(), &v, &tol()).unwrap();
            assert!(max_prefix_norm(&v, &order) <= 2.0 + 1e-9, "{name}");
        }
    }

    #[test]
    fn beam_handles_long_inputs() {
        let perm: Vec<usize> = (0..40).collect();
        let v = star(40, &perm);
        let order = steinitz_order_with(&BeamOrder::default(), &v, &tol()).unwrap();
        assert!(max_prefix_norm(&v, &order) <= 2.0 + 1e-9);
        assert!(BacktrackOrder::default().order(&v, 2.0).is_none());
    }
}

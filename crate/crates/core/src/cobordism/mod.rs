//! Rhombus pivots and the constructive reduction of an integral curve to a
//! union of unit rhombi.
//!
//! The pipeline per component is planarize → pack → peel pentagons. Every
//! step is appended to a [`CobordismLedger`] that can be replayed and checked
//! independently (see [`crate::surface::validate_ledger`]).

mod pack;
mod pentagon;
mod pivot;
mod planarize;
mod reduce;
mod replay;
mod steinitz;

pub use pack::{pack, pack_component, PackOutcome};
pub use pentagon::{
    pentagon_split, pentagon_splitters, LiteralSplitter, PentagonSplit, PentagonSplitter, RotatingSplitter,
};
pub use pivot::{apply_pivot, pivot_in_place};
pub use planarize::{
    plane_choices, planarize, planarize_component, BasisPlane, LeastSquaresPlane, PlaneChoice,
};
pub use reduce::{reduce_to_rhombi, Reducer};
pub use replay::{replay, Replay, ReplayError};
pub use steinitz::{
    max_prefix_norm, prefix_norms, steinitz_order, steinitz_order_with, steinitz_strategies, AutoOrder,
    BacktrackOrder, BeamOrder, GreedyOrder, IdentityOrder, SteinitzStrategy, Vec2, STEINITZ_BOUND,
};

use crate::curve::{CurveError, IntegralCurve, Rhombus};
use crate::geom::{GeomError, Point};
use crate::registry::UnknownName;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CobordismError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    UnknownStrategy(#[from] UnknownName),
    #[error("component {component}, vertex {vertex}: target is {to_prev} and {to_next} from the neighbours, not 1")]
    NotOnPivotCircle {
        component: usize,
        vertex: usize,
        to_prev: f64,
        to_next: f64,
    },
    #[error("{stage}: {moves} moves exceed the budget of {budget}")]
    BudgetExceeded {
        stage: &'static str,
        moves: usize,
        budget: usize,
    },
    #[error("edge vectors do not sum to zero (residual {residual})")]
    NotClosed { residual: f64 },
    #[error("edge vector {index} has length {length}, expected 1")]
    NotUnit { index: usize, length: f64 },
    #[error("no ordering of {n} vectors keeps prefix sums within the bound")]
    SearchFailed { n: usize },
    #[error("component {component} is not planar (residual {residual})")]
    NotPlanar { component: usize, residual: f64 },
    #[error("component {component}: max distance {distance} from the packing center exceeds 2")]
    NotPacking { component: usize, distance: f64 },
    #[error("component {component}: circumradius still {circumradius} after {pivots} corrective pivots")]
    FixBudgetExceeded {
        component: usize,
        pivots: usize,
        circumradius: f64,
    },
    #[error("pentagon expected, component has {len} vertices")]
    NotPentagon { len: usize },
    #[error("component {component} has {len} edges; at least 3 are required")]
    ComponentTooShort { component: usize, len: usize },
    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),
}

/// One rhombus pivot: vertex `vertex` of `component` moves from `old_point` to
/// `new_point`, attaching `rhombus = [prev, old, next, new]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PivotMove {
    pub component: usize,
    pub vertex: usize,
    pub old_point: Point,
    pub new_point: Point,
    pub rhombus: Rhombus,
    /// Both neighbours coincide; the rhombus has no area and is recorded as seams.
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub from: Point,
    pub to: Point,
}

/// Two oriented unit segments covering the same set with opposite orientation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeamPair {
    pub first: Segment,
    pub second: Segment,
}

impl SeamPair {
    /// The pair `a→b`, `b→a`.
    pub fn of(a: Point, b: Point) -> Self {
        Self {
            first: Segment { from: a, to: b },
            second: Segment { from: b, to: a },
        }
    }

    /// Largest crosswise endpoint mismatch.
    pub fn mismatch(&self) -> f64 {
        (self.first.from - self.second.to)
            .norm()
            .max((self.first.to - self.second.from).norm())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleFace {
    pub vertices: [Point; 3],
}

impl TriangleFace {
    pub fn new(a: Point, b: Point, c: Point) -> Self {
        Self { vertices: [a, b, c] }
    }

    pub fn edges(&self) -> [(Point, Point); 3] {
        let v = &self.vertices;
        [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])]
    }

    pub fn side_error(&self) -> f64 {
        self.edges()
            .iter()
            .map(|(a, b)| ((b - a).norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Cuts `[v0 v1 v2 v3 … ]` into the pentagon `[v0 v1 v2 v3 apex]` (appended
/// as component `pentagon`) and the remainder `[v0 apex v3 …]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Peel {
    pub component: usize,
    pub apex: Point,
    pub pentagon: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClosureKind {
    /// A unit triangle component bounds its own face.
    Triangle,
    /// A 4-gon component is kept as a final rhombus.
    Rhombus,
    /// Pentagon `[a b c d e]` (after rotating by `rotation`) with `apex` at unit
    /// distance from `a`, `c`, `d`: rhombi `[a b c apex]`, `[a apex d e]` and the
    /// face `[c d apex]`.
    Pentagon { rotation: usize, apex: Point },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Closure {
    pub component: usize,
    pub kind: ClosureKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Pivot(PivotMove),
    Peel(Peel),
    Close(Closure),
}

/// Per input component counters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComponentReport {
    pub n: usize,
    pub planarize_moves: usize,
    pub pack_moves: usize,
    pub splits: usize,
    pub fix_pivots: usize,
    pub rhombi: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CobordismLedger {
    pub initial: IntegralCurve,
    pub steps: Vec<Step>,
    pub triangles: Vec<TriangleFace>,
    pub seams: Vec<SeamPair>,
    pub rhombi: Vec<Rhombus>,
    pub final_curve: IntegralCurve,
    pub components: Vec<ComponentReport>,
}

impl CobordismLedger {
    /// Number of rhombi used.
    pub fn k(&self) -> usize {
        self.rhombi.len()
    }

    pub fn n(&self) -> usize {
        self.initial.len()
    }

    /// Sum of the per-component rhombus budgets of the initial curve.
    pub fn budget(&self) -> usize {
        self.initial.components().iter().map(|c| rhombus_budget(c.len())).sum()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &PivotMove> {
        self.steps.iter().filter_map(|s| match s {
            Step::Pivot(m) => Some(m),
            _ => None,
        })
    }
}

/// Rhombi allowed for a component with `n` unit edges: `n² + 2n − 12` for
/// `n ≥ 5`, one for a 4-gon and none for a triangle.
pub fn rhombus_budget(n: usize) -> usize {
    match n {
        0..=3 => 0,
        4 => 1,
        _ => n * n + 2 * n - 12,
    }
}

/// `C(n, 2)`, the move budget of the planarize and pack stages.
pub fn pair_budget(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budgets() {
        assert_eq!(rhombus_budget(3), 0);
        assert_eq!(rhombus_budget(4), 1);
        assert_eq!(rhombus_budget(5), 23);
        assert_eq!(rhombus_budget(6), 36);
        assert_eq!(pair_budget(4), 6);
        assert_eq!(pair_budget(12), 66);
    }

    #[test]
    fn seam_mismatch() {
        let a = Point::new(0., 0., 0.);
        let b = Point::new(1., 0., 0.);
        assert_eq!(SeamPair::of(a, b).mismatch(), 0.0);
        let mut s = SeamPair::of(a, b);
        s.second.to = Point::new(0., 1e-3, 0.);
        assert!(s.mismatch() > 9e-4);
    }
}

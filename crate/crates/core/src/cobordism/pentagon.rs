//! Splitting a unit pentagon into two unit rhombi and one unit triangle.
//!
//! For a pentagon `[a b c d e]` whose triangle `[a c d]` has circumradius
//! below 1 there is an apex `w` at unit distance from `a`, `c` and `d`; then
//! `[a b c d e] = [a b c w] + [a w d e] + ∂[c d w]` as 1-chains. When no
//! admissible rotation of the pentagon has a small enough circumradius, up to
//! three corrective pivots are searched for.

use super::{pivot_in_place, CobordismError, PivotMove, SeamPair, TriangleFace};
use crate::curve::Rhombus;
use crate::geom::{
    apex_at_unit_distance, circumradius, reflect_across_line, unit_ball_intersection, Point, Side, Tolerance,
};
use crate::registry::{Named, Registry};
use std::f64::consts::TAU;
use std::sync::Arc;

/// Accepted circumradii are at most `1 - MARGIN`, keeping the apex height
/// away from zero.
const MARGIN: f64 = 1e-6;
const MAX_FIXES: usize = 3;
const SPEC_CIRCLE_SAMPLES: usize = 360;
const SEARCH_CIRCLE_SAMPLES: usize = 36;
const SEARCH_BEAM: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct PentagonSplit {
    /// The pentagon was read starting at this vertex.
    pub rotation: usize,
    pub apex: Point,
    pub rhombi: [Rhombus; 2],
    pub face: TriangleFace,
    pub seams: [SeamPair; 3],
    pub fixes: Vec<PivotMove>,
}

/// Rhombi, face and seams of the split of `points` read from `rotation` with the given apex.
pub(crate) fn split_cells(points: &[Point], rotation: usize, apex: Point) -> ([Rhombus; 2], TriangleFace, [SeamPair; 3]) {
    let v = |k: usize| points[(rotation + k) % 5];
    let (a, b, c, d, e) = (v(0), v(1), v(2), v(3), v(4));
    (
        [Rhombus::new(a, b, c, apex), Rhombus::new(a, apex, d, e)],
        TriangleFace::new(c, d, apex),
        [SeamPair::of(apex, a), SeamPair::of(apex, c), SeamPair::of(apex, d)],
    )
}

fn rotation_radius(points: &[Point], rotation: usize, tol: &Tolerance) -> f64 {
    let v = |k: usize| points[(rotation + k) % 5];
    circumradius(&v(0), &v(2), &v(3), tol).unwrap_or(f64::INFINITY)
}

/// First rotation (in the given order) admitting an apex, with that apex.
fn admissible(points: &[Point], rotations: &[usize], tol: &Tolerance) -> Option<(usize, Point)> {
    rotations.iter().find_map(|&r| {
        if rotation_radius(points, r, tol) > 1.0 - MARGIN {
            return None;
        }
        let v = |k: usize| points[(r + k) % 5];
        apex_at_unit_distance(&v(0), &v(2), &v(3), Side::Positive, tol)
            .ok()
            .flatten()
            .map(|apex| (r, apex))
    })
}

fn score(points: &[Point], rotations: &[usize], tol: &Tolerance) -> f64 {
    rotations
        .iter()
        .map(|&r| rotation_radius(points, r, tol))
        .fold(f64::INFINITY, f64::min)
}

/// In-plane reflection of vertex `i` across the line through its neighbours.
fn reflection(points: &[Point], i: usize, tol: &Tolerance) -> Option<Point> {
    let prev = points[(i + 4) % 5];
    let next = points[(i + 1) % 5];
    reflect_across_line(&points[i], &prev, &next, tol).ok()
}

fn circle_samples(points: &[Point], i: usize, count: usize, tol: &Tolerance) -> Vec<Point> {
    let prev = points[(i + 4) % 5];
    let next = points[(i + 1) % 5];
    match unit_ball_intersection(&prev, &next, tol) {
        Ok(circle) => (0..count).map(|s| circle.point_at(TAU * s as f64 / count as f64)).collect(),
        Err(_) => Vec::new(),
    }
}

fn moved(points: &[Point], i: usize, p: Point, tol: &Tolerance) -> Option<Vec<Point>> {
    if (p - points[i]).norm() <= tol.geom_eps {
        return None;
    }
    let mut out = points.to_vec();
    out[i] = p;
    Some(out)
}

#[derive(Clone)]
struct Candidate {
    points: Vec<Point>,
    path: Vec<(usize, Point)>,
    score: f64,
}

/// Finds at most [`MAX_FIXES`] pivots after which some rotation admits an apex.
fn search_fixes(points: &[Point], rotations: &[usize], tol: &Tolerance) -> Option<Vec<(usize, Point)>> {
    let single = |i: usize, p: Point| -> Option<Vec<(usize, Point)>> {
        let next = moved(points, i, p, tol)?;
        admissible(&next, rotations, tol).map(|_| vec![(i, p)])
    };
    // reflections of v3, v2, v4 (indices 2, 1, 3), in that order
    for i in [2, 1, 3] {
        if let Some(found) = reflection(points, i, tol).and_then(|p| single(i, p)) {
            return Some(found);
        }
    }
    // the full pivot circle of v3, keeping the best admissible sample
    let best = circle_samples(points, 2, SPEC_CIRCLE_SAMPLES, tol)
        .into_iter()
        .filter_map(|p| {
            let next = moved(points, 2, p, tol)?;
            admissible(&next, rotations, tol).map(|_| (score(&next, rotations, tol), p))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0));
    if let Some((_, p)) = best {
        return Some(vec![(2, p)]);
    }

    // beam search over pivots of every vertex, up to MAX_FIXES deep
    let mut beam = vec![Candidate {
        points: points.to_vec(),
        path: Vec::new(),
        score: score(points, rotations, tol),
    }];
    for _ in 0..MAX_FIXES {
        let mut children = Vec::new();
        for cand in &beam {
            for i in 0..5 {
                let mut targets: Vec<Point> = reflection(&cand.points, i, tol).into_iter().collect();
                targets.extend(circle_samples(&cand.points, i, SEARCH_CIRCLE_SAMPLES, tol));
                for p in targets {
                    let Some(next) = moved(&cand.points, i, p, tol) else { continue };
                    let mut path = cand.path.clone();
                    path.push((i, p));
                    let s = score(&next, rotations, tol);
                    children.push(Candidate { points: next, path, score: s });
                }
            }
        }
        let winner = children
            .iter()
            .filter(|c| admissible(&c.points, rotations, tol).is_some())
            .min_by(|a, b| a.score.total_cmp(&b.score));
        if let Some(w) = winner {
            return Some(w.path.clone());
        }
        children.sort_by(|a, b| a.score.total_cmp(&b.score));
        // keep the two best children per pivoted vertex, then fill by score
        let mut kept: Vec<Candidate> = Vec::with_capacity(SEARCH_BEAM);
        for i in 0..5 {
            kept.extend(children.iter().filter(|c| c.path.last().map(|l| l.0) == Some(i)).take(2).cloned());
        }
        for c in &children {
            if kept.len() >= SEARCH_BEAM.max(kept.len()) {
                break;
            }
            kept.push(c.clone());
        }
        if kept.is_empty() {
            return None;
        }
        beam = kept;
    }
    None
}

fn split_with(
    points: &mut [Point],
    component: usize,
    rotations: &[usize],
    tol: &Tolerance,
) -> Result<PentagonSplit, CobordismError> {
    if points.len() != 5 {
        return Err(CobordismError::NotPentagon { len: points.len() });
    }
    let mut fixes = Vec::new();
    if admissible(points, rotations, tol).is_none() {
        let path = search_fixes(points, rotations, tol).ok_or(CobordismError::FixBudgetExceeded {
            component,
            pivots: MAX_FIXES,
            circumradius: score(points, rotations, tol),
        })?;
        for (i, p) in path {
            if let Some(mv) = pivot_in_place(points, component, i, p, tol)? {
                fixes.push(mv);
            }
        }
    }
    let (rotation, apex) = admissible(points, rotations, tol).ok_or_else(|| {
        CobordismError::InvariantViolated(format!("pentagon {component} lost its apex after fixing"))
    })?;
    let (rhombi, face, seams) = split_cells(points, rotation, apex);
    Ok(PentagonSplit {
        rotation,
        apex,
        rhombi,
        face,
        seams,
        fixes,
    })
}

/// Turns a unit pentagon component into its split, pivoting it first if needed.
pub trait PentagonSplitter: Named + Send + Sync {
    fn split(&self, points: &mut [Point], component: usize, tol: &Tolerance) -> Result<PentagonSplit, CobordismError>;
}

/// Uses only the triangle `[v1 v3 v4]`, fixing the pentagon by pivots when needed.
#[derive(Clone, Copy, Debug, Default)]
pub struct LiteralSplitter;

impl Named for LiteralSplitter {
    fn name(&self) -> &'static str {
        "literal"
    }
}

impl PentagonSplitter for LiteralSplitter {
    fn split(&self, points: &mut [Point], component: usize, tol: &Tolerance) -> Result<PentagonSplit, CobordismError> {
        split_with(points, component, &[0], tol)
    }
}

/// Tries `[v1 v3 v4]` first, then the other four cyclic relabelings, before
/// resorting to corrective pivots.
#[derive(Clone, Copy, Debug, Default)]
pub struct RotatingSplitter;

impl Named for RotatingSplitter {
    fn name(&self) -> &'static str {
        "rotating"
    }
}

impl PentagonSplitter for RotatingSplitter {
    fn split(&self, points: &mut [Point], component: usize, tol: &Tolerance) -> Result<PentagonSplit, CobordismError> {
        split_with(points, component, &[0, 1, 2, 3, 4], tol)
    }
}

pub fn pentagon_splitters() -> Registry<dyn PentagonSplitter> {
    Registry::<dyn PentagonSplitter>::new("pentagon splitter")
        .with(Arc::new(RotatingSplitter))
        .with(Arc::new(LiteralSplitter))
        .with_default("rotating")
}

/// Splits a unit pentagon with the literal `[v1 v3 v4]` rule, returning the
/// split and the (possibly pivoted) pentagon.
pub fn pentagon_split(pentagon: &[Point], tol: &Tolerance) -> Result<(PentagonSplit, Vec<Point>), CobordismError> {
    let mut pts = pentagon.to_vec();
    let split = LiteralSplitter.split(&mut pts, 0, tol)?;
    Ok((split, pts))
}

//! Independent re-execution of a ledger's steps from its initial curve.

use super::pentagon::split_cells;
use super::{pivot_in_place, ClosureKind, CobordismError, CobordismLedger, SeamPair, Step, TriangleFace};
use crate::curve::{IntegralCurve, Rhombus};
use crate::geom::{Point, Tolerance};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReplayError {
    #[error("step {step}: component {component} does not exist (or was already closed)")]
    UnknownComponent { step: usize, component: usize },
    #[error("step {step}: {reason}")]
    Mismatch { step: usize, reason: String },
    #[error("step {step}: {source}")]
    Invalid { step: usize, source: CobordismError },
    #[error("replay leaves an invalid curve: {0}")]
    Final(String),
}

/// Cells regenerated by replaying a ledger.
#[derive(Clone, Debug, PartialEq)]
pub struct Replay {
    pub triangles: Vec<TriangleFace>,
    pub seams: Vec<SeamPair>,
    pub rhombi: Vec<Rhombus>,
    pub final_curve: IntegralCurve,
    /// Rhombi charged to each initial component.
    pub rhombi_per_component: Vec<usize>,
}

fn unit(a: &Point, b: &Point, tol: &Tolerance) -> bool {
    ((b - a).norm() - 1.0).abs() <= tol.geom_eps
}

/// Replays `ledger.steps` from `ledger.initial`, checking every recorded old
/// point bitwise and regenerating every cell.
pub fn replay(ledger: &CobordismLedger, tol: &Tolerance) -> Result<Replay, ReplayError> {
    let mut comps: Vec<Option<Vec<Point>>> = ledger.initial.components().iter().cloned().map(Some).collect();
    let mut owner: Vec<usize> = (0..comps.len()).collect();
    let mut out = Replay {
        triangles: Vec::new(),
        seams: Vec::new(),
        rhombi: Vec::new(),
        final_curve: IntegralCurve::empty(),
        rhombi_per_component: vec![0; comps.len()],
    };

    for (step, s) in ledger.steps.iter().enumerate() {
        let mismatch = |reason: String| ReplayError::Mismatch { step, reason };
        match s {
            Step::Pivot(mv) => {
                let pts = comps
                    .get_mut(mv.component)
                    .and_then(Option::as_mut)
                    .ok_or(ReplayError::UnknownComponent {
                        step,
                        component: mv.component,
                    })?;
                if mv.vertex >= pts.len() || pts[mv.vertex] != mv.old_point {
                    return Err(mismatch(format!("vertex {} is not at the recorded old point", mv.vertex)));
                }
                let again = pivot_in_place(pts, mv.component, mv.vertex, mv.new_point, tol)
                    .map_err(|source| ReplayError::Invalid { step, source })?
                    .ok_or_else(|| mismatch("recorded pivot is a no-op".into()))?;
                if again != *mv {
                    return Err(mismatch("regenerated pivot differs from the record".into()));
                }
                if mv.degenerate {
                    let [prev, old, _, new] = mv.rhombus.vertices;
                    out.seams.push(SeamPair::of(prev, old));
                    out.seams.push(SeamPair::of(prev, new));
                } else {
                    out.rhombi.push(mv.rhombus);
                    out.rhombi_per_component[owner[mv.component]] += 1;
                }
            }
            Step::Peel(peel) => {
                let pts = comps
                    .get(peel.component)
                    .and_then(Option::as_ref)
                    .ok_or(ReplayError::UnknownComponent {
                        step,
                        component: peel.component,
                    })?;
                if pts.len() < 6 {
                    return Err(mismatch(format!("cannot peel a {}-gon", pts.len())));
                }
                if peel.pentagon != comps.len() {
                    return Err(mismatch(format!(
                        "pentagon index {} should be {}",
                        peel.pentagon,
                        comps.len()
                    )));
                }
                let z = peel.apex;
                if !unit(&pts[0], &z, tol) || !unit(&z, &pts[3], tol) {
                    return Err(mismatch("peel apex is not at unit distance from v0 and v3".into()));
                }
                let pentagon = vec![pts[0], pts[1], pts[2], pts[3], z];
                let mut rest = vec![pts[0], z];
                rest.extend_from_slice(&pts[3..]);
                out.seams.push(SeamPair::of(pts[0], z));
                out.seams.push(SeamPair::of(z, pts[3]));
                comps[peel.component] = Some(rest);
                comps.push(Some(pentagon));
                owner.push(owner[peel.component]);
            }
            Step::Close(closure) => {
                let pts = comps
                    .get_mut(closure.component)
                    .and_then(Option::take)
                    .ok_or(ReplayError::UnknownComponent {
                        step,
                        component: closure.component,
                    })?;
                match (&closure.kind, pts.len()) {
                    (ClosureKind::Triangle, 3) => out.triangles.push(TriangleFace::new(pts[0], pts[1], pts[2])),
                    (ClosureKind::Rhombus, 4) => {
                        out.rhombi.push(Rhombus::new(pts[0], pts[1], pts[2], pts[3]));
                        out.rhombi_per_component[owner[closure.component]] += 1;
                    }
                    (ClosureKind::Pentagon { rotation, apex }, 5) if *rotation < 5 => {
                        let (a, c, d) = (pts[*rotation], pts[(rotation + 2) % 5], pts[(rotation + 3) % 5]);
                        if ![a, c, d].iter().all(|p| unit(p, apex, tol)) {
                            return Err(mismatch("pentagon apex is not at unit distance from a, c, d".into()));
                        }
                        let (rhombi, face, seams) = split_cells(&pts, *rotation, *apex);
                        out.rhombi.extend(rhombi);
                        out.rhombi_per_component[owner[closure.component]] += 2;
                        out.triangles.push(face);
                        out.seams.extend(seams);
                    }
                    (kind, len) => return Err(mismatch(format!("closure {kind:?} does not fit a {len}-gon"))),
                }
            }
        }
    }

    let remaining: Vec<Vec<Point>> = comps.into_iter().flatten().collect();
    out.final_curve = IntegralCurve::new(remaining, tol).map_err(|e| ReplayError::Final(e.to_string()))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cobordism::reduce_to_rhombi;
    use crate::curve::{random_closed_curve, regular_polygon};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn replay_regenerates_the_ledger() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = IntegralCurve::new(
            vec![random_closed_curve(9, &mut rng), regular_polygon(3), regular_polygon(4)],
            &tol,
        )
        .unwrap();
        let l = reduce_to_rhombi(&c, &tol).unwrap();
        let r = replay(&l, &tol).unwrap();
        assert_eq!(r.rhombi, l.rhombi);
        assert_eq!(r.triangles, l.triangles);
        assert_eq!(r.seams, l.seams);
        assert!(r.final_curve.is_empty());
        assert_eq!(r.rhombi_per_component.iter().sum::<usize>(), l.k());
    }

    #[test]
    fn tampered_old_point_is_caught() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = IntegralCurve::new(vec![random_closed_curve(8, &mut rng)], &tol).unwrap();
        let mut l = reduce_to_rhombi(&c, &tol).unwrap();
        let Some(Step::Pivot(mv)) = l.steps.iter_mut().find(|s| matches!(s, Step::Pivot(_))) else {
            panic!("expected a pivot");
        };
        mv.old_point.x += 1e-3;
        assert!(matches!(replay(&l, &tol), Err(ReplayError::Mismatch { .. })));
    }
}

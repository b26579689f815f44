use super::pentagon::{PentagonSplitter, RotatingSplitter};
use super::planarize::{LeastSquaresPlane, PlaneChoice};
use super::steinitz::{AutoOrder, SteinitzStrategy};
use super::{
    pack_component, pentagon_splitters, plane_choices, planarize_component, rhombus_budget, steinitz_strategies,
    Closure, ClosureKind, CobordismError, CobordismLedger, ComponentReport, Peel, PivotMove, SeamPair, Step,
    TriangleFace,
};
use crate::curve::{best_fit_plane, is_planar, planarity_residual, IntegralCurve, Rhombus};
use crate::geom::{orthonormal_basis, unit_ball_intersection, GeomError, Plane, Point, Tolerance};
use std::sync::Arc;

/// The full reduction pipeline with its pluggable strategies.
#[derive(Clone)]
pub struct Reducer {
    pub tol: Tolerance,
    pub steinitz: Arc<dyn SteinitzStrategy>,
    pub plane: Arc<dyn PlaneChoice>,
    pub splitter: Arc<dyn PentagonSplitter>,
}

impl Default for Reducer {
    fn default() -> Self {
        Self::new(Tolerance::default())
    }
}

impl std::fmt::Debug for Reducer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Reducer")
            .field("tol", &self.tol)
            .field("steinitz", &self.steinitz.name())
            .field("plane", &self.plane.name())
            .field("splitter", &self.splitter.name())
            .finish()
    }
}

/// Accumulates steps and cells while components are being reduced.
struct Builder {
    steps: Vec<Step>,
    triangles: Vec<TriangleFace>,
    seams: Vec<SeamPair>,
    rhombi: Vec<Rhombus>,
    next_component: usize,
}

impl Builder {
    fn pivot(&mut self, mv: PivotMove, report: &mut ComponentReport) {
        if mv.degenerate {
            let [prev, old, _, new] = mv.rhombus.vertices;
            self.seams.push(SeamPair::of(prev, old));
            self.seams.push(SeamPair::of(prev, new));
        } else {
            self.rhombi.push(mv.rhombus);
            report.rhombi += 1;
        }
        self.steps.push(Step::Pivot(mv));
    }
}

impl Reducer {
    pub fn new(tol: Tolerance) -> Self {
        Self {
            tol,
            steinitz: Arc::new(AutoOrder),
            plane: Arc::new(LeastSquaresPlane),
            splitter: Arc::new(RotatingSplitter),
        }
    }

    /// Resolves strategies by their registered names.
    pub fn with_names(tol: Tolerance, steinitz: &str, plane: &str, splitter: &str) -> Result<Self, CobordismError> {
        Ok(Self {
            tol,
            steinitz: steinitz_strategies().get(steinitz)?,
            plane: plane_choices().get(plane)?,
            splitter: pentagon_splitters().get(splitter)?,
        })
    }

    pub fn reduce(&self, curve: &IntegralCurve) -> Result<CobordismLedger, CobordismError> {
        let mut b = Builder {
            steps: Vec::new(),
            triangles: Vec::new(),
            seams: Vec::new(),
            rhombi: Vec::new(),
            next_component: curve.components().len(),
        };
        let mut reports = Vec::with_capacity(curve.components().len());
        for (ci, comp) in curve.components().iter().enumerate() {
            let report = self.reduce_component(comp.clone(), ci, &mut b)?;
            let budget = rhombus_budget(report.n);
            if report.rhombi > budget {
                return Err(CobordismError::BudgetExceeded {
                    stage: "reduce",
                    moves: report.rhombi,
                    budget,
                });
            }
            reports.push(report);
        }
        Ok(CobordismLedger {
            initial: curve.clone(),
            steps: b.steps,
            triangles: b.triangles,
            seams: b.seams,
            rhombi: b.rhombi,
            final_curve: IntegralCurve::empty(),
            components: reports,
        })
    }

    fn reduce_component(&self, mut pts: Vec<Point>, ci: usize, b: &mut Builder) -> Result<ComponentReport, CobordismError> {
        let tol = &self.tol;
        let mut report = ComponentReport {
            n: pts.len(),
            ..Default::default()
        };
        match pts.len() {
            0..=2 => {
                return Err(CobordismError::ComponentTooShort {
                    component: ci,
                    len: pts.len(),
                })
            }
            3 => {
                b.triangles.push(TriangleFace::new(pts[0], pts[1], pts[2]));
                b.steps.push(Step::Close(Closure {
                    component: ci,
                    kind: ClosureKind::Triangle,
                }));
                return Ok(report);
            }
            4 => {
                b.rhombi.push(Rhombus::new(pts[0], pts[1], pts[2], pts[3]));
                report.rhombi = 1;
                b.steps.push(Step::Close(Closure {
                    component: ci,
                    kind: ClosureKind::Rhombus,
                }));
                return Ok(report);
            }
            _ => {}
        }

        let moves = planarize_component(&mut pts, ci, self.plane.as_ref(), tol)?;
        report.planarize_moves = moves.len();
        for mv in moves {
            b.pivot(mv, &mut report);
        }
        let packed = pack_component(&mut pts, ci, self.steinitz.as_ref(), tol)?;
        report.pack_moves = packed.moves.len();
        for mv in packed.moves {
            b.pivot(mv, &mut report);
        }

        let current = ci;
        while pts.len() > 5 {
            let h = is_planar(&pts, tol).ok_or_else(|| CobordismError::NotPlanar {
                component: current,
                residual: planarity_residual(&pts, &best_fit_plane(&pts)),
            })?;
            let z = peel_apex(&pts, &h, tol)?;
            let pentagon_index = b.next_component;
            b.next_component += 1;
            let mut pentagon = vec![pts[0], pts[1], pts[2], pts[3], z];
            let mut rest = Vec::with_capacity(pts.len() - 1);
            rest.extend([pts[0], z]);
            rest.extend_from_slice(&pts[3..]);
            b.steps.push(Step::Peel(Peel {
                component: current,
                apex: z,
                pentagon: pentagon_index,
            }));
            b.seams.push(SeamPair::of(pts[0], z));
            b.seams.push(SeamPair::of(z, pts[3]));
            self.split(&mut pentagon, pentagon_index, b, &mut report)?;
            pts = rest;
        }
        self.split(&mut pts, current, b, &mut report)?;
        Ok(report)
    }

    fn split(
        &self,
        pentagon: &mut [Point],
        component: usize,
        b: &mut Builder,
        report: &mut ComponentReport,
    ) -> Result<(), CobordismError> {
        let split = self.splitter.split(pentagon, component, &self.tol)?;
        report.splits += 1;
        report.fix_pivots += split.fixes.len();
        for mv in split.fixes {
            b.pivot(mv, report);
        }
        b.rhombi.extend(split.rhombi);
        report.rhombi += 2;
        b.triangles.push(split.face);
        b.seams.extend(split.seams);
        b.steps.push(Step::Close(Closure {
            component,
            kind: ClosureKind::Pentagon {
                rotation: split.rotation,
                apex: split.apex,
            },
        }));
        Ok(())
    }
}

/// A point of `B1(v0) ∩ B1(v3) ∩ H`, the one farther from the midpoint of `v1 v2`.
pub(crate) fn peel_apex(pts: &[Point], h: &Plane, tol: &Tolerance) -> Result<Point, CobordismError> {
    let (v0, v3) = (pts[0], pts[3]);
    let away = nalgebra::center(&pts[1], &pts[2]);
    let farther = |a: Point, b: Point| if (b - away).norm() > (a - away).norm() { b } else { a };
    match unit_ball_intersection(&v0, &v3, tol) {
        Ok(circle) => {
            if circle.radius == 0.0 {
                return Ok(circle.center);
            }
            let d = h.normal().cross(&circle.axis()).normalize();
            Ok(farther(circle.center + d * circle.radius, circle.center - d * circle.radius))
        }
        Err(GeomError::Coincident { .. }) => {
            let mut dir = h.project(&v0) - h.project(&away);
            if dir.norm() <= 1e-12 {
                dir = orthonormal_basis(&h.normal()).0;
            }
            Ok(v0 + dir.normalize())
        }
        Err(e) => Err(e.into()),
    }
}

/// Reduces with the default strategies.
pub fn reduce_to_rhombi(curve: &IntegralCurve, tol: &Tolerance) -> Result<CobordismLedger, CobordismError> {
    Reducer::new(*tol).reduce(curve)
}

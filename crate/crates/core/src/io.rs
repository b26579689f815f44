//! Versioned JSON files for curves and ledgers.

use crate::cobordism::{
    Closure, ClosureKind, CobordismLedger, ComponentReport, Peel, PivotMove, SeamPair, Segment, Step, TriangleFace,
};
use crate::curve::{Coords, IntegralCurve, Rhombus};
use crate::geom::{Point, Tolerance};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {found} (expected {FORMAT_VERSION})")]
    Version { found: u32 },
    #[error("invalid curve: {0}")]
    Curve(#[from] crate::curve::CurveError),
}

fn pts(v: &[Point]) -> Vec<Coords> {
    v.iter().map(|&p| p.into()).collect()
}

fn unpts(v: &[Coords]) -> Vec<Point> {
    v.iter().map(|&c| c.into()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub version: u32,
    pub components: Vec<Vec<Coords>>,
}

impl CurveFile {
    pub fn from_curve(c: &IntegralCurve) -> Self {
        Self {
            version: FORMAT_VERSION,
            components: c.components().iter().map(|comp| pts(comp)).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        let f: Self = serde_json::from_str(text)?;
        check_version(f.version)?;
        Ok(f)
    }

    pub fn raw_components(&self) -> Vec<Vec<Point>> {
        self.components.iter().map(|c| unpts(c)).collect()
    }

    /// Unit-subdivided curve; edges must have positive integer lengths.
    pub fn to_curve(&self, tol: &Tolerance) -> Result<IntegralCurve, IoError> {
        Ok(IntegralCurve::from_integer_curve(&self.raw_components(), tol)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data") + "\n"
    }
}

fn check_version(found: u32) -> Result<(), IoError> {
    if found == FORMAT_VERSION {
        Ok(())
    } else {
        Err(IoError::Version { found })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosureName {
    Triangle,
    Rhombus,
    Pentagon,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MoveRecord {
    Pivot {
        component: usize,
        vertex: usize,
        old: Coords,
        new: Coords,
        rhombus: [Coords; 4],
        degenerate: bool,
    },
    Peel {
        component: usize,
        apex: Coords,
        pentagon: usize,
    },
    Close {
        component: usize,
        closure: ClosureName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rotation: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        apex: Option<Coords>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stats {
    pub n: usize,
    pub k: usize,
    pub budget: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentRecord {
    pub n: usize,
    pub planarize: usize,
    pub pack: usize,
    pub splits: usize,
    pub fixes: usize,
    pub rhombi: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerFile {
    pub version: u32,
    pub initial: CurveFile,
    pub moves: Vec<MoveRecord>,
    pub triangles: Vec<[Coords; 3]>,
    pub seams: Vec<[[Coords; 2]; 2]>,
    pub rhombi: Vec<[Coords; 4]>,
    pub final_curve: CurveFile,
    pub stats: Stats,
    #[serde(default)]
    pub components: Vec<ComponentRecord>,
}

fn quad(v: &[Point; 4]) -> [Coords; 4] {
    v.map(Coords::from)
}

fn unquad(v: &[Coords; 4]) -> [Point; 4] {
    v.map(Point::from)
}

impl LedgerFile {
    pub fn from_ledger(l: &CobordismLedger) -> Self {
        let moves = l
            .steps
            .iter()
            .map(|s| match s {
                Step::Pivot(m) => MoveRecord::Pivot {
                    component: m.component,
                    vertex: m.vertex,
                    old: m.old_point.into(),
                    new: m.new_point.into(),
                    rhombus: quad(&m.rhombus.vertices),
                    degenerate: m.degenerate,
                },
                Step::Peel(p) => MoveRecord::Peel {
                    component: p.component,
                    apex: p.apex.into(),
                    pentagon: p.pentagon,
                },
                Step::Close(c) => {
                    let (closure, rotation, apex) = match &c.kind {
                        ClosureKind::Triangle => (ClosureName::Triangle, None, None),
                        ClosureKind::Rhombus => (ClosureName::Rhombus, None, None),
                        ClosureKind::Pentagon { rotation, apex } => {
                            (ClosureName::Pentagon, Some(*rotation), Some((*apex).into()))
                        }
                    };
                    MoveRecord::Close {
                        component: c.component,
                        closure,
                        rotation,
                        apex,
                    }
                }
            })
            .collect();
        Self {
            version: FORMAT_VERSION,
            initial: CurveFile::from_curve(&l.initial),
            moves,
            triangles: l.triangles.iter().map(|t| t.vertices.map(Coords::from)).collect(),
            seams: l
                .seams
                .iter()
                .map(|s| {
                    [
                        [s.first.from.into(), s.first.to.into()],
                        [s.second.from.into(), s.second.to.into()],
                    ]
                })
                .collect(),
            rhombi: l.rhombi.iter().map(|r| quad(&r.vertices)).collect(),
            final_curve: CurveFile::from_curve(&l.final_curve),
            stats: Stats {
                n: l.n(),
                k: l.k(),
                budget: l.budget(),
            },
            components: l
                .components
                .iter()
                .map(|c| ComponentRecord {
                    n: c.n,
                    planarize: c.planarize_moves,
                    pack: c.pack_moves,
                    splits: c.splits,
                    fixes: c.fix_pivots,
                    rhombi: c.rhombi,
                })
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        let f: Self = serde_json::from_str(text)?;
        check_version(f.version)?;
        check_version(f.initial.version)?;
        check_version(f.final_curve.version)?;
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data") + "\n"
    }

    /// The ledger exactly as recorded. Nothing is validated here; geometric
    /// defects (including a non-unit initial curve) surface in the validator.
    pub fn to_ledger(&self) -> CobordismLedger {
        let steps = self
            .moves
            .iter()
            .map(|m| match m {
                MoveRecord::Pivot {
                    component,
                    vertex,
                    old,
                    new,
                    rhombus,
                    degenerate,
                } => {
                    let [a, b, c, d] = unquad(rhombus);
                    Step::Pivot(PivotMove {
                        component: *component,
                        vertex: *vertex,
                        old_point: (*old).into(),
                        new_point: (*new).into(),
                        rhombus: Rhombus::new(a, b, c, d),
                        degenerate: *degenerate,
                    })
                }
                MoveRecord::Peel {
                    component,
                    apex,
                    pentagon,
                } => Step::Peel(Peel {
                    component: *component,
                    apex: (*apex).into(),
                    pentagon: *pentagon,
                }),
                MoveRecord::Close {
                    component,
                    closure,
                    rotation,
                    apex,
                } => Step::Close(Closure {
                    component: *component,
                    kind: match closure {
                        ClosureName::Triangle => ClosureKind::Triangle,
                        ClosureName::Rhombus => ClosureKind::Rhombus,
                        ClosureName::Pentagon => ClosureKind::Pentagon {
                            rotation: rotation.unwrap_or(0),
                            apex: apex.map_or(Point::new(f64::NAN, f64::NAN, f64::NAN), Point::from),
                        },
                    },
                }),
            })
            .collect();
        let seg = |s: &[Coords; 2]| Segment {
            from: s[0].into(),
            to: s[1].into(),
        };
        CobordismLedger {
            initial: IntegralCurve::unchecked(self.initial.raw_components()),
            steps,
            triangles: self
                .triangles
                .iter()
                .map(|t| {
                    let [a, b, c] = t.map(Point::from);
                    TriangleFace::new(a, b, c)
                })
                .collect(),
            seams: self
                .seams
                .iter()
                .map(|s| SeamPair {
                    first: seg(&s[0]),
                    second: seg(&s[1]),
                })
                .collect(),
            rhombi: self
                .rhombi
                .iter()
                .map(|r| {
                    let [a, b, c, d] = unquad(r);
                    Rhombus::new(a, b, c, d)
                })
                .collect(),
            final_curve: IntegralCurve::unchecked(self.final_curve.raw_components()),
            components: self
                .components
                .iter()
                .map(|c| ComponentReport {
                    n: c.n,
                    planarize_moves: c.planarize,
                    pack_moves: c.pack,
                    splits: c.splits,
                    fix_pivots: c.fixes,
                    rhombi: c.rhombi,
                })
                .collect(),
        }
    }
}

//! Graph surfaces with boundary, the named surface catalog, and formal
//! 2-chains of unit cells checked against a reduction ledger.

mod catalog;
mod chain;
mod graph;
mod hexagon;

pub use catalog::{
    catalog, parse_surface_spec, surface_catalog, AntiprismBand, CatalogSurface, PentagonPants, SurfaceBuilder,
    SurfaceParams, ThreeRhombusPants, TriangleDisk,
};
pub use chain::{
    assemble_from_ledger, ledger_chain_defect, validate_ledger, Cell, ChainDefect, Check, DomeChain, LedgerReport,
    SegmentTally, VertexKeyer,
};
pub use graph::{edge_sign, opposite, BoundaryMap, EdgeId, GraphSurface, SamplePolygon};
pub use hexagon::{hexagon_join, rhombus_pair_for_join, HexagonJoin};

use crate::curve::CurveError;
use crate::geom::GeomError;
use crate::registry::UnknownName;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("malformed surface: {0}")]
    Malformed(String),
    #[error("triangle {triangle} violates the strict triangle inequality")]
    TriangleInequality { triangle: usize },
    #[error("boundary component {component} is not a closed walk")]
    OpenBoundary { component: usize },
    #[error("orientations are not coherent: oriented edge {edge} is used {uses} times")]
    NotOrientable { edge: usize, uses: usize },
    #[error("Euler characteristic {chi} does not match the claimed genus ({expected})")]
    Euler { chi: i64, expected: i64 },
    #[error("edge {edge} is not on a boundary walk")]
    NotBoundaryEdge { edge: EdgeId },
    #[error("edge {edge} is not an edge of triangle {triangle}")]
    NotInTriangle { triangle: usize, edge: EdgeId },
    #[error("the 1-skeleton is disconnected")]
    Disconnected,
    #[error("rhombi are not positioned for a join: |v1 v1'| = {shared}, |v2 v2'| = {d2}, |v4 v4'| = {d4}")]
    PositioningViolated { shared: f64, d2: f64, d4: f64 },
    #[error("bad surface spec: {0}")]
    BadSpec(String),
    #[error(transparent)]
    UnknownName(#[from] UnknownName),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

//! Constraint-manifold numerics for polygon and polyhedron schemes: tangent
//! spaces, the form ω, rotation orbits and the boundary differential.

mod certify;
mod linalg;
mod polygon;
mod polyhedron;

pub use certify::{
    certificates, isotropy_certificate, kernel_angle, omega_scale, rank_certificate, Certificate, CertificateConfig,
    CertificateReport, DimsCertificate, IsotropyCertificate, IsotropyReport, KernelCertificate, RankCertificate,
    RankReport, Target, ISOTROPY_RATIO, KERNEL_ANGLE, RANK_GAP,
};
pub use linalg::{kernel_basis, max_principal_angle, project_out, range_basis, rank_summary, RankSummary};
pub use polygon::{kernel_of_omega, omega, omega_gram, polygon_tangent_basis, so3_orbit_tangent, PolygonRealization};
pub use polyhedron::{
    boundary_realization, constraint_jacobian, constraint_residuals, d_delta, d_delta_matrix, max_residual,
    polyhedron_realization, polyhedron_tangent_basis, project_to_scheme, PolyhedronRealization, PROJECTION_RESIDUAL,
};

use crate::surface::SurfaceError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModuliError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("projection onto the constraint set did not converge: {0}")]
    ProjectionDiverged(String),
    #[error("surface is not orientable: {0}")]
    NotOrientable(String),
    #[error("boundary polygons have {0:?} edges; three 4-gons are required")]
    BoundaryShapeMismatch(Vec<usize>),
    #[error("bad target `{0}`")]
    BadTarget(String),
}

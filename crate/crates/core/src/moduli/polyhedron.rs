//! The scheme of a graph surface: edge vectors `q(e)` with fixed lengths,
//! closing around every triangle and every fundamental cycle.

use super::linalg::kernel_basis;
use super::polygon::PolygonRealization;
use super::ModuliError;
use crate::geom::{Tolerance, Vec3};
use crate::surface::{edge_sign, CatalogSurface, EdgeId, GraphSurface};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Projected realizations must satisfy every constraint to this accuracy.
pub const PROJECTION_RESIDUAL: f64 = 1e-12;
const PROJECTION_ITERATIONS: usize = 50;
/// Length of the random tangent step taken before projecting back.
const PERTURBATION: f64 = 0.3;

/// `q(e)` for each undirected edge `u`, stored for the orientation `2u`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyhedronRealization {
    pub q: Vec<Vec3>,
}

impl PolyhedronRealization {
    pub fn from_flat(x: &DVector<f64>) -> Self {
        Self {
            q: (0..x.len() / 3).map(|u| Vec3::new(x[3 * u], x[3 * u + 1], x[3 * u + 2])).collect(),
        }
    }

    pub fn flat(&self) -> DVector<f64> {
        DVector::from_iterator(3 * self.q.len(), self.q.iter().flat_map(|v| [v.x, v.y, v.z]))
    }

    /// `q(e)`, with `q(−e) = −q(e)`.
    pub fn get(&self, e: EdgeId) -> Vec3 {
        self.q[e / 2] * edge_sign(e)
    }

    /// Edge vectors of the catalog coordinates.
    pub fn from_catalog(c: &CatalogSurface) -> Self {
        let s = &c.surface;
        Self {
            q: (0..s.edge_count()).map(|u| c.coords[s.head(2 * u)] - c.coords[s.tail(2 * u)]).collect(),
        }
    }

    /// Keeps the edges that survive a collapse.
    pub fn restrict(&self, map: &[Option<EdgeId>]) -> Self {
        let mut q = vec![Vec3::zeros(); map.iter().flatten().count() / 2];
        for (u, v) in self.q.iter().enumerate() {
            if let Some(new) = map[2 * u] {
                q[new / 2] = *v * edge_sign(new);
            }
        }
        Self { q }
    }
}

/// The linear closure constraints: triangles, then fundamental cycles.
fn closure_walks(s: &GraphSurface) -> Result<Vec<Vec<EdgeId>>, ModuliError> {
    let mut walks: Vec<Vec<EdgeId>> = s.triangles().iter().map(|t| t.to_vec()).collect();
    walks.extend(s.cycle_basis()?);
    Ok(walks)
}

/// Residuals of `|q|² − ℓ²` per edge and `Σ ±q` per closed walk (3 each).
pub fn constraint_residuals(s: &GraphSurface, q: &PolyhedronRealization) -> Result<DVector<f64>, ModuliError> {
    let walks = closure_walks(s)?;
    let m = s.edge_count();
    let mut r = DVector::zeros(m + 3 * walks.len());
    for u in 0..m {
        r[u] = q.q[u].norm_squared() - s.length(2 * u).powi(2);
    }
    for (w, walk) in walks.iter().enumerate() {
        let sum: Vec3 = walk.iter().map(|&e| q.get(e)).sum();
        for c in 0..3 {
            r[m + 3 * w + c] = sum[c];
        }
    }
    Ok(r)
}

pub fn max_residual(s: &GraphSurface, q: &PolyhedronRealization) -> Result<f64, ModuliError> {
    Ok(constraint_residuals(s, q)?.amax())
}

/// Jacobian of [`constraint_residuals`] divided by 2 on the length rows, so
/// that its kernel is `{s : ⟨s(e), q(e)⟩ = 0, closures}`.
pub fn constraint_jacobian(s: &GraphSurface, q: &PolyhedronRealization) -> Result<DMatrix<f64>, ModuliError> {
    let walks = closure_walks(s)?;
    let m = s.edge_count();
    let mut j = DMatrix::zeros(m + 3 * walks.len(), 3 * m);
    for u in 0..m {
        for c in 0..3 {
            j[(u, 3 * u + c)] = q.q[u][c];
        }
    }
    for (w, walk) in walks.iter().enumerate() {
        for &e in walk {
            for c in 0..3 {
                j[(m + 3 * w + c, 3 * (e / 2) + c)] += edge_sign(e);
            }
        }
    }
    Ok(j)
}

/// Gauss–Newton with minimum-norm steps onto the constraint set.
pub fn project_to_scheme(s: &GraphSurface, start: &PolyhedronRealization) -> Result<PolyhedronRealization, ModuliError> {
    let mut q = start.clone();
    for _ in 0..PROJECTION_ITERATIONS {
        let r = constraint_residuals(s, &q)?;
        if r.amax() <= PROJECTION_RESIDUAL {
            return Ok(q);
        }
        // the true Jacobian has 2q on the length rows
        let mut jac = constraint_jacobian(s, &q)?;
        for u in 0..s.edge_count() {
            jac.row_mut(u).scale_mut(2.0);
        }
        let step = jac
            .svd(true, true)
            .solve(&r, 1e-12)
            .map_err(|e| ModuliError::ProjectionDiverged(e.to_string()))?;
        q = PolyhedronRealization::from_flat(&(q.flat() - step));
    }
    let r = max_residual(s, &q)?;
    if r <= PROJECTION_RESIDUAL {
        Ok(q)
    } else {
        Err(ModuliError::ProjectionDiverged(format!(
            "residual {r:.3e} after {PROJECTION_ITERATIONS} iterations"
        )))
    }
}

/// Orthonormal basis (columns) of the tangent space at `q`.
pub fn polyhedron_tangent_basis(
    s: &GraphSurface,
    q: &PolyhedronRealization,
    tol: &Tolerance,
) -> Result<DMatrix<f64>, ModuliError> {
    Ok(kernel_basis(&constraint_jacobian(s, q)?, 3 * s.edge_count(), tol.rank_rel_eps))
}

/// The catalog realization, or (with a seed) a random tangent step from it
/// projected back onto the scheme.
pub fn polyhedron_realization(
    c: &CatalogSurface,
    seed: Option<u64>,
    tol: &Tolerance,
) -> Result<PolyhedronRealization, ModuliError> {
    let base = project_to_scheme(&c.surface, &PolyhedronRealization::from_catalog(c))?;
    let Some(seed) = seed else { return Ok(base) };
    let basis = polyhedron_tangent_basis(&c.surface, &base, tol)?;
    if basis.ncols() == 0 {
        return Ok(base);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = DVector::from_iterator(basis.ncols(), (0..basis.ncols()).map(|_| StandardNormal.sample(&mut rng)));
    let dir = &basis * coeffs;
    let step = dir.normalize() * PERTURBATION;
    project_to_scheme(&c.surface, &PolyhedronRealization::from_flat(&(base.flat() + step)))
}

/// The boundary realization `p = q ∘ δ`.
pub fn boundary_realization(s: &GraphSurface, q: &PolyhedronRealization) -> PolygonRealization {
    PolygonRealization::new(s.boundary().iter().map(|w| w.iter().map(|&e| q.get(e)).collect()).collect())
}

/// The tangent `f^i_j ↦ s(g^i_j)` of the boundary polygons.
pub fn d_delta(s: &GraphSurface, tangent: &DVector<f64>) -> DVector<f64> {
    let edges: Vec<EdgeId> = s.boundary().iter().flatten().copied().collect();
    let mut out = DVector::zeros(3 * edges.len());
    for (j, &e) in edges.iter().enumerate() {
        for c in 0..3 {
            out[3 * j + c] = tangent[3 * (e / 2) + c] * edge_sign(e);
        }
    }
    out
}

/// [`d_delta`] applied to every column.
pub fn d_delta_matrix(s: &GraphSurface, basis: &DMatrix<f64>) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = (0..basis.ncols()).map(|j| d_delta(s, &basis.column(j).into_owned())).collect();
    if cols.is_empty() {
        let rows = 3 * s.boundary().iter().map(Vec::len).sum::<usize>();
        return DMatrix::zeros(rows, 0);
    }
    DMatrix::from_columns(&cols)
}

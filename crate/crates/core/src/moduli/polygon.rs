//! The scheme of polygons: edge vectors `p_i(f)` of fixed lengths closing up,
//! its tangent spaces, the rotation orbits and the form ω.

use super::linalg::{kernel_basis, range_basis};
use crate::curve::random_closed_curve;
use crate::geom::{Point, Tolerance, Vec3};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Edge vectors of a product of polygons, flattened polygon by polygon, edge
/// by edge, coordinate by coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonRealization {
    pub polygons: Vec<Vec<Vec3>>,
}

impl PolygonRealization {
    pub fn new(polygons: Vec<Vec<Vec3>>) -> Self {
        Self { polygons }
    }

    /// Edge vectors of closed vertex cycles.
    pub fn from_cycles(cycles: &[Vec<Point>]) -> Self {
        Self::new(
            cycles
                .iter()
                .map(|c| (0..c.len()).map(|i| c[(i + 1) % c.len()] - c[i]).collect())
                .collect(),
        )
    }

    /// Independent random closed unit polygons with the given edge counts.
    pub fn random<R: Rng + ?Sized>(ks: &[usize], rng: &mut R) -> Self {
        Self::from_cycles(&ks.iter().map(|&k| random_closed_curve(k, rng)).collect::<Vec<_>>())
    }

    pub fn edge_count(&self) -> usize {
        self.polygons.iter().map(Vec::len).sum()
    }

    pub fn dim(&self) -> usize {
        3 * self.edge_count()
    }

    /// Flat index offset (in edges) of each polygon.
    pub fn offsets(&self) -> Vec<usize> {
        self.polygons
            .iter()
            .scan(0, |acc, p| {
                let o = *acc;
                *acc += p.len();
                Some(o)
            })
            .collect()
    }

    fn edges(&self) -> impl Iterator<Item = &Vec3> {
        self.polygons.iter().flatten()
    }

    /// Largest closure defect `|Σ_j p_i(f_j)|`.
    pub fn closure_residual(&self) -> f64 {
        self.polygons
            .iter()
            .map(|p| p.iter().sum::<Vec3>().norm())
            .fold(0.0, f64::max)
    }

    /// Whether every edge of polygon `i` is parallel to its first edge.
    pub fn all_parallel(&self, i: usize, tol: &Tolerance) -> bool {
        let p = &self.polygons[i];
        let d = p[0].normalize();
        p.iter().all(|e| e.cross(&d).norm() <= tol.geom_eps * e.norm())
    }

    /// Rows `p(f)ᵀ` (linearized length) and the closure rows of each polygon.
    pub fn tangent_constraints(&self) -> DMatrix<f64> {
        let n = self.edge_count();
        let rows = n + 3 * self.polygons.len();
        let mut m = DMatrix::zeros(rows, 3 * n);
        for (j, e) in self.edges().enumerate() {
            for c in 0..3 {
                m[(j, 3 * j + c)] = e[c];
            }
        }
        for (i, (p, off)) in self.polygons.iter().zip(self.offsets()).enumerate() {
            for j in 0..p.len() {
                for c in 0..3 {
                    m[(n + 3 * i + c, 3 * (off + j) + c)] = 1.0;
                }
            }
        }
        m
    }
}

/// Orthonormal basis (columns) of the tangent space `{t : ⟨t(f), p(f)⟩ = 0, Σ t = 0}`.
pub fn polygon_tangent_basis(p: &PolygonRealization, tol: &Tolerance) -> DMatrix<f64> {
    kernel_basis(&p.tangent_constraints(), p.dim(), tol.rank_rel_eps)
}

/// Orthonormal basis of the span of `a_i ∘ p_i` over skew `a_i`, one factor at a time.
pub fn so3_orbit_tangent(p: &PolygonRealization, tol: &Tolerance) -> DMatrix<f64> {
    let gens = orbit_generators(p);
    range_basis(&gens, tol.rank_rel_eps)
}

/// The `3 × factors` generators `x ↦ a × x` applied to each factor, unnormalized.
pub(crate) fn orbit_generators(p: &PolygonRealization) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(p.dim(), 3 * p.polygons.len());
    for (i, (poly, off)) in p.polygons.iter().zip(p.offsets()).enumerate() {
        for (a, axis) in [Vec3::x(), Vec3::y(), Vec3::z()].iter().enumerate() {
            for (j, e) in poly.iter().enumerate() {
                let v = axis.cross(e);
                for c in 0..3 {
                    m[(3 * (off + j) + c, 3 * i + a)] = v[c];
                }
            }
        }
    }
    m
}

/// `Σ det[t(f), t'(f), p(f)] / ℓ(f)²` over all edges.
pub fn omega(p: &PolygonRealization, t: &DVector<f64>, t2: &DVector<f64>) -> f64 {
    p.edges()
        .enumerate()
        .map(|(j, e)| {
            let a = Vec3::new(t[3 * j], t[3 * j + 1], t[3 * j + 2]);
            let b = Vec3::new(t2[3 * j], t2[3 * j + 1], t2[3 * j + 2]);
            a.cross(&b).dot(e) / e.norm_squared()
        })
        .sum()
}

/// Gram matrix `ω(b_i, b_j)` over the columns of `basis`.
pub fn omega_gram(p: &PolygonRealization, basis: &DMatrix<f64>) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = (0..basis.ncols()).map(|j| basis.column(j).into_owned()).collect();
    DMatrix::from_fn(cols.len(), cols.len(), |i, j| omega(p, &cols[i], &cols[j]))
}

/// Orthonormal basis of the tangent vectors `t` with `ω(t, ·) = 0` on the tangent space.
pub fn kernel_of_omega(p: &PolygonRealization, tol: &Tolerance) -> DMatrix<f64> {
    let basis = polygon_tangent_basis(p, tol);
    let gram = omega_gram(p, &basis);
    let coeffs = kernel_basis(&gram, basis.ncols(), tol.rank_rel_eps);
    range_basis(&(basis * coeffs), tol.rank_rel_eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::regular_polygon;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generic_dimensions() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 3..=8 {
            let p = PolygonRealization::random(&[k], &mut rng);
            assert!(p.closure_residual() < 1e-12);
            assert_eq!(polygon_tangent_basis(&p, &tol).ncols(), 2 * k - 3, "k={k}");
        }
    }

    #[test]
    fn parallel_square_gains_a_dimension() {
        let tol = Tolerance::default();
        let e = Vec3::x();
        let p = PolygonRealization::new(vec![vec![e, -e, e, -e]]);
        assert!(p.all_parallel(0, &tol));
        assert_eq!(polygon_tangent_basis(&p, &tol).ncols(), 6);
        assert_eq!(so3_orbit_tangent(&p, &tol).ncols(), 2);
    }

    #[test]
    fn omega_is_skew_and_kills_rotations() {
        let tol = Tolerance::default();
        let p = PolygonRealization::from_cycles(&[regular_polygon(4)]);
        let b = polygon_tangent_basis(&p, &tol);
        let g = omega_gram(&p, &b);
        assert!((&g + g.transpose()).norm() < 1e-12);
        let orbit = so3_orbit_tangent(&p, &tol);
        let mixed = DMatrix::from_fn(b.ncols(), orbit.ncols(), |i, j| {
            omega(&p, &b.column(i).into_owned(), &orbit.column(j).into_owned())
        });
        assert!(mixed.norm() < 1e-12);
    }
}

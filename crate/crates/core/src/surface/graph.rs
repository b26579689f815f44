use super::SurfaceError;
use crate::geom::Point;
use std::collections::{HashMap, VecDeque};

/// Oriented edge id. Ids `2u` and `2u + 1` are the two orientations of the
/// undirected edge `u`; `2u` runs from the smaller vertex to the larger one.
pub type EdgeId = usize;

/// The edge involution `e ↦ −e`.
pub fn opposite(e: EdgeId) -> EdgeId {
    e ^ 1
}

/// +1 for `2u`, −1 for `2u + 1`.
pub fn edge_sign(e: EdgeId) -> f64 {
    if e & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A triangulated surface with boundary walks.
///
/// Every triangle is an oriented edge triple forming a closed walk; each
/// boundary component is a closed walk of oriented edges. The surface lives in
/// a closed surface of the given genus, the boundary walks bounding the
/// complementary disks.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphSurface {
    vertex_count: usize,
    ends: Vec<(usize, usize)>,
    lengths: Vec<f64>,
    triangles: Vec<[EdgeId; 3]>,
    boundary: Vec<Vec<EdgeId>>,
    genus: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplePolygon {
    pub lengths: Vec<f64>,
}

impl SamplePolygon {
    /// `2 ℓ(f_i) < Σ ℓ` for every edge.
    pub fn is_nondegenerate(&self) -> bool {
        let total: f64 = self.lengths.iter().sum();
        self.lengths.len() >= 3 && self.lengths.iter().all(|&l| l > 0.0 && 2.0 * l < total)
    }
}

/// `walks[i][j]` is the surface edge that polygon edge `f^i_j` maps to.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMap {
    pub walks: Vec<Vec<EdgeId>>,
}

impl GraphSurface {
    /// Builds a surface from undirected edges `(a, b)`, triangles and boundary
    /// walks given as oriented edge ids, validating every invariant.
    pub fn new(
        vertex_count: usize,
        ends: Vec<(usize, usize)>,
        lengths: Vec<f64>,
        triangles: Vec<[EdgeId; 3]>,
        boundary: Vec<Vec<EdgeId>>,
        genus: usize,
    ) -> Result<Self, SurfaceError> {
        let s = Self {
            vertex_count,
            ends,
            lengths,
            triangles,
            boundary,
            genus,
        };
        s.validate()?;
        Ok(s)
    }

    /// Builds a surface from vertex cycles, with edge lengths measured on `coords`.
    pub fn from_cycles(
        coords: &[Point],
        triangles: &[[usize; 3]],
        walks: &[Vec<usize>],
        genus: usize,
    ) -> Result<Self, SurfaceError> {
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut ends = Vec::new();
        let mut edge = |a: usize, b: usize| -> Result<EdgeId, SurfaceError> {
            if a == b || a >= coords.len() || b >= coords.len() {
                return Err(SurfaceError::Malformed(format!("bad edge {a}-{b}")));
            }
            let key = (a.min(b), a.max(b));
            let u = *index.entry(key).or_insert_with(|| {
                ends.push(key);
                ends.len() - 1
            });
            Ok(if a < b { 2 * u } else { 2 * u + 1 })
        };
        let mut tris = Vec::with_capacity(triangles.len());
        for t in triangles {
            tris.push([edge(t[0], t[1])?, edge(t[1], t[2])?, edge(t[2], t[0])?]);
        }
        let mut bnd = Vec::with_capacity(walks.len());
        for w in walks {
            let walk = (0..w.len())
                .map(|i| edge(w[i], w[(i + 1) % w.len()]))
                .collect::<Result<Vec<_>, _>>()?;
            bnd.push(walk);
        }
        let lengths = ends.iter().map(|&(a, b)| (coords[b] - coords[a]).norm()).collect();
        Self::new(coords.len(), ends, lengths, tris, bnd, genus)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Number of undirected edges (`|E| / 2`).
    pub fn edge_count(&self) -> usize {
        self.ends.len()
    }

    pub fn triangles(&self) -> &[[EdgeId; 3]] {
        &self.triangles
    }

    pub fn boundary(&self) -> &[Vec<EdgeId>] {
        &self.boundary
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn tail(&self, e: EdgeId) -> usize {
        let (a, b) = self.ends[e / 2];
        if e & 1 == 0 {
            a
        } else {
            b
        }
    }

    pub fn head(&self, e: EdgeId) -> usize {
        self.tail(opposite(e))
    }

    pub fn length(&self, e: EdgeId) -> f64 {
        self.lengths[e / 2]
    }

    /// `|V| − |E|/2 + |T| + n`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.ends.len() as i64 + self.triangles.len() as i64 + self.boundary.len() as i64
    }

    fn closed_walk(&self, walk: &[EdgeId]) -> bool {
        !walk.is_empty() && (0..walk.len()).all(|i| self.head(walk[i]) == self.tail(walk[(i + 1) % walk.len()]))
    }

    /// Re-runs every structural check: closed walks, triangle inequalities,
    /// coherent orientation and the Euler count.
    pub fn check_orientable(&self) -> Result<(), SurfaceError> {
        self.validate()
    }

    fn validate(&self) -> Result<(), SurfaceError> {
        let m = self.ends.len();
        if self.lengths.len() != m {
            return Err(SurfaceError::Malformed("one length per edge expected".into()));
        }
        for (u, &(a, b)) in self.ends.iter().enumerate() {
            if a >= b || b >= self.vertex_count {
                return Err(SurfaceError::Malformed(format!("edge {u} has ends {a}, {b}")));
            }
            if !(self.lengths[u] > 0.0 && self.lengths[u].is_finite()) {
                return Err(SurfaceError::Malformed(format!("edge {u} has length {}", self.lengths[u])));
            }
        }
        let in_range = |e: &EdgeId| *e < 2 * m;
        for (i, t) in self.triangles.iter().enumerate() {
            if !t.iter().all(in_range) || !self.closed_walk(t) {
                return Err(SurfaceError::Malformed(format!("triangle {i} is not a closed edge triple")));
            }
            let l = t.map(|e| self.length(e));
            if !(l[0] + l[1] > l[2] && l[1] + l[2] > l[0] && l[2] + l[0] > l[1]) {
                return Err(SurfaceError::TriangleInequality { triangle: i });
            }
        }
        for (i, w) in self.boundary.iter().enumerate() {
            if !w.iter().all(in_range) || !self.closed_walk(w) {
                return Err(SurfaceError::OpenBoundary { component: i });
            }
        }
        // Every oriented edge is used once by a triangle or once by the
        // (reversed) boundary of a complementary disk.
        let mut uses = vec![0usize; 2 * m];
        for t in &self.triangles {
            for &e in t {
                uses[e] += 1;
            }
        }
        for w in &self.boundary {
            for &e in w {
                uses[opposite(e)] += 1;
            }
        }
        if let Some(e) = uses.iter().position(|&c| c != 1) {
            return Err(SurfaceError::NotOrientable { edge: e, uses: uses[e] });
        }
        let expected = 2 - 2 * self.genus as i64;
        let chi = self.euler_characteristic();
        if chi != expected {
            return Err(SurfaceError::Euler { chi, expected });
        }
        Ok(())
    }

    /// One polygon per boundary walk, with the walk as the boundary map.
    pub fn boundary_polygons(&self) -> (Vec<SamplePolygon>, BoundaryMap) {
        let polys = self
            .boundary
            .iter()
            .map(|w| SamplePolygon {
                lengths: w.iter().map(|&e| self.length(e)).collect(),
            })
            .collect();
        (
            polys,
            BoundaryMap {
                walks: self.boundary.clone(),
            },
        )
    }

    /// Triangles that have an edge lying on a boundary walk, with that edge.
    pub fn collapsible(&self) -> Vec<(usize, EdgeId)> {
        let on_boundary: std::collections::HashSet<EdgeId> = self.boundary.iter().flatten().copied().collect();
        self.triangles
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.iter().find(|e| on_boundary.contains(e)).map(|&e| (i, e)))
            .collect()
    }

    /// Removes triangle `t` through its boundary edge `g`.
    pub fn collapse(&self, t: usize, g: EdgeId) -> Result<GraphSurface, SurfaceError> {
        self.collapse_with_map(t, g).map(|(s, _)| s)
    }

    /// As [`collapse`](Self::collapse), also returning the old → new edge id map.
    pub fn collapse_with_map(&self, t: usize, g: EdgeId) -> Result<(GraphSurface, Vec<Option<EdgeId>>), SurfaceError> {
        let tri = *self.triangles.get(t).ok_or(SurfaceError::NotInTriangle { triangle: t, edge: g })?;
        let pos = tri
            .iter()
            .position(|&e| e == g)
            .ok_or(SurfaceError::NotInTriangle { triangle: t, edge: g })?;
        let (e, e2) = (tri[(pos + 1) % 3], tri[(pos + 2) % 3]);
        let (ci, wi) = self
            .boundary
            .iter()
            .enumerate()
            .find_map(|(ci, w)| w.iter().position(|&x| x == g).map(|wi| (ci, wi)))
            .ok_or(SurfaceError::NotBoundaryEdge { edge: g })?;

        let removed = g / 2;
        let map: Vec<Option<EdgeId>> = (0..2 * self.ends.len())
            .map(|old| match (old / 2).cmp(&removed) {
                std::cmp::Ordering::Less => Some(old),
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Greater => Some(old - 2),
            })
            .collect();
        let remap = |x: EdgeId| map[x].expect("surviving edge");

        let mut ends = self.ends.clone();
        ends.remove(removed);
        let mut lengths = self.lengths.clone();
        lengths.remove(removed);
        let triangles = self
            .triangles
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != t)
            .map(|(_, tri)| tri.map(remap))
            .collect();
        let mut boundary = self.boundary.clone();
        boundary[ci].splice(wi..=wi, [opposite(e2), opposite(e)]);
        let boundary = boundary
            .into_iter()
            .map(|w| w.into_iter().map(remap).collect())
            .collect();
        let s = GraphSurface::new(self.vertex_count, ends, lengths, triangles, boundary, self.genus)?;
        Ok((s, map))
    }

    /// Fundamental cycles of a breadth-first spanning tree of the 1-skeleton,
    /// one per non-tree edge, each a closed walk of oriented edges.
    pub fn cycle_basis(&self) -> Result<Vec<Vec<EdgeId>>, SurfaceError> {
        let n = self.vertex_count;
        let mut adj: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
        for u in 0..self.ends.len() {
            adj[self.tail(2 * u)].push(2 * u);
            adj[self.tail(2 * u + 1)].push(2 * u + 1);
        }
        // parent edge (pointing towards the vertex) and depth
        let mut parent: Vec<Option<EdgeId>> = vec![None; n];
        let mut depth = vec![usize::MAX; n];
        let mut tree = vec![false; self.ends.len()];
        let mut queue = VecDeque::from([0]);
        depth[0] = 0;
        while let Some(v) = queue.pop_front() {
            for &e in &adj[v] {
                let w = self.head(e);
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent[w] = Some(e);
                    tree[e / 2] = true;
                    queue.push_back(w);
                }
            }
        }
        if depth.contains(&usize::MAX) {
            return Err(SurfaceError::Disconnected);
        }
        let path_from_root = |mut v: usize| -> Vec<EdgeId> {
            let mut path = Vec::new();
            while let Some(e) = parent[v] {
                path.push(e);
                v = self.tail(e);
            }
            path.reverse();
            path
        };
        let mut cycles = Vec::new();
        for u in (0..self.ends.len()).filter(|&u| !tree[u]) {
            let e = 2 * u;
            let to_tail = path_from_root(self.tail(e));
            let to_head = path_from_root(self.head(e));
            let common = to_tail.iter().zip(&to_head).take_while(|(a, b)| a == b).count();
            // lca → tail, e, head → lca
            let mut cycle: Vec<EdgeId> = to_tail[common..].to_vec();
            cycle.push(e);
            cycle.extend(to_head[common..].iter().rev().map(|&x| opposite(x)));
            cycles.push(cycle);
        }
        Ok(cycles)
    }

    /// Signed edge-incidence vector of a closed walk.
    pub fn chain_vector(&self, walk: &[EdgeId]) -> Vec<f64> {
        let mut v = vec![0.0; self.ends.len()];
        for &e in walk {
            v[e / 2] += edge_sign(e);
        }
        v
    }

    /// First Betti number of the surface: cycle rank of the 1-skeleton minus
    /// the rank of the triangle boundaries.
    pub fn first_betti(&self) -> Result<usize, SurfaceError> {
        let cycles = self.cycle_basis()?;
        let rows: Vec<Vec<f64>> = self.triangles.iter().map(|t| self.chain_vector(t)).collect();
        Ok(cycles.len() - matrix_rank(&rows, self.ends.len()))
    }
}

fn matrix_rank(rows: &[Vec<f64>], cols: usize) -> usize {
    if rows.is_empty() || cols == 0 {
        return 0;
    }
    let m = nalgebra::DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    m.rank(1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::regular_polygon;

    fn disk() -> GraphSurface {
        GraphSurface::from_cycles(&regular_polygon(3), &[[0, 1, 2]], &[vec![0, 1, 2]], 0).unwrap()
    }

    #[test]
    fn triangle_disk_counts() {
        let s = disk();
        assert_eq!((s.vertex_count(), s.edge_count(), s.triangles().len(), s.boundary().len()), (3, 3, 1, 1));
        assert_eq!(s.euler_characteristic(), 2);
        assert_eq!(s.first_betti().unwrap(), 0);
        let (polys, map) = s.boundary_polygons();
        assert_eq!(polys[0].lengths.len(), 3);
        assert!(polys[0].is_nondegenerate());
        assert_eq!(map.walks[0], s.boundary()[0]);
    }

    #[test]
    fn reversed_boundary_is_rejected() {
        let err = GraphSurface::from_cycles(&regular_polygon(3), &[[0, 1, 2]], &[vec![2, 1, 0]], 0).unwrap_err();
        assert!(matches!(err, SurfaceError::NotOrientable { .. }));
    }

    #[test]
    fn collapsing_the_disk_leaves_a_doubled_path() {
        let s = disk();
        let (c, map) = s.collapse_with_map(0, s.triangles()[0][0]).unwrap();
        assert_eq!(c.edge_count(), 2);
        assert!(c.triangles().is_empty());
        assert_eq!(c.boundary()[0].len(), 4);
        assert_eq!(map.iter().filter(|m| m.is_none()).count(), 2);
        assert_eq!(c.euler_characteristic(), 2);
    }

    #[test]
    fn collapse_errors() {
        let s = disk();
        assert!(matches!(s.collapse(0, 99), Err(SurfaceError::NotInTriangle { .. })));
        assert!(matches!(s.collapse(3, 0), Err(SurfaceError::NotInTriangle { .. })));
    }

    #[test]
    fn degenerate_sample_polygon() {
        assert!(!SamplePolygon { lengths: vec![1.0, 1.0] }.is_nondegenerate());
        assert!(!SamplePolygon { lengths: vec![1.0, 1.0, 2.0] }.is_nondegenerate());
        assert!(SamplePolygon { lengths: vec![1.0; 4] }.is_nondegenerate());
    }
}

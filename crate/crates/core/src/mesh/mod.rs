//! Polygonal meshes: data model, validation, generators, quality measures and
//! text I/O.

mod generators;
mod io;
mod quality;
mod voronoi;

use std::collections::HashMap;

use nalgebra::{Point2, Vector2};

use crate::error::{Result, VemError};
use crate::scalar::Scalar;

pub use generators::{
    gen_disk_triangles, gen_square_quads, gen_square_triangles, gen_web_hexagons,
    gen_web_hexagons_with_amplitude, WEB_DISPLACEMENT_FRACTION,
};
pub use io::{read_mesh, read_mesh_str, write_mesh, write_mesh_string, MESH_HEADER};
pub use quality::{mesh_quality, CellQuality, QualityReport};
pub use voronoi::{gen_voronoi_cvt, voronoi_from_seeds, VoronoiDomain};

/// Which analytic domain a mesh discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainTag {
    /// The unit square `[0,1]^2`.
    Square,
    /// The closed unit disk, approximated by a polygon.
    Disk,
    Custom,
}

/// A unique mesh edge. `vertices[0] < vertices[1]` always holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeshEdge {
    pub vertices: [usize; 2],
    /// Cell on whose boundary the edge runs from `vertices[0]` to
    /// `vertices[1]` counter-clockwise, or the only adjacent cell.
    pub cells: [Option<usize>; 2],
}

impl MeshEdge {
    pub fn is_boundary(&self) -> bool {
        self.cells[0].is_none() || self.cells[1].is_none()
    }
}

/// A conforming mesh of simple, counter-clockwise polygons.
#[derive(Debug, Clone)]
pub struct PolyMesh<T: Scalar> {
    vertices: Vec<Point2<T>>,
    cells: Vec<Vec<usize>>,
    edges: Vec<MeshEdge>,
    /// `cell_edges[c][i]` is the global edge joining local vertices `i` and `i+1`.
    cell_edges: Vec<Vec<usize>>,
    boundary_vertex: Vec<bool>,
    domain: DomainTag,
}

impl<T: Scalar> PartialEq for PolyMesh<T> {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.cells == other.cells && self.domain == other.domain
    }
}

/// Geometric data of one cell.
#[derive(Debug, Clone)]
pub struct CellGeometry<T: Scalar> {
    pub centroid: Point2<T>,
    pub diameter: T,
    pub area: T,
    /// Outward unit normal of local edge `i` (from vertex `i` to `i+1`).
    pub normals: Vec<Vector2<T>>,
    pub edge_lengths: Vec<T>,
}

/// Twice the signed area of a closed polygon (shoelace formula).
pub fn signed_area2<T: Scalar>(pts: &[Point2<T>]) -> T {
    let n = pts.len();
    let mut s = T::zero();
    for i in 0..n {
        let p = &pts[i];
        let q = &pts[(i + 1) % n];
        s += p.x * q.y - q.x * p.y;
    }
    s
}

/// Area centroid of a polygon with nonzero area.
pub fn polygon_centroid<T: Scalar>(pts: &[Point2<T>]) -> Point2<T> {
    let n = pts.len();
    // shift to the first vertex to limit cancellation
    let o = pts[0];
    let (mut a, mut cx, mut cy) = (T::zero(), T::zero(), T::zero());
    for i in 0..n {
        let p = pts[i] - o;
        let q = pts[(i + 1) % n] - o;
        let cr = p.x * q.y - q.x * p.y;
        a += cr;
        cx += (p.x + q.x) * cr;
        cy += (p.y + q.y) * cr;
    }
    let three = T::lit(3.0);
    Point2::new(o.x + cx / (three * a), o.y + cy / (three * a))
}

fn orient<T: Scalar>(a: &Point2<T>, b: &Point2<T>, c: &Point2<T>) -> T {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment<T: Scalar>(a: &Point2<T>, b: &Point2<T>, p: &Point2<T>) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test.
pub(crate) fn segments_intersect<T: Scalar>(
    p1: &Point2<T>,
    p2: &Point2<T>,
    q1: &Point2<T>,
    q2: &Point2<T>,
) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    let z = T::zero();
    if ((d1 > z && d2 < z) || (d1 < z && d2 > z)) && ((d3 > z && d4 < z) || (d3 < z && d4 > z)) {
        return true;
    }
    (d1 == z && on_segment(q1, q2, p1))
        || (d2 == z && on_segment(q1, q2, p2))
        || (d3 == z && on_segment(p1, p2, q1))
        || (d4 == z && on_segment(p1, p2, q2))
}

/// True when the closed polygon has no self-intersections and no repeated
/// vertices. Collinear consecutive vertices are allowed.
pub fn is_simple_polygon<T: Scalar>(pts: &[Point2<T>]) -> bool {
    let n = pts.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if pts[i] == pts[j] {
                return false;
            }
        }
    }
    if n == 3 {
        return orient(&pts[0], &pts[1], &pts[2]) != T::zero();
    }
    for i in 0..n {
        let a1 = &pts[i];
        let a2 = &pts[(i + 1) % n];
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let b1 = &pts[j];
            let b2 = &pts[(j + 1) % n];
            if segments_intersect(a1, a2, b1, b2) {
                return false;
            }
        }
    }
    // adjacent edges folding back onto each other
    for i in 0..n {
        let a = &pts[(i + n - 1) % n];
        let b = &pts[i];
        let c = &pts[(i + 1) % n];
        if orient(a, b, c) == T::zero() && (c - b).dot(&(a - b)) > T::zero() {
            return false;
        }
    }
    true
}

impl<T: Scalar> PolyMesh<T> {
    /// Builds and validates a mesh. Clockwise cells are rejected; use
    /// [`PolyMesh::new_reorienting`] to flip them instead.
    pub fn new(vertices: Vec<Point2<T>>, cells: Vec<Vec<usize>>, domain: DomainTag) -> Result<Self> {
        Self::build(vertices, cells, domain, false).map(|(m, _)| m)
    }

    /// Like [`PolyMesh::new`] but reverses clockwise cells, returning the
    /// indices of the cells that were flipped.
    pub fn new_reorienting(
        vertices: Vec<Point2<T>>,
        cells: Vec<Vec<usize>>,
        domain: DomainTag,
    ) -> Result<(Self, Vec<usize>)> {
        Self::build(vertices, cells, domain, true)
    }

    fn build(
        vertices: Vec<Point2<T>>,
        mut cells: Vec<Vec<usize>>,
        domain: DomainTag,
        reorient: bool,
    ) -> Result<(Self, Vec<usize>)> {
        let nv = vertices.len();
        let mut flipped = Vec::new();
        for (c, cell) in cells.iter_mut().enumerate() {
            if cell.len() < 3 {
                return Err(VemError::InvalidMesh(format!("cell {c}: fewer than 3 vertices")));
            }
            if let Some(&bad) = cell.iter().find(|&&v| v >= nv) {
                return Err(VemError::InvalidMesh(format!(
                    "cell {c}: vertex index {bad} out of range"
                )));
            }
            let pts: Vec<_> = cell.iter().map(|&v| vertices[v]).collect();
            if !is_simple_polygon(&pts) {
                return Err(VemError::InvalidMesh(format!("cell {c}: polygon is not simple")));
            }
            let a2 = signed_area2(&pts);
            if a2 < T::zero() {
                if reorient {
                    cell.reverse();
                    flipped.push(c);
                } else {
                    return Err(VemError::InvalidMesh(format!("cell {c}: clockwise orientation")));
                }
            } else if a2 == T::zero() {
                return Err(VemError::InvalidMesh(format!("cell {c}: zero area")));
            }
        }

        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges: Vec<MeshEdge> = Vec::new();
        let mut cell_edges = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            let n = cell.len();
            let mut ce = Vec::with_capacity(n);
            for i in 0..n {
                let a = cell[i];
                let b = cell[(i + 1) % n];
                let key = [a.min(b), a.max(b)];
                // slot 0: the cell traversing the edge from low to high index
                let slot = if a < b { 0 } else { 1 };
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(MeshEdge { vertices: key, cells: [None, None] });
                    edges.len() - 1
                });
                if edges[e].cells[slot].is_some() {
                    return Err(VemError::InvalidMesh(format!(
                        "edge ({}, {}) traversed twice in the same direction (cell {c})",
                        key[0], key[1]
                    )));
                }
                edges[e].cells[slot] = Some(c);
                ce.push(e);
            }
            cell_edges.push(ce);
        }
        let mut boundary_vertex = vec![false; nv];
        for e in &edges {
            if e.is_boundary() {
                boundary_vertex[e.vertices[0]] = true;
                boundary_vertex[e.vertices[1]] = true;
            }
        }
        let mut used = vec![false; nv];
        for cell in &cells {
            for &v in cell {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(VemError::InvalidMesh(format!("vertex {v} belongs to no cell")));
        }
        let mesh = Self { vertices, cells, edges, cell_edges, boundary_vertex, domain };
        Ok((mesh, flipped))
    }

    pub fn vertices(&self) -> &[Point2<T>] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cells[c]
    }

    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    pub fn cell_edges(&self, c: usize) -> &[usize] {
        &self.cell_edges[c]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn domain(&self) -> DomainTag {
        self.domain
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edges[e].is_boundary()
    }

    pub fn num_internal_vertices(&self) -> usize {
        self.boundary_vertex.iter().filter(|b| !**b).count()
    }

    pub fn num_internal_edges(&self) -> usize {
        self.edges.iter().filter(|e| !e.is_boundary()).count()
    }

    /// Coordinates of the vertices of cell `c`, counter-clockwise.
    pub fn cell_points(&self, c: usize) -> Vec<Point2<T>> {
        self.cells[c].iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn cell_area(&self, c: usize) -> T {
        signed_area2(&self.cell_points(c)) * T::lit(0.5)
    }

    pub fn total_area(&self) -> T {
        (0..self.num_cells()).fold(T::zero(), |s, c| s + self.cell_area(c))
    }

    pub fn cell_geometry(&self, c: usize) -> CellGeometry<T> {
        let pts = self.cell_points(c);
        let n = pts.len();
        let area = signed_area2(&pts) * T::lit(0.5);
        let centroid = polygon_centroid(&pts);
        let mut diameter = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                diameter = diameter.max((pts[i] - pts[j]).norm());
            }
        }
        let mut normals = Vec::with_capacity(n);
        let mut edge_lengths = Vec::with_capacity(n);
        for i in 0..n {
            let t = pts[(i + 1) % n] - pts[i];
            let l = t.norm();
            normals.push(Vector2::new(t.y / l, -t.x / l));
            edge_lengths.push(l);
        }
        CellGeometry { centroid, diameter, area, normals, edge_lengths }
    }

    /// Largest cell diameter.
    pub fn max_diameter(&self) -> T {
        (0..self.num_cells()).fold(T::zero(), |h, c| h.max(self.cell_geometry(c).diameter))
    }

    /// Returns a copy with cells listed in the order given by `perm`
    /// (`perm[new] = old`).
    pub fn reorder_cells(&self, perm: &[usize]) -> Result<Self> {
        let cells = perm.iter().map(|&c| self.cells[c].clone()).collect();
        Self::new(self.vertices.clone(), cells, self.domain)
    }

    /// Converts the coordinates to another scalar type.
    pub fn cast<U: Scalar>(&self) -> PolyMesh<U> {
        PolyMesh {
            vertices: self
                .vertices
                .iter()
                .map(|p| Point2::new(U::lit(p.x.as_f64()), U::lit(p.y.as_f64())))
                .collect(),
            cells: self.cells.clone(),
            edges: self.edges.clone(),
            cell_edges: self.cell_edges.clone(),
            boundary_vertex: self.boundary_vertex.clone(),
            domain: self.domain,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> PolyMesh<f64> {
        let v = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        PolyMesh::new(v, vec![vec![0, 1, 2, 3]], DomainTag::Square).unwrap()
    }

    #[test]
    fn single_square_geometry() {
        let m = unit_square();
        let g = m.cell_geometry(0);
        assert!((g.area - 1.0).abs() < 1e-15);
        assert!((g.diameter - 2f64.sqrt()).abs() < 1e-15);
        assert!((g.centroid - Point2::new(0.5, 0.5)).norm() < 1e-15);
        let mut closure = Vector2::zeros();
        for (n, l) in g.normals.iter().zip(&g.edge_lengths) {
            assert!((n.norm() - 1.0).abs() < 1e-12);
            closure += n * *l;
        }
        assert!(closure.norm() < 1e-12);
        assert_eq!(m.num_edges(), 4);
        assert!((0..4).all(|e| m.is_boundary_edge(e)));
    }

    #[test]
    fn rejects_clockwise_and_bad_indices() {
        let v = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        assert!(PolyMesh::new(v.clone(), vec![vec![0, 2, 1]], DomainTag::Custom).is_err());
        let (m, flipped) =
            PolyMesh::new_reorienting(v.clone(), vec![vec![0, 2, 1]], DomainTag::Custom).unwrap();
        assert_eq!(flipped, vec![0]);
        assert!(m.cell_area(0) > 0.0);
        let err = PolyMesh::new(v, vec![vec![0, 1, 99]], DomainTag::Custom).unwrap_err();
        assert!(err.to_string().contains("vertex index 99 out of range"));
    }

    #[test]
    fn bowtie_is_not_simple() {
        let p = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        assert!(!is_simple_polygon(&p));
    }

    #[test]
    fn collinear_vertex_is_allowed() {
        let p = [
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        assert!(is_simple_polygon(&p));
    }
}

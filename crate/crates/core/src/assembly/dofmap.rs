use nalgebra::{DVector, Point2, Vector2};

use crate::element::DofLayout;
use crate::error::{Result, VemError};
use crate::mesh::PolyMesh;
use crate::polyquad::{edge_nodes, poly_dim};
use crate::scalar::Scalar;

/// Global numbering of velocity and pressure unknowns.
///
/// Velocity: vertex values (`2v + c`), then edge-node values (nodes of edge
/// `e` ordered from its lower vertex index), then per-cell interior moments.
/// Pressure: `n_p` coefficients per cell in the cell's orthonormal basis of
/// `P_{k-1}`.
#[derive(Debug, Clone)]
pub struct DofMap<T: Scalar> {
    pub k: usize,
    pub n_velocity: usize,
    pub n_pressure: usize,
    /// Pressure coefficients per cell.
    pub n_p: usize,
    /// Number of velocity values located at points (vertices and edge nodes).
    pub n_point: usize,
    /// `cell_dofs[c][local] = global velocity index`.
    pub cell_dofs: Vec<Vec<usize>>,
    /// Position of point DoF pair `g / 2`.
    pub points: Vec<Point2<T>>,
    /// Boundary point DoFs carry Dirichlet data.
    pub dirichlet: Vec<bool>,
    /// Global velocity index to its position among free unknowns.
    pub active: Vec<Option<usize>>,
    pub n_active: usize,
    /// Point pair is an internal vertex or an internal edge node.
    pub internal_point: Vec<bool>,
}

impl<T: Scalar> DofMap<T> {
    pub fn new(mesh: &PolyMesh<T>, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(VemError::InvalidArgument(format!("polynomial degree k must be >= 2, got {k}")));
        }
        let nv = mesh.num_vertices();
        let ne = mesh.num_edges();
        let n_point = 2 * nv + 2 * (k - 1) * ne;
        let n_int = poly_dim(k as isize - 3) + poly_dim(k as isize - 1) - 1;
        let n_velocity = n_point + n_int * mesh.num_cells();
        let n_p = poly_dim(k as isize - 1);

        let t = edge_nodes::<T>(k);
        let mut points = Vec::with_capacity(n_point / 2);
        points.extend_from_slice(mesh.vertices());
        let mut internal_point: Vec<bool> = (0..nv).map(|v| !mesh.is_boundary_vertex(v)).collect();
        let mut dirichlet = vec![false; n_velocity];
        for v in 0..nv {
            if mesh.is_boundary_vertex(v) {
                dirichlet[2 * v] = true;
                dirichlet[2 * v + 1] = true;
            }
        }
        for (e, edge) in mesh.edges().iter().enumerate() {
            let a = mesh.vertices()[edge.vertices[0]];
            let b = mesh.vertices()[edge.vertices[1]];
            let bnd = edge.is_boundary();
            for (j, tj) in t.iter().enumerate().take(k).skip(1) {
                points.push(a + (b - a) * *tj);
                internal_point.push(!bnd);
                if bnd {
                    let g = 2 * nv + 2 * ((k - 1) * e + j - 1);
                    dirichlet[g] = true;
                    dirichlet[g + 1] = true;
                }
            }
        }

        let mut cell_dofs = Vec::with_capacity(mesh.num_cells());
        for c in 0..mesh.num_cells() {
            let cell = mesh.cell(c);
            let n = cell.len();
            let lay = DofLayout::new(k, n)?;
            let mut map = vec![0usize; lay.total];
            for i in 0..n {
                for comp in 0..2 {
                    map[lay.vertex(i, comp)] = 2 * cell[i] + comp;
                }
                let e = mesh.cell_edges(c)[i];
                let forward = cell[i] < cell[(i + 1) % n];
                for j in 1..k {
                    let gj = if forward { j } else { k - j };
                    for comp in 0..2 {
                        map[lay.edge(i, j, comp)] = 2 * nv + 2 * ((k - 1) * e + gj - 1) + comp;
                    }
                }
            }
            let base = n_point + n_int * c;
            for l in 0..n_int {
                map[lay.n_boundary() + l] = base + l;
            }
            cell_dofs.push(map);
        }
        let mut active = vec![None; n_velocity];
        let mut n_active = 0;
        for g in 0..n_velocity {
            if !dirichlet[g] {
                active[g] = Some(n_active);
                n_active += 1;
            }
        }
        Ok(Self {
            k,
            n_velocity,
            n_pressure: n_p * mesh.num_cells(),
            n_p,
            n_point,
            cell_dofs,
            points,
            dirichlet,
            active,
            n_active,
            internal_point,
        })
    }

    /// Dimension of the discrete velocity space with homogeneous boundary
    /// values.
    pub fn num_free_velocity(&self) -> usize {
        self.n_active
    }

    /// Dimension of the zero-mean pressure space.
    pub fn num_free_pressure(&self) -> usize {
        self.n_pressure - 1
    }

    /// Size of the bordered system `[u_active, p, lambda]`.
    pub fn system_size(&self) -> usize {
        self.n_active + self.n_pressure + 1
    }

    /// Full velocity vector holding `g` at the Dirichlet DoFs and zero
    /// elsewhere.
    pub fn dirichlet_values(&self, g: &dyn Fn(&Point2<T>) -> Vector2<T>) -> Result<DVector<T>> {
        let mut out = DVector::zeros(self.n_velocity);
        for (pi, x) in self.points.iter().enumerate() {
            if self.dirichlet[2 * pi] {
                let v = g(x);
                for (c, val) in [v.x, v.y].into_iter().enumerate() {
                    if !val.is_finite() {
                        return Err(VemError::InconsistentBoundaryData { dof: 2 * pi + c });
                    }
                    out[2 * pi + c] = val;
                }
            }
        }
        Ok(out)
    }

    /// Local DoF vector of cell `c` extracted from a full velocity vector.
    pub fn gather(&self, c: usize, u: &DVector<T>) -> DVector<T> {
        DVector::from_iterator(self.cell_dofs[c].len(), self.cell_dofs[c].iter().map(|&g| u[g]))
    }

    /// Pressure coefficients of cell `c`.
    pub fn pressure_range(&self, c: usize) -> std::ops::Range<usize> {
        c * self.n_p..(c + 1) * self.n_p
    }
}

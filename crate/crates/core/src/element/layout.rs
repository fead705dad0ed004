use crate::error::{Result, VemError};
use crate::polyquad::poly_dim;

/// Local numbering of velocity DoFs on a cell with `n_e` vertices.
///
/// Order: vertex values, edge-node values, `x^perp` moments, divergence
/// moments. Components of point values are interleaved (`x` then `y`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofLayout {
    pub k: usize,
    pub n_e: usize,
    pub n_vertex: usize,
    pub n_edge: usize,
    pub n_gperp: usize,
    pub n_div: usize,
    pub total: usize,
    /// Pressure coefficients per cell.
    pub n_p: usize,
}

impl DofLayout {
    pub fn new(k: usize, n_e: usize) -> Result<Self> {
        if k < 2 {
            return Err(VemError::InvalidArgument(format!("polynomial degree k must be >= 2, got {k}")));
        }
        if n_e < 3 {
            return Err(VemError::InvalidArgument(format!("a cell needs >= 3 vertices, got {n_e}")));
        }
        let n_vertex = 2 * n_e;
        let n_edge = 2 * n_e * (k - 1);
        let n_gperp = poly_dim(k as isize - 3);
        let n_div = poly_dim(k as isize - 1) - 1;
        Ok(Self {
            k,
            n_e,
            n_vertex,
            n_edge,
            n_gperp,
            n_div,
            total: n_vertex + n_edge + n_gperp + n_div,
            n_p: poly_dim(k as isize - 1),
        })
    }

    /// Number of boundary DoFs, `2 n_e k`.
    pub fn n_boundary(&self) -> usize {
        self.n_vertex + self.n_edge
    }

    pub fn vertex(&self, i: usize, c: usize) -> usize {
        2 * i + c
    }

    /// DoF of interior node `j` (`1..k`) on local edge `i`.
    pub fn edge(&self, i: usize, j: usize, c: usize) -> usize {
        debug_assert!(j >= 1 && j < self.k);
        self.n_vertex + 2 * ((self.k - 1) * i + (j - 1)) + c
    }

    /// DoF of node `j` (`0..=k`, endpoints included) along local edge `i`.
    pub fn edge_node(&self, i: usize, j: usize, c: usize) -> usize {
        if j == 0 {
            self.vertex(i, c)
        } else if j == self.k {
            self.vertex((i + 1) % self.n_e, c)
        } else {
            self.edge(i, j, c)
        }
    }

    /// DoF of the moment against the `g`-th orthonormalized `x^perp` polynomial.
    pub fn gperp(&self, g: usize) -> usize {
        self.n_boundary() + g
    }

    /// DoF of the divergence moment against the `a`-th orthonormalized
    /// polynomial of `P_{k-1}`, `a >= 1`.
    pub fn div(&self, a: usize) -> usize {
        debug_assert!(a >= 1);
        self.n_boundary() + self.n_gperp + a - 1
    }
}

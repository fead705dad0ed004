//! Polynomial bases on cells and quadrature on polygons.

mod basis;
mod calculus;
mod quadrature;

pub use basis::{eval_local, exponents, mono_index, poly_dim, ScaledMonomialBasis};
pub use calculus::{
    divergence_matrix, gradient_matrix, gram_matrix, laplacian_matrix, perp_coeffs, rot_matrix,
    scaled_grad_coeffs, vector_laplacian_matrix, MomentTable, VectorPolyBasis,
};
pub use quadrature::{
    boundary_trace_matrix, edge_gauss, edge_nodes, edge_quadrature, edge_vandermonde,
    gauss_legendre, gauss_lobatto_nodes, lagrange_basis, quad_rule, triangle_rule, triangulate,
    QuadRule,
};

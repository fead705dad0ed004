//! Sparse matrices and a direct LU solver.

mod csc;
mod lu;

pub use csc::{CscMatrix, TripletBuilder};
pub use lu::{amd_order, solve_sparse, Pivoting, SparseLu};

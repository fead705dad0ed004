//! Global DoF numbering and assembly of the bordered saddle-point systems.

mod dofmap;
mod system;

pub use dofmap::DofMap;
pub use system::{
    assemble_newton, assemble_oseen, assemble_stokes, divergence_coeffs, interpolate, residual,
    Discretization, FlowState, Problem, SaddleSystem, VectorField,
};

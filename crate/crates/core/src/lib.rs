//! Divergence-free virtual elements for the steady Navier–Stokes equations
//! on polygonal meshes.
//!
//! Everything is generic over [`Scalar`]; the aliases below fix `f64`.

pub mod assembly;
pub mod element;
pub mod error;
pub mod mesh;
pub mod polyquad;
pub mod postproc;
pub mod scalar;
pub mod solver;
pub mod sparse;

pub use error::{Result, VemError};
pub use scalar::Scalar;

pub type Mesh = mesh::PolyMesh<f64>;
pub type Element = element::ElementOperators<f64>;
pub type Discretization = assembly::Discretization<f64>;
pub type Problem = assembly::Problem<f64>;
pub type FlowState = assembly::FlowState<f64>;
pub type SaddleSystem = assembly::SaddleSystem<f64>;
pub type DofMap = assembly::DofMap<f64>;
pub type NonlinearOptions = solver::NonlinearOptions<f64>;
pub type SolveReport = solver::SolveReport<f64>;
pub type SparseMatrix = sparse::CscMatrix<f64>;

//! Local virtual element objects: DoF layout, projectors and local forms.

mod convection;
mod layout;
mod operators;

pub use convection::ConvectionMode;
pub use layout::DofLayout;
pub use operators::{ElementOperators, QuadDegrees};

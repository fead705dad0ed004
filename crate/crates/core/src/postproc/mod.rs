//! Error norms, convergence rates, inf-sup estimate and field export.

mod eoc;
mod errors;
mod export;
mod infsup;

pub use eoc::{eoc, EocTable};
pub use errors::{compute_errors, div_inf_norm, ErrorReport, ExactFields};
pub use export::{
    export_fields, read_field_csv, sample_fields, write_field_csv, write_vtk, FieldFormat, FieldSample, SampleKind,
};
pub use infsup::infsup_estimate;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VemError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("cell {cell}: {msg}")]
    DegenerateCell { cell: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular matrix: zero pivot in column {column}")]
    SingularMatrix { column: usize },

    #[error("inconsistent boundary data at global dof {dof}")]
    InconsistentBoundaryData { dof: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, VemError>;

use thiserror::Error;

/// Errors raised by mesh handling, assembly, and the solvers.
#[derive(Debug, Error)]
pub enum BemError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("open surface: edge ({a},{b}) shared by {count} triangle(s) (triangle {triangle})")]
    OpenSurface {
        a: usize,
        b: usize,
        count: usize,
        triangle: usize,
    },

    #[error(
        "inconsistent orientation: edge ({a},{b}) traversed in the same direction by triangles {first} and {second}"
    )]
    InconsistentOrientation {
        a: usize,
        b: usize,
        first: usize,
        second: usize,
    },

    #[error("inverted orientation: enclosed volume {volume} is not positive")]
    InvertedOrientation { volume: f64 },

    #[error("degenerate triangle {triangle}: area {area:e}")]
    DegenerateTriangle { triangle: usize, area: f64 },

    #[error("vertex index {index} out of range in triangle {triangle}")]
    VertexIndex { triangle: usize, index: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular kernel evaluation: points coincide (distance {distance:e})")]
    SingularEvaluation { distance: f64 },

    #[error("partition error: {0}")]
    Partition(String),

    #[error("dof count {dofs} exceeds cap {cap}")]
    DofCapExceeded { dofs: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("near-singular system: {what} condition estimate {estimate:e} exceeds {limit:e}")]
    NearSingular {
        what: &'static str,
        estimate: f64,
        limit: f64,
    },

    #[error("singular matrix in {0}")]
    SingularMatrix(&'static str),

    #[error("point {index} is too close to the boundary (distance {distance:e}, need > {required:e})")]
    TooClose { index: usize, distance: f64, required: f64 },

    #[error("point {index} lies on the wrong side of the boundary")]
    WrongSide { index: usize },
}

pub type Result<T> = std::result::Result<T, BemError>;

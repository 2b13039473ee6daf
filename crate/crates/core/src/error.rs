use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid needs an even number of points >= 8, got {0}")]
    InvalidGrid(usize),

    #[error("field has {got} values but the grid has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("value at node {node} is not a unit vector (|u| = {norm})")]
    NotUnit { node: usize, norm: f64 },

    #[error("value at node {node} leaves the plane (u.e3 = {e3})")]
    NotInPlane { node: usize, e3: f64 },

    #[error(
        "winding is under-resolved at node {node} (increment {increment:.6} rad); refine the grid"
    )]
    UnderResolved { node: usize, increment: f64 },

    #[error("direction at node {node} is not tangent to the field (phi.u = {dot})")]
    NotTangent { node: usize, dot: f64 },

    #[error("cylinder energy needs at least 3 z-nodes, got {0}")]
    TooFewZNodes(usize),

    #[error("rings of a cylinder field must share one angular grid")]
    MismatchedRings,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("root is not bracketed on [{lo}, {hi}] (f = {f_lo}, {f_hi})")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("{0} failed to converge")]
    NoConvergence(&'static str),

    #[error("structure violated during descent: {0}")]
    StructureViolation(String),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Bracket { .. } | Error::NoConvergence(_) | Error::StructureViolation(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

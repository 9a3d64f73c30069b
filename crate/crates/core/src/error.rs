use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Parameters outside their domain (`m < 2`, `p ∉ [0,1]`, ...).
    InvalidParams(&'static str),
    /// The instance would exceed the configured vertex cap.
    SizeCap {
        vertices: u128,
        cap: u64,
    },
    /// An integer quantity does not fit the requested width.
    Overflow,
    SelfLoop(u32),
    DuplicateEdge(u32, u32),
    Asymmetric(u32, u32),
    VertexOutOfRange {
        vertex: u64,
        n: usize,
    },
    EmptyGraph,
    Disconnected,
    /// Both endpoint-degree moments coincide, so the Pearson statistic has a
    /// zero denominator.
    UndefinedAssortativity,
    TooFewDegreeClasses {
        found: usize,
        needed: usize,
    },
    InvalidVertex(u32),
    /// Level annotations do not agree with the graph they were attached to.
    InvalidLevels(&'static str),
    SolverCap {
        unknowns: usize,
        cap: usize,
    },
    NonConvergence {
        sweeps: usize,
        residual: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::SizeCap { vertices, cap } => {
                write!(f, "instance has {vertices} vertices, above the cap of {cap}")
            }
            Error::Overflow => f.write_str("integer overflow"),
            Error::SelfLoop(v) => write!(f, "self-loop at vertex {v}"),
            Error::DuplicateEdge(u, v) => write!(f, "duplicate edge {u} {v}"),
            Error::Asymmetric(u, v) => write!(f, "edge {u} {v} is missing its reverse"),
            Error::VertexOutOfRange { vertex, n } => {
                write!(f, "vertex {vertex} out of range for {n} vertices")
            }
            Error::EmptyGraph => f.write_str("graph has no edges"),
            Error::Disconnected => f.write_str("graph is disconnected"),
            Error::UndefinedAssortativity => f.write_str("assortativity undefined (degree-regular edge set)"),
            Error::TooFewDegreeClasses { found, needed } => {
                write!(f, "{found} hub degree classes, need at least {needed}")
            }
            Error::InvalidVertex(v) => write!(f, "vertex {v} does not exist"),
            Error::InvalidLevels(msg) => write!(f, "invalid level map: {msg}"),
            Error::SolverCap { unknowns, cap } => {
                write!(f, "{unknowns} unknowns exceed the solver cap of {cap}")
            }
            Error::NonConvergence { sweeps, residual } => {
                write!(f, "no convergence after {sweeps} sweeps (residual {residual:e})")
            }
        }
    }
}

impl core::error::Error for Error {}

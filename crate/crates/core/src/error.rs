use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cell {cell} out of range for a space of {size} cells")]
    CellOutOfRange { cell: usize, size: usize },
    #[error("mismatched spaces: {left} cells versus {right} cells")]
    SpaceMismatch { left: usize, right: usize },
    #[error("eps must be nonnegative, got {0}")]
    NegativeEps(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("sampler produced a non-finite value on cell {cell}")]
    SamplerOutOfRange { cell: usize },
    #[error("set is not inward: closure of its image leaves its interior")]
    NotInward,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no eps-dense complement exists; the minimal achievable density radius is {radius}")]
    NotDense { radius: f64 },
    #[error("target set is empty")]
    EmptySet,
    #[error("time {0} is not a point of the lattice")]
    OffLattice(f64),
    #[error("invalid time window [{0}, {1}]")]
    BadWindow(f64, f64),
    #[error("weak Kolmogorov condition fails: ({x}, {y}) in steps {j}∘{k} but not in step {total}")]
    WeakKolmogorov { x: usize, y: usize, j: usize, k: usize, total: usize },
    #[error("hybrid path length {0} is below one")]
    ShortPath(f64),
    #[error("invalid hybrid path: {0}")]
    InvalidPath(String),
    #[error("cover infeasible at eps {eps}; smallest feasible eps is {minimal}")]
    CoverInfeasible { eps: f64, minimal: f64 },
    #[error("certificate check failed: {0}")]
    Certificate(String),
}

use thiserror::Error;

use crate::models::Side;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension {dim} exceeds the dense backend maximum of {max}")]
    DimensionOverflow { dim: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian: max |A - A^dag| = {deviation:e} > {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error(
        "empty kernel at relative tolerance {tol:e} (smallest singular value ratio {smallest:e})"
    )]
    EmptyKernel { tol: f64, smallest: f64 },

    #[error(
        "ill-conditioned kernel: next singular value {next:e} is not separated from the largest kernel one {largest_kernel:e}"
    )]
    IllConditionedKernel { largest_kernel: f64, next: f64 },

    #[error("expected a unique steady state, found a {dim}-dimensional kernel")]
    UnexpectedDegeneracy { dim: usize },

    #[error("kernel contains no element of positive trace")]
    NoPositiveTraceState,

    #[error("invalid chain specification: {0}")]
    InvalidChain(String),

    #[error("invalid bath specification: {0}")]
    InvalidBath(String),

    #[error("wrong bath kind: expected {expected}, found {found}")]
    WrongBathKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("wrong model kind: {0}")]
    WrongModel(String),

    #[error(
        "site {site} is not the boundary site for the {side:?} bath of an {n_sites}-site chain"
    )]
    NonBoundarySite {
        site: usize,
        side: Side,
        n_sites: usize,
    },

    #[error("site index out of range: {0}")]
    SiteOutOfRange(String),

    #[error(
        "the {side:?} bath is specified only by its polarization f; splitting energy into heat and \
         work needs the bath temperature and field (beta, h), which the master equation alone does not fix"
    )]
    UndeterminedSplit { side: Side },

    #[error("boson truncation insufficient: tail weight {tail:e} above {tol:e}")]
    TruncationInsufficient { tail: f64, tol: f64 },

    #[error("diagonal ansatz inconsistent: {0}")]
    NotDiagonal(String),

    #[error("repeated-interaction map did not converge within {cycles} cycles (last trace distance {distance:e})")]
    NotConverged { cycles: usize, distance: f64 },

    #[error("invalid repeated-interaction configuration: {0}")]
    InvalidConfig(String),
}

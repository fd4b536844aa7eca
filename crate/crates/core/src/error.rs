use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("principal matrix is not Hermitian (residual {residual:e})")]
    NonHermitian { residual: f64 },
    #[error("principal part is not elliptic (margin {margin:e})")]
    NotElliptic { margin: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositiveSemidefinite { eigenvalue: f64 },
    #[error("final time must be positive, got {0}")]
    InvalidFinalTime(f64),
    #[error("a00 is negative somewhere in the domain ({0:e})")]
    NegativeA00(f64),
    #[error("b00/b1 is negative on the Robin boundary ({0:e})")]
    NegativeBoundaryRatio(f64),
    #[error("b1 vanishes on a boundary facet outside S")]
    DivisionByZeroB1,
    #[error("invalid domain: {0}")]
    InvalidDomain(&'static str),
    #[error("every degree of freedom is constrained")]
    ConstraintOnAllDofs,
    #[error("K+ is singular on the free degrees of freedom")]
    SingularKPlus,
    #[error("matrix is not symmetric positive definite (pivot {pivot} = {value:e})")]
    NotSpd { pivot: usize, value: f64 },
    #[error("eigensolver did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("step matrix is singular")]
    SingularStepMatrix,
    #[error("time {0} is not on the trajectory grid")]
    TimeOffGrid(f64),
    #[error("a priori bound violated: {lhs:e} > {rhs:e}")]
    BoundViolated { lhs: f64, rhs: f64 },
    #[error("s = {0} is outside (1/2, 1)")]
    SOutOfRange(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

use thiserror::Error;

/// Errors produced by the group, covering and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point lies at or near the pole of the transformation (component {component:?})")]
    Pole { component: Option<usize> },
    #[error("matrix is not unimodular: |det - 1| = {residual:e}")]
    NotUnimodular { residual: f64 },
    #[error("value {index} has modulus {modulus:e} below the branch floor")]
    BranchFloor { index: usize, modulus: f64 },
    #[error("step {index} still inadmissible after exhausting the refinement budget")]
    RefinementExhausted { index: usize },
    #[error("initial value is not consistent with the first path value")]
    InitialMismatch,
    #[error("point is not in the domain: {0}")]
    NotInDomain(String),
    #[error("loop is not closed: |first - last| = {gap:e}")]
    NotClosed { gap: f64 },
    #[error("search failed: {0}")]
    SearchFailed(String),
    #[error("triple has coinciding components (min pairwise distance {min_distance:e})")]
    DegenerateTriple { min_distance: f64 },
    #[error("orbit distance minimization did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("point is not in the Heisenberg domain")]
    NotInOmega,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("evaluation at z = 0 of a polynomial with negative exponents")]
    ZeroArgument,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("leading principal minor {0} is singular")]
    SingularMinor(usize),
    #[error("truncation margin too small: need {needed}, have {have}")]
    MarginTooSmall { needed: usize, have: usize },
    #[error("operation requires a scalar (p = q = 1) measure")]
    NotScalar,
    #[error("operation requires a real measure (c_n = conj(c_-n)); deviation {0:e}")]
    NotReal(f64),
    #[error("kernel evaluated on its diagonal x = y; use the direct sum")]
    PoleAtDiagonal,
    #[error("evaluation point too close to the unit circle")]
    OnCircle,
    #[error("evaluation point coincides with an atom")]
    AtAtom,
    #[error("singular block in quasi-determinant")]
    SingularBlock,
    #[error("evaluation matrix singular at row {0}")]
    SingularEvaluationMatrix(usize),
    #[error("evaluation point is a root of the perturbation")]
    RootOfW,
    #[error("perturbation root on the unit circle")]
    OnCircleRoot,
    #[error("atom at {0} is not a root of the perturbation in its row")]
    AtomNotAtRoot(String),
    #[error("F-value window singular at index {0}")]
    SingularFWindow(usize),
    #[error("index {index} outside the admissible window {lo}..{hi}")]
    WindowOutOfRange { index: usize, lo: usize, hi: usize },
    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

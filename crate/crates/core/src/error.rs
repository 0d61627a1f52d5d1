use thiserror::Error;

/// Errors produced by the algebra, metric, verification and construction layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not anti-Hermitian (defect {defect:.3e})")]
    NotAntiHermitian { defect: f64 },

    #[error("matrix does not lie in the algebra span (expansion residual {residual:.3e})")]
    NotInSpan { residual: f64 },

    #[error("input set contains only zero elements")]
    AllZeroInput,

    #[error("zero vector where a nonzero one is required")]
    ZeroVector,

    #[error("projected vector (Ad_g X)_m vanishes at sample {sample}; norm undefined")]
    VanishingProjection { sample: usize },

    #[error("alpha Gram matrix is not symmetric (defect {defect:.3e})")]
    NotSymmetric { defect: f64 },

    #[error("alpha Gram matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("metric is not valid: alpha-norm of beta is {alpha_norm_of_beta:.6} (must be < 1)")]
    InvalidMetric { alpha_norm_of_beta: f64 },

    #[error("underlying metric is not bi-invariant (factor {factor} deviates by {defect:.3e})")]
    NotBiInvariant { factor: usize, defect: f64 },

    #[error("orbit-point constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("orbit point is off the base orbit (spectrum deviation {deviation:.3e})")]
    OffOrbit { deviation: f64 },

    #[error("degenerate point set: system rank {rank_full} did not saturate at {rank_half} points")]
    DegeneratePointSet { rank_half: usize, rank_full: usize },

    #[error("empty constraint system")]
    EmptySystem,

    #[error("precondition rejected: {0}")]
    Precondition(String),

    #[error("unsupported algebra for this operation: {0}")]
    UnsupportedAlgebra(String),
}

//! Constant-length Killing vector fields on compact matrix Lie groups with
//! left-invariant Randers metrics.
//!
//! The crate has four layers:
//!
//! * [`algebra`] — matrix Lie algebra / group arithmetic: brackets,
//!   exponentials, adjoint orbits, bi-invariant forms, ideal generation and
//!   seeded group sampling for block-diagonal products of `su(k)` and
//!   one-dimensional abelian factors.
//! * [`randers`] — left-invariant Randers metric data on a reductive
//!   complement, Finsler norm evaluation and the `‖β‖_α < 1` validity check.
//! * [`killing`] — numerical verification that an algebra element generates a
//!   Killing field of constant Finsler length: sampled length spectra, the
//!   analytic derivative criterion and the four-condition equivalence test
//!   for bi-invariant underlying metrics.
//! * [`constructor`] — solves for the Riemannian part `α` making a prescribed
//!   element generate a constant-length field, by matching
//!   `α(X')² = (l − ⟨X',V⟩_bi)²` over adjoint-orbit points. Ships the
//!   `SU(3)` two-eigenvalue and diagonal ansätze, the `SU(2)×S¹` family and
//!   the `SU(2)` rigidity probe.
//!
//! A certified constant length `l` means the flow maps of the corresponding
//! Killing field are Clifford-Wolf translations (every point moves the same
//! distance) for all sufficiently small positive flow times.

pub mod algebra;
pub mod constructor;
mod error;
pub mod killing;
pub mod randers;
pub mod sampling;

pub use algebra::{
    BiInvariantForm, Factor, GroupElement, MatrixLieAlgebra, OrbitSample, ReductiveDecomposition,
};
pub use error::Error;
pub use killing::Verdict;
pub use randers::{BetaConvention, LengthReport, RandersMetricSpec};

/// Coefficient vector of an algebra element in the documented basis order.
pub type CoeffVec = nalgebra::DVector<f64>;

/// Dense complex matrix used for ambient-space arithmetic.
pub type CMat = nalgebra::DMatrix<num_complex::Complex64>;

/// Result alias for fallible crate operations.
pub type Result<T> = std::result::Result<T, Error>;

//! Largest unitary eigenvalues (U-eigenvalues) of complex tensors and the
//! geometric measure of entanglement of multipartite pure states.
//!
//! A unit-norm rank-one tensor closest to a complex tensor `A` is governed by
//! the stationarity system
//!
//! ```text
//! <A, ⊗_{i≠k} z^(i)> = λ conj(z^(k)),   ‖z^(k)‖ = 1,   k = 1..m,
//! ```
//!
//! whose largest solution value `λ` is the largest U-eigenvalue. For a
//! normalized pure state this equals the entanglement eigenvalue `G`, and the
//! geometric measure of entanglement is `E_G = sqrt(2 − 2G)`.
//!
//! The solver pipeline:
//!
//! 1. [`realify`] rewrites the complex objective `Re <A, ⊗ z>` as a real
//!    tensor `B` over doubled dimensions with per-mode blocks `u = (x, y)`.
//! 2. [`poly`] expands the squared contraction norm (or the symmetric form)
//!    into a sparse real polynomial over the free block variables.
//! 3. [`jacobian`] appends determinantal constraints built from 2x2 minors of
//!    the Jacobian of the objective and each sphere constraint, which make
//!    the moment relaxation exact at a finite order.
//! 4. [`moment`] assembles the order-N moment/localizing relaxation and
//!    [`sdp`] solves it with a dense primal–dual interior-point method.
//! 5. [`extract`] certifies flatness, extracts atoms via multiplication
//!    matrices, rebuilds the last complex block, and polishes the eigenpair.
//! 6. [`oracle`] independently confirms the value from below with a
//!    higher-order power method.
//!
//! [`quantum`] adds the pure-state layer (states as tensors, geometric
//! measure, nearest separable state, separability detection), [`pipeline`]
//! ties the stages together for raw tensors, and [`cli`] provides the file
//! formats and report emission behind the `ueigen` binary.
//!
//! ```
//! use ueigen::quantum::{geometric_measure, PureState};
//! use ueigen::pipeline::PipelineConfig;
//! use num_complex::Complex64;
//!
//! // |ψ> = (|00> + |11>)/√2, a Bell pair (m = 2, so G = largest singular value).
//! let amp = |re: f64| Complex64::new(re, 0.0);
//! let psi = PureState::new(
//!     vec![2, 2],
//!     vec![amp(0.5f64.sqrt()), amp(0.0), amp(0.0), amp(0.5f64.sqrt())],
//!     false,
//! ).unwrap();
//! let gm = geometric_measure(&psi, &PipelineConfig::default()).unwrap();
//! assert!((gm.entanglement_eigenvalue - 0.5f64.sqrt()).abs() < 1e-6);
//! ```

pub mod tol;

pub mod tensor;

pub mod realify;

pub mod poly;

pub mod jacobian;

pub mod moment;

pub mod sdp;

pub mod extract;

pub mod oracle;

pub mod quantum;

pub mod pipeline;

pub mod samples;

pub mod cli;

#[doc(hidden)]
pub mod testsupport;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("declared symmetry violated: {0}")]
    SymmetryViolation(String),

    #[error("invalid symmetry groups: {0}")]
    InvalidSymmetryGroups(String),

    #[error("polynomials have different ambient variable counts: {left} vs {right}")]
    VariableMismatch { left: usize, right: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("relaxation order {order} too small for degree {degree}")]
    OrderTooSmall { order: usize, degree: usize },

    #[error(
        "moment matrix of side {side} exceeds the 2000x2000 guard \
         (C({vars}+{two_n}, {two_n}) = {moments} moments over {vars} variables)"
    )]
    MomentTooLarge {
        side: usize,
        vars: usize,
        two_n: usize,
        moments: usize,
    },

    #[error("inconsistent mode identification: {0}")]
    InconsistentIdentification(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("eigenvalue {0:.3e} is below the recovery threshold; the tensor annihilates every product of the leading blocks")]
    DegenerateEigenvalue(f64),

    #[error("grid oracle dimension guard exceeded: total real dimension {0} > {1}")]
    GridTooLarge(usize, usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("state cannot be normalized: {0}")]
    NotNormalizable(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

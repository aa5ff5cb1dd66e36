//! Numeric thresholds used across the crate.
//!
//! Every tolerance that a test or a certificate relies on is named here, so
//! the meaning of "equal", "unit", or "certified" is fixed in one place.

/// Unit-norm check on eigenvector blocks and declared-normalized tuples.
pub const UNIT_NORM: f64 = 1e-12;

/// Entry-wise tolerance when verifying a declared symmetry class.
pub const SYMMETRY: f64 = 1e-12;

/// Coefficients with magnitude below this are dropped after polynomial
/// arithmetic. Expansion noise below this level would otherwise leak extra
/// rows into the moment relaxation.
pub const COEFF_DROP: f64 = 1e-14;

/// Residual bound a certified eigenpair must satisfy.
pub const RESIDUAL_CERT: f64 = 1e-8;

/// Default certification gap: `upper_bound - lambda` must not exceed this for
/// a result to be flagged certified-global.
pub const CERT_GAP: f64 = 1e-5;

/// Relative singular-value cutoff for the numerical rank of moment matrices.
pub const FLAT_RANK: f64 = 1e-6;

/// Extracted atoms must satisfy every equality constraint to this tolerance.
pub const ATOM_FEAS: f64 = 1e-6;

/// Residual target of the local polish loop.
pub const POLISH_RESIDUAL: f64 = 1e-10;

/// Power-method sweep stall: stop once the value gain drops below this.
pub const HOPM_STALL: f64 = 1e-12;

/// Interior-point duality-gap tolerance (relative).
pub const SDP_GAP: f64 = 1e-9;

/// Interior-point feasibility tolerance (relative).
pub const SDP_FEAS: f64 = 1e-9;

/// Relative diagonal threshold of the rank-revealing QR used to drop
/// dependent equality rows before the solve.
pub const QR_RANK: f64 = 1e-11;

/// Static regularization added to the Schur complement diagonal.
pub const SCHUR_REG: f64 = 1e-12;

/// Below this the eigenvalue is considered degenerate and the trailing
/// eigenvector block is not recoverable.
pub const LAMBDA_MIN: f64 = 1e-8;

/// Side limit of the moment matrix; larger instances are refused.
pub const MOMENT_SIDE_LIMIT: usize = 2000;

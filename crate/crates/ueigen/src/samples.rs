//! Small gallery of three-qubit states used by the examples and the
//! acceptance tests.
//!
//! All four are normalized. `sqrt(n^3)` scaling keeps the phase-parameterized
//! families normalized for every local dimension `n`.

use num_complex::Complex64;

use crate::quantum::PureState;
use crate::tensor::{ComplexTensor, SymmetryClass};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(1/2)|000> + (√3/6)(|110> + |011> + |101>) + (1/2 + i/2)|001>`.
///
/// The amplitude tensor is symmetric in the first two parties only.
pub fn partially_symmetric_qubit_tensor() -> ComplexTensor {
    let s = 3f64.sqrt() / 6.0;
    ComplexTensor::from_sparse(
        vec![2, 2, 2],
        &[
            (&[1, 1, 1], c(0.5, 0.0)),
            (&[2, 2, 1], c(s, 0.0)),
            (&[2, 1, 2], c(s, 0.0)),
            (&[1, 2, 2], c(s, 0.0)),
            (&[1, 1, 2], c(0.5, 0.5)),
        ],
        SymmetryClass::Partial(vec![vec![0, 1]]),
    )
    .unwrap()
}

pub fn partially_symmetric_qubit_state() -> PureState {
    PureState::from_tensor(&partially_symmetric_qubit_tensor(), false).unwrap()
}

/// `(1/6)|000> + (2i/3)|111> + (1/√3 + i/3)|101> + (√3/6)|100>`.
///
/// Totally non-symmetric.
pub fn nonsymmetric_qubit_tensor() -> ComplexTensor {
    ComplexTensor::from_sparse(
        vec![2, 2, 2],
        &[
            (&[1, 1, 1], c(1.0 / 6.0, 0.0)),
            (&[2, 2, 2], c(0.0, 2.0 / 3.0)),
            (&[2, 1, 2], c(1.0 / 3f64.sqrt(), 1.0 / 3.0)),
            (&[2, 1, 1], c(3f64.sqrt() / 6.0, 0.0)),
        ],
        SymmetryClass::None,
    )
    .unwrap()
}

pub fn nonsymmetric_qubit_state() -> PureState {
    PureState::from_tensor(&nonsymmetric_qubit_tensor(), false).unwrap()
}

/// Phase-parameterized non-symmetric family:
/// `A_{ijk} = (cos(i−j+k) + i sin(i+j−k)) / n^{3/2}` with one-based indices.
pub fn phase_parameterized_tensor(n: usize) -> ComplexTensor {
    let scale = 1.0 / (n as f64).powi(3).sqrt();
    let mut entries = Vec::with_capacity(n * n * n);
    for i in 1..=n as i64 {
        for j in 1..=n as i64 {
            for k in 1..=n as i64 {
                let re = ((i - j + k) as f64).cos();
                let im = ((i + j - k) as f64).sin();
                entries.push(c(re * scale, im * scale));
            }
        }
    }
    ComplexTensor::new(vec![n, n, n], entries, SymmetryClass::None).unwrap()
}

pub fn phase_parameterized_state(n: usize) -> PureState {
    PureState::from_tensor(&phase_parameterized_tensor(n), false).unwrap()
}

/// Fully symmetric separable family:
/// `A_{ijk} = exp(i(i+j+k)) / n^{3/2}` with one-based indices; rank one for
/// every `n`.
pub fn separable_phase_tensor(n: usize) -> ComplexTensor {
    let scale = 1.0 / (n as f64).powi(3).sqrt();
    let mut entries = Vec::with_capacity(n * n * n);
    for i in 1..=n as i64 {
        for j in 1..=n as i64 {
            for k in 1..=n as i64 {
                let phase = (i + j + k) as f64;
                entries.push(c(phase.cos() * scale, phase.sin() * scale));
            }
        }
    }
    ComplexTensor::new(vec![n, n, n], entries, SymmetryClass::Full).unwrap()
}

pub fn separable_phase_state(n: usize) -> PureState {
    PureState::from_tensor(&separable_phase_tensor(n), false).unwrap()
}

//! Pure states as tensors, the geometric measure of entanglement, the
//! nearest separable state, and separability detection.
//!
//! For a normalized `m`-partite pure state the entanglement eigenvalue `G`
//! equals the largest U-eigenvalue of the amplitude tensor, and the geometric
//! measure is `E_G = sqrt(2 − 2G)`; the nearest separable state is the
//! product of the eigenvector blocks. Kets are zero-based computational basis
//! states `|i_1 ... i_m>`; the amplitude array is indexed one-based in files
//! and zero-based here.

use num_complex::Complex64;

use crate::pipeline::{largest_u_eigenvalue, PipelineConfig, PipelineOutcome};
use crate::tensor::{
    contract_all_but, inner_product, ComplexTensor, EigenpairResult, RankOneTuple, SymmetryClass,
};
use crate::{tol, Error, Result};

/// Normalized multipartite pure state in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Builds a state; amplitudes must be unit-norm within `1e-10` unless
    /// `auto_normalize` rescales them.
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>, auto_normalize: bool) -> Result<Self> {
        let len: usize = dims.iter().product();
        if amplitudes.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "expected {} amplitudes for dims {:?}, got {}",
                len,
                dims,
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if auto_normalize {
            if norm < 1e-150 {
                return Err(Error::NotNormalizable("zero state".into()));
            }
            let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
            Ok(PureState { dims, amplitudes })
        } else {
            if (norm - 1.0).abs() > 1e-10 {
                return Err(Error::NotNormalizable(format!(
                    "state norm is {:.12}, expected 1",
                    norm
                )));
            }
            Ok(PureState { dims, amplitudes })
        }
    }

    pub fn from_tensor(t: &ComplexTensor, auto_normalize: bool) -> Result<Self> {
        PureState::new(t.dims().to_vec(), t.entries().to_vec(), auto_normalize)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<self|other>` (conjugation on `self`).
    pub fn overlap(&self, other: &PureState) -> Result<Complex64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Amplitudes as a tensor with the symmetry class detected entry-wise.
pub fn state_to_tensor(s: &PureState) -> ComplexTensor {
    let symmetry = detect_symmetry(&s.dims, &s.amplitudes);
    ComplexTensor::new(s.dims.clone(), s.amplitudes.clone(), symmetry)
        .expect("detected symmetry always verifies")
}

/// Finds the maximal permutation symmetry: modes are grouped when every
/// entry is invariant (to [`tol::SYMMETRY`]) under their transposition, and
/// groups are the connected components of that relation.
pub fn detect_symmetry(dims: &[usize], entries: &[Complex64]) -> SymmetryClass {
    let m = dims.len();
    let probe = ComplexTensor::new(dims.to_vec(), entries.to_vec(), SymmetryClass::None)
        .expect("entries length checked by caller");
    let swap_invariant = |a: usize, b: usize| -> bool {
        if dims[a] != dims[b] {
            return false;
        }
        let mut idx_swapped = vec![0usize; m];
        for idx in crate::tensor::MultiIndexIter::new(dims) {
            idx_swapped.copy_from_slice(&idx);
            idx_swapped.swap(a, b);
            if (probe.get(&idx) - probe.get(&idx_swapped)).norm() > tol::SYMMETRY {
                return false;
            }
        }
        true
    };
    // Union-find over modes.
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for a in 0..m {
        for b in a + 1..m {
            if swap_invariant(a, b) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[rb] = ra;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for root in 0..m {
        if find(&mut parent, root) == root {
            let members: Vec<usize> = (0..m).filter(|&k| find(&mut parent, k) == root).collect();
            if members.len() >= 2 {
                groups.push(members);
            }
        }
    }
    if groups.len() == 1 && groups[0].len() == m {
        SymmetryClass::Full
    } else if groups.is_empty() {
        SymmetryClass::None
    } else {
        SymmetryClass::Partial(groups)
    }
}

/// Geometric-measure result for one state.
#[derive(Debug, Clone)]
pub struct GeometricMeasure {
    /// Entanglement eigenvalue `G = λ_max`.
    pub entanglement_eigenvalue: f64,
    /// `E_G = sqrt(2 − 2G)`.
    pub geometric_measure: f64,
    pub nearest_separable: Option<PureState>,
    pub separable: bool,
    pub eigenpair: Option<EigenpairResult>,
    pub outcome: PipelineOutcome,
}

/// Runs the eigenvalue pipeline on the state's amplitude tensor.
///
/// Solver or extraction trouble degrades to the power-method value with a
/// warning instead of failing, so a `GeometricMeasure` always carries the
/// best known `G`.
pub fn geometric_measure(s: &PureState, cfg: &PipelineConfig) -> Result<GeometricMeasure> {
    let tensor = state_to_tensor(s);
    let outcome = largest_u_eigenvalue(&tensor, cfg)?;
    let g = outcome
        .eigenpair
        .as_ref()
        .map(|p| p.lambda)
        .or(outcome.oracle_lambda)
        .ok_or_else(|| Error::Solver("pipeline produced no value".into()))?;
    let e_g = (2.0 - 2.0 * g).max(0.0).sqrt();
    let nearest = outcome.eigenpair.as_ref().map(|p| {
        let product = p.vectors.to_tensor();
        PureState::from_tensor(&product, true).expect("unit blocks give a unit product state")
    });
    let separable = outcome
        .eigenpair
        .as_ref()
        .map(|p| separability_check(&tensor, p))
        .unwrap_or(false);
    Ok(GeometricMeasure {
        entanglement_eigenvalue: g,
        geometric_measure: e_g,
        nearest_separable: nearest,
        separable,
        eigenpair: outcome.eigenpair.clone(),
        outcome,
    })
}

/// A normalized state is separable exactly when `λ_max = 1`; numerically the
/// eigenvalue must reach `1 − 1e-6` and the rank-one reconstruction must
/// match the tensor to `1e-5` in Frobenius norm.
pub fn separability_check(a: &ComplexTensor, result: &EigenpairResult) -> bool {
    if result.lambda < 1.0 - 1e-6 {
        return false;
    }
    let product = result.vectors.to_tensor();
    let mut dist_sq = 0.0;
    for (x, y) in a.entries().iter().zip(product.entries()) {
        dist_sq += (x - y).norm_sqr();
    }
    dist_sq.sqrt() <= 1e-5
}

/// Residual of the symmetric eigen system `<S, ⊗^{m−1} x> = λ conj(x)` for a
/// given candidate pair.
pub fn us_residual(s: &ComplexTensor, lambda: f64, x: &[Complex64]) -> Result<f64> {
    let m = s.order();
    let t = RankOneTuple::new(vec![x.to_vec(); m]);
    let v = contract_all_but(s, &t, m - 1)?;
    Ok(v.iter()
        .zip(x)
        .map(|(vi, xi)| (vi - lambda * xi.conj()).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Residual of the real symmetric eigen system `<S, ⊗^{m−1} x> = λ x` for a
/// real vector `x`; the tensor must be real for the system to make sense.
pub fn z_residual(s: &ComplexTensor, lambda: f64, x: &[f64]) -> Result<f64> {
    let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let m = s.order();
    let t = RankOneTuple::new(vec![xc.clone(); m]);
    let v = contract_all_but(s, &t, m - 1)?;
    Ok(v.iter()
        .zip(x)
        .map(|(vi, xi)| (vi - Complex64::new(lambda * xi, 0.0)).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// `|<psi|phi>|` against the product of the eigenvector blocks equals the
/// eigenvalue; exposed for consistency checks.
pub fn overlap_with_product(s: &PureState, t: &RankOneTuple) -> Result<f64> {
    let tensor = ComplexTensor::new(
        s.dims.clone(),
        s.amplitudes.clone(),
        SymmetryClass::None,
    )?;
    let product = t.to_tensor();
    Ok(inner_product(&tensor, &product)?.norm())
}

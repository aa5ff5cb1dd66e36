//! Dense complex tensors, inner products, contractions, and U-eigenpair
//! residuals.
//!
//! The inner product conjugates the FIRST argument:
//! `<A, B> = Σ conj(A_{i1..im}) B_{i1..im}`. The same convention applies to
//! contractions against rank-one tensors, so `<A, ⊗ z>` is linear in the
//! `z^(k)` and antilinear in `A`. Conventions differ across the literature;
//! everything in this crate is consistent with this one.

use num_complex::Complex64;

use crate::{tol, Error, Result};

/// Declared permutation symmetry of a tensor's entries.
///
/// Mode indices are zero-based. `Partial` holds disjoint groups of modes,
/// each of size at least two, with equal dimensions inside a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymmetryClass {
    None,
    Partial(Vec<Vec<usize>>),
    Full,
}

impl SymmetryClass {
    /// Groups of modes identified by the symmetry, if any.
    pub fn groups(&self, order: usize) -> Vec<Vec<usize>> {
        match self {
            SymmetryClass::None => Vec::new(),
            SymmetryClass::Partial(groups) => groups.clone(),
            SymmetryClass::Full => vec![(0..order).collect()],
        }
    }
}

/// Dense `m`-way complex tensor in row-major multi-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTensor {
    dims: Vec<usize>,
    entries: Vec<Complex64>,
    symmetry: SymmetryClass,
}

impl ComplexTensor {
    /// Builds a tensor and verifies the declared symmetry class entry-wise
    /// (tolerance [`tol::SYMMETRY`]). A mismatch is an error, never a silent
    /// coercion.
    pub fn new(
        dims: Vec<usize>,
        entries: Vec<Complex64>,
        symmetry: SymmetryClass,
    ) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::DimensionMismatch(
                "dims must be non-empty positive integers".into(),
            ));
        }
        let len: usize = dims.iter().product();
        if entries.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for dims {:?}, got {}",
                len,
                dims,
                entries.len()
            )));
        }
        let t = ComplexTensor {
            dims,
            entries,
            symmetry,
        };
        t.verify_symmetry()?;
        Ok(t)
    }

    /// Tensor with all entries zero and no declared symmetry.
    pub fn zeros(dims: Vec<usize>) -> Self {
        let len = dims.iter().product();
        ComplexTensor {
            dims,
            entries: vec![Complex64::new(0.0, 0.0); len],
            symmetry: SymmetryClass::None,
        }
    }

    /// Builds from a list of (one-based multi-index, value) pairs; unlisted
    /// entries are zero.
    pub fn from_sparse(
        dims: Vec<usize>,
        nonzeros: &[(&[usize], Complex64)],
        symmetry: SymmetryClass,
    ) -> Result<Self> {
        let mut t = ComplexTensor::zeros(dims);
        for (idx, v) in nonzeros {
            if idx.len() != t.dims.len() {
                return Err(Error::IndexOutOfRange(format!("index {:?}", idx)));
            }
            let zero_based: Vec<usize> = idx
                .iter()
                .zip(&t.dims)
                .map(|(&i, &d)| {
                    if i == 0 || i > d {
                        Err(Error::IndexOutOfRange(format!(
                            "index {:?} outside dims {:?}",
                            idx, t.dims
                        )))
                    } else {
                        Ok(i - 1)
                    }
                })
                .collect::<Result<_>>()?;
            let lin = t.linear_index(&zero_based);
            t.entries[lin] = *v;
        }
        t.symmetry = symmetry;
        t.verify_symmetry()?;
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn symmetry(&self) -> &SymmetryClass {
        &self.symmetry
    }

    /// Value at a zero-based multi-index.
    pub fn get(&self, idx: &[usize]) -> Complex64 {
        self.entries[self.linear_index(idx)]
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescales to unit Frobenius norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::NotNormalizable("tensor is zero".into()));
        }
        let mut t = self.clone();
        for e in &mut t.entries {
            *e /= n;
        }
        Ok(t)
    }

    /// Re-orders the modes: new mode `k` is old mode `perm[k]`. Symmetry
    /// groups are carried along.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<Self> {
        let m = self.order();
        let mut seen = vec![false; m];
        if perm.len() != m || perm.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::IndexOutOfRange(format!("permutation {:?}", perm)));
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let mut out = ComplexTensor::zeros(new_dims);
        let mut old_idx = vec![0usize; m];
        for (new_lin, new_idx) in MultiIndexIter::new(&out.dims.clone()).enumerate() {
            for k in 0..m {
                old_idx[perm[k]] = new_idx[k];
            }
            out.entries[new_lin] = self.get(&old_idx);
        }
        let inv: Vec<usize> = {
            let mut inv = vec![0usize; m];
            for (new, &old) in perm.iter().enumerate() {
                inv[old] = new;
            }
            inv
        };
        out.symmetry = match &self.symmetry {
            SymmetryClass::None => SymmetryClass::None,
            SymmetryClass::Full => SymmetryClass::Full,
            SymmetryClass::Partial(groups) => SymmetryClass::Partial(
                groups
                    .iter()
                    .map(|g| {
                        let mut g: Vec<usize> = g.iter().map(|&k| inv[k]).collect();
                        g.sort_unstable();
                        g
                    })
                    .collect(),
            ),
        };
        Ok(out)
    }

    pub(crate) fn linear_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        let mut lin = 0;
        for (i, d) in idx.iter().zip(&self.dims) {
            debug_assert!(i < d);
            lin = lin * d + i;
        }
        lin
    }

    fn verify_symmetry(&self) -> Result<()> {
        let m = self.order();
        let check_swap = |a: usize, b: usize| -> Result<()> {
            if self.dims[a] != self.dims[b] {
                return Err(Error::InvalidSymmetryGroups(format!(
                    "modes {} and {} have different dimensions",
                    a, b
                )));
            }
            let mut swapped = vec![0usize; m];
            for idx in MultiIndexIter::new(&self.dims) {
                swapped.copy_from_slice(&idx);
                swapped.swap(a, b);
                let x = self.get(&idx);
                let y = self.get(&swapped);
                if (x - y).norm() > tol::SYMMETRY {
                    return Err(Error::SymmetryViolation(format!(
                        "entries at {:?} and its ({},{}) swap differ by {:.3e}",
                        idx,
                        a,
                        b,
                        (x - y).norm()
                    )));
                }
            }
            Ok(())
        };
        match &self.symmetry {
            SymmetryClass::None => Ok(()),
            SymmetryClass::Full => {
                for k in 0..m.saturating_sub(1) {
                    check_swap(k, k + 1)?;
                }
                Ok(())
            }
            SymmetryClass::Partial(groups) => {
                let mut used = vec![false; m];
                for g in groups {
                    if g.len() < 2 {
                        return Err(Error::InvalidSymmetryGroups(
                            "groups must have at least two modes".into(),
                        ));
                    }
                    for &k in g {
                        if k >= m || std::mem::replace(&mut used[k], true) {
                            return Err(Error::InvalidSymmetryGroups(format!(
                                "mode {} repeated or out of range",
                                k
                            )));
                        }
                    }
                    for w in g.windows(2) {
                        check_swap(w[0], w[1])?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Iterates all multi-indices of `dims` in row-major order.
pub(crate) struct MultiIndexIter {
    dims: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl MultiIndexIter {
    pub(crate) fn new(dims: &[usize]) -> Self {
        MultiIndexIter {
            dims: dims.to_vec(),
            next: Some(vec![0; dims.len()]),
        }
    }
}

impl Iterator for MultiIndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut bump = current.clone();
        for k in (0..self.dims.len()).rev() {
            bump[k] += 1;
            if bump[k] < self.dims[k] {
                self.next = Some(bump);
                break;
            }
            bump[k] = 0;
        }
        Some(current)
    }
}

/// Tuple of `m` complex vectors defining a rank-one tensor `⊗ z^(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneTuple {
    vectors: Vec<Vec<Complex64>>,
}

impl RankOneTuple {
    pub fn new(vectors: Vec<Vec<Complex64>>) -> Self {
        RankOneTuple { vectors }
    }

    /// Builds a tuple whose blocks are verified unit-norm to
    /// [`tol::UNIT_NORM`].
    pub fn unit(vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        for (k, v) in vectors.iter().enumerate() {
            let n = vec_norm(v);
            if (n - 1.0).abs() > tol::UNIT_NORM {
                return Err(Error::DimensionMismatch(format!(
                    "block {} has norm {:.15} (expected 1)",
                    k, n
                )));
            }
        }
        Ok(RankOneTuple { vectors })
    }

    pub fn order(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn block(&self, k: usize) -> &[Complex64] {
        &self.vectors[k]
    }

    /// Rescales every block to unit norm.
    pub fn normalized(&self) -> Self {
        let vectors = self
            .vectors
            .iter()
            .map(|v| {
                let n = vec_norm(v);
                v.iter().map(|&z| z / n).collect()
            })
            .collect();
        RankOneTuple { vectors }
    }

    /// Materializes the rank-one tensor `⊗ z^(k)`.
    pub fn to_tensor(&self) -> ComplexTensor {
        let dims: Vec<usize> = self.vectors.iter().map(|v| v.len()).collect();
        let mut t = ComplexTensor::zeros(dims);
        for (lin, idx) in MultiIndexIter::new(&t.dims.clone()).enumerate() {
            let mut p = Complex64::new(1.0, 0.0);
            for (k, &i) in idx.iter().enumerate() {
                p *= self.vectors[k][i];
            }
            t.entries[lin] = p;
        }
        t
    }

    /// Applies a phase to one block.
    pub fn rotate_block(&mut self, k: usize, phase: Complex64) {
        for z in &mut self.vectors[k] {
            *z *= phase;
        }
    }
}

/// `<a, b> = Σ conj(a_idx) b_idx` (conjugation on the first argument).
pub fn inner_product(a: &ComplexTensor, b: &ComplexTensor) -> Result<Complex64> {
    if a.dims != b.dims {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            a.dims, b.dims
        )));
    }
    Ok(a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// `<a, ⊗_{i≠k} z^(i)>`: contracts every mode except `k`, conjugating `a`.
///
/// Slot `k` of the tuple is ignored; the remaining blocks must match `a`'s
/// dimensions.
pub fn contract_all_but(
    a: &ComplexTensor,
    t: &RankOneTuple,
    k: usize,
) -> Result<Vec<Complex64>> {
    let m = a.order();
    if t.order() != m || k >= m {
        return Err(Error::DimensionMismatch(format!(
            "tuple order {} vs tensor order {} (mode {})",
            t.order(),
            m,
            k
        )));
    }
    for (i, v) in t.vectors.iter().enumerate() {
        if i != k && v.len() != a.dims[i] {
            return Err(Error::DimensionMismatch(format!(
                "block {} has length {}, tensor mode needs {}",
                i,
                v.len(),
                a.dims[i]
            )));
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.dims[k]];
    for (lin, idx) in MultiIndexIter::new(&a.dims).enumerate() {
        let mut p = a.entries[lin].conj();
        if p.norm_sqr() == 0.0 {
            continue;
        }
        for (i, &ii) in idx.iter().enumerate() {
            if i != k {
                p *= t.vectors[i][ii];
            }
        }
        out[idx[k]] += p;
    }
    Ok(out)
}

/// Full contraction `<a, ⊗ z^(i)>` over all modes.
pub fn contract_full(a: &ComplexTensor, t: &RankOneTuple) -> Result<Complex64> {
    let v = contract_all_but(a, t, a.order() - 1)?;
    Ok(v.iter()
        .zip(t.block(a.order() - 1))
        .map(|(x, z)| x * z)
        .sum())
}

/// Max over modes `k` of `‖<a, ⊗_{i≠k} z^(i)> − λ conj(z^(k))‖`.
///
/// The tuple blocks are expected unit-norm.
pub fn residual(a: &ComplexTensor, lambda: f64, t: &RankOneTuple) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..a.order() {
        let v = contract_all_but(a, t, k)?;
        let err: f64 = v
            .iter()
            .zip(t.block(k))
            .map(|(x, z)| (x - lambda * z.conj()).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(err);
    }
    Ok(worst)
}

/// Companion eigenpair `(−λ, {η z^(i)})` with `η = exp(iπ/m)`, the principal
/// m-th root of −1. The scaled tuple solves the eigen system with `−λ`.
pub fn companion_eigenpair(lambda: f64, t: &RankOneTuple) -> (f64, RankOneTuple) {
    let m = t.order() as f64;
    let eta = Complex64::from_polar(1.0, std::f64::consts::PI / m);
    let vectors = t
        .vectors
        .iter()
        .map(|v| v.iter().map(|&z| eta * z).collect())
        .collect();
    (-lambda, RankOneTuple::new(vectors))
}

/// How the eigenvector tuple was obtained from the relaxation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtractionMethod {
    /// Rank-one moment matrix; read off the degree-one moments.
    DegreeOneMoments,
    /// Multiplication-matrix eigendecomposition on the moment column space.
    MultiplicationMatrices { atoms: usize },
    /// Flatness or extraction failed; polished from the degree-one moments.
    FallbackDegreeOne,
    /// No usable relaxation output; the power-method value stands alone.
    OracleOnly,
}

/// Rank, flatness, and bound diagnostics attached to a certified eigenpair.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub certified_global: bool,
    pub flat: bool,
    pub flatness_rank: Option<usize>,
    /// Relaxation bound per order tried, on the λ scale.
    pub rho_per_order: Vec<(usize, f64)>,
    pub extraction: ExtractionMethod,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn empty() -> Self {
        Certificate {
            certified_global: false,
            flat: false,
            flatness_rank: None,
            rho_per_order: Vec::new(),
            extraction: ExtractionMethod::OracleOnly,
            notes: Vec::new(),
        }
    }
}

/// A computed eigenpair with its certification data.
///
/// `lower_bound ≤ lambda ≤ upper_bound` holds up to solver tolerance;
/// `upper_bound` is the relaxation bound mapped to the λ scale and
/// `lower_bound` the independent power-method value.
#[derive(Debug, Clone)]
pub struct EigenpairResult {
    pub lambda: f64,
    pub vectors: RankOneTuple,
    pub residual: f64,
    pub upper_bound: f64,
    pub lower_bound: f64,
    pub order_used: usize,
    pub certificate: Certificate,
}

pub(crate) fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a, b> = Σ conj(a_i) b_i` on vectors.
pub(crate) fn vec_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testsupport::{random_tensor, random_unit_tuple, seeded_rng};
    use num_complex::Complex64;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inner_product_conjugates_first_argument() {
        let a = ComplexTensor::new(vec![1], vec![c(1.0, 1.0)], SymmetryClass::None).unwrap();
        let ip = inner_product(&a, &a).unwrap();
        assert!((ip - c(2.0, 0.0)).norm() < 1e-15);

        let x = ComplexTensor::new(vec![1], vec![c(0.0, 1.0)], SymmetryClass::None).unwrap();
        let y = ComplexTensor::new(vec![1], vec![c(1.0, 0.0)], SymmetryClass::None).unwrap();
        let ip = inner_product(&x, &y).unwrap();
        assert!((ip - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn sample_state_tensor_is_normalized() {
        let a = crate::samples::partially_symmetric_qubit_tensor();
        let ip = inner_product(&a, &a).unwrap();
        assert!((ip - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_product_rejects_dimension_mismatch() {
        let a = ComplexTensor::zeros(vec![2, 2]);
        let b = ComplexTensor::zeros(vec![2, 3]);
        assert!(matches!(
            inner_product(&a, &b),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn contraction_of_rank_one_returns_conjugate_factor() {
        let mut rng = seeded_rng(11);
        let t = random_unit_tuple(&[3, 3, 3], &mut rng);
        let z = t.block(0).to_vec();
        let sym = RankOneTuple::new(vec![z.clone(), z.clone(), z.clone()]);
        let a = sym.to_tensor();
        let v = contract_all_but(&a, &sym, 2).unwrap();
        for (x, zi) in v.iter().zip(&z) {
            assert!((x - zi.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn contraction_of_identity_matrix() {
        let a = ComplexTensor::new(
            vec![2, 2],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            SymmetryClass::None,
        )
        .unwrap();
        let e1 = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let t = RankOneTuple::new(vec![e1.clone(), e1.clone()]);
        let v = contract_all_but(&a, &t, 1).unwrap();
        assert!((v[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(v[1].norm() < 1e-15);
    }

    #[test]
    fn contraction_matches_printed_separable_eigenvector() {
        let a = crate::samples::separable_phase_tensor(2);
        let z = vec![c(0.382051, 0.59501), c(-0.29426, 0.64297)];
        let t = RankOneTuple::new(vec![z.clone(), z.clone(), z.clone()]);
        let v = contract_all_but(&a, &t, 2).unwrap();
        // lambda = 1 for this state; the contraction is lambda * conj(z).
        for (x, zi) in v.iter().zip(&z) {
            assert!((x - zi.conj()).norm() < 2e-5);
        }
    }

    #[test]
    fn residual_zero_for_exact_rank_one_pair() {
        let mut rng = seeded_rng(5);
        let t = random_unit_tuple(&[2, 3, 2], &mut rng);
        let a = t.to_tensor();
        // <A, ⊗_{i≠k} z> = conj(z^(k)) times Π_{i≠k} ‖z^(i)‖² = conj(z^(k)).
        let r = residual(&a, 1.0, &t).unwrap();
        assert!(r < 1e-12, "residual {}", r);
    }

    #[test]
    fn residual_of_printed_nonsymmetric_eigenpair() {
        let a = crate::samples::nonsymmetric_qubit_tensor();
        let t = RankOneTuple::new(vec![
            vec![c(-0.0287, 0.0), c(-0.9996, 0.0)],
            vec![c(-0.7404, 0.0), c(-0.3361, -0.5821)],
            vec![c(0.2248, 0.0), c(0.8439, 0.4872)],
        ])
        .normalized();
        let r = residual(&a, 0.9661, &t).unwrap();
        assert!(r <= 5e-4, "residual {}", r);
    }

    #[test]
    fn residual_with_zero_lambda_is_contraction_norm() {
        let mut rng = seeded_rng(7);
        let a = random_tensor(&[2, 2, 2], &mut rng);
        let t = random_unit_tuple(&[2, 2, 2], &mut rng);
        let r = residual(&a, 0.0, &t).unwrap();
        let direct = (0..3)
            .map(|k| vec_norm(&contract_all_but(&a, &t, k).unwrap()))
            .fold(0.0f64, f64::max);
        assert!((r - direct).abs() < 1e-14);
    }

    #[test]
    fn companion_pair_negates_lambda() {
        let mut rng = seeded_rng(3);
        let t = random_unit_tuple(&[2, 2, 2], &mut rng);
        let z = t.block(0).to_vec();
        let sym = RankOneTuple::new(vec![z.clone(), z.clone(), z]);
        let a = sym.to_tensor();
        let (neg, flipped) = companion_eigenpair(1.0, &sym);
        assert_eq!(neg, -1.0);
        let r = residual(&a, neg, &flipped).unwrap();
        assert!(r < 1e-12, "residual {}", r);

        // Applying the companion map twice returns to +lambda with a scaled
        // but still residual-valid tuple.
        let (pos, twice) = companion_eigenpair(neg, &flipped);
        assert_eq!(pos, 1.0);
        let r2 = residual(&a, pos, &twice).unwrap();
        assert!(r2 < 1e-12, "residual {}", r2);
    }

    #[test]
    fn companion_pair_of_printed_partially_symmetric_eigenpair() {
        let a = crate::samples::partially_symmetric_qubit_tensor();
        let z12 = vec![c(-0.9625, 0.0), c(-0.2242, 0.1530)];
        let z3 = vec![c(0.5054, 0.0213), c(0.6308, 0.5883)];
        let t = RankOneTuple::new(vec![z12.clone(), z12, z3]).normalized();
        let r = residual(&a, 0.9317, &t).unwrap();
        assert!(r <= 5e-4, "residual {}", r);
        let (neg, flipped) = companion_eigenpair(0.9317, &t);
        let rf = residual(&a, neg, &flipped).unwrap();
        assert!(rf <= 5e-4 + 1e-12, "residual {}", rf);
    }

    #[test]
    fn conjugate_symmetry_of_inner_product() {
        let mut rng = seeded_rng(19);
        for _ in 0..20 {
            let a = random_tensor(&[2, 3, 2], &mut rng);
            let b = random_tensor(&[2, 3, 2], &mut rng);
            let ab = inner_product(&a, &b).unwrap();
            let ba = inner_product(&b, &a).unwrap();
            assert!((ab - ba.conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn eigenpair_residual_is_phase_invariant_for_zero_total_phase() {
        let mut rng = seeded_rng(23);
        let t = random_unit_tuple(&[2, 2, 2], &mut rng);
        let a = t.to_tensor();
        let base = residual(&a, 1.0, &t).unwrap();

        let th1: f64 = rng.random_range(-3.0..3.0);
        let th2: f64 = rng.random_range(-3.0..3.0);
        let th3 = -(th1 + th2);
        let mut rotated = t.clone();
        rotated.rotate_block(0, Complex64::from_polar(1.0, th1));
        rotated.rotate_block(1, Complex64::from_polar(1.0, th2));
        rotated.rotate_block(2, Complex64::from_polar(1.0, th3));
        let r = residual(&a, 1.0, &rotated).unwrap();
        assert!(r <= base + 1e-12, "rotated {} vs base {}", r, base);
    }

    #[test]
    fn unit_norm_tensor_bounds_eigenvalues() {
        // |λ| = |<A, ⊗z>| ≤ ‖A‖_F on unit tuples, so fixed points of the
        // alternating map on a unit-norm tensor stay within [−1, 1].
        let mut rng = seeded_rng(29);
        for _ in 0..10 {
            let a = random_tensor(&[2, 2, 2], &mut rng).normalized().unwrap();
            let t = random_unit_tuple(&[2, 2, 2], &mut rng);
            let val = contract_full(&a, &t).unwrap();
            assert!(val.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn declared_symmetry_is_verified() {
        let ok = ComplexTensor::new(
            vec![2, 2],
            vec![c(1.0, 0.0), c(2.0, 1.0), c(2.0, 1.0), c(0.5, 0.0)],
            SymmetryClass::Full,
        );
        assert!(ok.is_ok());

        let bad = ComplexTensor::new(
            vec![2, 2],
            vec![c(1.0, 0.0), c(2.0, 1.0), c(2.0, 1.0 + 1e-9), c(0.5, 0.0)],
            SymmetryClass::Full,
        );
        assert!(matches!(bad, Err(Error::SymmetryViolation(_))));
    }

    #[test]
    fn permute_modes_round_trip() {
        let mut rng = seeded_rng(31);
        let a = random_tensor(&[2, 3, 4], &mut rng);
        let p = a.permute_modes(&[2, 0, 1]).unwrap();
        assert_eq!(p.dims(), &[4, 2, 3]);
        let back = p.permute_modes(&[1, 2, 0]).unwrap();
        assert_eq!(back.entries(), a.entries());
    }
}

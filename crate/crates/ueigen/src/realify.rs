//! Realification: rewriting `Re <A, ⊗ (x^(k) + i y^(k))>` as a real tensor
//! `B` over doubled dimensions.
//!
//! Each mode of `B` has size `2 n_k` with block layout `u^(k) = (x^(k),
//! y^(k))`: the first `n_k` coordinates carry the real part, the last `n_k`
//! the imaginary part. Putting all real parts first makes gauge fixing
//! (zeroing one imaginary coordinate) a single-variable elimination.

use num_complex::Complex64;

use crate::tensor::{ComplexTensor, MultiIndexIter, SymmetryClass};
use crate::{Error, Result};

/// Dense real tensor over doubled dimensions with `u = (x, y)` block layout.
#[derive(Debug, Clone)]
pub struct RealTensor {
    dims: Vec<usize>,
    source_dims: Vec<usize>,
    entries: Vec<f64>,
    groups: Vec<Vec<usize>>,
}

impl RealTensor {
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Doubled dimensions `(2 n_1, ..., 2 n_m)`.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Dimensions of the complex tensor this was built from.
    pub fn source_dims(&self) -> &[usize] {
        &self.source_dims
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Mode groups inherited from the source tensor's partial symmetry.
    pub fn symmetry_groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        let mut lin = 0;
        for (i, d) in idx.iter().zip(&self.dims) {
            lin = lin * d + i;
        }
        self.entries[lin]
    }

    /// Contracts the leading `m − 1` modes against real blocks, leaving a
    /// vector over the last mode.
    pub fn contract_leading(&self, blocks: &[&[f64]]) -> Result<Vec<f64>> {
        let m = self.order();
        if blocks.len() != m - 1 {
            return Err(Error::DimensionMismatch(format!(
                "expected {} blocks, got {}",
                m - 1,
                blocks.len()
            )));
        }
        for (k, b) in blocks.iter().enumerate() {
            if b.len() != self.dims[k] {
                return Err(Error::DimensionMismatch(format!(
                    "block {} has length {}, mode needs {}",
                    k,
                    b.len(),
                    self.dims[k]
                )));
            }
        }
        let mut out = vec![0.0; self.dims[m - 1]];
        for (lin, idx) in MultiIndexIter::new(&self.dims).enumerate() {
            let mut p = self.entries[lin];
            if p == 0.0 {
                continue;
            }
            for (k, b) in blocks.iter().enumerate() {
                p *= b[idx[k]];
            }
            out[idx[m - 1]] += p;
        }
        Ok(out)
    }

    /// Full contraction `<B, ⊗ u^(k)>` against `m` real blocks.
    pub fn value(&self, blocks: &[&[f64]]) -> Result<f64> {
        let m = self.order();
        let leading = self.contract_leading(&blocks[..m - 1])?;
        let last = blocks[m - 1];
        if last.len() != self.dims[m - 1] {
            return Err(Error::DimensionMismatch(format!(
                "last block has length {}, mode needs {}",
                last.len(),
                self.dims[m - 1]
            )));
        }
        Ok(leading.iter().zip(last).map(|(a, b)| a * b).sum())
    }
}

/// Builds the real tensor `B` with `<B, ⊗ u^(k)> = Re <A, ⊗ (x^(k) + i
/// y^(k))>` for every choice of real blocks `u^(k) = (x^(k), y^(k))`.
///
/// Expanding the product of `(x + iy)` factors, the entry of `B` at a doubled
/// multi-index whose modes select `p` imaginary blocks is `Re(conj(A) i^p)`,
/// i.e. cycles through `Re A, Im A, −Re A, −Im A` with `p mod 4`.
pub fn realify(a: &ComplexTensor) -> RealTensor {
    let m = a.order();
    let source_dims = a.dims().to_vec();
    let dims: Vec<usize> = source_dims.iter().map(|&n| 2 * n).collect();
    let len: usize = dims.iter().product();
    let mut entries = vec![0.0; len];
    let mut src_idx = vec![0usize; m];
    for (lin, idx) in MultiIndexIter::new(&dims).enumerate() {
        let mut p = 0usize;
        for k in 0..m {
            let n = source_dims[k];
            if idx[k] < n {
                src_idx[k] = idx[k];
            } else {
                src_idx[k] = idx[k] - n;
                p += 1;
            }
        }
        let v = a.get(&src_idx);
        entries[lin] = match p % 4 {
            0 => v.re,
            1 => v.im,
            2 => -v.re,
            _ => -v.im,
        };
    }
    RealTensor {
        dims,
        source_dims,
        entries,
        groups: a.symmetry().groups(m),
    }
}

/// Reassembles a complex vector from a doubled real block `(x, y)`:
/// `z_j = u_j + i u_{n+j}`. Norms are preserved.
pub fn complexify(u: &[f64]) -> Result<Vec<Complex64>> {
    if u.len() % 2 != 0 {
        return Err(Error::DimensionMismatch(format!(
            "block length {} is odd",
            u.len()
        )));
    }
    let n = u.len() / 2;
    Ok((0..n).map(|j| Complex64::new(u[j], u[n + j])).collect())
}

/// Splits a complex vector into its doubled real block `(x, y)`.
pub fn realify_block(z: &[Complex64]) -> Vec<f64> {
    let mut u = Vec::with_capacity(2 * z.len());
    u.extend(z.iter().map(|c| c.re));
    u.extend(z.iter().map(|c| c.im));
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{contract_full, RankOneTuple};
    use crate::testsupport::{random_tensor, random_unit_tuple, seeded_rng};

    #[test]
    fn scalar_one_realifies_to_x() {
        let a = ComplexTensor::new(
            vec![1],
            vec![Complex64::new(1.0, 0.0)],
            SymmetryClass::None,
        )
        .unwrap();
        let b = realify(&a);
        assert_eq!(b.entries(), &[1.0, 0.0]);
    }

    #[test]
    fn scalar_i_realifies_to_y() {
        // Re(conj(i)(x + iy)) = Re(−ix + y) = y.
        let a = ComplexTensor::new(
            vec![1],
            vec![Complex64::new(0.0, 1.0)],
            SymmetryClass::None,
        )
        .unwrap();
        let b = realify(&a);
        assert_eq!(b.entries(), &[0.0, 1.0]);
    }

    #[test]
    fn defining_identity_on_random_tuples() {
        let mut rng = seeded_rng(41);
        let a = random_tensor(&[2, 3, 2], &mut rng);
        let b = realify(&a);
        for _ in 0..100 {
            let t = random_unit_tuple(&[2, 3, 2], &mut rng);
            let complex_value = contract_full(&a, &t).unwrap().re;
            let blocks: Vec<Vec<f64>> =
                t.vectors().iter().map(|z| realify_block(z)).collect();
            let refs: Vec<&[f64]> = blocks.iter().map(|b| b.as_slice()).collect();
            let real_value = b.value(&refs).unwrap();
            assert!(
                (complex_value - real_value).abs() <= 1e-12,
                "{} vs {}",
                complex_value,
                real_value
            );
        }
    }

    #[test]
    fn complexify_round_trip_and_norm() {
        let z = complexify(&[1.0, 0.0]).unwrap();
        assert_eq!(z, vec![Complex64::new(1.0, 0.0)]);

        let z = complexify(&[-0.9625, -0.2242, 0.0, 0.1530]).unwrap();
        assert_eq!(
            z,
            vec![
                Complex64::new(-0.9625, 0.0),
                Complex64::new(-0.2242, 0.1530)
            ]
        );

        let s = 0.5f64.sqrt();
        let z = complexify(&[0.0, 0.0, s, s]).unwrap();
        assert_eq!(z, vec![Complex64::new(0.0, s), Complex64::new(0.0, s)]);
        let norm: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-15);

        assert!(complexify(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn realify_block_inverts_complexify() {
        let mut rng = seeded_rng(43);
        let t = random_unit_tuple(&[4], &mut rng);
        let u = realify_block(t.block(0));
        let z = complexify(&u).unwrap();
        assert_eq!(z, t.block(0));
        let un: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((un - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_symmetry_is_inherited() {
        let a = crate::samples::partially_symmetric_qubit_tensor();
        let b = realify(&a);
        assert_eq!(b.symmetry_groups(), &[vec![0, 1]]);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let x = b.get(&[i, j, k]);
                    let y = b.get(&[j, i, k]);
                    assert!((x - y).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn rank_one_value_at_own_factors() {
        let mut rng = seeded_rng(47);
        let t = random_unit_tuple(&[2, 2, 2], &mut rng);
        let a = t.to_tensor();
        let b = realify(&a);
        // At the realified factors of conj-free z, <B, ⊗u> = Re <A, ⊗z> = 1.
        let blocks: Vec<Vec<f64>> = t.vectors().iter().map(|z| realify_block(z)).collect();
        let refs: Vec<&[f64]> = blocks.iter().map(|b| b.as_slice()).collect();
        assert!((b.value(&refs).unwrap() - 1.0).abs() < 1e-12);
    }
}

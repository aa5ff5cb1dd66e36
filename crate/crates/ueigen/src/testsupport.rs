//! Helpers for tests and examples: seeded random data and small independent
//! oracles kept deliberately separate from the solver path they check.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::tensor::{ComplexTensor, RankOneTuple, SymmetryClass};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One standard complex Gaussian sample (Box–Muller).
pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    let r = (-2.0 * u1.ln()).sqrt();
    let th = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(r * th.cos(), r * th.sin()) / 2f64.sqrt()
}

pub fn random_tensor<R: Rng>(dims: &[usize], rng: &mut R) -> ComplexTensor {
    let len: usize = dims.iter().product();
    let entries = (0..len).map(|_| complex_gaussian(rng)).collect();
    ComplexTensor::new(dims.to_vec(), entries, SymmetryClass::None).unwrap()
}

pub fn random_unit_vector<R: Rng>(len: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..len).map(|_| complex_gaussian(rng)).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

pub fn random_unit_tuple<R: Rng>(dims: &[usize], rng: &mut R) -> RankOneTuple {
    RankOneTuple::new(dims.iter().map(|&d| random_unit_vector(d, rng)).collect())
}

/// Largest singular value of a complex matrix, via the characteristic
/// polynomial of `A^H A` and Sturm-sequence bisection. No eigenvalue library
/// is involved, so this can serve as an independent reference for spectral
/// results.
pub fn sigma_max_charpoly(a: &ComplexTensor) -> f64 {
    assert_eq!(a.order(), 2, "matrix oracle needs a 2-way tensor");
    let (rows, cols) = (a.dims()[0], a.dims()[1]);
    // H = A^H A, Hermitian PSD of side `cols`.
    let mut h = vec![Complex64::new(0.0, 0.0); cols * cols];
    for i in 0..cols {
        for j in 0..cols {
            let mut s = Complex64::new(0.0, 0.0);
            for r in 0..rows {
                s += a.get(&[r, i]).conj() * a.get(&[r, j]);
            }
            h[i * cols + j] = s;
        }
    }
    let coeffs = charpoly_hermitian(&h, cols);
    let hi = 1.0
        + (0..cols)
            .map(|i| (0..cols).map(|j| h[i * cols + j].norm()).sum::<f64>())
            .fold(0.0f64, f64::max);
    let lmax = largest_root_sturm(&coeffs, 0.0, hi);
    lmax.max(0.0).sqrt()
}

/// Coefficients of det(tI − H) for Hermitian H of side 2 or 3, highest degree
/// first.
fn charpoly_hermitian(h: &[Complex64], n: usize) -> Vec<f64> {
    let re = |i: usize, j: usize| h[i * n + j].re;
    let entry = |i: usize, j: usize| h[i * n + j];
    match n {
        1 => vec![1.0, -re(0, 0)],
        2 => {
            let tr = re(0, 0) + re(1, 1);
            let det = re(0, 0) * re(1, 1) - entry(0, 1).norm_sqr();
            vec![1.0, -tr, det]
        }
        3 => {
            let tr = re(0, 0) + re(1, 1) + re(2, 2);
            let m01 = re(0, 0) * re(1, 1) - entry(0, 1).norm_sqr();
            let m02 = re(0, 0) * re(2, 2) - entry(0, 2).norm_sqr();
            let m12 = re(1, 1) * re(2, 2) - entry(1, 2).norm_sqr();
            let x = entry(0, 1);
            let y = entry(0, 2);
            let z = entry(1, 2);
            let det = re(0, 0) * re(1, 1) * re(2, 2) + 2.0 * (x * z * y.conj()).re
                - re(0, 0) * z.norm_sqr()
                - re(1, 1) * y.norm_sqr()
                - re(2, 2) * x.norm_sqr();
            vec![1.0, -tr, m01 + m02 + m12, -det]
        }
        _ => panic!("charpoly oracle supports sides 1..3"),
    }
}

/// Largest real root of `p` inside `[lo, hi]` by Sturm-count bisection.
fn largest_root_sturm(p: &[f64], lo: f64, hi: f64) -> f64 {
    let chain = sturm_chain(p);
    let count_gt = |t: f64| sign_changes(&chain, t);
    // count_gt(t) = number of roots in (t, hi]; shrink onto the largest one.
    let (mut lo, mut hi) = (lo, hi);
    debug_assert!(count_gt(lo) >= 1);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_gt(mid) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * (1.0 + hi.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn sturm_chain(p: &[f64]) -> Vec<Vec<f64>> {
    let mut chain = vec![p.to_vec(), derivative(p)];
    loop {
        let k = chain.len();
        let rem = neg_poly_rem(&chain[k - 2], &chain[k - 1]);
        if rem.iter().all(|&c| c.abs() < 1e-300) {
            break;
        }
        chain.push(rem);
        if chain.last().unwrap().len() == 1 {
            break;
        }
    }
    chain
}

fn derivative(p: &[f64]) -> Vec<f64> {
    let n = p.len() - 1;
    (0..n).map(|i| p[i] * (n - i) as f64).collect()
}

/// Negated remainder of polynomial division, as used by Sturm sequences.
fn neg_poly_rem(num: &[f64], den: &[f64]) -> Vec<f64> {
    let mut rem = num.to_vec();
    let dn = den.len();
    while rem.len() >= dn {
        let scale = rem[0] / den[0];
        for (i, &d) in den.iter().enumerate() {
            rem[i] -= scale * d;
        }
        rem.remove(0);
    }
    rem.iter().map(|&c| -c).collect()
}

fn eval_poly(p: &[f64], t: f64) -> f64 {
    p.iter().fold(0.0, |acc, &c| acc * t + c)
}

fn sign_changes(chain: &[Vec<f64>], t: f64) -> usize {
    let mut changes = 0;
    let mut last = 0.0f64;
    for p in chain {
        let v = eval_poly(p, t);
        if v != 0.0 {
            if last != 0.0 && v.signum() != last.signum() {
                changes += 1;
            }
            last = v;
        }
    }
    changes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_oracle_on_diagonal_matrix() {
        let a = ComplexTensor::new(
            vec![2, 2],
            vec![
                Complex64::new(3.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -2.0),
            ],
            SymmetryClass::None,
        )
        .unwrap();
        assert!((sigma_max_charpoly(&a) - 3.0).abs() < 1e-10);
    }

    #[test]
    fn sigma_oracle_on_known_3x3() {
        // Rank-one uv^H has sigma_max = ‖u‖ ‖v‖.
        let u = [
            Complex64::new(1.0, 1.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(-1.0, 0.5),
        ];
        let v = [
            Complex64::new(0.5, 0.0),
            Complex64::new(1.0, -1.0),
            Complex64::new(2.0, 0.0),
        ];
        let entries: Vec<Complex64> = (0..3)
            .flat_map(|i| (0..3).map(move |j| u[i] * v[j].conj()))
            .collect();
        let a = ComplexTensor::new(vec![3, 3], entries, SymmetryClass::None).unwrap();
        let nu = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((sigma_max_charpoly(&a) - nu * nv).abs() < 1e-9);
    }
}

//! Maximizer recovery from optimal moment vectors: flat truncation, atom
//! extraction through multiplication matrices, reconstruction of the trailing
//! block, local polish, and certification.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::moment::MomentRelaxation;
use crate::oracle::alternating_refine;
use crate::realify::RealTensor;
use crate::tensor::{
    residual, Certificate, ComplexTensor, EigenpairResult, RankOneTuple,
};
use crate::{tol, Error, Result};

/// Numerical rank of a PSD moment matrix and the flat-truncation test
/// `rank M_N = rank M_{N−1}`, where the order-(N−1) matrix is the leading
/// principal block of side `prev_side`.
pub fn flatness_rank(m: &DMatrix<f64>, prev_side: usize, rank_tol: f64) -> (usize, bool) {
    let rank_full = numerical_rank(m, rank_tol);
    let prev = m.view((0, 0), (prev_side, prev_side)).into_owned();
    let rank_prev = numerical_rank(&prev, rank_tol);
    (rank_full, rank_full == rank_prev)
}

fn numerical_rank(m: &DMatrix<f64>, rank_tol: f64) -> usize {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let smax = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if smax == 0.0 {
        return 0;
    }
    eig.eigenvalues
        .iter()
        .filter(|&&l| l.abs() >= rank_tol * smax)
        .count()
}

/// Recovers the atoms of a flat moment vector.
///
/// Rank one reads the degree-one moments directly. Otherwise: factor
/// `M_N ≈ V Vᵀ`, column-reduce `Vᵀ` pivoting on monomials in graded order to
/// get a polynomial basis of the column space, form the multiplication
/// matrices, and read the atoms off a Schur triangularization of a generic
/// combination. Atoms must satisfy every equality constraint of the
/// relaxation to [`tol::ATOM_FEAS`].
pub fn extract_atoms(rel: &MomentRelaxation, y: &[f64], rank: usize) -> Result<Vec<Vec<f64>>> {
    let nvars = rel.index().nvars();
    if rank == 0 {
        return Err(Error::Solver("moment matrix has rank zero".into()));
    }
    if rank == 1 {
        let mut atom = vec![0.0; nvars];
        for (i, x) in atom.iter_mut().enumerate() {
            let pos = rel
                .index()
                .position(crate::poly::Monomial::var(i, nvars).exps())
                .unwrap();
            *x = y[pos];
        }
        return validate_atoms(rel, vec![atom]);
    }

    let m = rel.moment_matrix(y);
    let side = rel.moment_side();
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..side).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    // W = Vᵀ with V the factor of the best rank-`rank` approximation.
    let mut w = DMatrix::zeros(rank, side);
    for (t, &e) in order.iter().take(rank).enumerate() {
        let scale = eig.eigenvalues[e].max(0.0).sqrt();
        for c in 0..side {
            w[(t, c)] = scale * eig.eigenvectors[(c, e)];
        }
    }

    // Column echelon with graded-order pivoting.
    let wmax = w.amax();
    let mut pivot_cols: Vec<usize> = Vec::with_capacity(rank);
    let mut next_row = 0;
    for col in 0..side {
        if next_row == rank {
            break;
        }
        let (mut best_row, mut best_val) = (next_row, 0.0f64);
        for r in next_row..rank {
            if w[(r, col)].abs() > best_val {
                best_val = w[(r, col)].abs();
                best_row = r;
            }
        }
        if best_val <= 1e-8 * wmax {
            continue;
        }
        w.swap_rows(next_row, best_row);
        let piv = w[(next_row, col)];
        for c in 0..side {
            w[(next_row, c)] /= piv;
        }
        for r in 0..rank {
            if r != next_row {
                let factor = w[(r, col)];
                if factor != 0.0 {
                    for c in 0..side {
                        w[(r, c)] -= factor * w[(next_row, c)];
                    }
                }
            }
        }
        pivot_cols.push(col);
        next_row += 1;
    }
    if pivot_cols.len() < rank {
        return Err(Error::Solver(
            "column space of the moment matrix is rank-deficient beyond tolerance".into(),
        ));
    }
    // Flatness guarantees pivots of degree ≤ N−1 so that x_i · pivot stays
    // inside the truncated basis.
    let basis = rel.moment_basis();
    let max_pivot_degree = pivot_cols
        .iter()
        .map(|&c| basis[c].degree())
        .max()
        .unwrap();
    if max_pivot_degree as usize >= rel.order() {
        return Err(Error::Solver(
            "pivot monomials reach the truncation degree; flatness is not usable".into(),
        ));
    }

    // Multiplication matrices N_i on the pivot basis.
    let col_of = |exps: &[u32]| -> Option<usize> {
        let target = basis.iter().position(|m| m.exps() == exps);
        target
    };
    let mut mult = Vec::with_capacity(nvars);
    for i in 0..nvars {
        let mut ni = DMatrix::zeros(rank, rank);
        for (t, &pc) in pivot_cols.iter().enumerate() {
            let mut exps = basis[pc].exps().to_vec();
            exps[i] += 1;
            let col = col_of(&exps).ok_or_else(|| {
                Error::Solver("shifted pivot monomial left the basis".into())
            })?;
            for r in 0..rank {
                ni[(r, t)] = w[(r, col)];
            }
        }
        mult.push(ni);
    }

    // Generic combination; fixed weights keep the run deterministic.
    let mut atoms = Vec::new();
    for attempt in 0..2u32 {
        let weights: Vec<f64> = (0..nvars)
            .map(|i| {
                let x = (i as f64 + 1.37 + attempt as f64 * 0.61).sin();
                0.4 + 0.6 * x * x
            })
            .collect();
        let wsum: f64 = weights.iter().sum();
        let mut t = DMatrix::zeros(rank, rank);
        for (ni, &wi) in mult.iter().zip(&weights) {
            t += ni * (wi / wsum);
        }
        let schur = nalgebra::Schur::new(t);
        let (q, tri) = schur.unpack();
        let subdiag_ok = (1..rank).all(|i| tri[(i, i - 1)].abs() <= 1e-7 * (1.0 + tri.amax()));
        if !subdiag_ok {
            continue;
        }
        atoms.clear();
        for j in 0..rank {
            let qj = q.column(j);
            let mut atom = vec![0.0; nvars];
            for (i, ni) in mult.iter().enumerate() {
                atom[i] = (qj.transpose() * ni * qj)[(0, 0)];
            }
            atoms.push(atom);
        }
        break;
    }
    if atoms.is_empty() {
        return Err(Error::Solver(
            "multiplication matrices do not commute to tolerance".into(),
        ));
    }
    validate_atoms(rel, atoms)
}

fn validate_atoms(rel: &MomentRelaxation, atoms: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for atom in atoms {
        let feasible = rel.specs().iter().all(|spec| {
            spec.polynomial().evaluate(&atom).abs() <= tol::ATOM_FEAS
        });
        if !feasible {
            continue;
        }
        let duplicate = kept.iter().any(|k| {
            k.iter()
                .zip(&atom)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
                <= 1e-6
        });
        if !duplicate {
            kept.push(atom);
        }
    }
    if kept.is_empty() {
        return Err(Error::Solver(
            "no extracted atom satisfies the equality constraints".into(),
        ));
    }
    Ok(kept)
}

/// Rebuilds the trailing block from the leading ones:
/// `u^(m) = <B, u^(1) ⊗ … ⊗ u^(m−1)> / λ`.
///
/// Fails when `λ` is below [`tol::LAMBDA_MIN`]: the tensor then annihilates
/// every product of the leading blocks and no eigenvector exists on this
/// branch.
pub fn recover_last_block(b: &RealTensor, blocks: &[&[f64]], lambda: f64) -> Result<Vec<f64>> {
    if lambda <= tol::LAMBDA_MIN {
        return Err(Error::DegenerateEigenvalue(lambda));
    }
    let v = b.contract_leading(blocks)?;
    Ok(v.into_iter().map(|x| x / lambda).collect())
}

/// Outcome of the alternating polish.
#[derive(Debug, Clone)]
pub struct PolishOutcome {
    pub lambda: f64,
    pub tuple: RankOneTuple,
    pub residual: f64,
    pub converged: bool,
}

/// Local refinement of a near-critical tuple by alternating exact block
/// maximizations, until the eigen residual drops below
/// [`tol::POLISH_RESIDUAL`] or 500 sweeps pass. The value never decreases
/// beyond roundoff.
pub fn polish(a: &ComplexTensor, t: &RankOneTuple) -> PolishOutcome {
    match alternating_refine(a, t, 500, tol::POLISH_RESIDUAL) {
        Some(out) => PolishOutcome {
            lambda: out.lambda,
            tuple: out.tuple,
            residual: out.residual,
            converged: out.converged,
        },
        None => {
            // Vanishing contraction: report the input as-is.
            let lambda = crate::tensor::contract_full(a, t).map(|v| v.re).unwrap_or(0.0);
            let r = residual(a, lambda, t).unwrap_or(f64::INFINITY);
            PolishOutcome {
                lambda,
                tuple: t.clone(),
                residual: r,
                converged: false,
            }
        }
    }
}

/// Applies the reporting gauge: phases move each leading block's first
/// sizable component onto the non-negative real axis, with the accumulated
/// phase pushed into the last block so the total phase (and the value) is
/// unchanged. Tuples whose blocks all agree are rotated by the m-th root of
/// unity that best aligns the first component instead, preserving equality of
/// the blocks.
pub fn canonical_gauge(t: &RankOneTuple) -> RankOneTuple {
    let m = t.order();
    if m == 1 {
        return t.clone();
    }
    let all_equal = (1..m).all(|k| {
        t.block(k).len() == t.block(0).len()
            && t.block(k)
                .iter()
                .zip(t.block(0))
                .all(|(a, b)| (a - b).norm() <= 1e-12)
    });
    if all_equal {
        let first = leading_component(t.block(0));
        let mut best = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0usize);
        for j in 0..m {
            let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / m as f64);
            let rotated = omega * first;
            let key = (rotated.re, rotated.im, j);
            if key.0 > best.0 || (key.0 == best.0 && key.1 > best.1) {
                best = key;
            }
        }
        let omega =
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * best.2 as f64 / m as f64);
        let mut out = t.clone();
        for k in 0..m {
            out.rotate_block(k, omega);
        }
        return out;
    }
    let mut out = t.clone();
    let mut total = 0.0;
    for k in 0..m - 1 {
        let theta = leading_component(out.block(k)).arg();
        out.rotate_block(k, Complex64::from_polar(1.0, -theta));
        total += theta;
    }
    out.rotate_block(m - 1, Complex64::from_polar(1.0, total));
    out
}

fn leading_component(z: &[Complex64]) -> Complex64 {
    z.iter()
        .find(|c| c.norm() > 1e-9)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0))
}

/// Packages an eigenpair with its residual and bound gap.
///
/// `upper_bound` and `lower_bound` are on the λ scale. Certified-global
/// requires the gap within `gap_tol` and the residual within
/// [`tol::RESIDUAL_CERT`].
pub fn certify(
    a: &ComplexTensor,
    lambda: f64,
    t: &RankOneTuple,
    upper_bound: f64,
    oracle_lb: f64,
    order_used: usize,
    gap_tol: f64,
) -> Result<EigenpairResult> {
    let r = residual(a, lambda, t)?;
    let gap = upper_bound - lambda;
    let mut certificate = Certificate::empty();
    certificate.certified_global = gap <= gap_tol && r <= tol::RESIDUAL_CERT;
    Ok(EigenpairResult {
        lambda,
        vectors: t.clone(),
        residual: r,
        upper_bound,
        lower_bound: oracle_lb,
        order_used,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moment::{build_relaxation, dirac_moments, MomentIndex};
    use crate::poly::{sphere_constraint, Polynomial};
    use crate::realify::{complexify, realify, realify_block};
    use crate::testsupport::{random_unit_tuple, seeded_rng};
    use rand::Rng;

    #[test]
    fn dirac_moment_matrix_is_flat_rank_one() {
        let f = Polynomial::var(0, 2);
        let g = sphere_constraint(0..2, 2);
        let rel = build_relaxation(&f, &[g], 2).unwrap();
        let y = dirac_moments(rel.index(), &[0.6, 0.8]);
        let m = rel.moment_matrix(&y);
        let prev = crate::moment::moment_count(2, 1);
        let (rank, flat) = flatness_rank(&m, prev, tol::FLAT_RANK);
        assert_eq!(rank, 1);
        assert!(flat);

        let atoms = extract_atoms(&rel, &y, rank).unwrap();
        assert_eq!(atoms.len(), 1);
        assert!((atoms[0][0] - 0.6).abs() < 1e-9);
        assert!((atoms[0][1] - 0.8).abs() < 1e-9);
    }

    #[test]
    fn two_atom_moments_are_flat_and_recovered() {
        let f = Polynomial::var(0, 2);
        let g = sphere_constraint(0..2, 2);
        let rel = build_relaxation(&f, &[g], 2).unwrap();
        let u = [0.6, 0.8];
        let v = [-0.6, -0.8];
        let yu = dirac_moments(rel.index(), &u);
        let yv = dirac_moments(rel.index(), &v);
        let y: Vec<f64> = yu.iter().zip(&yv).map(|(a, b)| 0.5 * (a + b)).collect();
        let m = rel.moment_matrix(&y);
        let prev = crate::moment::moment_count(2, 1);
        let (rank, flat) = flatness_rank(&m, prev, tol::FLAT_RANK);
        assert_eq!(rank, 2);
        assert!(flat);

        let atoms = extract_atoms(&rel, &y, rank).unwrap();
        assert_eq!(atoms.len(), 2);
        for atom in &atoms {
            let matches_u = (atom[0] - u[0]).abs() < 1e-6 && (atom[1] - u[1]).abs() < 1e-6;
            let matches_v = (atom[0] - v[0]).abs() < 1e-6 && (atom[1] - v[1]).abs() < 1e-6;
            assert!(matches_u || matches_v, "atom {:?}", atom);
        }
    }

    #[test]
    fn generic_psd_matrix_is_not_flat() {
        let mut rng = seeded_rng(113);
        let index = MomentIndex::new(2, 4);
        let side = crate::moment::moment_count(2, 2);
        let mut m = DMatrix::zeros(side, side);
        for r in 0..side {
            for c in 0..side {
                m[(r, c)] = rng.random_range(-1.0..1.0);
            }
        }
        let m = &m * &m.transpose();
        let _ = index;
        let prev = crate::moment::moment_count(2, 1);
        let (rank, flat) = flatness_rank(&m, prev, tol::FLAT_RANK);
        assert_eq!(rank, side);
        assert!(!flat);
    }

    #[test]
    fn last_block_of_rank_one_factors() {
        let mut rng = seeded_rng(127);
        let t = random_unit_tuple(&[2, 2, 2], &mut rng);
        let a = t.to_tensor();
        let b = realify(&a);
        let u0 = realify_block(t.block(0));
        let u1 = realify_block(t.block(1));
        let last = recover_last_block(&b, &[&u0, &u1], 1.0).unwrap();
        let z = complexify(&last).unwrap();
        for (got, want) in z.iter().zip(t.block(2)) {
            assert!((got - want).norm() < 1e-12);
        }
        let n: f64 = last.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() < 1e-8);
    }

    #[test]
    fn last_block_matches_printed_partially_symmetric_vector() {
        let a = crate::samples::partially_symmetric_qubit_tensor();
        let b = realify(&a);
        let u1 = [-0.9625, -0.2242, 0.0, 0.1530];
        let last = recover_last_block(&b, &[&u1, &u1], 0.9317).unwrap();
        let z = complexify(&last).unwrap();
        let expected = [
            Complex64::new(0.5054, 0.0213),
            Complex64::new(0.6308, 0.5883),
        ];
        for (got, want) in z.iter().zip(&expected) {
            assert!((got - want).norm() < 2e-3, "{} vs {}", got, want);
        }
    }

    #[test]
    fn last_block_matches_printed_phase_parameterized_vector() {
        let a = crate::samples::phase_parameterized_tensor(2);
        let b = realify(&a);
        let z1 = [
            Complex64::new(-0.6928, 0.0),
            Complex64::new(-0.6734, -0.2580),
        ];
        let z2 = [Complex64::new(-0.689, 0.0), Complex64::new(-0.450, 0.5681)];
        let u1 = realify_block(&z1);
        let u2 = realify_block(&z2);
        let last = recover_last_block(&b, &[&u1, &u2], 0.8895).unwrap();
        let z = complexify(&last).unwrap();
        let expected = [
            Complex64::new(0.1533, 0.7083),
            Complex64::new(-0.4375, 0.5324),
        ];
        for (got, want) in z.iter().zip(&expected) {
            assert!((got - want).norm() < 2e-3, "{} vs {}", got, want);
        }
    }

    #[test]
    fn degenerate_lambda_is_reported() {
        let b = realify(&ComplexTensor::zeros(vec![2, 2]));
        let u = [1.0, 0.0, 0.0, 0.0];
        assert!(matches!(
            recover_last_block(&b, &[&u], 0.0),
            Err(Error::DegenerateEigenvalue(_))
        ));
    }

    #[test]
    fn polish_keeps_exact_pairs_and_fixes_printed_ones() {
        let mut rng = seeded_rng(131);
        let t = random_unit_tuple(&[2, 2, 2], &mut rng);
        let a = t.to_tensor();
        let out = polish(&a, &t);
        assert!((out.lambda - 1.0).abs() < 1e-12);
        assert!(out.residual < 1e-10);

        let a = crate::samples::nonsymmetric_qubit_tensor();
        let rough = RankOneTuple::new(vec![
            vec![Complex64::new(-0.0287, 0.0), Complex64::new(-0.9996, 0.0)],
            vec![
                Complex64::new(-0.7404, 0.0),
                Complex64::new(-0.3361, -0.5821),
            ],
            vec![Complex64::new(0.2248, 0.0), Complex64::new(0.8439, 0.4872)],
        ]);
        let out = polish(&a, &rough);
        assert!(out.converged);
        assert!(out.residual < 1e-10);
        assert!((out.lambda - 0.9661).abs() <= 5e-5, "lambda {}", out.lambda);
        // Polish never loses value beyond roundoff.
        assert!(out.lambda >= 0.9661 - 5e-5 - 1e-12);
    }

    #[test]
    fn polish_recovers_from_perturbation() {
        let mut rng = seeded_rng(137);
        let t = random_unit_tuple(&[2, 2, 2], &mut rng);
        let a = t.to_tensor();
        let mut vectors: Vec<Vec<Complex64>> = t.vectors().to_vec();
        for v in &mut vectors {
            for z in v.iter_mut() {
                *z += Complex64::new(rng.random_range(-1e-3..1e-3), rng.random_range(-1e-3..1e-3));
            }
        }
        let out = polish(&a, &RankOneTuple::new(vectors).normalized());
        assert!((out.lambda - 1.0).abs() < 1e-9);
    }

    #[test]
    fn certify_threshold_logic() {
        let mut rng = seeded_rng(139);
        let t = random_unit_tuple(&[2, 2, 2], &mut rng);
        let a = t.to_tensor();
        let good = certify(&a, 1.0, &t, 1.0 + 1e-7, 1.0 - 1e-9, 3, tol::CERT_GAP).unwrap();
        assert!(good.certificate.certified_global);
        let gap = certify(&a, 1.0, &t, 1.0 + 1e-2, 1.0 - 1e-9, 3, tol::CERT_GAP).unwrap();
        assert!(!gap.certificate.certified_global);
    }

    #[test]
    fn canonical_gauge_fixes_leading_phase() {
        let mut rng = seeded_rng(149);
        let t = random_unit_tuple(&[2, 2, 2], &mut rng);
        let a = t.to_tensor();
        let g = canonical_gauge(&t);
        let lead = g.block(0)[0];
        assert!(lead.im.abs() < 1e-12 && lead.re >= 0.0);
        // Gauge is within the zero-total-phase class: residual is preserved.
        let r = residual(&a, 1.0, &g).unwrap();
        assert!(r < 1e-10, "residual {}", r);

        // A symmetric tuple stays symmetric.
        let z = t.block(0).to_vec();
        let sym = RankOneTuple::new(vec![z.clone(), z.clone(), z]);
        let g = canonical_gauge(&sym);
        for k in 1..3 {
            for (a, b) in g.block(k).iter().zip(g.block(0)) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }
}

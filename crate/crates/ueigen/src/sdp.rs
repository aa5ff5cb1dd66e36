//! Dense semidefinite solver for small moment relaxations.
//!
//! A [`ConeProblem`] maximizes a linear objective over a moment-style vector
//! `y` subject to a dense linear equality system and one PSD constraint on
//! the matrix pencil assembled from `y`.
//!
//! The solve happens in two stages, both deterministic:
//!
//! 1. **Equality preprocessing.** A rank-revealing Householder QR with column
//!    pivoting (relative threshold [`tol::QR_RANK`]) detects and discards
//!    dependent rows — localizing rows coming from the Jacobian minors are
//!    frequently dependent — checks consistency, and reduces the problem onto
//!    the equality null space: `y = y_p + Z w` with `Z` orthonormal. What
//!    remains is a standard-form pair
//!
//!    ```text
//!    (P) min <C, X>  s.t. <A_j, X> = b_j, X ⪰ 0
//!    (D) max bᵀw     s.t. Σ w_j A_j + S = C, S ⪰ 0
//!    ```
//!
//!    whose (D) side carries the reduced moment vector and whose slack `S`
//!    is the moment matrix itself.
//!
//! 2. **Interior point.** An infeasible-start primal–dual path-following
//!    method with the HKM direction and Mehrotra predictor–corrector. The
//!    Schur complement gets a static regularization of [`tol::SCHUR_REG`]
//!    (scaled by its largest diagonal) and every Newton solve performs one
//!    step of iterative refinement against the unregularized matrix. Feasible
//!    problems at desk scale reach gaps near 1e−9; iterations are
//!    bit-reproducible because no randomized or multi-threaded step is
//!    involved.
//!
//! Infeasibility measures are relative: `‖b − A(X)‖/(1+‖b‖)` and
//! `‖C − Aᵀ(w) − S‖_F/(1+‖C‖_F)` in the scaled problem, and the gap is
//! `|pobj − dobj|/(1 + |pobj| + |dobj|)`.

use nalgebra::{DMatrix, DVector};

use crate::{tol, Error, Result};

/// Linear objective over `y`, equality rows, and one PSD pencil constraint
/// `mat_const + Σ_a y_a mat_terms[a] ⪰ 0`.
///
/// Matrix term lists hold the full symmetric entry pattern (both triangles
/// for off-diagonal entries).
#[derive(Debug, Clone)]
pub struct ConeProblem {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub eq_rows: Vec<Vec<(usize, f64)>>,
    pub eq_rhs: Vec<f64>,
    pub block_side: usize,
    pub mat_terms: Vec<Vec<(usize, usize, f64)>>,
    pub mat_const: Vec<(usize, usize, f64)>,
}

impl ConeProblem {
    /// Assembles the PSD pencil at `y`.
    pub fn assemble(&self, y: &[f64]) -> DMatrix<f64> {
        let n = self.block_side;
        let mut m = DMatrix::zeros(n, n);
        for &(r, c, v) in &self.mat_const {
            m[(r, c)] += v;
        }
        for (a, terms) in self.mat_terms.iter().enumerate() {
            let ya = y[a];
            if ya == 0.0 {
                continue;
            }
            for &(r, c, v) in terms {
                m[(r, c)] += v * ya;
            }
        }
        m
    }
}

/// Solver tolerances and iteration caps.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
    pub schur_reg: f64,
    pub qr_rank_tol: f64,
    pub verbose: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            gap_tol: tol::SDP_GAP,
            feas_tol: tol::SDP_FEAS,
            max_iter: 200,
            schur_reg: tol::SCHUR_REG,
            qr_rank_tol: tol::QR_RANK,
            verbose: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationStatus {
    /// Feasibility and gap tolerances met.
    Optimal,
    /// Iteration cap hit; best iterate returned.
    MaxIter,
    /// Factorization broke down after regularization; best iterate returned.
    Numerical,
}

/// Objective and feasibility record of one iterate.
#[derive(Debug, Clone, Copy)]
pub struct IterStats {
    pub mu: f64,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub p_infeas: f64,
    pub d_infeas: f64,
}

/// Solver output. `value` is the attained maximum of the cone problem's
/// objective (the moment-side value); `certificate_value` is the matching
/// minimization-side objective, an upper approximation of the same number.
#[derive(Debug, Clone)]
pub struct SolverResult {
    pub status: TerminationStatus,
    pub value: f64,
    pub certificate_value: f64,
    pub y: Vec<f64>,
    pub dual_matrix: DMatrix<f64>,
    pub p_infeas: f64,
    pub d_infeas: f64,
    pub rel_gap: f64,
    pub iterations: usize,
    pub eq_rank: usize,
    pub reduced_dim: usize,
    pub trace: Vec<IterStats>,
}

struct Reflector {
    start: usize,
    v: Vec<f64>,
    beta: f64,
}

struct NullSpaceReduction {
    y_p: DVector<f64>,
    z: DMatrix<f64>,
    rank: usize,
}

/// Rank-revealing QR of the transposed equality system; yields the minimum
/// norm particular solution and an orthonormal null-space basis.
fn reduce_equalities(p: &ConeProblem, rank_tol: f64) -> Result<NullSpaceReduction> {
    let q = p.num_vars;
    let m = p.eq_rows.len();
    if m == 0 {
        return Ok(NullSpaceReduction {
            y_p: DVector::zeros(q),
            z: DMatrix::identity(q, q),
            rank: 0,
        });
    }
    // at[:, k] = k-th equality row.
    let mut at = DMatrix::zeros(q, m);
    for (k, row) in p.eq_rows.iter().enumerate() {
        for &(i, c) in row {
            at[(i, k)] += c;
        }
    }
    let mut perm: Vec<usize> = (0..m).collect();
    let mut reflectors: Vec<Reflector> = Vec::new();
    let kmax = q.min(m);
    let mut first_pivot = 0.0f64;
    let mut rank = 0;
    for k in 0..kmax {
        let mut best = k;
        let mut best_norm = 0.0;
        for j in k..m {
            let nj = at.view((k, j), (q - k, 1)).norm();
            if nj > best_norm {
                best_norm = nj;
                best = j;
            }
        }
        if k == 0 {
            first_pivot = best_norm;
        }
        if best_norm <= rank_tol * first_pivot.max(f64::MIN_POSITIVE) {
            break;
        }
        at.swap_columns(k, best);
        perm.swap(k, best);

        let mut v: Vec<f64> = (k..q).map(|i| at[(i, k)]).collect();
        let alpha = -v[0].signum() * best_norm;
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv > 0.0 {
            let beta = 2.0 / vtv;
            for j in k..m {
                let dot: f64 = (0..q - k).map(|i| v[i] * at[(k + i, j)]).sum();
                let s = beta * dot;
                for i in 0..q - k {
                    at[(k + i, j)] -= s * v[i];
                }
            }
            reflectors.push(Reflector { start: k, v, beta });
        } else {
            reflectors.push(Reflector {
                start: k,
                v,
                beta: 0.0,
            });
        }
        at[(k, k)] = alpha;
        for i in k + 1..q {
            at[(i, k)] = 0.0;
        }
        rank = k + 1;
    }

    // Solve R11ᵀ t1 = (Πᵀ b)_1 (forward substitution on the lower triangle).
    let mut t1 = vec![0.0; rank];
    for i in 0..rank {
        let mut s = p.eq_rhs[perm[i]];
        for j in 0..i {
            s -= at[(j, i)] * t1[j];
        }
        let d = at[(i, i)];
        if d.abs() <= f64::MIN_POSITIVE {
            return Err(Error::Solver("singular pivot in equality QR".into()));
        }
        t1[i] = s / d;
    }
    // Dropped rows must be consistent with the kept ones.
    let bnorm = p.eq_rhs.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    for k in rank..m {
        let predicted: f64 = (0..rank).map(|i| at[(i, k)] * t1[i]).sum();
        if (predicted - p.eq_rhs[perm[k]]).abs() > 1e-8 * (1.0 + bnorm) {
            return Err(Error::Solver(format!(
                "equality system is inconsistent (row {} off by {:.3e})",
                perm[k],
                (predicted - p.eq_rhs[perm[k]]).abs()
            )));
        }
    }

    let apply_q = |target: &mut [f64]| {
        for refl in reflectors.iter().rev() {
            if refl.beta == 0.0 {
                continue;
            }
            let dot: f64 = refl
                .v
                .iter()
                .enumerate()
                .map(|(i, &vi)| vi * target[refl.start + i])
                .sum();
            let s = refl.beta * dot;
            for (i, &vi) in refl.v.iter().enumerate() {
                target[refl.start + i] -= s * vi;
            }
        }
    };

    let mut y_p = vec![0.0; q];
    y_p[..rank].copy_from_slice(&t1);
    apply_q(&mut y_p);

    let mut z = DMatrix::zeros(q, q - rank);
    for (t, j) in (rank..q).enumerate() {
        let mut e = vec![0.0; q];
        e[j] = 1.0;
        apply_q(&mut e);
        z.column_mut(t).copy_from_slice(&e);
    }

    Ok(NullSpaceReduction {
        y_p: DVector::from_vec(y_p),
        z,
        rank,
    })
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn frob_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x * y)
        .sum()
}

/// Largest step `α` with `p + α d ⪰ 0`, or `f64::INFINITY` when unbounded.
fn max_psd_step(p: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<f64> {
    let chol = nalgebra::Cholesky::new(p.clone())
        .ok_or_else(|| Error::Solver("iterate lost positive definiteness".into()))?;
    let l = chol.l();
    let t1 = l
        .solve_lower_triangular(d)
        .ok_or_else(|| Error::Solver("triangular solve failed".into()))?;
    let t2 = l
        .solve_lower_triangular(&t1.transpose())
        .ok_or_else(|| Error::Solver("triangular solve failed".into()))?;
    let eig = nalgebra::SymmetricEigen::new(sym(&t2));
    let lam_min = eig.eigenvalues.min();
    if lam_min >= -1e-14 {
        Ok(f64::INFINITY)
    } else {
        Ok(-1.0 / lam_min)
    }
}

/// Solves the cone problem to the configured tolerances.
///
/// Deterministic: identical inputs and configuration produce bit-identical
/// iterate sequences. One solve is single-threaded; run independent solves
/// concurrently if needed.
pub fn solve(problem: &ConeProblem, cfg: &SolverConfig) -> Result<SolverResult> {
    let n = problem.block_side;
    let q = problem.num_vars;
    if problem.mat_terms.len() != q || problem.objective.len() != q {
        return Err(Error::DimensionMismatch(
            "objective / matrix terms must match num_vars".into(),
        ));
    }
    let red = reduce_equalities(problem, cfg.qr_rank_tol)?;
    let p_dim = q - red.rank;
    let offset: f64 = problem
        .objective
        .iter()
        .zip(red.y_p.iter())
        .map(|(c, y)| c * y)
        .sum();

    if p_dim == 0 {
        // Equalities pin y; only feasibility remains to verify.
        let y: Vec<f64> = red.y_p.iter().copied().collect();
        let s = problem.assemble(&y);
        let eig = nalgebra::SymmetricEigen::new(sym(&s));
        if eig.eigenvalues.min() < -1e-9 {
            return Err(Error::Solver(
                "equalities force an indefinite pencil".into(),
            ));
        }
        return Ok(SolverResult {
            status: TerminationStatus::Optimal,
            value: offset,
            certificate_value: offset,
            y,
            dual_matrix: DMatrix::zeros(n, n),
            p_infeas: 0.0,
            d_infeas: 0.0,
            rel_gap: 0.0,
            iterations: 0,
            eq_rank: red.rank,
            reduced_dim: 0,
            trace: Vec::new(),
        });
    }

    // Reduced standard form: columns of `amat` are vec(A_j) with
    // A_j = −mat(Z_j); C = mat_const + mat(y_p); b = Zᵀ objective.
    let nn = n * n;
    let mut amat = DMatrix::zeros(nn, p_dim);
    for j in 0..p_dim {
        let mut col = amat.column_mut(j);
        for (a, terms) in problem.mat_terms.iter().enumerate() {
            let za = red.z[(a, j)];
            if za == 0.0 {
                continue;
            }
            for &(r, c, v) in terms {
                col[c * n + r] -= v * za;
            }
        }
    }
    let yp_vec: Vec<f64> = red.y_p.iter().copied().collect();
    let mut cmat = problem.assemble(&yp_vec);
    let mut b = DVector::zeros(p_dim);
    for j in 0..p_dim {
        b[j] = problem
            .objective
            .iter()
            .zip(red.z.column(j).iter())
            .map(|(c, z)| c * z)
            .sum();
    }

    // Column scaling on the constraints plus one global scale on C.
    let mut scale_a = vec![1.0; p_dim];
    for j in 0..p_dim {
        let nj = amat.column(j).norm().max(1.0);
        scale_a[j] = nj;
        amat.column_mut(j) /= nj;
        b[j] /= nj;
    }
    let scale_c = cmat.norm().max(1.0);
    cmat /= scale_c;

    let reshape = |v: &DVector<f64>| -> DMatrix<f64> {
        DMatrix::from_column_slice(n, n, v.as_slice())
    };

    // SDPT3-style starting point.
    let sqrt_n = (n as f64).sqrt();
    let mut xi: f64 = 10.0f64.max(sqrt_n);
    for j in 0..p_dim {
        xi = xi.max(n as f64 * (1.0 + b[j].abs()) / (1.0 + amat.column(j).norm()));
    }
    let eta = 10.0f64.max(sqrt_n).max(cmat.norm());
    let mut x = DMatrix::identity(n, n) * xi;
    let mut s = DMatrix::identity(n, n) * eta;
    let mut w = DVector::zeros(p_dim);

    let mut best: Option<(f64, SolverResultCore)> = None;
    let mut status = TerminationStatus::MaxIter;
    let mut trace = Vec::new();
    let mut iterations = 0;

    struct SolverResultCore {
        x: DMatrix<f64>,
        s: DMatrix<f64>,
        w: DVector<f64>,
        p_infeas: f64,
        d_infeas: f64,
        rel_gap: f64,
    }

    let mut scratch = DMatrix::zeros(n, n);
    let mut rmat = DMatrix::zeros(nn, p_dim);

    for iter in 0..cfg.max_iter {
        iterations = iter;
        // Residuals.
        let ax = {
            let xv = DVector::from_column_slice(x.as_slice());
            amat.tr_mul(&xv)
        };
        let rp = &b - &ax;
        let aty = reshape(&(&amat * &w));
        let rd = &cmat - &aty - &s;
        let mu = frob_dot(&x, &s) / n as f64;
        let pobj = frob_dot(&cmat, &x);
        let dobj = b.dot(&w);
        let p_infeas = rp.norm() / (1.0 + b.norm());
        let d_infeas = rd.norm() / (1.0 + cmat.norm());
        let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        trace.push(IterStats {
            mu,
            primal_obj: pobj,
            dual_obj: dobj,
            p_infeas,
            d_infeas,
        });
        if cfg.verbose {
            eprintln!(
                "iter {:3}  mu {:9.2e}  gap {:9.2e}  pinf {:9.2e}  dinf {:9.2e}",
                iter, mu, rel_gap, p_infeas, d_infeas
            );
        }

        let score = rel_gap.max(p_infeas).max(d_infeas);
        if best.as_ref().map_or(true, |(s0, _)| score < *s0) {
            best = Some((
                score,
                SolverResultCore {
                    x: x.clone(),
                    s: s.clone(),
                    w: w.clone(),
                    p_infeas,
                    d_infeas,
                    rel_gap,
                },
            ));
        }
        if p_infeas <= cfg.feas_tol && d_infeas <= cfg.feas_tol && rel_gap <= cfg.gap_tol {
            status = TerminationStatus::Optimal;
            break;
        }

        // Factorizations of the iterate.
        let chol_s = match nalgebra::Cholesky::new(s.clone()) {
            Some(c) => c,
            None => {
                status = TerminationStatus::Numerical;
                break;
            }
        };
        let sinv = chol_s.inverse();

        // Schur complement M_jk = <A_j, X A_k S⁻¹> via one big product.
        for k in 0..p_dim {
            scratch.copy_from_slice(amat.column(k).as_slice());
            let t1 = &x * &scratch;
            let t2 = &t1 * &sinv;
            rmat.column_mut(k).copy_from_slice(t2.as_slice());
        }
        let m_raw = amat.tr_mul(&rmat);
        let m_orig = sym(&m_raw);
        let diag_max = (0..p_dim).map(|i| m_orig[(i, i)]).fold(1.0f64, f64::max);
        let mut reg = cfg.schur_reg * diag_max;
        let chol_m = loop {
            let mut m_reg = m_orig.clone();
            for i in 0..p_dim {
                m_reg[(i, i)] += reg;
            }
            match nalgebra::Cholesky::new(m_reg) {
                Some(c) => break Some(c),
                None => {
                    reg *= 1000.0;
                    if reg > 1e-4 * diag_max.max(1.0) {
                        break None;
                    }
                }
            }
        };
        let chol_m = match chol_m {
            Some(c) => c,
            None => {
                status = TerminationStatus::Numerical;
                break;
            }
        };
        let solve_newton = |rhs: &DVector<f64>| -> DVector<f64> {
            let mut dw = chol_m.solve(rhs);
            // One refinement step against the unregularized matrix.
            let resid = rhs - &m_orig * &dw;
            dw += chol_m.solve(&resid);
            dw
        };

        // Common pieces of the reduced Newton right-hand side.
        let x_rd_sinv = &(&x * &rd) * &sinv;
        let rhs_common = |kmat: Option<&DMatrix<f64>>| -> DVector<f64> {
            // rhs = rp − A(K S⁻¹ − X − X Rd S⁻¹)
            let mut inner = -&x - &x_rd_sinv;
            if let Some(k) = kmat {
                inner += k * &sinv;
            }
            let iv = DVector::from_column_slice(inner.as_slice());
            &rp - amat.tr_mul(&iv)
        };

        // Predictor (affine scaling).
        let rhs_aff = rhs_common(None);
        let dw_aff = solve_newton(&rhs_aff);
        let ds_aff = &rd - &reshape(&(&amat * &dw_aff));
        let dx_aff = sym(&(-&x - &(&x * &ds_aff) * &sinv));

        let ap_aff = max_psd_step(&x, &dx_aff)?.min(1.0);
        let ad_aff = max_psd_step(&s, &ds_aff)?.min(1.0);
        let mu_aff = frob_dot(&(&x + &dx_aff * ap_aff), &(&s + &ds_aff * ad_aff)) / n as f64;
        let sigma = (mu_aff / mu).max(0.0).powi(3).clamp(1e-12, 0.9999);

        // Corrector.
        let mut kmat = &dx_aff * &ds_aff * -1.0;
        for i in 0..n {
            kmat[(i, i)] += sigma * mu;
        }
        let rhs_cor = rhs_common(Some(&kmat));
        let dw = solve_newton(&rhs_cor);
        let ds = &rd - &reshape(&(&amat * &dw));
        let dx = sym(&(&kmat * &sinv - &x - &(&x * &ds) * &sinv));

        let gamma = if iter < 2 { 0.9 } else { 0.98 };
        let ap = (gamma * max_psd_step(&x, &dx)?).min(1.0);
        let ad = (gamma * max_psd_step(&s, &ds)?).min(1.0);

        x += &dx * ap;
        s += &ds * ad;
        w += &dw * ad;

        if mu < 1e-16 && status != TerminationStatus::Optimal {
            // Complementarity exhausted without meeting feasibility: stop.
            status = TerminationStatus::Numerical;
            break;
        }
    }

    let (_, core) = best.ok_or_else(|| Error::Solver("no iterate produced".into()))?;

    // Undo scaling and lift back to the full moment vector.
    let mut w_orig = DVector::zeros(p_dim);
    for j in 0..p_dim {
        w_orig[j] = core.w[j] * scale_c / scale_a[j];
    }
    let y_full = &red.y_p + &red.z * &w_orig;
    let dobj = offset + scale_c * b.dot(&core.w);
    let pobj = offset + scale_c * frob_dot(&cmat, &core.x);

    Ok(SolverResult {
        status,
        value: dobj,
        certificate_value: pobj,
        y: y_full.iter().copied().collect(),
        dual_matrix: core.x,
        p_infeas: core.p_infeas,
        d_infeas: core.d_infeas,
        rel_gap: core.rel_gap,
        iterations: iterations + 1,
        eq_rank: red.rank,
        reduced_dim: p_dim,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moment::{build_relaxation, dirac_moments};
    use crate::poly::{sphere_constraint, Polynomial};

    fn toy_lmi() -> ConeProblem {
        // max y1 s.t. [[1, y1], [y1, 1]] ⪰ 0
        ConeProblem {
            num_vars: 1,
            objective: vec![1.0],
            eq_rows: vec![],
            eq_rhs: vec![],
            block_side: 2,
            mat_terms: vec![vec![(0, 1, 1.0), (1, 0, 1.0)]],
            mat_const: vec![(0, 0, 1.0), (1, 1, 1.0)],
        }
    }

    #[test]
    fn correlation_bound() {
        let r = solve(&toy_lmi(), &SolverConfig::default()).unwrap();
        assert_eq!(r.status, TerminationStatus::Optimal);
        assert!((r.value - 1.0).abs() < 1e-7, "value {}", r.value);
    }

    #[test]
    fn linear_objective_on_circle() {
        // max u1 on u1² + u2² = 1 at order 1: exact with optimum at e1.
        let f = Polynomial::var(0, 2);
        let g = sphere_constraint(0..2, 2);
        let rel = build_relaxation(&f, &[g], 1).unwrap();
        let r = solve(&rel.to_cone_problem(), &SolverConfig::default()).unwrap();
        assert_eq!(r.status, TerminationStatus::Optimal);
        assert!((r.value - 1.0).abs() < 1e-7, "value {}", r.value);
        let expected = dirac_moments(rel.index(), &[1.0, 0.0]);
        for (a, e) in r.y.iter().zip(&expected) {
            assert!((a - e).abs() < 1e-5, "moments {:?}", r.y);
        }
    }

    #[test]
    fn dependent_rows_are_dropped() {
        let f = Polynomial::var(0, 2);
        let g = sphere_constraint(0..2, 2);
        let rel = build_relaxation(&f, &[g.clone(), g], 1).unwrap();
        let cone = rel.to_cone_problem();
        let m_rows = cone.eq_rows.len();
        let r = solve(&cone, &SolverConfig::default()).unwrap();
        assert!(r.eq_rank < m_rows);
        assert!((r.value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn inconsistent_equalities_are_detected() {
        let mut cone = toy_lmi();
        cone.eq_rows = vec![vec![(0, 1.0)], vec![(0, 1.0)]];
        cone.eq_rhs = vec![0.25, 0.5];
        assert!(matches!(
            solve(&cone, &SolverConfig::default()),
            Err(Error::Solver(_))
        ));
    }

    #[test]
    fn pinned_variable_short_circuits() {
        let mut cone = toy_lmi();
        cone.eq_rows = vec![vec![(0, 1.0)]];
        cone.eq_rhs = vec![0.25];
        let r = solve(&cone, &SolverConfig::default()).unwrap();
        assert_eq!(r.reduced_dim, 0);
        assert!((r.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn weak_duality_along_feasible_iterates() {
        let f = Polynomial::var(0, 2);
        let g = sphere_constraint(0..2, 2);
        let rel = build_relaxation(&f, &[g], 2).unwrap();
        let r = solve(&rel.to_cone_problem(), &SolverConfig::default()).unwrap();
        for it in &r.trace {
            if it.p_infeas <= 1e-6 && it.d_infeas <= 1e-6 {
                // max-side objective stays below min-side objective.
                assert!(it.dual_obj <= it.primal_obj + 1e-6 * (1.0 + it.primal_obj.abs()));
            }
        }
    }

    #[test]
    fn returned_moment_matrix_is_psd() {
        let f = Polynomial::var(0, 2);
        let g = sphere_constraint(0..2, 2);
        let rel = build_relaxation(&f, &[g], 2).unwrap();
        let r = solve(&rel.to_cone_problem(), &SolverConfig::default()).unwrap();
        let m = rel.moment_matrix(&r.y);
        let eig = nalgebra::SymmetricEigen::new(m);
        assert!(eig.eigenvalues.min() >= -1e-8);
    }

    #[test]
    fn bit_identical_reruns() {
        let f = Polynomial::var(0, 2);
        let g = sphere_constraint(0..2, 2);
        let rel = build_relaxation(&f, &[g], 2).unwrap();
        let cone = rel.to_cone_problem();
        let r1 = solve(&cone, &SolverConfig::default()).unwrap();
        let r2 = solve(&cone, &SolverConfig::default()).unwrap();
        assert_eq!(r1.iterations, r2.iterations);
        assert_eq!(r1.value.to_bits(), r2.value.to_bits());
        for (a, b) in r1.y.iter().zip(&r2.y) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

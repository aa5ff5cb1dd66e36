//! Order-N moment relaxation: moment vector indexing, localizing matrices,
//! and assembly into a cone problem.
//!
//! For a moment vector `y` indexed by monomials `α` with `|α| ≤ 2N`, the
//! relaxation of `max f` subject to equality constraints `q_i = 0` reads
//!
//! ```text
//! ρ_N = max Σ f_α y_α   s.t.  L_{q_i}^{(N)}(y) = 0,  y_0 = 1,  M_N(y) ⪰ 0,
//! ```
//!
//! where `M_N(y)` is the localizing structure of `q ≡ 1`. Equality localizing
//! matrices enter entry-wise as linear equalities on `y`; entries sharing the
//! same total exponent are emitted once. `ρ_N` is monotonically non-increasing
//! in `N` and upper-bounds `f` at every feasible point.
//!
//! [`MomentRelaxation::export_text`] writes the assembled problem in a sparse
//! line-oriented text format (`format: 1` header, `o` objective lines,
//! `m` moment-structure lines, `r` equality rows) for cross-checking against
//! external solvers.

use std::collections::HashMap;

use crate::poly::{Monomial, Polynomial};
use crate::sdp::ConeProblem;
use crate::{tol, Error, Result};

/// Graded-lex list of all monomials with degree at most `max_degree`, with a
/// position lookup. Size is `C(nvars + max_degree, max_degree)`.
#[derive(Debug, Clone)]
pub struct MomentIndex {
    nvars: usize,
    max_degree: u32,
    monomials: Vec<Monomial>,
    lookup: HashMap<Vec<u32>, usize>,
}

impl MomentIndex {
    pub fn new(nvars: usize, max_degree: u32) -> Self {
        let monomials = monomials_up_to(nvars, max_degree);
        let lookup = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.exps().to_vec(), i))
            .collect();
        MomentIndex {
            nvars,
            max_degree,
            monomials,
            lookup,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomial(&self, i: usize) -> &Monomial {
        &self.monomials[i]
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn position(&self, exps: &[u32]) -> Option<usize> {
        self.lookup.get(exps).copied()
    }
}

/// All monomials over `nvars` variables with total degree `≤ max`, graded-lex.
pub fn monomials_up_to(nvars: usize, max: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = vec![0u32; nvars];
    for d in 0..=max {
        gen_degree(nvars, d, 0, &mut current, &mut out);
    }
    out
}

fn gen_degree(nvars: usize, remaining: u32, pos: usize, current: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    if pos == nvars - 1 {
        current[pos] = remaining;
        out.push(Monomial::new(current.clone()));
        current[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        gen_degree(nvars, remaining - e, pos + 1, current, out);
        current[pos] = 0;
    }
}

/// Number of monomials over `nvars` variables with degree `≤ d`:
/// `C(nvars + d, d)`.
pub fn moment_count(nvars: usize, d: u32) -> usize {
    let mut c: u128 = 1;
    for i in 1..=d as u128 {
        c = c * (nvars as u128 + i) / i;
    }
    c.min(usize::MAX as u128) as usize
}

/// Localizing structure of a polynomial `q` at order `N`: basis `[u]_d` with
/// `d = N − ⌈deg(q)/2⌉`, and the coefficient matrices `A_α` satisfying
/// `q(u) [u]_d [u]_dᵀ = Σ_α A_α u^α`.
#[derive(Debug, Clone)]
pub struct LocalizingSpec {
    q: Polynomial,
    d: u32,
    basis: Vec<Monomial>,
}

impl LocalizingSpec {
    pub fn new(q: Polynomial, order: usize) -> Result<Self> {
        let deg = q.degree();
        let half = deg.div_ceil(2);
        if (order as u32) < half {
            return Err(Error::OrderTooSmall {
                order,
                degree: deg as usize,
            });
        }
        let d = order as u32 - half;
        let basis = monomials_up_to(q.nvars(), d);
        Ok(LocalizingSpec { q, d, basis })
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.q
    }

    pub fn basis_degree(&self) -> u32 {
        self.d
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn side(&self) -> usize {
        self.basis.len()
    }

    /// Coefficient matrices keyed by moment-vector position: for each
    /// contributing `α`, the full list of `(row, col, coeff)` entries.
    pub fn coeff_matrices(&self, index: &MomentIndex) -> HashMap<usize, Vec<(usize, usize, f64)>> {
        let mut out: HashMap<usize, Vec<(usize, usize, f64)>> = HashMap::new();
        for (r, mr) in self.basis.iter().enumerate() {
            for (c, mc) in self.basis.iter().enumerate() {
                let pair = mr.mul(mc);
                for (gamma, coef) in self.q.terms() {
                    let alpha = pair.mul(gamma);
                    let pos = index
                        .position(alpha.exps())
                        .expect("localizing entry exceeds moment index degree");
                    out.entry(pos).or_default().push((r, c, coef));
                }
            }
        }
        out
    }

    /// Entry-wise equality rows `ℓ_y(q · u^β) = 0`, one per distinct total
    /// exponent `β` with `|β| ≤ 2d` (distinct matrix entries of the
    /// localizing matrix share a row exactly when their `β` agree).
    pub fn equality_rows(&self, index: &MomentIndex) -> Vec<Vec<(usize, f64)>> {
        let mut rows = Vec::new();
        for beta in monomials_up_to(self.q.nvars(), 2 * self.d) {
            let mut row: Vec<(usize, f64)> = Vec::with_capacity(self.q.num_terms());
            let mut acc: HashMap<usize, f64> = HashMap::new();
            for (gamma, coef) in self.q.terms() {
                let alpha = beta.mul(gamma);
                let pos = index
                    .position(alpha.exps())
                    .expect("equality row exceeds moment index degree");
                *acc.entry(pos).or_insert(0.0) += coef;
            }
            let mut keys: Vec<usize> = acc.keys().copied().collect();
            keys.sort_unstable();
            for k in keys {
                let v = acc[&k];
                if v.abs() > tol::COEFF_DROP {
                    row.push((k, v));
                }
            }
            if !row.is_empty() {
                rows.push(row);
            }
        }
        rows
    }
}

/// One assembled relaxation instance.
#[derive(Debug, Clone)]
pub struct MomentRelaxation {
    order: usize,
    index: MomentIndex,
    basis: Vec<Monomial>,
    objective: Vec<(usize, f64)>,
    specs: Vec<LocalizingSpec>,
}

impl MomentRelaxation {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn index(&self) -> &MomentIndex {
        &self.index
    }

    /// Basis `[u]_N` of the moment matrix.
    pub fn moment_basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn moment_side(&self) -> usize {
        self.basis.len()
    }

    pub fn specs(&self) -> &[LocalizingSpec] {
        &self.specs
    }

    pub fn objective(&self) -> &[(usize, f64)] {
        &self.objective
    }

    /// `Σ f_α y_α` for a moment vector matching the index.
    pub fn objective_value(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.index.len() {
            return Err(Error::DimensionMismatch(format!(
                "moment vector length {} vs index size {}",
                y.len(),
                self.index.len()
            )));
        }
        Ok(self.objective.iter().map(|&(i, c)| c * y[i]).sum())
    }

    /// Moment matrix `M_N(y)` as a dense symmetric matrix.
    pub fn moment_matrix(&self, y: &[f64]) -> nalgebra::DMatrix<f64> {
        let s = self.basis.len();
        let mut m = nalgebra::DMatrix::zeros(s, s);
        for r in 0..s {
            for c in 0..s {
                let alpha = self.basis[r].mul(&self.basis[c]);
                let pos = self.index.position(alpha.exps()).unwrap();
                m[(r, c)] = y[pos];
            }
        }
        m
    }

    /// All equality rows: `y_0 = 1` first, then each constraint's localizing
    /// rows in order.
    pub fn equality_rows(&self) -> (Vec<Vec<(usize, f64)>>, Vec<f64>) {
        let mut rows = vec![vec![(0usize, 1.0)]];
        let mut rhs = vec![1.0];
        for spec in &self.specs {
            for row in spec.equality_rows(&self.index) {
                rows.push(row);
                rhs.push(0.0);
            }
        }
        (rows, rhs)
    }

    /// Packs the relaxation into the solver's cone form: maximize `cᵀy`
    /// subject to the equality rows and `M_N(y) ⪰ 0`.
    pub fn to_cone_problem(&self) -> ConeProblem {
        let s = self.basis.len();
        let mut mat_terms: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); self.index.len()];
        for r in 0..s {
            for c in 0..s {
                let alpha = self.basis[r].mul(&self.basis[c]);
                let pos = self.index.position(alpha.exps()).unwrap();
                mat_terms[pos].push((r, c, 1.0));
            }
        }
        let mut obj = vec![0.0; self.index.len()];
        for &(i, c) in &self.objective {
            obj[i] += c;
        }
        let (rows, rhs) = self.equality_rows();
        ConeProblem {
            num_vars: self.index.len(),
            objective: obj,
            eq_rows: rows,
            eq_rhs: rhs,
            block_side: s,
            mat_terms,
            mat_const: Vec::new(),
        }
    }

    /// Sparse text export of the assembled problem (format 1).
    pub fn export_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(out, "format: 1").unwrap();
        writeln!(out, "kind: moment-sdp").unwrap();
        writeln!(out, "vars: {}", self.index.len()).unwrap();
        writeln!(out, "order: {}", self.order).unwrap();
        writeln!(out, "psd-side: {}", self.basis.len()).unwrap();
        writeln!(out, "objective-nnz: {}", self.objective.len()).unwrap();
        for &(i, c) in &self.objective {
            writeln!(out, "o {} {:.17e}", i, c).unwrap();
        }
        let s = self.basis.len();
        let mut structure = Vec::new();
        for r in 0..s {
            for c in r..s {
                let alpha = self.basis[r].mul(&self.basis[c]);
                let pos = self.index.position(alpha.exps()).unwrap();
                structure.push((r, c, pos));
            }
        }
        writeln!(out, "structure-nnz: {}", structure.len()).unwrap();
        for (r, c, pos) in structure {
            writeln!(out, "m {} {} {}", r, c, pos).unwrap();
        }
        let (rows, rhs) = self.equality_rows();
        writeln!(out, "equality-rows: {}", rows.len()).unwrap();
        for (row, b) in rows.iter().zip(&rhs) {
            write!(out, "r {:.17e} {}", b, row.len()).unwrap();
            for (i, c) in row {
                write!(out, " {} {:.17e}", i, c).unwrap();
            }
            writeln!(out).unwrap();
        }
        out
    }
}

/// Assembles the order-N relaxation of `max f` subject to the equality
/// constraints. Fails if `2N` cannot hold the objective or a constraint, or
/// if the moment matrix would exceed the size guard.
pub fn build_relaxation(
    f: &Polynomial,
    constraints: &[Polynomial],
    order: usize,
) -> Result<MomentRelaxation> {
    let nvars = f.nvars();
    let two_n = 2 * order as u32;
    if two_n < f.degree() {
        return Err(Error::OrderTooSmall {
            order,
            degree: f.degree() as usize,
        });
    }
    for q in constraints {
        if q.nvars() != nvars {
            return Err(Error::VariableMismatch {
                left: nvars,
                right: q.nvars(),
            });
        }
        if two_n < q.degree() {
            return Err(Error::OrderTooSmall {
                order,
                degree: q.degree() as usize,
            });
        }
    }
    let side = moment_count(nvars, order as u32);
    if side > tol::MOMENT_SIDE_LIMIT {
        return Err(Error::MomentTooLarge {
            side,
            vars: nvars,
            two_n: two_n as usize,
            moments: moment_count(nvars, two_n),
        });
    }
    let index = MomentIndex::new(nvars, two_n);
    let basis = monomials_up_to(nvars, order as u32);
    let objective = f
        .terms()
        .map(|(m, c)| (index.position(m.exps()).unwrap(), c))
        .collect();
    let specs = constraints
        .iter()
        .map(|q| LocalizingSpec::new(q.clone(), order))
        .collect::<Result<_>>()?;
    Ok(MomentRelaxation {
        order,
        index,
        basis,
        objective,
        specs,
    })
}

/// Moments of the Dirac measure at `point`: `y_α = point^α`.
pub fn dirac_moments(index: &MomentIndex, point: &[f64]) -> Vec<f64> {
    index
        .monomials()
        .iter()
        .map(|m| m.evaluate(point))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::sphere_constraint;
    use crate::testsupport::seeded_rng;
    use rand::Rng;

    #[test]
    fn graded_lex_enumeration() {
        let ms = monomials_up_to(2, 2);
        let exps: Vec<Vec<u32>> = ms.iter().map(|m| m.exps().to_vec()).collect();
        assert_eq!(
            exps,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
        assert_eq!(ms.len(), moment_count(2, 2));
    }

    #[test]
    fn moment_counts() {
        assert_eq!(moment_count(6, 3), 84);
        assert_eq!(moment_count(6, 6), 924);
        assert_eq!(moment_count(3, 6), 84);
    }

    #[test]
    fn order_one_moment_matrix_structure() {
        // Two variables, N=1: M1(y) is 3x3 over (1, u1, u2).
        let f = Polynomial::var(0, 2);
        let rel = build_relaxation(&f, &[], 1).unwrap();
        assert_eq!(rel.moment_side(), 3);
        let index = rel.index();
        let y = dirac_moments(index, &[0.3, -0.4]);
        let m = rel.moment_matrix(&y);
        assert_eq!(m[(0, 0)], 1.0);
        assert!((m[(1, 2)] - 0.3 * -0.4).abs() < 1e-15);
        assert!((m[(2, 2)] - 0.16).abs() < 1e-15);
    }

    #[test]
    fn sphere_localizing_row_at_order_one() {
        // q = u1² + u2² − 1 at N=1 has d = 0: a single 1x1 localizing matrix
        // reading y20 + y02 − y00 = 0.
        let g = sphere_constraint(0..2, 2);
        let spec = LocalizingSpec::new(g, 1).unwrap();
        assert_eq!(spec.side(), 1);
        let index = MomentIndex::new(2, 2);
        let rows = spec.equality_rows(&index);
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        let col = |exps: &[u32]| index.position(exps).unwrap();
        let get = |pos: usize| {
            row.iter()
                .find(|(i, _)| *i == pos)
                .map(|(_, c)| *c)
                .unwrap_or(0.0)
        };
        assert_eq!(get(col(&[2, 0])), 1.0);
        assert_eq!(get(col(&[0, 2])), 1.0);
        assert_eq!(get(col(&[0, 0])), -1.0);
    }

    #[test]
    fn dirac_moments_are_feasible() {
        let mut rng = seeded_rng(89);
        let g = sphere_constraint(0..3, 3);
        let f = Polynomial::var(0, 3);
        let rel = build_relaxation(&f, &[g.clone()], 2).unwrap();
        for _ in 0..5 {
            let v: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let point: Vec<f64> = v.iter().map(|x| x / n).collect();
            let y = dirac_moments(rel.index(), &point);
            let (rows, rhs) = rel.equality_rows();
            for (row, b) in rows.iter().zip(&rhs) {
                let lhs: f64 = row.iter().map(|&(i, c)| c * y[i]).sum();
                assert!((lhs - b).abs() < 1e-12, "row violated by {}", lhs - b);
            }
            // Rank-one moment matrix of a feasible point is PSD.
            let m = rel.moment_matrix(&y);
            let eig = nalgebra::SymmetricEigen::new(m);
            assert!(eig.eigenvalues.min() > -1e-12);
            // Objective through moments equals direct evaluation.
            assert!((rel.objective_value(&y).unwrap() - f.evaluate(&point)).abs() < 1e-14);
        }
    }

    #[test]
    fn localizing_polynomial_identity_at_random_points() {
        let mut rng = seeded_rng(97);
        let g = sphere_constraint(0..2, 3);
        let spec = LocalizingSpec::new(g.clone(), 2).unwrap();
        let index = MomentIndex::new(3, 4);
        let mats = spec.coeff_matrices(&index);
        let basis = spec.basis();
        for _ in 0..20 {
            let point: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let bvals: Vec<f64> = basis.iter().map(|m| m.evaluate(&point)).collect();
            let qv = g.evaluate(&point);
            for r in 0..basis.len() {
                for c in 0..basis.len() {
                    let direct = qv * bvals[r] * bvals[c];
                    let mut assembled = 0.0;
                    for (pos, entries) in &mats {
                        let ua = index.monomial(*pos).evaluate(&point);
                        for &(er, ec, coef) in entries {
                            if er == r && ec == c {
                                assembled += coef * ua;
                            }
                        }
                    }
                    assert!(
                        (direct - assembled).abs() <= 1e-10,
                        "entry ({},{}): {} vs {}",
                        r,
                        c,
                        direct,
                        assembled
                    );
                }
            }
        }
    }

    #[test]
    fn objective_value_trivials() {
        let f = Polynomial::zero(2);
        let rel = build_relaxation(&f, &[], 1).unwrap();
        let y = vec![1.0; rel.index().len()];
        assert_eq!(rel.objective_value(&y).unwrap(), 0.0);
        assert!(rel.objective_value(&[1.0]).is_err());
    }

    #[test]
    fn order_guards() {
        let f = Polynomial::from_terms(2, &[(vec![3, 1], 1.0)]);
        assert!(matches!(
            build_relaxation(&f, &[], 1),
            Err(Error::OrderTooSmall { .. })
        ));

        let f = Polynomial::var(0, 40);
        assert!(matches!(
            build_relaxation(&f, &[], 4),
            Err(Error::MomentTooLarge { .. })
        ));
    }

    #[test]
    fn export_text_round_shape() {
        let g = sphere_constraint(0..2, 2);
        let f = Polynomial::var(0, 2);
        let rel = build_relaxation(&f, &[g], 1).unwrap();
        let text = rel.export_text();
        assert!(text.starts_with("format: 1\nkind: moment-sdp\n"));
        assert!(text.contains("psd-side: 3"));
        assert!(text.contains("equality-rows: 2"));
    }
}

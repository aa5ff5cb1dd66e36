//! Sparse real multivariate polynomials over a fixed ambient variable set,
//! plus the optimization objectives and sphere constraints assembled from
//! realified tensors.
//!
//! Terms are kept in graded-lexicographic order (total degree first, then
//! descending exponent vectors), matching the monomial-vector ordering used
//! by the moment relaxation. Serialization and iteration follow the same
//! order everywhere.

use std::collections::BTreeMap;
use std::fmt;

use crate::realify::RealTensor;
use crate::tensor::{ComplexTensor, MultiIndexIter, SymmetryClass};
use crate::{tol, Error, Result};

/// Exponent vector over the ambient variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn constant(nvars: usize) -> Self {
        Monomial {
            exps: vec![0; nvars],
        }
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Monomial { exps }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn evaluate(&self, point: &[f64]) -> f64 {
        self.exps
            .iter()
            .zip(point)
            .map(|(&e, &x)| x.powi(e as i32))
            .product()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial: map from monomials to nonzero real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: f64, nvars: usize) -> Self {
        let mut p = Polynomial::zero(nvars);
        if c.abs() > tol::COEFF_DROP {
            p.terms.insert(Monomial::constant(nvars), c);
        }
        p
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        let mut p = Polynomial::zero(nvars);
        p.terms.insert(Monomial::var(i, nvars), 1.0);
        p
    }

    pub fn from_terms(nvars: usize, terms: &[(Vec<u32>, f64)]) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (exps, c) in terms {
            assert_eq!(exps.len(), nvars);
            p.add_term(Monomial::new(exps.clone()), *c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, exps: &[u32]) -> f64 {
        self.terms
            .get(&Monomial::new(exps.to_vec()))
            .copied()
            .unwrap_or(0.0)
    }

    fn add_term(&mut self, m: Monomial, c: f64) {
        use std::collections::btree_map::Entry;
        if c == 0.0 {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                let v = e.get() + c;
                if v.abs() <= tol::COEFF_DROP {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                if c.abs() > tol::COEFF_DROP {
                    e.insert(c);
                }
            }
        }
    }

    fn check_compatible(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VariableMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in self.terms() {
            let v = c * s;
            if v.abs() > tol::COEFF_DROP {
                out.terms.insert(m.clone(), v);
            }
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Result<Polynomial> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange(format!(
                "variable {} of {}",
                i, self.nvars
            )));
        }
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in self.terms() {
            let e = m.exps()[i];
            if e > 0 {
                let mut exps = m.exps().to_vec();
                exps[i] -= 1;
                out.add_term(Monomial::new(exps), c * e as f64);
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.nvars);
        self.terms().map(|(m, c)| c * m.evaluate(point)).sum()
    }

    /// Substitutes `u_i = 0` and removes the variable from the ring;
    /// remaining variables are renumbered downward past `i`.
    pub fn eliminate_var(&self, i: usize) -> Result<Polynomial> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange(format!(
                "variable {} of {}",
                i, self.nvars
            )));
        }
        let mut out = Polynomial::zero(self.nvars - 1);
        for (m, c) in self.terms() {
            if m.exps()[i] > 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps.remove(i);
            out.add_term(Monomial::new(exps), c);
        }
        Ok(out)
    }
}

impl fmt::Display for Polynomial {
    /// One line per term, graded-lex order: `coef * u1^a u2^b`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return writeln!(f, "0");
        }
        for (m, c) in self.terms() {
            if m.degree() == 0 {
                writeln!(f, "{}", c)?;
                continue;
            }
            let vars: Vec<String> = m
                .exps()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("u{}", i + 1)
                    } else {
                        format!("u{}^{}", i + 1, e)
                    }
                })
                .collect();
            writeln!(f, "{} * {}", c, vars.join(" "))?;
        }
        Ok(())
    }
}

/// Assignment of the free modes of a realified tensor to variable blocks.
///
/// Modes identified by a symmetry group read from a single shared block. The
/// last mode of the tensor is always the excluded one and owns no variables.
#[derive(Debug, Clone)]
pub struct BlockLayout {
    mode_to_block: Vec<usize>,
    blocks: Vec<(usize, usize)>,
    nvars: usize,
}

impl BlockLayout {
    /// `free_dims` are the doubled dimensions of the free modes (all but the
    /// last); `identify` lists groups of free modes sharing one block.
    pub fn new(free_dims: &[usize], identify: &[Vec<usize>]) -> Result<Self> {
        let m1 = free_dims.len();
        let mut group_of = vec![None; m1];
        for (g, group) in identify.iter().enumerate() {
            if group.len() < 2 {
                return Err(Error::InconsistentIdentification(
                    "identification groups need at least two modes".into(),
                ));
            }
            let d0 = free_dims[group[0]];
            for &k in group {
                if k >= m1 {
                    return Err(Error::InconsistentIdentification(format!(
                        "mode {} out of range",
                        k
                    )));
                }
                if free_dims[k] != d0 {
                    return Err(Error::InconsistentIdentification(format!(
                        "identified modes have different dimensions: {} vs {}",
                        free_dims[k], d0
                    )));
                }
                if group_of[k].replace(g).is_some() {
                    return Err(Error::InconsistentIdentification(format!(
                        "mode {} appears in two groups",
                        k
                    )));
                }
            }
        }
        let mut mode_to_block = vec![usize::MAX; m1];
        let mut blocks = Vec::new();
        let mut group_block = vec![None; identify.len()];
        let mut offset = 0;
        for k in 0..m1 {
            let block = match group_of[k] {
                Some(g) => *group_block[g].get_or_insert_with(|| {
                    blocks.push((offset, free_dims[k]));
                    offset += free_dims[k];
                    blocks.len() - 1
                }),
                None => {
                    blocks.push((offset, free_dims[k]));
                    offset += free_dims[k];
                    blocks.len() - 1
                }
            };
            mode_to_block[k] = block;
        }
        Ok(BlockLayout {
            mode_to_block,
            blocks,
            nvars: offset,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Variable range of block `b` in the concatenated vector.
    pub fn block_range(&self, b: usize) -> std::ops::Range<usize> {
        let (off, len) = self.blocks[b];
        off..off + len
    }

    pub fn block_of_mode(&self, mode: usize) -> usize {
        self.mode_to_block[mode]
    }

    /// Splits a concatenated variable vector into per-mode block slices.
    pub fn mode_slices<'a>(&self, u: &'a [f64]) -> Vec<&'a [f64]> {
        self.mode_to_block
            .iter()
            .map(|&b| {
                let (off, len) = self.blocks[b];
                &u[off..off + len]
            })
            .collect()
    }
}

/// Squared contraction norm `‖<B, ⊗ blocks over leading modes>‖²` as a
/// polynomial of degree `2(m−1)` over the layout's variables.
///
/// Exactly the last mode is excluded; identified modes share a block, so a
/// group of size two contributes squared variables to each term.
pub fn build_objective_squared(b: &RealTensor, layout: &BlockLayout) -> Result<Polynomial> {
    let m = b.order();
    if layout.mode_to_block.len() != m - 1 {
        return Err(Error::InconsistentIdentification(format!(
            "layout covers {} modes, tensor has {} free modes",
            layout.mode_to_block.len(),
            m - 1
        )));
    }
    for k in 0..m - 1 {
        let (_, len) = layout.blocks[layout.mode_to_block[k]];
        if len != b.dims()[k] {
            return Err(Error::InconsistentIdentification(format!(
                "mode {} has dimension {}, its block has {}",
                k,
                b.dims()[k],
                len
            )));
        }
    }
    let nvars = layout.nvars();
    let last_dim = b.dims()[m - 1];
    let mut f = Polynomial::zero(nvars);
    for jm in 0..last_dim {
        let mut linear = Polynomial::zero(nvars);
        for idx in MultiIndexIter::new(&b.dims()[..m - 1]) {
            let mut full = idx.clone();
            full.push(jm);
            let v = b.get(&full);
            if v == 0.0 {
                continue;
            }
            let mut exps = vec![0u32; nvars];
            for (k, &j) in idx.iter().enumerate() {
                let (off, _) = layout.blocks[layout.mode_to_block[k]];
                exps[off + j] += 1;
            }
            linear.add_term(Monomial::new(exps), v);
        }
        f = f.add(&linear.mul(&linear)?)?;
    }
    Ok(f)
}

/// `Re <A, (x + iy)^m>` as a degree-`m` polynomial in `2n` variables, for a
/// fully symmetric tensor. This is the direct (unsquared) objective of the
/// symmetric pipeline.
pub fn build_objective_symmetric(a: &ComplexTensor) -> Result<Polynomial> {
    if *a.symmetry() != SymmetryClass::Full {
        return Err(Error::SymmetryViolation(
            "symmetric objective requires a fully symmetric tensor".into(),
        ));
    }
    let b = crate::realify::realify(a);
    let nvars = b.dims()[0];
    let mut f = Polynomial::zero(nvars);
    for (lin, idx) in MultiIndexIter::new(b.dims()).enumerate() {
        let v = b.entries()[lin];
        if v == 0.0 {
            continue;
        }
        let mut exps = vec![0u32; nvars];
        for &j in &idx {
            exps[j] += 1;
        }
        f.add_term(Monomial::new(exps), v);
    }
    Ok(f)
}

/// `Σ_{i in block} u_i² − 1`.
pub fn sphere_constraint(block: std::ops::Range<usize>, nvars: usize) -> Polynomial {
    let mut g = Polynomial::constant(-1.0, nvars);
    for i in block {
        let mut exps = vec![0u32; nvars];
        exps[i] = 2;
        g.add_term(Monomial::new(exps), 1.0);
    }
    g
}

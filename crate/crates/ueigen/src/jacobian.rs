//! Determinantal constraints from 2x2 minors of the Jacobian of the
//! objective and the sphere constraints.
//!
//! For `f` and a single constraint `g` over `v` variables, the polynomials
//!
//! ```text
//! h_r = Σ_{i+j = r+2, i<j} (f'_i g'_j − f'_j g'_i),   r = 1..2v−3
//! ```
//!
//! vanish at every constrained critical point (the Lagrange condition makes
//! the Jacobian of `(f, g)` rank-deficient, so all its 2x2 minors vanish).
//! Adding them to the feasible set leaves the optimum unchanged while making
//! the moment relaxation exact at a finite order.
//!
//! Each antisymmetric pair is counted once with `i < j`: the diagonal terms
//! vanish identically and `(j, i)` is the negation of `(i, j)`, so the
//! canonical half determines the constraint up to sign.
//!
//! With several sphere blocks the minors pair `f` with each block's own
//! constraint using block-local index positions; no cross-block minors are
//! formed. The count `2·(block width) − 3` only matches a block-local
//! pairing, which is the reading implemented here.

use crate::poly::{sphere_constraint, Polynomial};
use crate::{Error, Result};

/// Minors of `(f, g)` over the full variable set. Returns `2v − 3`
/// polynomials for `v` variables.
pub fn build_h_single(f: &Polynomial, g: &Polynomial) -> Result<Vec<Polynomial>> {
    let v = f.nvars();
    if g.nvars() != v {
        return Err(Error::VariableMismatch {
            left: v,
            right: g.nvars(),
        });
    }
    if v < 2 {
        return Err(Error::DimensionMismatch(
            "need at least two variables to form Jacobian minors".into(),
        ));
    }
    let df: Vec<Polynomial> = (0..v).map(|i| f.partial(i)).collect::<Result<_>>()?;
    let dg: Vec<Polynomial> = (0..v).map(|i| g.partial(i)).collect::<Result<_>>()?;
    let max_deg = if g.degree() <= 2 {
        f.degree()
    } else {
        f.degree() + g.degree() - 2
    };
    let mut out = Vec::with_capacity(2 * v - 3);
    for r in 1..=(2 * v - 3) {
        let mut h = Polynomial::zero(v);
        // one-based (i, j) with i + j = r + 2 and i < j
        for i in 1..=v {
            let j = r + 2 - i;
            if j <= i || j > v {
                continue;
            }
            let (gi, gj) = (i - 1, j - 1);
            let term = df[gi].mul(&dg[gj])?.sub(&df[gj].mul(&dg[gi])?)?;
            h = h.add(&term)?;
        }
        assert!(
            h.degree() <= max_deg,
            "minor degree {} exceeds bound {}",
            h.degree(),
            max_deg
        );
        out.push(h);
    }
    Ok(out)
}

/// Minors of `f` against each block's sphere constraint, with block-local
/// index pairing. Returns `((block, r), h_{block,r})` entries, `r =
/// 1..2w−3` for a block of width `w`.
///
/// Blocks must be disjoint and cover `0..f.nvars()`.
pub fn build_h_blocks(
    f: &Polynomial,
    blocks: &[std::ops::Range<usize>],
) -> Result<Vec<((usize, usize), Polynomial)>> {
    let v = f.nvars();
    let mut covered = vec![false; v];
    for b in blocks {
        for i in b.clone() {
            if i >= v || std::mem::replace(&mut covered[i], true) {
                return Err(Error::InconsistentIdentification(format!(
                    "blocks overlap or exceed the {} variables",
                    v
                )));
            }
        }
    }
    if covered.iter().any(|&c| !c) {
        return Err(Error::InconsistentIdentification(
            "blocks do not cover the free variables".into(),
        ));
    }
    let df: Vec<Polynomial> = (0..v).map(|i| f.partial(i)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (k, block) in blocks.iter().enumerate() {
        let w = block.len();
        let g = sphere_constraint(block.clone(), v);
        let dg: Vec<Polynomial> = (0..v).map(|i| g.partial(i)).collect::<Result<_>>()?;
        if w < 2 {
            continue;
        }
        for r in 1..=(2 * w - 3) {
            let mut h = Polynomial::zero(v);
            for li in 1..=w {
                let lj = r + 2 - li;
                if lj <= li || lj > w {
                    continue;
                }
                let (gi, gj) = (block.start + li - 1, block.start + lj - 1);
                let term = df[gi].mul(&dg[gj])?.sub(&df[gj].mul(&dg[gi])?)?;
                h = h.add(&term)?;
            }
            assert!(h.degree() <= f.degree());
            out.push(((k, r), h));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{build_objective_squared, BlockLayout};
    use crate::realify::{realify, realify_block};
    use crate::testsupport::{random_tensor, seeded_rng};

    #[test]
    fn single_pair_minor() {
        // f = u1², g = u1² + u2² − 1: h1 = f'1 g'2 − f'2 g'1 = 4 u1 u2.
        let f = Polynomial::from_terms(2, &[(vec![2, 0], 1.0)]);
        let g = sphere_constraint(0..2, 2);
        let h = build_h_single(&f, &g).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].coefficient(&[1, 1]), 4.0);
        assert_eq!(h[0].num_terms(), 1);
    }

    #[test]
    fn cross_term_minor() {
        // f = u1 u2: h1 = u2·2u2 − u1·2u1 = 2(u2² − u1²).
        let f = Polynomial::from_terms(2, &[(vec![1, 1], 1.0)]);
        let g = sphere_constraint(0..2, 2);
        let h = build_h_single(&f, &g).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].coefficient(&[0, 2]), 2.0);
        assert_eq!(h[0].coefficient(&[2, 0]), -2.0);
    }

    #[test]
    fn counts_match_block_widths() {
        let a = crate::samples::partially_symmetric_qubit_tensor();
        let b = realify(&a);
        let layout = BlockLayout::new(&[4, 4], &[vec![0, 1]]).unwrap();
        let f = build_objective_squared(&b, &layout).unwrap();
        let h = build_h_blocks(&f, &[0..4]).unwrap();
        assert_eq!(h.len(), 5);
        assert!(h.iter().map(|((_, r), _)| *r).eq(1..=5));

        let a = crate::samples::nonsymmetric_qubit_tensor();
        let b = realify(&a);
        let layout = BlockLayout::new(&[4, 4], &[]).unwrap();
        let f = build_objective_squared(&b, &layout).unwrap();
        let h = build_h_blocks(&f, &[0..4, 4..8]).unwrap();
        assert_eq!(h.len(), 10);

        // A width-2 block contributes exactly one minor.
        let f = Polynomial::from_terms(2, &[(vec![1, 1], 1.0)]);
        let h = build_h_blocks(&f, &[0..2]).unwrap();
        assert_eq!(h.len(), 1);
    }

    #[test]
    fn overlapping_blocks_are_rejected() {
        let f = Polynomial::from_terms(4, &[(vec![1, 1, 1, 1], 1.0)]);
        assert!(build_h_blocks(&f, &[0..3, 2..4]).is_err());
        assert!(build_h_blocks(&f, &[0..2]).is_err());
    }

    #[test]
    fn minors_vanish_at_power_method_fixed_points() {
        let mut rng = seeded_rng(83);
        for trial in 0..4 {
            let a = random_tensor(&[2, 2, 2], &mut rng).normalized().unwrap();
            let b = realify(&a);
            let layout = BlockLayout::new(&[4, 4], &[]).unwrap();
            let f = build_objective_squared(&b, &layout).unwrap();
            let minors = build_h_blocks(&f, &[0..4, 4..8]).unwrap();

            let run = crate::oracle::hopm(&a, 8, 2000, 1000 + trial).unwrap();
            let mut u = realify_block(run.tuple.block(0));
            u.extend(realify_block(run.tuple.block(1)));
            let worst = minors
                .iter()
                .map(|(_, h)| h.evaluate(&u).abs())
                .fold(0.0f64, f64::max);
            assert!(worst <= 1e-6, "max |h| = {:.3e}", worst);
        }
    }
}

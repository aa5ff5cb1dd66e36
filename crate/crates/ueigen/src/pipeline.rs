//! End-to-end computation of the largest U-eigenvalue of a complex tensor.
//!
//! Route selection by symmetry class:
//!
//! * fully symmetric tensors maximize `Re <A, z^m>` directly over one block;
//! * partially symmetric tensors identify the symmetric modes into one
//!   variable block and maximize the squared contraction norm over the
//!   leading `m − 1` modes;
//! * non-symmetric tensors keep one block per leading mode.
//!
//! On the norm routes the relaxation bounds `λ²`, so the λ-scale bound is
//! `sqrt(ρ_N)`; the symmetric route bounds `λ` directly. Orders are tried
//! from the starting order upward until the flat-truncation certificate
//! holds and atoms extract, or the order cap is reached. The reported value
//! always comes from a polished feasible eigenpair (the best of the
//! extracted atoms and the power-method oracle); the relaxation only bounds
//! it from above.

use std::time::Instant;

use num_complex::Complex64;

use crate::extract::{
    canonical_gauge, certify, extract_atoms, flatness_rank, polish, recover_last_block,
};
use crate::jacobian::{build_h_blocks, build_h_single};
use crate::moment::{build_relaxation, moment_count, MomentRelaxation};
use crate::oracle::hopm;
use crate::poly::{
    build_objective_squared, build_objective_symmetric, sphere_constraint, BlockLayout,
    Polynomial,
};
use crate::realify::{complexify, realify};
use crate::sdp::{solve, SolverConfig, SolverResult, TerminationStatus};
use crate::tensor::{ComplexTensor, EigenpairResult, ExtractionMethod, RankOneTuple, SymmetryClass};
use crate::{tol, Error, Result};

/// Which optimization program to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteMode {
    /// Pick from the tensor's verified symmetry class.
    Auto,
    /// One block per leading mode, squared-norm objective.
    NonSymmetric,
    /// Identify symmetric modes, squared-norm objective.
    Partial,
    /// Single repeated block, direct objective; requires full symmetry.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeMode {
    /// Eliminate the first imaginary coordinate of every free block.
    Auto,
    /// Keep the full variable set (continuum of maximizers).
    None,
}

/// Pipeline settings; `Default` matches the CLI defaults.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub mode: RouteMode,
    pub gauge: GaugeMode,
    /// Relaxation starting order; `None` uses `⌈deg f / 2⌉ + 1`.
    pub start_order: Option<usize>,
    /// Last order to try; `None` uses start + 2.
    pub max_order: Option<usize>,
    /// Certification gap on the λ scale.
    pub gap_tol: f64,
    pub restarts: usize,
    pub max_sweeps: usize,
    pub seed: u64,
    pub oracle_only: bool,
    pub sdp_only: bool,
    /// Keep the text export of the first assembled relaxation.
    pub keep_export: bool,
    pub solver: SolverConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            mode: RouteMode::Auto,
            gauge: GaugeMode::Auto,
            start_order: None,
            max_order: None,
            gap_tol: tol::CERT_GAP,
            restarts: 64,
            max_sweeps: 5000,
            seed: 0,
            oracle_only: false,
            sdp_only: false,
            keep_export: false,
            solver: SolverConfig::default(),
        }
    }
}

/// How the problem was set up, for reporting.
#[derive(Debug, Clone)]
pub struct RouteInfo {
    pub mode: &'static str,
    /// New-to-old mode permutation applied before realification.
    pub permutation: Vec<usize>,
    /// Groups of permuted free modes sharing a block.
    pub identified: Vec<Vec<usize>>,
    /// Variables eliminated by gauge fixing (pre-gauge numbering).
    pub gauge_vars: Vec<usize>,
    pub variables: usize,
}

/// Everything the pipeline learned about one tensor.
#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub eigenpair: Option<EigenpairResult>,
    /// Relaxation optimum per order tried, on the objective scale (squared
    /// on the norm routes, direct on the symmetric route).
    pub rho_per_order: Vec<(usize, f64)>,
    /// λ-scale bound from the last solved order.
    pub bound: Option<f64>,
    pub oracle_lambda: Option<f64>,
    pub solver_status: Option<TerminationStatus>,
    pub flatness: Option<(usize, bool)>,
    pub route: RouteInfo,
    pub stage_seconds: Vec<(&'static str, f64)>,
    pub warnings: Vec<String>,
    pub sdp_export: Option<String>,
}

impl PipelineOutcome {
    pub fn is_certified(&self) -> bool {
        self.eigenpair
            .as_ref()
            .map(|e| e.certificate.certified_global)
            .unwrap_or(false)
    }
}

struct Program {
    objective: Polynomial,
    constraints: Vec<Polynomial>,
    /// λ = sqrt(objective value) when true; λ = value on the direct route.
    squared: bool,
    /// Mapping from gauged variable index to pre-gauge index.
    new_to_old: Vec<usize>,
    pre_gauge_vars: usize,
    layout: Option<BlockLayout>,
}

/// Computes the largest U-eigenvalue of `a` with the configured pipeline.
pub fn largest_u_eigenvalue(a: &ComplexTensor, cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    let m = a.order();
    if m == 1 {
        return Ok(order_one_closed_form(a));
    }

    let mode = match (cfg.mode, a.symmetry()) {
        (RouteMode::Auto, SymmetryClass::Full) => RouteMode::Symmetric,
        (RouteMode::Auto, SymmetryClass::Partial(_)) => RouteMode::Partial,
        (RouteMode::Auto, SymmetryClass::None) => RouteMode::NonSymmetric,
        (RouteMode::Symmetric, s) if *s != SymmetryClass::Full => {
            return Err(Error::SymmetryViolation(
                "symmetric route requires a fully symmetric tensor".into(),
            ));
        }
        (forced, _) => forced,
    };

    let mut warnings = Vec::new();
    let mut stage_seconds = Vec::new();

    // Stage: realify + program assembly.
    let t0 = Instant::now();
    let (a_perm, perm, program, route) = match mode {
        RouteMode::Symmetric => {
            let f = build_objective_symmetric(a)?;
            let nvars = f.nvars();
            let g = sphere_constraint(0..nvars, nvars);
            let mut constraints = vec![g.clone()];
            constraints.extend(build_h_single(&f, &g)?);
            let route = RouteInfo {
                mode: "symmetric",
                permutation: (0..m).collect(),
                identified: Vec::new(),
                gauge_vars: Vec::new(),
                variables: nvars,
            };
            let program = Program {
                objective: f,
                constraints,
                squared: false,
                new_to_old: (0..nvars).collect(),
                pre_gauge_vars: nvars,
                layout: None,
            };
            (a.clone(), (0..m).collect::<Vec<usize>>(), program, route)
        }
        RouteMode::Partial | RouteMode::NonSymmetric => {
            let groups = if mode == RouteMode::Partial {
                a.symmetry().groups(m)
            } else {
                Vec::new()
            };
            let perm = choose_permutation(a, &groups);
            let a_perm = a.permute_modes(&perm)?;
            let groups_p: Vec<Vec<usize>> = if mode == RouteMode::Partial {
                a_perm
                    .symmetry()
                    .groups(m)
                    .into_iter()
                    .map(|g| g.into_iter().filter(|&k| k < m - 1).collect::<Vec<_>>())
                    .filter(|g: &Vec<usize>| g.len() >= 2)
                    .collect()
            } else {
                Vec::new()
            };
            let b = realify(&a_perm);
            let free_dims = b.dims()[..m - 1].to_vec();
            let layout = BlockLayout::new(&free_dims, &groups_p)?;
            let f = build_objective_squared(&b, &layout)?;
            let nvars = layout.nvars();
            let blocks: Vec<std::ops::Range<usize>> = (0..layout.num_blocks())
                .map(|bk| layout.block_range(bk))
                .collect();
            let mut constraints: Vec<Polynomial> = blocks
                .iter()
                .map(|r| sphere_constraint(r.clone(), nvars))
                .collect();
            constraints.extend(build_h_blocks(&f, &blocks)?.into_iter().map(|(_, h)| h));

            // Gauge: zero the first imaginary coordinate of each block.
            let mut gauge_vars: Vec<usize> = Vec::new();
            if cfg.gauge == GaugeMode::Auto {
                for r in &blocks {
                    gauge_vars.push(r.start + r.len() / 2);
                }
            }
            let mut objective = f;
            let mut new_to_old: Vec<usize> = (0..nvars).collect();
            for &v in gauge_vars.iter().rev() {
                let local = new_to_old.iter().position(|&o| o == v).unwrap();
                objective = objective.eliminate_var(local)?;
                for c in constraints.iter_mut() {
                    *c = c.eliminate_var(local)?;
                }
                new_to_old.remove(local);
            }
            let route = RouteInfo {
                mode: if mode == RouteMode::Partial {
                    "partial"
                } else {
                    "nonsym"
                },
                permutation: perm.clone(),
                identified: groups_p,
                gauge_vars: gauge_vars.clone(),
                variables: new_to_old.len(),
            };
            let program = Program {
                objective,
                constraints,
                squared: true,
                new_to_old,
                pre_gauge_vars: nvars,
                layout: Some(layout),
            };
            (a_perm, perm, program, route)
        }
        RouteMode::Auto => unreachable!(),
    };
    stage_seconds.push(("build", t0.elapsed().as_secs_f64()));

    // Stage: oracle.
    let t0 = Instant::now();
    let oracle_run = if cfg.sdp_only {
        None
    } else {
        match hopm(a, cfg.restarts, cfg.max_sweeps, cfg.seed) {
            Ok(run) => Some(run),
            Err(e) => {
                warnings.push(format!("oracle failed: {}", e));
                None
            }
        }
    };
    stage_seconds.push(("oracle", t0.elapsed().as_secs_f64()));

    if cfg.oracle_only {
        let outcome_route = route;
        let mut outcome = PipelineOutcome {
            eigenpair: None,
            rho_per_order: Vec::new(),
            bound: None,
            oracle_lambda: oracle_run.as_ref().map(|r| r.lambda),
            solver_status: None,
            flatness: None,
            route: outcome_route,
            stage_seconds,
            warnings,
            sdp_export: None,
        };
        if let Some(run) = oracle_run {
            let gauged = canonical_gauge(&run.tuple);
            let mut pair = certify(
                a,
                run.lambda,
                &gauged,
                f64::INFINITY,
                run.lambda,
                0,
                cfg.gap_tol,
            )?;
            pair.certificate.certified_global = false;
            pair.certificate.extraction = ExtractionMethod::OracleOnly;
            outcome.eigenpair = Some(pair);
        }
        return Ok(outcome);
    }

    // Stage: relaxation orders.
    let deg = program.objective.degree().max(1) as usize;
    let n_start = cfg.start_order.unwrap_or(deg.div_ceil(2) + 1);
    let n_max = cfg.max_order.unwrap_or(n_start + 2).max(n_start);

    let mut rho_per_order = Vec::new();
    let mut solver_status = None;
    let mut flatness = None;
    let mut last: Option<(MomentRelaxation, SolverResult)> = None;
    let mut atoms: Option<(Vec<Vec<f64>>, usize, usize)> = None; // (atoms, rank, order)
    let mut sdp_export = None;
    let t0 = Instant::now();
    for order in n_start..=n_max {
        let rel = match build_relaxation(&program.objective, &program.constraints, order) {
            Ok(rel) => rel,
            Err(e) => {
                warnings.push(format!("order {}: {}", order, e));
                break;
            }
        };
        if cfg.keep_export && sdp_export.is_none() {
            sdp_export = Some(rel.export_text());
        }
        let result = match solve(&rel.to_cone_problem(), &cfg.solver) {
            Ok(r) => r,
            Err(e) => {
                warnings.push(format!("order {}: solver failed: {}", order, e));
                continue;
            }
        };
        if result.status != TerminationStatus::Optimal {
            warnings.push(format!(
                "order {}: solver stopped ({:?}) gap {:.2e} feas {:.2e}/{:.2e}",
                order, result.status, result.rel_gap, result.p_infeas, result.d_infeas
            ));
        }
        rho_per_order.push((order, result.value));
        solver_status = Some(result.status);

        let mm = rel.moment_matrix(&result.y);
        let prev_side = moment_count(rel.index().nvars(), order as u32 - 1);
        let (rank, flat) = flatness_rank(&mm, prev_side, tol::FLAT_RANK);
        flatness = Some((rank, flat));
        if flat && rank <= 8 {
            match extract_atoms(&rel, &result.y, rank) {
                Ok(found) => {
                    atoms = Some((found, rank, order));
                    last = Some((rel, result));
                    break;
                }
                Err(e) => warnings.push(format!("order {}: extraction failed: {}", order, e)),
            }
        } else if flat {
            warnings.push(format!(
                "order {}: rank {} exceeds the atom extraction cap",
                order, rank
            ));
        }
        last = Some((rel, result));
    }
    stage_seconds.push(("relax+solve", t0.elapsed().as_secs_f64()));

    // Stage: candidates and polish.
    let t0 = Instant::now();
    let mut extraction = ExtractionMethod::OracleOnly;
    let mut candidates: Vec<(f64, RankOneTuple)> = Vec::new();
    let b_perm = realify(&a_perm);
    if let Some((found, rank, _)) = &atoms {
        extraction = if *rank == 1 {
            ExtractionMethod::DegreeOneMoments
        } else {
            ExtractionMethod::MultiplicationMatrices {
                atoms: found.len(),
            }
        };
        for atom in found {
            match lift_atom(&a_perm, &b_perm, &program, atom) {
                Ok(Some(tuple)) => {
                    let out = polish(&a_perm, &tuple);
                    candidates.push((out.lambda, out.tuple));
                }
                Ok(None) => warnings.push("atom annihilates the tensor; skipped".into()),
                Err(e) => warnings.push(format!("atom lift failed: {}", e)),
            }
        }
    } else if let Some((rel, result)) = &last {
        // Fallback: polish from the degree-one moments.
        let nv = rel.index().nvars();
        let mut atom = vec![0.0; nv];
        for (i, x) in atom.iter_mut().enumerate() {
            let pos = rel
                .index()
                .position(crate::poly::Monomial::var(i, nv).exps())
                .unwrap();
            *x = result.y[pos];
        }
        if let Ok(Some(tuple)) = lift_atom(&a_perm, &b_perm, &program, &atom) {
            let out = polish(&a_perm, &tuple);
            extraction = ExtractionMethod::FallbackDegreeOne;
            warnings.push("flat truncation unavailable; polished degree-one moments".into());
            candidates.push((out.lambda, out.tuple));
        }
    }

    // Candidates live in permuted mode order; map back.
    let inv_perm = {
        let mut inv = vec![0usize; m];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        inv
    };
    let mut best: Option<(f64, RankOneTuple)> = None;
    for (lambda, tuple_perm) in candidates {
        let vectors: Vec<Vec<Complex64>> = (0..m)
            .map(|orig| tuple_perm.block(inv_perm[orig]).to_vec())
            .collect();
        let tuple = RankOneTuple::new(vectors);
        if best.as_ref().map_or(true, |(l, _)| lambda > *l) {
            best = Some((lambda, tuple));
        }
    }
    if let Some(run) = &oracle_run {
        if best.as_ref().map_or(true, |(l, _)| run.lambda > *l) {
            best = Some((run.lambda, run.tuple.clone()));
        }
    }
    stage_seconds.push(("extract+polish", t0.elapsed().as_secs_f64()));

    let bound = rho_per_order.last().map(|&(_, rho)| {
        if program.squared {
            rho.max(0.0).sqrt()
        } else {
            rho.max(0.0)
        }
    });
    let order_used = atoms
        .as_ref()
        .map(|(_, _, order)| *order)
        .or(rho_per_order.last().map(|&(n, _)| n))
        .unwrap_or(0);

    let eigenpair = match best {
        Some((lambda, tuple)) => {
            let gauged = canonical_gauge(&tuple);
            let oracle_lb = oracle_run.as_ref().map(|r| r.lambda).unwrap_or(lambda);
            let mut pair = certify(
                a,
                lambda,
                &gauged,
                bound.unwrap_or(f64::INFINITY),
                oracle_lb,
                order_used,
                cfg.gap_tol,
            )?;
            if bound.is_none() {
                pair.certificate.certified_global = false;
            }
            pair.certificate.flat = flatness.map(|(_, f)| f).unwrap_or(false);
            pair.certificate.flatness_rank = flatness.map(|(r, _)| r);
            pair.certificate.rho_per_order = rho_per_order.clone();
            pair.certificate.extraction = extraction;
            pair.certificate.notes = warnings.clone();
            Some(pair)
        }
        None => None,
    };

    Ok(PipelineOutcome {
        eigenpair,
        rho_per_order,
        bound,
        oracle_lambda: oracle_run.map(|r| r.lambda),
        solver_status,
        flatness,
        route,
        stage_seconds,
        warnings,
        sdp_export,
    })
}

fn order_one_closed_form(a: &ComplexTensor) -> PipelineOutcome {
    let norm = a.norm();
    let route = RouteInfo {
        mode: "closed-form",
        permutation: vec![0],
        identified: Vec::new(),
        gauge_vars: Vec::new(),
        variables: 0,
    };
    let mut outcome = PipelineOutcome {
        eigenpair: None,
        rho_per_order: Vec::new(),
        bound: Some(norm),
        oracle_lambda: Some(norm),
        solver_status: None,
        flatness: None,
        route,
        stage_seconds: Vec::new(),
        warnings: Vec::new(),
        sdp_export: None,
    };
    if norm > 0.0 {
        let z: Vec<Complex64> = a.entries().iter().map(|e| e.conj() / norm).collect();
        let tuple = canonical_gauge(&RankOneTuple::new(vec![z]));
        if let Ok(pair) = certify(a, norm, &tuple, norm, norm, 0, tol::CERT_GAP) {
            outcome.eigenpair = Some(pair);
        }
    }
    outcome
}

/// Picks the mode to exclude (placed last): the largest-dimension mode not in
/// a symmetry group, or the largest-dimension mode overall.
fn choose_permutation(a: &ComplexTensor, groups: &[Vec<usize>]) -> Vec<usize> {
    let m = a.order();
    let mut grouped = vec![false; m];
    for g in groups {
        for &k in g {
            grouped[k] = true;
        }
    }
    let pick = |candidates: &[usize]| -> Option<usize> {
        candidates
            .iter()
            .copied()
            .max_by_key(|&k| (a.dims()[k], k))
    };
    let free: Vec<usize> = (0..m).filter(|&k| !grouped[k]).collect();
    let excl = pick(&free)
        .or_else(|| pick(&(0..m).collect::<Vec<_>>()))
        .unwrap();
    let mut perm: Vec<usize> = (0..m).filter(|&k| k != excl).collect();
    perm.push(excl);
    perm
}

/// Converts a gauged atom back into a full complex tuple over the permuted
/// modes, reconstructing the excluded block. Returns `None` when the tensor
/// annihilates the atom's product vector.
fn lift_atom(
    a_perm: &ComplexTensor,
    b_perm: &crate::realify::RealTensor,
    program: &Program,
    atom: &[f64],
) -> Result<Option<RankOneTuple>> {
    let m = a_perm.order();
    if program.layout.is_none() {
        // Symmetric route: one block repeated over every mode.
        let n: f64 = atom.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n < 1e-9 {
            return Ok(None);
        }
        let unit: Vec<f64> = atom.iter().map(|x| x / n).collect();
        let z = complexify(&unit)?;
        return Ok(Some(RankOneTuple::new(vec![z; m])));
    }
    let layout = program.layout.as_ref().unwrap();
    let mut u_full = vec![0.0; program.pre_gauge_vars];
    for (i, &x) in atom.iter().enumerate() {
        u_full[program.new_to_old[i]] = x;
    }
    // Normalize per block (atoms meet the sphere constraints to 1e-6 only).
    for bk in 0..layout.num_blocks() {
        let r = layout.block_range(bk);
        let n: f64 = u_full[r.clone()].iter().map(|x| x * x).sum::<f64>().sqrt();
        if n < 1e-9 {
            return Ok(None);
        }
        for x in &mut u_full[r] {
            *x /= n;
        }
    }
    let mode_blocks = layout.mode_slices(&u_full);
    let v = b_perm.contract_leading(&mode_blocks)?;
    let raw: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if raw <= tol::LAMBDA_MIN {
        return Ok(None);
    }
    let last_block = recover_last_block(b_perm, &mode_blocks, raw)?;
    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    for block in &mode_blocks {
        vectors.push(complexify(block)?);
    }
    vectors.push(complexify(&last_block)?);
    Ok(Some(RankOneTuple::new(vectors)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testsupport::{random_tensor, seeded_rng, sigma_max_charpoly};

    fn fast_cfg() -> PipelineConfig {
        PipelineConfig {
            restarts: 16,
            max_sweeps: 2000,
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn matrix_pipeline_matches_singular_value() {
        let mut rng = seeded_rng(151);
        let a = random_tensor(&[2, 2], &mut rng);
        let out = largest_u_eigenvalue(&a, &fast_cfg()).unwrap();
        let pair = out.eigenpair.unwrap();
        let sigma = sigma_max_charpoly(&a);
        assert!(
            (pair.lambda - sigma).abs() <= 1e-6,
            "lambda {} vs sigma {}",
            pair.lambda,
            sigma
        );
        assert!(pair.certificate.certified_global, "{:?}", pair.certificate);
        assert!(pair.residual <= 1e-8);
    }

    #[test]
    fn rank_one_tensor_certifies_at_one() {
        let mut rng = seeded_rng(157);
        let t = crate::testsupport::random_unit_tuple(&[2, 2, 2], &mut rng);
        let a = t.to_tensor();
        let out = largest_u_eigenvalue(&a, &fast_cfg()).unwrap();
        let pair = out.eigenpair.unwrap();
        assert!((pair.lambda - 1.0).abs() <= 1e-7, "lambda {}", pair.lambda);
        assert!(pair.upper_bound >= pair.lambda - 1e-7);
    }

    #[test]
    fn oracle_only_skips_the_relaxation() {
        let a = crate::samples::nonsymmetric_qubit_tensor();
        let cfg = PipelineConfig {
            oracle_only: true,
            restarts: 24,
            ..PipelineConfig::default()
        };
        let out = largest_u_eigenvalue(&a, &cfg).unwrap();
        assert!(out.rho_per_order.is_empty());
        let pair = out.eigenpair.unwrap();
        assert!(!pair.certificate.certified_global);
        assert!((pair.lambda - 0.9661).abs() <= 5e-4);
    }

    #[test]
    fn order_one_tensor_closed_form() {
        let a = ComplexTensor::new(
            vec![2],
            vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)],
            SymmetryClass::None,
        )
        .unwrap();
        let out = largest_u_eigenvalue(&a, &fast_cfg()).unwrap();
        let pair = out.eigenpair.unwrap();
        assert!((pair.lambda - 1.0).abs() < 1e-12);
        assert!(pair.residual < 1e-12);
    }

    #[test]
    fn forced_symmetric_route_rejects_nonsymmetric_input() {
        let a = crate::samples::nonsymmetric_qubit_tensor();
        let cfg = PipelineConfig {
            mode: RouteMode::Symmetric,
            ..fast_cfg()
        };
        assert!(largest_u_eigenvalue(&a, &cfg).is_err());
    }

    #[test]
    fn permutation_prefers_ungrouped_largest_mode() {
        let a = crate::samples::partially_symmetric_qubit_tensor();
        let groups = a.symmetry().groups(3);
        let perm = choose_permutation(&a, &groups);
        assert_eq!(perm, vec![0, 1, 2]);
    }
}

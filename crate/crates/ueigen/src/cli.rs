//! State-file parsing, report emission, and the flag-driven entry point
//! behind the `ueigen` binary.
//!
//! # State file format (format 1)
//!
//! ```text
//! format: 1
//! dims: [2,2,2]
//! symmetry: auto            # auto | none | full | partial:[[1,2]]
//! normalize: false
//! # one-based multi-index, real part, imaginary part
//! 1 1 1  0.5 0.0
//! 2 2 1  0.288675134594813 0.0
//! ```
//!
//! Unlisted entries are zero. Indices are one-based in files (and in the
//! `partial` group lists); the in-memory API is zero-based. Emitting and
//! re-parsing reproduces amplitudes bit-exactly: floats are printed in
//! shortest round-trip form.
//!
//! Reports are line-oriented `key: value` pairs (12 significant digits)
//! followed by a single-line JSON block with the same content. Stage wall
//! times appear only in `time-*` lines so that everything else is
//! deterministic for a fixed seed. Exit codes: 0 certified, 2 uncertified,
//! 1 error.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use crate::pipeline::{GaugeMode, PipelineConfig, PipelineOutcome, RouteMode};
use crate::quantum::{detect_symmetry, geometric_measure, PureState};
use crate::tensor::{ComplexTensor, SymmetryClass};
use crate::{Error, Result};

/// Command-line flags of the `ueigen` binary.
#[derive(Parser, Debug, Clone)]
#[command(name = "ueigen", version, about = "Largest U-eigenvalue and geometric entanglement of a state file")]
pub struct Flags {
    /// Input state/tensor file.
    #[arg(long)]
    pub input: PathBuf,

    /// Override the starting relaxation order.
    #[arg(long)]
    pub order: Option<usize>,

    /// Last relaxation order to try.
    #[arg(long)]
    pub max_order: Option<usize>,

    /// Optimization route.
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,

    /// Certification gap tolerance on the eigenvalue scale.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,

    /// Power-method restarts.
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,

    /// Seed for the power-method restarts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Skip the relaxation: report the power-method lower bound only.
    #[arg(long, default_value_t = false)]
    pub oracle_only: bool,

    /// Skip the power method: relaxation bound and extraction only.
    #[arg(long, default_value_t = false)]
    pub sdp_only: bool,

    /// Write the assembled relaxation in sparse text form to this path.
    #[arg(long)]
    pub export_sdp: Option<PathBuf>,

    /// Also write the report to this path.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Gauge handling for the free blocks.
    #[arg(long, value_enum, default_value_t = GaugeArg::Auto)]
    pub gauge: GaugeArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Auto,
    Nonsym,
    Partial,
    Sym,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GaugeArg {
    Auto,
    None,
}

impl Flags {
    pub fn pipeline_config(&self) -> PipelineConfig {
        PipelineConfig {
            mode: match self.mode {
                ModeArg::Auto => RouteMode::Auto,
                ModeArg::Nonsym => RouteMode::NonSymmetric,
                ModeArg::Partial => RouteMode::Partial,
                ModeArg::Sym => RouteMode::Symmetric,
            },
            gauge: match self.gauge {
                GaugeArg::Auto => GaugeMode::Auto,
                GaugeArg::None => GaugeMode::None,
            },
            start_order: self.order,
            max_order: self.max_order,
            gap_tol: self.tol,
            restarts: self.restarts,
            seed: self.seed,
            oracle_only: self.oracle_only,
            sdp_only: self.sdp_only,
            keep_export: self.export_sdp.is_some(),
            ..PipelineConfig::default()
        }
    }
}

/// A parsed input file: the tensor plus whether normalization was requested.
#[derive(Debug, Clone)]
pub struct ParsedInput {
    pub tensor: ComplexTensor,
    pub normalize: bool,
}

/// Parses the state file format from a string.
pub fn parse_state_file(text: &str) -> Result<ParsedInput> {
    let mut dims: Option<Vec<usize>> = None;
    let mut symmetry_spec: Option<String> = None;
    let mut normalize = false;
    let mut entries: Vec<(Vec<usize>, Complex64)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let starts_numeric = content
            .chars()
            .next()
            .map(|c| c.is_ascii_digit() || c == '-')
            .unwrap_or(false);
        if !starts_numeric {
            let (key, value) = content.split_once(':').ok_or(Error::Parse {
                line,
                msg: format!("expected `key: value`, got {:?}", content),
            })?;
            let value = value.trim();
            match key.trim() {
                "format" => {
                    if value != "1" {
                        return Err(Error::Parse {
                            line,
                            msg: format!("unsupported format {:?}", value),
                        });
                    }
                }
                "dims" => {
                    let parsed: Vec<usize> =
                        serde_json::from_str(value).map_err(|e| Error::Parse {
                            line,
                            msg: format!("bad dims list: {}", e),
                        })?;
                    if parsed.is_empty() || parsed.iter().any(|&d| d == 0) {
                        return Err(Error::Parse {
                            line,
                            msg: "dims must be positive".into(),
                        });
                    }
                    dims = Some(parsed);
                }
                "symmetry" => symmetry_spec = Some(value.to_string()),
                "normalize" => {
                    normalize = value.parse().map_err(|_| Error::Parse {
                        line,
                        msg: format!("normalize must be true or false, got {:?}", value),
                    })?;
                }
                other => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unknown header key {:?}", other),
                    });
                }
            }
            continue;
        }
        let dims_ref = dims.as_ref().ok_or(Error::Parse {
            line,
            msg: "entry before dims header".into(),
        })?;
        let m = dims_ref.len();
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != m + 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} indices plus re and im", m),
            });
        }
        let mut idx = Vec::with_capacity(m);
        for (k, f) in fields[..m].iter().enumerate() {
            let i: usize = f.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad index {:?}", f),
            })?;
            if i == 0 || i > dims_ref[k] {
                return Err(Error::Parse {
                    line,
                    msg: format!(
                        "index {} out of range 1..{} in mode {}",
                        i,
                        dims_ref[k],
                        k + 1
                    ),
                });
            }
            idx.push(i);
        }
        let re: f64 = fields[m].parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad real part {:?}", fields[m]),
        })?;
        let im: f64 = fields[m + 1].parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad imaginary part {:?}", fields[m + 1]),
        })?;
        if entries.iter().any(|(other, _)| *other == idx) {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate entry at index {:?}", idx),
            });
        }
        entries.push((idx, Complex64::new(re, im)));
    }

    let dims = dims.ok_or(Error::Parse {
        line: 0,
        msg: "missing dims header".into(),
    })?;
    let len: usize = dims.iter().product();
    let mut flat = vec![Complex64::new(0.0, 0.0); len];
    for (idx, v) in &entries {
        let mut lin = 0;
        for (i, d) in idx.iter().zip(&dims) {
            lin = lin * d + (i - 1);
        }
        flat[lin] = *v;
    }

    let symmetry = match symmetry_spec.as_deref().unwrap_or("auto") {
        "auto" => detect_symmetry(&dims, &flat),
        "none" => SymmetryClass::None,
        "full" => SymmetryClass::Full,
        spec if spec.starts_with("partial:") => {
            let groups: Vec<Vec<usize>> =
                serde_json::from_str(&spec["partial:".len()..]).map_err(|e| Error::Parse {
                    line: 0,
                    msg: format!("bad partial symmetry groups: {}", e),
                })?;
            let zero_based = groups
                .iter()
                .map(|g| {
                    g.iter()
                        .map(|&k| {
                            if k == 0 || k > dims.len() {
                                Err(Error::Parse {
                                    line: 0,
                                    msg: format!("symmetry group mode {} out of range", k),
                                })
                            } else {
                                Ok(k - 1)
                            }
                        })
                        .collect::<Result<Vec<usize>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            SymmetryClass::Partial(zero_based)
        }
        other => {
            return Err(Error::Parse {
                line: 0,
                msg: format!("unknown symmetry spec {:?}", other),
            });
        }
    };
    let tensor = ComplexTensor::new(dims, flat, symmetry)?;
    Ok(ParsedInput { tensor, normalize })
}

pub fn parse_state_path(path: &Path) -> Result<ParsedInput> {
    let text = std::fs::read_to_string(path)?;
    parse_state_file(&text)
}

/// Emits a tensor in the state file format; floats print in shortest
/// round-trip form so a parse reproduces them bit-exactly.
pub fn emit_state_file(tensor: &ComplexTensor, normalize: bool) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "format: 1").unwrap();
    let dims_json: Vec<String> = tensor.dims().iter().map(|d| d.to_string()).collect();
    writeln!(out, "dims: [{}]", dims_json.join(",")).unwrap();
    let sym = match tensor.symmetry() {
        SymmetryClass::None => "none".to_string(),
        SymmetryClass::Full => "full".to_string(),
        SymmetryClass::Partial(groups) => {
            let one_based: Vec<Vec<usize>> = groups
                .iter()
                .map(|g| g.iter().map(|k| k + 1).collect())
                .collect();
            format!("partial:{}", serde_json::to_string(&one_based).unwrap())
        }
    };
    writeln!(out, "symmetry: {}", sym).unwrap();
    writeln!(out, "normalize: {}", normalize).unwrap();
    for (lin, idx) in crate::tensor::MultiIndexIter::new(tensor.dims()).enumerate() {
        let v = tensor.entries()[lin];
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        let idx_str: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
        writeln!(out, "{} {} {}", idx_str.join(" "), v.re, v.im).unwrap();
    }
    out
}

/// Finished run: report text, JSON value, and the process exit code.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub text: String,
    pub json: serde_json::Value,
    pub exit_code: i32,
}

fn sig(x: f64) -> String {
    if x.is_finite() {
        format!("{:.11e}", x)
    } else {
        format!("{}", x)
    }
}

/// Runs the pipeline on an input file and renders the report.
pub fn run(flags: &Flags) -> Result<RunOutput> {
    let parsed = parse_state_path(&flags.input)?;
    let cfg = flags.pipeline_config();

    let norm = parsed.tensor.norm();
    let is_state = parsed.normalize || (norm - 1.0).abs() <= 1e-10;

    let (outcome, g_pair): (PipelineOutcome, Option<(f64, f64, bool)>) = if is_state {
        let state = PureState::from_tensor(&parsed.tensor, true)?;
        let gm = geometric_measure(&state, &cfg)?;
        let trio = (
            gm.entanglement_eigenvalue,
            gm.geometric_measure,
            gm.separable,
        );
        (gm.outcome, Some(trio))
    } else {
        let outcome = crate::pipeline::largest_u_eigenvalue(&parsed.tensor, &cfg)?;
        (outcome, None)
    };

    if let Some(path) = &flags.export_sdp {
        match &outcome.sdp_export {
            Some(text) => std::fs::write(path, text)?,
            None => {
                return Err(Error::Solver(
                    "no relaxation was assembled; nothing to export".into(),
                ))
            }
        }
    }

    let certified = outcome.is_certified();
    let exit_code = if certified { 0 } else { 2 };

    let mut lines: Vec<(String, String)> = Vec::new();
    lines.push(("format".into(), "1".into()));
    lines.push(("input".into(), flags.input.display().to_string()));
    lines.push(("mode".into(), outcome.route.mode.into()));
    lines.push(("variables".into(), outcome.route.variables.to_string()));
    if let Some(pair) = &outcome.eigenpair {
        lines.push(("lambda-max".into(), sig(pair.lambda)));
        if let Some((g, e_g, separable)) = g_pair {
            lines.push(("g".into(), sig(g)));
            lines.push(("e-g".into(), sig(e_g)));
            lines.push(("separable".into(), separable.to_string()));
        }
        lines.push(("residual".into(), sig(pair.residual)));
        lines.push(("upper-bound".into(), sig(pair.upper_bound)));
        lines.push(("oracle-lower-bound".into(), sig(pair.lower_bound)));
        lines.push(("order-used".into(), pair.order_used.to_string()));
        for (k, z) in pair.vectors.vectors().iter().enumerate() {
            let comps: Vec<String> = z.iter().map(|c| format!("({},{})", sig(c.re), sig(c.im))).collect();
            lines.push((format!("eigenvector-{}", k + 1), comps.join(" ")));
        }
    }
    for (n, rho) in &outcome.rho_per_order {
        lines.push((format!("rho[{}]", n), sig(*rho)));
    }
    if let Some((rank, flat)) = outcome.flatness {
        lines.push(("flatness-rank".into(), rank.to_string()));
        lines.push(("flat".into(), flat.to_string()));
    }
    if let Some(status) = outcome.solver_status {
        lines.push(("solver-status".into(), format!("{:?}", status)));
    }
    lines.push(("certified".into(), certified.to_string()));
    for w in &outcome.warnings {
        lines.push(("warning".into(), w.clone()));
    }
    for (stage, secs) in &outcome.stage_seconds {
        lines.push((format!("time-{}", stage), format!("{:.3}", secs)));
    }

    let json = json!({
        "format": 1,
        "mode": outcome.route.mode,
        "lambda": outcome.eigenpair.as_ref().map(|p| p.lambda),
        "g": g_pair.map(|(g, _, _)| g),
        "e_g": g_pair.map(|(_, e, _)| e),
        "separable": g_pair.map(|(_, _, s)| s),
        "residual": outcome.eigenpair.as_ref().map(|p| p.residual),
        "upper_bound": outcome.eigenpair.as_ref().and_then(|p| {
            p.upper_bound.is_finite().then_some(p.upper_bound)
        }),
        "oracle_lower_bound": outcome.eigenpair.as_ref().map(|p| p.lower_bound),
        "order_used": outcome.eigenpair.as_ref().map(|p| p.order_used),
        "rho_per_order": outcome.rho_per_order,
        "flatness_rank": outcome.flatness.map(|(r, _)| r),
        "flat": outcome.flatness.map(|(_, f)| f),
        "certified": certified,
        "vectors": outcome.eigenpair.as_ref().map(|p| {
            p.vectors
                .vectors()
                .iter()
                .map(|z| z.iter().map(|c| vec![c.re, c.im]).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        }),
        "warnings": outcome.warnings,
    });

    let mut text = String::from("ueigen report\n");
    for (k, v) in &lines {
        text.push_str(k);
        text.push_str(": ");
        text.push_str(v);
        text.push('\n');
    }
    text.push_str("json: ");
    text.push_str(&serde_json::to_string(&json).expect("report json serializes"));
    text.push('\n');

    if let Some(path) = &flags.output {
        std::fs::write(path, &text)?;
    }

    Ok(RunOutput {
        text,
        json,
        exit_code,
    })
}

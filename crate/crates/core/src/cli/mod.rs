//! Command implementations behind the `seqmeas` binary.
//!
//! Each command returns its standard output as a string plus optional
//! notes for standard error, so the binary stays a thin argument parser.
//! Exit codes: 0 success, 1 input or validation failure, 2 usage error.

pub mod document;

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use crate::constructions::{dual_basis_witness_value, paper_scenario, Construction};
use crate::correlations::{analyze, dual_basis_identity_check, Analysis, JointTable, ResidualTable, SingleTimeTable};
use crate::optimize::{maximize, seesaw, Mode, OptConfig, OptResult};
use crate::quantum::Povm;
use document::{parse_povm_documents, parse_scenario_document, povm_from_doc, ScenarioDocument};

/// Printed whenever a dual-basis state is generated.
pub const NORMALIZATION_NOTE: &str = "note: the d-dimensional classically correlated state is normalized as \
(1/d) Σ_i |ii⟩⟨ii|; a prefactor of 1/2 is a valid state only for d = 2";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 1,
            Self::Usage(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Input(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub notes: Vec<String>,
}

impl From<String> for Output {
    fn from(stdout: String) -> Self {
        Self {
            stdout,
            notes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn joint_json(t: &JointTable) -> Value {
    let n = t.n_a();
    let rows: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|a0| {
            (0..n)
                .map(|a1| (0..t.n_b()).map(|b| t.get(a0, a1, b)).collect())
                .collect()
        })
        .collect();
    json!(rows)
}

fn single_json(t: &SingleTimeTable) -> Value {
    let rows: Vec<Vec<f64>> = (0..t.n_a())
        .map(|a| (0..t.n_b()).map(|b| t.get(a, b)).collect())
        .collect();
    json!(rows)
}

fn write_joint(out: &mut String, t: &JointTable) {
    let view = t.clamped();
    let _ = writeln!(out, "joint p(a0, a1, b):");
    for a0 in 0..t.n_a() {
        for a1 in 0..t.n_a() {
            let cells: Vec<String> = (0..t.n_b()).map(|b| format!("{:.10}", view.get(a0, a1, b))).collect();
            let _ = writeln!(out, "  a0={a0} a1={a1}: {}", cells.join("  "));
        }
    }
}

fn write_single(out: &mut String, t: &SingleTimeTable) {
    let view = t.clamped();
    let _ = writeln!(out, "single-time p(a1, b):");
    for a in 0..t.n_a() {
        let cells: Vec<String> = (0..t.n_b()).map(|b| format!("{:.10}", view.get(a, b))).collect();
        let _ = writeln!(out, "  a1={a}: {}", cells.join("  "));
    }
}

fn write_residuals(out: &mut String, r: &ResidualTable) {
    let _ = writeln!(out, "residuals Σ_a0 p(a0, a1, b) − p(a1, b):");
    for a1 in 0..r.n_a() {
        let cells: Vec<String> = (0..r.n_b()).map(|b| format!("{:+.10}", r.get(a1, b))).collect();
        let _ = writeln!(out, "  a1={a1}: {}", cells.join("  "));
    }
}

fn residuals_csv(a: &Analysis) -> String {
    let mut out = String::from("a1,b,sequential_marginal,single_time,residual\n");
    let r = &a.report.residuals;
    for a1 in 0..r.n_a() {
        for b in 0..r.n_b() {
            let _ = writeln!(
                out,
                "{a1},{b},{:e},{:e},{:e}",
                a.joint.sum_over_first(a1, b),
                a.single.get(a1, b),
                r.get(a1, b)
            );
        }
    }
    out
}

/// Runs one of the explicit constructions and reports everything about it.
pub fn cmd_demo(kind: Construction, d: Option<usize>, json_out: bool) -> Result<Output, CliError> {
    let d = match (kind, d) {
        (Construction::Trine, Some(d)) if d != 2 => {
            return Err(CliError::Usage(format!(
                "the trine demo is a qubit scenario; --d {d} is not allowed"
            )))
        }
        (_, Some(d)) if d < 2 => return Err(CliError::Usage(format!("--d must be at least 2, got {d}"))),
        (_, Some(d)) => d,
        (_, None) => 2,
    };
    let scenario = paper_scenario(kind, d).map_err(|e| CliError::Usage(e.to_string()))?;
    let analysis = analyze(&scenario).map_err(input_err)?;
    let commutation = scenario.alice_povm().is_self_commuting(crate::matcore::DEFAULT_TOL);
    let analytic = match kind {
        Construction::Trine => 1.0 / 3.0,
        Construction::DualBasis => dual_basis_witness_value(d),
    };
    let notes = match kind {
        Construction::DualBasis => vec![NORMALIZATION_NOTE.to_string()],
        Construction::Trine => Vec::new(),
    };

    if json_out {
        let v = json!({
            "construction": kind.to_string(),
            "d": d,
            "value": analysis.report.value,
            "analytic_value": analytic,
            "residuals": analysis.report.residuals.rows(),
            "nsit_residual": analysis.report.nsit_residual,
            "self_commuting": commutation.self_commuting,
            "max_commutator": commutation.max_commutator,
            "joint": joint_json(&analysis.joint),
            "single": single_json(&analysis.single),
            "scenario": ScenarioDocument::from_scenario(&scenario),
        });
        return Ok(Output {
            stdout: pretty(&v),
            notes,
        });
    }

    let mut out = String::new();
    let _ = writeln!(out, "construction: {kind} (d = {d})");
    let _ = writeln!(
        out,
        "Alice: {} outcomes on dimension {}; Bob: {} outcomes on dimension {}",
        scenario.n_alice(),
        scenario.alice_dim(),
        scenario.n_bob(),
        scenario.bob_dim()
    );
    write_joint(&mut out, &analysis.joint);
    write_single(&mut out, &analysis.single);
    write_residuals(&mut out, &analysis.report.residuals);
    let _ = writeln!(out, "NSIT residual: {:.10}", analysis.report.nsit_residual);
    let _ = writeln!(out, "witness S: {:.10}", analysis.report.value);
    let _ = writeln!(out, "analytic value: {:.10}", analytic);
    let _ = writeln!(
        out,
        "Alice self-commuting: {} (max commutator {:.10})",
        commutation.self_commuting, commutation.max_commutator
    );
    if kind == Construction::DualBasis {
        let _ = writeln!(out, "{NORMALIZATION_NOTE}");
    }
    Ok(Output {
        stdout: out,
        notes: Vec::new(),
    })
}

/// Evaluates the witness for a scenario document.
pub fn cmd_witness(path: &Path, format: Format, tol: f64) -> Result<Output, CliError> {
    let text = read_input(path)?;
    let doc = parse_scenario_document(&text).map_err(CliError::Input)?;
    let scenario = doc.to_scenario(tol).map_err(CliError::Input)?;
    let analysis = analyze(&scenario).map_err(input_err)?;
    let stdout = match format {
        Format::Json => pretty(&json!({
            "value": analysis.report.value,
            "residuals": analysis.report.residuals.rows(),
            "nsit_residual": analysis.report.nsit_residual,
            "scenario": doc,
        })),
        Format::Csv => residuals_csv(&analysis),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "witness S: {:.10}", analysis.report.value);
            write_residuals(&mut out, &analysis.report.residuals);
            let _ = writeln!(out, "NSIT residual: {:.10}", analysis.report.nsit_residual);
            out
        }
    };
    Ok(stdout.into())
}

/// Simulated against analytic dual-basis witness values for `d = 2..=d_max`.
pub fn cmd_scan(d_max: usize, csv: bool) -> Result<Output, CliError> {
    if d_max < 2 {
        return Err(CliError::Usage(format!("--d-max must be at least 2, got {d_max}")));
    }
    let mut rows = Vec::new();
    for d in 2..=d_max {
        let scenario = paper_scenario(Construction::DualBasis, d).map_err(input_err)?;
        let report = analyze(&scenario).map_err(input_err)?.report;
        let analytic = dual_basis_witness_value(d);
        rows.push((
            d,
            report.value,
            analytic,
            (report.value - analytic).abs(),
            report.nsit_residual,
        ));
    }
    let mut out = String::new();
    if csv {
        out.push_str("d,simulated,analytic,abs_diff,nsit_residual\n");
        for (d, sim, ana, diff, nsit) in &rows {
            let _ = writeln!(out, "{d},{sim:e},{ana:e},{diff:e},{nsit:e}");
        }
    } else {
        let _ = writeln!(
            out,
            "{:>3}  {:>14}  {:>14}  {:>10}  {:>10}",
            "d", "simulated", "½(1 − 1/d)", "|diff|", "NSIT"
        );
        for (d, sim, ana, diff, nsit) in &rows {
            let _ = writeln!(out, "{d:>3}  {sim:>14.10}  {ana:>14.10}  {diff:>10.2e}  {nsit:>10.2e}");
        }
    }
    Ok(Output {
        stdout: out,
        notes: vec![NORMALIZATION_NOTE.to_string()],
    })
}

fn describe_povm(out: &mut String, label: &str, p: &Povm, tol: f64) -> Result<(), CliError> {
    let commutation = p.is_self_commuting(tol);
    let _ = writeln!(
        out,
        "{label}: valid POVM, {} outcomes on dimension {}",
        p.len(),
        p.dim()
    );
    let _ = writeln!(
        out,
        "  self-commuting: {} (max commutator {:.10e})",
        commutation.self_commuting, commutation.max_commutator
    );
    let _ = writeln!(out, "  scaled-projector: {}", p.is_scaled_projector_povm(tol));
    if p.len() == 2 * p.dim() {
        let deviation = dual_basis_identity_check(p, tol).map_err(input_err)?;
        let _ = writeln!(out, "  dual-basis identity deviation: {deviation:.10e}");
    }
    Ok(())
}

/// Structural checks on every POVM in a document.
pub fn cmd_check(path: &Path, tol: f64) -> Result<Output, CliError> {
    let text = read_input(path)?;
    let povms = parse_povm_documents(&text).map_err(CliError::Input)?;
    let mut out = String::new();
    for (label, docs) in &povms {
        let p = povm_from_doc(docs, label, tol).map_err(CliError::Input)?;
        describe_povm(&mut out, label, &p, tol)?;
    }
    Ok(out.into())
}

#[derive(Debug, Clone)]
pub struct OptimizeArgs {
    pub config: OptConfig,
    /// Seesaw rounds after the initial full search; 0 disables.
    pub seesaw_rounds: usize,
    pub fixed_path: Option<std::path::PathBuf>,
    pub json: bool,
}

fn opt_json(cfg: &OptConfig, seesaw_rounds: usize, r: &OptResult) -> Value {
    let commutation = r
        .best_scenario
        .alice_povm()
        .is_self_commuting(crate::matcore::DEFAULT_TOL);
    json!({
        "best_value": r.best_value,
        "best_restart": r.best_restart,
        "per_restart_values": r.per_restart_values,
        "iterations_used": r.iterations_used,
        "total_iterations": r.total_iterations(),
        "alice_self_commuting": commutation.self_commuting,
        "alice_max_commutator": commutation.max_commutator,
        "lower_bound_only": true,
        "config": {
            "alice_dim": cfg.alice_dim,
            "bob_dim": cfg.bob_dim,
            "n_alice_outcomes": cfg.n_alice_outcomes,
            "n_bob_outcomes": cfg.n_bob_outcomes,
            "restarts": cfg.restarts,
            "max_iters": cfg.max_iters,
            "seed": cfg.seed,
            "tol": cfg.tol,
            "mode": cfg.mode.to_string(),
            "seesaw_rounds": seesaw_rounds,
        },
        "scenario": ScenarioDocument::from_scenario(&r.best_scenario),
    })
}

/// Witness maximization from seeded random restarts.
pub fn cmd_optimize(args: OptimizeArgs) -> Result<Output, CliError> {
    let mut cfg = args.config;
    if let Some(path) = &args.fixed_path {
        let text = read_input(path)?;
        let doc = parse_scenario_document(&text).map_err(CliError::Input)?;
        cfg.fixed = Some(doc.to_scenario(crate::matcore::DEFAULT_TOL).map_err(CliError::Input)?);
    }
    if matches!(cfg.mode, Mode::FixedState | Mode::FixedAlice) && cfg.fixed.is_none() {
        return Err(CliError::Usage(format!(
            "--mode {} requires --fixed <scenario.json>",
            cfg.mode
        )));
    }
    if args.seesaw_rounds > 0 && cfg.mode != Mode::Full {
        return Err(CliError::Usage("--seesaw runs from --mode full only".into()));
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let result = if args.seesaw_rounds > 0 {
        seesaw(&cfg, args.seesaw_rounds)
    } else {
        maximize(&cfg)
    }
    .map_err(input_err)?;

    if args.json {
        return Ok(pretty(&opt_json(&cfg, args.seesaw_rounds, &result)).into());
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "mode {}: Alice {} outcomes on dimension {}, Bob {} outcomes on dimension {}",
        cfg.mode, cfg.n_alice_outcomes, cfg.alice_dim, cfg.n_bob_outcomes, cfg.bob_dim
    );
    let _ = writeln!(out, "best witness (lower bound): {:.10}", result.best_value);
    let _ = writeln!(out, "best restart: {}", result.best_restart);
    let _ = writeln!(
        out,
        "restarts: {}, seed: {}, total iterations: {}",
        result.per_restart_values.len(),
        cfg.seed,
        result.total_iterations()
    );
    let values: Vec<String> = result.per_restart_values.iter().map(|v| format!("{v:.10}")).collect();
    let _ = writeln!(out, "per-restart values: {}", values.join(" "));
    let commutation = result
        .best_scenario
        .alice_povm()
        .is_self_commuting(crate::matcore::DEFAULT_TOL);
    let _ = writeln!(
        out,
        "best Alice POVM self-commuting: {} (max commutator {:.10})",
        commutation.self_commuting, commutation.max_commutator
    );
    Ok(out.into())
}

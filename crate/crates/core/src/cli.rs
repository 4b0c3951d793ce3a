//! Problem documents, report documents and the batch driver behind the
//! `jprocrustes` binary.
//!
//! Complex entries are `[re, im]` pairs. `D` may be a full matrix or its
//! diagonal as a 1-D array.

use std::io::Read;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::ham::{SolveOutcome, CONDITION_KEYS};
use crate::jspace::{self, JStructure, StructureMode};
use crate::matcore::{diag, ComplexMatrix, Tolerance};
use crate::oracle;
use crate::problem::ProblemInstance;

/// Process exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Solution = 0,
    InputError = 1,
    Infeasible = 2,
    NumericalFailure = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn for_error(e: &Error) -> Self {
        match e {
            Error::Numerical(_) => ExitStatus::NumericalFailure,
            _ => ExitStatus::InputError,
        }
    }
}

/// Values given on the command line that replace those in the document.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mode: Option<StructureMode>,
    pub rank_cutoff: Option<f64>,
    pub structure_atol: Option<f64>,
    pub audit_samples: Option<usize>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, inst: &mut ProblemInstance) -> Result<()> {
        if let Some(m) = self.mode {
            inst.mode = m;
        }
        if let Some(r) = self.rank_cutoff {
            inst.tol.rank_cutoff = r;
        }
        if let Some(a) = self.structure_atol {
            inst.tol.structure_atol = a;
        }
        if let Some(n) = self.audit_samples {
            inst.audit_samples = Some(n);
        }
        if let Some(s) = self.seed {
            inst.seed = Some(s);
        }
        inst.tol.validate().map_err(|e| Error::parse("tol", e.to_string()))?;
        validate_fields(inst)
    }
}

pub fn parse_instance_file(path: &Path) -> Result<ProblemInstance> {
    let text = std::fs::read_to_string(path)?;
    parse_instance_str(&text)
}

pub fn parse_instance_reader(mut reader: impl Read) -> Result<ProblemInstance> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_instance_str(&text)
}

pub fn parse_instance_str(text: &str) -> Result<ProblemInstance> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::parse("$", e.to_string()))?;
    parse_instance_value(&value)
}

pub fn parse_instance_value(doc: &Value) -> Result<ProblemInstance> {
    let obj = doc.as_object().ok_or_else(|| Error::parse("$", "expected an object"))?;
    let mode_str = field(obj, "mode")?
        .as_str()
        .ok_or_else(|| Error::parse("mode", "expected a string"))?;
    let mode: StructureMode = mode_str
        .parse()
        .map_err(|e: Error| Error::parse("mode", e.to_string()))?;
    let j = parse_matrix(field(obj, "J")?, "J")?;
    let x = parse_matrix(field(obj, "X")?, "X")?;
    let d = parse_d(field(obj, "D")?)?;
    let a_tilde = parse_matrix(field(obj, "A_tilde")?, "A_tilde")?;
    let tol = match obj.get("tol") {
        None | Some(Value::Null) => Tolerance::default(),
        Some(t) => parse_tol(t)?,
    };
    let audit_samples = match obj.get("audit_samples") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            v.as_u64()
                .ok_or_else(|| Error::parse("audit_samples", "expected a nonnegative integer"))? as usize,
        ),
    };
    let seed = match obj.get("seed") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            v.as_u64()
                .ok_or_else(|| Error::parse("seed", "expected a nonnegative integer"))?,
        ),
    };
    let inst = ProblemInstance {
        mode,
        j,
        x,
        d,
        a_tilde,
        tol,
        audit_samples,
        seed,
    };
    validate_fields(&inst)?;
    Ok(inst)
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Value> {
    obj.get(name).ok_or_else(|| Error::parse(name, "missing field"))
}

fn parse_tol(v: &Value) -> Result<Tolerance> {
    let obj = v.as_object().ok_or_else(|| Error::parse("tol", "expected an object"))?;
    let mut tol = Tolerance::default();
    for (name, slot) in [
        ("rank_cutoff", &mut tol.rank_cutoff),
        ("structure_atol", &mut tol.structure_atol),
    ] {
        if let Some(x) = obj.get(name) {
            *slot = x
                .as_f64()
                .ok_or_else(|| Error::parse(format!("tol.{name}"), "expected a number"))?;
        }
    }
    tol.validate().map_err(|e| Error::parse("tol", e.to_string()))?;
    Ok(tol)
}

fn parse_entry(v: &Value, path: &str) -> Result<num_complex::Complex64> {
    let pair = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::parse(path, "expected [re, im]"))?;
    let re = pair[0]
        .as_f64()
        .ok_or_else(|| Error::parse(format!("{path}[0]"), "expected a number"))?;
    let im = pair[1]
        .as_f64()
        .ok_or_else(|| Error::parse(format!("{path}[1]"), "expected a number"))?;
    Ok(num_complex::Complex64::new(re, im))
}

fn parse_matrix(v: &Value, name: &str) -> Result<ComplexMatrix> {
    let rows = v.as_array().ok_or_else(|| Error::parse(name, "expected a 2-D array"))?;
    let mut parsed: Vec<Vec<num_complex::Complex64>> = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let path = format!("{name}[{i}]");
        let cols = row
            .as_array()
            .ok_or_else(|| Error::parse(&path, "expected an array of entries"))?;
        let entries = cols
            .iter()
            .enumerate()
            .map(|(j, e)| parse_entry(e, &format!("{path}[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = parsed.first() {
            if first.len() != entries.len() {
                return Err(Error::parse(
                    &path,
                    format!("row has {} entries, expected {}", entries.len(), first.len()),
                ));
            }
        }
        parsed.push(entries);
    }
    let ncols = parsed.first().map_or(0, Vec::len);
    Ok(ComplexMatrix::from_fn(parsed.len(), ncols, |i, j| parsed[i][j]))
}

// A 1-D array of pairs is a diagonal; anything else must be a matrix.
fn parse_d(v: &Value) -> Result<ComplexMatrix> {
    let arr = v.as_array().ok_or_else(|| Error::parse("D", "expected an array"))?;
    let is_diagonal_form = arr.iter().all(|e| {
        e.as_array()
            .is_some_and(|p| p.len() == 2 && p.iter().all(Value::is_number))
    });
    if is_diagonal_form && !arr.is_empty() {
        let vals = arr
            .iter()
            .enumerate()
            .map(|(i, e)| parse_entry(e, &format!("D[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        Ok(diag(&vals))
    } else {
        parse_matrix(v, "D")
    }
}

fn validate_fields(inst: &ProblemInstance) -> Result<()> {
    let n = inst.j.nrows();
    if inst.j.ncols() != n || n == 0 || !n.is_multiple_of(2) {
        return Err(Error::parse(
            "J",
            format!(
                "expected a square matrix of positive even size, got {}x{}",
                inst.j.nrows(),
                inst.j.ncols()
            ),
        ));
    }
    if inst.x.nrows() != n || inst.x.ncols() == 0 {
        return Err(Error::parse(
            "X",
            format!(
                "expected {n} rows and at least one column, got {}x{}",
                inst.x.nrows(),
                inst.x.ncols()
            ),
        ));
    }
    let m = inst.x.ncols();
    if inst.d.shape() != (m, m) {
        return Err(Error::parse(
            "D",
            format!("expected {m}x{m}, got {}x{}", inst.d.nrows(), inst.d.ncols()),
        ));
    }
    if !crate::matcore::is_diagonal(&inst.d, inst.tol) {
        return Err(Error::parse("D", "D not diagonal"));
    }
    if inst.a_tilde.shape() != (n, n) {
        return Err(Error::parse(
            "A_tilde",
            format!(
                "expected {n}x{n}, got {}x{}",
                inst.a_tilde.nrows(),
                inst.a_tilde.ncols()
            ),
        ));
    }
    for (name, mtx) in [
        ("J", &inst.j),
        ("X", &inst.x),
        ("D", &inst.d),
        ("A_tilde", &inst.a_tilde),
    ] {
        crate::matcore::ensure_finite(mtx, name).map_err(|e| Error::parse(name, e.to_string()))?;
    }
    jspace::check_x_rank(&inst.x, inst.tol).map_err(|_| Error::parse("X", "X not full column rank"))?;
    inst.validate()
}

pub fn matrix_to_value(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

/// Canonical document for an instance; `D` is written as its diagonal.
pub fn instance_to_value(inst: &ProblemInstance) -> Value {
    let mut obj = Map::new();
    obj.insert("mode".into(), json!(inst.mode.as_str()));
    obj.insert("J".into(), matrix_to_value(&inst.j));
    obj.insert("X".into(), matrix_to_value(&inst.x));
    obj.insert(
        "D".into(),
        Value::Array(inst.d.diagonal().iter().map(|z| json!([z.re, z.im])).collect()),
    );
    obj.insert("A_tilde".into(), matrix_to_value(&inst.a_tilde));
    obj.insert(
        "tol".into(),
        json!({"rank_cutoff": inst.tol.rank_cutoff, "structure_atol": inst.tol.structure_atol}),
    );
    if let Some(n) = inst.audit_samples {
        obj.insert("audit_samples".into(), json!(n));
    }
    if let Some(s) = inst.seed {
        obj.insert("seed".into(), json!(s));
    }
    Value::Object(obj)
}

/// JSON text with one matrix row per line.
///
/// Arrays nested at most two deep (an entry, a row, a diagonal) are written
/// inline; everything else is indented.
pub fn format_document(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn array_depth(v: &Value) -> usize {
    match v {
        Value::Array(items) => 1 + items.iter().map(array_depth).max().unwrap_or(0),
        Value::Object(_) => usize::MAX / 2,
        _ => 0,
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Array(items) if array_depth(v) > 2 && !items.is_empty() => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Array(items) => {
            let parts: Vec<String> = items
                .iter()
                .map(|i| serde_json::to_string(i).expect("serializable"))
                .collect();
            out.push('[');
            out.push_str(&parts.join(", "));
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(key).expect("serializable"));
                out.push_str(": ");
                write_value(item, indent + 1, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        other => out.push_str(&serde_json::to_string(other).expect("serializable")),
    }
}

/// Seed used when the audit is requested without one.
pub const DEFAULT_SEED: u64 = 0;

/// Solves the instance and builds the report document.
pub fn run(inst: &ProblemInstance) -> (ExitStatus, Value) {
    match run_inner(inst) {
        Ok(out) => out,
        Err(e) => (ExitStatus::for_error(&e), error_report(&e)),
    }
}

pub fn error_report(e: &Error) -> Value {
    json!({"status": "error", "error": e.to_string()})
}

fn run_inner(inst: &ProblemInstance) -> Result<(ExitStatus, Value)> {
    let js = inst.structure()?;
    let outcome = inst.solve_with(&js)?;
    let status = match outcome {
        SolveOutcome::Solution(_) => ExitStatus::Solution,
        SolveOutcome::Infeasible { .. } => ExitStatus::Infeasible,
    };
    Ok((status, build_report(inst, &js, &outcome)?))
}

/// Report document for an outcome of `inst` solved under `js`; runs the
/// audit when the instance asks for one.
pub fn build_report(inst: &ProblemInstance, js: &JStructure, outcome: &SolveOutcome) -> Result<Value> {
    let mut report = Map::new();
    report.insert("mode".into(), json!(inst.mode.as_str()));

    let mut conditions = Map::new();
    for (key, step, cond) in outcome.report().entries() {
        let entry = match cond {
            Some(c) => json!({
                "step": step,
                "residual": c.residual,
                "threshold": c.threshold,
                "passed": c.passed(),
            }),
            None => json!({"step": step, "residual": null, "threshold": null, "passed": null}),
        };
        conditions.insert(key.into(), entry);
    }
    debug_assert_eq!(conditions.len(), CONDITION_KEYS.len());

    let symmetric = jspace::check_spectrum_symmetry(&inst.d, inst.mode, inst.tol)?;
    let mut warnings = Vec::new();
    if !symmetric {
        warnings.push(json!(format!(
            "the diagonal of D lacks the spectral symmetry of the {} mode",
            inst.mode
        )));
    }

    match outcome {
        SolveOutcome::Solution(sol) => {
            report.insert("status".into(), json!("solution"));
            report.insert("A_hat".into(), matrix_to_value(&sol.a_hat));
            if let Some(b) = &sol.reduced {
                report.insert("B_hat".into(), matrix_to_value(b));
            }
            report.insert("residual_fro".into(), json!(sol.residual));
            report.insert("eigen_residual".into(), json!(sol.eigen_residual));
            report.insert("failed_step".into(), Value::Null);
        }
        SolveOutcome::Infeasible { failed_step, .. } => {
            report.insert("status".into(), json!("infeasible"));
            report.insert("failed_step".into(), json!(failed_step));
        }
    }
    report.insert("conditions".into(), Value::Object(conditions));
    report.insert("spectrum_symmetric".into(), json!(symmetric));
    report.insert("warnings".into(), Value::Array(warnings));

    if let (Some(count), Some(sol)) = (inst.audit_samples.filter(|&c| c > 0), outcome.solution()) {
        let seed = inst.seed.unwrap_or(DEFAULT_SEED);
        let audit = match oracle::sample_feasible_with(inst, js, count, seed) {
            Ok(batch) => {
                let a = oracle::optimality_audit(inst, &sol.a_hat, &batch);
                json!({
                    "seed": seed,
                    "requested": count,
                    "samples": a.samples,
                    "attempts": batch.attempts,
                    "max_margin": a.max_margin,
                    "near_optimal": a.near_optimal,
                    "min_near_optimal_distance": a.min_near_optimal_distance,
                    "max_near_optimal_distance": a.max_near_optimal_distance,
                    "passed": a.passed(),
                })
            }
            Err(e) => json!({"seed": seed, "requested": count, "error": e.to_string()}),
        };
        report.insert("audit".into(), audit);
    }
    Ok(Value::Object(report))
}

//! Scenario descriptions, the scenario runner, and bit-stable JSON output
//! for the `cuntzr` command-line tool.

use std::path::PathBuf;
use std::time::Instant;

use cuntzr_core::bialgebra::check_coassoc;
use cuntzr_core::cuntz::{creation_words, monomials_up_to, CuntzMonomial, DirectSumElement};
use cuntzr_core::gns::GpRepresentation;
use cuntzr_core::report::Check;
use cuntzr_core::rmatrix::{
    build_r, counterexample_demo, verify_intertwining, verify_symmetry, verify_ybe, RMatrixOperator,
};
use cuntzr_core::states::{boxtimes, commutes, star, GpState, StateDescriptor};
use cuntzr_core::{Error, VERIFY_TOL};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

mod canonical;

pub use canonical::to_canonical_string;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest tolerance a scenario may request.
pub const MAX_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Coassoc,
    StateProduct,
    BuildR,
    Intertwine,
    Symmetry,
    Ybe,
    Counterexample,
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega1: Option<StateDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega2: Option<StateDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega3: Option<StateDescriptor>,
    /// Algebra index for `coassoc`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Longest monomial enumerated by `coassoc` and `state-product`.
    #[serde(default = "default_max_len")]
    pub max_len: usize,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Where `build-r` writes the matrix export.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub export: Option<PathBuf>,
}

fn default_max_len() -> usize {
    1
}

fn default_depth() -> usize {
    1
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind) -> Self {
        Self {
            kind,
            omega1: None,
            omega2: None,
            omega3: None,
            n: None,
            max_len: default_max_len(),
            depth: default_depth(),
            tol: None,
            out: None,
            export: None,
        }
    }

    pub fn tolerance(&self) -> f64 {
        self.tol.unwrap_or(VERIFY_TOL)
    }

    /// Field-level validation; returns the resolved states.
    pub fn validate(&self) -> Result<ResolvedStates, SpecError> {
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol <= MAX_TOL) {
                return Err(SpecError::field(
                    "tol",
                    format!("{tol} is not in (0, {MAX_TOL}]"),
                ));
            }
        }
        let resolve = |name: &str, d: &Option<StateDescriptor>, required: bool| match d {
            Some(d) => d
                .to_state()
                .map(Some)
                .map_err(|e| SpecError::field(name, e.to_string())),
            None if required => Err(SpecError::field(name, "required for this scenario")),
            None => Ok(None),
        };
        use ScenarioKind::*;
        let (need2, need3) = match self.kind {
            StateProduct | BuildR | Intertwine | Symmetry => (true, false),
            Ybe => (true, true),
            Coassoc | Counterexample | All => (false, false),
        };
        if self.kind == Coassoc {
            match self.n {
                Some(n) if n >= 1 => {}
                _ => {
                    return Err(SpecError::field(
                        "n",
                        "a positive algebra index is required",
                    ))
                }
            }
        }
        Ok(ResolvedStates {
            omega1: resolve("omega1", &self.omega1, need2)?,
            omega2: resolve("omega2", &self.omega2, need2)?,
            omega3: resolve("omega3", &self.omega3, need3)?,
        })
    }
}

pub struct ResolvedStates {
    pub omega1: Option<GpState>,
    pub omega2: Option<GpState>,
    pub omega3: Option<GpState>,
}

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("invalid field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("cannot parse scenario: {0}")]
    Json(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl SpecError {
    pub fn field(field: &str, message: impl Into<String>) -> Self {
        Self::Field {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

pub fn parse_spec(text: &str) -> Result<ScenarioSpec, SpecError> {
    serde_json::from_str(text).map_err(|e| SpecError::Json(e.to_string()))
}

/// Outcome of one scenario run.
#[derive(Clone, Debug)]
pub struct Report {
    pub scenario: ScenarioSpec,
    pub checks: Vec<Check>,
    pub data: Map<String, Value>,
    /// Wall-clock seconds per sub-scenario, in run order.
    pub timings: Vec<(String, f64)>,
    /// Matrix exports produced by `build-r`, to be written by the caller.
    pub exports: Vec<(PathBuf, Value)>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// JSON form; timings are only included on request so that repeated runs
    /// produce identical bytes.
    pub fn to_json(&self, with_timings: bool) -> Value {
        let mut out = Map::new();
        out.insert("tool".into(), json!("cuntzr"));
        out.insert("version".into(), json!(TOOL_VERSION));
        out.insert(
            "scenario".into(),
            serde_json::to_value(&self.scenario).expect("serializable"),
        );
        out.insert("pass".into(), json!(self.pass()));
        out.insert(
            "checks".into(),
            serde_json::to_value(&self.checks).expect("serializable"),
        );
        if !self.data.is_empty() {
            out.insert("data".into(), Value::Object(self.data.clone()));
        }
        if with_timings {
            let timings: Map<String, Value> = self
                .timings
                .iter()
                .map(|(k, v)| (k.clone(), json!(v)))
                .collect();
            out.insert("timings".into(), Value::Object(timings));
        }
        Value::Object(out)
    }
}

/// A check failed by a domain error; the residual is the error's own, or 0
/// when the error carries none.
fn failed(name: &str, error: &Error) -> Check {
    let residual = match error {
        Error::GramMismatch { residual, .. } | Error::OutOfDomain { residual } => *residual,
        _ => 0.0,
    };
    let check = Check::new(name, false, residual);
    match error {
        Error::NotCommuting { witness } => check.with_witness(witness.to_string()),
        Error::GramMismatch { x, y, .. } => check.with_witness(format!("({x}, {y})")),
        other => check.with_witness(other.to_string()),
    }
}

fn prefixed(prefix: &str, checks: Vec<Check>) -> Vec<Check> {
    checks
        .into_iter()
        .map(|mut c| {
            c.name = format!("{prefix}/{}", c.name);
            c
        })
        .collect()
}

fn rep(state: &GpState) -> GpRepresentation {
    GpRepresentation::for_state(state)
}

/// Runs a validated scenario. Domain errors become failed checks.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<Report, SpecError> {
    let states = spec.validate()?;
    let mut report = Report {
        scenario: spec.clone(),
        checks: Vec::new(),
        data: Map::new(),
        timings: Vec::new(),
        exports: Vec::new(),
    };
    let tol = spec.tolerance();
    let start = Instant::now();
    match spec.kind {
        ScenarioKind::All => run_all(tol, &mut report),
        kind => {
            let name = serde_json::to_value(kind).expect("serializable");
            let name = name.as_str().expect("unit variant").to_string();
            run_kind(spec, &states, tol, &mut report);
            report.timings.push((name, start.elapsed().as_secs_f64()));
        }
    }
    Ok(report)
}

fn run_kind(spec: &ScenarioSpec, states: &ResolvedStates, tol: f64, report: &mut Report) {
    let pair = || {
        (
            states.omega1.as_ref().expect("validated"),
            states.omega2.as_ref().expect("validated"),
        )
    };
    match spec.kind {
        ScenarioKind::Coassoc => {
            let n = spec.n.expect("validated");
            let monomials = monomials_up_to(n, spec.max_len);
            let failure = monomials
                .iter()
                .find(|m| !check_coassoc(&DirectSumElement::from((*m).clone())));
            let check = Check::new("coassoc", failure.is_none(), 0.0);
            report.checks.push(match failure {
                Some(m) => check.with_witness(m.to_string()),
                None => check,
            });
            report
                .data
                .insert("monomials".into(), json!(monomials.len()));
        }
        ScenarioKind::StateProduct => {
            let (a, b) = pair();
            let product = boxtimes(a.vector(), b.vector());
            let lazy = star(a.clone().into(), b.clone().into());
            let closed = GpState::new(product.clone());
            let mut worst = (0.0f64, None);
            for m in monomials_up_to(product.n(), spec.max_len) {
                let diff = match lazy.eval_monomial(&m) {
                    Ok(value) => (value - closed.eval_monomial(&m)).norm(),
                    Err(e) => {
                        report.checks.push(failed("star = boxtimes", &e));
                        return;
                    }
                };
                if diff > worst.0 || worst.1.is_none() {
                    worst = (diff.max(worst.0), Some(m));
                }
            }
            let mut check = Check::within("star = boxtimes", worst.0, tol);
            if !check.pass {
                check = check.with_witness(worst.1.map(|m| m.to_string()).unwrap_or_default());
            }
            report.checks.push(check);
            let commutation = commutes(a, b);
            report.data.insert(
                "boxtimes".into(),
                serde_json::to_value(StateDescriptor::from_state(&closed)).expect("serializable"),
            );
            report
                .data
                .insert("commutes".into(), json!(commutation.commutes));
            if let Some(w) = commutation.witness {
                report.data.insert("witness".into(), json!(w.to_string()));
            }
        }
        ScenarioKind::BuildR => {
            let (a, b) = pair();
            match build_r(&rep(a), &rep(b), spec.depth) {
                Ok(r) => {
                    report
                        .checks
                        .push(Check::within("unitarity", r.unitarity_defect(), tol));
                    report
                        .checks
                        .push(Check::within("gram-equality", r.gram_residual(), tol));
                    report.data.insert("rank".into(), json!(r.rank()));
                    report
                        .data
                        .insert("permutative".into(), json!(r.permutation().is_some()));
                    if let Some(path) = &spec.export {
                        report.exports.push((path.clone(), export_r(&r, a, b)));
                    }
                }
                Err(e) => report.checks.push(failed("build-r", &e)),
            }
        }
        ScenarioKind::Intertwine => {
            let (a, b) = pair();
            let n = a.n() * b.n();
            let words: Vec<CuntzMonomial> = creation_words(n, 1)
                .into_iter()
                .filter(|w| !w.is_unit())
                .flat_map(|w| [w.adjoint(), w])
                .collect();
            let result = build_r(&rep(a), &rep(b), spec.depth + 1)
                .and_then(|r| verify_intertwining(&r, &words, spec.depth, tol));
            match result {
                Ok(r) => report.checks.extend(r.checks),
                Err(e) => report.checks.push(failed("intertwine", &e)),
            }
        }
        ScenarioKind::Symmetry => {
            let (a, b) = pair();
            match verify_symmetry(&rep(a), &rep(b), spec.depth, tol) {
                Ok(r) => report.checks.extend(r.checks),
                Err(e) => report.checks.push(failed("symmetry", &e)),
            }
        }
        ScenarioKind::Ybe => {
            let (a, b) = pair();
            let c = states.omega3.as_ref().expect("validated");
            let reps = [rep(a), rep(b), rep(c)];
            match verify_ybe([&reps[0], &reps[1], &reps[2]], spec.depth, tol) {
                Ok(r) => report.checks.extend(r.checks),
                Err(e) => report.checks.push(failed("ybe", &e)),
            }
        }
        ScenarioKind::Counterexample => report.checks.extend(counterexample_demo().checks),
        ScenarioKind::All => unreachable!("dispatched by run_scenario"),
    }
}

/// The default suite run by `all`.
pub fn default_suite() -> Vec<ScenarioSpec> {
    let standard = |n| StateDescriptor::Standard { standard: n };
    let uniform = |n| StateDescriptor::Uniform { uniform: n };
    let with = |kind, states: &[StateDescriptor], depth: usize| {
        let mut spec = ScenarioSpec::new(kind);
        let mut it = states.iter().cloned();
        spec.omega1 = it.next();
        spec.omega2 = it.next();
        spec.omega3 = it.next();
        spec.depth = depth;
        spec
    };
    let mut coassoc = ScenarioSpec::new(ScenarioKind::Coassoc);
    coassoc.n = Some(6);
    let mut product = with(ScenarioKind::StateProduct, &[uniform(2), uniform(3)], 1);
    product.max_len = 2;
    vec![
        coassoc,
        product,
        with(ScenarioKind::BuildR, &[standard(2), standard(3)], 1),
        with(ScenarioKind::BuildR, &[uniform(2), uniform(3)], 2),
        with(ScenarioKind::Intertwine, &[uniform(2), uniform(3)], 1),
        with(ScenarioKind::Symmetry, &[uniform(2), uniform(3)], 2),
        with(
            ScenarioKind::Ybe,
            &[standard(2), standard(3), standard(5)],
            1,
        ),
        with(ScenarioKind::Ybe, &[uniform(2), uniform(3), uniform(2)], 1),
        ScenarioSpec::new(ScenarioKind::Counterexample),
    ]
}

fn run_all(tol: f64, report: &mut Report) {
    for (k, mut spec) in default_suite().into_iter().enumerate() {
        spec.tol = Some(tol);
        let label = format!(
            "{k}-{}",
            serde_json::to_value(spec.kind)
                .expect("serializable")
                .as_str()
                .unwrap_or("")
        );
        let start = Instant::now();
        let states = spec.validate().expect("default suite is valid");
        let mut sub = Report {
            scenario: spec.clone(),
            checks: Vec::new(),
            data: Map::new(),
            timings: Vec::new(),
            exports: Vec::new(),
        };
        run_kind(&spec, &states, tol, &mut sub);
        report
            .timings
            .push((label.clone(), start.elapsed().as_secs_f64()));
        report.checks.extend(prefixed(&label, sub.checks));
    }
}

fn complex_pair(c: cuntzr_core::C64) -> Value {
    json!([c.re, c.im])
}

/// Matrix export of `R(ω₁, ω₂)`: states, depth, domain labels, the Gram
/// matrix of the generating vectors, the matrix of `R` in orthonormal
/// coordinates and, for permutative representations, the index permutation
/// as `[a, b, a', b']` rows.
pub fn export_r(r: &RMatrixOperator, omega1: &GpState, omega2: &GpState) -> Value {
    let matrix_json = |m: &nalgebra::DMatrix<cuntzr_core::C64>| {
        Value::Array(
            (0..m.nrows())
                .map(|i| Value::Array((0..m.ncols()).map(|j| complex_pair(m[(i, j)])).collect()))
                .collect(),
        )
    };
    let mut out = Map::new();
    out.insert(
        "omega1".into(),
        serde_json::to_value(StateDescriptor::from_state(omega1)).expect("serializable"),
    );
    out.insert(
        "omega2".into(),
        serde_json::to_value(StateDescriptor::from_state(omega2)).expect("serializable"),
    );
    out.insert("depth".into(), json!(r.depth()));
    out.insert("domain_basis".into(), json!(r.labels()));
    out.insert("gram".into(), matrix_json(r.gram()));
    out.insert("matrix".into(), matrix_json(r.matrix()));
    if let Some(perm) = r.permutation() {
        let rows: Vec<Value> = perm
            .iter()
            .map(|(&(a, b), &(a2, b2))| json!([a, b, a2, b2]))
            .collect();
        out.insert("permutation".into(), Value::Array(rows));
    }
    Value::Object(out)
}

//! Job configuration documents and their validation.

use ncg_model_triples::{build_circle_dirac, build_finite_even, SpectralTriple, WindingSymbol};
use ncg_operator_core::{DenseOperator, Parity, C64};
use serde::Deserialize;
use std::collections::BTreeMap;
use thiserror::Error;

pub const DEFAULT_WINDOW: usize = 256;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_EPSILONS: [f64; 3] = [1.0, 0.5, 0.25];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("parity mismatch in task {task}: task is {task_parity}, model is {model_parity}")]
    ParityMismatch { task: String, task_parity: &'static str, model_parity: &'static str },
    #[error("unknown model kind {0:?}")]
    UnknownKind(String),
    #[error("unknown method {method:?} in task {task}")]
    UnknownMethod { task: String, method: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// `[re, im]` pair.
pub type Complex = [f64; 2];

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    kind: String,
    dim_plus: Option<usize>,
    dim_minus: Option<usize>,
    #[serde(rename = "P")]
    p: Option<Vec<Vec<Complex>>>,
    #[serde(default)]
    generators: BTreeMap<String, Vec<Vec<Complex>>>,
}

/// Dense matrix given inline or a generator name.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ElementSpec {
    Name(String),
    Matrix(Vec<Vec<Complex>>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    id: Option<String>,
    method: String,
    parity: Option<String>,
    #[serde(alias = "n")]
    k: Option<usize>,
    eps: Option<Vec<f64>>,
    t: Option<Vec<f64>>,
    s: Option<Vec<f64>>,
    window: Option<usize>,
    m_cap: Option<u32>,
    tolerance: Option<f64>,
    expected: Option<f64>,
    variant: Option<String>,
    symbol: Option<BTreeMap<String, Complex>>,
    generator: Option<String>,
    element: Option<ElementSpec>,
    seed: Option<u64>,
    count: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<String>,
    format: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    model: RawModel,
    tasks: Vec<RawTask>,
    output: Option<RawOutput>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    JsonLines,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "jsonl" | "json-lines" => Some(Format::JsonLines),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Winding,
    Direct,
    Tau,
    Jlo,
    Local,
    McKeanSinger,
    ZetaIndex,
    CyclicIdentities,
    ChernCycle,
    JloCocycle,
    Transgression,
    TraceDefect,
    Validate,
}

impl Method {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "winding" => Method::Winding,
            "direct" => Method::Direct,
            "tau" => Method::Tau,
            "jlo" => Method::Jlo,
            "local" => Method::Local,
            "mckean-singer" => Method::McKeanSinger,
            "zeta-index" => Method::ZetaIndex,
            "cyclic-identities" => Method::CyclicIdentities,
            "chern-cycle" => Method::ChernCycle,
            "jlo-cocycle" => Method::JloCocycle,
            "transgression" => Method::Transgression,
            "trace-defect" => Method::TraceDefect,
            "validate" => Method::Validate,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Winding => "winding",
            Method::Direct => "direct",
            Method::Tau => "tau",
            Method::Jlo => "jlo",
            Method::Local => "local",
            Method::McKeanSinger => "mckean-singer",
            Method::ZetaIndex => "zeta-index",
            Method::CyclicIdentities => "cyclic-identities",
            Method::ChernCycle => "chern-cycle",
            Method::JloCocycle => "jlo-cocycle",
            Method::Transgression => "transgression",
            Method::TraceDefect => "trace-defect",
            Method::Validate => "validate",
        }
    }

    /// Whether the method computes an index, so its values should be integers.
    pub fn is_index(self) -> bool {
        matches!(
            self,
            Method::Winding
                | Method::Direct
                | Method::Tau
                | Method::Jlo
                | Method::Local
                | Method::McKeanSinger
                | Method::ZetaIndex
        )
    }
}

/// Validated task with defaults filled.
#[derive(Clone, Debug)]
pub struct TaskConfig {
    pub id: String,
    pub method: Method,
    /// `None` for suites that do not depend on the model.
    pub parity: Option<Parity>,
    pub k: Option<usize>,
    pub eps: Vec<f64>,
    pub t: Vec<f64>,
    pub s: Vec<f64>,
    pub window: usize,
    pub m_cap: u32,
    pub tolerance: f64,
    pub expected: Option<f64>,
    pub raw_variant: bool,
    pub symbol: Option<WindingSymbol>,
    pub generator: Option<String>,
    pub element: Option<ElementSpec>,
    pub seed: u64,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub model: SpectralTriple,
    pub tasks: Vec<TaskConfig>,
    pub output_path: Option<String>,
    pub format: Format,
}

impl JobConfig {
    /// Replaces the window of every task.
    pub fn set_window(&mut self, window: usize) {
        for t in &mut self.tasks {
            t.window = window;
        }
    }
}

fn parity_name(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
    }
}

/// Row-major `[re, im]` rows to a dense operator.
pub fn dense_from_rows(rows: &[Vec<Complex>]) -> Result<DenseOperator, ConfigError> {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(ConfigError::Invalid("matrices must be non-empty and rectangular".into()));
    }
    let entries = rows.iter().flatten().map(|z| C64::new(z[0], z[1])).collect();
    DenseOperator::new(r, c, entries).map_err(|e| ConfigError::Invalid(e.to_string()))
}

fn build_model(m: &RawModel) -> Result<SpectralTriple, ConfigError> {
    match m.kind.as_str() {
        "circle" => {
            if m.p.is_some() || m.dim_plus.is_some() || m.dim_minus.is_some() || !m.generators.is_empty() {
                return Err(ConfigError::Invalid("the circle model takes no parameters".into()));
            }
            Ok(build_circle_dirac())
        }
        "finite-even" => {
            let p = m.p.as_ref().ok_or_else(|| ConfigError::Invalid("finite-even model needs \"P\"".into()))?;
            let p = dense_from_rows(p)?;
            let dim_plus = m.dim_plus.unwrap_or(p.cols());
            let dim_minus = m.dim_minus.unwrap_or(p.rows());
            let gens = m
                .generators
                .iter()
                .map(|(name, rows)| Ok((name.clone(), dense_from_rows(rows)?)))
                .collect::<Result<Vec<_>, ConfigError>>()?;
            build_finite_even(dim_plus, dim_minus, &p, gens).map_err(|e| ConfigError::Invalid(e.to_string()))
        }
        other => Err(ConfigError::UnknownKind(other.to_string())),
    }
}

fn parse_symbol(id: &str, map: &BTreeMap<String, Complex>) -> Result<WindingSymbol, ConfigError> {
    let coeffs = map
        .iter()
        .map(|(k, z)| {
            k.trim()
                .parse::<i64>()
                .map(|off| (off, C64::new(z[0], z[1])))
                .map_err(|_| ConfigError::Invalid(format!("task {id}: symbol offset {k:?} is not an integer")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    WindingSymbol::new(coeffs).map_err(|e| ConfigError::Invalid(format!("task {id}: {e}")))
}

fn task_parity(method: Method, raw: &RawTask, model: Parity) -> Result<Option<Parity>, ConfigError> {
    if let Some(p) = &raw.parity {
        return match p.as_str() {
            "odd" => Ok(Some(Parity::Odd)),
            "even" => Ok(Some(Parity::Even)),
            other => Err(ConfigError::Invalid(format!("parity must be \"odd\" or \"even\", got {other:?}"))),
        };
    }
    Ok(match method {
        Method::Winding | Method::TraceDefect => Some(Parity::Odd),
        Method::McKeanSinger | Method::ZetaIndex => Some(Parity::Even),
        Method::CyclicIdentities | Method::ChernCycle => None,
        Method::Direct | Method::Tau | Method::Jlo | Method::Local => {
            if raw.symbol.is_some() {
                Some(Parity::Odd)
            } else if raw.element.is_some() {
                Some(Parity::Even)
            } else {
                Some(model)
            }
        }
        Method::JloCocycle | Method::Transgression | Method::Validate => Some(model),
    })
}

fn build_task(index: usize, raw: &RawTask, model: &SpectralTriple) -> Result<TaskConfig, ConfigError> {
    let id = raw.id.clone().unwrap_or_else(|| (index + 1).to_string());
    let method = Method::parse(&raw.method)
        .ok_or_else(|| ConfigError::UnknownMethod { task: id.clone(), method: raw.method.clone() })?;
    let parity = task_parity(method, raw, model.parity)?;
    if let Some(p) = parity {
        if p != model.parity {
            return Err(ConfigError::ParityMismatch {
                task: id,
                task_parity: parity_name(p),
                model_parity: parity_name(model.parity),
            });
        }
    }
    let symbol = raw.symbol.as_ref().map(|m| parse_symbol(&id, m)).transpose()?;
    let is_circle = model.monomial_cutoff.is_some();
    if matches!(method, Method::Winding | Method::TraceDefect) && !is_circle {
        return Err(ConfigError::Invalid(format!("task {id}: {} needs the circle model", method.name())));
    }
    if method == Method::Winding && symbol.is_none() {
        return Err(ConfigError::Invalid(format!("task {id}: winding needs \"symbol\"")));
    }
    if parity == Some(Parity::Odd)
        && matches!(method, Method::Direct | Method::Tau | Method::Jlo | Method::Local)
        && symbol.is_none()
        && raw.generator.is_none()
    {
        return Err(ConfigError::Invalid(format!("task {id}: odd pairings need \"symbol\" or \"generator\"")));
    }
    if symbol.is_some() && !is_circle {
        return Err(ConfigError::Invalid(format!("task {id}: symbols live on the circle model")));
    }
    let eps = raw.eps.clone().unwrap_or_else(|| DEFAULT_EPSILONS.to_vec());
    if eps.is_empty() || eps.iter().any(|&e| !(e > 0.0)) {
        return Err(ConfigError::Invalid(format!("task {id}: eps values must be positive")));
    }
    let raw_variant = match raw.variant.as_deref() {
        None | Some("renormalized") => false,
        Some("raw") => true,
        Some(other) => return Err(ConfigError::Invalid(format!("task {id}: unknown variant {other:?}"))),
    };
    let tolerance = raw.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    if !(tolerance >= 0.0) {
        return Err(ConfigError::Invalid(format!("task {id}: tolerance must be nonnegative")));
    }
    Ok(TaskConfig {
        id,
        method,
        parity,
        k: raw.k,
        eps,
        t: raw.t.clone().unwrap_or_else(|| vec![0.1, 1.0, 10.0]),
        s: raw.s.clone().unwrap_or_else(|| vec![0.0, 1.0, 2.5]),
        window: raw.window.unwrap_or(DEFAULT_WINDOW),
        m_cap: raw.m_cap.unwrap_or(ncg_zeta_local::DEFAULT_M_CAP),
        tolerance,
        expected: raw.expected,
        raw_variant,
        symbol,
        generator: raw.generator.clone(),
        element: raw.element.clone(),
        seed: raw.seed.unwrap_or(0),
        count: raw.count.unwrap_or(10),
    })
}

/// Parses and validates a JSON job document.
pub fn load_config(text: &str) -> Result<JobConfig, ConfigError> {
    let raw: RawJob = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let model = build_model(&raw.model)?;
    let tasks = raw
        .tasks
        .iter()
        .enumerate()
        .map(|(i, t)| build_task(i, t, &model))
        .collect::<Result<Vec<_>, _>>()?;
    let (output_path, format) = match &raw.output {
        Some(o) => {
            let format = match &o.format {
                Some(f) => Format::parse(f).ok_or_else(|| ConfigError::Invalid(format!("unknown format {f:?}")))?,
                None => Format::Csv,
            };
            (o.path.clone(), format)
        }
        None => (None, Format::Csv),
    };
    Ok(JobConfig { model, tasks, output_path, format })
}

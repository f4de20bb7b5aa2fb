//! JSON problem specs: parsing and validation into core types.
//!
//! ```json
//! {
//!   "shape": [2, 1],
//!   "state": { "spectra": [[0.5, 0.3], [0.2]] },
//!   "gauge": { "sample": { "count": 16, "seed": 7 } },
//!   "tasks": ["report", { "task": "orbit", "samples": 1000 }]
//! }
//! ```
//!
//! Complex entries are `[re, im]` pairs and matrices are lists of rows.

use std::fmt;
use std::path::Path;

use gns_core::linalg::{self, HermitianEigen};
use gns_core::scalar::{cx, CMat};
use gns_core::{random_unitary, AlgebraElement, AlgebraShape, Element64, State64};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_SAMPLES: usize = 256;

/// How far `tr_A(R)` may sit from 1 before the spec is rejected. Inside
/// this band the density is rescaled.
pub const TRACE_TOLERANCE: f64 = 1e-9;

/// Unitarity tolerance for explicit gauge elements, which are then
/// replaced by their unitary polar factor.
pub const GAUGE_TOLERANCE: f64 = 1e-9;

/// A validation failure, tagged with the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub field: String,
    pub message: String,
}

impl SpecError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid spec field \"{}\": {}", self.field, self.message)
    }
}

impl std::error::Error for SpecError {}

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    shape: Vec<usize>,
    state: RawState,
    #[serde(default)]
    gauge: Option<RawGauge>,
    #[serde(default)]
    tasks: Vec<RawTask>,
    #[serde(default)]
    entropy_unit: EntropyUnit,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    density: Option<Vec<RawMatrix>>,
    spectra: Option<Vec<Vec<f64>>>,
    eigenbasis: Option<Vec<RawMatrix>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGauge {
    #[serde(default)]
    explicit: Vec<Vec<RawMatrix>>,
    sample: Option<Sampling>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawTask {
    Name(String),
    Detailed(TaskParams),
}

/// Optional per-task parameters. Command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskParams {
    pub task: String,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    /// Random restarts of the extremizer.
    pub starts: Option<usize>,
    pub max_iters: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyUnit {
    #[default]
    Nats,
    Bits,
}

impl EntropyUnit {
    /// Converts a value in nats.
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            EntropyUnit::Nats => nats,
            EntropyUnit::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EntropyUnit::Nats => "nats",
            EntropyUnit::Bits => "bits",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Report,
    Orbit,
    Extremize,
    Verify,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Report => "report",
            TaskKind::Orbit => "orbit",
            TaskKind::Extremize => "extremize",
            TaskKind::Verify => "verify",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            TaskKind::Report,
            TaskKind::Orbit,
            TaskKind::Extremize,
            TaskKind::Verify,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub kind: TaskKind,
    pub params: TaskParams,
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub shape: AlgebraShape,
    pub state: State64,
    /// Explicit gauge elements, in order.
    pub gauges: Vec<Element64>,
    pub sampling: Option<Sampling>,
    pub tasks: Vec<Task>,
    pub entropy_unit: EntropyUnit,
}

/// Reads and validates a spec file.
pub fn parse_spec(path: &Path) -> Result<ProblemSpec, SpecError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SpecError::new("file", format!("{}: {e}", path.display())))?;
    parse_spec_str(&text)
}

pub fn parse_spec_str(text: &str) -> Result<ProblemSpec, SpecError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let msg = inner.to_string();
        // Missing keys are reported at the parent; name the key itself.
        let missing = msg
            .strip_prefix("missing field `")
            .and_then(|m| m.split('`').next());
        let field = match (path.as_str(), missing) {
            (".", Some(key)) => key.to_string(),
            (_, Some(key)) => format!("{path}.{key}"),
            (".", None) => "file".to_string(),
            _ => path,
        };
        SpecError::new(field, msg)
    })?;
    let shape = AlgebraShape::new(raw.shape).map_err(|e| SpecError::new("shape", e.to_string()))?;
    let state = build_state(&shape, raw.state)?;
    let (gauges, sampling) = match raw.gauge {
        Some(g) => (build_gauges(&shape, g.explicit)?, g.sample),
        None => (Vec::new(), None),
    };
    let tasks = raw
        .tasks
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let params = match t {
                RawTask::Name(task) => TaskParams {
                    task,
                    ..TaskParams::default()
                },
                RawTask::Detailed(p) => p,
            };
            let kind = TaskKind::parse(&params.task).ok_or_else(|| {
                SpecError::new(
                    format!("tasks[{i}]"),
                    format!(
                        "unknown task \"{}\" (expected report, orbit, extremize or verify)",
                        params.task
                    ),
                )
            })?;
            Ok(Task { kind, params })
        })
        .collect::<Result<_, _>>()?;
    Ok(ProblemSpec {
        shape,
        state,
        gauges,
        sampling,
        tasks,
        entropy_unit: raw.entropy_unit,
    })
}

fn matrix(raw: &RawMatrix, n: usize, field: &str) -> Result<CMat<f64>, SpecError> {
    if raw.len() != n || raw.iter().any(|row| row.len() != n) {
        return Err(SpecError::new(field, format!("expected a {n}x{n} matrix")));
    }
    Ok(CMat::from_fn(n, n, |i, j| cx(raw[i][j][0], raw[i][j][1])))
}

fn matrices(raw: &[RawMatrix], shape: &AlgebraShape, field: &str) -> Result<Vec<CMat<f64>>, SpecError> {
    if raw.len() != shape.num_blocks() {
        return Err(SpecError::new(
            field,
            format!("{} blocks given, shape has {}", raw.len(), shape.num_blocks()),
        ));
    }
    raw.iter()
        .enumerate()
        .map(|(r, m)| matrix(m, shape.block_size(r), &format!("{field}[{r}]")))
        .collect()
}

fn build_state(shape: &AlgebraShape, raw: RawState) -> Result<State64, SpecError> {
    let blocks = match (raw.density, raw.spectra) {
        (Some(d), None) => {
            if raw.eigenbasis.is_some() {
                return Err(SpecError::new(
                    "state.eigenbasis",
                    "only allowed together with spectra",
                ));
            }
            matrices(&d, shape, "state.density")?
        }
        (None, Some(spectra)) => {
            if spectra.len() != shape.num_blocks() {
                return Err(SpecError::new(
                    "state.spectra",
                    format!(
                        "{} spectra given, shape has {} blocks",
                        spectra.len(),
                        shape.num_blocks()
                    ),
                ));
            }
            let bases = raw
                .eigenbasis
                .as_deref()
                .map(|b| matrices(b, shape, "state.eigenbasis"))
                .transpose()?;
            let mut blocks = Vec::new();
            for (r, spec) in spectra.iter().enumerate() {
                let n = shape.block_size(r);
                if spec.len() != n {
                    return Err(SpecError::new(
                        format!("state.spectra[{r}]"),
                        format!("{} values for a block of size {n}", spec.len()),
                    ));
                }
                let diag = CMat::from_fn(n, n, |i, j| if i == j { cx(spec[i], 0.0) } else { cx(0.0, 0.0) });
                blocks.push(match &bases {
                    Some(b) => {
                        let res = linalg::unitarity_residual(&b[r]);
                        if res > GAUGE_TOLERANCE {
                            return Err(SpecError::new(
                                format!("state.eigenbasis[{r}]"),
                                format!("not unitary (residual {res:.3e})"),
                            ));
                        }
                        &b[r] * diag * b[r].adjoint()
                    }
                    None => diag,
                });
            }
            blocks
        }
        (Some(_), Some(_)) => {
            return Err(SpecError::new(
                "state",
                "give either density or spectra, not both",
            ))
        }
        (None, None) => return Err(SpecError::new("state", "missing density or spectra")),
    };
    let density =
        AlgebraElement::new(shape.clone(), blocks).map_err(|e| SpecError::new("state", e.to_string()))?;
    let tr = density.trace();
    if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
        return Err(SpecError::new(
            "state",
            format!(
                "trace {:.12} differs from 1 by more than {TRACE_TOLERANCE:.0e}",
                tr.re
            ),
        ));
    }
    let density = density.scale(cx(1.0 / tr.re, 0.0));
    State64::new(density).map_err(|e| SpecError::new("state", e.to_string()))
}

/// Unitary polar factor `g (g* g)^{-1/2}`.
fn unitary_part(g: &CMat<f64>) -> CMat<f64> {
    let inv_sqrt = HermitianEigen::new(&(g.adjoint() * g)).map(|x| cx(1.0 / x.sqrt(), 0.0));
    g * inv_sqrt
}

fn build_gauges(shape: &AlgebraShape, raw: Vec<Vec<RawMatrix>>) -> Result<Vec<Element64>, SpecError> {
    raw.iter()
        .enumerate()
        .map(|(i, g)| {
            let field = format!("gauge.explicit[{i}]");
            let blocks = matrices(g, shape, &field)?;
            for (r, b) in blocks.iter().enumerate() {
                let res = linalg::unitarity_residual(b);
                if res > GAUGE_TOLERANCE {
                    return Err(SpecError::new(
                        format!("{field}[{r}]"),
                        format!("not unitary (residual {res:.3e})"),
                    ));
                }
            }
            let blocks = blocks.iter().map(unitary_part).collect();
            AlgebraElement::new(shape.clone(), blocks).map_err(|e| SpecError::new(field, e.to_string()))
        })
        .collect()
}

impl ProblemSpec {
    /// Parameters of the first task entry of this kind, if any.
    pub fn task_params(&self, kind: TaskKind) -> TaskParams {
        self.tasks
            .iter()
            .find(|t| t.kind == kind)
            .map(|t| t.params.clone())
            .unwrap_or_default()
    }

    /// `count` Haar gauge elements with their per-sample seeds. Seeds are
    /// drawn from a stream keyed by `seed`, so sample `i` does not depend
    /// on `count`.
    pub fn sampled_gauges(&self, count: usize, seed: u64) -> Vec<(u64, Element64)> {
        sample_seeds(count, seed)
            .into_iter()
            .map(|s| (s, random_unitary(&self.shape, s)))
            .collect()
    }
}

pub fn sample_seeds(count: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.next_u64()).collect()
}

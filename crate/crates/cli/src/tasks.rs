//! The four subcommands. Each writes human-readable text to `out` and any
//! files under the output directory.

use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::PathBuf;

use gns_core::gauge::{
    baseline_entropy, commutant_trace_residual, random_commutant_element, random_kraus_channel,
};
use gns_core::modular::conjugated_algebra_span;
use gns_core::{
    apply_channel, check_modular_flow, entropy_gap, extremize_entropy, gauge_lambdas, gns, modular_data,
    oracle_suite, rho_g, verify_gauge_commutant, BipartiteModel, Element64, ExtremizeOptions, GnsRep64,
    OperatorSpan,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::spec::{ProblemSpec, TaskKind, DEFAULT_SAMPLES, DEFAULT_SEED};

/// Command-line overrides shared by all subcommands.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
}

#[derive(Debug)]
pub enum TaskError {
    Core(gns_core::GnsError),
    Io(io::Error),
    Csv(csv::Error),
    Json(serde_json::Error),
}

impl std::fmt::Display for TaskError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TaskError::Core(e) => write!(f, "{e}"),
            TaskError::Io(e) => write!(f, "i/o error: {e}"),
            TaskError::Csv(e) => write!(f, "csv error: {e}"),
            TaskError::Json(e) => write!(f, "json error: {e}"),
        }
    }
}

impl std::error::Error for TaskError {}

impl From<gns_core::GnsError> for TaskError {
    fn from(e: gns_core::GnsError) -> Self {
        TaskError::Core(e)
    }
}

impl From<io::Error> for TaskError {
    fn from(e: io::Error) -> Self {
        TaskError::Io(e)
    }
}

impl From<csv::Error> for TaskError {
    fn from(e: csv::Error) -> Self {
        TaskError::Csv(e)
    }
}

impl From<serde_json::Error> for TaskError {
    fn from(e: serde_json::Error) -> Self {
        TaskError::Json(e)
    }
}

/// 17 significant digits, enough to round-trip an `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn out_dir(settings: &Settings) -> io::Result<PathBuf> {
    let dir = settings.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn seed(spec: &ProblemSpec, settings: &Settings, kind: TaskKind) -> u64 {
    settings
        .seed
        .or(spec.task_params(kind).seed)
        .or(spec.sampling.map(|s| s.seed))
        .unwrap_or(DEFAULT_SEED)
}

fn samples(spec: &ProblemSpec, settings: &Settings, kind: TaskKind) -> usize {
    settings
        .samples
        .or(spec.task_params(kind).samples)
        .or(spec.sampling.map(|s| s.count))
        .unwrap_or(DEFAULT_SAMPLES)
}

pub fn report(spec: &ProblemSpec, settings: &Settings, out: &mut dyn Write) -> Result<(), TaskError> {
    let rep = GnsRep64::new(spec.state.clone())?;
    let md = modular_data(&rep)?;
    let unit = spec.entropy_unit;
    let mut delta: Vec<f64> = md.delta_spectrum().iter().copied().collect();
    delta.sort_by(f64::total_cmp);
    let expected: usize = spec.shape.blocks().iter().map(|n| n * n).sum();

    let mut text = String::new();
    text += &format!("shape: {}\n", spec.shape);
    text += &format!("gns_dim: {}\n", rep.dim());
    text += &format!(
        "commutant_dim: {} (sum of n_r^2 = {expected})\n",
        md.commutant_basis.len()
    );
    text += &format!(
        "S(rho_1): {} {}\n",
        fmt_f64(unit.convert(baseline_entropy(&rep))),
        unit.label()
    );
    text += "delta_spectrum:\n";
    for v in &delta {
        text += &format!("  {}\n", fmt_f64(*v));
    }
    out.write_all(text.as_bytes())?;
    if settings.out.is_some() {
        fs::write(out_dir(settings)?.join("report.txt"), &text)?;
    }
    Ok(())
}

/// One orbit row before formatting.
struct OrbitRow {
    seed: Option<u64>,
    lambdas: Vec<f64>,
    entropy: f64,
}

enum Job<'a> {
    Given(&'a Element64),
    Seeded(u64),
}

/// Writes `orbit.csv`: explicit gauges first, then the sampled ones.
pub fn orbit(spec: &ProblemSpec, settings: &Settings, out: &mut dyn Write) -> Result<PathBuf, TaskError> {
    let rep = GnsRep64::new(spec.state.clone())?;
    let unit = spec.entropy_unit;
    let count = samples(spec, settings, TaskKind::Orbit);
    let seeds = crate::spec::sample_seeds(count, seed(spec, settings, TaskKind::Orbit));
    let jobs: Vec<Job> = spec
        .gauges
        .iter()
        .map(Job::Given)
        .chain(seeds.into_iter().map(Job::Seeded))
        .collect();

    // Collected in input order, so the file does not depend on scheduling.
    let rows: Vec<OrbitRow> = jobs
        .into_par_iter()
        .map(|job| {
            let (seed, g) = match job {
                Job::Given(g) => (None, g.clone()),
                Job::Seeded(s) => (Some(s), gns_core::random_unitary(&spec.shape, s)),
            };
            let lambdas: Vec<f64> = gauge_lambdas(&rep, &g)?.into_iter().flatten().collect();
            let entropy = gns_core::entropy::shannon(lambdas.iter().copied());
            Ok(OrbitRow {
                seed,
                lambdas,
                entropy,
            })
        })
        .collect::<Result<_, gns_core::GnsError>>()?;

    let baseline = baseline_entropy(&rep);
    let path = out_dir(settings)?.join("orbit.csv");
    let mut w = csv::Writer::from_path(&path)?;
    let mut header = vec!["sample_index".to_string(), "seed".to_string()];
    for (r, &n) in spec.shape.blocks().iter().enumerate() {
        header.extend((0..n).map(|k| format!("lambda_{r}_{k}")));
    }
    header.extend(["entropy".to_string(), "gap".to_string()]);
    w.write_record(&header)?;
    let mut min_entropy = f64::INFINITY;
    let mut min_gap = f64::INFINITY;
    for (i, row) in rows.iter().enumerate() {
        let entropy = unit.convert(row.entropy);
        let gap = unit.convert(row.entropy - baseline);
        min_entropy = min_entropy.min(entropy);
        min_gap = min_gap.min(gap);
        let mut rec = vec![i.to_string(), row.seed.map(|s| s.to_string()).unwrap_or_default()];
        rec.extend(row.lambdas.iter().map(|&l| fmt_f64(l)));
        rec.extend([fmt_f64(entropy), fmt_f64(gap)]);
        w.write_record(&rec)?;
    }
    w.flush()?;

    writeln!(out, "wrote {} rows to {}", rows.len(), path.display())?;
    writeln!(
        out,
        "S(rho_1): {} {}",
        fmt_f64(unit.convert(baseline)),
        unit.label()
    )?;
    if !rows.is_empty() {
        writeln!(out, "min entropy: {}", fmt_f64(min_entropy))?;
        writeln!(out, "min gap: {}", fmt_f64(min_gap))?;
    }
    Ok(path)
}

#[derive(Serialize)]
struct GaugeDump {
    shape: Vec<usize>,
    entropy: f64,
    baseline: f64,
    entropy_unit: &'static str,
    converged: bool,
    best_start: usize,
    /// Blocks of `g*` in the standard basis, rows of `[re, im]` pairs.
    blocks: Vec<Vec<Vec<[f64; 2]>>>,
}

/// Writes `extremize_trace.csv` and `gstar.json`.
pub fn extremize(spec: &ProblemSpec, settings: &Settings, out: &mut dyn Write) -> Result<PathBuf, TaskError> {
    let rep = GnsRep64::new(spec.state.clone())?;
    let unit = spec.entropy_unit;
    let params = spec.task_params(TaskKind::Extremize);
    let defaults = ExtremizeOptions::default();
    let opts = ExtremizeOptions {
        seed: settings.seed.or(params.seed).unwrap_or(DEFAULT_SEED),
        starts: params.starts.unwrap_or(defaults.starts),
        max_iters: params.max_iters.unwrap_or(defaults.max_iters),
        ..defaults
    };
    let res = extremize_entropy(&rep, &opts)?;
    let dir = out_dir(settings)?;

    let trace_path = dir.join("extremize_trace.csv");
    let mut w = csv::Writer::from_path(&trace_path)?;
    w.write_record(["start", "iteration", "entropy", "grad_norm", "step"])?;
    for row in &res.trace {
        w.write_record([
            row.start.to_string(),
            row.iteration.to_string(),
            fmt_f64(unit.convert(row.entropy)),
            fmt_f64(row.grad_norm),
            fmt_f64(row.step),
        ])?;
    }
    w.flush()?;

    let dump = GaugeDump {
        shape: spec.shape.blocks().to_vec(),
        entropy: unit.convert(res.entropy),
        baseline: unit.convert(res.baseline),
        entropy_unit: unit.label(),
        converged: res.converged,
        best_start: res.best_start,
        blocks: res
            .g
            .blocks()
            .iter()
            .map(|b| {
                (0..b.nrows())
                    .map(|i| (0..b.ncols()).map(|j| [b[(i, j)].re, b[(i, j)].im]).collect())
                    .collect()
            })
            .collect(),
    };
    let g_path = dir.join("gstar.json");
    let mut f = File::create(&g_path)?;
    serde_json::to_writer_pretty(&mut f, &dump)?;
    writeln!(f)?;

    writeln!(out, "S(rho_1): {} {}", fmt_f64(dump.baseline), unit.label())?;
    writeln!(out, "max S(rho_g): {} {}", fmt_f64(dump.entropy), unit.label())?;
    writeln!(out, "converged: {}, best start {}", res.converged, res.best_start)?;
    writeln!(out, "wrote {} and {}", trace_path.display(), g_path.display())?;
    Ok(g_path)
}

/// One named invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// Gauge elements exercised by the operator-level checks.
const VERIFY_GAUGES: usize = 8;

/// Runs the invariant battery on the spec's state and prints one line per
/// check. Returns the checks; the caller decides the exit status.
pub fn verify(spec: &ProblemSpec, settings: &Settings, out: &mut dyn Write) -> Result<Vec<Check>, TaskError> {
    let rep = GnsRep64::new(spec.state.clone())?;
    let md = modular_data(&rep)?;
    let seed = seed(spec, settings, TaskKind::Verify);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let mut push = |name, residual: f64, tolerance| {
        checks.push(Check {
            name,
            residual: if residual.is_nan() {
                f64::INFINITY
            } else {
                residual
            },
            tolerance,
        })
    };

    push("modular axioms", md.axiom_residuals(&rep).max(), 1e-9);
    let expected: usize = spec.shape.blocks().iter().map(|n| n * n).sum();
    push(
        "commutant dimension",
        (md.commutant_basis.len() as f64 - expected as f64).abs(),
        0.0,
    );
    let comm = OperatorSpan::from_orthonormal(md.commutant_basis.clone());
    push(
        "commutant equals J pi(A) J",
        comm.distance(&conjugated_algebra_span(&rep, &md)),
        1e-9,
    );
    push(
        "modular flow",
        check_modular_flow(&md, &rep, &[0.5, 1.0, PI]),
        1e-8,
    );
    push(
        "gauge commutant equals pi(A)",
        verify_gauge_commutant(&rep, &md, 8, seed)?,
        1e-8,
    );

    let orbit_gauges: Vec<Element64> = spec
        .gauges
        .iter()
        .cloned()
        .chain(
            spec.sampled_gauges(samples(spec, settings, TaskKind::Verify), seed)
                .into_iter()
                .map(|(_, g)| g),
        )
        .collect();
    let baseline = baseline_entropy(&rep);
    let min_gap = orbit_gauges
        .par_iter()
        .map(|g| Ok(gns_core::gauge_entropy(&rep, g)? - baseline))
        .collect::<Result<Vec<f64>, gns_core::GnsError>>()?
        .into_iter()
        .fold(0.0, f64::min);
    push("entropy never decreases", (-min_gap).max(0.0), 1e-9);

    let few: Vec<&Element64> = orbit_gauges
        .iter()
        .take(spec.gauges.len() + VERIFY_GAUGES)
        .collect();
    let omega = gns::projector_onto(rep.omega());
    let (mut restriction, mut identity, mut forms, mut channel): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for g in &few {
        let (rho, _) = rho_g(&rep, &md, g)?;
        restriction = restriction.max(rep.restrict_to_a(&rho)?.distance(rep.state().density())?);
        let observables: Vec<_> = (0..4).map(|_| random_commutant_element(&md, &mut rng)).collect();
        identity = identity.max(commutant_trace_residual(&rep, &md, g, &omega, &observables)?);
        forms = forms.max(entropy_gap(&rep, &md, g)?.discrepancy().unwrap_or(f64::INFINITY));
        let kraus = random_kraus_channel(&rep, &md, 3, &mut rng)?;
        let image = apply_channel(&kraus, &rho)?;
        channel = channel.max(rep.restrict_to_a(&image)?.distance(rep.state().density())?);
    }
    push("measurement preserves state on A", restriction, 1e-9);
    push("commutant trace identity", identity, 1e-9);
    push("gap difference equals relative entropy", forms, 1e-8);
    push("commutant channels preserve state on A", channel, 1e-9);

    if spec.shape.num_blocks() == 1 {
        let model = BipartiteModel::from_rep(&rep)?;
        let samples: Vec<_> = (0..4).map(|_| Element64::random(&spec.shape, &mut rng)).collect();
        let gauges: Vec<Element64> = few.iter().map(|g| (*g).clone()).collect();
        let report = oracle_suite(&model, &rep, &md, &samples, &gauges)?;
        push("bipartite closed forms", report.max_residual(), 1e-9);
    }

    for c in &checks {
        let tag = if c.passed() { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{tag} {:<40} residual {:.3e} (tolerance {:.0e})",
            c.name, c.residual, c.tolerance
        )?;
    }
    Ok(checks)
}

/// Runs one subcommand, returning whether it succeeded.
pub fn run(
    kind: TaskKind,
    spec: &ProblemSpec,
    settings: &Settings,
    out: &mut dyn Write,
) -> Result<bool, TaskError> {
    match kind {
        TaskKind::Report => report(spec, settings, out).map(|_| true),
        TaskKind::Orbit => orbit(spec, settings, out).map(|_| true),
        TaskKind::Extremize => extremize(spec, settings, out).map(|_| true),
        TaskKind::Verify => Ok(verify(spec, settings, out)?.iter().all(Check::passed)),
    }
}

//! Executes a configuration and assembles the run report.

use std::path::{Path, PathBuf};
use std::time::Instant;

use modelset::{IndexedPointSet, Region};
use serde::Serialize;
use serde_json::Value;

use crate::config::{build_scheme, build_window, Arithmetic, Operation, RegionConfig, RunConfig, Verb};
use crate::error::{CliError, Result};
use crate::ingest::ingest;
use crate::ops::{run_op, Env, Model, Parts};
use crate::output::ArtifactDir;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Command-line settings that override the configuration.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed_override: Option<u64>,
    /// Directory of the config file; relative input paths resolve here.
    pub config_dir: PathBuf,
}

#[derive(Clone, Debug, Serialize)]
pub struct OpResult {
    pub op: &'static str,
    pub params: Value,
    pub passed: Option<bool>,
    pub result: Value,
    pub artifacts: Vec<String>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OpTiming {
    pub op: &'static str,
    pub ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub setup_ms: f64,
    pub total_ms: f64,
    pub operations: Vec<OpTiming>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub version: String,
    pub verb: &'static str,
    pub config: RunConfig,
    pub threads: usize,
    pub results: Vec<OpResult>,
    pub timing: Timing,
    pub warnings: Vec<String>,
}

impl RunReport {
    /// Whether every operation with a verdict passed.
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed != Some(false))
    }
}

fn build_model(cfg: &RunConfig, warnings: &mut Vec<String>) -> Result<Option<Model>> {
    let Some(sc) = &cfg.scheme else { return Ok(None) };
    if !sc.internal_dense {
        warnings.push("internal denseness is not asserted (set `internal_dense`); see the `validate` diagnostic".into());
    }
    let model = match sc.arithmetic {
        Arithmetic::Quadratic { .. } => Model::Exact(Parts {
            scheme: build_scheme(sc)?,
            window: cfg.window.as_ref().map(|w| build_window(w, &sc.arithmetic)).transpose()?,
            arithmetic: sc.arithmetic.clone(),
        }),
        Arithmetic::Float { tol } => {
            warnings.push(format!("float arithmetic (tol = {tol:e}): injectivity and boundary tests are advisory"));
            Model::Float(Parts {
                scheme: build_scheme(sc)?,
                window: cfg.window.as_ref().map(|w| build_window(w, &sc.arithmetic)).transpose()?,
                arithmetic: sc.arithmetic.clone(),
            })
        }
    };
    if let Some(w) = &cfg.window {
        let wdim = match w {
            crate::config::WindowConfig::Point => 0,
            crate::config::WindowConfig::Intervals { .. } => 1,
            crate::config::WindowConfig::Polygon { .. } => 2,
        };
        if wdim != sc.m {
            return Err(CliError::Config(format!("a {wdim}-dimensional window for m = {}", sc.m)));
        }
    }
    Ok(Some(model))
}

fn needs_patch(op: &Operation) -> bool {
    !matches!(
        op,
        Operation::Validate | Operation::Separation { .. } | Operation::Singularity { .. } | Operation::Fiber { .. }
    )
}

fn load_patch(cfg: &RunConfig, model: Option<&Model>, config_dir: &Path, warnings: &mut Vec<String>) -> Result<IndexedPointSet> {
    if let Some(input) = &cfg.input {
        let path = config_dir.join(&input.path);
        let got = ingest(&path, input.format, cfg.region.as_ref())?;
        warnings.extend(got.warnings);
        return Ok(got.set);
    }
    let region: Region = cfg
        .region
        .as_ref()
        .ok_or_else(|| CliError::Config("`region` is required".into()))?
        .to_region()?;
    model.ok_or_else(|| CliError::Config("`scheme` is required".into()))?.enumerate(&region)
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Runs the operations of `verb` (all of them for `suite`) and writes
/// `report.json` plus the artifacts into the output directory.
///
/// Outside suite mode the first failing operation aborts the run. In suite
/// mode failures are recorded in the report and every operation also gets
/// its own report under `reports/`.
pub fn run(verb: Verb, mut cfg: RunConfig, opts: &RunOptions) -> Result<RunReport> {
    if let Some(seed) = opts.seed_override {
        cfg.seed = Some(seed);
    }
    cfg.check()?;
    let ops: Vec<Operation> = cfg.operations.iter().filter(|op| verb == Verb::Suite || op.verb() == verb).cloned().collect();
    if ops.is_empty() {
        return Err(CliError::Config(format!("the config lists no operation for `{}`", verb.name())));
    }
    let out_dir = match (&opts.out, &cfg.output) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => opts.config_dir.join(o),
        (None, None) => PathBuf::from("modelset-out"),
    };
    let threads = opts.threads.or(cfg.threads);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let dir = ArtifactDir::new(&out_dir)?;
    let report = pool.install(|| execute(verb, &cfg, &ops, opts, &dir, pool.current_num_threads()))?;
    dir.write_json("report.json", &report)?;
    if verb == Verb::Suite {
        for (i, r) in report.results.iter().enumerate() {
            dir.write_json(&format!("reports/{i:02}-{}.json", r.op), r)?;
        }
    }
    Ok(report)
}

fn execute(
    verb: Verb,
    cfg: &RunConfig,
    ops: &[Operation],
    opts: &RunOptions,
    dir: &ArtifactDir,
    threads: usize,
) -> Result<RunReport> {
    let start = Instant::now();
    let mut warnings = Vec::new();
    let model = build_model(cfg, &mut warnings)?;
    let patch = if ops.iter().any(needs_patch) {
        Some(load_patch(cfg, model.as_ref(), &opts.config_dir, &mut warnings)?)
    } else {
        None
    };
    let boxes = match &patch {
        Some(p) => cfg.van_hove(p.dim())?,
        None => None,
    };
    if let (Some(p), Some(b)) = (&patch, &boxes) {
        if !p.region().covers(&b.largest()) {
            warnings.push(format!(
                "the region {:?} does not cover the largest box {:?}",
                RegionConfig::from_region(p.region()),
                RegionConfig::from_region(&b.largest())
            ));
        }
    }
    let setup_ms = ms(start);
    let env = Env { model: model.as_ref(), patch: patch.as_ref(), boxes: boxes.as_ref(), seed: cfg.seed, dir };
    let mut results = Vec::with_capacity(ops.len());
    let mut timings = Vec::with_capacity(ops.len());
    for op in ops {
        let t = Instant::now();
        let params = serde_json::to_value(op).expect("operation serializes");
        let res = match run_op(&env, op) {
            Ok(o) => OpResult {
                op: op.name(),
                params,
                passed: o.passed,
                result: o.result,
                artifacts: o.artifacts,
                warnings: o.warnings,
                error: None,
            },
            Err(e) if verb == Verb::Suite => OpResult {
                op: op.name(),
                params,
                passed: Some(false),
                result: Value::Null,
                artifacts: vec![],
                warnings: vec![],
                error: Some(e.to_string()),
            },
            Err(e) => return Err(e),
        };
        results.push(res);
        timings.push(OpTiming { op: op.name(), ms: ms(t) });
    }
    Ok(RunReport {
        version: VERSION.to_string(),
        verb: verb.name(),
        config: cfg.clone(),
        threads,
        results,
        timing: Timing { setup_ms, total_ms: ms(start), operations: timings },
        warnings,
    })
}

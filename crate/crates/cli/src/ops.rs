//! One function per configured operation.

use std::collections::BTreeSet;

use modelset::autocorr::eta_table_filtered;
use modelset::meyer::MeyerContext;
use modelset::pointset::{covering_radius, flc_clusters, packing_radius, period_candidates};
use modelset::torus::{continuity_epsilon, window_hausdorff};
use modelset::{
    almost_periods, diffraction_table, eta_table, fiber_enumerate, m1_cover, reconstruct_window, separation_fraction,
    singularity_test, stepping_certificate, AutocorrelationTable, IndexedPointSet, LatticeScheme, QuadSurd, Region,
    Scalar, SetPoint, TorusPoint, VanHove, WindowSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{window_to_config, Arithmetic, Endpoint, EntryScalar, Operation, PointFormat, RegionConfig, TorusSpec};
use crate::error::{CliError, Result};
use crate::output::{fmt_f64, gap_chart, point_table, stem_plot, window_overlay, ArtifactDir};

pub struct Parts<T> {
    pub scheme: LatticeScheme<T>,
    pub window: Option<WindowSpec<T>>,
    pub arithmetic: Arithmetic,
}

pub enum Model {
    Exact(Parts<QuadSurd>),
    Float(Parts<f64>),
}

macro_rules! with_model {
    ($model:expr, $p:ident => $body:expr) => {
        match $model {
            Model::Exact($p) => $body,
            Model::Float($p) => $body,
        }
    };
}

impl Model {
    pub fn d(&self) -> usize {
        with_model!(self, p => p.scheme.d())
    }

    pub fn m(&self) -> usize {
        with_model!(self, p => p.scheme.m())
    }

    pub fn window_f64(&self) -> Option<WindowSpec<f64>> {
        with_model!(self, p => p.window.as_ref().map(|w| w.to_f64()))
    }

    pub fn enumerate(&self, region: &Region) -> Result<IndexedPointSet> {
        with_model!(self, p => {
            let w = p.window.as_ref().ok_or_else(|| CliError::Config("a window is required to generate a patch".into()))?;
            p.scheme.enumerate_cut(w, region).map_err(|e| CliError::module("enumerating the cut", e))
        })
    }
}

/// Everything an operation may read.
pub struct Env<'a> {
    pub model: Option<&'a Model>,
    pub patch: Option<&'a IndexedPointSet>,
    pub boxes: Option<&'a VanHove>,
    pub seed: Option<u64>,
    pub dir: &'a ArtifactDir,
}

#[derive(Default)]
pub struct Outcome {
    pub result: Value,
    pub passed: Option<bool>,
    pub artifacts: Vec<String>,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn new(result: Value) -> Self {
        Outcome { result, ..Default::default() }
    }
}

impl Env<'_> {
    fn patch(&self) -> Result<&IndexedPointSet> {
        self.patch.ok_or_else(|| CliError::Config("operation needs a point set".into()))
    }

    fn model(&self) -> Result<&Model> {
        self.model.ok_or_else(|| CliError::module("operation", modelset::Error::NotSchemeBacked))
    }

    fn boxes(&self, op: &str) -> Result<&VanHove> {
        self.boxes.ok_or_else(|| CliError::Config(format!("`boxes` is required for {op}")))
    }

    fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| CliError::Config("a seed is required".into()))
    }
}

fn ctx(what: &'static str) -> impl Fn(modelset::Error) -> CliError {
    move |e| CliError::module(what, e)
}

fn region_json(r: &Region) -> Value {
    json!(RegionConfig::from_region(r))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn coords(p: &SetPoint, d: usize) -> Vec<f64> {
    p.physical(d).to_vec()
}

pub fn run_op(env: &Env, op: &Operation) -> Result<Outcome> {
    match op {
        Operation::Generate { format } => generate(env, *format),
        Operation::ModelDensity { tolerance } => {
            let p = env.patch()?;
            with_model!(env.model()?, m => model_density(m, p, *tolerance))
        }
        Operation::Validate => with_model!(env.model()?, m => validate(m)),
        Operation::Analyze { cluster_radius, period_radius } => analyze(env.patch()?, *cluster_radius, *period_radius),
        Operation::Autocorr { radius, min_count } => autocorr(env, *radius, *min_count),
        Operation::AlmostPeriods { radius, fractions, compare_radius, gap_tolerance } => {
            almost_periods_op(env, *radius, fractions, *compare_radius, *gap_tolerance)
        }
        Operation::Diffract { k_max, k_int_max, controls, drift_tolerance, purity_tolerance } => {
            let seed = if *controls > 0 { env.seed()? } else { env.seed.unwrap_or(0) };
            let params = DiffractParams {
                k_max: *k_max,
                k_int_max: k_int_max.unwrap_or(*k_max),
                controls: *controls,
                drift_tolerance: *drift_tolerance,
                purity_tolerance: *purity_tolerance,
                seed,
            };
            with_model!(env.model()?, m => diffract(env, m, &params))
        }
        Operation::Separation { samples, radius, max_singular } => {
            let seed = env.seed()?;
            with_model!(env.model()?, m => separation(m, *samples, *radius, *max_singular, seed))
        }
        Operation::Singularity { point, radius } => with_model!(env.model()?, m => singularity(env, m, point, *radius)),
        Operation::Fiber { point, radius } => with_model!(env.model()?, m => fiber(env, m, point, *radius)),
        Operation::Reconstruct { threshold, tolerance } => reconstruct(env, *threshold, *tolerance),
        Operation::Continuity { radius, ms } => continuity(env, *radius, ms),
        Operation::MeyerCert { pairs, pair_radius, anchors, anchor_radius, cover_radii } => meyer(
            env,
            &MeyerParams {
                pairs: *pairs,
                pair_radius: *pair_radius,
                anchors: *anchors,
                anchor_radius: anchor_radius.unwrap_or(*pair_radius),
                cover_radii,
                seed: env.seed()?,
            },
        ),
    }
}

fn dims(env: &Env, p: &IndexedPointSet) -> (usize, usize) {
    match env.model {
        Some(m) if p.is_scheme_backed() => (m.d() + m.m(), m.m()),
        _ => (p.dim(), 0),
    }
}

fn generate(env: &Env, format: PointFormat) -> Result<Outcome> {
    let p = env.patch()?;
    let (rank, m) = dims(env, p);
    let d = p.dim();
    let name = match format {
        PointFormat::Csv => {
            let (header, rows) = point_table(p, rank, m);
            env.dir.write_csv("points.csv", &header, &rows)?
        }
        PointFormat::Json => {
            let pts = p.points();
            let mut doc = json!({
                "region": RegionConfig::from_region(p.region()),
                "points": pts.iter().map(|x| coords(x, d)).collect::<Vec<_>>(),
            });
            if p.is_scheme_backed() {
                doc["index"] = json!(pts.iter().map(|x| x.index.map(|n| n[..rank].to_vec())).collect::<Vec<_>>());
                doc["star"] = json!(pts.iter().map(|x| x.star[..m].to_vec()).collect::<Vec<_>>());
            }
            env.dir.write_json("points.json", &doc)?
        }
    };
    let mut out = Outcome::new(json!({
        "count": p.len(),
        "region": region_json(p.region()),
        "density": p.len() as f64 / p.region().volume(),
    }));
    out.artifacts.push(name);
    Ok(out)
}

fn model_density<T: Scalar>(parts: &Parts<T>, p: &IndexedPointSet, tolerance: Option<f64>) -> Result<Outcome> {
    let w = parts.window.as_ref().ok_or_else(|| CliError::Config("model_density needs a window".into()))?;
    let s = &parts.scheme;
    let density = s.model_density(w);
    let theory = density.to_f64();
    let empirical = p.len() as f64 / p.region().volume();
    let relative_error = rel(empirical, theory);
    let mut result = json!({
        "density": theory,
        "window_measure": w.measure().to_f64(),
        "covolume": s.covolume().to_f64(),
        "lattice_density": s.lattice_density().to_f64(),
        "count": p.len(),
        "region": region_json(p.region()),
        "empirical_density": empirical,
        "relative_error": relative_error,
    });
    if T::EXACT {
        result["exact"] = json!({
            "density": density.to_string(),
            "window_measure": w.measure().to_string(),
            "covolume": s.covolume().to_string(),
        });
    }
    let mut out = Outcome::new(result);
    out.passed = tolerance.map(|t| relative_error < t);
    Ok(out)
}

fn validate<T: Scalar>(parts: &Parts<T>) -> Result<Outcome> {
    let report = parts.scheme.validate_scheme().map_err(ctx("validating the scheme"))?;
    let mut out = Outcome::new(json!(report));
    if let modelset::cps::Injectivity::Advisory { radius } = report.injectivity {
        out.warnings.push(format!("injectivity is advisory: no violation with |n|∞ ≤ {radius}"));
    }
    if let Some(dd) = &report.denseness {
        if !dd.shrinking {
            out.warnings.push("the star gaps did not shrink with a larger sample; the internal projection may not be dense".into());
        }
    }
    out.passed = Some(true);
    Ok(out)
}

fn analyze(p: &IndexedPointSet, cluster_radius: Option<f64>, period_radius: Option<f64>) -> Result<Outcome> {
    let probe = p
        .region()
        .shrink(p.region().min_side() / 10.0)
        .ok_or_else(|| CliError::Config("region too small to analyze".into()))?;
    let samples = match p.dim() {
        1 => 4096,
        2 => 128,
        _ => 32,
    };
    let mut result = json!({
        "count": p.len(),
        "region": region_json(p.region()),
        "density": p.len() as f64 / p.region().volume(),
        "scheme_backed": p.is_scheme_backed(),
        "packing_radius": packing_radius(p).map_err(ctx("packing radius"))?,
        "covering_radius": covering_radius(p, &probe, samples).map_err(ctx("covering radius"))?,
    });
    if let Some(k) = cluster_radius {
        let census = flc_clusters(p, k).map_err(ctx("cluster census"))?;
        result["clusters"] = json!({ "radius": k, "anchors": census.anchors, "count": census.count() });
    }
    if let Some(r) = period_radius {
        let periods = period_candidates(p, r).map_err(ctx("period search"))?;
        result["periods"] = json!({
            "radius": r,
            "count": periods.periods.len(),
            "generators": periods.generators,
            "rank": periods.rank,
        });
    }
    Ok(Outcome::new(result))
}

fn table_for(env: &Env, radius: f64, min_count: Option<u32>, op: &str) -> Result<AutocorrelationTable> {
    let p = env.patch()?;
    let boxes = env.boxes(op)?;
    match min_count {
        Some(c) => eta_table_filtered(p, radius, boxes, c),
        None => eta_table(p, radius, boxes),
    }
    .map_err(|e| CliError::module("autocorrelation table", e))
}

fn autocorr(env: &Env, radius: f64, min_count: Option<u32>) -> Result<Outcome> {
    let table = table_for(env, radius, min_count, "autocorr")?;
    let d = table.dim();
    let entries: Vec<Value> = table
        .deltas
        .iter()
        .zip(&table.eta)
        .map(|(delta, eta)| json!({ "delta": coords(delta, d), "eta_by_box": eta, "d": table.d_of(delta) }))
        .collect();
    let doc = json!({ "radius": radius, "boxes": table.boxes, "eta0": table.eta0, "entries": entries });
    let mut header: Vec<String> = (0..d).map(|i| format!("delta_{}", ["x", "y", "z"][i])).collect();
    header.extend((0..table.boxes.len()).map(|n| format!("eta_{n}")));
    header.push("d".into());
    let rows: Vec<Vec<String>> = table
        .deltas
        .iter()
        .zip(&table.eta)
        .map(|(delta, eta)| {
            let mut row: Vec<String> = coords(delta, d).into_iter().map(fmt_f64).collect();
            row.extend(eta.iter().map(|v| fmt_f64(*v)));
            row.push(fmt_f64(table.d_of(delta)));
            row
        })
        .collect();
    let mut out = Outcome::new(json!({
        "radius": radius,
        "box_sizes": table.boxes.sizes,
        "deltas": table.len(),
        "eta0": table.eta0,
        "density": table.eta_zero(),
    }));
    out.artifacts.push(env.dir.write_json("autocorr.json", &doc)?);
    out.artifacts.push(env.dir.write_csv("autocorr.csv", &header, &rows)?);
    Ok(out)
}

fn member_gaps(members: &[(SetPoint, f64)], d: usize) -> Vec<Option<f64>> {
    if d == 1 {
        let mut prev: Option<f64> = None;
        members
            .iter()
            .map(|(m, _)| {
                let g = prev.map(|p| m.x[0] - p);
                prev = Some(m.x[0]);
                g
            })
            .collect()
    } else {
        members
            .iter()
            .enumerate()
            .map(|(i, (a, _))| {
                members
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, (b, _))| a.sub(b).norm(d))
                    .min_by(f64::total_cmp)
            })
            .collect()
    }
}

fn almost_periods_op(
    env: &Env,
    radius: f64,
    fractions: &[f64],
    compare_radius: Option<f64>,
    gap_tolerance: Option<f64>,
) -> Result<Outcome> {
    let table = table_for(env, radius, None, "almost_periods")?;
    let d = table.dim();
    let e0 = table.eta_zero();
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    let mut chart = Vec::new();
    let mut all_ok = true;
    for (i, f) in fractions.iter().enumerate() {
        let pe = almost_periods(&table, f * 2.0 * e0).map_err(ctx("almost periods"))?;
        let compare = compare_radius.map(|c| pe.within(c, d).max_gap);
        let stable = compare.map(|c| rel(pe.max_gap, c));
        let nonempty = pe.members.iter().any(|(m, _)| !m.is_zero());
        if let (Some(tol), Some(s)) = (gap_tolerance, stable) {
            all_ok &= nonempty && s <= tol;
        }
        let gaps = member_gaps(&pe.members, d);
        let mut header: Vec<String> = (0..d).map(|i| format!("delta_{}", ["x", "y", "z"][i])).collect();
        header.extend(["d".to_string(), "gap".to_string()]);
        let csv_rows: Vec<Vec<String>> = pe
            .members
            .iter()
            .zip(&gaps)
            .map(|((m, dv), g)| {
                let mut row: Vec<String> = coords(m, d).into_iter().map(fmt_f64).collect();
                row.push(fmt_f64(*dv));
                row.push(g.map(fmt_f64).unwrap_or_default());
                row
            })
            .collect();
        out.artifacts.push(env.dir.write_csv(&format!("almost_periods_{i}.csv"), &header, &csv_rows)?);
        chart.push((*f, pe.max_gap, compare));
        rows.push(json!({
            "fraction": f,
            "epsilon": pe.epsilon,
            "members": pe.members.len(),
            "max_gap": pe.max_gap,
            "compare_radius": compare_radius,
            "compare_max_gap": compare,
            "relative_change": stable,
        }));
    }
    out.artifacts.push(env.dir.write("almost_periods.svg", gap_chart(&chart, "largest gap of P_ε").as_bytes())?);
    out.result = json!({ "radius": radius, "eta0": e0, "thresholds": rows });
    out.passed = gap_tolerance.and(compare_radius).map(|_| all_ok);
    Ok(out)
}

struct DiffractParams {
    k_max: f64,
    k_int_max: f64,
    controls: usize,
    drift_tolerance: Option<f64>,
    purity_tolerance: Option<f64>,
    seed: u64,
}

fn diffract<T: Scalar>(env: &Env, parts: &Parts<T>, q: &DiffractParams) -> Result<Outcome> {
    let p = env.patch()?;
    let boxes = env.boxes("diffract")?;
    let candidates: Vec<Vec<f64>> = parts
        .scheme
        .dual_candidates_with(q.k_max, q.k_int_max)
        .map_err(ctx("dual candidates"))?
        .into_iter()
        .map(|c| c.k)
        .collect();
    let table = diffraction_table(p, &candidates, q.k_max, q.controls, q.seed, boxes)
        .map_err(ctx("diffraction table"))?;
    let last = boxes.len() - 1;
    let drift = table
        .entries
        .iter()
        .filter(|e| e.intensity > 0.0)
        .map(|e| rel(e.amplitude(0).norm_sqr(), e.intensity))
        .fold(0.0, f64::max);
    let purity_ratio = table.purity / table.density;
    let d = p.dim();
    let mut header: Vec<String> = (0..d).map(|i| format!("k_{}", ["x", "y", "z"][i])).collect();
    header.extend(["re", "im", "intensity", "is_control"].map(String::from));
    let mut csv_rows = Vec::new();
    let mut stems = Vec::new();
    for (e, control) in table.entries.iter().map(|e| (e, false)).chain(table.controls.iter().map(|e| (e, true))) {
        let mut row: Vec<String> = e.k.iter().map(|v| fmt_f64(*v)).collect();
        let a = e.amplitudes[last];
        row.extend([fmt_f64(a[0]), fmt_f64(a[1]), fmt_f64(e.intensity), control.to_string()]);
        csv_rows.push(row);
        let x = if d == 1 { e.k[0] } else { e.k.iter().map(|v| v * v).sum::<f64>().sqrt() };
        stems.push((x, e.intensity, control));
    }
    let mut out = Outcome::new(json!({
        "k_max": q.k_max,
        "k_int_max": q.k_int_max,
        "box_sizes": boxes.sizes,
        "peaks": table.entries.len(),
        "controls": table.controls.len(),
        "density": table.density,
        "purity": table.purity,
        "purity_ratio": purity_ratio,
        "max_drift": drift,
        "brightest": table.entries.iter().map(|e| e.intensity).fold(0.0, f64::max),
    }));
    let checks: Vec<bool> = [
        q.drift_tolerance.map(|t| boxes.len() < 2 || drift < t),
        q.purity_tolerance.map(|t| purity_ratio < t),
    ]
    .into_iter()
    .flatten()
    .collect();
    out.passed = (!checks.is_empty()).then(|| checks.iter().all(|c| *c));
    out.artifacts.push(env.dir.write_csv("peaks.csv", &header, &csv_rows)?);
    out.artifacts.push(env.dir.write_json("peaks.json", &table)?);
    let x_label = if d == 1 { "k" } else { "|k|" };
    out.artifacts.push(env.dir.write("diffraction.svg", stem_plot(&stems, "diffraction intensities", x_label).as_bytes())?);
    Ok(out)
}

fn separation<T: Scalar>(parts: &Parts<T>, samples: usize, radius: f64, max_singular: Option<usize>, seed: u64) -> Result<Outcome> {
    let w = parts.window.as_ref().ok_or_else(|| CliError::Config("separation needs a window".into()))?;
    let r = separation_fraction(&parts.scheme, w, samples, seed, radius).map_err(ctx("separation fraction"))?;
    let mut out = Outcome::new(json!({ "radius": radius, "report": r }));
    out.passed = max_singular.map(|m| r.singular <= m);
    Ok(out)
}

fn torus_point<T: EntryScalar>(parts: &Parts<T>, spec: &TorusSpec) -> Result<TorusPoint<T>> {
    let s = &parts.scheme;
    let read = |v: &[crate::config::Entry], n: usize, what: &str| -> Result<Vec<T>> {
        if v.len() != n {
            return Err(CliError::Config(format!("{what} needs {n} coordinates, got {}", v.len())));
        }
        v.iter().map(|e| T::from_entry(e, &parts.arithmetic)).collect()
    };
    match spec {
        TorusSpec::Frac { frac } => Ok(TorusPoint::from_coords(read(frac, s.rank(), "frac")?)),
        TorusSpec::Cut { x, h } => Ok(modelset::beta_of_cut(s, &read(x, s.d(), "x")?, &read(h, s.m(), "h")?)),
        TorusSpec::Hit { index, endpoint, component } => {
            let w = parts.window.as_ref().ok_or_else(|| CliError::Config("a window is required".into()))?;
            if s.m() != 1 || index.len() != s.rank() {
                return Err(CliError::Config("endpoint hits need m = 1 and a full lattice index".into()));
            }
            let c = w
                .components()
                .get(*component)
                .ok_or_else(|| CliError::Config(format!("window has no component {component}")))?;
            let e = match endpoint {
                Endpoint::Lo => c.lo,
                Endpoint::Hi => c.hi,
            };
            let h = e - s.star_map(index)[0];
            Ok(modelset::beta_of_cut(s, &vec![T::zero(); s.d()], &[h]))
        }
    }
}

fn torus_json<T: Scalar>(tp: &TorusPoint<T>) -> Value {
    let mut v = json!({ "frac": tp.to_f64() });
    if T::EXACT {
        v["frac_exact"] = json!(tp.frac().iter().map(|c| c.to_string()).collect::<Vec<_>>());
    }
    v
}

fn singularity<T: EntryScalar>(env: &Env, parts: &Parts<T>, spec: &TorusSpec, radius: f64) -> Result<Outcome> {
    let w = parts.window.as_ref().ok_or_else(|| CliError::Config("singularity needs a window".into()))?;
    let tp = torus_point(parts, spec)?;
    let hits = singularity_test(&parts.scheme, w, &tp, radius).map_err(ctx("singularity test"))?;
    let mut out = Outcome::new(json!({
        "torus_point": torus_json(&tp),
        "radius": radius,
        "singular": !hits.is_empty(),
        "hits": hits,
    }));
    out.artifacts.push(env.dir.write_json("torus_point.json", &torus_json(&tp))?);
    Ok(out)
}

fn fiber<T: EntryScalar>(env: &Env, parts: &Parts<T>, spec: &TorusSpec, radius: f64) -> Result<Outcome> {
    let s = &parts.scheme;
    let w = parts.window.as_ref().ok_or_else(|| CliError::Config("fiber needs a window".into()))?;
    if s.m() > 1 {
        let mut out = Outcome::new(json!({ "skipped": format!("fibers are enumerated only for m = 1 (m = {})", s.m()) }));
        out.warnings.push(format!("unsupported fiber dimension m = {}", s.m()));
        return Ok(out);
    }
    let tp = torus_point(parts, spec)?;
    let report = fiber_enumerate(s, w, &tp, radius).map_err(ctx("fiber enumeration"))?;
    let rank = s.rank();
    let index_set = |set: &IndexedPointSet| -> BTreeSet<Vec<i64>> {
        set.points().iter().filter_map(|p| p.index.map(|n| n[..rank].to_vec())).collect()
    };
    let elements: Vec<BTreeSet<Vec<i64>>> = report.elements.iter().map(index_set).collect();
    let hits: BTreeSet<Vec<i64>> = report.hits.iter().cloned().collect();
    let singular = !hits.is_empty();
    let symdiff: BTreeSet<Vec<i64>> = match elements.as_slice() {
        [a, b] => a.symmetric_difference(b).cloned().collect(),
        _ => BTreeSet::new(),
    };
    let certified = if singular { elements.len() == 2 && symdiff == hits } else { elements.len() == 1 };
    let doc = json!({
        "torus_point": torus_json(&tp),
        "radius": radius,
        "offset": report.offset,
        "singular": singular,
        "elements": elements.iter().map(|e| json!({ "count": e.len(), "indices": e })).collect::<Vec<_>>(),
        "hits": report.hits,
        "lower_hits": report.lower_hits,
        "upper_hits": report.upper_hits,
        "boundary_orbits": report.boundary_orbits,
        "multiple_orbits": report.multiple_orbits,
        "symmetric_difference": { "indices": symdiff, "equals_hits": symdiff == hits },
    });
    let mut out = Outcome::new(json!({
        "torus_point": torus_json(&tp),
        "radius": radius,
        "singular": singular,
        "elements": elements.len(),
        "hits": report.hits.len(),
        "boundary_orbits": report.boundary_orbits,
        "certified": certified,
    }));
    if report.multiple_orbits {
        out.warnings.push(format!(
            "{} boundary points are hit; only the two one-sided limits are listed",
            report.boundary_orbits
        ));
    }
    out.passed = Some(certified);
    out.artifacts.push(env.dir.write_json("fiber.json", &doc)?);
    Ok(out)
}

fn reconstruct(env: &Env, threshold: Option<f64>, tolerance: Option<f64>) -> Result<Outcome> {
    let p = env.patch()?;
    let est = reconstruct_window(p, threshold).map_err(ctx("window reconstruction"))?;
    let truth = env.model.and_then(Model::window_f64);
    let hausdorff = truth
        .as_ref()
        .map(|t| window_hausdorff(&est, t))
        .transpose()
        .map_err(ctx("Hausdorff distance"))?;
    let mut out = Outcome::new(json!({
        "window": window_to_config(&est),
        "measure": est.measure(),
        "hausdorff": hausdorff,
        "region": region_json(p.region()),
    }));
    out.passed = match (tolerance, hausdorff) {
        (Some(t), Some(h)) => Some(h <= t),
        _ => None,
    };
    out.artifacts.push(env.dir.write_json("window_estimate.json", &window_to_config(&est))?);
    out.artifacts.push(env.dir.write("reconstruction.svg", window_overlay(truth.as_ref(), &est, "window reconstruction").as_bytes())?);
    Ok(out)
}

fn continuity(env: &Env, radius: f64, ms: &[f64]) -> Result<Outcome> {
    let table = table_for(env, radius, None, "continuity")?;
    let rows = continuity_epsilon(env.patch()?, &table, ms).map_err(ctx("continuity modulus"))?;
    let positive = rows.iter().all(|r| r.epsilon > 0.0);
    let monotone = rows.windows(2).all(|w| w[1].m < w[0].m || w[1].epsilon <= w[0].epsilon);
    let mut out = Outcome::new(json!({ "radius": radius, "rows": rows, "positive": positive, "non_increasing": monotone }));
    out.passed = Some(positive && monotone);
    Ok(out)
}

struct MeyerParams<'a> {
    pairs: usize,
    pair_radius: f64,
    anchors: usize,
    anchor_radius: f64,
    cover_radii: &'a [f64],
    seed: u64,
}

fn meyer(env: &Env, q: &MeyerParams) -> Result<Outcome> {
    let p = env.patch()?;
    let d = p.dim();
    let ctx_ = MeyerContext::new(p, q.anchors, q.anchor_radius, q.seed).map_err(ctx("Meyer constants"))?;
    let lo = vec![-q.pair_radius; d];
    let hi = vec![q.pair_radius; d];
    let pts: Vec<SetPoint> = p.in_box(&lo, &hi).copied().collect();
    if pts.is_empty() {
        return Err(CliError::Config("no patch points within pair_radius".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(q.seed.wrapping_add(1));
    let mut certs = Vec::with_capacity(q.pairs);
    let mut valid = 0usize;
    let mut max_norm = 0u64;
    for _ in 0..q.pairs {
        let x = pts[rng.gen_range(0..pts.len())];
        let y = pts[rng.gen_range(0..pts.len())];
        let pair = [coords(&x, d), coords(&y, d)];
        match stepping_certificate(&ctx_, &x, &y) {
            Ok(c) => {
                let ok = c.valid();
                valid += ok as usize;
                max_norm = max_norm.max(c.f_norm);
                certs.push(json!({
                    "pair": pair,
                    "verdict": if ok { "valid" } else { "invalid" },
                    "m": c.m,
                    "big_m": c.big_m,
                    "bound": c.bound,
                    "f_norm": c.f_norm,
                    "certificate": c,
                }));
            }
            Err(e) => certs.push(json!({ "pair": pair, "verdict": "failed", "error": e.to_string() })),
        }
    }
    let covers = q
        .cover_radii
        .iter()
        .map(|&r| m1_cover(p, r).map(|c| json!({ "radius": r, "card": c.card() })))
        .collect::<modelset::Result<Vec<_>>>()
        .map_err(ctx("M1 cover"))?;
    let cover_stable = covers.windows(2).all(|w| w[0]["card"] == w[1]["card"]);
    let mut out = Outcome::new(json!({
        "pairs": q.pairs,
        "valid": valid,
        "kappa": ctx_.kappa,
        "m": ctx_.m,
        "big_m": ctx_.big_m,
        "max_f_norm": max_norm,
        "covers": covers,
        "cover_stable": cover_stable,
    }));
    out.passed = Some(valid == q.pairs && cover_stable);
    out.artifacts.push(env.dir.write_json("certificates.json", &certs)?);
    Ok(out)
}

//! Run configuration: the JSON document read by every verb.

use std::path::Path;

use modelset::{
    BoxKind, IntervalComponent, LatticeScheme, QuadSurd, Rational, Region, Scalar, VanHove, WindowShape, WindowSpec,
};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// A number, or a string such as `"1/2+1/2√5"`, `"-sqrt(2)"` or `"0.25"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Number(f64),
    Text(String),
}

impl From<f64> for Entry {
    fn from(v: f64) -> Self {
        Entry::Number(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum Arithmetic {
    Quadratic {
        #[serde(rename = "D")]
        radicand: i64,
    },
    Float {
        #[serde(default = "default_tol")]
        tol: f64,
    },
}

fn default_tol() -> f64 {
    1e-9
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub d: usize,
    pub m: usize,
    /// Rows of the `(d+m) × (d+m)` basis matrix; its columns generate the lattice.
    pub basis: Vec<Vec<Entry>>,
    pub arithmetic: Arithmetic,
    /// Asserts that the internal projection of the lattice is dense.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub internal_dense: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalConfig {
    pub lo: Entry,
    pub hi: Entry,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum WindowConfig {
    Intervals {
        components: Vec<IntervalConfig>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    Polygon {
        vertices: Vec<[Entry; 2]>,
        closed: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    Point,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl RegionConfig {
    pub fn to_region(&self) -> Result<Region> {
        Region::new(self.lo.clone(), self.hi.clone()).map_err(|e| CliError::Config(format!("region: {e}")))
    }

    pub fn from_region(r: &Region) -> Self {
        RegionConfig { lo: r.lo.clone(), hi: r.hi.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxesConfig {
    #[serde(default = "default_box_kind")]
    pub kind: BoxKind,
    pub sizes: Vec<f64>,
}

fn default_box_kind() -> BoxKind {
    BoxKind::Centered
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointFormat {
    Csv,
    Json,
}

impl PointFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(PointFormat::Csv),
            "json" => Some(PointFormat::Json),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    /// Relative paths are resolved against the directory of the config file.
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<PointFormat>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Lo,
    Hi,
}

/// A point of the torus `(ℝ^d × ℝ^m)/𝓛`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum TorusSpec {
    /// Coordinates with respect to the lattice basis, reduced mod 1.
    Frac { frac: Vec<Entry> },
    /// The class of `(x, h)`.
    Cut { x: Vec<Entry>, h: Vec<Entry> },
    /// The class of `(0, e − n⋆)` for a window endpoint `e`, which puts the
    /// lattice point `n` on the boundary.
    Hit {
        index: Vec<i64>,
        endpoint: Endpoint,
        #[serde(default)]
        component: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Operation {
    Generate {
        #[serde(default = "default_format")]
        format: PointFormat,
    },
    ModelDensity {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    Validate,
    Analyze {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cluster_radius: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        period_radius: Option<f64>,
    },
    Autocorr {
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min_count: Option<u32>,
    },
    AlmostPeriods {
        radius: f64,
        /// Thresholds as fractions of `2η(0)`.
        fractions: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        compare_radius: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gap_tolerance: Option<f64>,
    },
    Diffract {
        k_max: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k_int_max: Option<f64>,
        #[serde(default = "default_controls")]
        controls: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        drift_tolerance: Option<f64>,
        /// Bound on control `|c(k)|` as a fraction of the density.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        purity_tolerance: Option<f64>,
    },
    Separation {
        samples: usize,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_singular: Option<usize>,
    },
    Singularity {
        point: TorusSpec,
        radius: f64,
    },
    Fiber {
        point: TorusSpec,
        radius: f64,
    },
    Reconstruct {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        threshold: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    Continuity {
        radius: f64,
        ms: Vec<f64>,
    },
    MeyerCert {
        pairs: usize,
        pair_radius: f64,
        #[serde(default = "default_anchors")]
        anchors: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        anchor_radius: Option<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        cover_radii: Vec<f64>,
    },
}

fn default_format() -> PointFormat {
    PointFormat::Csv
}

fn default_controls() -> usize {
    10
}

fn default_anchors() -> usize {
    200
}

/// The command-line verbs; each selects a family of operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verb {
    Generate,
    Analyze,
    Autocorr,
    AlmostPeriods,
    Diffract,
    Torus,
    Fiber,
    Reconstruct,
    MeyerCert,
    Suite,
}

impl Verb {
    pub fn name(self) -> &'static str {
        match self {
            Verb::Generate => "generate",
            Verb::Analyze => "analyze",
            Verb::Autocorr => "autocorr",
            Verb::AlmostPeriods => "almost-periods",
            Verb::Diffract => "diffract",
            Verb::Torus => "torus",
            Verb::Fiber => "fiber",
            Verb::Reconstruct => "reconstruct",
            Verb::MeyerCert => "meyer-cert",
            Verb::Suite => "suite",
        }
    }
}

impl Operation {
    pub fn name(&self) -> &'static str {
        match self {
            Operation::Generate { .. } => "generate",
            Operation::ModelDensity { .. } => "model_density",
            Operation::Validate => "validate",
            Operation::Analyze { .. } => "analyze",
            Operation::Autocorr { .. } => "autocorr",
            Operation::AlmostPeriods { .. } => "almost_periods",
            Operation::Diffract { .. } => "diffract",
            Operation::Separation { .. } => "separation",
            Operation::Singularity { .. } => "singularity",
            Operation::Fiber { .. } => "fiber",
            Operation::Reconstruct { .. } => "reconstruct",
            Operation::Continuity { .. } => "continuity",
            Operation::MeyerCert { .. } => "meyer_cert",
        }
    }

    pub fn verb(&self) -> Verb {
        match self {
            Operation::Generate { .. } | Operation::ModelDensity { .. } => Verb::Generate,
            Operation::Validate | Operation::Analyze { .. } => Verb::Analyze,
            Operation::Autocorr { .. } => Verb::Autocorr,
            Operation::AlmostPeriods { .. } => Verb::AlmostPeriods,
            Operation::Diffract { .. } => Verb::Diffract,
            Operation::Separation { .. } | Operation::Singularity { .. } | Operation::Continuity { .. } => Verb::Torus,
            Operation::Fiber { .. } => Verb::Fiber,
            Operation::Reconstruct { .. } => Verb::Reconstruct,
            Operation::MeyerCert { .. } => Verb::MeyerCert,
        }
    }

    /// Whether the operation draws random samples and so needs a seed.
    pub fn samples(&self) -> bool {
        match self {
            Operation::Diffract { controls, .. } => *controls > 0,
            Operation::Separation { .. } | Operation::MeyerCert { .. } => true,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boxes: Option<BoxesConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Output directory; artifact paths in the report are relative to it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub operations: Vec<Operation>,
}

impl RunConfig {
    /// Parses without the semantic checks, so a seed can still be supplied
    /// from the command line.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg = Self::parse(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Structural checks beyond the JSON shape.
    pub fn check(&self) -> Result<()> {
        if self.operations.is_empty() {
            return Err(CliError::Config("no operations listed".into()));
        }
        if self.seed.is_none() {
            if let Some(op) = self.operations.iter().find(|op| op.samples()) {
                return Err(CliError::Config(format!("operation `{}` samples randomly and needs a seed", op.name())));
            }
        }
        if self.scheme.is_none() && self.input.is_none() {
            return Err(CliError::Config("either `scheme` or `input` is required".into()));
        }
        if self.scheme.is_some() && self.input.is_none() && (self.window.is_none() || self.region.is_none()) {
            let needs_patch = self
                .operations
                .iter()
                .any(|op| !matches!(op, Operation::Validate | Operation::Separation { .. } | Operation::Singularity { .. } | Operation::Fiber { .. }));
            if needs_patch {
                return Err(CliError::Config("generating a patch needs `window` and `region`".into()));
            }
        }
        if let Some(s) = &self.scheme {
            let n = s.d + s.m;
            if s.d == 0 || s.d > 3 || s.m > 3 {
                return Err(CliError::Config(format!("unsupported dimensions d = {}, m = {}", s.d, s.m)));
            }
            if s.basis.len() != n || s.basis.iter().any(|r| r.len() != n) {
                return Err(CliError::Config(format!("basis must be {n} × {n}")));
            }
            if let Arithmetic::Quadratic { radicand } = s.arithmetic {
                if !square_free(radicand) {
                    return Err(CliError::Config(format!("D = {radicand} is not a square-free integer > 1")));
                }
            }
        }
        if let Some(b) = &self.boxes {
            if b.sizes.is_empty() || b.sizes.len() > modelset::autocorr::MAX_BOXES {
                return Err(CliError::Config(format!(
                    "boxes: between 1 and {} sizes are supported",
                    modelset::autocorr::MAX_BOXES
                )));
            }
        }
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(CliError::Config("threads must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn van_hove(&self, dim: usize) -> Result<Option<VanHove>> {
        self.boxes
            .as_ref()
            .map(|b| VanHove::new(b.kind, b.sizes.clone(), dim).map_err(|e| CliError::Config(format!("boxes: {e}"))))
            .transpose()
    }
}

fn square_free(d: i64) -> bool {
    d >= 2 && (2..).take_while(|p| p * p <= d).all(|p| d % (p * p) != 0)
}

fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let bad = || format!("cannot read `{s}` as a rational number");
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_rational(p)?;
        let q = parse_rational(q)?;
        if q.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(p / q);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if frac.len() > 18 {
        return Err(format!("too many decimals in `{s}`"));
    }
    let digits: i128 = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let v = Rational::new(digits, 10i128.pow(frac.len() as u32));
    Ok(if neg { -v } else { v })
}

/// Reads `a + b√D` from text; returns `(a, b, D)` with `D = 0` when `b = 0`.
pub fn parse_surd(text: &str) -> std::result::Result<(Rational, Rational, i64), String> {
    let s: String = text
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '*')
        .collect::<String>()
        .replace("sqrt(", "√");
    let mut s = s;
    while let Some(i) = s.find(')') {
        // only closing brackets of sqrt( are allowed
        if !s[..i].ends_with(|c: char| c.is_ascii_digit()) || !s[..i].contains('√') {
            return Err(format!("unexpected `)` in `{text}`"));
        }
        s.remove(i);
    }
    if s.is_empty() || s.contains('(') {
        return Err(format!("cannot read `{text}`"));
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, c) in s.char_indices() {
        if i > 0 && (c == '+' || c == '-') && !s[..i].ends_with('/') {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    let mut a = Rational::zero();
    let mut b = Rational::zero();
    let mut radicand = 0i64;
    for term in terms {
        match term.split_once('√') {
            None => a += parse_rational(term)?,
            Some((coef, rad)) => {
                let coef = match coef {
                    "" | "+" => Rational::one(),
                    "-" => -Rational::one(),
                    c => parse_rational(c)?,
                };
                let (rad, div) = match rad.split_once('/') {
                    Some((r, q)) => (r, parse_rational(q)?),
                    None => (rad, Rational::one()),
                };
                let r: i64 = rad.parse().map_err(|_| format!("bad radicand in `{text}`"))?;
                if !square_free(r) {
                    return Err(format!("radicand {r} in `{text}` is not square-free"));
                }
                if radicand != 0 && radicand != r {
                    return Err(format!("mixed radicands in `{text}`"));
                }
                if div.is_zero() {
                    return Err(format!("zero denominator in `{text}`"));
                }
                radicand = r;
                b += coef / div;
            }
        }
    }
    if b.is_zero() {
        radicand = 0;
    }
    Ok((a, b, radicand))
}

fn ratio_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Scalars that configuration entries can be read into.
pub trait EntryScalar: Scalar {
    fn from_entry(e: &Entry, arithmetic: &Arithmetic) -> Result<Self>;
}

impl EntryScalar for f64 {
    fn from_entry(e: &Entry, _: &Arithmetic) -> Result<Self> {
        match e {
            Entry::Number(v) => Ok(*v),
            Entry::Text(t) => {
                let (a, b, d) = parse_surd(t).map_err(CliError::Config)?;
                Ok(ratio_f64(&a) + ratio_f64(&b) * (d as f64).sqrt())
            }
        }
    }
}

impl EntryScalar for QuadSurd {
    fn from_entry(e: &Entry, arithmetic: &Arithmetic) -> Result<Self> {
        let want = match arithmetic {
            Arithmetic::Quadratic { radicand } => *radicand,
            Arithmetic::Float { .. } => 0,
        };
        match e {
            Entry::Number(v) if v.is_finite() => Ok(<QuadSurd as Scalar>::from_f64(*v)),
            Entry::Number(v) => Err(CliError::Config(format!("non-finite entry {v}"))),
            Entry::Text(t) => {
                let (a, b, d) = parse_surd(t).map_err(CliError::Config)?;
                if d != 0 && d != want {
                    return Err(CliError::Config(format!("entry `{t}` uses √{d} but the scheme field is ℚ(√{want})")));
                }
                Ok(QuadSurd::new(a, b, d.max(want)))
            }
        }
    }
}

/// Builds the lattice scheme; module errors carry context.
pub fn build_scheme<T: EntryScalar>(cfg: &SchemeConfig) -> Result<LatticeScheme<T>> {
    let rows = cfg
        .basis
        .iter()
        .map(|r| r.iter().map(|e| T::from_entry(e, &cfg.arithmetic)).collect::<Result<Vec<T>>>())
        .collect::<Result<Vec<_>>>()?;
    let built = match cfg.arithmetic {
        Arithmetic::Float { tol } => LatticeScheme::with_tol(cfg.d, cfg.m, rows, tol),
        Arithmetic::Quadratic { .. } => LatticeScheme::new(cfg.d, cfg.m, rows),
    };
    built.map_err(|e| CliError::module("scheme", e))
}

pub fn build_window<T: EntryScalar>(cfg: &WindowConfig, arithmetic: &Arithmetic) -> Result<WindowSpec<T>> {
    let default_tol = match arithmetic {
        Arithmetic::Float { tol } => *tol,
        Arithmetic::Quadratic { .. } => 0.0,
    };
    let built = match cfg {
        WindowConfig::Point => Ok(WindowSpec::point()),
        WindowConfig::Intervals { components, tol } => {
            let comps = components
                .iter()
                .map(|c| {
                    Ok(IntervalComponent::new(
                        T::from_entry(&c.lo, arithmetic)?,
                        T::from_entry(&c.hi, arithmetic)?,
                        c.lo_closed,
                        c.hi_closed,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            WindowSpec::intervals(comps, tol.unwrap_or(default_tol))
        }
        WindowConfig::Polygon { vertices, closed, tol } => {
            let verts = vertices
                .iter()
                .map(|[x, y]| Ok([T::from_entry(x, arithmetic)?, T::from_entry(y, arithmetic)?]))
                .collect::<Result<Vec<_>>>()?;
            WindowSpec::polygon(verts, *closed, tol.unwrap_or(default_tol))
        }
    };
    built.map_err(|e| CliError::module("window", e))
}

/// The configuration form of a float window, used for reconstructed windows.
pub fn window_to_config(w: &WindowSpec<f64>) -> WindowConfig {
    match w.shape() {
        WindowShape::Point => WindowConfig::Point,
        WindowShape::Intervals(comps) => WindowConfig::Intervals {
            components: comps
                .iter()
                .map(|c| IntervalConfig { lo: c.lo.into(), hi: c.hi.into(), lo_closed: c.lo_closed, hi_closed: c.hi_closed })
                .collect(),
            tol: None,
        },
        WindowShape::Polygon { vertices, boundary_included } => WindowConfig::Polygon {
            vertices: vertices.iter().map(|v| [v[0].into(), v[1].into()]).collect(),
            closed: *boundary_included,
            tol: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn surd_forms() {
        assert_eq!(parse_surd("1/2+1/2√5").unwrap(), (r(1, 2), r(1, 2), 5));
        assert_eq!(parse_surd("1/2 - 1/2*sqrt(5)").unwrap(), (r(1, 2), r(-1, 2), 5));
        assert_eq!(parse_surd("-√2").unwrap(), (r(0, 1), r(-1, 1), 2));
        assert_eq!(parse_surd("√5/2").unwrap(), (r(0, 1), r(1, 2), 5));
        assert_eq!(parse_surd("0.25").unwrap(), (r(1, 4), r(0, 1), 0));
        assert_eq!(parse_surd("-3/4").unwrap(), (r(-3, 4), r(0, 1), 0));
        assert_eq!(parse_surd("√5-√5").unwrap(), (r(0, 1), r(0, 1), 0));
    }

    #[test]
    fn surd_rejects_garbage() {
        for s in ["", "abc", "1/0", "√4", "√2+√3", "(1+√5)/2", "1..2"] {
            assert!(parse_surd(s).is_err(), "{s}");
        }
    }

    #[test]
    fn exact_entries_check_the_field() {
        let q5 = Arithmetic::Quadratic { radicand: 5 };
        let v = QuadSurd::from_entry(&Entry::Text("1/2+1/2√5".into()), &q5).unwrap();
        assert_eq!(v * v, v + QuadSurd::rational(1, 1));
        assert!(QuadSurd::from_entry(&Entry::Text("√2".into()), &q5).is_err());
        assert_eq!(QuadSurd::from_entry(&Entry::Number(0.5), &q5).unwrap(), QuadSurd::rational(1, 2));
    }

    #[test]
    fn float_entries_evaluate_surds() {
        let f = Arithmetic::Float { tol: 1e-9 };
        let v = f64::from_entry(&Entry::Text("1/2+1/2√5".into()), &f).unwrap();
        assert!((v - 1.618_033_988_749_895).abs() < 1e-15);
    }

    #[test]
    fn missing_seed_is_a_config_error() {
        let text = r#"{"scheme":{"d":1,"m":1,"basis":[[1,1],[1,-1]],"arithmetic":{"mode":"float"}},
            "window":{"type":"intervals","components":[{"lo":0,"hi":1,"lo_closed":true,"hi_closed":false}]},
            "region":{"lo":[-10],"hi":[10]},
            "operations":[{"op":"separation","samples":10,"radius":5}]}"#;
        let err = RunConfig::from_json(text).unwrap_err();
        assert!(matches!(err, CliError::Config(ref m) if m.contains("seed")), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"input":{"path":"a.csv"},"operations":[{"op":"analyze","bogus":1}]}"#;
        assert!(RunConfig::from_json(text).is_err());
    }
}

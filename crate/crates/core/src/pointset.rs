//! Finite patches of point sets and their local diagnostics: discreteness,
//! finite local complexity, repetitivity, patch frequencies, periods and
//! local-topology closeness.
//!
//! Every statistic declares an anchor-eligible core: the patch region shrunk
//! by the radius the statistic looks around each anchor. Anchors outside the
//! core are never used, so no statistic sees the artificial patch edge.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::region::{Region, VanHove};

/// Maximal length of a lattice index vector (`d + m ≤ 6`).
pub const INDEX_DIM: usize = 6;

/// Quantum used to hash float coordinates.
pub const COORD_QUANTUM: f64 = 1e-7;

/// Matching tolerance for float coordinates.
pub const MATCH_TOL: f64 = 1e-7;

pub type Index = [i64; INDEX_DIM];

/// The `f64` shadow of a lattice scheme carried by scheme-backed sets.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeSummary {
    pub d: usize,
    pub m: usize,
    pub basis: Matrix<f64>,
    pub covolume: f64,
}

impl SchemeSummary {
    pub fn index_dim(&self) -> usize {
        self.d + self.m
    }

    /// Physical and internal coordinates of `basis · n`.
    pub fn project(&self, n: &Index) -> ([f64; 3], [f64; 3]) {
        let z = self.basis.mul_int(&n[..self.index_dim()]);
        let mut x = [0.0; 3];
        let mut s = [0.0; 3];
        x[..self.d].copy_from_slice(&z[..self.d]);
        s[..self.m].copy_from_slice(&z[self.d..]);
        (x, s)
    }

    pub fn point(&self, n: &Index) -> SetPoint {
        let (x, star) = self.project(n);
        SetPoint { x, star, index: Some(*n) }
    }
}

/// Pads a short index slice into an [`Index`].
pub fn pad_index(n: &[i64]) -> Index {
    let mut out = [0; INDEX_DIM];
    out[..n.len()].copy_from_slice(n);
    out
}

/// Hash key of a point or translation vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointKey {
    Index(Index),
    Coord([i64; 3]),
}

/// A point of a patch, or a translation vector between two such points.
///
/// Raw (ingested) points have no index and zero star coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetPoint {
    pub x: [f64; 3],
    pub star: [f64; 3],
    pub index: Option<Index>,
}

fn quantize(v: f64, q: f64) -> i64 {
    (v / q).round() as i64
}

impl SetPoint {
    pub fn raw(x: &[f64]) -> Self {
        let mut p = [0.0; 3];
        p[..x.len()].copy_from_slice(x);
        SetPoint { x: p, star: [0.0; 3], index: None }
    }

    /// The zero vector, carrying the zero index when `indexed`.
    pub fn zero(indexed: bool) -> Self {
        SetPoint { x: [0.0; 3], star: [0.0; 3], index: indexed.then_some([0; INDEX_DIM]) }
    }

    pub fn physical(&self, d: usize) -> &[f64] {
        &self.x[..d]
    }

    pub fn is_zero(&self) -> bool {
        match self.index {
            Some(n) => n.iter().all(|&v| v == 0),
            None => self.x.iter().all(|&v| v == 0.0),
        }
    }

    fn combine(&self, o: &SetPoint, sign: f64) -> SetPoint {
        let mut x = self.x;
        let mut star = self.star;
        for k in 0..3 {
            x[k] += sign * o.x[k];
            star[k] += sign * o.star[k];
        }
        let index = match (self.index, o.index) {
            (Some(a), Some(b)) => {
                let mut n = a;
                for k in 0..INDEX_DIM {
                    n[k] += sign as i64 * b[k];
                }
                Some(n)
            }
            _ => None,
        };
        SetPoint { x, star, index }
    }

    pub fn add(&self, o: &SetPoint) -> SetPoint {
        self.combine(o, 1.0)
    }

    pub fn sub(&self, o: &SetPoint) -> SetPoint {
        self.combine(o, -1.0)
    }

    pub fn neg(&self) -> SetPoint {
        SetPoint::zero(self.index.is_some()).sub(self)
    }

    pub fn norm(&self, d: usize) -> f64 {
        self.x[..d].iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn sup_norm(&self, d: usize) -> f64 {
        self.x[..d].iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Exact index key when available and `quantum` is `None`, otherwise
    /// the quantized physical coordinates.
    pub fn key(&self, d: usize, quantum: Option<f64>) -> PointKey {
        match (self.index, quantum) {
            (Some(n), None) => PointKey::Index(n),
            _ => {
                let q = quantum.unwrap_or(COORD_QUANTUM);
                let mut c = [0; 3];
                for k in 0..d {
                    c[k] = quantize(self.x[k], q);
                }
                PointKey::Coord(c)
            }
        }
    }

    fn cmp_x(&self, o: &SetPoint, d: usize) -> Ordering {
        for k in 0..d {
            match self.x[k].total_cmp(&o.x[k]) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        self.index.cmp(&o.index)
    }
}

/// A finite patch, exhaustive on `region`.
#[derive(Clone, Debug)]
pub struct IndexedPointSet {
    dim: usize,
    points: Vec<SetPoint>,
    region: Region,
    scheme: Option<Arc<SchemeSummary>>,
    lookup: OnceLock<FxHashMap<Index, usize>>,
}

impl PartialEq for IndexedPointSet {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.region == other.region && self.points == other.points
    }
}

impl IndexedPointSet {
    /// A raw point cloud. Points must lie in `region` and be distinct.
    pub fn from_raw(points: Vec<Vec<f64>>, region: Region) -> Result<Self> {
        let dim = region.dim();
        let mut pts = Vec::with_capacity(points.len());
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "point {p:?} in a {dim}-dimensional region"
                )));
            }
            if !region.contains(p) {
                return Err(Error::RegionTooSmall(format!("point {p:?} lies outside the region")));
            }
            pts.push(SetPoint::raw(p));
        }
        pts.sort_by(|a, b| a.cmp_x(b, dim));
        if let Some(w) = pts.windows(2).find(|w| w[0].x == w[1].x) {
            return Err(Error::DuplicatePoint(w[0].physical(dim).to_vec()));
        }
        Ok(Self::from_sorted(dim, pts, region, None))
    }

    /// A scheme-backed patch; points are sorted here.
    pub fn from_lattice(scheme: Arc<SchemeSummary>, mut points: Vec<SetPoint>, region: Region) -> Self {
        let dim = scheme.d;
        points.sort_by(|a, b| a.cmp_x(b, dim));
        Self::from_sorted(dim, points, region, Some(scheme))
    }

    fn from_sorted(dim: usize, points: Vec<SetPoint>, region: Region, scheme: Option<Arc<SchemeSummary>>) -> Self {
        IndexedPointSet { dim, points, region, scheme, lookup: OnceLock::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[SetPoint] {
        &self.points
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn scheme(&self) -> Option<&Arc<SchemeSummary>> {
        self.scheme.as_ref()
    }

    pub fn is_scheme_backed(&self) -> bool {
        self.scheme.is_some()
    }

    pub fn positions(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.physical(self.dim).to_vec()).collect()
    }

    /// Zero vector of the right flavour for this set.
    pub fn zero_vector(&self) -> SetPoint {
        SetPoint::zero(self.is_scheme_backed())
    }

    fn index_map(&self) -> &FxHashMap<Index, usize> {
        self.lookup.get_or_init(|| {
            self.points
                .iter()
                .enumerate()
                .filter_map(|(i, p)| p.index.map(|n| (n, i)))
                .collect()
        })
    }

    /// Index range of points whose first coordinate lies in `[lo, hi]`.
    fn first_coord_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let start = self.points.partition_point(|p| p.x[0] < lo);
        let end = self.points.partition_point(|p| p.x[0] <= hi);
        start..end.max(start)
    }

    /// Position of the point at `x` (within [`MATCH_TOL`]).
    pub fn find_x(&self, x: &[f64]) -> Option<usize> {
        let r = self.first_coord_range(x[0] - MATCH_TOL, x[0] + MATCH_TOL);
        r.into_iter()
            .find(|&i| (0..self.dim).all(|k| (self.points[i].x[k] - x[k]).abs() <= MATCH_TOL))
    }

    pub fn contains_x(&self, x: &[f64]) -> bool {
        self.find_x(x).is_some()
    }

    /// Membership by exact index when both sides carry one, by coordinates
    /// otherwise.
    pub fn contains(&self, p: &SetPoint) -> bool {
        match (p.index, self.is_scheme_backed()) {
            (Some(n), true) => self.index_map().contains_key(&n),
            _ => self.contains_x(p.physical(self.dim)),
        }
    }

    pub fn position_of(&self, p: &SetPoint) -> Option<usize> {
        match (p.index, self.is_scheme_backed()) {
            (Some(n), true) => self.index_map().get(&n).copied(),
            _ => self.find_x(p.physical(self.dim)),
        }
    }

    /// Points in the closed box `[lo, hi]`.
    pub fn in_box<'a>(&'a self, lo: &'a [f64], hi: &'a [f64]) -> impl Iterator<Item = &'a SetPoint> + 'a {
        let r = self.first_coord_range(lo[0], hi[0]);
        let d = self.dim;
        self.points[r]
            .iter()
            .filter(move |p| (1..d).all(|k| lo[k] <= p.x[k] && p.x[k] <= hi[k]))
    }

    /// Points inside the half-open region.
    pub fn in_region<'a>(&'a self, region: &'a Region) -> impl Iterator<Item = &'a SetPoint> + 'a {
        let r = self.first_coord_range(region.lo[0], region.hi[0]);
        self.points[r].iter().filter(move |p| region.contains(p.physical(self.dim)))
    }

    /// Points within Euclidean distance `r` of `center`.
    pub fn in_ball<'a>(&'a self, center: &[f64], r: f64) -> impl Iterator<Item = &'a SetPoint> + 'a {
        let c: Vec<f64> = center.to_vec();
        let lo: Vec<f64> = c.iter().map(|v| v - r).collect();
        let hi: Vec<f64> = c.iter().map(|v| v + r).collect();
        let range = self.first_coord_range(lo[0], hi[0]);
        let d = self.dim;
        self.points[range].iter().filter(move |p| {
            let dist2: f64 = (0..d).map(|k| (p.x[k] - c[k]).powi(2)).sum();
            dist2 <= r * r * (1.0 + 1e-12) + 1e-18
        })
    }

    /// Nearest point to `x`; ties go to the first point in sorted order.
    pub fn nearest(&self, x: &[f64]) -> Option<&SetPoint> {
        if self.points.is_empty() {
            return None;
        }
        let d = self.dim;
        let dist = |p: &SetPoint| (0..d).map(|k| (p.x[k] - x[k]).powi(2)).sum::<f64>().sqrt();
        let start = self.points.partition_point(|p| p.x[0] < x[0]);
        let mut best: Option<(f64, usize)> = None;
        let consider = |i: usize, best: &mut Option<(f64, usize)>| {
            let dd = dist(&self.points[i]);
            match best {
                Some((bd, bi)) if dd > *bd || (dd == *bd && i > *bi) => {}
                _ => *best = Some((dd, i)),
            }
        };
        for i in start..self.points.len() {
            if let Some((bd, _)) = best {
                if self.points[i].x[0] - x[0] > bd {
                    break;
                }
            }
            consider(i, &mut best);
        }
        for i in (0..start).rev() {
            if let Some((bd, _)) = best {
                if x[0] - self.points[i].x[0] > bd {
                    break;
                }
            }
            consider(i, &mut best);
        }
        best.map(|(_, i)| &self.points[i])
    }

    /// `t + P`, with the region translated too.
    pub fn translate(&self, t: &SetPoint) -> Self {
        let keep_index = self.is_scheme_backed() && t.index.is_some();
        let points: Vec<SetPoint> = self
            .points
            .iter()
            .map(|p| {
                let mut q = p.add(t);
                if !keep_index {
                    q.index = None;
                    q.star = [0.0; 3];
                }
                q
            })
            .collect();
        let region = self.region.translate(t.physical(self.dim));
        let scheme = if keep_index { self.scheme.clone() } else { None };
        Self::from_sorted(self.dim, points, region, scheme)
    }

    /// `−P`, with the region reflected.
    pub fn reflect(&self) -> Self {
        let mut points: Vec<SetPoint> = self.points.iter().map(SetPoint::neg).collect();
        points.sort_by(|a, b| a.cmp_x(b, self.dim));
        let region = Region {
            lo: self.region.hi.iter().map(|v| -v).collect(),
            hi: self.region.lo.iter().map(|v| -v).collect(),
        };
        Self::from_sorted(self.dim, points, region, self.scheme.clone())
    }

    /// The sub-patch on a smaller region.
    pub fn restrict(&self, region: &Region) -> Result<Self> {
        if !self.region.covers(region) {
            return Err(Error::RegionTooSmall(format!(
                "restriction {region:?} leaves the patch region {:?}",
                self.region
            )));
        }
        let points: Vec<SetPoint> = self.in_region(region).copied().collect();
        Ok(Self::from_sorted(self.dim, points, region.clone(), self.scheme.clone()))
    }

    /// Drops the scheme backing, keeping physical coordinates only.
    pub fn to_raw(&self) -> Self {
        let points = self.points.iter().map(|p| SetPoint::raw(p.physical(self.dim))).collect();
        Self::from_sorted(self.dim, points, self.region.clone(), None)
    }

    /// Adds a point (used to build defect fixtures). The point keeps no index.
    pub fn with_inserted(&self, x: &[f64]) -> Result<Self> {
        if self.contains_x(x) {
            return Err(Error::DuplicatePoint(x.to_vec()));
        }
        let mut points = self.points.clone();
        points.push(SetPoint::raw(x));
        points.sort_by(|a, b| a.cmp_x(b, self.dim));
        Ok(Self::from_sorted(self.dim, points, self.region.clone(), None))
    }

    fn core(&self, r: f64) -> Result<Region> {
        self.region.shrink(r).ok_or_else(|| {
            Error::RegionTooSmall(format!("region {:?} has no core at radius {r}", self.region))
        })
    }
}

fn chunked<T: Sync, R: Send>(items: &[T], f: impl Fn(&[T]) -> R + Sync + Send) -> Vec<R> {
    const CHUNK: usize = 256;
    items.par_chunks(CHUNK).map(f).collect()
}

/// `Δ ∩ B_R` observed from anchors at least `R` inside the region, closed
/// under negation and sorted.
pub fn difference_set(p: &IndexedPointSet, r: f64) -> Result<IndexedPointSet> {
    let core = p.core(r)?;
    let d = p.dim;
    let anchors: Vec<SetPoint> = p.in_region(&core).copied().collect();
    let partial = chunked(&anchors, |chunk| {
        let mut local: FxHashMap<PointKey, SetPoint> = FxHashMap::default();
        for a in chunk {
            for y in p.in_ball(a.physical(d), r) {
                let delta = y.sub(a);
                local.entry(delta.key(d, None)).or_insert(delta);
                let neg = delta.neg();
                local.entry(neg.key(d, None)).or_insert(neg);
            }
        }
        local
    });
    let mut all: BTreeMap<PointKey, SetPoint> = BTreeMap::new();
    for m in partial {
        for (k, v) in m {
            all.entry(k).or_insert(v);
        }
    }
    let pad = r * 1e-12 + 1e-9;
    let region = Region { lo: vec![-r - pad; d], hi: vec![r + pad; d] };
    let points: Vec<SetPoint> = all.into_values().collect();
    Ok(match &p.scheme {
        Some(s) => IndexedPointSet::from_lattice(s.clone(), points, region),
        None => {
            let mut pts = points;
            pts.sort_by(|a, b| a.cmp_x(b, d));
            IndexedPointSet::from_sorted(d, pts, region, None)
        }
    })
}

/// Half the minimal pairwise distance.
pub fn packing_radius(p: &IndexedPointSet) -> Result<f64> {
    if p.len() < 2 {
        return Err(Error::Undefined("packing radius of fewer than two points"));
    }
    let d = p.dim;
    let pts = &p.points;
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[j].x[0] - pts[i].x[0] >= best {
                break;
            }
            best = best.min(pts[j].sub(&pts[i]).norm(d));
        }
    }
    Ok(best / 2.0)
}

/// Largest gap between consecutive sorted values.
pub fn max_consecutive_gap(values: &[f64]) -> f64 {
    values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// Largest distance from a grid sample of `region` to the nearest point:
/// a lower estimate of the covering radius on that region. In one
/// dimension the value is exact: half the largest gap straddling the region.
pub fn covering_radius(p: &IndexedPointSet, region: &Region, samples_per_axis: usize) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::Undefined("covering radius of an empty set"));
    }
    let d = p.dim;
    if d == 1 {
        let (lo, hi) = (region.lo[0], region.hi[0]);
        let xs: Vec<f64> = p.points.iter().map(|q| q.x[0]).collect();
        let first = xs.partition_point(|&v| v < lo);
        let last = xs.partition_point(|&v| v <= hi);
        let from = first.saturating_sub(1);
        let to = (last + 1).min(xs.len());
        let slice = &xs[from..to];
        if slice.is_empty() {
            return Ok(f64::INFINITY);
        }
        let mut best = max_consecutive_gap(slice) / 2.0;
        if slice[0] > lo {
            best = best.max(slice[0] - lo);
        }
        if slice[slice.len() - 1] < hi {
            best = best.max(hi - slice[slice.len() - 1]);
        }
        return Ok(best);
    }
    let n = samples_per_axis.max(2);
    let total = n.pow(d as u32);
    let best = (0..total)
        .into_par_iter()
        .map(|mut code| {
            let mut x = vec![0.0; d];
            for k in 0..d {
                let i = code % n;
                code /= n;
                x[k] = region.lo[k] + (region.hi[k] - region.lo[k]) * i as f64 / (n - 1) as f64;
            }
            let q = p.nearest(&x).expect("nonempty");
            (0..d).map(|k| (q.x[k] - x[k]).powi(2)).sum::<f64>().sqrt()
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// One cluster class `(−x + Λ) ∩ [−K, K]^d` and how many anchors show it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cluster {
    pub offsets: Vec<Vec<f64>>,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterCensus {
    pub radius: f64,
    pub anchors: usize,
    pub clusters: Vec<Cluster>,
}

impl ClusterCensus {
    pub fn count(&self) -> usize {
        self.clusters.len()
    }
}

fn cluster_key(p: &IndexedPointSet, anchor: &SetPoint, k: f64, quantum: Option<f64>) -> (Vec<PointKey>, Vec<SetPoint>) {
    let d = p.dim;
    let lo: Vec<f64> = anchor.physical(d).iter().map(|v| v - k).collect();
    let hi: Vec<f64> = anchor.physical(d).iter().map(|v| v + k).collect();
    let mut offsets: Vec<SetPoint> = p.in_box(&lo, &hi).map(|y| y.sub(anchor)).collect();
    let exact = quantum.is_none() && p.is_scheme_backed() && anchor.index.is_some();
    let q = if exact { None } else { Some(quantum.unwrap_or(COORD_QUANTUM)) };
    offsets.sort_by(|a, b| a.cmp_x(b, d));
    (offsets.iter().map(|o| o.key(d, q)).collect(), offsets)
}

/// Distinct clusters at radius `K` with multiplicities, using exact index
/// keys for scheme-backed sets.
pub fn flc_clusters(p: &IndexedPointSet, k: f64) -> Result<ClusterCensus> {
    flc_clusters_quantized(p, k, None)
}

/// As [`flc_clusters`], hashing physical coordinates at `quantum` when given.
pub fn flc_clusters_quantized(p: &IndexedPointSet, k: f64, quantum: Option<f64>) -> Result<ClusterCensus> {
    let core = p.core(k)?;
    let anchors: Vec<SetPoint> = p.in_region(&core).copied().collect();
    let partial = chunked(&anchors, |chunk| {
        let mut local: BTreeMap<Vec<PointKey>, (usize, Vec<SetPoint>)> = BTreeMap::new();
        for a in chunk {
            let (key, offs) = cluster_key(p, a, k, quantum);
            local.entry(key).or_insert((0, offs)).0 += 1;
        }
        local
    });
    let mut all: BTreeMap<Vec<PointKey>, (usize, Vec<SetPoint>)> = BTreeMap::new();
    for m in partial {
        for (key, (c, offs)) in m {
            all.entry(key).or_insert((0, offs)).0 += c;
        }
    }
    let d = p.dim;
    let clusters = all
        .into_values()
        .map(|(multiplicity, offs)| Cluster {
            offsets: offs.iter().map(|o| o.physical(d).to_vec()).collect(),
            multiplicity,
        })
        .collect();
    Ok(ClusterCensus { radius: k, anchors: anchors.len(), clusters })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepetitionReport {
    pub radius: f64,
    /// Translations `t` with `(−t + Λ) ∩ [−K, K]^d = Λ ∩ [−K, K]^d`, sorted.
    pub matches: Vec<SetPoint>,
    /// Largest gap between consecutive matches (1D) or the covering radius
    /// of the matches over the core (higher dimensions).
    pub max_gap: f64,
}

/// Occurrences of the reference cluster at the origin.
pub fn repetition_set(p: &IndexedPointSet, k: f64) -> Result<RepetitionReport> {
    let d = p.dim;
    let core = p.core(k)?;
    let origin = p.zero_vector();
    if !core.contains(origin.physical(d)) {
        return Err(Error::RegionTooSmall("origin is not inside the anchor core".into()));
    }
    let (reference, ref_offsets) = cluster_key(p, &origin, k, None);
    let Some(c0) = ref_offsets.first().copied() else {
        return Err(Error::Undefined("empty reference cluster"));
    };
    let candidates: Vec<SetPoint> = p
        .points
        .iter()
        .map(|y| y.sub(&c0))
        .filter(|t| core.contains(t.physical(d)))
        .collect();
    let hits = chunked(&candidates, |chunk| {
        chunk
            .iter()
            .filter(|t| cluster_key(p, t, k, None).0 == reference)
            .copied()
            .collect::<Vec<_>>()
    });
    let mut matches: Vec<SetPoint> = hits.into_iter().flatten().collect();
    matches.sort_by(|a, b| a.cmp_x(b, d));
    let max_gap = if d == 1 {
        let xs: Vec<f64> = matches.iter().map(|m| m.x[0]).collect();
        max_consecutive_gap(&xs)
    } else {
        let raw = IndexedPointSet::from_sorted(d, matches.clone(), core.clone(), None);
        if raw.is_empty() {
            f64::INFINITY
        } else {
            covering_radius(&raw, &core, 40)?
        }
    };
    Ok(RepetitionReport { radius: k, matches, max_gap })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatchFrequencyTable {
    /// `frequencies[n][j]` for box `n` and anchor `j`.
    pub frequencies: Vec<Vec<f64>>,
    /// `(max − min) / mean` across anchors at the largest box.
    pub spread: f64,
}

/// `card{t : t + patch ⊂ Λ ∩ (a + B_n)} / vol(B_n)` per box and anchor.
pub fn patch_frequency(
    p: &IndexedPointSet,
    patch: &[SetPoint],
    boxes: &VanHove,
    anchors: &[Vec<f64>],
) -> Result<PatchFrequencyTable> {
    let d = p.dim;
    let Some(p0) = patch.first() else {
        return Err(Error::InsufficientData("empty patch".into()));
    };
    let mut frequencies = Vec::with_capacity(boxes.len());
    for n in 0..boxes.len() {
        let mut row = Vec::with_capacity(anchors.len());
        for a in anchors {
            let bx = boxes.region_at(n, a);
            if !p.region.covers(&bx) {
                return Err(Error::RegionTooSmall(format!("box {bx:?} leaves the patch")));
            }
            let count = p
                .in_region(&bx)
                .filter(|y| {
                    let t = y.sub(p0);
                    patch.iter().all(|q| {
                        let z = t.add(q);
                        bx.contains(z.physical(d)) && p.contains(&z)
                    })
                })
                .count();
            row.push(count as f64 / bx.volume());
        }
        frequencies.push(row);
    }
    let last = frequencies.last().cloned().unwrap_or_default();
    let mean = last.iter().sum::<f64>() / last.len().max(1) as f64;
    let max = last.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = last.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = if mean > 0.0 { (max - min) / mean } else { 0.0 };
    Ok(PatchFrequencyTable { frequencies, spread })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodReport {
    /// All `t ∈ Δ ∩ B_R` with `(t + Λ) ∩ core = Λ ∩ core`, including 0.
    pub periods: Vec<SetPoint>,
    /// A greedy maximal independent set of shortest periods.
    pub generators: Vec<Vec<f64>>,
    pub rank: usize,
}

impl PeriodReport {
    pub fn is_full_rank(&self, d: usize) -> bool {
        self.rank == d
    }
}

fn is_period(p: &IndexedPointSet, t: &SetPoint) -> bool {
    let d = p.dim;
    let Some(core) = p.region.shrink(t.sup_norm(d)) else {
        return false;
    };
    let back = t.neg();
    p.in_region(&core).all(|y| p.contains(&y.add(&back)))
        && p.points
            .iter()
            .map(|x| x.add(t))
            .filter(|z| core.contains(z.physical(d)))
            .all(|z| p.contains(&z))
}

/// Exact-match translations among the observed differences within `R`.
pub fn period_candidates(p: &IndexedPointSet, r: f64) -> Result<PeriodReport> {
    let d = p.dim;
    let deltas = difference_set(p, r)?;
    let found: Vec<bool> = deltas.points.par_iter().map(|t| t.is_zero() || is_period(p, t)).collect();
    let mut periods: Vec<SetPoint> = deltas
        .points
        .iter()
        .zip(found)
        .filter_map(|(t, ok)| ok.then_some(*t))
        .collect();
    if !periods.iter().any(SetPoint::is_zero) {
        periods.push(p.zero_vector());
    }
    periods.sort_by(|a, b| a.norm(d).total_cmp(&b.norm(d)).then(a.cmp_x(b, d)));

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut generators = Vec::new();
    for t in &periods {
        let mut v = t.physical(d).to_vec();
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= dot * y;
            }
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-9 * (1.0 + t.norm(d)) {
            basis.push(v.iter().map(|x| x / len).collect());
            let mut g = t.physical(d).to_vec();
            if g.iter().find(|x| **x != 0.0).is_some_and(|x| *x < 0.0) {
                g.iter_mut().for_each(|x| *x = -*x);
            }
            generators.push(g);
        }
    }
    let rank = generators.len();
    Ok(PeriodReport { periods, generators, rank })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CloseWitness {
    pub close: bool,
    /// The shortest shift found, when `close`.
    pub shift: Option<Vec<f64>>,
    pub candidates_tested: usize,
}

fn shifted_cluster(p: &IndexedPointSet, v: &[f64], k: f64) -> Vec<Vec<f64>> {
    let d = p.dim;
    let lo: Vec<f64> = v.iter().map(|s| -k - s).collect();
    let hi: Vec<f64> = v.iter().map(|s| k - s).collect();
    p.in_box(&lo, &hi)
        .map(|q| (0..d).map(|i| q.x[i] + v[i]).collect())
        .collect()
}

fn same_cluster(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| x.iter().zip(y).all(|(s, t)| (s - t).abs() <= MATCH_TOL))
}

/// Whether `(v + P) ∩ [−K, K]^d = Q ∩ [−K, K]^d` for some `|v| ≤ V`.
///
/// When `Q` has a point `q₀` in the box, every admissible shift has the form
/// `q₀ − p` with `p ∈ P`, so the search is exhaustive over those.
pub fn lt_close(p: &IndexedPointSet, q: &IndexedPointSet, k: f64, v: f64) -> Result<CloseWitness> {
    let d = p.dim;
    if d != q.dim {
        return Err(Error::DimensionMismatch("lt_close on sets of different dimension".into()));
    }
    let need = Region::centered(k + v, d);
    if !p.region.covers(&need) || !q.region.covers(&Region::centered(k, d)) {
        return Err(Error::RegionTooSmall("patches do not cover the K + V box".into()));
    }
    let target = shifted_cluster(q, &vec![0.0; d], k);
    let mut candidates: Vec<Vec<f64>> = match target.first() {
        Some(q0) => p
            .in_ball(q0, v)
            .map(|pp| (0..d).map(|i| q0[i] - pp.x[i]).collect())
            .collect(),
        None => {
            let steps: Vec<f64> = (-10..=10).map(|j| v * j as f64 / 10.0).collect();
            let mut out = vec![vec![]];
            for _ in 0..d {
                out = out
                    .into_iter()
                    .flat_map(|pre: Vec<f64>| {
                        steps.iter().map(move |s| {
                            let mut n = pre.clone();
                            n.push(*s);
                            n
                        })
                    })
                    .collect();
            }
            out.retain(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt() <= v);
            out
        }
    };
    candidates.sort_by(|a, b| {
        let na: f64 = a.iter().map(|x| x * x).sum();
        let nb: f64 = b.iter().map(|x| x * x).sum();
        na.total_cmp(&nb)
    });
    let tested = candidates.len();
    let shift = candidates.into_iter().find(|c| same_cluster(&shifted_cluster(p, c, k), &target));
    Ok(CloseWitness { close: shift.is_some(), shift, candidates_tested: tested })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn integers(lo: i64, hi: i64) -> IndexedPointSet {
        let pts = (lo..hi).map(|i| vec![i as f64]).collect();
        IndexedPointSet::from_raw(pts, Region::cube(lo as f64, hi as f64, 1)).unwrap()
    }

    fn grid(n: i64) -> IndexedPointSet {
        let mut pts = Vec::new();
        for i in -n..n {
            for j in -n..n {
                pts.push(vec![i as f64, j as f64]);
            }
        }
        IndexedPointSet::from_raw(pts, Region::centered(n as f64, 2)).unwrap()
    }

    #[test]
    fn duplicate_and_outside_points_are_rejected() {
        let r = Region::cube(0.0, 10.0, 1);
        assert!(matches!(
            IndexedPointSet::from_raw(vec![vec![1.0], vec![1.0]], r.clone()),
            Err(Error::DuplicatePoint(_))
        ));
        assert!(IndexedPointSet::from_raw(vec![vec![11.0]], r).is_err());
    }

    #[test]
    fn difference_set_of_integers() {
        let p = integers(0, 101);
        let delta = difference_set(&p, 5.0).unwrap();
        let xs: Vec<f64> = delta.points().iter().map(|q| q.x[0]).collect();
        assert_eq!(xs, (-5..=5).map(|i| i as f64).collect::<Vec<_>>());
    }

    #[test]
    fn difference_set_of_single_point() {
        let p = IndexedPointSet::from_raw(vec![vec![0.0]], Region::cube(-1.0, 1.0, 1)).unwrap();
        let delta = difference_set(&p, 0.5).unwrap();
        assert_eq!(delta.len(), 1);
        assert!(delta.points()[0].is_zero());
        assert!(matches!(difference_set(&p, 2.0), Err(Error::RegionTooSmall(_))));
    }

    #[test]
    fn packing_radius_of_integers() {
        assert_eq!(packing_radius(&integers(0, 50)).unwrap(), 0.5);
        assert_eq!(packing_radius(&grid(4)).unwrap(), 0.5);
        let single = IndexedPointSet::from_raw(vec![vec![0.0]], Region::cube(-1.0, 1.0, 1)).unwrap();
        assert!(matches!(packing_radius(&single), Err(Error::Undefined(_))));
    }

    #[test]
    fn integers_have_one_cluster() {
        for k in [0.5, 1.0, 3.7] {
            assert_eq!(flc_clusters(&integers(-50, 50), k).unwrap().count(), 1);
        }
        assert_eq!(flc_clusters(&grid(8), 2.0).unwrap().count(), 1);
    }

    #[test]
    fn integer_repetitions() {
        let rep = repetition_set(&integers(-50, 50), 3.0).unwrap();
        assert_eq!(rep.matches.len(), 94);
        assert_eq!(rep.max_gap, 1.0);
    }

    #[test]
    fn inserted_defect_is_avoided() {
        let p = integers(-60, 60).with_inserted(&[10.5]).unwrap();
        let rep = repetition_set(&p, 3.0).unwrap();
        for m in &rep.matches {
            assert!((m.x[0] - 10.5).abs() > 3.0, "match at {} sees the defect", m.x[0]);
        }
        assert_eq!(rep.max_gap, 7.0);
    }

    #[test]
    fn integer_periods() {
        let rep = period_candidates(&integers(-40, 40), 6.0).unwrap();
        assert_eq!(rep.periods.len(), 13);
        assert_eq!(rep.generators, vec![vec![1.0]]);
        let g = period_candidates(&grid(10), 2.0).unwrap();
        assert_eq!(g.rank, 2);
        assert!(g.is_full_rank(2));
    }

    #[test]
    fn frequency_of_single_point_patch_is_density() {
        let p = integers(-100, 100);
        let boxes = VanHove::centered(&[10.0, 50.0], 1);
        let t = patch_frequency(&p, &[SetPoint::raw(&[0.0])], &boxes, &[vec![0.0], vec![13.0]]).unwrap();
        assert_eq!(t.frequencies[1], vec![1.0, 1.0]);
        assert_eq!(t.spread, 0.0);
    }

    #[test]
    fn lt_close_finds_known_shift() {
        let p = integers(-30, 30).translate(&SetPoint::raw(&[0.25]));
        let q = integers(-30, 30);
        let w = lt_close(&p, &q, 5.0, 0.5).unwrap();
        assert!(w.close);
        assert!((w.shift.unwrap()[0] + 0.25).abs() < 1e-12);
        let same = lt_close(&q, &q, 5.0, 0.5).unwrap();
        assert_eq!(same.shift, Some(vec![0.0]));
    }

    #[test]
    fn nearest_prefers_first_on_ties() {
        let p = integers(0, 10);
        assert_eq!(p.nearest(&[3.5]).unwrap().x[0], 3.0);
        let g = grid(3);
        assert_eq!(g.nearest(&[0.2, 0.9]).unwrap().x[..2], [0.0, 1.0]);
    }

    #[test]
    fn covering_radius_of_grid() {
        let g = grid(6);
        let c = covering_radius(&g, &Region::centered(3.0, 2), 13).unwrap();
        assert!((c - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(covering_radius(&integers(0, 20), &Region::cube(5.0, 10.0, 1), 0).unwrap(), 0.5);
    }

    proptest! {
        #[test]
        fn difference_set_is_symmetric(xs in proptest::collection::btree_set(0i32..2000, 5..60)) {
            let pts: Vec<Vec<f64>> = xs.iter().map(|&v| vec![v as f64 / 10.0]).collect();
            let p = IndexedPointSet::from_raw(pts, Region::cube(0.0, 200.0, 1)).unwrap();
            let delta = difference_set(&p, 20.0).unwrap();
            for q in delta.points() {
                prop_assert!(delta.contains(&q.neg()));
            }
        }
    }
}

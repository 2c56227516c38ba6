//! Empirical autocorrelation `η`, the hull pseudo-metric
//! `d(t + Λ, s + Λ) = 2(η(0) − η(t − s))`, ε-almost periods and the
//! model-set prediction `dens(𝓛) · θ_H((t⋆ + W) △ W)`.

use std::hash::Hash;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::cps::LatticeScheme;
use crate::error::{Error, Result};
use crate::pointset::{covering_radius, max_consecutive_gap, pad_index, Index, IndexedPointSet, PointKey, SetPoint, COORD_QUANTUM};
use crate::region::{Region, VanHove};
use crate::scalar::Scalar;
use crate::window::WindowSpec;

/// Largest number of boxes in one table.
pub const MAX_BOXES: usize = 8;

type Counts = [u32; MAX_BOXES];

/// `η_n(δ)` for every observed `δ ∈ Δ ∩ B_R` and every box `A_n`.
#[derive(Clone, Debug, Serialize)]
pub struct AutocorrelationTable {
    pub radius: f64,
    pub boxes: VanHove,
    /// Sorted by physical coordinates.
    pub deltas: Vec<SetPoint>,
    /// `eta[i][n]` for delta `i` and box `n`.
    pub eta: Vec<Vec<f64>>,
    /// `η_n(0)`, the density estimate per box.
    pub eta0: Vec<f64>,
    #[serde(skip)]
    dim: usize,
    #[serde(skip)]
    lookup: FxHashMap<PointKey, usize>,
}

impl AutocorrelationTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    fn position(&self, delta: &SetPoint) -> Option<usize> {
        self.lookup.get(&delta.key(self.dim, None)).copied()
    }

    /// `η_n(δ)` per box; zeros when `δ ∉ Δ`.
    pub fn eta_by_box(&self, delta: &SetPoint) -> Vec<f64> {
        match self.position(delta) {
            Some(i) => self.eta[i].clone(),
            None => vec![0.0; self.boxes.len()],
        }
    }

    /// `η(δ)` at the largest box.
    pub fn eta_of(&self, delta: &SetPoint) -> f64 {
        self.position(delta).map_or(0.0, |i| self.eta[i][self.boxes.len() - 1])
    }

    /// `η(0)` at the largest box.
    pub fn eta_zero(&self) -> f64 {
        self.eta0[self.boxes.len() - 1]
    }

    /// `2(η(0) − η(δ))` at the largest box.
    pub fn d_of(&self, delta: &SetPoint) -> f64 {
        2.0 * (self.eta_zero() - self.eta_of(delta))
    }

    /// `(δ, d(δ))` for every tabulated difference.
    pub fn d_values(&self) -> Vec<(SetPoint, f64)> {
        let last = self.boxes.len() - 1;
        let e0 = self.eta_zero();
        self.deltas
            .iter()
            .zip(&self.eta)
            .map(|(d, e)| (*d, 2.0 * (e0 - e[last])))
            .collect()
    }
}

fn count_pairs<K>(
    p: &IndexedPointSet,
    r: f64,
    boxes: &VanHove,
    anchors: &[SetPoint],
    key: impl Fn(&SetPoint) -> K + Sync,
) -> FxHashMap<K, Counts>
where
    K: Hash + Eq + Send + Copy,
{
    let d = p.dim();
    let regions: Vec<Region> = (0..boxes.len()).map(|n| boxes.region(n)).collect();
    anchors
        .par_chunks(64)
        .fold(FxHashMap::default, |mut map: FxHashMap<K, Counts>, chunk| {
            for a in chunk {
                let level = regions.iter().position(|b| b.contains(a.physical(d))).expect("anchor in a box");
                for y in p.in_ball(a.physical(d), r) {
                    map.entry(key(&y.sub(a))).or_insert([0; MAX_BOXES])[level] += 1;
                }
            }
            map
        })
        .reduce(FxHashMap::default, |a, b| {
            let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
            for (k, c) in small {
                let e = big.entry(k).or_insert([0; MAX_BOXES]);
                for (t, v) in e.iter_mut().zip(c) {
                    *t += v;
                }
            }
            big
        })
}

/// `η_n(δ) = card{x ∈ Λ ∩ A_n : x + δ ∈ Λ} / vol(A_n)` for all `δ ∈ Δ ∩ B_R`.
pub fn eta_table(p: &IndexedPointSet, r: f64, boxes: &VanHove) -> Result<AutocorrelationTable> {
    eta_table_filtered(p, r, boxes, 1)
}

/// As [`eta_table`], keeping only differences with at least `min_count`
/// coincidences in the largest box (zero is always kept).
pub fn eta_table_filtered(p: &IndexedPointSet, r: f64, boxes: &VanHove, min_count: u32) -> Result<AutocorrelationTable> {
    let d = p.dim();
    if boxes.dim != d {
        return Err(Error::DimensionMismatch("box sequence and patch differ in dimension".into()));
    }
    if boxes.len() > MAX_BOXES {
        return Err(Error::InsufficientData(format!("at most {MAX_BOXES} boxes per table")));
    }
    let need = boxes.largest().expand(r);
    if !p.region().covers(&need) {
        return Err(Error::RegionTooSmall(format!(
            "patch {:?} does not cover the largest box expanded by {r}",
            p.region()
        )));
    }
    let largest = boxes.largest();
    let anchors: Vec<SetPoint> = p.in_region(&largest).copied().collect();
    let nb = boxes.len();
    let volumes: Vec<f64> = (0..nb).map(|n| boxes.volume(n)).collect();
    let cumulate = |c: &Counts| -> Vec<u32> {
        let mut acc = 0;
        (0..nb)
            .map(|i| {
                acc += c[i];
                acc
            })
            .collect()
    };
    let mut rows: Vec<(SetPoint, Vec<u32>)> = if let Some(scheme) = p.scheme() {
        let map = count_pairs(p, r, boxes, &anchors, |v| v.index.expect("indexed"));
        map.into_iter()
            .map(|(n, c): (Index, Counts)| (scheme.point(&n), cumulate(&c)))
            .collect()
    } else {
        let map = count_pairs(p, r, boxes, &anchors, |v| {
            let mut q = [0i64; 3];
            for k in 0..d {
                q[k] = (v.x[k] / COORD_QUANTUM).round() as i64;
            }
            q
        });
        map.into_iter()
            .map(|(q, c)| {
                let x: Vec<f64> = q[..d].iter().map(|&v| v as f64 * COORD_QUANTUM).collect();
                (SetPoint::raw(&x), cumulate(&c))
            })
            .collect()
    };
    rows.retain(|(delta, c)| c[nb - 1] >= min_count || delta.is_zero());
    rows.sort_by(|a, b| {
        a.0.x[..d]
            .iter()
            .zip(&b.0.x[..d])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eta0: Vec<f64> = (0..nb)
        .map(|n| p.in_region(&boxes.region(n)).count() as f64 / volumes[n])
        .collect();
    let mut deltas = Vec::with_capacity(rows.len());
    let mut eta = Vec::with_capacity(rows.len());
    for (delta, c) in rows {
        deltas.push(delta);
        eta.push((0..nb).map(|n| c[n] as f64 / volumes[n]).collect());
    }
    let lookup = deltas.iter().enumerate().map(|(i, v)| (v.key(d, None), i)).collect();
    Ok(AutocorrelationTable { radius: r, boxes: boxes.clone(), deltas, eta, eta0, dim: d, lookup })
}

/// `2(η(0) − η(t − s))`, the pseudo-metric `d(s + Λ, t + Λ)`.
pub fn pairwise_d(table: &AutocorrelationTable, t: &SetPoint, s: &SetPoint) -> f64 {
    table.d_of(&t.sub(s))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymDiffReport {
    /// `card((P △ Q) ∩ A_n) / vol(A_n)` per box.
    pub per_box: Vec<f64>,
    /// Maximum over the last quartile of boxes.
    pub upper: f64,
}

/// Density of the symmetric difference of two patches.
pub fn symdiff_density(p: &IndexedPointSet, q: &IndexedPointSet, boxes: &VanHove) -> Result<SymDiffReport> {
    let largest = boxes.largest();
    if !p.region().covers(&largest) || !q.region().covers(&largest) {
        return Err(Error::RegionTooSmall("patches do not cover the largest box".into()));
    }
    let per_box: Vec<f64> = (0..boxes.len())
        .map(|n| {
            let b = boxes.region(n);
            let only_p = p.in_region(&b).filter(|x| !q.contains(x)).count();
            let only_q = q.in_region(&b).filter(|x| !p.contains(x)).count();
            (only_p + only_q) as f64 / b.volume()
        })
        .collect();
    let upper = per_box[boxes.tail_start()..].iter().cloned().fold(0.0, f64::max);
    Ok(SymDiffReport { per_box, upper })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlmostPeriods {
    pub epsilon: f64,
    pub radius: f64,
    /// `(δ, d(δ))` with `d(δ) < ε`, sorted by physical coordinates.
    pub members: Vec<(SetPoint, f64)>,
    /// Largest gap in `P_ε ∩ [0, R]` including the trailing gap up to `R`
    /// (1D); covering radius of `P_ε` on `[−R/2, R/2]^d` otherwise.
    pub max_gap: f64,
}

impl AlmostPeriods {
    /// The same set restricted to `|δ| ≤ r`, with its gap recomputed.
    pub fn within(&self, r: f64, dim: usize) -> AlmostPeriods {
        let members: Vec<(SetPoint, f64)> = self
            .members
            .iter()
            .filter(|(m, _)| m.norm(dim) <= r)
            .copied()
            .collect();
        let max_gap = gap_of(&members, r, dim);
        AlmostPeriods { epsilon: self.epsilon, radius: r, members, max_gap }
    }

    pub fn contains(&self, delta: &SetPoint, dim: usize) -> bool {
        let key = delta.key(dim, None);
        self.members.iter().any(|(m, _)| m.key(dim, None) == key)
    }
}

fn gap_of(members: &[(SetPoint, f64)], r: f64, dim: usize) -> f64 {
    if dim == 1 {
        let mut xs: Vec<f64> = members.iter().map(|(m, _)| m.x[0]).filter(|&x| (0.0..=r).contains(&x)).collect();
        xs.sort_by(f64::total_cmp);
        if xs.is_empty() {
            return r;
        }
        let trailing = r - xs[xs.len() - 1];
        max_consecutive_gap(&xs).max(trailing)
    } else {
        let region = Region::centered(r / 2.0, dim);
        let pts: Vec<Vec<f64>> = members.iter().map(|(m, _)| m.physical(dim).to_vec()).collect();
        let wide = Region::centered(r * 1.01 + 1.0, dim);
        match IndexedPointSet::from_raw(pts, wide) {
            Ok(set) if !set.is_empty() => covering_radius(&set, &region, 40).unwrap_or(f64::INFINITY),
            _ => f64::INFINITY,
        }
    }
}

/// `P_ε = {δ ∈ Δ ∩ B_R : d(δ) < ε}`, valid for `0 < ε < 2η(0)`.
pub fn almost_periods(table: &AutocorrelationTable, eps: f64) -> Result<AlmostPeriods> {
    let limit = 2.0 * table.eta_zero();
    if !(eps > 0.0 && eps < limit) {
        return Err(Error::EpsilonOutOfRange { eps, limit });
    }
    let members: Vec<(SetPoint, f64)> = table.d_values().into_iter().filter(|(_, d)| *d < eps).collect();
    let max_gap = gap_of(&members, table.radius, table.dim);
    Ok(AlmostPeriods { epsilon: eps, radius: table.radius, members, max_gap })
}

/// `dens(𝓛) · θ_H((t⋆ + W) △ W)`, computed exactly in the scheme's scalar.
pub fn predicted_d_exact<T: Scalar>(scheme: &LatticeScheme<T>, window: &WindowSpec<T>, t: &SetPoint) -> Result<T> {
    let n = t.index.ok_or_else(|| Error::NotInL(t.x[..scheme.d()].to_vec()))?;
    let idx = &n[..scheme.rank()];
    let phys = scheme.physical(idx);
    let consistent = phys
        .iter()
        .zip(&t.x)
        .all(|(a, b)| (a.to_f64() - b).abs() <= 1e-6 * (1.0 + b.abs()));
    if !consistent || n[scheme.rank()..].iter().any(|&v| v != 0) {
        return Err(Error::NotInL(t.x[..scheme.d()].to_vec()));
    }
    let shifted = window.translate(&scheme.star_map(idx));
    Ok(shifted.symmetric_difference_measure(window) * scheme.lattice_density())
}

/// [`predicted_d_exact`] as a float.
pub fn predicted_d<T: Scalar>(scheme: &LatticeScheme<T>, window: &WindowSpec<T>, t: &SetPoint) -> Result<f64> {
    predicted_d_exact(scheme, window, t).map(|v| v.to_f64())
}

/// Lattice translation with the given index as a [`SetPoint`].
pub fn lattice_translation<T: Scalar>(scheme: &LatticeScheme<T>, index: &[i64]) -> SetPoint {
    scheme.summary().point(&pad_index(index))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MactWitness {
    pub close: bool,
    pub shift: Option<Vec<f64>>,
    /// Smallest symmetric-difference density found.
    pub distance: f64,
    pub candidates_tested: usize,
}

/// Whether `d(v + P, Q) ≤ ε` for some `|v| ≤ V`.
///
/// Candidate shifts are `q − p` for the points `q` of `Q` nearest the origin
/// and all `p ∈ P` within `V` of them, plus `v = 0`.
pub fn mact_close(p: &IndexedPointSet, q: &IndexedPointSet, v: f64, eps: f64, boxes: &VanHove) -> Result<MactWitness> {
    let d = p.dim();
    let mut near: Vec<&SetPoint> = q.in_ball(&vec![0.0; d], v.max(1.0) * 2.0).collect();
    near.sort_by(|a, b| a.norm(d).total_cmp(&b.norm(d)));
    near.truncate(8);
    let mut candidates: Vec<SetPoint> = vec![p.zero_vector()];
    for qq in near {
        for pp in p.in_ball(qq.physical(d), v) {
            candidates.push(qq.sub(pp));
        }
    }
    candidates.sort_by(|a, b| a.norm(d).total_cmp(&b.norm(d)));
    candidates.dedup_by(|a, b| a.key(d, None) == b.key(d, None));
    candidates.retain(|c| c.norm(d) <= v + 1e-12);
    let scored: Vec<Result<f64>> = candidates
        .par_iter()
        .map(|c| symdiff_density(&p.translate(c), q, boxes).map(|r| r.upper))
        .collect();
    let mut best: Option<(f64, &SetPoint)> = None;
    for (c, s) in candidates.iter().zip(scored) {
        let s = s?;
        if best.is_none_or(|(b, _)| s < b) {
            best = Some((s, c));
        }
    }
    let (distance, shift) = best.map(|(s, c)| (s, c.physical(d).to_vec())).expect("zero candidate");
    Ok(MactWitness {
        close: distance <= eps,
        shift: (distance <= eps).then_some(shift),
        distance,
        candidates_tested: candidates.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn integers(lo: i64, hi: i64) -> IndexedPointSet {
        let pts = (lo..hi).map(|i| vec![i as f64]).collect();
        IndexedPointSet::from_raw(pts, Region::cube(lo as f64, hi as f64, 1)).unwrap()
    }

    #[test]
    fn integers_are_fully_periodic() {
        let p = integers(-200, 200);
        let boxes = VanHove::centered(&[50.0, 100.0], 1);
        let t = eta_table(&p, 10.0, &boxes).unwrap();
        assert_eq!(t.eta_zero(), 1.0);
        assert_eq!(t.eta_of(&SetPoint::raw(&[3.0])), 1.0);
        assert_eq!(t.eta_of(&SetPoint::raw(&[0.5])), 0.0);
        assert_eq!(t.len(), 21);
        let pe = almost_periods(&t, 0.1).unwrap();
        assert_eq!(pe.members.len(), 21);
        assert_eq!(pe.max_gap, 1.0);
    }

    #[test]
    fn epsilon_range_is_enforced() {
        let p = integers(-200, 200);
        let t = eta_table(&p, 5.0, &VanHove::centered(&[50.0], 1)).unwrap();
        assert!(matches!(almost_periods(&t, 2.0), Err(Error::EpsilonOutOfRange { .. })));
        assert!(almost_periods(&t, 0.0).is_err());
    }

    #[test]
    fn pairwise_d_limits() {
        let p = integers(-200, 200);
        let t = eta_table(&p, 5.0, &VanHove::centered(&[50.0], 1)).unwrap();
        let a = SetPoint::raw(&[2.0]);
        assert_eq!(pairwise_d(&t, &a, &a), 0.0);
        assert_eq!(pairwise_d(&t, &SetPoint::raw(&[0.5]), &SetPoint::raw(&[0.0])), 2.0);
    }

    #[test]
    fn symdiff_of_disjoint_sets() {
        let p = integers(-120, 120);
        let q = p.translate(&SetPoint::raw(&[0.5]));
        let boxes = VanHove::centered(&[100.0], 1);
        assert_eq!(symdiff_density(&p, &p, &boxes).unwrap().upper, 0.0);
        assert_eq!(symdiff_density(&p, &q, &boxes).unwrap().upper, 2.0);
    }

    #[test]
    fn table_requires_margin() {
        let p = integers(-60, 60);
        assert!(matches!(
            eta_table(&p, 20.0, &VanHove::centered(&[50.0], 1)),
            Err(Error::RegionTooSmall(_))
        ));
    }

    #[test]
    fn mact_on_identical_sets() {
        let p = integers(-120, 120);
        let w = mact_close(&p, &p, 2.0, 0.01, &VanHove::centered(&[100.0], 1)).unwrap();
        assert!(w.close);
        assert_eq!(w.shift, Some(vec![0.0]));
    }

    proptest! {
        #[test]
        fn eta_is_bounded_and_nearly_symmetric(xs in proptest::collection::btree_set(0i32..3000, 50..200)) {
            let pts: Vec<Vec<f64>> = xs.iter().map(|&v| vec![v as f64 / 10.0 - 150.0]).collect();
            let p = IndexedPointSet::from_raw(pts, Region::cube(-150.0, 150.0, 1)).unwrap();
            let boxes = VanHove::centered(&[60.0, 120.0], 1);
            let t = eta_table(&p, 20.0, &boxes).unwrap();
            for (i, delta) in t.deltas.iter().enumerate() {
                for n in 0..2 {
                    prop_assert!(t.eta[i][n] <= t.eta0[n] + 1e-12);
                    let mirror = t.eta_by_box(&delta.neg())[n];
                    // the two counts differ only through anchors within |δ| of the box edge
                    let edge = 2.0 * (delta.x[0].abs() * 1.0 + 1.0) * 10.0 / boxes.volume(n);
                    prop_assert!((t.eta[i][n] - mirror).abs() <= edge);
                }
            }
        }
    }
}

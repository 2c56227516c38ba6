//! The torus `𝕋 = (ℝ^d × ℝ^m) / 𝓛` parametrizing the hull, singular points,
//! fibers over them, window reconstruction and the continuity modulus
//! `ε(M)` of the torus parametrization.

use rayon::prelude::*;
use serde::Serialize;

use crate::autocorr::AutocorrelationTable;
use crate::cps::{LatticeScheme, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::pointset::{IndexedPointSet, SetPoint};
use crate::region::Region;
use crate::scalar::Scalar;
use crate::window::{convex_hull, IntervalComponent, Membership, WindowShape, WindowSpec, DEFAULT_TOL};

/// A point of `𝕋`, stored as fractional coordinates in `[0, 1)^N` with
/// respect to the lattice basis.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint<T> {
    frac: Vec<T>,
}

fn reduce<T: Scalar>(v: T) -> T {
    let r = v - T::from_i64(v.floor_i64());
    if r >= T::one() || r < T::zero() {
        T::zero()
    } else {
        r
    }
}

impl<T: Scalar> TorusPoint<T> {
    /// Reduces arbitrary coordinates modulo `ℤ^N`.
    pub fn from_coords(coords: Vec<T>) -> Self {
        TorusPoint { frac: coords.into_iter().map(reduce).collect() }
    }

    pub fn zero(n: usize) -> Self {
        TorusPoint { frac: vec![T::zero(); n] }
    }

    pub fn frac(&self) -> &[T] {
        &self.frac
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_coords(self.frac.iter().zip(&o.frac).map(|(a, b)| *a + *b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_coords(self.frac.iter().zip(&o.frac).map(|(a, b)| *a - *b).collect())
    }

    pub fn neg(&self) -> Self {
        Self::from_coords(self.frac.iter().map(|a| -*a).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.frac.iter().map(Scalar::to_f64).collect()
    }

    /// Sup distance between fractional coordinates on `ℝ^N / ℤ^N`.
    pub fn distance(&self, o: &Self) -> f64 {
        self.frac
            .iter()
            .zip(&o.frac)
            .map(|(a, b)| {
                let d = (a.to_f64() - b.to_f64()).rem_euclid(1.0);
                d.min(1.0 - d)
            })
            .fold(0.0, f64::max)
    }
}

/// `(t, 0) + 𝓛`.
pub fn embed_translation<T: Scalar>(scheme: &LatticeScheme<T>, t: &[T]) -> TorusPoint<T> {
    let mut v = t.to_vec();
    v.resize(scheme.rank(), T::zero());
    TorusPoint::from_coords(scheme.basis_inverse().mul_vec(&v))
}

/// `β(x + ⋏(−h + W)) = (x, h) + 𝓛`.
pub fn beta_of_cut<T: Scalar>(scheme: &LatticeScheme<T>, x: &[T], h: &[T]) -> TorusPoint<T> {
    let mut v = x.to_vec();
    v.extend_from_slice(h);
    TorusPoint::from_coords(scheme.basis_inverse().mul_vec(&v))
}

/// The representative `(x, h) = basis · frac` of a torus point.
pub fn representative<T: Scalar>(scheme: &LatticeScheme<T>, tp: &TorusPoint<T>) -> (Vec<T>, Vec<T>) {
    let mut x = scheme.basis().mul_vec(&tp.frac);
    let h = x.split_off(scheme.d());
    (x, h)
}

/// Cut window `−h + W` of the hull element over `tp`.
pub fn shifted_window<T: Scalar>(scheme: &LatticeScheme<T>, window: &WindowSpec<T>, tp: &TorusPoint<T>) -> WindowSpec<T> {
    let (_, h) = representative(scheme, tp);
    let neg: Vec<T> = h.iter().map(|v| -*v).collect();
    window.translate(&neg)
}

/// Indices `n` with physical part in `[−R, R)^d` and `n⋆ + h ∈ ∂W`.
///
/// An empty result certifies that the torus point is non-singular within
/// that radius.
pub fn singularity_test<T: Scalar>(
    scheme: &LatticeScheme<T>,
    window: &WindowSpec<T>,
    tp: &TorusPoint<T>,
    r: f64,
) -> Result<Vec<Vec<i64>>> {
    let (_, h) = representative(scheme, tp);
    boundary_hits(scheme, window, &h, r)
}

fn boundary_hits<T: Scalar>(scheme: &LatticeScheme<T>, window: &WindowSpec<T>, h: &[T], r: f64) -> Result<Vec<Vec<i64>>> {
    let d = scheme.d();
    if matches!(window.shape(), WindowShape::Point) {
        return Ok(Vec::new());
    }
    let hf: Vec<f64> = h.iter().map(Scalar::to_f64).collect();
    let (wlo, whi) = window.bounding_box();
    let mut lo = vec![-r; d];
    let mut hi = vec![r; d];
    lo.extend(wlo.iter().zip(&hf).map(|(a, b)| a - b));
    hi.extend(whi.iter().zip(&hf).map(|(a, b)| a - b));
    let candidates = scheme.indices_in_box(&lo, &hi, DEFAULT_BUDGET)?;
    let wf = window.to_f64();
    let margin = 1e-6 + window.tol();
    let region = Region::centered(r, d);
    let mut hits: Vec<Vec<i64>> = candidates
        .into_par_iter()
        .filter(|n| {
            let p = scheme.set_point(n);
            if !region.contains(p.physical(d)) {
                return false;
            }
            let s: Vec<f64> = p.star[..scheme.m()].iter().zip(&hf).map(|(a, b)| a + b).collect();
            if wf.boundary_distance(&s).abs() > margin {
                return false;
            }
            let star: Vec<T> = scheme.star_map(n).iter().zip(h).map(|(a, b)| *a + *b).collect();
            window.contains(&star) == Membership::Boundary
        })
        .collect();
    hits.sort();
    Ok(hits)
}

/// The fiber `β⁻¹(tp)` restricted to `[−R, R)^d`.
#[derive(Clone, Debug)]
pub struct FiberReport {
    /// Physical part `x` of the representative; every element is
    /// `offset + set`.
    pub offset: Vec<f64>,
    pub elements: Vec<IndexedPointSet>,
    /// Boundary hits `n` with `n⋆ + h ∈ ∂W`.
    pub hits: Vec<Vec<i64>>,
    /// Hits on a lower (left) endpoint.
    pub lower_hits: Vec<Vec<i64>>,
    /// Hits on an upper (right) endpoint.
    pub upper_hits: Vec<Vec<i64>>,
    /// Number of distinct boundary points of `W` that are hit.
    pub boundary_orbits: usize,
    pub multiple_orbits: bool,
}

/// Enumerates the fiber over `tp` for `m ≤ 1`.
///
/// A non-singular point yields one element. A singular point yields the
/// two one-sided limits: the open cut together with the lower-endpoint hits,
/// and the open cut together with the upper-endpoint hits.
pub fn fiber_enumerate<T: Scalar>(
    scheme: &LatticeScheme<T>,
    window: &WindowSpec<T>,
    tp: &TorusPoint<T>,
    r: f64,
) -> Result<FiberReport> {
    let m = scheme.m();
    if m > 1 {
        return Err(Error::UnsupportedDimension { m });
    }
    let d = scheme.d();
    let (x, h) = representative(scheme, tp);
    let offset: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
    let region = Region::centered(r, d);
    let neg: Vec<T> = h.iter().map(|v| -*v).collect();
    let hits = boundary_hits(scheme, window, &h, r)?;
    if hits.is_empty() {
        let set = scheme.enumerate_cut(&window.translate(&neg), &region)?;
        return Ok(FiberReport {
            offset,
            elements: vec![set],
            hits,
            lower_hits: vec![],
            upper_hits: vec![],
            boundary_orbits: 0,
            multiple_orbits: false,
        });
    }
    let open = scheme.enumerate_cut(&window.interior().translate(&neg), &region)?;
    let comps = window.components();
    let mut lower_hits = Vec::new();
    let mut upper_hits = Vec::new();
    let mut endpoints: Vec<T> = Vec::new();
    for n in &hits {
        let s = scheme.star_map(n)[0] + h[0];
        let on = |e: &T| s.near(e, window.tol());
        if comps.iter().any(|c| on(&c.lo)) {
            lower_hits.push(n.clone());
        }
        if comps.iter().any(|c| on(&c.hi)) {
            upper_hits.push(n.clone());
        }
        if !endpoints.iter().any(|e| s.near(e, window.tol())) {
            endpoints.push(s);
        }
    }
    let with = |extra: &[Vec<i64>]| -> IndexedPointSet {
        let mut pts: Vec<SetPoint> = open.points().to_vec();
        pts.extend(extra.iter().map(|n| scheme.set_point(n)));
        IndexedPointSet::from_lattice(scheme.summary().clone(), pts, region.clone())
    };
    let plus = with(&lower_hits);
    let minus = with(&upper_hits);
    let elements = if plus == minus { vec![plus] } else { vec![plus, minus] };
    Ok(FiberReport {
        offset,
        elements,
        hits,
        lower_hits,
        upper_hits,
        boundary_orbits: endpoints.len(),
        multiple_orbits: endpoints.len() > 1,
    })
}

/// Recovers `W` from `cl(Γ⋆)` for a scheme-backed patch `Γ = ⋏(W)`.
///
/// In one internal dimension the sorted stars are split wherever a gap
/// exceeds `threshold` (default: five times the largest nearest-neighbour
/// gap) and each run becomes a closed interval. In two internal dimensions
/// the result is the convex hull of the stars.
pub fn reconstruct_window(p: &IndexedPointSet, threshold: Option<f64>) -> Result<WindowSpec<f64>> {
    let scheme = p.scheme().ok_or(Error::NotSchemeBacked)?;
    if !p.contains(&SetPoint::zero(true)) {
        return Err(Error::InsufficientData("the patch must contain the origin".into()));
    }
    match scheme.m {
        0 => Ok(WindowSpec::point()),
        1 => {
            let mut s: Vec<f64> = p.points().iter().map(|v| v.star[0]).collect();
            s.sort_by(f64::total_cmp);
            s.dedup();
            if s.len() < 2 {
                return Err(Error::InsufficientData("fewer than two distinct stars".into()));
            }
            let gaps: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
            let nn_max = (0..s.len())
                .map(|i| {
                    let left = if i > 0 { gaps[i - 1] } else { f64::INFINITY };
                    let right = gaps.get(i).copied().unwrap_or(f64::INFINITY);
                    left.min(right)
                })
                .fold(0.0, f64::max);
            let cut = threshold.unwrap_or(5.0 * nn_max);
            let mut comps = Vec::new();
            let mut start = s[0];
            for (i, g) in gaps.iter().enumerate() {
                if *g > cut {
                    comps.push(IntervalComponent::closed(start, s[i]));
                    start = s[i + 1];
                }
            }
            comps.push(IntervalComponent::closed(start, s[s.len() - 1]));
            comps.retain(|c| c.hi > c.lo);
            if comps.is_empty() {
                return Err(Error::InsufficientData("all star runs are degenerate".into()));
            }
            WindowSpec::intervals(comps, DEFAULT_TOL)
        }
        2 => {
            let stars: Vec<[f64; 2]> = p.points().iter().map(|v| [v.star[0], v.star[1]]).collect();
            let hull = convex_hull(&stars);
            if hull.len() < 3 {
                return Err(Error::InsufficientData("stars are collinear".into()));
            }
            WindowSpec::polygon(hull, true, DEFAULT_TOL)
        }
        m => Err(Error::UnsupportedDimension { m }),
    }
}

fn set_distance(w: &WindowSpec<f64>, h: &[f64]) -> f64 {
    w.boundary_distance(h).max(0.0)
}

fn directed_hausdorff(a: &WindowSpec<f64>, b: &WindowSpec<f64>) -> f64 {
    match a.shape() {
        WindowShape::Point => 0.0,
        WindowShape::Intervals(cs) => {
            let mut probes: Vec<f64> = cs.iter().flat_map(|c| [c.lo, c.hi]).collect();
            for g in b.components().windows(2) {
                let mid = 0.5 * (g[0].hi + g[1].lo);
                if cs.iter().any(|c| c.lo <= mid && mid <= c.hi) {
                    probes.push(mid);
                }
            }
            probes.iter().map(|&x| set_distance(b, &[x])).fold(0.0, f64::max)
        }
        WindowShape::Polygon { vertices, .. } => vertices.iter().map(|v| set_distance(b, v)).fold(0.0, f64::max),
    }
}

/// Hausdorff distance between the closures of two windows of the same kind.
pub fn window_hausdorff(a: &WindowSpec<f64>, b: &WindowSpec<f64>) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch("windows of different dimension".into()));
    }
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

/// Whether `(t + Γ) ∩ [−M, M]^d = Γ ∩ [−M, M]^d`.
pub fn patch_match(p: &IndexedPointSet, t: &SetPoint, m: f64) -> Result<bool> {
    let d = p.dim();
    let need = Region::centered(m + t.sup_norm(d) + 1e-9, d);
    if !p.region().covers(&need) {
        return Err(Error::RegionTooSmall(format!("patch does not cover the box of radius {m} and its shift")));
    }
    let lo = vec![-m; d];
    let hi = vec![m; d];
    if p.in_box(&lo, &hi).any(|y| !p.contains(&y.sub(t))) {
        return Ok(false);
    }
    let lo_t: Vec<f64> = lo.iter().zip(&t.x).map(|(a, b)| a - b).collect();
    let hi_t: Vec<f64> = hi.iter().zip(&t.x).map(|(a, b)| a - b).collect();
    let ok = p.in_box(&lo_t, &hi_t).all(|x| p.contains(&x.add(t)));
    Ok(ok)
}

/// `ε(M)` for one patch radius.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuityRow {
    pub m: f64,
    /// Every tabulated `t` with `d(t) < ε` matches `Γ` on `[−M, M]^d`.
    pub epsilon: f64,
    /// Number of translations checked before the first mismatch.
    pub tested: usize,
    /// First mismatching translation in order of increasing `d`.
    pub failing: Option<SetPoint>,
}

/// The continuity modulus of `Λ ↦ Λ ∩ [−M, M]^d` with respect to the
/// autocorrelation pseudo-metric, for each `M` in `ms`.
pub fn continuity_epsilon(p: &IndexedPointSet, table: &AutocorrelationTable, ms: &[f64]) -> Result<Vec<ContinuityRow>> {
    let mut ranked = table.d_values();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1));
    let cap = 2.0 * table.eta_zero();
    ms.iter()
        .map(|&m| {
            for (i, (t, dv)) in ranked.iter().enumerate() {
                if !patch_match(p, t, m)? {
                    return Ok(ContinuityRow { m, epsilon: *dv, tested: i, failing: Some(*t) });
                }
            }
            Ok(ContinuityRow { m, epsilon: cap, tested: ranked.len(), failing: None })
        })
        .collect()
}

//! Cut-and-project schemes `(ℝ^d, ℝ^m, 𝓛)` and exact model-set enumeration.
//!
//! A scheme is given by a square basis whose columns generate the lattice
//! `𝓛 ⊂ ℝ^d × ℝ^m`. Lattice points are addressed by their integer index
//! `n`, so every point of an enumerated patch is exact data; physical and
//! internal coordinates are derived from the index.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{integer_kernel_vector, Matrix};
use crate::pointset::{pad_index, IndexedPointSet, SchemeSummary, SetPoint};
use crate::region::{Region, MAX_DIM};
use crate::scalar::{Rational, Scalar};
use crate::window::WindowSpec;

/// Default cap on the number of index rows swept by an enumeration.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Default absolute tolerance of float schemes.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Sup-norm radius of the brute-force injectivity scan in float mode.
pub const INJECTIVITY_RADIUS: i64 = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ArithmeticMode {
    Float { tol: f64 },
    Quadratic { radicand: i64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeScheme<T> {
    d: usize,
    m: usize,
    basis: Matrix<T>,
    basis_inverse: Matrix<T>,
    covolume: T,
    tol: f64,
    summary: Arc<SchemeSummary>,
    inverse_f64: Matrix<f64>,
}

/// A point of `𝓛` with its two projections; equality is equality of
/// indices.
#[derive(Clone, Debug)]
pub struct LatticePoint<T> {
    pub index: Vec<i64>,
    pub physical: Vec<T>,
    pub star: Vec<T>,
}

impl<T> PartialEq for LatticePoint<T> {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index
    }
}

impl<T> Eq for LatticePoint<T> {}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Injectivity {
    /// Decided exactly over the rationals.
    Exact,
    /// No violation with `|n|∞ ≤ radius`; larger indices are unchecked.
    Advisory { radius: i64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensenessDiagnostic {
    pub sample_sizes: [usize; 2],
    pub min_gaps: [f64; 2],
    /// Whether the minimal star gap shrank with the larger sample.
    pub shrinking: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub d: usize,
    pub m: usize,
    pub determinant: f64,
    pub covolume: f64,
    pub lattice_density: f64,
    pub injectivity: Injectivity,
    pub denseness: Option<DensenessDiagnostic>,
    pub arithmetic: ArithmeticMode,
}

/// A dual-lattice vector split into physical and internal parts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualCandidate {
    pub k: Vec<f64>,
    pub k_internal: Vec<f64>,
    pub index: Vec<i64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl<T: Scalar> LatticeScheme<T> {
    /// Builds a scheme from basis rows (columns generate `𝓛`).
    pub fn new(d: usize, m: usize, rows: Vec<Vec<T>>) -> Result<Self> {
        Self::with_tol(d, m, rows, DEFAULT_TOL)
    }

    pub fn with_tol(d: usize, m: usize, rows: Vec<Vec<T>>, tol: f64) -> Result<Self> {
        if d == 0 || d > MAX_DIM || m > MAX_DIM {
            return Err(Error::DimensionMismatch(format!("unsupported dimensions d = {d}, m = {m}")));
        }
        let n = d + m;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("basis must be {n} × {n}")));
        }
        let basis = Matrix::from_rows(rows).expect("square");
        let det = basis.determinant();
        let singular = if T::EXACT { det.is_zero() } else { det.to_f64().abs() <= tol };
        if singular {
            return Err(Error::SingularBasis { det: det.to_f64() });
        }
        let basis_inverse = basis.inverse().ok_or(Error::SingularBasis { det: det.to_f64() })?;
        let covolume = det.abs();
        let basis_f64 = basis.map(Scalar::to_f64);
        let inverse_f64 = basis_inverse.map(Scalar::to_f64);
        let summary = Arc::new(SchemeSummary { d, m, basis: basis_f64, covolume: covolume.to_f64() });
        Ok(LatticeScheme { d, m, basis, basis_inverse, covolume, tol, summary, inverse_f64 })
    }

    /// The crystal `ℤ^d` seen as a scheme with trivial internal space.
    pub fn crystal(d: usize) -> Result<Self> {
        let rows = (0..d)
            .map(|i| (0..d).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        Self::new(d, 0, rows)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `d + m`, the rank of `𝓛`.
    pub fn rank(&self) -> usize {
        self.d + self.m
    }

    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    pub fn basis_inverse(&self) -> &Matrix<T> {
        &self.basis_inverse
    }

    pub fn covolume(&self) -> T {
        self.covolume
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `dens(𝓛) = 1 / covolume`.
    pub fn lattice_density(&self) -> T {
        T::one() / self.covolume
    }

    pub fn summary(&self) -> &Arc<SchemeSummary> {
        &self.summary
    }

    pub fn arithmetic(&self) -> ArithmeticMode {
        if T::EXACT {
            let radicand = self
                .basis
                .rows()
                .iter()
                .flatten()
                .map(|v| v.radicand())
                .find(|&r| r != 0)
                .unwrap_or(0);
            ArithmeticMode::Quadratic { radicand }
        } else {
            ArithmeticMode::Float { tol: self.tol }
        }
    }

    /// Converts every basis entry to another scalar type.
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Result<LatticeScheme<U>> {
        LatticeScheme::with_tol(self.d, self.m, self.basis.map(f).rows(), self.tol)
    }

    pub fn to_f64(&self) -> LatticeScheme<f64> {
        self.map(Scalar::to_f64).expect("an exact basis stays regular in f64")
    }

    /// `basis · n`.
    pub fn lift(&self, index: &[i64]) -> Vec<T> {
        self.basis.mul_int(index)
    }

    /// Physical part `x` of `basis · n`.
    pub fn physical(&self, index: &[i64]) -> Vec<T> {
        let mut z = self.lift(index);
        z.truncate(self.d);
        z
    }

    /// The star map `x ↦ x⋆`, addressed by index.
    pub fn star_map(&self, index: &[i64]) -> Vec<T> {
        self.lift(index).split_off(self.d)
    }

    pub fn point(&self, index: &[i64]) -> LatticePoint<T> {
        let mut physical = self.lift(index);
        let star = physical.split_off(self.d);
        LatticePoint { index: index.to_vec(), physical, star }
    }

    /// The `f64` image of a lattice point as stored in point sets.
    pub fn set_point(&self, index: &[i64]) -> SetPoint {
        self.summary.point(&pad_index(index))
    }

    /// Invertibility, injectivity of the physical projection, covolume and
    /// a denseness diagnostic for the star image.
    pub fn validate_scheme(&self) -> Result<ValidationReport> {
        let injectivity = self.check_injectivity()?;
        let det = self.basis.determinant().to_f64();
        Ok(ValidationReport {
            d: self.d,
            m: self.m,
            determinant: det,
            covolume: self.covolume.to_f64(),
            lattice_density: self.lattice_density().to_f64(),
            injectivity,
            denseness: (self.m > 0).then(|| self.denseness_diagnostic()),
            arithmetic: self.arithmetic(),
        })
    }

    fn check_injectivity(&self) -> Result<Injectivity> {
        let n = self.rank();
        if T::EXACT {
            let mut eqs: Vec<Vec<Rational>> = Vec::with_capacity(2 * self.d);
            for r in 0..self.d {
                let parts: Vec<(Rational, Rational)> = self
                    .basis
                    .row(r)
                    .iter()
                    .map(|v| v.rational_parts().expect("exact scalars split"))
                    .collect();
                eqs.push(parts.iter().map(|p| p.0).collect());
                eqs.push(parts.iter().map(|p| p.1).collect());
            }
            return match integer_kernel_vector(&eqs, n) {
                Some(witness) => Err(Error::InjectivityViolation { witness }),
                None => Ok(Injectivity::Exact),
            };
        }
        let mut radius = INJECTIVITY_RADIUS;
        while radius > 1 && ((2 * radius + 1) as f64).powi(n as i32) > 2e7 {
            radius -= 1;
        }
        let width = (2 * radius + 1) as usize;
        let total = width.pow(n as u32);
        let phys: Vec<Vec<f64>> = (0..self.d).map(|r| self.summary.basis.row(r).to_vec()).collect();
        let witness = (0..total).into_par_iter().find_first(|&code| {
            let mut c = code;
            let mut idx = vec![0i64; n];
            for v in idx.iter_mut() {
                *v = (c % width) as i64 - radius;
                c /= width;
            }
            match idx.iter().find(|&&v| v != 0) {
                Some(&first) if first > 0 => {}
                _ => return false,
            }
            let l1: i64 = idx.iter().map(|v| v.abs()).sum();
            phys.iter().all(|row| {
                let s: f64 = row.iter().zip(&idx).map(|(a, &k)| a * k as f64).sum();
                s.abs() <= self.tol * l1 as f64
            })
        });
        match witness {
            Some(code) => {
                let mut c = code;
                let idx = (0..n)
                    .map(|_| {
                        let v = (c % width) as i64 - radius;
                        c /= width;
                        v
                    })
                    .collect();
                Err(Error::InjectivityViolation { witness: idx })
            }
            None => Ok(Injectivity::Advisory { radius }),
        }
    }

    /// Minimal pairwise star gap over `|n|∞ ≤ k` for two sample sizes.
    pub fn denseness_diagnostic(&self) -> DensenessDiagnostic {
        let n = self.rank();
        let mut k_large = 1usize;
        while ((2 * (k_large + 1) + 1) as f64).powi(n as i32) <= 4000.0 {
            k_large += 1;
        }
        let k_small = (k_large / 2).max(1);
        let gap = |k: usize| -> (usize, f64) {
            let width = 2 * k + 1;
            let total = width.pow(n as u32);
            let stars: Vec<Vec<f64>> = (0..total)
                .map(|mut c| {
                    let idx: Vec<i64> = (0..n)
                        .map(|_| {
                            let v = (c % width) as i64 - k as i64;
                            c /= width;
                            v
                        })
                        .collect();
                    self.summary.basis.mul_int(&idx)[self.d..].to_vec()
                })
                .collect();
            let mut best = f64::INFINITY;
            if self.m == 1 {
                let mut s: Vec<f64> = stars.iter().map(|v| v[0]).collect();
                s.sort_by(f64::total_cmp);
                s.dedup();
                best = s.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
            } else {
                for i in 0..stars.len() {
                    for j in i + 1..stars.len() {
                        let d2: f64 = stars[i].iter().zip(&stars[j]).map(|(a, b)| (a - b).powi(2)).sum();
                        if d2 > 0.0 {
                            best = best.min(d2.sqrt());
                        }
                    }
                }
            }
            (total, best)
        };
        let (n0, g0) = gap(k_small);
        let (n1, g1) = gap(k_large);
        DensenessDiagnostic { sample_sizes: [n0, n1], min_gaps: [g0, g1], shrinking: g1 < 0.75 * g0 }
    }

    /// `θ_H(W) / covolume`.
    pub fn model_density(&self, window: &WindowSpec<T>) -> T {
        window.measure() / self.covolume
    }

    /// Index vectors `n` whose lift lies in the box `lo × hi` (padded by a
    /// small float margin; callers filter exactly).
    pub fn indices_in_box(&self, lo: &[f64], hi: &[f64], budget: u64) -> Result<Vec<Vec<i64>>> {
        enumerate_parallelotope(&self.summary.basis, &self.inverse_f64, lo, hi, budget)
    }

    /// `⋏(W)` restricted to the half-open physical `region`, sorted by
    /// physical coordinates.
    pub fn enumerate_cut(&self, window: &WindowSpec<T>, region: &Region) -> Result<IndexedPointSet> {
        self.enumerate_cut_with_budget(window, region, DEFAULT_BUDGET)
    }

    pub fn enumerate_cut_with_budget(
        &self,
        window: &WindowSpec<T>,
        region: &Region,
        budget: u64,
    ) -> Result<IndexedPointSet> {
        if region.dim() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "region of dimension {} for d = {}",
                region.dim(),
                self.d
            )));
        }
        if window.dim() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "window of dimension {} for m = {}",
                window.dim(),
                self.m
            )));
        }
        let (wlo, whi) = window.bounding_box();
        let mut lo = region.lo.clone();
        let mut hi = region.hi.clone();
        lo.extend(wlo);
        hi.extend(whi);
        let candidates = self.indices_in_box(&lo, &hi, budget)?;
        let rlo: Vec<T> = region.lo.iter().map(|&v| T::from_f64(v)).collect();
        let rhi: Vec<T> = region.hi.iter().map(|&v| T::from_f64(v)).collect();
        let d = self.d;
        let margin = 1e-6;
        let window_f64 = window.to_f64();
        let points: Vec<SetPoint> = candidates
            .par_iter()
            .filter_map(|n| {
                let idx = pad_index(n);
                let (xf, sf) = self.summary.project(&idx);
                let mut near_edge = false;
                for k in 0..d {
                    let scale = margin * (1.0 + xf[k].abs());
                    if xf[k] < region.lo[k] - scale || xf[k] > region.hi[k] + scale {
                        return None;
                    }
                    if (xf[k] - region.lo[k]).abs() <= scale || (xf[k] - region.hi[k]).abs() <= scale {
                        near_edge = true;
                    }
                }
                let star_f: Vec<f64> = sf[..self.m].to_vec();
                let bd = window_f64.boundary_distance(&star_f);
                if bd > margin + window.tol() {
                    return None;
                }
                let exact_needed = near_edge || bd >= -(margin + window.tol());
                if exact_needed {
                    let z = self.lift(n);
                    let inside = (0..d).all(|k| rlo[k] <= z[k] && z[k] < rhi[k]);
                    if !inside || !window.includes(&z[d..]) {
                        return None;
                    }
                    let mut p = SetPoint { x: xf, star: sf, index: Some(idx) };
                    for k in 0..self.m {
                        p.star[k] = z[d + k].to_f64();
                    }
                    return Some(p);
                }
                Some(SetPoint { x: xf, star: sf, index: Some(idx) })
            })
            .collect();
        Ok(IndexedPointSet::from_lattice(self.summary.clone(), points, region.clone()))
    }

    /// Physical projections `k` of dual-lattice vectors with `|k| ≤ k_max`
    /// and internal part `|k_int| ≤ k_max`.
    pub fn dual_candidates(&self, k_max: f64) -> Result<Vec<DualCandidate>> {
        self.dual_candidates_with(k_max, k_max)
    }

    /// As [`dual_candidates`](Self::dual_candidates) with a separate cutoff
    /// on the internal part, which keeps the (dense) projected set finite.
    pub fn dual_candidates_with(&self, k_max: f64, k_int_max: f64) -> Result<Vec<DualCandidate>> {
        let dual = self.inverse_f64.transpose();
        let dual_inv = self.summary.basis.transpose();
        let n = self.rank();
        let mut lo = vec![-k_max; self.d];
        let mut hi = vec![k_max; self.d];
        lo.extend(vec![-k_int_max; self.m]);
        hi.extend(vec![k_int_max; self.m]);
        let idx = enumerate_parallelotope(&dual, &dual_inv, &lo, &hi, DEFAULT_BUDGET)?;
        let mut out: Vec<DualCandidate> = idx
            .into_iter()
            .filter_map(|index| {
                let y = dual.mul_int(&index);
                let k = y[..self.d].to_vec();
                let k_internal = y[self.d..n].to_vec();
                let tol = 1e-9;
                (norm(&k) <= k_max + tol && norm(&k_internal) <= k_int_max + tol)
                    .then_some(DualCandidate { k, k_internal, index })
            })
            .collect();
        out.sort_by(|a, b| {
            norm(&a.k)
                .total_cmp(&norm(&b.k))
                .then_with(|| {
                    a.k.iter()
                        .zip(&b.k)
                        .map(|(x, y)| x.total_cmp(y))
                        .find(|o| o.is_ne())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .then_with(|| norm(&a.k_internal).total_cmp(&norm(&b.k_internal)))
        });
        Ok(out)
    }
}

/// All integer `n` with `mat · n` in the box `[lo, hi]` (padded).
///
/// The integer bounding box of `inv · box` is swept over every coordinate
/// except the widest one, whose admissible range is solved from the row
/// constraints; partial sums prune hopeless prefixes.
pub(crate) fn enumerate_parallelotope(
    mat: &Matrix<f64>,
    inv: &Matrix<f64>,
    lo: &[f64],
    hi: &[f64],
    budget: u64,
) -> Result<Vec<Vec<i64>>> {
    let n = mat.size();
    let scale = lo.iter().chain(hi).fold(1.0f64, |a, v| a.max(v.abs()));
    let pad = 1e-9 * scale;
    let lo: Vec<f64> = lo.iter().map(|v| v - pad).collect();
    let hi: Vec<f64> = hi.iter().map(|v| v + pad).collect();
    if n == 0 {
        return Ok(vec![vec![]]);
    }
    let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (a + b) / 2.0).collect();
    let half: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (b - a) / 2.0).collect();
    let c = inv.mul_vec(&center);
    let mut nlo = vec![0i64; n];
    let mut nhi = vec![0i64; n];
    for i in 0..n {
        let spread: f64 = (0..n).map(|j| inv.get(i, j).abs() * half[j]).sum();
        nlo[i] = (c[i] - spread - 1e-9).floor() as i64;
        nhi[i] = (c[i] + spread + 1e-9).ceil() as i64;
    }
    let solve = (0..n).max_by_key(|&i| nhi[i] - nlo[i]).unwrap();
    let outer: Vec<usize> = (0..n).filter(|&i| i != solve).collect();
    let sweep = outer
        .iter()
        .fold(1u64, |acc, &i| acc.saturating_mul((nhi[i] - nlo[i] + 1) as u64));
    if sweep > budget {
        return Err(Error::RegionTooLarge { candidates: sweep, budget });
    }

    // Row-wise contribution range of each coordinate over its index range.
    let contrib = |r: usize, i: usize| -> (f64, f64) {
        let a = mat.get(r, i) * nlo[i] as f64;
        let b = mat.get(r, i) * nhi[i] as f64;
        (a.min(b), a.max(b))
    };
    let ctx = Sweep { mat, lo: &lo, hi: &hi, nlo: &nlo, nhi: &nhi, outer: &outer, solve };
    let rest_ranges: Vec<Vec<(f64, f64)>> = (0..=outer.len())
        .map(|level| {
            (0..n)
                .map(|r| {
                    let mut free: Vec<usize> = outer[level..].to_vec();
                    free.push(solve);
                    free.iter().fold((0.0, 0.0), |acc, &i| {
                        let (a, b) = contrib(r, i);
                        (acc.0 + a, acc.1 + b)
                    })
                })
                .collect()
        })
        .collect();

    if outer.is_empty() {
        let mut out = Vec::new();
        ctx.finish(&mut vec![0; n], &vec![0.0; n], &mut out);
        return Ok(out);
    }
    let first = outer[0];
    let chunks: Vec<Vec<Vec<i64>>> = (nlo[first]..=nhi[first])
        .into_par_iter()
        .map(|v| {
            let mut idx = vec![0i64; n];
            idx[first] = v;
            let acc: Vec<f64> = (0..n).map(|r| mat.get(r, first) * v as f64).collect();
            let mut out = Vec::new();
            ctx.descend(1, &mut idx, &acc, &rest_ranges, &mut out);
            out
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

struct Sweep<'a> {
    mat: &'a Matrix<f64>,
    lo: &'a [f64],
    hi: &'a [f64],
    nlo: &'a [i64],
    nhi: &'a [i64],
    outer: &'a [usize],
    solve: usize,
}

impl Sweep<'_> {
    fn descend(&self, level: usize, idx: &mut Vec<i64>, acc: &[f64], rest: &[Vec<(f64, f64)>], out: &mut Vec<Vec<i64>>) {
        let n = idx.len();
        for r in 0..n {
            let (a, b) = rest[level][r];
            if acc[r] + b < self.lo[r] || acc[r] + a > self.hi[r] {
                return;
            }
        }
        if level == self.outer.len() {
            self.finish(idx, acc, out);
            return;
        }
        let i = self.outer[level];
        let mut next = acc.to_vec();
        for v in self.nlo[i]..=self.nhi[i] {
            idx[i] = v;
            for r in 0..n {
                next[r] = acc[r] + self.mat.get(r, i) * v as f64;
            }
            self.descend(level + 1, idx, &next, rest, out);
        }
    }

    fn finish(&self, idx: &mut Vec<i64>, acc: &[f64], out: &mut Vec<Vec<i64>>) {
        let n = idx.len();
        let s = self.solve;
        let mut a = self.nlo[s] as f64;
        let mut b = self.nhi[s] as f64;
        for r in 0..n {
            let coef = self.mat.get(r, s);
            let (l, h) = (self.lo[r] - acc[r], self.hi[r] - acc[r]);
            if coef.abs() < 1e-300 {
                if l > 0.0 || h < 0.0 {
                    return;
                }
                continue;
            }
            let (x, y) = if coef > 0.0 { (l / coef, h / coef) } else { (h / coef, l / coef) };
            a = a.max(x);
            b = b.min(y);
        }
        let start = (a - 1e-9).ceil() as i64;
        let end = (b + 1e-9).floor() as i64;
        for v in start..=end {
            idx[s] = v;
            out.push(idx.clone());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::{golden_ratio, QuadSurd};
    use crate::window::IntervalComponent;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    fn fib() -> LatticeScheme<QuadSurd> {
        let t = golden_ratio();
        let one = QuadSurd::one();
        LatticeScheme::new(1, 1, vec![vec![one, t], vec![one, t.conjugate()]]).unwrap()
    }

    fn fib_window() -> WindowSpec<QuadSurd> {
        let one = QuadSurd::one();
        WindowSpec::intervals(
            vec![IntervalComponent::new(-one, golden_ratio() - one, false, true)],
            1e-9,
        )
        .unwrap()
    }

    #[test]
    fn fibonacci_is_valid_with_covolume_sqrt5() {
        let s = fib();
        let report = s.validate_scheme().unwrap();
        assert_eq!(report.injectivity, Injectivity::Exact);
        assert_eq!(s.covolume(), QuadSurd::sqrt(5));
        assert_eq!(s.basis().determinant(), golden_ratio().conjugate() - golden_ratio());
        assert!(report.denseness.unwrap().shrinking);
    }

    #[test]
    fn identity_basis_violates_injectivity() {
        let s = LatticeScheme::<f64>::new(1, 1, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(s.validate_scheme(), Err(Error::InjectivityViolation { witness: vec![0, 1] }));
        let one = QuadSurd::one();
        let z = QuadSurd::zero();
        let e = LatticeScheme::new(1, 1, vec![vec![one, z], vec![z, one]]).unwrap();
        assert_eq!(e.validate_scheme(), Err(Error::InjectivityViolation { witness: vec![0, 1] }));
    }

    #[test]
    fn duplicated_columns_are_singular() {
        let r = LatticeScheme::<f64>::new(1, 1, vec![vec![1.0, 1.0], vec![2.0, 2.0]]);
        assert!(matches!(r, Err(Error::SingularBasis { .. })));
    }

    #[test]
    fn fibonacci_star_map() {
        let s = fib();
        assert_eq!(s.star_map(&[0, 0]), vec![QuadSurd::zero()]);
        assert_eq!(s.star_map(&[1, 0]), vec![QuadSurd::one()]);
        assert_eq!(s.star_map(&[0, 1]), vec![golden_ratio().conjugate()]);
        assert!((s.star_map(&[0, 1])[0].to_f64() + 0.6180339887).abs() < 1e-10);
    }

    /// Oracle: plain double loop over a generous index box.
    #[test]
    fn fibonacci_cut_matches_brute_force() {
        let s = fib();
        let w = fib_window();
        let cut = s.enumerate_cut(&w, &Region::cube(0.0, 100.0, 1)).unwrap();
        let tau = (1.0 + 5f64.sqrt()) / 2.0;
        let tau_c = (1.0 - 5f64.sqrt()) / 2.0;
        let mut brute = Vec::new();
        for a in -300i64..300 {
            for b in -300i64..300 {
                let x = a as f64 + b as f64 * tau;
                let h = a as f64 + b as f64 * tau_c;
                if (0.0..100.0).contains(&x) && h > -1.0 && h <= tau - 1.0 {
                    brute.push((x, [a, b]));
                }
            }
        }
        brute.sort_by(|p, q| p.0.total_cmp(&q.0));
        let got: Vec<[i64; 2]> = cut.points().iter().map(|p| [p.index.unwrap()[0], p.index.unwrap()[1]]).collect();
        let want: Vec<[i64; 2]> = brute.iter().map(|p| p.1).collect();
        assert_eq!(got, want);
        let expected = 100.0 * tau / 5f64.sqrt();
        assert!((cut.len() as f64 - expected).abs() < 3.0);
    }

    #[test]
    fn empty_interior_and_budget() {
        let s = fib();
        let w = fib_window();
        let r = s.enumerate_cut_with_budget(&w, &Region::cube(0.0, 1e6, 1), 1000);
        assert!(matches!(r, Err(Error::RegionTooLarge { .. })));
        assert!(WindowSpec::<f64>::closed_interval(0.0, 0.0).is_err());
    }

    #[test]
    fn model_density_of_fibonacci() {
        let s = fib();
        let dens = s.model_density(&fib_window());
        assert_eq!(dens, golden_ratio() / QuadSurd::sqrt(5));
        assert!((dens.to_f64() - 0.7236067977).abs() < 1e-9);
    }

    #[test]
    fn crystal_duals_are_integers() {
        let z = LatticeScheme::<f64>::crystal(1).unwrap();
        let ks: Vec<f64> = z.dual_candidates(3.0).unwrap().iter().map(|c| c.k[0]).collect();
        assert_eq!(ks, vec![0.0, -1.0, 1.0, -2.0, 2.0, -3.0, 3.0]);
        assert_eq!(z.dual_candidates(0.5).unwrap().len(), 1);
    }

    /// Oracle: dual vectors are `m · (rows of B⁻¹)`; scan a wide index box.
    #[test]
    fn fibonacci_duals_match_brute_force() {
        let s = fib().to_f64();
        let got = s.dual_candidates(5.0).unwrap();
        let inv = s.basis_inverse().clone();
        let mut want = Vec::new();
        for a in -40i64..=40 {
            for b in -40i64..=40 {
                let k = a as f64 * inv.get(0, 0) + b as f64 * inv.get(1, 0);
                let ki = a as f64 * inv.get(0, 1) + b as f64 * inv.get(1, 1);
                if k.abs() <= 5.0 + 1e-9 && ki.abs() <= 5.0 + 1e-9 {
                    want.push(k);
                }
            }
        }
        want.sort_by(|x, y| x.abs().total_cmp(&y.abs()).then(x.total_cmp(y)));
        let ks: Vec<f64> = got.iter().map(|c| c.k[0]).collect();
        assert_eq!(ks.len(), want.len());
        for (a, b) in ks.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9);
        }
        for c in &got {
            let y = [c.k[0], c.k_internal[0]];
            for j in 0..2 {
                let col = s.basis().column(j);
                let pairing = y[0] * col[0] + y[1] * col[1];
                assert!((pairing - pairing.round()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn float_and_exact_cuts_agree_away_from_boundary() {
        let s = fib();
        let sf = s.to_f64();
        let w = fib_window().translate(&[QuadSurd::rational(1, 7)]);
        let wf = w.to_f64();
        let r = Region::cube(-200.0, 200.0, 1);
        let a = s.enumerate_cut(&w, &r).unwrap();
        let b = sf.enumerate_cut(&wf, &r).unwrap();
        assert_eq!(a.points(), b.points());
    }

    proptest! {
        #[test]
        fn star_map_is_additive(a in -1000i64..1000, b in -1000i64..1000, c in -1000i64..1000, e in -1000i64..1000) {
            let s = fib();
            let lhs = s.star_map(&[a + c, b + e]);
            let rhs = s.star_map(&[a, b])[0] + s.star_map(&[c, e])[0];
            prop_assert_eq!(lhs[0], rhs);
            let sf = s.to_f64();
            let l = sf.star_map(&[a + c, b + e])[0];
            let r = sf.star_map(&[a, b])[0] + sf.star_map(&[c, e])[0];
            prop_assert!((l - r).abs() < 1e-9);
        }

        #[test]
        fn cut_is_monotone_in_window(lo in -1.0f64..0.0, len in 0.1f64..1.5, extra in 0.0f64..0.5) {
            let s = fib().to_f64();
            let r = Region::cube(-60.0, 60.0, 1);
            let small = WindowSpec::half_open(lo, lo + len).unwrap();
            let big = WindowSpec::half_open(lo - extra, lo + len + extra).unwrap();
            let a = s.enumerate_cut(&small, &r).unwrap();
            let b = s.enumerate_cut(&big, &r).unwrap();
            for p in a.points() {
                prop_assert!(b.contains(p));
            }
        }

        #[test]
        fn cut_is_additive_over_regions(split in -40.0f64..40.0) {
            let s = fib();
            let w = fib_window();
            let whole = s.enumerate_cut(&w, &Region::cube(-50.0, 50.0, 1)).unwrap();
            let left = s.enumerate_cut(&w, &Region::cube(-50.0, split, 1)).unwrap();
            let right = s.enumerate_cut(&w, &Region::cube(split, 50.0, 1)).unwrap();
            let mut joined: Vec<SetPoint> = left.points().to_vec();
            joined.extend_from_slice(right.points());
            prop_assert_eq!(joined, whole.points().to_vec());
        }
    }
}

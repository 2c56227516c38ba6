//! Finite Fourier–Bohr sums, diffraction intensity tables and the
//! separation fraction of generic torus points.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cps::LatticeScheme;
use crate::error::{Error, Result};
use crate::pointset::IndexedPointSet;
use crate::region::VanHove;
use crate::scalar::Scalar;
use crate::torus::{singularity_test, TorusPoint};
use crate::window::WindowSpec;

/// Points per partial sum; partial sums are merged in a fixed order so the
/// result does not depend on the thread count.
pub const BLOCK: usize = 4096;

/// Resolution of the sampled torus coordinates (`2^-20`).
pub const TORUS_RESOLUTION: i64 = 1 << 20;

fn phase_sum(points: &[[f64; 3]], k: &[f64]) -> Complex64 {
    let d = k.len();
    let blocks: Vec<Complex64> = points
        .par_chunks(BLOCK)
        .map(|chunk| {
            chunk
                .iter()
                .map(|x| {
                    let dot: f64 = (0..d).map(|i| k[i] * x[i]).sum();
                    Complex64::from_polar(1.0, -std::f64::consts::TAU * dot)
                })
                .sum()
        })
        .collect();
    blocks.into_iter().sum()
}

/// `c_n(k) = vol(A_n)^{-1} Σ_{x ∈ Λ ∩ A_n} e^{−2πi k·x}` for each box.
pub fn weyl_sum(p: &IndexedPointSet, k: &[f64], boxes: &VanHove) -> Result<Vec<Complex64>> {
    if k.len() != p.dim() || boxes.dim != p.dim() {
        return Err(Error::DimensionMismatch("frequency, boxes and patch must share a dimension".into()));
    }
    if !p.region().covers(&boxes.largest()) {
        return Err(Error::RegionTooSmall("patch does not cover the largest box".into()));
    }
    Ok((0..boxes.len())
        .map(|n| {
            let b = boxes.region(n);
            let pts: Vec<[f64; 3]> = p.in_region(&b).map(|x| x.x).collect();
            phase_sum(&pts, k) / b.volume()
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeakEntry {
    pub k: Vec<f64>,
    /// `(re, im)` of `c_n(k)` per box.
    pub amplitudes: Vec<[f64; 2]>,
    /// `|c(k)|²` at the largest box.
    pub intensity: f64,
}

impl PeakEntry {
    pub fn amplitude(&self, n: usize) -> Complex64 {
        Complex64::new(self.amplitudes[n][0], self.amplitudes[n][1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeakTable {
    pub entries: Vec<PeakEntry>,
    pub controls: Vec<PeakEntry>,
    /// Largest control `|c(k)|` at the largest box.
    pub purity: f64,
    /// `η(0)` at the largest box.
    pub density: f64,
}

fn entry(p: &IndexedPointSet, k: Vec<f64>, boxes: &VanHove) -> Result<PeakEntry> {
    let c = weyl_sum(p, &k, boxes)?;
    let intensity = c[c.len() - 1].norm_sqr();
    Ok(PeakEntry { k, amplitudes: c.iter().map(|z| [z.re, z.im]).collect(), intensity })
}

/// Intensities at the candidate Bragg positions with `|k| ≤ k_max`, plus
/// `n_controls` seeded control frequencies with `k_max/4 ≤ |k| ≤ k_max`
/// kept at least `10⁻³` away from every candidate.
pub fn diffraction_table(
    p: &IndexedPointSet,
    candidates: &[Vec<f64>],
    k_max: f64,
    n_controls: usize,
    seed: u64,
    boxes: &VanHove,
) -> Result<PeakTable> {
    let d = p.dim();
    let norm = |k: &[f64]| k.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut ks: Vec<Vec<f64>> = candidates.iter().filter(|k| norm(k) <= k_max).cloned().collect();
    ks.sort_by(|a, b| norm(a).total_cmp(&norm(b)));
    let entries = ks.iter().map(|k| entry(p, k.clone(), boxes)).collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut controls = Vec::with_capacity(n_controls);
    let mut attempts = 0usize;
    while controls.len() < n_controls {
        attempts += 1;
        if attempts > 1000 * (n_controls + 1) {
            return Err(Error::InsufficientData("candidates leave no room for control frequencies".into()));
        }
        let radius = rng.gen_range(0.25 * k_max..=k_max);
        let mut dir: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = norm(&dir);
        if !(len > 1e-6 && len <= 1.0) {
            continue;
        }
        dir.iter_mut().for_each(|v| *v *= radius / len);
        let clear = candidates.iter().all(|c| {
            let diff: Vec<f64> = c.iter().zip(&dir).map(|(a, b)| a - b).collect();
            norm(&diff) >= 1e-3
        });
        if clear {
            controls.push(dir);
        }
    }
    let controls = controls.into_iter().map(|k| entry(p, k, boxes)).collect::<Result<Vec<_>>>()?;
    let last = boxes.largest();
    let density = p.in_region(&last).count() as f64 / last.volume();
    let purity = controls.iter().map(|c| c.intensity.sqrt()).fold(0.0, f64::max);
    Ok(PeakTable { entries, controls, purity, density })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationReport {
    pub samples: usize,
    pub singular: usize,
    /// `1 − singular / samples`.
    pub fraction: f64,
    /// Fractional coordinates of the singular samples.
    pub singular_points: Vec<Vec<f64>>,
}

/// Share of seeded random torus points that are non-singular within `r`.
///
/// Coordinates are multiples of `2^-20` in `(0, 1)` so that exact scalars
/// represent them without rounding.
pub fn separation_fraction<T: Scalar>(
    scheme: &LatticeScheme<T>,
    window: &WindowSpec<T>,
    samples: usize,
    seed: u64,
    r: f64,
) -> Result<SeparationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let denom = T::from_i64(TORUS_RESOLUTION);
    let points: Vec<TorusPoint<T>> = (0..samples)
        .map(|_| {
            TorusPoint::from_coords(
                (0..scheme.rank())
                    .map(|_| T::from_i64(rng.gen_range(1..TORUS_RESOLUTION)) / denom)
                    .collect(),
            )
        })
        .collect();
    let mut singular_points = Vec::new();
    for tp in &points {
        if !singularity_test(scheme, window, tp, r)?.is_empty() {
            singular_points.push(tp.to_f64());
        }
    }
    let singular = singular_points.len();
    let fraction = if samples == 0 { 1.0 } else { 1.0 - singular as f64 / samples as f64 };
    Ok(SeparationReport { samples, singular, fraction, singular_points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::QuadSurd;
    use crate::region::Region;
    use crate::schemes::{fibonacci, fibonacci_window, integer_crystal};
    use crate::window::WindowSpec;

    #[test]
    fn integer_lattice_peaks() {
        let s = integer_crystal::<f64>(1);
        let p = s.enumerate_cut(&WindowSpec::point(), &Region::centered(600.0, 1)).unwrap();
        let boxes = VanHove::centered(&[100.0, 500.0], 1);
        let c = weyl_sum(&p, &[1.0], &boxes).unwrap();
        assert!((c[1] - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        let c = weyl_sum(&p, &[0.5], &boxes).unwrap();
        assert!(c[1].norm() < 0.01);
    }

    #[test]
    fn block_merge_is_exact_for_small_sets() {
        let s = integer_crystal::<f64>(1);
        let p = s.enumerate_cut(&WindowSpec::point(), &Region::centered(6000.0, 1)).unwrap();
        let boxes = VanHove::centered(&[5000.0], 1);
        let k = 0.123_456;
        let serial: Complex64 = p
            .in_region(&boxes.largest())
            .map(|x| Complex64::from_polar(1.0, -std::f64::consts::TAU * k * x.x[0]))
            .sum::<Complex64>()
            / 10000.0;
        let blocked = weyl_sum(&p, &[k], &boxes).unwrap()[0];
        assert!((serial - blocked).norm() < 1e-12);
    }

    #[test]
    fn controls_avoid_candidates_and_are_seeded() {
        let s = fibonacci().to_f64();
        let w = fibonacci_window().to_f64();
        let p = s.enumerate_cut(&w, &Region::centered(1200.0, 1)).unwrap();
        let boxes = VanHove::centered(&[1000.0], 1);
        let cands: Vec<Vec<f64>> = s.dual_candidates_with(2.0, 0.5).unwrap().into_iter().map(|c| c.k).collect();
        let a = diffraction_table(&p, &cands, 2.0, 10, 3, &boxes).unwrap();
        let b = diffraction_table(&p, &cands, 2.0, 10, 3, &boxes).unwrap();
        assert_eq!(a, b);
        for c in &a.controls {
            assert!(c.k[0].abs() >= 0.5 && c.k[0].abs() <= 2.0);
            assert!(cands.iter().all(|k| (k[0] - c.k[0]).abs() >= 1e-3));
        }
        assert!((a.entries[0].intensity - a.density * a.density).abs() < 1e-12);
    }

    #[test]
    fn thick_boundary_band_is_detected() {
        let s = fibonacci().to_f64();
        let w = fibonacci_window().to_f64();
        let thin = separation_fraction(&s, &w.clone().with_tol(0.002), 200, 9, 20.0).unwrap();
        let thick = separation_fraction(&s, &w.with_tol(0.01), 200, 9, 20.0).unwrap();
        assert!(thin.singular > 0);
        assert!(thick.singular > thin.singular);
        // hits near the two endpoints come in pairs (the window length τ is a
        // star), so one band of width 2b over [−R, R) sets the rate
        let expect = |b: f64| 2.0 * b * 40.0 / 5f64.sqrt();
        let got = 1.0 - thick.fraction;
        assert!((got - expect(0.01)).abs() < 0.1, "{got}");
    }

    #[test]
    fn constructed_hit_is_flagged() {
        let s = fibonacci();
        let w = fibonacci_window();
        let h = w.components()[0].hi - s.star_map(&[2, 1])[0];
        let tp = crate::torus::beta_of_cut(&s, &[QuadSurd::rational(0, 1)], &[h]);
        assert!(!singularity_test(&s, &w, &tp, 50.0).unwrap().is_empty());
    }

    #[test]
    fn random_torus_points_are_regular() {
        let r = separation_fraction(&fibonacci(), &fibonacci_window(), 50, 11, 200.0).unwrap();
        assert_eq!(r.singular, 0);
        assert_eq!(r.fraction, 1.0);
    }
}

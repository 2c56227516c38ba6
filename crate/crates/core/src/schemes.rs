//! Standard fixtures: the Fibonacci and silver-mean chains, the
//! Ammann–Beenker point set, the integer crystal and a hard-core random
//! point cloud.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::cps::LatticeScheme;
use crate::error::Result;
use crate::pointset::IndexedPointSet;
use crate::quadratic::{golden_ratio, QuadSurd};
use crate::region::Region;
use crate::scalar::Scalar;
use crate::window::{convex_hull, IntervalComponent, WindowSpec, DEFAULT_TOL};

fn int(v: i64) -> QuadSurd {
    <QuadSurd as Scalar>::from_i64(v)
}

/// Generic shift applied to the Fibonacci window so that no lattice star
/// lands on its boundary.
pub fn generic_shift() -> QuadSurd {
    QuadSurd::rational(1, 7)
}

/// `𝓛 = {(a + bτ, a + bτ')}` in `ℝ × ℝ`.
pub fn fibonacci() -> LatticeScheme<QuadSurd> {
    let tau = golden_ratio();
    LatticeScheme::new(1, 1, vec![vec![int(1), tau], vec![int(1), tau.conjugate()]]).expect("Fibonacci basis")
}

/// `W = (−1, τ − 1]`.
pub fn fibonacci_window() -> WindowSpec<QuadSurd> {
    let comp = IntervalComponent::new(int(-1), golden_ratio() - int(1), false, true);
    WindowSpec::intervals(vec![comp], DEFAULT_TOL).expect("Fibonacci window")
}

/// `W + 1/7`, a window in generic position.
pub fn fibonacci_generic_window() -> WindowSpec<QuadSurd> {
    fibonacci_window().translate(&[generic_shift()])
}

/// `𝓛 = {(a + b(1 + √2), a + b(1 − √2))}`.
pub fn silver_mean() -> LatticeScheme<QuadSurd> {
    let s = QuadSurd::sqrt(2);
    LatticeScheme::new(1, 1, vec![vec![int(1), int(1) + s], vec![int(1), int(1) - s]]).expect("silver basis")
}

/// `W = [1 − √2, 1)`.
pub fn silver_mean_window() -> WindowSpec<QuadSurd> {
    WindowSpec::half_open(int(1) - QuadSurd::sqrt(2), int(1)).expect("silver window")
}

fn eighth_roots(step: i64) -> Vec<[QuadSurd; 2]> {
    let h = QuadSurd::new(Zero::zero(), crate::scalar::Rational::new(1, 2), 2);
    let table = [
        [int(1), int(0)],
        [h, h],
        [int(0), int(1)],
        [-h, h],
        [int(-1), int(0)],
        [-h, -h],
        [int(0), int(-1)],
        [h, -h],
    ];
    (0..4).map(|k| table[((k * step) % 8) as usize]).collect()
}

/// Rank-4 lattice in `ℝ² × ℝ²` spanned by `(e_k, e_k⋆)`, with `e_k` at
/// angle `kπ/4` and `e_k⋆` at angle `3kπ/4`.
pub fn ammann_beenker() -> LatticeScheme<QuadSurd> {
    let e = eighth_roots(1);
    let s = eighth_roots(3);
    let rows = vec![
        e.iter().map(|v| v[0]).collect(),
        e.iter().map(|v| v[1]).collect(),
        s.iter().map(|v| v[0]).collect(),
        s.iter().map(|v| v[1]).collect(),
    ];
    LatticeScheme::new(2, 2, rows).expect("Ammann-Beenker basis")
}

/// The closed regular octagon spanned by `½ Σ ±e_k⋆`.
pub fn ammann_beenker_window() -> WindowSpec<QuadSurd> {
    let s = eighth_roots(3);
    let half = QuadSurd::rational(1, 2);
    let mut corners = Vec::with_capacity(16);
    for mask in 0..16u32 {
        let mut c = [QuadSurd::zero(), QuadSurd::zero()];
        for (k, v) in s.iter().enumerate() {
            let sign = if mask >> k & 1 == 1 { half } else { -half };
            c[0] = c[0] + sign * v[0];
            c[1] = c[1] + sign * v[1];
        }
        corners.push(c);
    }
    WindowSpec::polygon(convex_hull(&corners), true, DEFAULT_TOL).expect("octagon")
}

/// `ℤ^d` as a scheme with trivial internal space.
pub fn integer_crystal<T: Scalar>(d: usize) -> LatticeScheme<T> {
    LatticeScheme::crystal(d).expect("identity basis")
}

/// One-dimensional hard-core point cloud on `region`: gaps are `hard_core`
/// plus an exponential with the mean needed to reach `density`.
pub fn random_fixture(seed: u64, region: &Region, density: f64, hard_core: f64) -> Result<IndexedPointSet> {
    let mean_gap = 1.0 / density;
    let extra = Exp::new(1.0 / (mean_gap - hard_core).max(f64::MIN_POSITIVE)).expect("positive rate");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (region.lo[0], region.hi[0]);
    let mut x = lo + rng.gen::<f64>() * mean_gap;
    let mut pts = Vec::new();
    while x < hi {
        pts.push(vec![x]);
        x += hard_core + extra.sample(&mut rng);
    }
    IndexedPointSet::from_raw(pts, region.clone())
}

/// Exact `τ`.
pub fn tau() -> QuadSurd {
    golden_ratio()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::window::Membership;

    #[test]
    fn fibonacci_endpoints_are_stars() {
        let s = fibonacci();
        let w = fibonacci_window();
        assert_eq!(s.star_map(&[-1, 0]), vec![int(-1)]);
        assert_eq!(s.star_map(&[0, -1]), vec![tau() - int(1)]);
        assert_eq!(w.contains(&s.star_map(&[-1, 0])), Membership::Boundary);
        assert!(!w.includes(&s.star_map(&[-1, 0])));
        assert!(w.includes(&s.star_map(&[0, -1])));
    }

    #[test]
    fn fibonacci_density_and_gaps() {
        let s = fibonacci();
        let w = fibonacci_window();
        assert!((s.model_density(&w).to_f64() - 0.723_606_797_749_979).abs() < 1e-12);
        let p = s.enumerate_cut(&w, &Region::cube(-50.0, 50.0, 1)).unwrap();
        let xs: Vec<f64> = p.points().iter().map(|v| v.x[0]).collect();
        for g in xs.windows(2).map(|w| w[1] - w[0]) {
            assert!((g - 1.0).abs() < 1e-9 || (g - 1.618_033_988_749_895).abs() < 1e-9, "gap {g}");
        }
    }

    #[test]
    fn silver_mean_density() {
        let s = silver_mean();
        assert!((s.model_density(&silver_mean_window()).to_f64() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ammann_beenker_geometry() {
        let s = ammann_beenker();
        assert_eq!(s.covolume(), int(4));
        let w = ammann_beenker_window();
        let area = w.measure().to_f64();
        assert!((area - 2.0 * (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!(matches!(w.shape(), crate::window::WindowShape::Polygon { vertices, .. } if vertices.len() == 8));
        let p = s.enumerate_cut(&w, &Region::centered(12.0, 2)).unwrap();
        let dens = p.len() as f64 / p.region().volume();
        assert!((dens - s.model_density(&w).to_f64()).abs() < 0.1, "{dens}");
        let nn = crate::pointset::packing_radius(&p).unwrap();
        assert!((2.0 * nn - (2.0 - 2f64.sqrt()).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn random_fixture_is_seeded() {
        let r = Region::cube(0.0, 2000.0, 1);
        let a = random_fixture(7, &r, 0.7236, 0.5).unwrap();
        let b = random_fixture(7, &r, 0.7236, 0.5).unwrap();
        assert_eq!(a, b);
        assert!((a.len() as f64 / 2000.0 - 0.7236).abs() < 0.05);
    }
}

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use modelset::autocorr::{almost_periods, eta_table, pairwise_d, predicted_d, symdiff_density};
use modelset::meyer::{generator_norm, m1_cover, stepping_certificate, MeyerContext};
use modelset::pointset::{difference_set, flc_clusters_quantized, packing_radius, period_candidates, SetPoint};
use modelset::schemes::*;
use modelset::spectral::{separation_fraction, weyl_sum};
use modelset::torus::{
    beta_of_cut, continuity_epsilon, embed_translation, fiber_enumerate, reconstruct_window, representative,
    TorusPoint,
};
use modelset::window::stabilizer_check;
use modelset::{
    ExactScheme, ExactWindow, F32Scheme, FloatScheme, IndexedPointSet, Membership, QuadSurd, Region, Scalar, VanHove,
    WindowSpec,
};

fn exact_fixtures() -> Vec<(&'static str, ExactScheme, ExactWindow)> {
    vec![
        ("fibonacci", fibonacci(), fibonacci_window()),
        ("fibonacci-generic", fibonacci(), fibonacci_generic_window()),
        ("silver", silver_mean(), silver_mean_window()),
        ("ammann-beenker", ammann_beenker(), ammann_beenker_window()),
    ]
}

fn patch(s: &ExactScheme, w: &ExactWindow, half: f64) -> IndexedPointSet {
    s.enumerate_cut(w, &Region::centered(half, s.d())).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn index_strategy(n: usize) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-40i64..40, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn star_map_is_additive(a in index_strategy(4), b in index_strategy(4)) {
        for (_, s, _) in exact_fixtures() {
            let n = s.rank();
            let sum: Vec<i64> = a[..n].iter().zip(&b[..n]).map(|(x, y)| x + y).collect();
            let lhs = s.star_map(&sum);
            let rhs: Vec<QuadSurd> = s.star_map(&a[..n]).iter().zip(s.star_map(&b[..n])).map(|(x, y)| *x + y).collect();
            prop_assert_eq!(lhs, rhs);
            let f = s.to_f64();
            let lf = f.star_map(&sum);
            let rf: Vec<f64> = f.star_map(&a[..n]).iter().zip(f.star_map(&b[..n])).map(|(x, y)| x + y).collect();
            prop_assert!(lf.iter().zip(&rf).all(|(x, y)| (x - y).abs() <= 1e-9));
        }
    }

    #[test]
    fn generator_norm_triangle(a in index_strategy(2), b in index_strategy(2)) {
        let s = fibonacci();
        let (x, y) = (s.set_point(&a), s.set_point(&b));
        prop_assert!(generator_norm(&x.add(&y)).unwrap() <= generator_norm(&x).unwrap() + generator_norm(&y).unwrap());
    }

    #[test]
    fn boundary_predicates_agree(lo in -5.0f64..5.0, len in 0.1f64..4.0, h in -10.0f64..10.0, tol in 1e-9f64..1e-3) {
        let w = WindowSpec::half_open(lo, lo + len).unwrap().with_tol(tol);
        match w.contains(&[h]) {
            Membership::Interior => prop_assert!(w.boundary_distance(&[h]) < -tol),
            Membership::Exterior => prop_assert!(w.boundary_distance(&[h]) > tol),
            Membership::Boundary => prop_assert!(w.boundary_distance(&[h]).abs() <= tol),
        }
    }

    #[test]
    fn measure_is_translation_invariant(n in -50i128..50, d in 1i128..30) {
        for (_, _, w) in exact_fixtures() {
            let t = vec![QuadSurd::rational(n, d); w.dim()];
            prop_assert_eq!(w.translate(&t).measure(), w.measure());
        }
    }

    #[test]
    fn torus_covariance(xa in -20i128..20, ha in -20i128..20, den in 1i128..9, n in index_strategy(4)) {
        for (_, s, _) in exact_fixtures() {
            let d = s.d();
            let x = vec![QuadSurd::rational(xa, den); d];
            let h = vec![QuadSurd::rational(ha, den + 1); s.m()];
            let t = s.physical(&n[..s.rank()]);
            let xt: Vec<QuadSurd> = x.iter().zip(&t).map(|(a, b)| *a + *b).collect();
            prop_assert_eq!(
                beta_of_cut(&s, &xt, &h),
                embed_translation(&s, &t).add(&beta_of_cut(&s, &x, &h))
            );
        }
    }

    #[test]
    fn conjugate_symmetry(k in -3.0f64..3.0) {
        let s = fibonacci().to_f64();
        let p = s.enumerate_cut(&fibonacci_window().to_f64(), &Region::centered(300.0, 1)).unwrap();
        let boxes = VanHove::centered(&[100.0, 250.0], 1);
        let a = weyl_sum(&p, &[k], &boxes).unwrap();
        let b = weyl_sum(&p, &[-k], &boxes).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y.conj()).norm() < 1e-12);
            prop_assert!((x.norm_sqr() - y.norm_sqr()).abs() < 1e-12);
        }
    }
}

#[test]
fn float_and_single_precision_schemes_build() {
    let f: FloatScheme = fibonacci().to_f64();
    let g: F32Scheme = fibonacci().map(|v| v.to_f64() as f32).unwrap();
    let wf = fibonacci_window().to_f64();
    let wg = fibonacci_window().map(|v| v.to_f64() as f32).with_tol(1e-5);
    let region = Region::cube(0.0, 200.0, 1);
    let a = f.enumerate_cut(&wf, &region).unwrap();
    let b = g.enumerate_cut(&wg, &region).unwrap();
    let c = fibonacci().enumerate_cut(&fibonacci_window(), &region).unwrap();
    assert_eq!(a.len(), c.len());
    assert!((b.len() as i64 - c.len() as i64).abs() <= 2);
}

#[test]
fn density_converges_at_ten_thousand_points() {
    for (name, s, w) in exact_fixtures() {
        let target = s.model_density(&w).to_f64();
        let half = if s.d() == 1 { (1e4 / target) / 2.0 + 1.0 } else { ((1e4 / target).sqrt() / 2.0).ceil() + 1.0 };
        let p = s.enumerate_cut(&w, &Region::cube(0.0, 2.0 * half, s.d())).unwrap();
        assert!(p.len() >= 10_000, "{name}");
        let dens = p.len() as f64 / p.region().volume();
        assert!(rel(dens, target) < 0.01, "{name}: {dens} vs {target}");
    }
}

#[test]
fn cut_is_uniformly_discrete_and_stable() {
    for (name, s, w) in exact_fixtures() {
        let r = if s.d() == 1 { 100.0 } else { 8.0 };
        let a = packing_radius(&patch(&s, &w, r)).unwrap();
        let b = packing_radius(&patch(&s, &w, 2.0 * r)).unwrap();
        assert!(a > 0.0 && (a - b).abs() < 1e-9, "{name}: {a} vs {b}");
    }
}

#[test]
fn cut_is_monotone_and_additive_in_two_dimensions() {
    let s = ammann_beenker();
    let w = ammann_beenker_window();
    let half = QuadSurd::rational(1, 2);
    let inner = match w.shape() {
        modelset::WindowShape::Polygon { vertices, .. } => {
            WindowSpec::polygon(vertices.iter().map(|v| [v[0] * half, v[1] * half]).collect(), true, 1e-9).unwrap()
        }
        _ => unreachable!(),
    };
    let region = Region::centered(6.0, 2);
    let big = s.enumerate_cut(&w, &region).unwrap();
    let small = s.enumerate_cut(&inner, &region).unwrap();
    assert!(!small.is_empty() && small.len() < big.len());
    assert!(small.points().iter().all(|p| big.contains(p)));
    let left = s.enumerate_cut(&w, &Region::new(vec![-6.0, -6.0], vec![0.0, 6.0]).unwrap()).unwrap();
    let right = s.enumerate_cut(&w, &Region::new(vec![0.0, -6.0], vec![6.0, 6.0]).unwrap()).unwrap();
    assert_eq!(left.len() + right.len(), big.len());
    assert!(left.points().iter().chain(right.points()).all(|p| big.contains(p)));
}

#[test]
fn minkowski_difference_contains_zero_in_interior() {
    for (name, _, w) in exact_fixtures() {
        let dw = w.minkowski_difference().unwrap();
        let zero = vec![QuadSurd::rational(0, 1); w.dim()];
        assert_eq!(dw.contains(&zero), Membership::Interior, "{name}");
    }
}

#[test]
fn shipped_windows_are_irredundant() {
    let cands: Vec<Vec<f64>> = (-20..=20).map(|i| vec![i as f64 * 0.05]).collect();
    let cands2: Vec<Vec<f64>> = cands.iter().flat_map(|a| cands.iter().map(move |b| vec![a[0], b[0]])).collect();
    for (name, _, w) in exact_fixtures() {
        let c = if w.dim() == 1 { &cands } else { &cands2 };
        let r = stabilizer_check(&w.to_f64(), w.dim(), c);
        assert_eq!(r.members, vec![vec![0.0; w.dim()]], "{name}");
    }
}

#[test]
fn difference_sets_are_symmetric_and_meyer() {
    for (name, s, w) in exact_fixtures() {
        let r = if s.d() == 1 { 15.0 } else { 3.0 };
        let p = patch(&s, &w, if s.d() == 1 { 200.0 } else { 14.0 });
        let delta = difference_set(&p, r).unwrap();
        for x in delta.points() {
            assert!(delta.contains(&x.neg()), "{name}");
        }
        let f = m1_cover(&p, r).unwrap();
        assert!(f.card() < delta.len(), "{name}");
        assert!(packing_radius(&delta).unwrap() > 0.0, "{name}");
        let f2 = m1_cover(&p, 2.0 * r).unwrap();
        if f2.card() == f.card() {
            let dd = difference_set(&delta, r / 2.0).unwrap();
            assert!(packing_radius(&dd).unwrap() > 0.0, "{name}");
        }
    }
}

#[test]
fn cluster_census_is_resolution_independent() {
    let s = fibonacci();
    let p = patch(&s, &fibonacci_window(), 300.0);
    let counts: Vec<usize> = [Some(1e-3), Some(1e-6), None]
        .iter()
        .map(|q| flc_clusters_quantized(&p, 4.0, *q).unwrap().count())
        .collect();
    assert!(counts.windows(2).all(|c| c[1] <= c[0]), "{counts:?}");
    assert_eq!(counts[0], counts[2]);
}

#[test]
fn aperiodic_sets_have_no_periods() {
    for (name, s, w) in exact_fixtures() {
        let p = patch(&s, &w, if s.d() == 1 { 300.0 } else { 16.0 });
        let r = period_candidates(&p, if s.d() == 1 { 30.0 } else { 3.0 }).unwrap();
        assert_eq!(r.periods.len(), 1, "{name}");
        assert!(r.periods[0].is_zero());
    }
    let z = integer_crystal::<f64>(2);
    let p = z.enumerate_cut(&WindowSpec::point(), &Region::centered(12.0, 2)).unwrap();
    let r = period_candidates(&p, 2.0).unwrap();
    assert!(r.is_full_rank(2));
}

#[test]
fn autocorrelation_identities_on_one_dimensional_schemes() {
    for (name, s, w) in exact_fixtures().into_iter().filter(|f| f.1.d() == 1) {
        let p = patch(&s, &w, 2100.0);
        let boxes = VanHove::centered(&[1000.0, 2000.0], 1);
        let table = eta_table(&p, 50.0, &boxes).unwrap();
        let zero = p.zero_vector();
        for t in table.deltas.iter().filter(|t| !t.is_zero()) {
            let d = pairwise_d(&table, t, &zero);
            let sd = symdiff_density(&p.translate(t), &p, &boxes).unwrap().upper;
            let pred = predicted_d(&s, &w, t).unwrap();
            assert!(rel(sd, d) < 0.02, "{name} t = {}: {sd} vs {d}", t.x[0]);
            assert!(rel(pred, d) < 0.02, "{name} t = {}: {pred} vs {d}", t.x[0]);
        }
        let pe = almost_periods(&table, 0.3 * table.eta_zero()).unwrap();
        assert!(pe.contains(&zero, 1));
        for (m, _) in &pe.members {
            let mirror = table.d_of(&m.neg());
            assert!(mirror < pe.epsilon + 4.0 * m.x[0].abs() / boxes.volume(1), "{name}");
        }
        assert!(pe.max_gap.is_finite());
        // a lattice shift of both patches moves the sampling boxes by a lattice vector
        let a = s.set_point(&[7, -4]);
        let q = p.translate(&table.deltas[table.len() / 3]);
        let base = symdiff_density(&p, &q, &boxes).unwrap().upper;
        let moved = symdiff_density(&p.translate(&a), &q.translate(&a), &boxes).unwrap().upper;
        assert!(rel(moved, base) < 0.02, "{name}: {moved} vs {base}");
    }
}

#[test]
fn random_fixture_gaps_grow() {
    let p = random_fixture(23, &Region::centered(2100.0, 1), 0.7236, 0.5).unwrap();
    let table = eta_table(&p, 2000.0, &VanHove::centered(&[60.0], 1)).unwrap();
    let pe = almost_periods(&table, 0.5 * table.eta_zero()).unwrap();
    let g1 = pe.within(500.0, 1).max_gap;
    let g2 = pe.within(2000.0, 1).max_gap;
    assert!(g2 >= 4.0 * g1 * 0.99, "{g1} {g2}");
}

#[test]
fn eigenfunction_covariance() {
    let s = fibonacci().to_f64();
    let p = s.enumerate_cut(&fibonacci_window().to_f64(), &Region::centered(1200.0, 1)).unwrap();
    let boxes = VanHove::centered(&[1000.0], 1);
    let k = s.dual_candidates_with(1.0, 0.5).unwrap()[1].k.clone();
    let t = 3.7;
    let shifted = weyl_sum(&p.translate(&SetPoint::raw(&[t])), &k, &boxes).unwrap()[0];
    let base = weyl_sum(&p, &k, &boxes).unwrap()[0];
    let phase = num_complex::Complex64::from_polar(1.0, -std::f64::consts::TAU * k[0] * t);
    assert!((shifted - phase * base).norm() / base.norm() < 0.02);
}

#[test]
fn crystal_peaks_form_a_group() {
    let z = integer_crystal::<f64>(2);
    let p = z.enumerate_cut(&WindowSpec::point(), &Region::centered(40.0, 2)).unwrap();
    let boxes = VanHove::centered(&[30.0], 2);
    let k_max = 2.5;
    let mut grid = Vec::new();
    for i in -10..=10 {
        for j in -10..=10 {
            let k = vec![i as f64 * 0.25, j as f64 * 0.25];
            if k[0].hypot(k[1]) <= k_max {
                grid.push(k);
            }
        }
    }
    let peaks: Vec<Vec<f64>> = grid
        .into_iter()
        .filter(|k| weyl_sum(&p, k, &boxes).unwrap()[0].norm() > 0.5)
        .collect();
    assert!(peaks.iter().all(|k| k.iter().all(|v| v.fract() == 0.0)));
    for a in &peaks {
        for b in &peaks {
            let c = vec![a[0] + b[0], a[1] + b[1]];
            if c[0].hypot(c[1]) <= k_max {
                assert!(peaks.contains(&c));
            }
        }
    }
}

#[test]
fn fiber_elements_lie_between_open_and_closed_cuts() {
    for (name, s, w) in exact_fixtures().into_iter().filter(|f| f.1.m() == 1) {
        let lo = w.components()[0].lo;
        let h = lo - s.star_map(&[2, -1])[0];
        let tp = beta_of_cut(&s, &[QuadSurd::rational(0, 1)], &[h]);
        let f = fiber_enumerate(&s, &w, &tp, 200.0).unwrap();
        let (_, hr) = representative(&s, &tp);
        let neg = [-hr[0]];
        let region = Region::centered(200.0, 1);
        let closed = s.enumerate_cut(&w.closure().translate(&neg), &region).unwrap();
        let open = s.enumerate_cut(&w.interior().translate(&neg), &region).unwrap();
        assert_eq!(f.elements.len(), 2, "{name}");
        for e in &f.elements {
            assert!(e.points().iter().all(|p| closed.contains(p)), "{name}");
            assert!(open.points().iter().all(|p| e.contains(p)), "{name}");
        }
        let (a, b) = (&f.elements[0], &f.elements[1]);
        for p in a.points().iter().filter(|p| !b.contains(p)).chain(b.points().iter().filter(|p| !a.contains(p))) {
            assert!(f.hits.contains(&p.index.unwrap()[..2].to_vec()), "{name}");
        }
    }
}

#[test]
fn reconstruction_is_monotone() {
    let s = fibonacci();
    let w = fibonacci_window();
    let mut prev: Option<WindowSpec<f64>> = None;
    for r in [200.0, 800.0, 3200.0] {
        let est = reconstruct_window(&patch(&s, &w, r), None).unwrap();
        if let Some(p) = &prev {
            let (a, b) = (&p.components()[0], &est.components()[0]);
            assert!(b.lo <= a.lo && a.hi <= b.hi);
        }
        prev = Some(est);
    }
    let ab = ammann_beenker();
    let small = reconstruct_window(&patch(&ab, &ammann_beenker_window(), 6.0), None).unwrap();
    let large = reconstruct_window(&patch(&ab, &ammann_beenker_window(), 12.0), None).unwrap();
    assert!(small.measure() <= large.measure());
    assert!(large.measure() <= ammann_beenker_window().measure().to_f64() + 1e-9);
}

#[test]
fn continuity_modulus_on_generic_windows() {
    let s = silver_mean();
    let w = silver_mean_window().translate(&[QuadSurd::rational(1, 9)]);
    let p = patch(&s, &w, 1400.0);
    let table = eta_table(&p, 100.0, &VanHove::centered(&[600.0, 1200.0], 1)).unwrap();
    let rows = continuity_epsilon(&p, &table, &[5.0, 10.0, 20.0]).unwrap();
    assert!(rows.iter().all(|r| r.epsilon > 0.0));
    assert!(rows.windows(2).all(|r| r[1].epsilon <= r[0].epsilon));
}

#[test]
fn exact_random_torus_points_are_regular() {
    for (name, s, w) in exact_fixtures() {
        let r = if s.d() == 1 { 300.0 } else { 6.0 };
        let rep = separation_fraction(&s, &w, 100, 41, r).unwrap();
        assert_eq!(rep.singular, 0, "{name}");
    }
    let z = integer_crystal::<QuadSurd>(1);
    let tp = TorusPoint::from_coords(vec![QuadSurd::rational(1, 3)]);
    assert_eq!(fiber_enumerate(&z, &WindowSpec::point(), &tp, 20.0).unwrap().elements.len(), 1);
}

#[test]
fn meyer_certificates_on_silver_mean() {
    let s = silver_mean();
    let p = patch(&s, &silver_mean_window(), 500.0);
    let ctx = MeyerContext::new(&p, 100, 300.0, 3).unwrap();
    let pts: Vec<SetPoint> = p.in_box(&[0.0], &[300.0]).copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..40 {
        let x = pts[rng.gen_range(0..pts.len())];
        let y = pts[rng.gen_range(0..pts.len())];
        let c = stepping_certificate(&ctx, &x, &y).unwrap();
        assert!(c.valid(), "{c:?}");
        assert!(c.v_card <= c.big_m);
        let q = c.chain[c.chain.len() - 1].q;
        assert_eq!(y.sub(&x).sub(&q).index, c.f.index);
    }
}

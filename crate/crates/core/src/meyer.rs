//! Meyer-property diagnostics: the finite set `F` with `Δ ⊂ Λ + F`, weak
//! uniform discreteness counts and the stepping-chain certificate bounding
//! the generator norm of `Δ − Λ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pointset::{covering_radius, difference_set, IndexedPointSet, PointKey, SetPoint};

/// `‖t‖`, the ℓ¹ norm of the lattice index of `t`.
pub fn generator_norm(t: &SetPoint) -> Result<u64> {
    let n = t.index.ok_or_else(|| Error::NotInL(t.x.to_vec()))?;
    Ok(n.iter().map(|v| v.unsigned_abs()).sum())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct M1Cover {
    pub radius: f64,
    /// Distinct `δ − λ(δ)` with `λ(δ)` the point of `Λ` nearest `δ`.
    pub f: Vec<SetPoint>,
}

impl M1Cover {
    pub fn card(&self) -> usize {
        self.f.len()
    }
}

/// `F = {δ − λ(δ) : δ ∈ Δ ∩ B_R}` where `λ(δ)` is nearest to `δ` in `Λ`.
pub fn m1_cover(p: &IndexedPointSet, r: f64) -> Result<M1Cover> {
    let d = p.dim();
    let deltas = difference_set(p, r)?;
    let mut seen = FxHashSet::default();
    let mut f = Vec::new();
    for delta in deltas.points() {
        let lambda = p
            .nearest(delta.physical(d))
            .ok_or_else(|| Error::InsufficientData("empty patch".into()))?;
        let g = delta.sub(lambda);
        if seen.insert(g.key(d, None)) {
            f.push(g);
        }
    }
    f.sort_by(|a, b| a.norm(d).total_cmp(&b.norm(d)).then(a.x[0].total_cmp(&b.x[0])));
    Ok(M1Cover { radius: r, f })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakUdBound {
    pub half_width: f64,
    pub anchors: usize,
    /// `max card((x + K) ∩ Λ)` over the anchors.
    pub max: usize,
    pub min: usize,
}

/// Counts of `Λ` in `x + [−k, k]^d` over seeded anchors `x` in the patch
/// core plus the translates `λ + k(1, …, 1)` that realise the maximum in
/// one dimension.
pub fn weak_ud_bound(p: &IndexedPointSet, k: f64, anchors: usize, seed: u64) -> Result<WeakUdBound> {
    let d = p.dim();
    let core = p
        .region()
        .shrink(2.0 * k)
        .ok_or_else(|| Error::RegionTooSmall("patch too small for the window K".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers: Vec<Vec<f64>> = (0..anchors)
        .map(|_| (0..d).map(|i| rng.gen_range(core.lo[i]..core.hi[i])).collect())
        .collect();
    let inner = core.shrink(k).unwrap_or_else(|| core.clone());
    centers.extend(p.in_region(&inner).map(|q| q.physical(d).iter().map(|v| v + k).collect()));
    let counts: Vec<usize> = centers
        .iter()
        .map(|c| {
            let lo: Vec<f64> = c.iter().map(|v| v - k).collect();
            let hi: Vec<f64> = c.iter().map(|v| v + k).collect();
            let n = p.in_box(&lo, &hi).count();
            n
        })
        .collect();
    Ok(WeakUdBound {
        half_width: k,
        anchors: centers.len(),
        max: counts.iter().copied().max().unwrap_or(0),
        min: counts.iter().copied().min().unwrap_or(0),
    })
}

/// Distinct differences `b − a` of the patch lying in `center + [−w, w]^d`,
/// collected over all anchors `a` whose neighbourhood is inside the patch.
pub fn differences_in_box(p: &IndexedPointSet, center: &[f64], w: f64) -> Result<Vec<SetPoint>> {
    let d = p.dim();
    let reach = center.iter().fold(0.0f64, |a, v| a.max(v.abs())) + w;
    let core = p
        .region()
        .shrink(reach)
        .ok_or_else(|| Error::RegionTooSmall(format!("patch too small for differences near {center:?}")))?;
    let mut seen: FxHashSet<PointKey> = FxHashSet::default();
    let mut out = Vec::new();
    for a in p.in_region(&core) {
        let lo: Vec<f64> = (0..d).map(|i| a.x[i] + center[i] - w).collect();
        let hi: Vec<f64> = (0..d).map(|i| a.x[i] + center[i] + w).collect();
        for b in p.in_box(&lo, &hi) {
            let delta = b.sub(a);
            if seen.insert(delta.key(d, None)) {
                out.push(delta);
            }
        }
    }
    Ok(out)
}

/// Constants of the stepping construction for one patch.
#[derive(Clone, Debug)]
pub struct MeyerContext<'a> {
    patch: &'a IndexedPointSet,
    /// Half-width of `K = [−κ, κ]^d`.
    pub kappa: f64,
    /// `m = max ‖δ‖` over `Δ ∩ [−3κ, 3κ]^d`.
    pub m: u64,
    /// `max card((u + 2K) ∩ Δ)` over the sampled anchors `u`.
    pub big_m: usize,
    pub anchors: usize,
}

impl<'a> MeyerContext<'a> {
    /// `κ = 1.1 ×` covering radius, with `M` sampled at `anchors` seeded
    /// points of `[−anchor_radius, anchor_radius]^d`.
    pub fn new(p: &'a IndexedPointSet, anchors: usize, anchor_radius: f64, seed: u64) -> Result<Self> {
        if !p.is_scheme_backed() {
            return Err(Error::NotSchemeBacked);
        }
        let probe = p
            .region()
            .shrink(p.region().min_side() / 10.0)
            .ok_or_else(|| Error::RegionTooSmall("patch too small".into()))?;
        let kappa = 1.1 * covering_radius(p, &probe, 64)?;
        Self::with_kappa(p, kappa, anchors, anchor_radius, seed)
    }

    pub fn with_kappa(p: &'a IndexedPointSet, kappa: f64, anchors: usize, anchor_radius: f64, seed: u64) -> Result<Self> {
        if !p.is_scheme_backed() {
            return Err(Error::NotSchemeBacked);
        }
        let d = p.dim();
        let near = differences_in_box(p, &vec![0.0; d], 3.0 * kappa)?;
        let m = near.iter().map(generator_norm).collect::<Result<Vec<_>>>()?.into_iter().max().unwrap_or(0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut big_m = 0;
        for _ in 0..anchors {
            let u: Vec<f64> = (0..d).map(|_| rng.gen_range(-anchor_radius..=anchor_radius)).collect();
            big_m = big_m.max(differences_in_box(p, &u, 2.0 * kappa)?.len());
        }
        Ok(MeyerContext { patch: p, kappa, m, big_m, anchors })
    }

    pub fn patch(&self) -> &IndexedPointSet {
        self.patch
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainStep {
    pub x_i: Vec<f64>,
    pub p: SetPoint,
    pub q: SetPoint,
}

/// A checkable witness that `f = v − q_ℓ` has `‖f‖ ≤ 2mM` for `v = y − x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeyerCertificate {
    pub x: SetPoint,
    pub y: SetPoint,
    pub kappa: f64,
    pub m: u64,
    /// `M` for this pair: the sampled value, raised if `v + 2K` holds more.
    pub big_m: usize,
    pub chain: Vec<ChainStep>,
    /// `card{q_i − p_i}`.
    pub v_card: usize,
    /// Length of the loop-erased path through the `q_i − p_i`.
    pub path_len: usize,
    pub f: SetPoint,
    pub f_norm: u64,
    /// `2mM`.
    pub bound: u64,
    pub chain_in_boxes: bool,
    pub differences_near_v: bool,
    pub steps_within_m: bool,
    pub card_within_big_m: bool,
    pub norm_within_bound: bool,
}

impl MeyerCertificate {
    pub fn valid(&self) -> bool {
        self.chain_in_boxes
            && self.differences_near_v
            && self.steps_within_m
            && self.card_within_big_m
            && self.norm_within_bound
    }
}

fn nearest_in_box(p: &IndexedPointSet, c: &[f64], k: f64, step: usize) -> Result<SetPoint> {
    let lo: Vec<f64> = c.iter().map(|v| v - k).collect();
    let hi: Vec<f64> = c.iter().map(|v| v + k).collect();
    let inside = (0..c.len()).all(|i| p.region().lo[i] <= lo[i] && hi[i] < p.region().hi[i]);
    if !inside {
        return Err(Error::ChainFailure { step, reason: "search box leaves the patch".into() });
    }
    let dist = |q: &SetPoint| q.x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    p.in_box(&lo, &hi)
        .min_by(|a, b| dist(a).total_cmp(&dist(b)))
        .copied()
        .ok_or_else(|| Error::ChainFailure { step, reason: "no point in the search box".into() })
}

/// Builds the stepping chain from `x` to `0` and its shadow from `y` to
/// `v = y − x`, and checks every inequality of the construction.
pub fn stepping_certificate(ctx: &MeyerContext, x: &SetPoint, y: &SetPoint) -> Result<MeyerCertificate> {
    let p = ctx.patch;
    let d = p.dim();
    for z in [x, y] {
        if z.index.is_none() || !p.contains(z) {
            return Err(Error::NotInL(z.physical(d).to_vec()));
        }
    }
    let zero = p.zero_vector();
    if !p.contains(&zero) {
        return Err(Error::ChainFailure { step: 0, reason: "the origin is not in the patch".into() });
    }
    let v = y.sub(x);
    let k = ctx.kappa;
    let ell = (x.sup_norm(d) / k).ceil() as usize;
    let mut chain = Vec::with_capacity(ell + 1);
    for i in 0..=ell {
        let s = if ell == 0 { 0.0 } else { 1.0 - i as f64 / ell as f64 };
        let x_i: Vec<f64> = (0..d).map(|j| x.x[j] * s).collect();
        let y_i: Vec<f64> = (0..d).map(|j| x_i[j] + v.x[j]).collect();
        let pi = if i == 0 {
            *x
        } else if i == ell {
            zero
        } else {
            nearest_in_box(p, &x_i, k, i)?
        };
        let qi = if i == 0 { *y } else { nearest_in_box(p, &y_i, k, i)? };
        chain.push(ChainStep { x_i, p: pi, q: qi });
    }
    let tol = 1e-9;
    let chain_in_boxes = chain.iter().all(|c| {
        (0..d).all(|j| (c.p.x[j] - c.x_i[j]).abs() <= k + tol && (c.q.x[j] - c.x_i[j] - v.x[j]).abs() <= k + tol)
    });
    let w: Vec<SetPoint> = chain.iter().map(|c| c.q.sub(&c.p)).collect();
    let differences_near_v = w.iter().all(|wi| (0..d).all(|j| (wi.x[j] - v.x[j]).abs() <= 2.0 * k + tol));
    let mut steps_within_m = true;
    for pair in chain.windows(2) {
        let dp = generator_norm(&pair[0].p.sub(&pair[1].p))?;
        let dq = generator_norm(&pair[0].q.sub(&pair[1].q))?;
        steps_within_m &= dp <= ctx.m && dq <= ctx.m;
    }
    let keys: Vec<PointKey> = w.iter().map(|wi| wi.key(d, None)).collect();
    let distinct: FxHashSet<PointKey> = keys.iter().copied().collect();
    let v_card = distinct.len();
    let mut path: Vec<PointKey> = Vec::new();
    for key in &keys {
        match path.iter().position(|k| k == key) {
            Some(pos) => path.truncate(pos + 1),
            None => path.push(*key),
        }
    }
    let local: FxHashSet<PointKey> = differences_in_box(p, v.physical(d), 2.0 * k)?
        .iter()
        .map(|s| s.key(d, None))
        .chain(distinct.iter().copied())
        .collect();
    let big_m = ctx.big_m.max(local.len());
    let q_last = chain[ell].q;
    let f = v.sub(&q_last);
    let f_norm = generator_norm(&f)?;
    let bound = 2 * ctx.m * big_m as u64;
    Ok(MeyerCertificate {
        x: *x,
        y: *y,
        kappa: k,
        m: ctx.m,
        big_m,
        chain,
        v_card,
        path_len: path.len() - 1,
        f,
        f_norm,
        bound,
        chain_in_boxes,
        differences_near_v,
        steps_within_m,
        card_within_big_m: v_card <= big_m,
        norm_within_bound: f_norm <= bound && f_norm <= 2 * ctx.m * (path.len() as u64 - 1).max(1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::Region;
    use crate::schemes::{fibonacci, fibonacci_window, integer_crystal};
    use crate::window::WindowSpec;

    #[test]
    fn integer_cover_is_trivial() {
        let s = integer_crystal::<f64>(1);
        let p = s.enumerate_cut(&WindowSpec::point(), &Region::centered(200.0, 1)).unwrap();
        let f = m1_cover(&p, 40.0).unwrap();
        assert_eq!(f.card(), 1);
        assert!(f.f[0].is_zero());
    }

    #[test]
    fn fibonacci_cover_is_stable() {
        let s = fibonacci();
        let p = s.enumerate_cut(&fibonacci_window(), &Region::centered(400.0, 1)).unwrap();
        let a = m1_cover(&p, 50.0).unwrap();
        let b = m1_cover(&p, 100.0).unwrap();
        assert_eq!(a.card(), b.card());
        assert!(a.card() > 1);
    }

    #[test]
    fn generator_norm_needs_an_index() {
        assert!(matches!(generator_norm(&SetPoint::raw(&[1.0])), Err(Error::NotInL(_))));
        let s = fibonacci();
        assert_eq!(generator_norm(&s.set_point(&[2, -3])).unwrap(), 5);
    }

    #[test]
    fn weak_ud_on_integers() {
        let s = integer_crystal::<f64>(1);
        let p = s.enumerate_cut(&WindowSpec::point(), &Region::centered(100.0, 1)).unwrap();
        let b = weak_ud_bound(&p, 1.5, 20, 1).unwrap();
        assert_eq!(b.max, 4);
        assert_eq!(b.min, 3);
    }

    #[test]
    fn certificates_hold_on_fibonacci() {
        let s = fibonacci();
        let p = s.enumerate_cut(&fibonacci_window(), &Region::centered(300.0, 1)).unwrap();
        let ctx = MeyerContext::new(&p, 50, 100.0, 5).unwrap();
        assert!((ctx.kappa - 1.1 * 0.809_016_994_374_947).abs() < 1e-6);
        assert_eq!(ctx.m, 2);
        let pts: Vec<SetPoint> = p.in_box(&[0.0], &[100.0]).copied().collect();
        for (i, x) in pts.iter().enumerate().step_by(7) {
            let y = &pts[(i * 13 + 5) % pts.len()];
            let c = stepping_certificate(&ctx, x, y).unwrap();
            assert!(c.valid(), "{c:?}");
            assert_eq!(c.chain[c.chain.len() - 1].p, p.zero_vector());
        }
    }

    #[test]
    fn chain_failure_at_patch_edge() {
        let s = fibonacci();
        let p = s.enumerate_cut(&fibonacci_window(), &Region::centered(60.0, 1)).unwrap();
        let ctx = MeyerContext::with_kappa(&p, 0.9, 5, 10.0, 1).unwrap();
        let x = p.in_box(&[50.0], &[59.0]).next().copied().unwrap();
        let y = p.in_box(&[-59.0], &[-50.0]).next().copied().unwrap();
        assert!(matches!(stepping_certificate(&ctx, &y, &x), Err(Error::ChainFailure { .. })));
    }
}

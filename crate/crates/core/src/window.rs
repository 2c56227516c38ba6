//! Compact windows `W ⊂ ℝ^m` with an explicit boundary policy.
//!
//! Three shapes are supported: the one-point internal space (`m = 0`, used
//! for crystals), finite unions of intervals (`m = 1`) and convex polygons
//! (`m = 2`). All geometry is generic over [`Scalar`], so a window built from
//! [`QuadSurd`](crate::QuadSurd) values classifies boundary points exactly.

use std::cmp::Ordering;


use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default boundary tolerance for float windows.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalComponent<T> {
    pub lo: T,
    pub hi: T,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl<T: Scalar> IntervalComponent<T> {
    pub fn new(lo: T, hi: T, lo_closed: bool, hi_closed: bool) -> Self {
        IntervalComponent { lo, hi, lo_closed, hi_closed }
    }

    /// `[lo, hi)`
    pub fn half_open(lo: T, hi: T) -> Self {
        Self::new(lo, hi, true, false)
    }

    pub fn closed(lo: T, hi: T) -> Self {
        Self::new(lo, hi, true, true)
    }

    fn length(&self) -> T {
        self.hi - self.lo
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WindowShape<T> {
    /// The whole of the zero-dimensional internal space.
    Point,
    Intervals(Vec<IntervalComponent<T>>),
    /// Convex polygon with counter-clockwise vertices.
    Polygon { vertices: Vec<[T; 2]>, boundary_included: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowSpec<T> {
    shape: WindowShape<T>,
    tol: f64,
}

fn cross<T: Scalar>(o: &[T; 2], a: &[T; 2], b: &[T; 2]) -> T {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn cmp_point<T: Scalar>(a: &[T; 2], b: &[T; 2]) -> Ordering {
    a[0].partial_cmp(&b[0])
        .unwrap_or(Ordering::Equal)
        .then(a[1].partial_cmp(&b[1]).unwrap_or(Ordering::Equal))
}

/// Convex hull (monotone chain), counter-clockwise, collinear points dropped.
pub fn convex_hull<T: Scalar>(points: &[[T; 2]]) -> Vec<[T; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(cmp_point);
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<[T; 2]> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= T::zero() {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<[T; 2]> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= T::zero() {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn polygon_area<T: Scalar>(v: &[[T; 2]]) -> T {
    let n = v.len();
    let mut twice = T::zero();
    for i in 0..n {
        let (a, b) = (&v[i], &v[(i + 1) % n]);
        twice = twice + (a[0] * b[1] - a[1] * b[0]);
    }
    twice / T::from_i64(2)
}

/// Clips convex polygon `subject` against convex polygon `clip` (both CCW).
fn clip_convex<T: Scalar>(subject: &[[T; 2]], clip: &[[T; 2]]) -> Vec<[T; 2]> {
    let mut output = subject.to_vec();
    for i in 0..clip.len() {
        if output.is_empty() {
            break;
        }
        let (a, b) = (clip[i], clip[(i + 1) % clip.len()]);
        let input = std::mem::take(&mut output);
        for j in 0..input.len() {
            let p = input[j];
            let q = input[(j + 1) % input.len()];
            let cp = cross(&a, &b, &p);
            let cq = cross(&a, &b, &q);
            let p_in = cp >= T::zero();
            let q_in = cq >= T::zero();
            if p_in {
                output.push(p);
            }
            if p_in != q_in {
                let t = cp / (cp - cq);
                output.push([p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t]);
            }
        }
    }
    output
}

fn seg_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (cx, cy) = (a[0] + t * dx - p[0], a[1] + t * dy - p[1]);
    (cx * cx + cy * cy).sqrt()
}

impl<T: Scalar> WindowSpec<T> {
    /// Window of the zero-dimensional internal space.
    pub fn point() -> Self {
        WindowSpec { shape: WindowShape::Point, tol: 0.0 }
    }

    pub fn intervals(components: Vec<IntervalComponent<T>>, tol: f64) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidWindow("no interval components".into()));
        }
        for c in &components {
            if !(c.lo < c.hi) {
                return Err(Error::InvalidWindow(format!("component [{}, {}] has empty interior", c.lo, c.hi)));
            }
        }
        for w in components.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let overlap = b.lo < a.hi || (b.lo == a.hi && a.hi_closed && b.lo_closed);
            if overlap {
                return Err(Error::InvalidWindow("components must be sorted and disjoint".into()));
            }
        }
        Ok(WindowSpec { shape: WindowShape::Intervals(components), tol: tol.max(0.0) })
    }

    /// Single half-open interval `[lo, hi)`.
    pub fn half_open(lo: T, hi: T) -> Result<Self> {
        Self::intervals(vec![IntervalComponent::half_open(lo, hi)], DEFAULT_TOL)
    }

    pub fn closed_interval(lo: T, hi: T) -> Result<Self> {
        Self::intervals(vec![IntervalComponent::closed(lo, hi)], DEFAULT_TOL)
    }

    /// Convex polygon; clockwise input is reoriented.
    pub fn polygon(vertices: Vec<[T; 2]>, boundary_included: bool, tol: f64) -> Result<Self> {
        let mut v = vertices;
        if v.len() < 3 {
            return Err(Error::InvalidWindow("polygon needs at least 3 vertices".into()));
        }
        let area = polygon_area(&v);
        if area.is_zero() {
            return Err(Error::InvalidWindow("polygon has zero area".into()));
        }
        if area < T::zero() {
            v.reverse();
        }
        let n = v.len();
        for i in 0..n {
            if cross(&v[i], &v[(i + 1) % n], &v[(i + 2) % n]) <= T::zero() {
                return Err(Error::UnsupportedShape("polygon windows must be strictly convex".into()));
            }
        }
        Ok(WindowSpec { shape: WindowShape::Polygon { vertices: v, boundary_included }, tol: tol.max(0.0) })
    }

    pub fn shape(&self) -> &WindowShape<T> {
        &self.shape
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol.max(0.0);
        self
    }

    /// Internal dimension `m`.
    pub fn dim(&self) -> usize {
        match self.shape {
            WindowShape::Point => 0,
            WindowShape::Intervals(_) => 1,
            WindowShape::Polygon { .. } => 2,
        }
    }

    pub fn components(&self) -> &[IntervalComponent<T>] {
        match &self.shape {
            WindowShape::Intervals(c) => c,
            _ => &[],
        }
    }

    /// The same set with every boundary piece included (the closure).
    pub fn closure(&self) -> Self {
        self.with_boundary(true)
    }

    /// The same set with every boundary piece excluded (the interior).
    pub fn interior(&self) -> Self {
        self.with_boundary(false)
    }

    fn with_boundary(&self, included: bool) -> Self {
        let shape = match &self.shape {
            WindowShape::Point => WindowShape::Point,
            WindowShape::Intervals(cs) => WindowShape::Intervals(
                cs.iter()
                    .map(|c| IntervalComponent::new(c.lo, c.hi, included, included))
                    .collect(),
            ),
            WindowShape::Polygon { vertices, .. } => WindowShape::Polygon {
                vertices: vertices.clone(),
                boundary_included: included,
            },
        };
        WindowSpec { shape, tol: self.tol }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> WindowSpec<U> {
        let shape = match &self.shape {
            WindowShape::Point => WindowShape::Point,
            WindowShape::Intervals(cs) => WindowShape::Intervals(
                cs.iter()
                    .map(|c| IntervalComponent::new(f(&c.lo), f(&c.hi), c.lo_closed, c.hi_closed))
                    .collect(),
            ),
            WindowShape::Polygon { vertices, boundary_included } => WindowShape::Polygon {
                vertices: vertices.iter().map(|p| [f(&p[0]), f(&p[1])]).collect(),
                boundary_included: *boundary_included,
            },
        };
        WindowSpec { shape, tol: self.tol }
    }

    pub fn to_f64(&self) -> WindowSpec<f64> {
        self.map(Scalar::to_f64)
    }

    /// `t + W`.
    pub fn translate(&self, t: &[T]) -> Self {
        let shape = match &self.shape {
            WindowShape::Point => WindowShape::Point,
            WindowShape::Intervals(cs) => WindowShape::Intervals(
                cs.iter()
                    .map(|c| IntervalComponent::new(c.lo + t[0], c.hi + t[0], c.lo_closed, c.hi_closed))
                    .collect(),
            ),
            WindowShape::Polygon { vertices, boundary_included } => WindowShape::Polygon {
                vertices: vertices.iter().map(|p| [p[0] + t[0], p[1] + t[1]]).collect(),
                boundary_included: *boundary_included,
            },
        };
        WindowSpec { shape, tol: self.tol }
    }

    /// `−W`.
    pub fn negate(&self) -> Self {
        let shape = match &self.shape {
            WindowShape::Point => WindowShape::Point,
            WindowShape::Intervals(cs) => WindowShape::Intervals(
                cs.iter()
                    .rev()
                    .map(|c| IntervalComponent::new(-c.hi, -c.lo, c.hi_closed, c.lo_closed))
                    .collect(),
            ),
            WindowShape::Polygon { vertices, boundary_included } => WindowShape::Polygon {
                vertices: vertices.iter().map(|p| [-p[0], -p[1]]).collect(),
                boundary_included: *boundary_included,
            },
        };
        WindowSpec { shape, tol: self.tol }
    }

    /// Classifies `h` against `W`, `∂W` and the exterior.
    pub fn contains(&self, h: &[T]) -> Membership {
        if !T::EXACT {
            let bd = self.boundary_distance(h);
            return if bd.abs() <= self.tol {
                Membership::Boundary
            } else if bd < 0.0 {
                Membership::Interior
            } else {
                Membership::Exterior
            };
        }
        match &self.shape {
            WindowShape::Point => Membership::Interior,
            WindowShape::Intervals(cs) => {
                let x = h[0];
                for c in cs {
                    if x == c.lo || x == c.hi {
                        return Membership::Boundary;
                    }
                    if c.lo < x && x < c.hi {
                        return Membership::Interior;
                    }
                }
                Membership::Exterior
            }
            WindowShape::Polygon { vertices, .. } => {
                let p = [h[0], h[1]];
                let n = vertices.len();
                let mut on_edge = false;
                for i in 0..n {
                    let c = cross(&vertices[i], &vertices[(i + 1) % n], &p);
                    if c < T::zero() {
                        return Membership::Exterior;
                    }
                    if c.is_zero() {
                        on_edge = true;
                    }
                }
                if on_edge {
                    Membership::Boundary
                } else {
                    Membership::Interior
                }
            }
        }
    }

    /// Membership under the window's boundary policy.
    pub fn includes(&self, h: &[T]) -> bool {
        match self.contains(h) {
            Membership::Interior => true,
            Membership::Exterior => false,
            Membership::Boundary => match &self.shape {
                WindowShape::Point => true,
                WindowShape::Polygon { boundary_included, .. } => *boundary_included,
                WindowShape::Intervals(cs) => cs.iter().any(|c| {
                    (c.lo_closed && h[0].near(&c.lo, self.tol)) || (c.hi_closed && h[0].near(&c.hi, self.tol))
                }),
            },
        }
    }

    /// Haar (Lebesgue) measure `θ_H(W)`; the point window has measure 1.
    pub fn measure(&self) -> T {
        match &self.shape {
            WindowShape::Point => T::one(),
            WindowShape::Intervals(cs) => cs.iter().fold(T::zero(), |acc, c| acc + c.length()),
            WindowShape::Polygon { vertices, .. } => polygon_area(vertices),
        }
    }

    /// `θ_H(W ∩ V)` for windows of the same shape kind.
    pub fn intersection_measure(&self, other: &Self) -> T {
        match (&self.shape, &other.shape) {
            (WindowShape::Point, WindowShape::Point) => T::one(),
            (WindowShape::Intervals(a), WindowShape::Intervals(b)) => {
                let mut total = T::zero();
                for x in a {
                    for y in b {
                        let lo = x.lo.max_of(y.lo);
                        let hi = x.hi.min_of(y.hi);
                        if lo < hi {
                            total = total + (hi - lo);
                        }
                    }
                }
                total
            }
            (WindowShape::Polygon { vertices: a, .. }, WindowShape::Polygon { vertices: b, .. }) => {
                let clipped = clip_convex(a, b);
                if clipped.len() < 3 {
                    T::zero()
                } else {
                    polygon_area(&clipped).abs()
                }
            }
            _ => panic!("intersection of windows with different shapes"),
        }
    }

    /// `θ_H(W △ V)`.
    pub fn symmetric_difference_measure(&self, other: &Self) -> T {
        self.measure() + other.measure() - T::from_i64(2) * self.intersection_measure(other)
    }

    /// `W − W`: exact for interval unions, central symmetrisation for polygons.
    pub fn minkowski_difference(&self) -> Result<Self> {
        match &self.shape {
            WindowShape::Point => Ok(Self::point()),
            WindowShape::Intervals(cs) => {
                let mut parts = Vec::with_capacity(cs.len() * cs.len());
                for a in cs {
                    for b in cs {
                        parts.push(IntervalComponent::new(
                            a.lo - b.hi,
                            a.hi - b.lo,
                            a.lo_closed && b.hi_closed,
                            a.hi_closed && b.lo_closed,
                        ));
                    }
                }
                Self::intervals(merge_intervals(parts), self.tol)
            }
            WindowShape::Polygon { vertices, boundary_included } => {
                let mut diffs = Vec::with_capacity(vertices.len() * vertices.len());
                for a in vertices {
                    for b in vertices {
                        diffs.push([a[0] - b[0], a[1] - b[1]]);
                    }
                }
                Self::polygon(convex_hull(&diffs), *boundary_included, self.tol)
            }
        }
    }

    /// Signed distance to `∂W`, negative inside.
    pub fn boundary_distance(&self, h: &[T]) -> f64 {
        match &self.shape {
            WindowShape::Point => f64::NEG_INFINITY,
            WindowShape::Intervals(cs) => {
                let x = h[0].to_f64();
                let mut outside = f64::INFINITY;
                for c in cs {
                    let (lo, hi) = (c.lo.to_f64(), c.hi.to_f64());
                    if lo <= x && x <= hi {
                        return -(x - lo).min(hi - x);
                    }
                    outside = outside.min((lo - x).abs()).min((x - hi).abs());
                }
                outside
            }
            WindowShape::Polygon { vertices, .. } => {
                let p = [h[0].to_f64(), h[1].to_f64()];
                let v: Vec<[f64; 2]> = vertices.iter().map(|q| [q[0].to_f64(), q[1].to_f64()]).collect();
                let n = v.len();
                let mut inside = true;
                let mut inner = f64::INFINITY;
                let mut outer = f64::INFINITY;
                for i in 0..n {
                    let (a, b) = (v[i], v[(i + 1) % n]);
                    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
                    let len = (ex * ex + ey * ey).sqrt();
                    let signed = (ex * (p[1] - a[1]) - ey * (p[0] - a[0])) / len;
                    if signed < 0.0 {
                        inside = false;
                    }
                    inner = inner.min(signed);
                    outer = outer.min(seg_distance(p, a, b));
                }
                if inside {
                    -inner
                } else {
                    outer
                }
            }
        }
    }

    /// Axis-aligned bounding box in `f64`, padded by the tolerance.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let pad = self.tol.max(1e-12);
        match &self.shape {
            WindowShape::Point => (vec![], vec![]),
            WindowShape::Intervals(cs) => (
                vec![cs[0].lo.to_f64() - pad],
                vec![cs[cs.len() - 1].hi.to_f64() + pad],
            ),
            WindowShape::Polygon { vertices, .. } => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k].to_f64());
                        hi[k] = hi[k].max(v[k].to_f64());
                    }
                }
                (lo.iter().map(|x| x - pad).collect(), hi.iter().map(|x| x + pad).collect())
            }
        }
    }

    /// Euclidean diameter of the closure.
    pub fn diameter(&self) -> f64 {
        match &self.shape {
            WindowShape::Point => 0.0,
            WindowShape::Intervals(cs) => cs[cs.len() - 1].hi.to_f64() - cs[0].lo.to_f64(),
            WindowShape::Polygon { vertices, .. } => {
                let mut best: f64 = 0.0;
                for a in vertices {
                    for b in vertices {
                        let dx = a[0].to_f64() - b[0].to_f64();
                        let dy = a[1].to_f64() - b[1].to_f64();
                        best = best.max((dx * dx + dy * dy).sqrt());
                    }
                }
                best
            }
        }
    }

    /// Whether `self` and `other` describe the same set up to `tol`.
    pub fn same_set(&self, other: &Self, tol: f64) -> bool {
        match (&self.shape, &other.shape) {
            (WindowShape::Point, WindowShape::Point) => true,
            (WindowShape::Intervals(a), WindowShape::Intervals(b)) => {
                a.len() == b.len()
                    && a.iter().zip(b).all(|(x, y)| {
                        x.lo.near(&y.lo, tol)
                            && x.hi.near(&y.hi, tol)
                            && x.lo_closed == y.lo_closed
                            && x.hi_closed == y.hi_closed
                    })
            }
            (
                WindowShape::Polygon { vertices: a, boundary_included: ca },
                WindowShape::Polygon { vertices: b, boundary_included: cb },
            ) => {
                if a.len() != b.len() || ca != cb {
                    return false;
                }
                let n = a.len();
                (0..n).any(|shift| {
                    (0..n).all(|i| {
                        let (p, q) = (&a[i], &b[(i + shift) % n]);
                        p[0].near(&q[0], tol) && p[1].near(&q[1], tol)
                    })
                })
            }
            _ => false,
        }
    }
}

/// Sorts and merges interval pieces into a disjoint component list.
fn merge_intervals<T: Scalar>(mut parts: Vec<IntervalComponent<T>>) -> Vec<IntervalComponent<T>> {
    parts.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(Ordering::Equal));
    let mut out: Vec<IntervalComponent<T>> = Vec::new();
    for p in parts {
        if let Some(cur) = out.last_mut() {
            let touches = p.lo < cur.hi || (p.lo == cur.hi && (cur.hi_closed || p.lo_closed));
            if touches {
                if p.lo == cur.lo {
                    cur.lo_closed |= p.lo_closed;
                }
                if p.hi > cur.hi {
                    cur.hi = p.hi;
                    cur.hi_closed = p.hi_closed;
                } else if p.hi == cur.hi {
                    cur.hi_closed |= p.hi_closed;
                }
                continue;
            }
        }
        out.push(p);
    }
    out
}

/// Anything whose translation stabiliser can be probed numerically.
pub trait TranslationProbe {
    fn invariant_under(&self, t: &[f64]) -> bool;
}

impl<T: Scalar> TranslationProbe for WindowSpec<T> {
    fn invariant_under(&self, t: &[f64]) -> bool {
        let shift: Vec<T> = t.iter().map(|&x| T::from_f64(x)).collect();
        self.translate(&shift).same_set(self, self.tol.max(1e-12))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerReport {
    /// Candidates `t` with `t + W = W`; always contains the zero vector.
    pub members: Vec<Vec<f64>>,
    /// Set when some nonzero candidate stabilises the shape.
    pub nontrivial: bool,
}

/// Tests each candidate for `t + W = W`. The zero vector is always tested.
pub fn stabilizer_check<W: TranslationProbe>(window: &W, dim: usize, candidates: &[Vec<f64>]) -> StabilizerReport {
    let zero = vec![0.0; dim];
    let mut members = vec![zero.clone()];
    for c in candidates {
        if c.iter().all(|v| *v == 0.0) {
            continue;
        }
        if window.invariant_under(c) {
            members.push(c.clone());
        }
    }
    let nontrivial = members.len() > 1;
    StabilizerReport { members, nontrivial }
}

//! Axis-aligned boxes in physical space and van Hove box sequences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported physical or internal dimension.
pub const MAX_DIM: usize = 3;

/// Half-open box `[lo, hi)` in `ℝ^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || lo.len() > MAX_DIM {
            return Err(Error::DimensionMismatch(format!(
                "region bounds have lengths {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::RegionTooSmall(format!("empty or unbounded region {lo:?}..{hi:?}")));
        }
        Ok(Region { lo, hi })
    }

    /// `[lo, hi)^d`.
    pub fn cube(lo: f64, hi: f64, dim: usize) -> Self {
        Region { lo: vec![lo; dim], hi: vec![hi; dim] }
    }

    /// `[-n, n)^d`.
    pub fn centered(n: f64, dim: usize) -> Self {
        Self::cube(-n, n, dim)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(x)
            .all(|((&lo, &hi), &v)| lo <= v && v < hi)
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    /// Smallest side length.
    pub fn min_side(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| b - a)
            .fold(f64::INFINITY, f64::min)
    }

    /// The box shrunk by `r` on every side, `None` if nothing remains.
    pub fn shrink(&self, r: f64) -> Option<Region> {
        let lo: Vec<f64> = self.lo.iter().map(|v| v + r).collect();
        let hi: Vec<f64> = self.hi.iter().map(|v| v - r).collect();
        lo.iter().zip(&hi).all(|(a, b)| a < b).then_some(Region { lo, hi })
    }

    pub fn expand(&self, r: f64) -> Region {
        Region {
            lo: self.lo.iter().map(|v| v - r).collect(),
            hi: self.hi.iter().map(|v| v + r).collect(),
        }
    }

    pub fn translate(&self, t: &[f64]) -> Region {
        Region {
            lo: self.lo.iter().zip(t).map(|(a, b)| a + b).collect(),
            hi: self.hi.iter().zip(t).map(|(a, b)| a + b).collect(),
        }
    }

    /// Whether `other` lies inside `self`.
    pub fn covers(&self, other: &Region) -> bool {
        self.lo.iter().zip(&other.lo).all(|(a, b)| a <= b)
            && self.hi.iter().zip(&other.hi).all(|(a, b)| a >= b)
    }

    pub fn intersect(&self, other: &Region) -> Option<Region> {
        let lo: Vec<f64> = self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect();
        let hi: Vec<f64> = self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect();
        lo.iter().zip(&hi).all(|(a, b)| a < b).then_some(Region { lo, hi })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxKind {
    /// `A_n = [-n, n)^d`
    Centered,
    /// `A_n = [0, n)^d`
    Anchored,
}

/// A finite increasing sequence of averaging boxes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanHove {
    pub kind: BoxKind,
    pub sizes: Vec<f64>,
    pub dim: usize,
}

impl VanHove {
    pub fn new(kind: BoxKind, sizes: Vec<f64>, dim: usize) -> Result<Self> {
        if sizes.is_empty() || sizes.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::RegionTooSmall("box sizes must be positive".into()));
        }
        if sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::RegionTooSmall("box sizes must be increasing".into()));
        }
        Ok(VanHove { kind, sizes, dim })
    }

    pub fn centered(sizes: &[f64], dim: usize) -> Self {
        Self::new(BoxKind::Centered, sizes.to_vec(), dim).expect("valid box sizes")
    }

    pub fn anchored(sizes: &[f64], dim: usize) -> Self {
        Self::new(BoxKind::Anchored, sizes.to_vec(), dim).expect("valid box sizes")
    }

    /// Default one-dimensional sequence used by the autocorrelation code.
    pub fn default_1d() -> Self {
        Self::centered(&[125.0, 250.0, 500.0, 1000.0, 2000.0, 4000.0], 1)
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn region(&self, i: usize) -> Region {
        let n = self.sizes[i];
        match self.kind {
            BoxKind::Centered => Region::centered(n, self.dim),
            BoxKind::Anchored => Region::cube(0.0, n, self.dim),
        }
    }

    pub fn volume(&self, i: usize) -> f64 {
        self.region(i).volume()
    }

    pub fn largest(&self) -> Region {
        self.region(self.len() - 1)
    }

    /// First index of the last quartile, the tail used as a limsup proxy.
    pub fn tail_start(&self) -> usize {
        let k = self.len().div_ceil(4);
        self.len() - k
    }

    /// Same boxes translated by `a`.
    pub fn region_at(&self, i: usize, anchor: &[f64]) -> Region {
        self.region(i).translate(anchor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_open_membership() {
        let r = Region::cube(0.0, 1.0, 1);
        assert!(r.contains(&[0.0]));
        assert!(!r.contains(&[1.0]));
        assert_eq!(r.volume(), 1.0);
    }

    #[test]
    fn shrink_to_nothing() {
        assert!(Region::cube(0.0, 2.0, 2).shrink(1.0).is_none());
        assert_eq!(Region::cube(0.0, 4.0, 1).shrink(1.0).unwrap(), Region::cube(1.0, 3.0, 1));
    }

    #[test]
    fn tail_is_last_quartile() {
        let v = VanHove::default_1d();
        assert_eq!(v.tail_start(), 4);
        assert_eq!(v.volume(5), 8000.0);
        assert!(VanHove::new(BoxKind::Centered, vec![2.0, 1.0], 1).is_err());
    }
}

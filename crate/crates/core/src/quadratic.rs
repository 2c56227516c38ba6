//! Exact arithmetic in a real quadratic field `ℚ(√D)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_integer::Integer;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::scalar::{Rational, Scalar};

/// The number `a + b·√D` with rational `a`, `b` and square-free `D > 1`.
///
/// A value with `b = 0` is a plain rational and carries radicand `0`, so it
/// combines with surds of any radicand. Mixing two different non-zero
/// radicands panics.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    a: Rational,
    b: Rational,
    radicand: i64,
}

fn is_square_free(d: i64) -> bool {
    if d < 2 {
        return false;
    }
    let mut p = 2i64;
    while p * p <= d {
        if d % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

fn common_radicand(x: i64, y: i64) -> i64 {
    match (x, y) {
        (0, r) | (r, 0) => r,
        (r, s) if r == s => r,
        (r, s) => panic!("cannot combine surds with radicands {r} and {s}"),
    }
}

impl QuadSurd {
    /// `a + b√D`. Panics if `D` is not square-free and `b ≠ 0`.
    pub fn new(a: Rational, b: Rational, radicand: i64) -> Self {
        if b.is_zero() {
            return QuadSurd { a, b, radicand: 0 };
        }
        assert!(is_square_free(radicand), "radicand {radicand} must be square-free and > 1");
        QuadSurd { a, b, radicand }
    }

    pub fn rational(numer: i128, denom: i128) -> Self {
        Self::from_rational(Rational::new(numer, denom))
    }

    pub fn from_rational(a: Rational) -> Self {
        QuadSurd { a, b: Rational::zero(), radicand: 0 }
    }

    /// `√D` itself.
    pub fn sqrt(radicand: i64) -> Self {
        Self::new(Rational::zero(), Rational::one(), radicand)
    }

    pub fn rational_part(&self) -> Rational {
        self.a
    }

    pub fn surd_part(&self) -> Rational {
        self.b
    }

    /// The radicand, `0` for rationals.
    pub fn radicand(&self) -> i64 {
        self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Galois conjugate `a − b√D`.
    pub fn conjugate(&self) -> Self {
        QuadSurd { a: self.a, b: -self.b, radicand: self.radicand }
    }

    /// Field norm `a² − D b²`.
    pub fn norm(&self) -> Rational {
        self.a * self.a - self.b * self.b * Rational::from_integer(self.radicand as i128)
    }

    /// Sign of the exact value: -1, 0 or 1.
    pub fn sign(&self) -> i32 {
        let sa = ratio_sign(&self.a);
        let sb = ratio_sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a² with D b²
        let a2 = self.a * self.a;
        let b2d = self.b * self.b * Rational::from_integer(self.radicand as i128);
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }
}

fn ratio_sign(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_negative() {
        -1
    } else {
        1
    }
}

fn rational_from_f64(v: f64) -> Rational {
    assert!(v.is_finite(), "cannot convert non-finite {v} to an exact rational");
    if v == 0.0 {
        return Rational::zero();
    }
    let bits = v.to_bits();
    let negative = (bits >> 63) != 0;
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i128;
    let (mut mantissa, mut exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1i128 << 52), exp_bits - 1075)
    };
    while mantissa & 1 == 0 && exp < 0 {
        mantissa >>= 1;
        exp += 1;
    }
    if negative {
        mantissa = -mantissa;
    }
    if exp >= 0 {
        assert!(exp < 70, "{v} is too large for exact conversion");
        Rational::from_integer(mantissa << exp)
    } else if -exp < 120 {
        Rational::new(mantissa, 1i128 << (-exp))
    } else {
        Rational::approximate_float(v).expect("finite float")
    }
}

impl fmt::Debug for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.b.is_negative() {
            write!(f, "{}-{}√{}", self.a, -self.b, self.radicand)
        } else {
            write!(f, "{}+{}√{}", self.a, self.b, self.radicand)
        }
    }
}

impl Add for QuadSurd {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let r = common_radicand(self.radicand, rhs.radicand);
        QuadSurd::new(self.a + rhs.a, self.b + rhs.b, r)
    }
}

impl Sub for QuadSurd {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let r = common_radicand(self.radicand, rhs.radicand);
        QuadSurd::new(self.a - rhs.a, self.b - rhs.b, r)
    }
}

impl Mul for QuadSurd {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let r = common_radicand(self.radicand, rhs.radicand);
        let d = Rational::from_integer(r as i128);
        QuadSurd::new(
            self.a * rhs.a + self.b * rhs.b * d,
            self.a * rhs.b + self.b * rhs.a,
            r,
        )
    }
}

impl Div for QuadSurd {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let n = rhs.norm();
        assert!(!n.is_zero(), "division by zero");
        let inv = QuadSurd::new(rhs.a / n, -rhs.b / n, rhs.radicand);
        self * inv
    }
}

impl Rem for QuadSurd {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        let q = (self / rhs).floor_i64();
        self - rhs * <QuadSurd as Scalar>::from_i64(q)
    }
}

impl Neg for QuadSurd {
    type Output = Self;
    fn neg(self) -> Self {
        QuadSurd { a: -self.a, b: -self.b, radicand: self.radicand }
    }
}

impl Zero for QuadSurd {
    fn zero() -> Self {
        QuadSurd::from_rational(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QuadSurd {
    fn one() -> Self {
        QuadSurd::from_rational(Rational::one())
    }
}

impl Num for QuadSurd {
    type FromStrRadixErr = num_rational::ParseRatioError;

    /// Parses a rational literal such as `3` or `-7/4`.
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        Rational::from_str_radix(s, radix).map(QuadSurd::from_rational)
    }
}

impl Signed for QuadSurd {
    fn abs(&self) -> Self {
        if self.sign() < 0 {
            -*self
        } else {
            *self
        }
    }

    fn abs_sub(&self, other: &Self) -> Self {
        if *self <= *other {
            Self::zero()
        } else {
            *self - *other
        }
    }

    fn signum(&self) -> Self {
        <QuadSurd as Scalar>::from_i64(self.sign() as i64)
    }

    fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    fn is_negative(&self) -> bool {
        self.sign() < 0
    }
}

impl PartialOrd for QuadSurd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadSurd {
    fn cmp(&self, other: &Self) -> Ordering {
        (*self - *other).sign().cmp(&0)
    }
}

impl ToPrimitive for QuadSurd {
    fn to_i64(&self) -> Option<i64> {
        let f = self.floor_i64();
        Some(if self.sign() < 0 && <QuadSurd as Scalar>::from_i64(f) != *self { f + 1 } else { f })
    }

    fn to_u64(&self) -> Option<u64> {
        self.to_i64().and_then(|v| u64::try_from(v).ok())
    }

    fn to_f64(&self) -> Option<f64> {
        Some(Scalar::to_f64(self))
    }
}

impl FromPrimitive for QuadSurd {
    fn from_i64(n: i64) -> Option<Self> {
        Some(<QuadSurd as Scalar>::from_i64(n))
    }

    fn from_u64(n: u64) -> Option<Self> {
        Some(QuadSurd::from_rational(Rational::from_integer(n as i128)))
    }

    fn from_f64(n: f64) -> Option<Self> {
        n.is_finite().then(|| <QuadSurd as Scalar>::from_f64(n))
    }
}

impl Scalar for QuadSurd {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        QuadSurd::from_rational(Rational::from_integer(v as i128))
    }

    fn from_f64(v: f64) -> Self {
        QuadSurd::from_rational(rational_from_f64(v))
    }

    fn to_f64(&self) -> f64 {
        let a = *self.a.numer() as f64 / *self.a.denom() as f64;
        if self.b.is_zero() {
            return a;
        }
        let b = *self.b.numer() as f64 / *self.b.denom() as f64;
        a + b * (self.radicand as f64).sqrt()
    }

    fn floor_i64(&self) -> i64 {
        if self.b.is_zero() {
            return self.a.numer().div_floor(self.a.denom()) as i64;
        }
        let mut f = Scalar::to_f64(self).floor() as i64;
        while *self < <QuadSurd as Scalar>::from_i64(f) {
            f -= 1;
        }
        while *self >= <QuadSurd as Scalar>::from_i64(f + 1) {
            f += 1;
        }
        f
    }

    fn rational_parts(&self) -> Option<(Rational, Rational)> {
        Some((self.a, self.b))
    }

    fn radicand(&self) -> i64 {
        self.radicand
    }
}

/// The golden ratio `(1 + √5)/2`.
pub fn golden_ratio() -> QuadSurd {
    QuadSurd::new(Rational::new(1, 2), Rational::new(1, 2), 5)
}

/// The silver ratio `1 + √2`.
pub fn silver_ratio() -> QuadSurd {
    QuadSurd::new(Rational::one(), Rational::one(), 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tau() -> QuadSurd {
        golden_ratio()
    }

    #[test]
    fn golden_ratio_identities() {
        let t = tau();
        let one = QuadSurd::one();
        assert_eq!(t * t, t + one);
        assert_eq!(t * t.conjugate(), -one);
        assert_eq!(t - t.conjugate(), QuadSurd::sqrt(5));
        assert_eq!(one / t, t - one);
    }

    #[test]
    fn ordering_is_exact() {
        let t = tau();
        let close = QuadSurd::rational(1_618_033_988_749_894, 1_000_000_000_000_000);
        assert!(close < t);
        assert!(t.conjugate() < QuadSurd::zero());
        assert_eq!(t.floor_i64(), 1);
        assert_eq!((-t).floor_i64(), -2);
        assert_eq!(t.conjugate().floor_i64(), -1);
    }

    #[test]
    fn float_round_trip_is_exact_for_dyadics() {
        let q = <QuadSurd as Scalar>::from_f64(-0.375);
        assert_eq!(q, QuadSurd::rational(-3, 8));
        assert_eq!(<QuadSurd as Scalar>::from_f64(1e4), <QuadSurd as Scalar>::from_i64(10_000));
    }

    #[test]
    fn rationals_mix_with_any_radicand() {
        let x = QuadSurd::sqrt(2) + QuadSurd::rational(1, 3);
        assert_eq!(x.radicand(), 2);
        assert_eq!((x - QuadSurd::sqrt(2)).radicand(), 0);
    }

    #[test]
    #[should_panic]
    fn mixed_radicands_panic() {
        let _ = QuadSurd::sqrt(2) + QuadSurd::sqrt(5);
    }

    fn surd() -> impl Strategy<Value = QuadSurd> {
        (-50i128..50, 1i128..20, -50i128..50, 1i128..20)
            .prop_map(|(p, q, r, s)| QuadSurd::new(Rational::new(p, q), Rational::new(r, s), 5))
    }

    proptest! {
        #[test]
        fn order_agrees_with_float(x in surd(), y in surd()) {
            let (fx, fy) = (Scalar::to_f64(&x), Scalar::to_f64(&y));
            if (fx - fy).abs() > 1e-9 {
                prop_assert_eq!(x < y, fx < fy);
            }
        }

        #[test]
        fn field_axioms(x in surd(), y in surd()) {
            prop_assert_eq!((x + y) - y, x);
            if !y.is_zero() {
                prop_assert_eq!((x * y) / y, x);
            }
            let f = x.floor_i64();
            prop_assert!(<QuadSurd as Scalar>::from_i64(f) <= x);
            prop_assert!(x < <QuadSurd as Scalar>::from_i64(f + 1));
        }
    }
}

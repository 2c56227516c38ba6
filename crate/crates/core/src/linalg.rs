//! Small dense square matrices over a [`Scalar`] field.

use crate::scalar::{Rational, Scalar};
use num_traits::{One, Zero};

/// Row-major square matrix. Dimensions here never exceed six.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(Matrix { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = T::one();
        }
        Matrix { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.n + c]
    }

    fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.n + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.n..(r + 1) * self.n]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.n).map(|r| self.get(r, c)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = self.clone();
        for r in 0..self.n {
            for c in 0..self.n {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { n: self.n, data: self.data.iter().map(f).collect() }
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn mul_int(&self, v: &[i64]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(_, &k)| k != 0)
                    .fold(T::zero(), |acc, (&a, &k)| acc + a * T::from_i64(k))
            })
            .collect()
    }

    /// Partial-pivoting elimination; returns the determinant.
    pub fn determinant(&self) -> T {
        let mut a = self.clone();
        let n = self.n;
        let mut det = T::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a.get(i, col)
                        .abs()
                        .partial_cmp(&a.get(j, col).abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if a.get(pivot, col).is_zero() {
                return T::zero();
            }
            if pivot != col {
                for c in 0..n {
                    let tmp = a.get(col, c);
                    a.set(col, c, a.get(pivot, c));
                    a.set(pivot, c, tmp);
                }
                det = -det;
            }
            let p = a.get(col, col);
            det = det * p;
            for r in col + 1..n {
                let factor = a.get(r, col) / p;
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a.get(r, c) - factor * a.get(col, c);
                    a.set(r, c, v);
                }
            }
        }
        det
    }

    /// Gauss–Jordan inverse, `None` on an exactly zero pivot.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).max_by(|&i, &j| {
                a.get(i, col)
                    .abs()
                    .partial_cmp(&a.get(j, col).abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
            if a.get(pivot, col).is_zero() {
                return None;
            }
            if pivot != col {
                for c in 0..n {
                    let tmp = a.get(col, c);
                    a.set(col, c, a.get(pivot, c));
                    a.set(pivot, c, tmp);
                    let tmp = inv.get(col, c);
                    inv.set(col, c, inv.get(pivot, c));
                    inv.set(pivot, c, tmp);
                }
            }
            let p = a.get(col, col);
            for c in 0..n {
                a.set(col, c, a.get(col, c) / p);
                inv.set(col, c, inv.get(col, c) / p);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col);
                if factor.is_zero() {
                    continue;
                }
                for c in 0..n {
                    a.set(r, c, a.get(r, c) - factor * a.get(col, c));
                    inv.set(r, c, inv.get(r, c) - factor * inv.get(col, c));
                }
            }
        }
        Some(inv)
    }
}

/// A nonzero integer vector in the kernel of a rational matrix, if any.
///
/// `rows` is a list of equations over `cols` unknowns. The returned vector is
/// primitive (gcd 1) with its first nonzero entry positive.
pub fn integer_kernel_vector(rows: &[Vec<Rational>], cols: usize) -> Option<Vec<i64>> {
    let mut a: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pv = a[r][c];
        for x in a[r].iter_mut() {
            *x /= pv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c];
                for j in 0..cols {
                    let v = a[r][j];
                    a[i][j] -= f * v;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let free = (0..cols).find(|c| !pivot_cols.contains(c))?;
    let mut v = vec![Rational::zero(); cols];
    v[free] = Rational::one();
    for (row, &pc) in pivot_cols.iter().enumerate() {
        v[pc] = -a[row][free];
    }
    let lcm = v.iter().fold(1i128, |acc, x| num_integer::lcm(acc, *x.denom()));
    let ints: Vec<i128> = v.iter().map(|x| (x * Rational::from_integer(lcm)).to_integer()).collect();
    let g = ints.iter().fold(0i128, |acc, &x| num_integer::gcd(acc, x));
    let sign = ints.iter().find(|&&x| x != 0).map_or(1, |&x| x.signum());
    Some(ints.iter().map(|&x| (x / g * sign) as i64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::{golden_ratio, QuadSurd};

    #[test]
    fn inverse_of_float_matrix() {
        let m = Matrix::<f64>::from_rows(vec![vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let inv = m.inverse().unwrap();
        assert!((m.determinant() - 5.0).abs() < 1e-12);
        let id = inv.mul_vec(&m.column(0));
        assert!((id[0] - 1.0).abs() < 1e-12 && id[1].abs() < 1e-12);
    }

    #[test]
    fn exact_fibonacci_determinant() {
        let t = golden_ratio();
        let one = QuadSurd::one();
        let m = Matrix::from_rows(vec![vec![one, t], vec![one, t.conjugate()]]).unwrap();
        assert_eq!(m.determinant(), -QuadSurd::sqrt(5));
        let inv = m.inverse().unwrap();
        assert_eq!(inv.mul_int(&[1, 0]), vec![
            inv.get(0, 0),
            inv.get(1, 0)
        ]);
        let back = m.mul_vec(&inv.mul_vec(&[t, one]));
        assert_eq!(back, vec![t, one]);
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        assert!(m.inverse().is_none());
        assert_eq!(m.determinant(), 0.0);
    }

    #[test]
    fn kernel_of_rank_deficient_rows() {
        let rows = vec![
            vec![Rational::from_integer(1), Rational::from_integer(0)],
            vec![Rational::from_integer(0), Rational::from_integer(0)],
        ];
        assert_eq!(integer_kernel_vector(&rows, 2), Some(vec![0, 1]));
        let full = vec![
            vec![Rational::from_integer(1), Rational::from_integer(1)],
            vec![Rational::from_integer(0), Rational::new(1, 2)],
        ];
        assert_eq!(integer_kernel_vector(&full, 2), None);
    }
}

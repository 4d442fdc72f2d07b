//! Small dense matrices over a generic scalar.
//!
//! Everything here runs at dimensions bounded by the lifted-space dimension
//! (2^(k+1) * n, at most 16 at desk scale), so plain row-major buffers with
//! partial-pivot LU and Cholesky are all that is needed. Hand-rolled on
//! purpose: the Sasaki recursion wants cheap block assembly and the
//! normalization code wants the raw Cholesky factor.

use crate::error::{GeomError, Result};
use crate::real::Real;

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(entries: &[T]) -> Self {
        let mut m = Mat::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matmul(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.n, rhs.n, "matmul dimension mismatch");
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat<T> {
        Mat::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn add(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.n, rhs.n);
        Mat::from_fn(self.n, |i, j| self[(i, j)] + rhs[(i, j)])
    }

    pub fn sub(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.n, rhs.n);
        Mat::from_fn(self.n, |i, j| self[(i, j)] - rhs[(i, j)])
    }

    pub fn scale(&self, s: T) -> Mat<T> {
        Mat::from_fn(self.n, |i, j| self[(i, j)] * s)
    }

    /// x^T M y
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        let mut acc = T::zero();
        for i in 0..self.n {
            let mut row = T::zero();
            for j in 0..self.n {
                row = row + self[(i, j)] * y[j];
            }
            acc = acc + x[i] * row;
        }
        acc
    }

    /// M x
    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.n {
                    acc = acc + self[(i, j)] * x[j];
                }
                acc
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &v| acc + v * v)
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// LU-factorize (partial pivoting) and solve M x = b.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let lu = Lu::factor(self)?;
        Ok(lu.solve(b))
    }

    pub fn inverse(&self) -> Result<Mat<T>> {
        let lu = Lu::factor(self)?;
        let n = self.n;
        let mut out = Mat::zeros(n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e[j] = T::one();
            let col = lu.solve(&e);
            for i in 0..n {
                out[(i, j)] = col[i];
            }
            e[j] = T::zero();
        }
        Ok(out)
    }

    /// Sign of the determinant via LU with partial pivoting: +1, -1, or 0
    /// when the matrix is singular.
    pub fn det_sign(&self) -> i32 {
        match Lu::factor(self) {
            Err(_) => 0,
            Ok(lu) => {
                let mut sign = if lu.swaps % 2 == 0 { 1 } else { -1 };
                for k in 0..self.n {
                    if lu.lu[k * self.n + k] < T::zero() {
                        sign = -sign;
                    }
                }
                sign
            }
        }
    }

    /// Lower-triangular Cholesky factor; fails unless symmetric positive
    /// definite (this is also how the crate tests positive definiteness).
    pub fn cholesky(&self) -> Result<Mat<T>> {
        let n = self.n;
        let mut l = Mat::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self[(i, j)];
                for k in 0..j {
                    sum = sum - l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if sum <= T::zero() {
                        return Err(GeomError::SingularMatrix {
                            context: "cholesky: not positive definite",
                        });
                    }
                    l[(i, i)] = sum.sqrt();
                } else {
                    l[(i, j)] = sum / l[(j, j)];
                }
            }
        }
        Ok(l)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    piv: Vec<usize>,
    swaps: usize,
}

impl<T: Real> Lu<T> {
    fn factor(m: &Mat<T>) -> Result<Lu<T>> {
        let n = m.n;
        let mut lu = m.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut swaps = 0usize;
        for k in 0..n {
            // pivot
            let mut p = k;
            let mut best = lu[k * n + k].abs();
            for r in (k + 1)..n {
                let v = lu[r * n + k].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best.approx_f64() == 0.0 || !best.is_finite() {
                return Err(GeomError::SingularMatrix { context: "lu" });
            }
            if p != k {
                for c in 0..n {
                    lu.swap(k * n + c, p * n + c);
                }
                piv.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[k * n + k];
            for r in (k + 1)..n {
                let f = lu[r * n + k] / pivot;
                lu[r * n + k] = f;
                for c in (k + 1)..n {
                    lu[r * n + c] = lu[r * n + c] - f * lu[k * n + c];
                }
            }
        }
        Ok(Lu { n, lu, piv, swaps })
    }

    fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x: Vec<T> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                let f = self.lu[i * n + j];
                x[i] = x[i] - f * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let f = self.lu[i * n + j];
                x[i] = x[i] - f * x[j];
            }
            x[i] = x[i] / self.lu[i * n + i];
        }
        x
    }
}

/// Solve L^T x = b for lower-triangular L (back substitution).
///
/// Used to turn Euclidean directions into metric-unit directions: if
/// A = L L^T then x = L^{-T} d has A-norm equal to |d|.
pub fn solve_lower_transposed<T: Real>(l: &Mat<T>, b: &[T]) -> Vec<T> {
    let n = l.dim();
    assert_eq!(b.len(), n);
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        for j in (i + 1)..n {
            let f = l[(j, i)]; // (L^T)_{i j}
            x[i] = x[i] - f * x[j];
        }
        x[i] = x[i] / l[(i, i)];
    }
    x
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Euclidean norm of a slice.
pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Squared Euclidean distance between two slices.
pub fn dist_sq<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

/// Euclidean distance between two slices.
pub fn dist<T: Real>(a: &[T], b: &[T]) -> T {
    dist_sq(a, b).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_and_inverts() {
        let m: Mat<f64> = Mat::from_fn(3, |i, j| {
            [[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]][i][j]
        });
        let b = [1.0, 2.0, 3.0];
        let x = m.solve(&b).unwrap();
        let back = m.matvec(&x);
        for i in 0..3 {
            assert!((back[i] - b[i]).abs() < 1e-14);
        }
        let inv = m.inverse().unwrap();
        let prod = m.matmul(&inv);
        let id = Mat::identity(3);
        assert!(prod.sub(&id).max_abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_reports() {
        let m = Mat::from_fn(2, |i, _| if i == 0 { 1.0 } else { 2.0 });
        // rows [1,1] and [2,2] are linearly dependent
        assert!(m.solve(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn cholesky_detects_definiteness() {
        let pd = Mat::from_fn(2, |i, j| [[2.0, 0.5], [0.5, 1.0]][i][j]);
        let l = pd.cholesky().unwrap();
        let rebuilt = l.matmul(&l.transpose());
        assert!(rebuilt.sub(&pd).max_abs() < 1e-15);

        let indef = Mat::from_fn(2, |i, j| [[1.0, 3.0], [3.0, 1.0]][i][j]);
        assert!(indef.cholesky().is_err());
    }

    #[test]
    fn metric_unit_direction_via_cholesky() {
        // A = diag(4, 9); direction (1,0) should map to (1/2, 0).
        let a: Mat<f64> = Mat::diag(&[4.0, 9.0]);
        let l = a.cholesky().unwrap();
        let w = solve_lower_transposed(&l, &[1.0, 0.0]);
        assert!((w[0] - 0.5).abs() < 1e-15 && w[1].abs() < 1e-15);
        let norm_a = a.bilinear(&w, &w).sqrt();
        assert!((norm_a - 1.0).abs() < 1e-15);
    }

    #[test]
    fn generic_at_f32() {
        let m: Mat<f32> = Mat::diag(&[2.0, 8.0]);
        let x = m.solve(&[1.0f32, 2.0]).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-6 && (x[1] - 0.25).abs() < 1e-6);
    }
}

use alloc::vec::Vec;

use super::{Matrix, Scalar};
use crate::{Error, Result};

/// `A = L L*` with `L` lower triangular and a real positive diagonal.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    lower: Matrix<T>,
}

impl<T: Scalar> Cholesky<T> {
    /// Factors a Hermitian positive definite matrix. Only the lower triangle is read.
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch("cholesky needs a square matrix"));
        }
        let n = a.rows();
        let mut l = Matrix::<T>::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re();
            for k in 0..j {
                let v = l[(j, k)];
                d -= (v.conj() * v).re();
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotSpd { pivot: j, value: d });
            }
            let d = libm::sqrt(d);
            l[(j, j)] = T::from_real(d);
            let inv = 1.0 / d;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s.scale(inv);
            }
        }
        Ok(Self { lower: l })
    }

    pub fn lower(&self) -> &Matrix<T> {
        &self.lower
    }

    pub fn into_lower(self) -> Matrix<T> {
        self.lower
    }

    pub fn dim(&self) -> usize {
        self.lower.rows()
    }

    /// Solves `L y = b`.
    pub fn solve_lower(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        let l = &self.lower;
        let mut y: Vec<T> = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        y
    }

    /// Solves `L* x = y`.
    pub fn solve_upper(&self, y: &[T]) -> Vec<T> {
        let n = self.dim();
        let l = &self.lower;
        let mut x: Vec<T> = y.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= l[(k, i)].conj() * x[k];
            }
            x[i] = s / l[(i, i)];
        }
        x
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        self.solve_upper(&self.solve_lower(b))
    }
}

/// Lower-triangular `R` with `R R* = M` for a symmetric positive definite `M`.
pub fn cholesky_spd<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    Cholesky::new(m).map(Cholesky::into_lower)
}

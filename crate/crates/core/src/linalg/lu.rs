use alloc::vec::Vec;

use super::{Matrix, Scalar};
use crate::{Error, Result};

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    factors: Matrix<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch("LU needs a square matrix"));
        }
        let n = a.rows();
        let mut f = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, f[(i, k)].modulus()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmax > 1e-14 * scale) {
                return Err(Error::SingularStepMatrix);
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = f[(k, j)];
                    f[(k, j)] = f[(p, j)];
                    f[(p, j)] = tmp;
                }
            }
            let pivot = f[(k, k)];
            for i in k + 1..n {
                let factor = f[(i, k)] / pivot;
                f[(i, k)] = factor;
                if factor == T::zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = f[(k, j)];
                    f[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Self { factors: f, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let f = &self.factors;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= f[(i, k)] * x[k];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= f[(i, k)] * x[k];
            }
            x[i] = s / f[(i, i)];
        }
        x
    }
}

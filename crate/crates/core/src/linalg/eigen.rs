use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;

use super::{Matrix, Scalar};
use crate::{Error, Result};

/// Target accuracy of the Hermitian eigensolver, relative to `‖H‖`.
pub const EIG_TOL: f64 = 1e-11;

/// Iteration cap for the cyclic Jacobi sweeps.
pub const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `H = V Λ V*` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub vectors: Matrix<Complex64>,
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Each rotation first removes the phase of `h[p][q]` with a diagonal
/// unitary and then applies the classical real plane rotation, so the whole
/// computation stays in complex arithmetic without doubling to a real
/// `2n x 2n` problem. Eigenvalues come out ascending; every eigenvector has
/// its first component of largest modulus made real and positive, and
/// eigenvectors of numerically equal eigenvalues are ordered
/// lexicographically by their components.
pub fn hermitian_eigen(h: &Matrix<Complex64>) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch("eigensolver needs a square matrix"));
    }
    let n = h.rows();
    let scale = frobenius(h);
    if h.hermitian_residual() > 1e-10 * scale.max(1.0) {
        return Err(Error::NonHermitian {
            residual: h.hermitian_residual(),
        });
    }

    // Symmetrize so that round-off in the input does not leak into the result.
    let mut a = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(h[(i, i)].re, 0.0)
        } else {
            (h[(i, j)] + h[(j, i)].conj()) * 0.5
        }
    });
    let mut v = Matrix::<Complex64>::identity(n);

    let stop = 1e-15 * scale;
    let skip = 1e-18 * scale;
    let mut converged = n < 2 || scale == 0.0;
    let mut sweep = 0;
    while !converged {
        if sweep == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
        sweep += 1;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let modulus = apq.norm();
                if modulus <= skip {
                    continue;
                }
                rotated = true;
                rotate(&mut a, &mut v, p, q, apq, modulus);
            }
        }
        converged = !rotated || off_diagonal(&a) <= stop;
    }

    let mut values: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    for j in 0..n {
        fix_phase(&mut v, j);
    }

    let tie = 1e-9 * scale.max(f64::MIN_POSITIVE);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(Ordering::Equal));
    // Clusters of numerically equal eigenvalues get a lexicographic order.
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] - values[order[end - 1]] <= tie {
            end += 1;
        }
        if end - start > 1 {
            order[start..end].sort_by(|&i, &j| lexicographic(&v, i, j));
        }
        start = end;
    }
    let sorted = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    values = order.iter().map(|&i| values[i]).collect();
    Ok(HermitianEigen {
        values,
        vectors: sorted,
    })
}

fn rotate(
    a: &mut Matrix<Complex64>,
    v: &mut Matrix<Complex64>,
    p: usize,
    q: usize,
    apq: Complex64,
    modulus: f64,
) {
    let n = a.rows();
    // phase^-1 = e^{-i arg a_pq}
    let ph = apq.conj() / modulus;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * modulus);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + libm::sqrt(theta * theta + 1.0));
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    let s = t * c;
    let s_ph = ph * s;
    let c_ph = ph * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        let new_p = akp * c - s_ph * akq;
        let new_q = akp * s + c_ph * akq;
        a[(k, p)] = new_p;
        a[(k, q)] = new_q;
        a[(p, k)] = new_p.conj();
        a[(q, k)] = new_q.conj();
    }
    a[(p, p)] = Complex64::new(app - t * modulus, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * modulus, 0.0);
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - s_ph * vkq;
        v[(k, q)] = vkp * s + c_ph * vkq;
    }
}

fn frobenius(a: &Matrix<Complex64>) -> f64 {
    libm::sqrt(a.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>())
}

fn off_diagonal(a: &Matrix<Complex64>) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    libm::sqrt(s)
}

fn fix_phase(v: &mut Matrix<Complex64>, j: usize) {
    let n = v.rows();
    let largest = (0..n).fold(0.0f64, |m, i| m.max(v[(i, j)].norm()));
    if largest == 0.0 {
        return;
    }
    let Some(i) = (0..n).find(|&i| v[(i, j)].norm() >= largest * (1.0 - 1e-8)) else {
        return;
    };
    let c = v[(i, j)];
    let phase = c.conj() / c.norm();
    for k in 0..n {
        v[(k, j)] *= phase;
    }
    let fixed = v[(i, j)];
    v[(i, j)] = Complex64::new(fixed.norm(), 0.0);
}

fn lexicographic(v: &Matrix<Complex64>, a: usize, b: usize) -> Ordering {
    for k in 0..v.rows() {
        let (x, y) = (v[(k, a)], v[(k, b)]);
        let round = |z: f64| libm::round(z * 1e8);
        match round(y.re).partial_cmp(&round(x.re)) {
            Some(Ordering::Equal) | None => {}
            Some(o) => return o,
        }
        match round(y.im).partial_cmp(&round(x.im)) {
            Some(Ordering::Equal) | None => {}
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

impl HermitianEigen {
    /// `max |H V - V Λ|`.
    pub fn residual(&self, h: &Matrix<Complex64>) -> f64 {
        let hv = h.matmul(&self.vectors);
        let n = h.rows();
        let mut r = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d = hv[(i, j)] - self.vectors[(i, j)] * self.values[j];
                r = r.max(d.modulus());
            }
        }
        r
    }

    /// `max |V* V - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.vectors.adjoint().matmul(&self.vectors);
        g.sub(&Matrix::identity(g.rows())).max_abs()
    }
}

//! Galerkin basis: eigenvectors of the pencil `K₊ h = λ M h`, the discrete
//! counterpart of the compact operator `L₀⁻¹ i' i` on the energy space.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::assembly::DualNorm;
use crate::linalg::{hermitian_eigen, Cholesky, Matrix};
use crate::{Error, Result};

/// Orthogonality tolerance for computed bases.
pub const ORTHO_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct EigenBasis {
    /// Ascending pencil eigenvalues `λⱼ > 0`.
    pub eigenvalues: Vec<f64>,
    /// Columns `hⱼ` over the free degrees of freedom, normalized to `hⱼ* K₊ hⱼ = 1`.
    pub vectors: Matrix<Complex64>,
    pub plus_norms: Vec<f64>,
    /// `‖hⱼ‖²_{L²} = hⱼ* M hⱼ = 1/λⱼ`.
    pub mass_norms: Vec<f64>,
}

impl EigenBasis {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn dofs(&self) -> usize {
        self.vectors.rows()
    }

    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.vectors.column(j)
    }

    /// Eigenvalues `μⱼ = 1/λⱼ` of the discrete solution operator `L₀⁻¹ i' i`.
    pub fn operator_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| 1.0 / l).collect()
    }

    /// The first `k` basis vectors.
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.len());
        let cols: Vec<usize> = (0..k).collect();
        let rows: Vec<usize> = (0..self.dofs()).collect();
        Self {
            eigenvalues: self.eigenvalues[..k].to_vec(),
            vectors: self.vectors.select(&rows, &cols),
            plus_norms: self.plus_norms[..k].to_vec(),
            mass_norms: self.mass_norms[..k].to_vec(),
        }
    }

    /// `Σ cⱼ hⱼ`.
    pub fn resum(&self, coefficients: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(coefficients.len(), self.len());
        self.vectors.mul_vec(coefficients)
    }

    /// Energy-orthogonal expansion coefficients `cⱼ = hⱼ* K₊ x`.
    pub fn expand(&self, k_plus: &Matrix<Complex64>, x: &[Complex64]) -> Vec<Complex64> {
        let kx = k_plus.mul_vec(x);
        self.vectors.adjoint().mul_vec(&kx)
    }
}

/// First `count` eigenpairs of `K₊ h = λ M h`.
///
/// With `M = R Rᵀ` the pencil reduces to the standard Hermitian problem for
/// `R⁻¹ K₊ R⁻ᵀ`; its unitary eigenvectors `v` map back to `h = R⁻ᵀ v`,
/// which are `M`-orthonormal, and are finally rescaled to unit energy norm.
pub fn generalized_eigenbasis(k_plus: &Matrix<Complex64>, mass: &Matrix<f64>, count: usize) -> Result<EigenBasis> {
    let n = k_plus.rows();
    if !k_plus.is_square() || mass.rows() != n || mass.cols() != n {
        return Err(Error::DimensionMismatch("K+ and M must be square of equal size"));
    }
    if count > n {
        return Err(Error::InvalidArgument("basis size exceeds the number of free dofs"));
    }
    let chol = Cholesky::new(&mass.to_complex())?;

    // Y = R⁻¹ K₊, then A = R⁻¹ Y* (= R⁻¹ K₊ R⁻ᴴ because K₊ is Hermitian).
    let mut y = Matrix::zeros(n, n);
    for j in 0..n {
        y.set_column(j, &chol.solve_lower(&k_plus.column(j)));
    }
    let y_adj = y.adjoint();
    let mut a = Matrix::zeros(n, n);
    for j in 0..n {
        a.set_column(j, &chol.solve_lower(&y_adj.column(j)));
    }
    let a = Matrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let eig = hermitian_eigen(&a)?;

    let mut vectors = Matrix::zeros(n, count);
    let mut eigenvalues = Vec::with_capacity(count);
    for j in 0..count {
        let lambda = eig.values[j];
        if !(lambda > 0.0) {
            return Err(Error::SingularKPlus);
        }
        let h = chol.solve_upper(&eig.vectors.column(j));
        let s = 1.0 / libm::sqrt(lambda);
        let h: Vec<Complex64> = h.iter().map(|v| v * s).collect();
        vectors.set_column(j, &h);
        eigenvalues.push(lambda);
    }
    let mc = mass.to_complex();
    let plus_norms = (0..count).map(|j| k_plus.form(&vectors.column(j), &vectors.column(j)).re).collect();
    let mass_norms = (0..count).map(|j| mc.form(&vectors.column(j), &vectors.column(j)).re).collect();
    Ok(EigenBasis {
        eigenvalues,
        vectors,
        plus_norms,
        mass_norms,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalityReport {
    /// `max |hᵢ* K₊ hⱼ - δᵢⱼ|`.
    pub plus_defect: f64,
    /// `max_{i≠j} |hᵢ* M hⱼ|`.
    pub mass_off_diagonal: f64,
}

impl OrthogonalityReport {
    pub fn within(&self, tol: f64) -> bool {
        self.plus_defect <= tol && self.mass_off_diagonal <= tol
    }
}

pub fn verify_orthogonality(basis: &EigenBasis, k_plus: &Matrix<Complex64>, mass: &Matrix<f64>) -> OrthogonalityReport {
    let h = &basis.vectors;
    let ha = h.adjoint();
    let gk = ha.matmul(&k_plus.matmul(h));
    let gm = ha.matmul(&mass.to_complex().matmul(h));
    let k = basis.len();
    let mut plus = 0.0f64;
    let mut off = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let delta = if i == j { 1.0 } else { 0.0 };
            plus = plus.max((gk[(i, j)] - Complex64::new(delta, 0.0)).norm());
            if i != j {
                off = off.max(gm[(i, j)].norm());
            }
        }
    }
    OrthogonalityReport {
        plus_defect: plus,
        mass_off_diagonal: off,
    }
}

/// `max_{i≠j} |(M hᵢ, M hⱼ)₋|` with the discrete dual product `F* K₊⁻¹ G`,
/// normalized by the geometric mean of the diagonal entries.
pub fn dual_orthogonality(basis: &EigenBasis, mass: &Matrix<f64>, dual: &DualNorm) -> f64 {
    let mc = mass.to_complex();
    let images: Vec<Vec<Complex64>> = (0..basis.len()).map(|j| mc.mul_vec(&basis.vector(j))).collect();
    let riesz: Vec<Vec<Complex64>> = images.iter().map(|f| dual.riesz(f)).collect();
    let diag: Vec<f64> = (0..basis.len()).map(|j| crate::linalg::inner(&images[j], &riesz[j]).re).collect();
    let mut worst = 0.0f64;
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            if i != j {
                let v = crate::linalg::inner(&images[i], &riesz[j]).norm() / libm::sqrt(diag[i] * diag[j]);
                worst = worst.max(v);
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize) -> Matrix<f64> {
        let b = Matrix::from_fn(n, n, |i, j| libm::cos((2 * i + 5 * j) as f64 * 0.7));
        b.matmul(&b.adjoint()).add(&Matrix::identity(n))
    }

    #[test]
    fn equal_pencil_has_unit_eigenvalues() {
        let m = spd(6);
        let basis = generalized_eigenbasis(&m.to_complex(), &m, 6).unwrap();
        assert!(basis.eigenvalues.iter().all(|l| (l - 1.0).abs() < 1e-10));
        assert!(verify_orthogonality(&basis, &m.to_complex(), &m).within(ORTHO_TOL));
    }

    #[test]
    fn doubled_pencil() {
        let m = spd(5);
        let k = m.to_complex().scaled(Complex64::new(2.0, 0.0));
        let basis = generalized_eigenbasis(&k, &m, 3).unwrap();
        assert_eq!(basis.len(), 3);
        assert!(basis.eigenvalues.iter().all(|l| (l - 2.0).abs() < 1e-10));
        assert!(basis.mass_norms.iter().all(|d| (d - 0.5).abs() < 1e-10));
    }

    #[test]
    fn perturbed_basis_is_detected() {
        let m = spd(5);
        let k = Matrix::from_fn(5, 5, |i, j| {
            if i == j {
                Complex64::new(3.0 + i as f64, 0.0)
            } else {
                Complex64::new(0.1, 0.05 * (i as f64 - j as f64))
            }
        });
        let mut basis = generalized_eigenbasis(&k, &m, 5).unwrap();
        let clean = verify_orthogonality(&basis, &k, &m);
        assert!(clean.within(ORTHO_TOL));
        let (h1, h2) = (basis.vector(0), basis.vector(1));
        let bumped: Vec<Complex64> = h1.iter().zip(&h2).map(|(a, b)| a + b * 1e-3).collect();
        basis.vectors.set_column(0, &bumped);
        let r = verify_orthogonality(&basis, &k, &m);
        assert!((r.plus_defect - 1e-3).abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn too_many_vectors() {
        let m = spd(3);
        let e = generalized_eigenbasis(&m.to_complex(), &m, 4).unwrap_err();
        assert!(matches!(e, Error::InvalidArgument(_)));
    }
}

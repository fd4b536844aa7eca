//! P1 finite element realization of the energy space: the Hermitian form
//! `K₊`, the mass matrix `M`, the non-symmetric lower-order form `C`, load
//! vectors, the elimination of nodes on `S̄` and the discrete dual norm.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::{Cholesky, CsrMatrix, Matrix, Scalar, TripletBuilder};
use crate::mesh::{Cell, FacetTag, Mesh};
use crate::problem::{FactorizedPrincipal, Mat2, ProblemSpec, ScalarField, SourceField};
use crate::{Error, Point, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Quadrature point on a cell: position, weight and the values of the local basis.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    pub x: Point,
    pub weight: f64,
    pub basis: [f64; 3],
}

/// 2-point Gauss on segments, the 3-point interior rule on triangles; both
/// integrate products of P1 functions exactly.
pub fn cell_quadrature(mesh: &Mesh, cell: &Cell) -> Vec<QuadPoint> {
    let v = mesh.cell_vertices(cell);
    if mesh.dim == 1 {
        let h = v[1][0] - v[0][0];
        let g = 0.5 / libm::sqrt(3.0);
        [0.5 - g, 0.5 + g]
            .iter()
            .map(|&s| QuadPoint {
                x: [v[0][0] + s * h, 0.0],
                weight: 0.5 * h,
                basis: [1.0 - s, s, 0.0],
            })
            .collect()
    } else {
        let area = mesh.geometry(cell).measure;
        let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
        [[a, b, b], [b, a, b], [b, b, a]]
            .iter()
            .map(|l| QuadPoint {
                x: [
                    l[0] * v[0][0] + l[1] * v[1][0] + l[2] * v[2][0],
                    l[0] * v[0][1] + l[1] * v[1][1] + l[2] * v[2][1],
                ],
                weight: area / 3.0,
                basis: *l,
            })
            .collect()
    }
}

/// Quadrature on a boundary facet; basis values refer to `facet.nodes()`.
fn facet_quadrature(mesh: &Mesh, nodes: &[usize], measure: f64) -> Vec<QuadPoint> {
    if nodes.len() == 1 {
        return vec![QuadPoint {
            x: mesh.nodes[nodes[0]],
            weight: measure,
            basis: [1.0, 0.0, 0.0],
        }];
    }
    let (p, q) = (mesh.nodes[nodes[0]], mesh.nodes[nodes[1]]);
    let g = 0.5 / libm::sqrt(3.0);
    [0.5 - g, 0.5 + g]
        .iter()
        .map(|&s| QuadPoint {
            x: [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])],
            weight: 0.5 * measure,
            basis: [1.0 - s, s, 0.0],
        })
        .collect()
}

/// `𝔇 ∇φ` for a constant gradient.
#[inline]
fn apply_factor(d: &Mat2, grad: Point, n: usize) -> [Complex64; 2] {
    let mut out = [ZERO; 2];
    for (l, o) in out.iter_mut().enumerate().take(n) {
        for s in 0..n {
            *o += d[l][s] * grad[s];
        }
    }
    out
}

/// Full-node matrix of the Hermitian form
/// `Σₗ ∫ 𝔇ₗφⱼ conj(𝔇ₗφᵢ) + ∫ a00 φⱼ φᵢ + ∫_{∂Ω\S} (b00/b1) φⱼ φᵢ ds`.
///
/// The principal part goes through the factor `𝔇`, so the discrete form is
/// Hermitian positive semidefinite even where `𝔄` is degenerate.
pub fn assemble_plus_form(mesh: &Mesh, spec: &ProblemSpec, factorized: &FactorizedPrincipal) -> Result<CsrMatrix<Complex64>> {
    let n = mesh.dim;
    let mut b = TripletBuilder::new(mesh.node_count(), mesh.node_count());
    for cell in &mesh.cells {
        let nodes = cell.nodes();
        let geo = mesh.geometry(cell);
        let mut local = [[ZERO; 3]; 3];
        for qp in cell_quadrature(mesh, cell) {
            let d = factorized.factor(qp.x)?;
            let a00 = spec.a00.eval(qp.x);
            let w: Vec<[Complex64; 2]> = (0..nodes.len()).map(|a| apply_factor(&d, geo.gradients[a], n)).collect();
            for i in 0..nodes.len() {
                for j in 0..nodes.len() {
                    let mut s = ZERO;
                    for l in 0..n {
                        s += w[j][l] * w[i][l].conj();
                    }
                    s += Complex64::new(a00 * qp.basis[i] * qp.basis[j], 0.0);
                    local[i][j] += s * qp.weight;
                }
            }
        }
        for (i, &gi) in nodes.iter().enumerate() {
            for (j, &gj) in nodes.iter().enumerate() {
                b.add(gi, gj, local[i][j]);
            }
        }
    }
    for facet in mesh.facets.iter().filter(|f| f.tag == FacetTag::Robin) {
        let nodes = facet.nodes();
        for qp in facet_quadrature(mesh, nodes, facet.measure) {
            let ratio = spec.boundary_ratio(qp.x);
            if ratio == 0.0 {
                continue;
            }
            for (i, &gi) in nodes.iter().enumerate() {
                for (j, &gj) in nodes.iter().enumerate() {
                    b.add(gi, gj, Complex64::new(ratio * qp.basis[i] * qp.basis[j] * qp.weight, 0.0));
                }
            }
        }
    }
    Ok(b.build())
}

/// Full-node mass matrix from the exact P1 element matrices.
pub fn assemble_mass(mesh: &Mesh) -> CsrMatrix<f64> {
    let mut b = TripletBuilder::new(mesh.node_count(), mesh.node_count());
    for cell in &mesh.cells {
        let nodes = cell.nodes();
        let m = mesh.geometry(cell).measure;
        let (diag, off) = if mesh.dim == 1 { (m / 3.0, m / 6.0) } else { (m / 6.0, m / 12.0) };
        for (i, &gi) in nodes.iter().enumerate() {
            for (j, &gj) in nodes.iter().enumerate() {
                b.add(gi, gj, if i == j { diag } else { off });
            }
        }
    }
    b.build()
}

/// Full-node matrix of `(Σₗ ãₗ 𝔇ₗφⱼ + δa0 φⱼ, φᵢ)` in `L²`.
pub fn assemble_first_order(mesh: &Mesh, spec: &ProblemSpec, factorized: &FactorizedPrincipal) -> Result<CsrMatrix<Complex64>> {
    let n = mesh.dim;
    if !spec.first_order.is_empty() && spec.first_order.len() != factorized.rank() {
        return Err(Error::DimensionMismatch("one first-order coefficient per row of the factor"));
    }
    let mut b = TripletBuilder::new(mesh.node_count(), mesh.node_count());
    for cell in &mesh.cells {
        let nodes = cell.nodes();
        let geo = mesh.geometry(cell);
        let mut local = [[ZERO; 3]; 3];
        for qp in cell_quadrature(mesh, cell) {
            let delta = spec.delta_a0.eval(qp.x);
            let mut drift = vec![ZERO; nodes.len()];
            if !spec.first_order.is_empty() {
                let d = factorized.factor(qp.x)?;
                let coeff: Vec<Complex64> = spec.first_order.iter().map(|a| a.eval(qp.x)).collect();
                for (j, dj) in drift.iter_mut().enumerate() {
                    let w = apply_factor(&d, geo.gradients[j], n);
                    for l in 0..n {
                        *dj += coeff[l] * w[l];
                    }
                }
            }
            for i in 0..nodes.len() {
                for j in 0..nodes.len() {
                    let v = (drift[j] + delta * qp.basis[j]) * qp.basis[i];
                    local[i][j] += v * qp.weight;
                }
            }
        }
        for (i, &gi) in nodes.iter().enumerate() {
            for (j, &gj) in nodes.iter().enumerate() {
                if local[i][j] != ZERO {
                    b.add(gi, gj, local[i][j]);
                }
            }
        }
    }
    Ok(b.build())
}

/// Full-node load vector `F[i] = ∫ f(·, t) φᵢ`.
pub fn assemble_load(mesh: &Mesh, f: &SourceField, t: f64) -> Vec<Complex64> {
    let mut out = vec![ZERO; mesh.node_count()];
    for cell in &mesh.cells {
        let nodes = cell.nodes();
        for qp in cell_quadrature(mesh, cell) {
            let v = f.eval(qp.x, t) * qp.weight;
            for (i, &gi) in nodes.iter().enumerate() {
                out[gi] += v * qp.basis[i];
            }
        }
    }
    out
}

/// Nodal interpolant of a field.
pub fn interpolate(mesh: &Mesh, field: &ScalarField) -> Vec<Complex64> {
    mesh.nodes.iter().map(|&x| field.eval(x)).collect()
}

/// Bookkeeping for the nodes on `S̄`, which are eliminated rather than penalized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    node_count: usize,
    free: Vec<usize>,
    constrained: Vec<usize>,
}

impl DofMap {
    pub fn new(mesh: &Mesh) -> Self {
        Self::from_constrained(mesh.node_count(), &mesh.dirichlet_nodes())
    }

    pub fn from_constrained(node_count: usize, constrained: &[usize]) -> Self {
        let mut mark = vec![false; node_count];
        for &i in constrained {
            mark[i] = true;
        }
        Self {
            node_count,
            free: (0..node_count).filter(|&i| !mark[i]).collect(),
            constrained: (0..node_count).filter(|&i| mark[i]).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn free_count(&self) -> usize {
        self.free.len()
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn constrained(&self) -> &[usize] {
        &self.constrained
    }

    pub fn reduce_vector<T: Scalar>(&self, full: &[T]) -> Vec<T> {
        debug_assert_eq!(full.len(), self.node_count);
        self.free.iter().map(|&i| full[i]).collect()
    }

    pub fn reduce_matrix<T: Scalar>(&self, full: &CsrMatrix<T>) -> CsrMatrix<T> {
        full.select(&self.free, &self.free)
    }

    /// Reinstates zeros on `S̄`.
    pub fn reconstruct<T: Scalar>(&self, reduced: &[T]) -> Vec<T> {
        debug_assert_eq!(reduced.len(), self.free.len());
        let mut out = vec![T::zero(); self.node_count];
        for (&i, &v) in self.free.iter().zip(reduced) {
            out[i] = v;
        }
        out
    }
}

/// Discrete forms restricted to the free degrees of freedom.
#[derive(Debug, Clone)]
pub struct AssembledForms {
    pub k_plus: CsrMatrix<Complex64>,
    pub mass: CsrMatrix<f64>,
    pub first_order: CsrMatrix<Complex64>,
    pub dofs: DofMap,
}

impl AssembledForms {
    pub fn free_count(&self) -> usize {
        self.dofs.free_count()
    }

    /// Reduced load vector at time `t`.
    pub fn load(&self, mesh: &Mesh, f: &SourceField, t: f64) -> Vec<Complex64> {
        self.dofs.reduce_vector(&assemble_load(mesh, f, t))
    }

    pub fn k_plus_dense(&self) -> Matrix<Complex64> {
        self.k_plus.to_dense()
    }

    pub fn mass_dense(&self) -> Matrix<f64> {
        self.mass.to_dense()
    }

    pub fn first_order_dense(&self) -> Matrix<Complex64> {
        self.first_order.to_dense()
    }

    /// `‖v‖²_{L²} = v* M v` for a reduced vector.
    pub fn l2_norm_sq(&self, v: &[Complex64]) -> f64 {
        let mc = self.mass.map(|x| Complex64::new(x, 0.0));
        mc.form(v, v).re
    }

    /// `‖v‖²₊ = v* K₊ v` for a reduced vector.
    pub fn plus_norm_sq(&self, v: &[Complex64]) -> f64 {
        self.k_plus.form(v, v).re
    }
}

/// Assembles `K₊`, `M`, `C` and eliminates the nodes on `S̄`.
pub fn assemble_forms(mesh: &Mesh, spec: &ProblemSpec, factorized: &FactorizedPrincipal) -> Result<AssembledForms> {
    let dofs = DofMap::new(mesh);
    if dofs.free_count() == 0 {
        return Err(Error::ConstraintOnAllDofs);
    }
    let k_plus = dofs.reduce_matrix(&assemble_plus_form(mesh, spec, factorized)?);
    let mass = dofs.reduce_matrix(&assemble_mass(mesh));
    let first_order = dofs.reduce_matrix(&assemble_first_order(mesh, spec, factorized)?);
    Ok(AssembledForms {
        k_plus,
        mass,
        first_order,
        dofs,
    })
}

/// Discrete `H⁻` norm `√(F* K₊⁻¹ F)`, the exact supremum of `|v*F| / ‖v‖₊`
/// over the discrete energy space.
#[derive(Debug, Clone)]
pub struct DualNorm {
    chol: Cholesky<Complex64>,
}

impl DualNorm {
    pub fn new(k_plus: &Matrix<Complex64>) -> Result<Self> {
        Cholesky::new(k_plus)
            .map(|chol| Self { chol })
            .map_err(|_| Error::SingularKPlus)
    }

    pub fn norm_sq(&self, f: &[Complex64]) -> f64 {
        let y = self.chol.solve_lower(f);
        y.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self, f: &[Complex64]) -> f64 {
        libm::sqrt(self.norm_sq(f))
    }

    /// `K₊⁻¹ F`, the Riesz representative of `F`.
    pub fn riesz(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.chol.solve(f)
    }
}

pub fn dual_norm(f: &[Complex64], k_plus: &Matrix<Complex64>) -> Result<f64> {
    Ok(DualNorm::new(k_plus)?.norm(f))
}

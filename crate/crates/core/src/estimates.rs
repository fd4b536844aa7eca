//! A priori bounds for Galerkin trajectories and the discrete uniqueness criterion.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::galerkin::GalerkinTrajectory;
use crate::linalg::{hermitian_eigen, Matrix};
use crate::problem::ProblemSpec;
use crate::{Error, Result};

/// Relative slack on the right side of every bound.
pub const BOUND_SLACK: f64 = 0.02;
/// `Re(v* Ĉ v) ≥ 0` is accepted down to this eigenvalue.
pub const UNIQUENESS_TOL: f64 = 1e-10;

/// `c₁ = (Σₗ sup|ãₗ|²)^{1/2}` and `c₂ = sup|δa₀|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub c1: f64,
    pub c2: f64,
}

impl Constants {
    /// `e^{(2c₂ + 2c₁²) T}`.
    pub fn gronwall_factor(&self, final_time: f64) -> f64 {
        libm::exp((2.0 * self.c2 + 2.0 * self.c1 * self.c1) * final_time)
    }
}

/// Suprema are taken over the interior sample at `density`.
pub fn compute_constants(spec: &ProblemSpec, density: usize) -> Constants {
    let pts = spec.domain.sample_interior(density);
    let sup = |f: &dyn Fn([f64; 2]) -> f64| pts.iter().map(|&x| f(x)).fold(0.0f64, f64::max);
    let c1_sq: f64 = spec
        .first_order
        .iter()
        .map(|a| {
            let s = sup(&|x| a.eval(x).norm());
            s * s
        })
        .sum();
    Constants {
        c1: libm::sqrt(c1_sq),
        c2: sup(&|x| spec.delta_a0.eval(x).norm()),
    }
}

/// One inequality `lhs ≤ rhs·(1 + slack)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs·(1 + slack) - lhs`.
    pub margin: f64,
    pub holds: bool,
}

impl BoundCheck {
    pub fn new(lhs: f64, rhs: f64, slack: f64) -> Self {
        let margin = rhs * (1.0 + slack) - lhs;
        Self {
            lhs,
            rhs,
            margin,
            holds: margin >= 0.0,
        }
    }

    pub fn ensure(&self) -> Result<()> {
        if self.holds {
            Ok(())
        } else {
            Err(Error::BoundViolated { lhs: self.lhs, rhs: self.rhs })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniquenessCheck {
    /// Smallest eigenvalue of `(Ĉ + Ĉ*)/2`.
    pub min_eig: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub constants: Constants,
    pub final_time: f64,
    pub gronwall_factor: f64,
    /// `‖u₀‖²_{L²} + ∫₀ᵀ ‖f‖²₋ dt`.
    pub data: f64,
    /// `sup_t ‖uₖ(t)‖²_{L²}` against the common right side.
    pub sup_bound: BoundCheck,
    /// `½∫₀ᵀ ‖uₖ‖²₊ dt + ‖uₖ(T)‖²_{L²}` against the common right side.
    pub energy_bound: BoundCheck,
    pub uniqueness: Option<UniquenessCheck>,
    /// `max_m |‖uₖ(tₘ₊₁)‖ - ‖uₖ(tₘ)‖|`.
    pub max_jump: Option<f64>,
}

impl EstimateReport {
    /// Both bounds hold, and the uniqueness condition when it was checked.
    pub fn passes(&self) -> bool {
        self.sup_bound.holds && self.energy_bound.holds && self.uniqueness.is_none_or(|u| u.holds)
    }

    pub fn with_uniqueness(mut self, check: UniquenessCheck) -> Self {
        self.uniqueness = Some(check);
        self
    }

    pub fn with_continuity(mut self, max_jump: f64) -> Self {
        self.max_jump = Some(max_jump);
        self
    }
}

/// Trapezoid rule on a uniform grid.
pub fn trapezoid(values: &[f64], dt: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dt * (0.5 * (values[0] + values[n - 1]) + values[1..n - 1].iter().sum::<f64>()),
    }
}

/// Checks both a priori bounds on a trajectory with the default slack.
pub fn apriori_bounds(trajectory: &GalerkinTrajectory, u0_l2_sq: f64, constants: Constants, final_time: f64) -> EstimateReport {
    let gronwall_factor = constants.gronwall_factor(final_time);
    let data = u0_l2_sq + trapezoid(&trajectory.dual_f_sq, trajectory.dt);
    let rhs = data * gronwall_factor;
    let sup = trajectory.norm_l2_sq.iter().copied().fold(0.0f64, f64::max);
    let last = *trajectory.norm_l2_sq.last().unwrap_or(&0.0);
    let energy = 0.5 * trapezoid(&trajectory.norm_plus_sq, trajectory.dt) + last;
    EstimateReport {
        constants,
        final_time,
        gronwall_factor,
        data,
        sup_bound: BoundCheck::new(sup, rhs, BOUND_SLACK),
        energy_bound: BoundCheck::new(energy, rhs, BOUND_SLACK),
        uniqueness: None,
        max_jump: None,
    }
}

/// Minimum eigenvalue of the Hermitian part of `Ĉ`.
pub fn check_uniqueness_condition(c_hat: &Matrix<Complex64>) -> Result<UniquenessCheck> {
    if !c_hat.is_square() {
        return Err(Error::DimensionMismatch("uniqueness check needs a square matrix"));
    }
    if c_hat.rows() == 0 {
        return Ok(UniquenessCheck { min_eig: 0.0, holds: true });
    }
    let n = c_hat.rows();
    let h = Matrix::from_fn(n, n, |i, j| (c_hat[(i, j)] + c_hat[(j, i)].conj()) * 0.5);
    let min_eig = hermitian_eigen(&h)?.values[0];
    Ok(UniquenessCheck {
        min_eig,
        holds: min_eig >= -UNIQUENESS_TOL,
    })
}

/// Largest jump of `‖uₖ(t)‖_{L²}` between consecutive grid times.
pub fn check_continuity(trajectory: &GalerkinTrajectory) -> f64 {
    let norms: Vec<f64> = trajectory.norm_l2_sq.iter().map(|v| libm::sqrt(*v)).collect();
    norms.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
}

/// `max_m ‖u(tₘ) - v(tₘ)‖_{L²}` for two trajectories on the same grid and basis.
pub fn sup_l2_distance(a: &GalerkinTrajectory, b: &GalerkinTrajectory, capacitance: &[f64]) -> Result<f64> {
    if a.times.len() != b.times.len() || a.basis_size() != b.basis_size() || a.basis_size() > capacitance.len() {
        return Err(Error::DimensionMismatch("trajectories must share the time grid and basis"));
    }
    let worst = a
        .coefficients
        .iter()
        .zip(&b.coefficients)
        .map(|(ga, gb)| ga.iter().zip(gb).zip(capacitance).map(|((x, y), d)| d * (x - y).norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max);
    Ok(libm::sqrt(worst))
}

//! Time integration of the Galerkin system
//!
//! ```text
//! gᵢ + Σⱼ Ĉᵢⱼ gⱼ + dᵢ gᵢ' = F̂ᵢ(t),     gᵢ(0) = (u₀, hᵢ) / ‖hᵢ‖²
//! ```
//!
//! for `uₖ(t) = Σ gⱼ(t) hⱼ`, where `Ĉ = H* C H`, `dᵢ = ‖hᵢ‖²_{L²}` and the
//! identity comes from the energy-orthonormality of the basis.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::assembly::{interpolate, AssembledForms, DualNorm};
use crate::basis::EigenBasis;
use crate::linalg::{inner, Lu, Matrix};
use crate::mesh::Mesh;
use crate::problem::ProblemSpec;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Galerkin ODE `D g' + (I + Ĉ) g = F̂`.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    /// `Ĉᵢⱼ = hᵢ* C hⱼ`.
    pub interaction: Matrix<Complex64>,
    /// `dᵢ = hᵢ* M hᵢ`.
    pub capacitance: Vec<f64>,
    adjoint_basis: Matrix<Complex64>,
}

impl GalerkinSystem {
    pub fn new(basis: &EigenBasis, first_order: &Matrix<Complex64>) -> Self {
        let adjoint_basis = basis.vectors.adjoint();
        let interaction = adjoint_basis.matmul(&first_order.matmul(&basis.vectors));
        Self {
            interaction,
            capacitance: basis.mass_norms.clone(),
            adjoint_basis,
        }
    }

    /// Builds a system directly from `Ĉ` and `d` (no spatial basis attached).
    pub fn from_parts(interaction: Matrix<Complex64>, capacitance: Vec<f64>) -> Self {
        let k = capacitance.len();
        Self {
            interaction,
            capacitance,
            adjoint_basis: Matrix::zeros(k, 0),
        }
    }

    pub fn dim(&self) -> usize {
        self.capacitance.len()
    }

    /// `F̂ᵢ = hᵢ* F` for a reduced load vector.
    pub fn project_forcing(&self, load: &[Complex64]) -> Vec<Complex64> {
        self.adjoint_basis.mul_vec(load)
    }

    /// `(I + Ĉ) g`.
    pub fn apply_operator(&self, g: &[Complex64]) -> Vec<Complex64> {
        let mut out = self.interaction.mul_vec(g);
        for (o, &v) in out.iter_mut().zip(g) {
            *o += v;
        }
        out
    }

    /// `g' = D⁻¹ (F̂ - (I + Ĉ) g)`.
    pub fn derivative(&self, g: &[Complex64], forcing: &[Complex64]) -> Vec<Complex64> {
        let a = self.apply_operator(g);
        a.iter()
            .zip(forcing)
            .zip(&self.capacitance)
            .map(|((&ag, &f), &d)| (f - ag) / d)
            .collect()
    }
}

/// `gⱼ(0) = (hⱼ* M U₀) / (hⱼ* M hⱼ)`, the `L²`-orthogonal projection of the
/// reduced nodal vector `U₀` onto the span of the basis.
pub fn project_initial(u0: &[Complex64], basis: &EigenBasis, mass: &Matrix<f64>) -> Vec<Complex64> {
    let mu = mass.to_complex().mul_vec(u0);
    (0..basis.len())
        .map(|j| inner(&basis.vector(j), &mu) / basis.mass_norms[j])
        .collect()
}

/// Theta-scheme propagator with the step matrix factored once:
///
/// `(D/Δt + θ(I+Ĉ)) g⁺ = (D/Δt - (1-θ)(I+Ĉ)) g + θ F̂⁺ + (1-θ) F̂`.
#[derive(Debug, Clone)]
pub struct ThetaStepper {
    lu: Lu<Complex64>,
    explicit: Matrix<Complex64>,
    theta: f64,
    dt: f64,
}

impl ThetaStepper {
    pub fn new(system: &GalerkinSystem, theta: f64, dt: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidArgument("theta must lie in [0, 1]"));
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument("time step must be positive"));
        }
        let k = system.dim();
        let op = system.interaction.add(&Matrix::identity(k));
        let d = Matrix::from_diagonal(&system.capacitance.iter().map(|&d| Complex64::new(d / dt, 0.0)).collect::<Vec<_>>());
        let implicit = d.add(&op.scaled(Complex64::new(theta, 0.0)));
        let explicit = d.sub(&op.scaled(Complex64::new(1.0 - theta, 0.0)));
        let lu = Lu::new(&implicit).map_err(|_| Error::SingularStepMatrix)?;
        Ok(Self { lu, explicit, theta, dt })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&self, g: &[Complex64], forcing_now: &[Complex64], forcing_next: &[Complex64]) -> Vec<Complex64> {
        let mut rhs = self.explicit.mul_vec(g);
        for ((r, &fn_), &fx) in rhs.iter_mut().zip(forcing_now).zip(forcing_next) {
            *r += fx * self.theta + fn_ * (1.0 - self.theta);
        }
        self.lu.solve(&rhs)
    }
}

/// One theta step; builds and factors the step matrix every call.
pub fn step_theta(
    system: &GalerkinSystem,
    g: &[Complex64],
    theta: f64,
    dt: f64,
    forcing_now: &[Complex64],
    forcing_next: &[Complex64],
) -> Result<Vec<Complex64>> {
    Ok(ThetaStepper::new(system, theta, dt)?.step(g, forcing_now, forcing_next))
}

/// Discrete trajectory `uₖ(tₘ) = Σ gⱼ(tₘ) hⱼ` on a uniform grid.
#[derive(Debug, Clone)]
pub struct GalerkinTrajectory {
    pub theta: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    pub coefficients: Vec<Vec<Complex64>>,
    /// Projected forcing `F̂(tₘ)`.
    pub forcing: Vec<Vec<Complex64>>,
    /// `‖uₖ(tₘ)‖²₊ = g* g`.
    pub norm_plus_sq: Vec<f64>,
    /// `‖uₖ(tₘ)‖²_{L²} = Σ dᵢ |gᵢ|²`.
    pub norm_l2_sq: Vec<f64>,
    /// `‖f(tₘ)‖²₋` from the full (untruncated) discrete dual norm.
    pub dual_f_sq: Vec<f64>,
    /// `‖u₀‖²_{L²}` of the interpolated, unprojected initial data.
    pub initial_l2_sq: f64,
}

impl GalerkinTrajectory {
    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one time")
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn basis_size(&self) -> usize {
        self.coefficients.first().map_or(0, Vec::len)
    }

    pub fn time_index(&self, t: f64) -> Result<usize> {
        let m = libm::round(t / self.dt);
        if m < 0.0 || m as usize >= self.times.len() || (self.times[m as usize] - t).abs() > 1e-9 * self.dt.max(1.0) {
            return Err(Error::TimeOffGrid(t));
        }
        Ok(m as usize)
    }

    /// Backward-Euler energy identity residuals, one per step:
    /// `Re⟨(g⁺-g)/Δt, D g⁺⟩ + |g⁺|² + Re(g⁺* Ĉ g⁺) - Re(g⁺* F̂⁺)`, relative to the
    /// largest of the four terms.
    pub fn energy_residuals(&self, system: &GalerkinSystem) -> Vec<f64> {
        (0..self.steps())
            .map(|m| {
                energy_identity_residual(
                    system,
                    &self.coefficients[m],
                    &self.coefficients[m + 1],
                    &self.forcing[m + 1],
                    self.dt,
                )
            })
            .collect()
    }
}

/// Relative residual of the discrete energy identity for one backward-Euler step.
pub fn energy_identity_residual(
    system: &GalerkinSystem,
    g_now: &[Complex64],
    g_next: &[Complex64],
    forcing_next: &[Complex64],
    dt: f64,
) -> f64 {
    let rate: f64 = g_now
        .iter()
        .zip(g_next)
        .zip(&system.capacitance)
        .map(|((&a, &b), &d)| ((b - a).conj() * b * d).re / dt)
        .sum();
    let plus: f64 = g_next.iter().map(|v| v.norm_sqr()).sum();
    let lower = inner(g_next, &system.interaction.mul_vec(g_next)).re;
    let work = inner(g_next, forcing_next).re;
    let scale = rate.abs().max(plus).max(lower.abs()).max(work.abs());
    if scale == 0.0 {
        return 0.0;
    }
    (rate + plus + lower - work).abs() / scale
}

/// Runs the theta scheme with the first `k` basis vectors on `time_steps`
/// uniform steps over `(0, T)`.
pub fn solve_evolution(
    mesh: &Mesh,
    spec: &ProblemSpec,
    forms: &AssembledForms,
    basis: &EigenBasis,
    k: usize,
    time_steps: usize,
    theta: f64,
) -> Result<GalerkinTrajectory> {
    if k == 0 || k > basis.len() {
        return Err(Error::InvalidArgument("basis size must be between 1 and the computed basis length"));
    }
    if time_steps == 0 {
        return Err(Error::InvalidArgument("need at least one time step"));
    }
    let basis = basis.truncated(k);
    let system = GalerkinSystem::new(&basis, &forms.first_order_dense());
    let dt = spec.final_time / time_steps as f64;
    let stepper = ThetaStepper::new(&system, theta, dt)?;
    let dual = DualNorm::new(&forms.k_plus_dense())?;
    let mass = forms.mass_dense();

    let u0 = forms.dofs.reduce_vector(&interpolate(mesh, &spec.initial));
    let initial_l2_sq = forms.l2_norm_sq(&u0);
    let mut g = project_initial(&u0, &basis, &mass);

    let load_at = |t: f64| forms.load(mesh, &spec.source, t);
    let mut load = load_at(0.0);
    let mut forcing_now = system.project_forcing(&load);

    let mut traj = GalerkinTrajectory {
        theta,
        dt,
        times: Vec::with_capacity(time_steps + 1),
        coefficients: Vec::with_capacity(time_steps + 1),
        forcing: Vec::with_capacity(time_steps + 1),
        norm_plus_sq: Vec::with_capacity(time_steps + 1),
        norm_l2_sq: Vec::with_capacity(time_steps + 1),
        dual_f_sq: Vec::with_capacity(time_steps + 1),
        initial_l2_sq,
    };
    let record = |traj: &mut GalerkinTrajectory, t: f64, g: &[Complex64], load: &[Complex64], forcing: &[Complex64]| {
        traj.times.push(t);
        traj.norm_plus_sq.push(g.iter().map(|v| v.norm_sqr()).sum());
        traj.norm_l2_sq.push(g.iter().zip(&system.capacitance).map(|(v, d)| d * v.norm_sqr()).sum());
        traj.dual_f_sq.push(dual.norm_sq(load));
        traj.coefficients.push(g.to_vec());
        traj.forcing.push(forcing.to_vec());
    };
    record(&mut traj, 0.0, &g, &load, &forcing_now);
    for m in 0..time_steps {
        let t_next = if m + 1 == time_steps { spec.final_time } else { (m + 1) as f64 * dt };
        let load_next = load_at(t_next);
        let forcing_next = system.project_forcing(&load_next);
        g = stepper.step(&g, &forcing_now, &forcing_next);
        record(&mut traj, t_next, &g, &load_next, &forcing_next);
        load = load_next;
        forcing_now = forcing_next;
    }
    let _ = load;
    Ok(traj)
}

/// Nodal field `Σ gⱼ(t) hⱼ` at a grid time, with zeros reinstated on `S̄`.
pub fn reconstruct_solution(
    trajectory: &GalerkinTrajectory,
    basis: &EigenBasis,
    forms: &AssembledForms,
    t: f64,
) -> Result<Vec<Complex64>> {
    let m = trajectory.time_index(t)?;
    Ok(reconstruct_coefficients(&trajectory.coefficients[m], basis, forms))
}

/// Nodal field for an arbitrary coefficient vector.
pub fn reconstruct_coefficients(g: &[Complex64], basis: &EigenBasis, forms: &AssembledForms) -> Vec<Complex64> {
    let mut padded = vec![ZERO; basis.len()];
    padded[..g.len()].copy_from_slice(g);
    forms.dofs.reconstruct(&basis.resum(&padded))
}

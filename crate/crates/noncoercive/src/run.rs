//! Entry points behind the `solve`, `eigs`, `check`, `convergence` and
//! `sharpness` subcommands.

use std::fs;
use std::io;
use std::path::Path;
use std::thread;

use noncoercive_core::assembly::{assemble_forms, interpolate, AssembledForms, DualNorm};
use noncoercive_core::basis::{dual_orthogonality, generalized_eigenbasis, verify_orthogonality, EigenBasis, ORTHO_TOL};
use noncoercive_core::estimates::{
    apriori_bounds, check_continuity, check_uniqueness_condition, compute_constants, sup_l2_distance, Constants,
    EstimateReport,
};
use noncoercive_core::galerkin::{reconstruct_solution, solve_evolution, GalerkinSystem, GalerkinTrajectory};
use noncoercive_core::linalg::inner;
use noncoercive_core::mesh::{build_mesh, Mesh};
use noncoercive_core::problem::{
    factorize_principal, validate_coefficients, FactorizedPrincipal, ProblemSpec, ScalarField, ValidationReport,
    DEFAULT_SAMPLE_DENSITY, FACTORIZATION_TOL,
};
use noncoercive_core::sharpness::{
    discrete_series_norm, find_divergence_epsilon, series_hs_lower_bound, series_plus_norm, SharpnessSeries, Witness,
};
use noncoercive_core::{Complex64, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::RunConfig;
use crate::output::{self, ConvergenceRow, Report};
use crate::presets::{build_problem, Oracle};
use crate::ConfigError;

/// Largest accepted relative residual of the backward-Euler energy identity.
pub const ENERGY_IDENTITY_TOL: f64 = 1e-9;
/// Accepted relative gap between the discrete and analytic series norms.
pub const CROSS_VALIDATION_TOL: f64 = 0.05;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{stage}: {source}")]
    Numerical { stage: &'static str, source: Error },
    #[error("no analytic oracle for preset '{0}'")]
    NoOracle(String),
    #[error("output: {0}")]
    Io(#[from] io::Error),
}

impl RunError {
    /// 2 for configuration and usage errors, 3 for numerical and output failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::NoOracle(_) => 2,
            RunError::Numerical { .. } | RunError::Io(_) => 3,
        }
    }
}

fn numerical(stage: &'static str) -> impl FnOnce(Error) -> RunError {
    move |source| RunError::Numerical { stage, source }
}

fn rejected(e: Error) -> RunError {
    RunError::Config(ConfigError::Problem(e))
}

/// Validated problem with its mesh, forms and Galerkin basis.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub spec: ProblemSpec,
    pub oracle: Option<Oracle>,
    pub resolution: usize,
    pub validation: ValidationReport,
    pub mesh: Mesh,
    pub factorized: FactorizedPrincipal,
    pub forms: AssembledForms,
    pub basis: EigenBasis,
}

impl Pipeline {
    /// `basis_size == 0` keeps every free degree of freedom.
    pub fn new(spec: ProblemSpec, oracle: Option<Oracle>, resolution: usize, basis_size: usize) -> Result<Self, RunError> {
        let validation = validate_coefficients(&spec, DEFAULT_SAMPLE_DENSITY).map_err(rejected)?;
        let mut samples = spec.domain.sample_interior(DEFAULT_SAMPLE_DENSITY);
        samples.extend(spec.domain.sample_boundary(DEFAULT_SAMPLE_DENSITY));
        let factorized = factorize_principal(&spec, &samples).map_err(rejected)?;
        let mesh = build_mesh(spec.domain, resolution, &spec.dirichlet_set).map_err(rejected)?;
        let forms = assemble_forms(&mesh, &spec, &factorized).map_err(numerical("discretization"))?;
        let free = forms.free_count();
        let k = if basis_size == 0 || basis_size > free { free } else { basis_size };
        let basis = generalized_eigenbasis(&forms.k_plus_dense(), &forms.mass_dense(), k).map_err(numerical("spectral_basis"))?;
        Ok(Self {
            spec,
            oracle,
            resolution,
            validation,
            mesh,
            factorized,
            forms,
            basis,
        })
    }

    pub fn from_config(cfg: &RunConfig) -> Result<Self, RunError> {
        cfg.check()?;
        let preset = build_problem(&cfg.problem)?;
        let resolution = cfg.mesh.resolution.unwrap_or(preset.resolution);
        Self::new(preset.spec, preset.oracle, resolution, cfg.basis.size)
    }

    pub fn system(&self) -> GalerkinSystem {
        GalerkinSystem::new(&self.basis, &self.forms.first_order_dense())
    }

    pub fn solve(&self, steps: usize, theta: f64) -> Result<GalerkinTrajectory, RunError> {
        solve_evolution(&self.mesh, &self.spec, &self.forms, &self.basis, self.basis.len(), steps, theta)
            .map_err(numerical("galerkin_integrator"))
    }

    pub fn constants(&self) -> Constants {
        compute_constants(&self.spec, DEFAULT_SAMPLE_DENSITY)
    }

    pub fn estimates(&self, traj: &GalerkinTrajectory) -> EstimateReport {
        apriori_bounds(traj, traj.initial_l2_sq, self.constants(), self.spec.final_time)
    }

    /// Relative `L²` error at the final time against the nodal interpolant of
    /// the oracle (absolute when the exact solution vanishes).
    pub fn oracle_error(&self, traj: &GalerkinTrajectory) -> Result<f64, RunError> {
        let oracle = self.oracle.ok_or_else(|| RunError::NoOracle(String::new()))?;
        let t = traj.final_time();
        let u = reconstruct_solution(traj, &self.basis, &self.forms, t).map_err(numerical("galerkin_integrator"))?;
        let exact = interpolate(&self.mesh, &ScalarField::new(move |x| oracle.eval(x, t)));
        let diff: Vec<Complex64> = u.iter().zip(&exact).map(|(a, b)| a - b).collect();
        let err = self.forms.l2_norm_sq(&self.forms.dofs.reduce_vector(&diff)).sqrt();
        let norm = self.forms.l2_norm_sq(&self.forms.dofs.reduce_vector(&exact)).sqrt();
        Ok(if norm > 0.0 { err / norm } else { err })
    }

    /// `max_m ‖u_{θ=1/2}(tₘ) - u_{θ=1}(tₘ)‖_{L²}`.
    pub fn twin_solve_gap(&self, steps: usize) -> Result<f64, RunError> {
        let cn = self.solve(steps, 0.5)?;
        let be = self.solve(steps, 1.0)?;
        sup_l2_distance(&cn, &be, &self.basis.mass_norms).map_err(numerical("estimates"))
    }

    /// Largest backward-Euler energy-identity residual on `steps` steps.
    pub fn energy_identity_residual(&self, steps: usize) -> Result<f64, RunError> {
        let be = self.solve(steps, 1.0)?;
        Ok(be.energy_residuals(&self.system()).into_iter().fold(0.0, f64::max))
    }
}

fn validation_entries(report: &mut Report, p: &Pipeline) {
    let v = &p.validation;
    report
        .count("free_dofs", p.forms.free_count())
        .count("basis_size", p.basis.len())
        .float("hermitian_residual", v.hermitian_residual)
        .float("ellipticity", v.ellipticity)
        .float("min_complex_eigenvalue", v.min_complex_eigenvalue)
        .flag("coercive", v.coercive)
        .float("factorization_residual", p.factorized.residual_bound);
}

fn prepare_dir(out: &Path) -> Result<(), RunError> {
    fs::create_dir_all(out)?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub trajectory: GalerkinTrajectory,
    pub estimates: EstimateReport,
    pub energy_residual: Option<f64>,
    pub oracle_error: Option<f64>,
    pub report: Report,
    pub passes: bool,
}

/// Validate, assemble, build the basis, integrate and check the estimates.
/// Writes `trajectory.csv`, `report.csv` and, on request, the final solution,
/// mesh and matrices.
pub fn run_solve(cfg: &RunConfig, out: Option<&Path>) -> Result<SolveOutcome, RunError> {
    let p = Pipeline::from_config(cfg)?;
    let traj = p.solve(cfg.time.steps, cfg.time.theta)?;
    let mut estimates = p.estimates(&traj);
    if cfg.checks.uniqueness {
        let check = check_uniqueness_condition(&p.system().interaction).map_err(numerical("estimates"))?;
        estimates = estimates.with_uniqueness(check);
    }
    if cfg.checks.continuity {
        estimates = estimates.with_continuity(check_continuity(&traj));
    }
    let energy_residual = if !cfg.checks.energy_identity {
        None
    } else if cfg.time.theta == 1.0 {
        Some(traj.energy_residuals(&p.system()).into_iter().fold(0.0, f64::max))
    } else {
        Some(p.energy_identity_residual(cfg.time.steps)?)
    };
    let oracle_error = match p.oracle {
        Some(_) => Some(p.oracle_error(&traj)?),
        None => None,
    };

    let bounds_ok = !cfg.checks.bounds || (estimates.sup_bound.holds && estimates.energy_bound.holds);
    let uniqueness_ok = estimates.uniqueness.is_none_or(|u| u.holds);
    let energy_ok = energy_residual.is_none_or(|r| r <= ENERGY_IDENTITY_TOL);
    let passes = bounds_ok && uniqueness_ok && energy_ok;

    let mut report = Report::new();
    report
        .text("preset", &cfg.problem.preset)
        .count("resolution", p.resolution)
        .count("steps", cfg.time.steps)
        .float("theta", cfg.time.theta);
    validation_entries(&mut report, &p);
    report
        .float("c1", estimates.constants.c1)
        .float("c2", estimates.constants.c2)
        .float("final_time", estimates.final_time)
        .float("gronwall_factor", estimates.gronwall_factor)
        .float("data", estimates.data)
        .float("sup_bound_lhs", estimates.sup_bound.lhs)
        .float("sup_bound_rhs", estimates.sup_bound.rhs)
        .float("sup_bound_margin", estimates.sup_bound.margin)
        .flag("sup_bound_holds", estimates.sup_bound.holds)
        .float("energy_bound_lhs", estimates.energy_bound.lhs)
        .float("energy_bound_rhs", estimates.energy_bound.rhs)
        .float("energy_bound_margin", estimates.energy_bound.margin)
        .flag("energy_bound_holds", estimates.energy_bound.holds);
    if let Some(u) = estimates.uniqueness {
        report.float("uniqueness_min_eig", u.min_eig).flag("uniqueness_holds", u.holds);
    }
    if let Some(j) = estimates.max_jump {
        report.float("max_norm_jump", j);
    }
    if let Some(r) = energy_residual {
        report.float("energy_identity_residual", r).flag("energy_identity_holds", r <= ENERGY_IDENTITY_TOL);
    }
    if let Some(e) = oracle_error {
        report.float("oracle_error", e);
    }
    report.flag("passes", passes);

    if let Some(out) = out {
        prepare_dir(out)?;
        output::write_trajectory(&out.join("trajectory.csv"), &traj)?;
        report.write(&out.join("report.csv"))?;
        if cfg.output.solution {
            let u = reconstruct_solution(&traj, &p.basis, &p.forms, traj.final_time()).map_err(numerical("galerkin_integrator"))?;
            output::write_nodal(&out.join("solution_t.csv"), &u)?;
        }
        write_optional(cfg, out, &p)?;
    }
    Ok(SolveOutcome {
        trajectory: traj,
        estimates,
        energy_residual,
        oracle_error,
        report,
        passes,
    })
}

fn write_optional(cfg: &RunConfig, out: &Path, p: &Pipeline) -> Result<(), RunError> {
    if cfg.output.mesh {
        output::write_mesh(out, &p.mesh)?;
    }
    if cfg.output.matrices {
        output::write_matrix(&out.join("k_plus.csv"), &p.forms.k_plus)?;
        output::write_real_matrix(&out.join("mass.csv"), &p.forms.mass)?;
        output::write_matrix(&out.join("first_order.csv"), &p.forms.first_order)?;
    }
    if cfg.output.eigenvectors {
        output::write_eigenvectors(&out.join("eigenvectors.csv"), &p.basis)?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct EigsOutcome {
    pub basis: EigenBasis,
    pub report: Report,
    pub passes: bool,
}

/// Generalized eigenpairs with orthogonality diagnostics; writes
/// `eigenvalues.csv`, `report.csv` and optionally `eigenvectors.csv`.
pub fn run_eigs(cfg: &RunConfig, out: Option<&Path>) -> Result<EigsOutcome, RunError> {
    let p = Pipeline::from_config(cfg)?;
    let k = p.forms.k_plus_dense();
    let m = p.forms.mass_dense();
    let ortho = verify_orthogonality(&p.basis, &k, &m);
    let dual = DualNorm::new(&k).map_err(numerical("discretization"))?;
    let dual_defect = dual_orthogonality(&p.basis, &m, &dual);
    let passes = ortho.within(ORTHO_TOL) && dual_defect <= ORTHO_TOL;
    let mut report = Report::new();
    report.text("preset", &cfg.problem.preset).count("resolution", p.resolution);
    validation_entries(&mut report, &p);
    report
        .float("plus_orthogonality_defect", ortho.plus_defect)
        .float("mass_off_diagonal", ortho.mass_off_diagonal)
        .float("dual_off_diagonal", dual_defect)
        .flag("passes", passes);
    if let Some(out) = out {
        prepare_dir(out)?;
        output::write_eigenvalues(&out.join("eigenvalues.csv"), &p.basis)?;
        report.write(&out.join("report.csv"))?;
        write_optional(cfg, out, &p)?;
    }
    Ok(EigsOutcome {
        basis: p.basis,
        report,
        passes,
    })
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub report: Report,
    pub passes: bool,
}

/// Coefficient validation, factorization, basis orthogonality and
/// random-vector checks of the discrete forms, seeded by `seed`.
pub fn run_check(cfg: &RunConfig, out: Option<&Path>, seed: u64) -> Result<CheckOutcome, RunError> {
    let p = Pipeline::from_config(cfg)?;
    let k = p.forms.k_plus_dense();
    let m = p.forms.mass_dense();
    let ortho = verify_orthogonality(&p.basis, &k, &m);
    let dual = DualNorm::new(&k).map_err(numerical("discretization"))?;
    let constants = p.constants();
    let lambda1 = p.basis.eigenvalues[0];
    let n = p.forms.free_count();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    };
    let mut worst_positivity = 0.0f64;
    let mut worst_cauchy = f64::NEG_INFINITY;
    let mut worst_embedding = 0.0f64;
    let mut worst_dual = 0.0f64;
    for _ in 0..cfg.checks.random_vectors {
        let v = draw(&mut rng);
        let w = draw(&mut rng);
        let kv = p.forms.k_plus.form(&v, &v);
        let plus = kv.re;
        let l2 = p.forms.l2_norm_sq(&v);
        // Negative values flag violations; positive ones are relative slack.
        worst_positivity = worst_positivity.max((-plus).max(kv.im.abs()) / l2);
        let cv = p.forms.first_order.form(&v, &v).norm();
        let cauchy = constants.c1 * plus.max(0.0).sqrt() * l2.sqrt() + constants.c2 * l2;
        worst_cauchy = worst_cauchy.max((cv - cauchy) / l2);
        worst_embedding = worst_embedding.max(l2 * lambda1 / plus);
        let f = m.to_complex().mul_vec(&w);
        worst_dual = worst_dual.max(inner(&v, &f).norm() / (plus.sqrt() * dual.norm(&f)));
    }
    let positivity_ok = worst_positivity <= 1e-10;
    let cauchy_ok = worst_cauchy <= 1e-10;
    let embedding_ok = worst_embedding <= 1.0 + 1e-10;
    let dual_ok = worst_dual <= 1.0 + 1e-10;
    let factorization_ok = p.factorized.residual_bound <= FACTORIZATION_TOL;
    let uniqueness = if cfg.checks.uniqueness {
        Some(check_uniqueness_condition(&p.system().interaction).map_err(numerical("estimates"))?)
    } else {
        None
    };
    let passes = positivity_ok
        && cauchy_ok
        && embedding_ok
        && dual_ok
        && factorization_ok
        && ortho.within(ORTHO_TOL)
        && uniqueness.is_none_or(|u| u.holds);

    let mut report = Report::new();
    report.text("preset", &cfg.problem.preset).count("resolution", p.resolution);
    validation_entries(&mut report, &p);
    report
        .float("c1", constants.c1)
        .float("c2", constants.c2)
        .float("lambda1", lambda1)
        .float("plus_orthogonality_defect", ortho.plus_defect)
        .float("mass_off_diagonal", ortho.mass_off_diagonal)
        .count("random_vectors", cfg.checks.random_vectors)
        .text("seed", &seed.to_string())
        .float("max_negative_plus_form", worst_positivity)
        .float("max_cauchy_excess", worst_cauchy.max(-f64::MAX))
        .float("max_embedding_ratio", worst_embedding)
        .float("max_dual_ratio", worst_dual);
    if let Some(u) = uniqueness {
        report.float("uniqueness_min_eig", u.min_eig).flag("uniqueness_holds", u.holds);
    }
    report.flag("passes", passes);
    if let Some(out) = out {
        prepare_dir(out)?;
        report.write(&out.join("report.csv"))?;
    }
    Ok(CheckOutcome { report, passes })
}

fn convergence_level(cfg: &RunConfig, level: usize, resolution: usize) -> Result<ConvergenceRow, RunError> {
    let preset = build_problem(&cfg.problem)?;
    let oracle = preset.oracle.ok_or_else(|| RunError::NoOracle(cfg.problem.preset.clone()))?;
    let p = Pipeline::new(preset.spec, Some(oracle), resolution, 0)?;
    let h = 1.0 / resolution as f64;
    if cfg.convergence.study == "eigen" {
        let count = cfg.convergence.eigen_count.min(p.basis.len());
        let error = (1..=count)
            .map(|j| (p.basis.eigenvalues[j - 1] - oracle.eigenvalue(j)).abs() / oracle.eigenvalue(j))
            .fold(0.0, f64::max);
        return Ok(ConvergenceRow {
            level,
            h,
            dt: 0.0,
            error,
            order: None,
        });
    }
    let steps = ((p.spec.final_time / (cfg.convergence.dt_ratio * h)).round() as usize).max(1);
    let traj = p.solve(steps, cfg.time.theta)?;
    Ok(ConvergenceRow {
        level,
        h,
        dt: traj.dt,
        error: p.oracle_error(&traj)?,
        order: None,
    })
}

/// Errors against the preset's oracle over `convergence.levels`, spread over
/// `jobs` threads. Writes `convergence.csv`.
pub fn run_convergence(cfg: &RunConfig, out: Option<&Path>, jobs: usize) -> Result<Vec<ConvergenceRow>, RunError> {
    cfg.check()?;
    if build_problem(&cfg.problem)?.oracle.is_none() {
        return Err(RunError::NoOracle(cfg.problem.preset.clone()));
    }
    let levels = &cfg.convergence.levels;
    let jobs = jobs.clamp(1, levels.len());
    let mut results: Vec<Option<Result<ConvergenceRow, RunError>>> = (0..levels.len()).map(|_| None).collect();
    if jobs == 1 {
        for (i, &n) in levels.iter().enumerate() {
            results[i] = Some(convergence_level(cfg, i, n));
        }
    } else {
        thread::scope(|s| {
            let handles: Vec<_> = (0..jobs)
                .map(|t| {
                    s.spawn(move || {
                        (t..levels.len())
                            .step_by(jobs)
                            .map(|i| (i, convergence_level(cfg, i, levels[i])))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, r) in h.join().expect("convergence worker panicked") {
                    results[i] = Some(r);
                }
            }
        });
    }
    let mut rows = results.into_iter().map(|r| r.expect("every level is computed")).collect::<Result<Vec<_>, _>>()?;
    for i in 1..rows.len() {
        let (prev, cur) = (rows[i - 1], rows[i]);
        rows[i].order = Some((prev.error / cur.error).ln() / (prev.h / cur.h).ln());
    }
    if let Some(out) = out {
        prepare_dir(out)?;
        output::write_convergence(&out.join("convergence.csv"), &rows)?;
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct SharpnessOutcome {
    pub series: SharpnessSeries,
    pub witness: Option<Witness>,
    /// Discrete and analytic truncated norms.
    pub cross_validation: Option<(f64, f64)>,
    pub report: Report,
    pub passes: bool,
}

/// Partial sums of both series at decades up to `sharpness.terms`; with `s`
/// and no `epsilon` the witness `ε = (2s-1)/2` is used, with `epsilon` alone
/// only `A(ε)` is reported. Writes
/// `sharpness.csv` and `report.csv`.
pub fn run_sharpness(cfg: &RunConfig, out: Option<&Path>) -> Result<SharpnessOutcome, RunError> {
    cfg.check()?;
    let sc = &cfg.sharpness;
    let bad = |e: Error| RunError::Config(ConfigError::Problem(e));
    let s_value = sc.effective_s();
    let (epsilon, witness) = match (s_value, sc.epsilon) {
        (Some(s), None) => {
            let w = find_divergence_epsilon(s, sc.terms).map_err(bad)?;
            (w.epsilon, Some(w))
        }
        (_, Some(e)) => (e, None),
        (None, None) => unreachable!("effective_s supplies s"),
    };
    let truncations = SharpnessSeries::decades(sc.terms);
    // With A only, s is irrelevant; 1 keeps the constructor's domain check happy.
    let series = SharpnessSeries::new(s_value.unwrap_or(1.0), epsilon, 1.0, &truncations).map_err(bad)?;
    let a = series_plus_norm(epsilon, sc.terms).map_err(bad)?;
    let mut report = Report::new();
    report.float("epsilon", epsilon).count("terms", sc.terms).float("partial_A", a.partial).float("tail_A", a.tail);
    let mut passes = a.partial.is_finite() && a.tail.is_finite();
    if let Some(s) = s_value {
        let b = series_hs_lower_bound(s, epsilon, sc.terms).map_err(bad)?;
        report
            .float("s", s)
            .float("partial_B", b.partial)
            .text("verdict", b.verdict.as_str())
            .float("dyadic_block", b.block)
            .float("block_threshold", b.threshold)
            .flag("corroborated", b.corroborated);
        passes &= b.corroborated;
    }
    if let Some(w) = &witness {
        report.flag("witness_certified", w.certified());
        passes &= w.certified();
    }
    let cross_validation = if sc.cross_terms > 0 {
        let discrete = discrete_series_norm(epsilon, sc.cross_terms, sc.cross_segments, sc.cross_rings).map_err(numerical("sharpness"))?;
        let analytic = series_plus_norm(epsilon, sc.cross_terms - 1).map_err(bad)?.partial;
        let rel = (discrete - analytic).abs() / analytic;
        report
            .float("cross_discrete", discrete)
            .float("cross_analytic", analytic)
            .float("cross_relative_gap", rel);
        passes &= rel <= CROSS_VALIDATION_TOL;
        Some((discrete, analytic))
    } else {
        None
    };
    report.flag("passes", passes);
    if let Some(out) = out {
        prepare_dir(out)?;
        output::write_sharpness(&out.join("sharpness.csv"), &series, s_value.is_some())?;
        report.write(&out.join("report.csv"))?;
    }
    Ok(SharpnessOutcome {
        series,
        witness,
        cross_validation,
        report,
        passes,
    })
}

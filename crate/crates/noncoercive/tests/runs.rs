use noncoercive::config::RunConfig;
use noncoercive::noncoercive_core::Error;
use noncoercive::run::{run_check, run_convergence, run_eigs, run_sharpness, run_solve, RunError};
use noncoercive::ConfigError;

#[test]
fn heat_solve_passes_and_tracks_the_oracle() {
    let r = run_solve(&RunConfig::preset("heat"), None).unwrap();
    assert!(r.passes);
    assert!(r.oracle_error.unwrap() < 1e-2);
    assert_eq!(r.report.get("passes"), Some("true"));
}

#[test]
fn zero_data_gives_an_all_zero_trajectory() {
    let r = run_solve(&RunConfig::preset("zero"), None).unwrap();
    let t = &r.trajectory;
    assert!(t.coefficients.iter().flatten().all(|g| g.norm() == 0.0));
    assert!(t.norm_l2_sq.iter().chain(&t.norm_plus_sq).chain(&t.dual_f_sq).all(|v| *v == 0.0));
    assert!(r.passes);
}

#[test]
fn non_psd_principal_is_a_config_error() {
    let e = run_solve(&RunConfig::preset("nonpsd"), None).unwrap_err();
    assert!(matches!(e, RunError::Config(ConfigError::Problem(Error::NotPositiveSemidefinite { .. }))), "{e:?}");
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn failed_uniqueness_fails_the_run_unless_disabled() {
    let mut cfg = RunConfig::preset("growth");
    let r = run_solve(&cfg, None).unwrap();
    assert!(!r.estimates.uniqueness.unwrap().holds);
    assert!(r.estimates.sup_bound.holds && r.estimates.energy_bound.holds);
    assert!(!r.passes);
    cfg.checks.uniqueness = false;
    assert!(run_solve(&cfg, None).unwrap().passes);
}

#[test]
fn backward_euler_time_order_is_one() {
    let mut cfg = RunConfig::preset("heat");
    cfg.time.theta = 1.0;
    cfg.convergence.levels = vec![50, 100, 200];
    cfg.convergence.dt_ratio = 0.5;
    let rows = run_convergence(&cfg, None, 2).unwrap();
    for r in &rows[1..] {
        assert!((r.order.unwrap() - 1.0).abs() <= 0.3, "{rows:?}");
    }
}

#[test]
fn eigenvalue_study_order_is_two() {
    let mut cfg = RunConfig::preset("heat");
    cfg.convergence.study = "eigen".into();
    cfg.convergence.levels = vec![10, 20, 40, 80];
    let rows = run_convergence(&cfg, None, 3).unwrap();
    for r in &rows[1..] {
        assert!((r.order.unwrap() - 2.0).abs() <= 0.3, "{rows:?}");
    }
}

#[test]
fn parallel_levels_match_serial() {
    let mut cfg = RunConfig::preset("heat");
    cfg.convergence.levels = vec![10, 20, 40];
    assert_eq!(run_convergence(&cfg, None, 1).unwrap(), run_convergence(&cfg, None, 3).unwrap());
}

#[test]
fn convergence_needs_an_oracle() {
    let e = run_convergence(&RunConfig::preset("disk"), None, 1).unwrap_err();
    assert!(matches!(e, RunError::NoOracle(_)));
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn sharpness_modes() {
    let mut cfg = RunConfig::default();
    cfg.sharpness.terms = 10_000;
    let r = run_sharpness(&cfg, None).unwrap();
    assert!(r.passes && r.witness.unwrap().certified());

    cfg.sharpness.s = Some(0.4);
    let e = run_sharpness(&cfg, None).unwrap_err();
    assert!(matches!(e, RunError::Config(ConfigError::Problem(Error::SOutOfRange(_)))));

    cfg.sharpness.s = None;
    cfg.sharpness.epsilon = Some(1.0);
    let r = run_sharpness(&cfg, None).unwrap();
    assert!(r.witness.is_none() && r.passes);
    assert!(r.report.get("partial_A").unwrap().parse::<f64>().unwrap().is_finite());
    assert!(r.report.get("verdict").is_none());
}

#[test]
fn eigs_and_check_pass_on_the_disk() {
    let cfg = RunConfig::preset("disk");
    assert!(run_eigs(&cfg, None).unwrap().passes);
    let c = run_check(&cfg, None, 11).unwrap();
    assert!(c.passes, "{:?}", c.report);
}

#[test]
fn custom_problem_from_toml() {
    let text = r#"
        problem.preset = "custom"
        problem.domain = "rectangle(0,1,0,2)"
        problem.dirichlet = "left,right"
        problem.first_order = [[0.5, 0.0], [0.0, 0.25]]
        problem.a0 = [1.0, 0.0]
        problem.initial = "const(1,0)"
        problem.final_time = 0.05
        mesh.resolution = 6
        time.steps = 20
        checks.uniqueness = false
    "#;
    let cfg = RunConfig::from_toml_str(text).unwrap();
    let r = run_solve(&cfg, None).unwrap();
    assert!(r.passes, "{:?}", r.report);
    assert!((r.trajectory.final_time() - 0.05).abs() < 1e-15);
    assert!(r.trajectory.norm_l2_sq[0] > 0.0);
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use noncoercive::config::RunConfig;
use noncoercive::output::Report;
use noncoercive::run::{run_check, run_convergence, run_eigs, run_sharpness, run_solve};
use noncoercive::RunError;

#[derive(Debug, Parser)]
#[command(name = "noncoercive", version, about = "Galerkin experiments for noncoercive parabolic problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides `problem.preset`.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Overrides `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for convergence levels.
    #[arg(long, global = true, default_value_t = 1, value_name = "N")]
    jobs: usize,
    /// Seed for the random-vector checks.
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the Galerkin system and check the a priori bounds.
    Solve,
    /// Generalized eigenpairs of the (+) form against the mass form.
    Eigs,
    /// Errors against the analytic oracle over refinement levels.
    Convergence,
    /// Coefficient validation and random-vector checks of the discrete forms.
    Check,
    /// Partial sums of the sharpness series.
    Sharpness {
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        terms: Option<usize>,
    },
}

fn load(common: &Common) -> Result<RunConfig, RunError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &common.preset {
        cfg.problem.preset = p.clone();
    }
    if let Some(out) = &common.out {
        cfg.output.dir = out.display().to_string();
    }
    Ok(cfg)
}

fn print(report: &Report) {
    for (k, v) in report.entries() {
        println!("{k} = {v}");
    }
}

fn execute(cli: &Cli) -> Result<bool, RunError> {
    let mut cfg = load(&cli.common)?;
    if let Command::Sharpness { s, epsilon, terms } = &cli.command {
        if s.is_some() || epsilon.is_some() {
            cfg.sharpness.s = *s;
            cfg.sharpness.epsilon = *epsilon;
        }
        if let Some(n) = terms {
            cfg.sharpness.terms = *n;
        }
    }
    cfg.check()?;
    let out = PathBuf::from(&cfg.output.dir);
    let out = Some(out.as_path());
    match cli.command {
        Command::Solve => {
            let r = run_solve(&cfg, out)?;
            print(&r.report);
            Ok(r.passes)
        }
        Command::Eigs => {
            let r = run_eigs(&cfg, out)?;
            print(&r.report);
            Ok(r.passes)
        }
        Command::Check => {
            let r = run_check(&cfg, out, cli.common.seed)?;
            print(&r.report);
            Ok(r.passes)
        }
        Command::Convergence => {
            let rows = run_convergence(&cfg, out, cli.common.jobs)?;
            for r in &rows {
                let order = r.order.map_or("-".into(), |o| format!("{o:.3}"));
                println!("level {} h {:.3e} dt {:.3e} error {:.6e} order {order}", r.level, r.h, r.dt, r.error);
            }
            Ok(true)
        }
        Command::Sharpness { .. } => {
            let r = run_sharpness(&cfg, out)?;
            print(&r.report);
            Ok(r.passes)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

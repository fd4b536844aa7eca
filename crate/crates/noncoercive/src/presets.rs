//! Named problems.

use std::f64::consts::PI;
use std::path::Path;

use noncoercive_core::problem::{
    DomainKind, FacetSelector, MatrixField, ProblemSpec, RealField, ScalarField, SourceField,
};
use noncoercive_core::{Complex64, Point};

use crate::config::ProblemConfig;
use crate::tabulated::FieldTable;
use crate::ConfigError;

pub const PRESETS: &[&str] = &["heat", "zero", "disk", "growth", "convection", "nonpsd", "custom"];

/// Closed-form solutions available for some presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oracle {
    /// `e^{-π² t} sin(πx)` on `(0, 1)` with homogeneous Dirichlet ends.
    Heat,
    Zero,
}

impl Oracle {
    pub fn eval(self, x: Point, t: f64) -> Complex64 {
        match self {
            Oracle::Heat => Complex64::new((-PI * PI * t).exp() * (PI * x[0]).sin(), 0.0),
            Oracle::Zero => Complex64::new(0.0, 0.0),
        }
    }

    /// `j²π²`, the Dirichlet eigenvalues of `-d²/dx²` on `(0, 1)`.
    pub fn eigenvalue(self, j: usize) -> f64 {
        (j as f64 * PI).powi(2)
    }
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: String,
    pub spec: ProblemSpec,
    pub resolution: usize,
    pub oracle: Option<Oracle>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn constant(v: [f64; 2]) -> ScalarField {
    ScalarField::constant(c(v[0], v[1]))
}

const UNIT_INTERVAL: DomainKind = DomainKind::Interval { a: 0.0, b: 1.0 };
const UNIT_SQUARE: DomainKind = DomainKind::Rectangle { ax: 0.0, bx: 1.0, ay: 0.0, by: 1.0 };

fn heat_spec(final_time: f64) -> ProblemSpec {
    ProblemSpec::new(UNIT_INTERVAL, final_time)
        .with_dirichlet_set(FacetSelector::all())
        .with_initial(ScalarField::new(|x| c((PI * x[0]).sin(), 0.0)))
}

fn split(spec: ProblemSpec, a0: [f64; 2], b0: [f64; 2], b1: f64) -> Result<ProblemSpec, ConfigError> {
    spec.with_zero_order(constant(a0), constant(b0), RealField::constant(b1)).map_err(ConfigError::Problem)
}

/// Builds the problem named by `cfg.preset`; `final_time` overrides the preset's horizon.
pub fn build_problem(cfg: &ProblemConfig) -> Result<Preset, ConfigError> {
    let t = |default: f64| cfg.final_time.unwrap_or(default);
    let (spec, resolution, oracle) = match cfg.preset.as_str() {
        "heat" => (heat_spec(t(0.1)), 40, Some(Oracle::Heat)),
        "zero" => (heat_spec(t(0.1)).with_initial(ScalarField::zero()), 20, Some(Oracle::Zero)),
        "disk" => {
            let spec = ProblemSpec::new(DomainKind::UnitDiskPolygon { segments: 32 }, t(0.5))
                .with_principal(MatrixField::degenerate_disk())
                .with_initial(ScalarField::new(|x| c(x[0] + 1.0 - x[0] * x[0] - x[1] * x[1], x[1])))
                .with_source(SourceField::new(|x, t| c(t.cos(), x[0])));
            (split(spec, [0.0, 0.0], [1.0, 0.0], 1.0)?, 8, None)
        }
        "growth" => {
            let spec = ProblemSpec::new(UNIT_INTERVAL, t(0.5)).with_initial(ScalarField::new(|x| c(1.0, x[0])));
            (split(spec, [-5.0, 0.0], [1.0, 0.0], 1.0)?, 40, None)
        }
        "convection" => {
            let spec = ProblemSpec::new(UNIT_SQUARE, t(0.2))
                .with_dirichlet_set(FacetSelector::new(|x| x[0] < 1e-12))
                .with_first_order(vec![constant([1.5, 0.5]), ScalarField::new(|x| c(0.0, x[0]))])
                .with_source(SourceField::new(|x, t| c(x[1] * (1.0 + t), -x[0])))
                .with_initial(ScalarField::new(|x| c(x[0] * (1.0 - x[1]), x[1])));
            (split(spec, [-0.5, 1.0], [0.5, 0.0], 1.0)?, 8, None)
        }
        "nonpsd" => {
            let indefinite = [[c(1.0, 0.0), c(0.0, 2.0)], [c(0.0, -2.0), c(1.0, 0.0)]];
            let spec = ProblemSpec::new(UNIT_SQUARE, t(0.1))
                .with_principal(MatrixField::constant(indefinite))
                .with_dirichlet_set(FacetSelector::all());
            (spec, 8, None)
        }
        "custom" => (custom(cfg)?, 20, None),
        other => return Err(ConfigError::UnknownPreset(other.into())),
    };
    Ok(Preset {
        name: cfg.preset.clone(),
        spec,
        resolution,
        oracle,
    })
}

fn custom(cfg: &ProblemConfig) -> Result<ProblemSpec, ConfigError> {
    let domain = parse_domain(&cfg.domain)?;
    let principal = principal(&cfg.principal)?;
    let dirichlet = parse_dirichlet(&cfg.dirichlet, domain)?;
    if !cfg.first_order.is_empty() && cfg.first_order.len() != domain.dim() {
        return Err(ConfigError::Invalid(format!(
            "problem.first_order needs {} entries on this domain",
            domain.dim()
        )));
    }
    let spec = ProblemSpec::new(domain, cfg.final_time.unwrap_or(1.0))
        .with_principal(principal)
        .with_dirichlet_set(dirichlet)
        .with_first_order(cfg.first_order.iter().copied().map(constant).collect())
        .with_initial(parse_field(&cfg.initial)?)
        .with_source(SourceField::stationary(parse_field(&cfg.source)?));
    split(spec, cfg.a0, cfg.b0, cfg.b1)
}

fn principal(name: &str) -> Result<MatrixField, ConfigError> {
    MatrixField::preset(name).ok_or_else(|| ConfigError::Invalid(format!("unknown principal part '{name}'")))
}

fn call_args<'a>(text: &'a str, name: &str) -> Option<Vec<&'a str>> {
    let inner = text.trim().strip_prefix(name)?.trim_start().strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(str::trim).collect())
}

fn numbers(args: &[&str]) -> Result<Vec<f64>, ConfigError> {
    args.iter()
        .map(|s| s.parse::<f64>().map_err(|_| ConfigError::Invalid(format!("'{s}' is not a number"))))
        .collect()
}

pub fn parse_domain(text: &str) -> Result<DomainKind, ConfigError> {
    let bad = || ConfigError::Invalid(format!("cannot parse domain '{text}'"));
    let domain = if let Some(args) = call_args(text, "interval") {
        match numbers(&args)?.as_slice() {
            &[a, b] => DomainKind::Interval { a, b },
            _ => return Err(bad()),
        }
    } else if let Some(args) = call_args(text, "rectangle") {
        match numbers(&args)?.as_slice() {
            &[ax, bx, ay, by] => DomainKind::Rectangle { ax, bx, ay, by },
            _ => return Err(bad()),
        }
    } else if let Some(args) = call_args(text, "disk") {
        match args.as_slice() {
            [k] => DomainKind::UnitDiskPolygon {
                segments: k.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        }
    } else {
        return Err(bad());
    };
    domain.check().map_err(ConfigError::Problem)?;
    Ok(domain)
}

/// Facet selector from `none`, `all` or a comma list of sides.
pub fn parse_dirichlet(text: &str, domain: DomainKind) -> Result<FacetSelector, ConfigError> {
    let text = text.trim();
    match text {
        "none" | "" => return Ok(FacetSelector::none()),
        "all" => return Ok(FacetSelector::all()),
        _ => {}
    }
    let (x0, x1, y0, y1) = match domain {
        DomainKind::Interval { a, b } => (a, b, f64::NAN, f64::NAN),
        DomainKind::Rectangle { ax, bx, ay, by } => (ax, bx, ay, by),
        DomainKind::UnitDiskPolygon { .. } => (-1.0, 1.0, -1.0, 1.0),
    };
    let mut sides: Vec<(usize, f64)> = Vec::new();
    for side in text.split(',').map(str::trim) {
        sides.push(match side {
            "left" => (0, x0),
            "right" => (0, x1),
            "bottom" => (1, y0),
            "top" => (1, y1),
            _ => return Err(ConfigError::Invalid(format!("unknown boundary side '{side}'"))),
        });
        if sides.last().unwrap().1.is_nan() {
            return Err(ConfigError::Invalid(format!("side '{side}' does not exist on this domain")));
        }
    }
    let tol = 1e-9 * (1.0 + x0.abs().max(x1.abs()));
    Ok(FacetSelector::new(move |p| sides.iter().any(|&(axis, v)| (p[axis] - v).abs() <= tol)))
}

/// `zero`, `const(re,im)` or `csv:PATH`.
pub fn parse_field(text: &str) -> Result<ScalarField, ConfigError> {
    let text = text.trim();
    if text == "zero" {
        return Ok(ScalarField::zero());
    }
    if let Some(path) = text.strip_prefix("csv:") {
        return Ok(FieldTable::load(Path::new(path.trim()))?.into_field());
    }
    if let Some(args) = call_args(text, "const") {
        if let &[re, im] = numbers(&args)?.as_slice() {
            return Ok(ScalarField::constant(c(re, im)));
        }
    }
    Err(ConfigError::Invalid(format!("cannot parse field '{text}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_builds() {
        for &name in PRESETS {
            let cfg = ProblemConfig {
                preset: name.into(),
                ..ProblemConfig::default()
            };
            let p = build_problem(&cfg).unwrap();
            assert_eq!(p.name, name);
        }
    }

    #[test]
    fn heat_oracle() {
        assert!((Oracle::Heat.eval([0.5, 0.0], 0.0).re - 1.0).abs() < 1e-15);
        assert!((Oracle::Heat.eigenvalue(2) - 4.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn growth_split_moves_negative_potential() {
        let p = build_problem(&ProblemConfig {
            preset: "growth".into(),
            ..ProblemConfig::default()
        })
        .unwrap();
        assert_eq!(p.spec.a00.eval([0.5, 0.0]), 0.0);
        assert_eq!(p.spec.delta_a0.eval([0.5, 0.0]), c(-5.0, 0.0));
        assert_eq!(p.spec.boundary_ratio([1.0, 0.0]), 1.0);
    }

    #[test]
    fn domain_and_side_parsing() {
        assert_eq!(parse_domain("interval(0, 2)").unwrap(), DomainKind::Interval { a: 0.0, b: 2.0 });
        assert_eq!(parse_domain("disk(12)").unwrap(), DomainKind::UnitDiskPolygon { segments: 12 });
        assert!(parse_domain("interval(1,0)").is_err());
        assert!(parse_domain("sphere(3)").is_err());
        let sel = parse_dirichlet("left, top", UNIT_SQUARE).unwrap();
        assert!(sel.contains([0.0, 0.4]) && sel.contains([0.3, 1.0]) && !sel.contains([1.0, 0.5]));
        assert!(parse_dirichlet("top", UNIT_INTERVAL).is_err());
        assert!(parse_dirichlet("middle", UNIT_SQUARE).is_err());
    }

    #[test]
    fn field_parsing() {
        assert_eq!(parse_field("const(1, -2)").unwrap().eval([0.0, 0.0]), c(1.0, -2.0));
        assert_eq!(parse_field("zero").unwrap().eval([3.0, 0.0]), c(0.0, 0.0));
        assert!(parse_field("sin(x)").is_err());
        assert!(matches!(parse_field("csv:/nonexistent/file.csv"), Err(ConfigError::Io(_))));
    }

    #[test]
    fn principal_names() {
        let m = principal("degenerate_disk").unwrap().eval([0.0, 0.0]);
        assert_eq!(m[0][1], c(0.0, 1.0));
        assert_eq!(principal("diag(2, 3)").unwrap().eval([0.0, 0.0])[1][1], c(3.0, 0.0));
        assert!(principal("laplacian").is_err());
    }
}

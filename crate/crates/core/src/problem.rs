//! Continuous problem data: domain, coefficient fields, the zero-order split
//! and the factorization of the principal part.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;

use crate::linalg::{hermitian_eigen, Matrix};
use crate::{Error, Point, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const FACTORIZATION_TOL: f64 = 1e-10;
pub const DEFAULT_SAMPLE_DENSITY: usize = 32;

/// 2x2 complex matrix; one-dimensional problems use the `[0][0]` entry only.
pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    Interval { a: f64, b: f64 },
    Rectangle { ax: f64, bx: f64, ay: f64, by: f64 },
    /// Regular polygon with the given number of sides inscribed in the unit circle.
    UnitDiskPolygon { segments: usize },
}

impl DomainKind {
    pub fn dim(&self) -> usize {
        match self {
            DomainKind::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn check(&self) -> Result<()> {
        match *self {
            DomainKind::Interval { a, b } if !(a < b) => Err(Error::InvalidDomain("interval needs a < b")),
            DomainKind::Rectangle { ax, bx, ay, by } if !(ax < bx && ay < by) => {
                Err(Error::InvalidDomain("rectangle needs ax < bx and ay < by"))
            }
            DomainKind::UnitDiskPolygon { segments } if segments < 3 => {
                Err(Error::InvalidDomain("disk polygon needs at least 3 segments"))
            }
            _ => Ok(()),
        }
    }

    /// Lebesgue measure of the (polygonal) domain.
    pub fn measure(&self) -> f64 {
        match *self {
            DomainKind::Interval { a, b } => b - a,
            DomainKind::Rectangle { ax, bx, ay, by } => (bx - ax) * (by - ay),
            DomainKind::UnitDiskPolygon { segments } => {
                let k = segments as f64;
                0.5 * k * libm::sin(2.0 * PI / k)
            }
        }
    }

    /// Deterministic sample of points in the closed domain.
    pub fn sample_interior(&self, density: usize) -> Vec<Point> {
        let d = density.max(2);
        let t = |i: usize| i as f64 / (d - 1) as f64;
        let mut pts = Vec::new();
        match *self {
            DomainKind::Interval { a, b } => {
                pts.extend((0..d).map(|i| [a + (b - a) * t(i), 0.0]));
            }
            DomainKind::Rectangle { ax, bx, ay, by } => {
                for j in 0..d {
                    for i in 0..d {
                        pts.push([ax + (bx - ax) * t(i), ay + (by - ay) * t(j)]);
                    }
                }
            }
            DomainKind::UnitDiskPolygon { segments } => {
                let inner = libm::cos(PI / segments as f64);
                pts.push([0.0, 0.0]);
                for j in 1..d {
                    let r = inner * t(j);
                    for i in 0..d {
                        let th = 2.0 * PI * i as f64 / d as f64;
                        pts.push([r * libm::cos(th), r * libm::sin(th)]);
                    }
                }
            }
        }
        pts
    }

    /// Deterministic sample of boundary points.
    pub fn sample_boundary(&self, density: usize) -> Vec<Point> {
        let d = density.max(2);
        let mut pts = Vec::new();
        match *self {
            DomainKind::Interval { a, b } => {
                pts.push([a, 0.0]);
                pts.push([b, 0.0]);
            }
            DomainKind::Rectangle { ax, bx, ay, by } => {
                let corners = [[ax, ay], [bx, ay], [bx, by], [ax, by]];
                for s in 0..4 {
                    let (p, q) = (corners[s], corners[(s + 1) % 4]);
                    for i in 0..d {
                        let t = (i as f64 + 0.5) / d as f64;
                        pts.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
                    }
                }
            }
            DomainKind::UnitDiskPolygon { segments } => {
                for s in 0..segments {
                    let th0 = 2.0 * PI * s as f64 / segments as f64;
                    let th1 = 2.0 * PI * (s + 1) as f64 / segments as f64;
                    let (p, q) = ([libm::cos(th0), libm::sin(th0)], [libm::cos(th1), libm::sin(th1)]);
                    pts.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
                }
            }
        }
        pts
    }
}

/// Complex scalar field `x ↦ c(x)`.
#[derive(Clone)]
pub struct ScalarField(Arc<dyn Fn(Point) -> Complex64 + Send + Sync>);

impl ScalarField {
    pub fn new(f: impl Fn(Point) -> Complex64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(move |_| c)
    }

    pub fn zero() -> Self {
        Self::constant(ZERO)
    }

    #[inline]
    pub fn eval(&self, x: Point) -> Complex64 {
        (self.0)(x)
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ScalarField(..)")
    }
}

/// Real scalar field.
#[derive(Clone)]
pub struct RealField(Arc<dyn Fn(Point) -> f64 + Send + Sync>);

impl RealField {
    pub fn new(f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c)
    }

    #[inline]
    pub fn eval(&self, x: Point) -> f64 {
        (self.0)(x)
    }
}

impl fmt::Debug for RealField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("RealField(..)")
    }
}

/// Principal coefficient matrix field `x ↦ 𝔄(x)`.
#[derive(Clone)]
pub struct MatrixField(Arc<dyn Fn(Point) -> Mat2 + Send + Sync>);

impl MatrixField {
    pub fn new(f: impl Fn(Point) -> Mat2 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn constant(m: Mat2) -> Self {
        Self::new(move |_| m)
    }

    pub fn identity() -> Self {
        Self::constant([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn diag(d1: f64, d2: f64) -> Self {
        Self::constant([[Complex64::new(d1, 0.0), ZERO], [ZERO, Complex64::new(d2, 0.0)]])
    }

    /// `[[1, i], [-i, 1]]`: real form `|ξ|²`, complex form only positive semidefinite.
    pub fn degenerate_disk() -> Self {
        Self::constant([[ONE, I], [-I, ONE]])
    }

    /// Scalar multiple of the identity.
    pub fn scalar(a: ScalarField) -> Self {
        Self::new(move |x| {
            let v = a.eval(x);
            [[v, ZERO], [ZERO, v]]
        })
    }

    /// Named presets: `identity`, `degenerate_disk`, `diag(d1,d2)`.
    pub fn preset(name: &str) -> Option<Self> {
        let name = name.trim();
        match name {
            "identity" => Some(Self::identity()),
            "degenerate_disk" => Some(Self::degenerate_disk()),
            _ => {
                let inner = name.strip_prefix("diag(")?.strip_suffix(')')?;
                let mut parts = inner.split(',');
                let d1: f64 = parts.next()?.trim().parse().ok()?;
                let d2: f64 = parts.next()?.trim().parse().ok()?;
                if parts.next().is_some() {
                    return None;
                }
                Some(Self::diag(d1, d2))
            }
        }
    }

    #[inline]
    pub fn eval(&self, x: Point) -> Mat2 {
        (self.0)(x)
    }
}

impl fmt::Debug for MatrixField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("MatrixField(..)")
    }
}

/// Space-time source `f(x, t)`.
#[derive(Clone)]
pub struct SourceField(Arc<dyn Fn(Point, f64) -> Complex64 + Send + Sync>);

impl SourceField {
    pub fn new(f: impl Fn(Point, f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn zero() -> Self {
        Self::new(|_, _| ZERO)
    }

    pub fn stationary(f: ScalarField) -> Self {
        Self::new(move |x, _| f.eval(x))
    }

    #[inline]
    pub fn eval(&self, x: Point, t: f64) -> Complex64 {
        (self.0)(x, t)
    }
}

impl fmt::Debug for SourceField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SourceField(..)")
    }
}

/// Selects the boundary facets that belong to `S` by their midpoint.
#[derive(Clone)]
pub struct FacetSelector(Arc<dyn Fn(Point) -> bool + Send + Sync>);

impl FacetSelector {
    pub fn new(f: impl Fn(Point) -> bool + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn none() -> Self {
        Self::new(|_| false)
    }

    pub fn all() -> Self {
        Self::new(|_| true)
    }

    #[inline]
    pub fn contains(&self, midpoint: Point) -> bool {
        (self.0)(midpoint)
    }
}

impl fmt::Debug for FacetSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FacetSelector(..)")
    }
}

/// Data of the initial-boundary value problem on `Ω × (0, T)`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub domain: DomainKind,
    pub final_time: f64,
    pub principal: MatrixField,
    /// Coefficients `ãₗ` of the first-order part `Σ ãₗ 𝔇ₗ`; empty or one per space dimension.
    pub first_order: Vec<ScalarField>,
    pub a00: RealField,
    pub delta_a0: ScalarField,
    pub b1: RealField,
    pub b00: RealField,
    /// Kept for completeness of the split; no form uses it.
    pub delta_b0: ScalarField,
    pub dirichlet_set: FacetSelector,
    pub source: SourceField,
    pub initial: ScalarField,
}

impl ProblemSpec {
    /// Pure diffusion with identity principal part, Neumann boundary (`b1 = 1`,
    /// `b0 = 0`), empty `S`, zero source and zero initial data.
    pub fn new(domain: DomainKind, final_time: f64) -> Self {
        Self {
            domain,
            final_time,
            principal: MatrixField::identity(),
            first_order: Vec::new(),
            a00: RealField::constant(0.0),
            delta_a0: ScalarField::zero(),
            b1: RealField::constant(1.0),
            b00: RealField::constant(0.0),
            delta_b0: ScalarField::zero(),
            dirichlet_set: FacetSelector::none(),
            source: SourceField::zero(),
            initial: ScalarField::zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn with_principal(mut self, principal: MatrixField) -> Self {
        self.principal = principal;
        self
    }

    pub fn with_first_order(mut self, coefficients: Vec<ScalarField>) -> Self {
        self.first_order = coefficients;
        self
    }

    pub fn with_dirichlet_set(mut self, selector: FacetSelector) -> Self {
        self.dirichlet_set = selector;
        self
    }

    pub fn with_source(mut self, source: SourceField) -> Self {
        self.source = source;
        self
    }

    pub fn with_initial(mut self, initial: ScalarField) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_split(mut self, split: ZeroOrderSplit) -> Self {
        self.a00 = split.a00;
        self.delta_a0 = split.delta_a0;
        self.b00 = split.b00;
        self.delta_b0 = split.delta_b0;
        self
    }

    /// Splits `a0`, `b0` and installs the result together with `b1`.
    pub fn with_zero_order(self, a0: ScalarField, b0: ScalarField, b1: RealField) -> Result<Self> {
        let robin: Vec<Point> = self
            .domain
            .sample_boundary(DEFAULT_SAMPLE_DENSITY)
            .into_iter()
            .filter(|&x| !self.dirichlet_set.contains(x))
            .collect();
        let split = split_zero_order(a0, b0, b1.clone(), &robin)?;
        let mut spec = self.with_split(split);
        spec.b1 = b1;
        Ok(spec)
    }

    /// `b00 / b1` on the Robin part of the boundary (zero where `b1` vanishes).
    #[inline]
    pub fn boundary_ratio(&self, x: Point) -> f64 {
        let b1 = self.b1.eval(x);
        if b1 == 0.0 {
            0.0
        } else {
            self.b00.eval(x) / b1
        }
    }
}

/// Result of splitting `a0 = a00 + δa0`, `b0 = b00 + δb0`.
#[derive(Debug, Clone)]
pub struct ZeroOrderSplit {
    pub a00: RealField,
    pub delta_a0: ScalarField,
    pub b00: RealField,
    pub delta_b0: ScalarField,
}

/// `a00 = max(Re a0, 0)` and `b00 = b1 max(Re(b0/b1), 0)`; the remainders go
/// to `δa0`, `δb0`. `robin_points` are boundary points outside `S`, where
/// `b1` must not vanish.
pub fn split_zero_order(
    a0: ScalarField,
    b0: ScalarField,
    b1: RealField,
    robin_points: &[Point],
) -> Result<ZeroOrderSplit> {
    if robin_points.iter().any(|&x| b1.eval(x) == 0.0) {
        return Err(Error::DivisionByZeroB1);
    }
    let a0_pos = a0.clone();
    let a00 = RealField::new(move |x| a0_pos.eval(x).re.max(0.0));
    let a0_rest = a0;
    let delta_a0 = ScalarField::new(move |x| {
        let v = a0_rest.eval(x);
        v - Complex64::new(v.re.max(0.0), 0.0)
    });
    let b00_of = {
        let (b0, b1) = (b0.clone(), b1.clone());
        move |x: Point| {
            let d = b1.eval(x);
            if d == 0.0 {
                0.0
            } else {
                d * (b0.eval(x).re / d).max(0.0)
            }
        }
    };
    let b00_rest = b00_of.clone();
    let b00 = RealField::new(b00_of);
    let delta_b0 = ScalarField::new(move |x| b0.eval(x) - Complex64::new(b00_rest(x), 0.0));
    Ok(ZeroOrderSplit {
        a00,
        delta_a0,
        b00,
        delta_b0,
    })
}

/// Outcome of the sampled coefficient checks.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub sample_count: usize,
    /// `max |𝔄 - 𝔄*|`.
    pub hermitian_residual: f64,
    /// Smallest value of `Σ aᵢⱼ ξᵢ ξⱼ` over sampled points and real unit `ξ`.
    pub ellipticity: f64,
    /// Smallest eigenvalue of `𝔄(x)` over sampled points.
    pub min_complex_eigenvalue: f64,
    pub min_a00: f64,
    /// Smallest `b00/b1` on the sampled Robin boundary (`+∞` when it is empty).
    pub min_boundary_ratio: f64,
    pub hermitian: bool,
    pub elliptic: bool,
    pub positive_semidefinite: bool,
    /// Whether the Hermitian form itself is coercive (smallest eigenvalue > 0).
    pub coercive: bool,
}

/// Eigenvalues `(λmin, λmax)` of the Hermitian part of the leading `n x n` block.
fn hermitian_block_extremes(m: &Mat2, n: usize) -> (f64, f64) {
    if n == 1 {
        return (m[0][0].re, m[0][0].re);
    }
    let a = m[0][0].re;
    let d = m[1][1].re;
    let b = (m[0][1] + m[1][0].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let rad = libm::hypot(0.5 * (a - d), b.norm());
    (mean - rad, mean + rad)
}

fn hermitian_residual(m: &Mat2, n: usize) -> f64 {
    let mut r = m[0][0].im.abs();
    if n == 2 {
        r = r.max(m[1][1].im.abs()).max((m[0][1] - m[1][0].conj()).norm());
    }
    r
}

/// Smallest value of the real quadratic form over real unit vectors.
fn real_form_min(m: &Mat2, n: usize) -> f64 {
    if n == 1 {
        return m[0][0].re;
    }
    let a = m[0][0].re;
    let d = m[1][1].re;
    let b = 0.5 * (m[0][1].re + m[1][0].re);
    0.5 * (a + d) - libm::hypot(0.5 * (a - d), b)
}

/// Samples the coefficients and checks the structural hypotheses.
///
/// The principal matrix must be Hermitian, its real quadratic form uniformly
/// positive and its complex form nonnegative. Coercivity of the complex form
/// is reported but not required.
pub fn validate_coefficients(spec: &ProblemSpec, sample_density: usize) -> Result<ValidationReport> {
    if sample_density < 2 {
        return Err(Error::InvalidArgument("sample density must be at least 2"));
    }
    spec.domain.check()?;
    if !(spec.final_time > 0.0) {
        return Err(Error::InvalidFinalTime(spec.final_time));
    }
    let n = spec.dim();
    let interior = spec.domain.sample_interior(sample_density);
    let mut herm = 0.0f64;
    let mut ell = f64::INFINITY;
    let mut min_eig = f64::INFINITY;
    let mut min_a00 = f64::INFINITY;
    for &x in &interior {
        let m = spec.principal.eval(x);
        herm = herm.max(hermitian_residual(&m, n));
        ell = ell.min(real_form_min(&m, n));
        min_eig = min_eig.min(hermitian_block_extremes(&m, n).0);
        min_a00 = min_a00.min(spec.a00.eval(x));
    }
    let mut min_ratio = f64::INFINITY;
    for x in spec.domain.sample_boundary(sample_density) {
        if spec.dirichlet_set.contains(x) {
            continue;
        }
        if spec.b1.eval(x) == 0.0 {
            return Err(Error::DivisionByZeroB1);
        }
        min_ratio = min_ratio.min(spec.boundary_ratio(x));
    }

    if herm > HERMITIAN_TOL {
        return Err(Error::NonHermitian { residual: herm });
    }
    if !(ell > 0.0) {
        return Err(Error::NotElliptic { margin: ell });
    }
    if min_eig < -PSD_TOL {
        return Err(Error::NotPositiveSemidefinite { eigenvalue: min_eig });
    }
    if min_a00 < 0.0 {
        return Err(Error::NegativeA00(min_a00));
    }
    if min_ratio < 0.0 {
        return Err(Error::NegativeBoundaryRatio(min_ratio));
    }
    Ok(ValidationReport {
        sample_count: interior.len(),
        hermitian_residual: herm,
        ellipticity: ell,
        min_complex_eigenvalue: min_eig,
        min_a00,
        min_boundary_ratio: min_ratio,
        hermitian: true,
        elliptic: true,
        positive_semidefinite: true,
        coercive: min_eig > PSD_TOL,
    })
}

/// Principal part together with its pointwise Hermitian square root `𝔇 = √𝔄`.
#[derive(Debug, Clone)]
pub struct FactorizedPrincipal {
    principal: MatrixField,
    dim: usize,
    /// `max ‖𝔇*𝔇 - 𝔄‖_max` over the sample points used to build it.
    pub residual_bound: f64,
}

impl FactorizedPrincipal {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of first-order operators `𝔇ₗ` (equal to the space dimension).
    pub fn rank(&self) -> usize {
        self.dim
    }

    pub fn principal(&self, x: Point) -> Mat2 {
        self.principal.eval(x)
    }

    /// `𝔇(x)`; entries outside the leading `n x n` block are zero.
    pub fn factor(&self, x: Point) -> Result<Mat2> {
        hermitian_sqrt(&self.principal.eval(x), self.dim)
    }
}

/// Hermitian positive semidefinite square root of the leading `n x n` block.
pub fn hermitian_sqrt(m: &Mat2, n: usize) -> Result<Mat2> {
    let block = Matrix::from_fn(n, n, |i, j| m[i][j]);
    let eig = hermitian_eigen(&block)?;
    let mut root = [[ZERO; 2]; 2];
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda < -PSD_TOL {
            return Err(Error::NotPositiveSemidefinite { eigenvalue: lambda });
        }
        let s = libm::sqrt(lambda.max(0.0));
        for i in 0..n {
            for j in 0..n {
                root[i][j] += eig.vectors[(i, k)] * eig.vectors[(j, k)].conj() * s;
            }
        }
    }
    Ok(root)
}

/// `max |𝔇*𝔇 - 𝔄|` over the leading block.
pub fn factorization_residual(d: &Mat2, a: &Mat2, n: usize) -> f64 {
    let mut r = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut s = ZERO;
            for l in 0..n {
                s += d[l][i].conj() * d[l][j];
            }
            r = r.max((s - a[i][j]).norm());
        }
    }
    r
}

/// Builds `𝔇 = √𝔄` and certifies `𝔇*𝔇 = 𝔄` at the sample points.
pub fn factorize_principal(spec: &ProblemSpec, sample_points: &[Point]) -> Result<FactorizedPrincipal> {
    let n = spec.dim();
    let mut residual = 0.0f64;
    for &x in sample_points {
        let a = spec.principal.eval(x);
        let d = hermitian_sqrt(&a, n)?;
        residual = residual.max(factorization_residual(&d, &a, n));
    }
    if residual > FACTORIZATION_TOL {
        return Err(Error::NotPositiveSemidefinite { eigenvalue: -residual });
    }
    Ok(FactorizedPrincipal {
        principal: spec.principal.clone(),
        dim: n,
        residual_bound: residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn disk_spec() -> ProblemSpec {
        ProblemSpec::new(DomainKind::UnitDiskPolygon { segments: 32 }, 1.0)
            .with_principal(MatrixField::degenerate_disk())
    }

    #[test]
    fn identity_passes_everything() {
        let spec = ProblemSpec::new(DomainKind::Rectangle { ax: 0.0, bx: 1.0, ay: 0.0, by: 1.0 }, 1.0);
        let r = validate_coefficients(&spec, 8).unwrap();
        assert_eq!(r.ellipticity, 1.0);
        assert_eq!(r.min_complex_eigenvalue, 1.0);
        assert!(r.hermitian && r.elliptic && r.positive_semidefinite && r.coercive);
    }

    #[test]
    fn degenerate_disk_is_elliptic_but_not_coercive() {
        let r = validate_coefficients(&disk_spec(), DEFAULT_SAMPLE_DENSITY).unwrap();
        assert!((r.ellipticity - 1.0).abs() <= 1e-12);
        assert!(r.min_complex_eigenvalue.abs() <= 1e-12);
        assert!(r.positive_semidefinite);
        assert!(!r.coercive);
    }

    #[test]
    fn indefinite_principal_is_rejected() {
        let spec = disk_spec().with_principal(MatrixField::constant([[c(1.0, 0.0), c(0.0, 2.0)], [c(0.0, -2.0), c(1.0, 0.0)]]));
        match validate_coefficients(&spec, 4) {
            Err(Error::NotPositiveSemidefinite { eigenvalue }) => assert!((eigenvalue + 1.0).abs() < 1e-14),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_hermitian_and_non_elliptic_are_rejected() {
        let skew = MatrixField::constant([[c(1.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
        assert!(matches!(
            validate_coefficients(&disk_spec().with_principal(skew), 4),
            Err(Error::NonHermitian { .. })
        ));
        let flat = MatrixField::diag(1.0, 0.0);
        assert!(matches!(
            validate_coefficients(&disk_spec().with_principal(flat), 4),
            Err(Error::NotElliptic { .. })
        ));
        let bad_t = ProblemSpec::new(DomainKind::Interval { a: 0.0, b: 1.0 }, 0.0);
        assert_eq!(validate_coefficients(&bad_t, 4).unwrap_err(), Error::InvalidFinalTime(0.0));
    }

    #[test]
    fn split_rules() {
        let pts = [[0.0, 0.0]];
        let s = split_zero_order(
            ScalarField::constant(c(1.0, 0.0)),
            ScalarField::constant(c(1.0, 0.0)),
            RealField::constant(1.0),
            &pts,
        )
        .unwrap();
        assert_eq!(s.a00.eval([0.0, 0.0]), 1.0);
        assert_eq!(s.delta_a0.eval([0.0, 0.0]), c(0.0, 0.0));
        assert_eq!(s.b00.eval([0.0, 0.0]), 1.0);
        assert_eq!(s.delta_b0.eval([0.0, 0.0]), c(0.0, 0.0));

        let s = split_zero_order(ScalarField::constant(c(-2.0, 1.0)), ScalarField::zero(), RealField::constant(1.0), &pts).unwrap();
        assert_eq!(s.a00.eval([0.3, 0.0]), 0.0);
        assert_eq!(s.delta_a0.eval([0.3, 0.0]), c(-2.0, 1.0));

        let s = split_zero_order(ScalarField::constant(c(3.0, -1.0)), ScalarField::zero(), RealField::constant(1.0), &pts).unwrap();
        assert_eq!(s.a00.eval([0.3, 0.0]), 3.0);
        assert_eq!(s.delta_a0.eval([0.3, 0.0]), c(0.0, -1.0));
        assert_eq!(c(s.a00.eval([0.3, 0.0]), 0.0) + s.delta_a0.eval([0.3, 0.0]), c(3.0, -1.0));
    }

    #[test]
    fn split_with_negative_b1() {
        // b0/b1 = -2/-1 = 2 > 0, so everything goes to b00.
        let s = split_zero_order(ScalarField::zero(), ScalarField::constant(c(-2.0, 0.5)), RealField::constant(-1.0), &[[1.0, 0.0]]).unwrap();
        assert_eq!(s.b00.eval([1.0, 0.0]), -2.0);
        assert_eq!(s.delta_b0.eval([1.0, 0.0]), c(0.0, 0.5));
    }

    #[test]
    fn split_rejects_vanishing_b1_outside_s() {
        let r = split_zero_order(ScalarField::zero(), ScalarField::zero(), RealField::constant(0.0), &[[1.0, 0.0]]);
        assert_eq!(r.unwrap_err(), Error::DivisionByZeroB1);
    }

    #[test]
    fn square_roots() {
        let id = hermitian_sqrt(&[[ONE, ZERO], [ZERO, ONE]], 2).unwrap();
        assert!(factorization_residual(&id, &[[ONE, ZERO], [ZERO, ONE]], 2) < 1e-15);
        assert!((id[0][0] - ONE).norm() < 1e-15 && id[0][1].norm() < 1e-15);

        let a = [[ONE, I], [-I, ONE]];
        let d = hermitian_sqrt(&a, 2).unwrap();
        let s = 1.0 / libm::sqrt(2.0);
        for i in 0..2 {
            for j in 0..2 {
                assert!((d[i][j] - a[i][j] * s).norm() < 1e-14, "{d:?}");
            }
        }

        let diag = [[c(4.0, 0.0), ZERO], [ZERO, ZERO]];
        let d = hermitian_sqrt(&diag, 2).unwrap();
        assert!((d[0][0] - c(2.0, 0.0)).norm() < 1e-15);
        assert!(d[1][1].norm() < 1e-15 && d[0][1].norm() < 1e-15);
    }

    #[test]
    fn factorization_certifies_residual() {
        let spec = disk_spec();
        let pts = spec.domain.sample_interior(4);
        let f = factorize_principal(&spec, &pts).unwrap();
        assert!(f.residual_bound <= FACTORIZATION_TOL);
        let bad = disk_spec().with_principal(MatrixField::diag(1.0, -1.0));
        assert!(matches!(factorize_principal(&bad, &pts), Err(Error::NotPositiveSemidefinite { .. })));
    }

    #[test]
    fn presets_parse() {
        assert!(MatrixField::preset("identity").is_some());
        assert!(MatrixField::preset("degenerate_disk").is_some());
        let d = MatrixField::preset("diag(2, 0.5)").unwrap().eval([0.0, 0.0]);
        assert_eq!(d[0][0], c(2.0, 0.0));
        assert_eq!(d[1][1], c(0.5, 0.0));
        assert!(MatrixField::preset("diag(1)").is_none());
        assert!(MatrixField::preset("nope").is_none());
    }

    #[test]
    fn domain_measures() {
        assert_eq!(DomainKind::Interval { a: 0.0, b: 2.0 }.measure(), 2.0);
        let k = DomainKind::UnitDiskPolygon { segments: 4 };
        assert!((k.measure() - 2.0).abs() < 1e-15);
        assert!(DomainKind::UnitDiskPolygon { segments: 2 }.check().is_err());
    }
}

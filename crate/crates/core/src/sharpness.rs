//! The series
//!
//! ```text
//! u_ε(z, t) = Σₖ zᵏ t^{k/2} / (T^{(k+1)/2} (k+1)^{ε/2})
//! ```
//!
//! on the unit disk with `𝔄 = [[1, i], [-i, 1]]`, `S = ∅`, `b₁ = b₀ = 1`, whose
//! `L²(0,T;H⁺)` norm `A(ε) = 2π Σ (k+1)^{-1-ε}` is finite for every `ε > 0`
//! while the `L²(0,T;Hˢ)` lower bound `B(s,ε) = π Σ k^{2s-1} (k+1)^{-1-ε}`
//! diverges once `ε ≤ 2s - 1`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::assembly::{assemble_plus_form, interpolate};
use crate::mesh::build_mesh;
use crate::problem::{
    factorize_principal, DomainKind, MatrixField, ProblemSpec, RealField, ScalarField, DEFAULT_SAMPLE_DENSITY,
};
use crate::{Error, Result};

/// Partial sum of `A(ε)` through `k = terms` and an upper bound on the rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub terms: usize,
    pub partial: f64,
    pub tail: f64,
}

impl SeriesValue {
    /// `partial ≤ A ≤ partial + tail`.
    pub fn brackets(&self, value: f64) -> bool {
        self.partial <= value && value <= self.partial + self.tail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converges,
    Diverges,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Converges => "converges",
            Verdict::Diverges => "diverges",
        }
    }
}

/// Partial sum of `B(s, ε)` with its divergence verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub s: f64,
    pub epsilon: f64,
    pub terms: usize,
    pub partial: f64,
    /// Exponent test: diverges iff `ε ≤ 2s - 1`.
    pub verdict: Verdict,
    /// Dyadic block `B(2N) - B(N)`.
    pub block: f64,
    /// Lower bound on the block when divergent, upper bound when convergent.
    pub threshold: f64,
    /// The measured block agrees with the verdict.
    pub corroborated: bool,
}

fn sum_terms(lo: usize, hi: usize, term: impl Fn(f64) -> f64) -> f64 {
    // Smallest terms first.
    (lo..=hi).rev().map(|k| term(k as f64)).fold(0.0, |acc, t| acc + t)
}

fn a_term(epsilon: f64) -> impl Fn(f64) -> f64 {
    move |k| libm::pow(k + 1.0, -1.0 - epsilon)
}

fn b_term(s: f64, epsilon: f64) -> impl Fn(f64) -> f64 {
    let p = 2.0 * s - 1.0;
    move |k| {
        let lead = if k == 0.0 {
            if p == 0.0 { 1.0 } else { 0.0 }
        } else {
            libm::pow(k, p)
        };
        lead * libm::pow(k + 1.0, -1.0 - epsilon)
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument("epsilon must be positive"))
    }
}

/// `2π Σ_{k=0}^{N} (k+1)^{-1-ε}` with tail `2π (N+1)^{-ε} / ε`.
pub fn series_plus_norm(epsilon: f64, terms: usize) -> Result<SeriesValue> {
    check_epsilon(epsilon)?;
    Ok(SeriesValue {
        terms,
        partial: 2.0 * PI * sum_terms(0, terms, a_term(epsilon)),
        tail: 2.0 * PI * libm::pow(terms as f64 + 1.0, -epsilon) / epsilon,
    })
}

/// `π Σ_{k=0}^{N} k^{2s-1} (k+1)^{-1-ε}` for `0 < s ≤ 1`.
pub fn series_hs_lower_bound(s: f64, epsilon: f64, terms: usize) -> Result<LowerBound> {
    check_epsilon(epsilon)?;
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidArgument("s must lie in (0, 1]"));
    }
    let n = terms.max(1);
    let term = b_term(s, epsilon);
    let partial = PI * sum_terms(0, terms, &term);
    let block = PI * sum_terms(n + 1, 2 * n, &term);
    let verdict = if epsilon <= 2.0 * s - 1.0 { Verdict::Diverges } else { Verdict::Converges };
    let (threshold, corroborated) = match verdict {
        Verdict::Diverges => {
            let tau = PI * libm::pow(2.0, -2.0 - epsilon);
            (tau, block >= tau)
        }
        Verdict::Converges => {
            let q = epsilon - (2.0 * s - 1.0);
            let cap = PI * libm::pow(n as f64, -q) / q;
            (cap, block <= cap)
        }
    };
    Ok(LowerBound {
        s,
        epsilon,
        terms,
        partial,
        verdict,
        block,
        threshold,
        corroborated,
    })
}

/// A finite `A(ε)` paired with a divergent `B(s, ε)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub s: f64,
    pub epsilon: f64,
    pub plus_norm: SeriesValue,
    pub lower_bound: LowerBound,
}

impl Witness {
    pub fn certified(&self) -> bool {
        self.plus_norm.partial.is_finite()
            && self.plus_norm.tail.is_finite()
            && self.lower_bound.verdict == Verdict::Diverges
            && self.lower_bound.corroborated
    }
}

/// `ε = (2s - 1)/2` for `1/2 < s < 1`.
pub fn find_divergence_epsilon(s: f64, terms: usize) -> Result<Witness> {
    if !(s > 0.5 && s < 1.0) {
        return Err(Error::SOutOfRange(s));
    }
    let epsilon = (2.0 * s - 1.0) / 2.0;
    Ok(Witness {
        s,
        epsilon,
        plus_norm: series_plus_norm(epsilon, terms)?,
        lower_bound: series_hs_lower_bound(s, epsilon, terms)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpnessRow {
    pub terms: usize,
    pub partial_a: f64,
    pub tail_a: f64,
    pub partial_b: f64,
    pub verdict: Verdict,
}

/// Partial sums of both series at several truncations.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessSeries {
    pub s: f64,
    pub epsilon: f64,
    pub final_time: f64,
    pub rows: Vec<SharpnessRow>,
}

impl SharpnessSeries {
    pub fn new(s: f64, epsilon: f64, final_time: f64, truncations: &[usize]) -> Result<Self> {
        if !(final_time > 0.0) {
            return Err(Error::InvalidFinalTime(final_time));
        }
        let rows = truncations
            .iter()
            .map(|&n| {
                let a = series_plus_norm(epsilon, n)?;
                let b = series_hs_lower_bound(s, epsilon, n)?;
                Ok(SharpnessRow {
                    terms: n,
                    partial_a: a.partial,
                    tail_a: a.tail,
                    partial_b: b.partial,
                    verdict: b.verdict,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            s,
            epsilon,
            final_time,
            rows,
        })
    }

    /// `10, 100, …` up to and including `max_terms`.
    pub fn decades(max_terms: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut n = 10usize;
        while n < max_terms {
            out.push(n);
            n = n.saturating_mul(10);
        }
        out.push(max_terms);
        out
    }
}

/// The degenerate disk problem on the inscribed `segments`-gon.
pub fn disk_problem(segments: usize, final_time: f64) -> ProblemSpec {
    let mut spec =
        ProblemSpec::new(DomainKind::UnitDiskPolygon { segments }, final_time).with_principal(MatrixField::degenerate_disk());
    spec.b1 = RealField::constant(1.0);
    spec.b00 = RealField::constant(1.0);
    spec
}

/// Discrete `∫₀ᵀ ‖u_ε‖²₊ dt` for the first `terms` modes interpolated on a
/// disk mesh, with the time integrals `∫₀ᵀ t^{(k+k')/2} dt` done exactly.
pub fn discrete_series_norm(epsilon: f64, terms: usize, segments: usize, rings: usize) -> Result<f64> {
    check_epsilon(epsilon)?;
    let spec = disk_problem(segments, 1.0);
    let mesh = build_mesh(spec.domain, rings, &spec.dirichlet_set)?;
    let fac = factorize_principal(&spec, &spec.domain.sample_interior(DEFAULT_SAMPLE_DENSITY))?;
    let k_plus = assemble_plus_form(&mesh, &spec, &fac)?;
    let modes: Vec<Vec<Complex64>> = (0..terms)
        .map(|k| interpolate(&mesh, &ScalarField::new(move |x| Complex64::new(x[0], x[1]).powi(k as i32))))
        .collect();
    let images: Vec<Vec<Complex64>> = modes.iter().map(|m| k_plus.mul_vec(m)).collect();
    let scale: Vec<f64> = (0..terms).map(|k| libm::pow(k as f64 + 1.0, -epsilon / 2.0)).collect();
    let mut total = 0.0;
    for k in (0..terms).rev() {
        for j in (0..terms).rev() {
            let time = 1.0 / ((k + j) as f64 / 2.0 + 1.0);
            let g = crate::linalg::inner(&modes[k], &images[j]).re;
            total += time * scale[k] * scale[j] * g;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_term() {
        for eps in [0.1, 1.0, 3.0] {
            assert_eq!(series_plus_norm(eps, 0).unwrap().partial, 2.0 * PI);
        }
    }

    #[test]
    fn zeta_two_is_bracketed() {
        let a = series_plus_norm(1.0, 1000).unwrap();
        assert!(a.brackets(2.0 * PI * PI * PI / 6.0), "{a:?}");
    }

    #[test]
    fn witness_formula() {
        assert_eq!(find_divergence_epsilon(0.75, 100).unwrap().epsilon, 0.25);
        assert!((find_divergence_epsilon(0.6, 100).unwrap().epsilon - 0.1).abs() < 1e-15);
        assert_eq!(find_divergence_epsilon(0.4, 10), Err(Error::SOutOfRange(0.4)));
        assert_eq!(find_divergence_epsilon(1.0, 10), Err(Error::SOutOfRange(1.0)));
    }

    #[test]
    fn boundary_exponent_converges() {
        let b = series_hs_lower_bound(0.5, 0.01, 1000).unwrap();
        assert_eq!(b.verdict, Verdict::Converges);
        assert!(b.corroborated);
        // k = 0 contributes k⁰ = 1.
        assert_eq!(series_hs_lower_bound(0.5, 1.0, 0).unwrap().partial, PI);
        assert_eq!(series_hs_lower_bound(0.8, 1.0, 0).unwrap().partial, 0.0);
    }

    #[test]
    fn divergence_is_corroborated() {
        let b = series_hs_lower_bound(0.8, 0.1, 1000).unwrap();
        assert_eq!(b.verdict, Verdict::Diverges);
        assert!(b.corroborated, "{b:?}");
        let c = series_hs_lower_bound(1.0, 2.0, 1000).unwrap();
        assert_eq!(c.verdict, Verdict::Converges);
        assert!(c.corroborated, "{c:?}");
    }

    #[test]
    fn decades() {
        assert_eq!(SharpnessSeries::decades(1000), [10, 100, 1000]);
        assert_eq!(SharpnessSeries::decades(5), [5]);
        assert_eq!(SharpnessSeries::decades(250), [10, 100, 250]);
    }
}

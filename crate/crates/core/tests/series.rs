use std::f64::consts::PI;

use noncoercive_core::sharpness::{
    discrete_series_norm, find_divergence_epsilon, series_hs_lower_bound, series_plus_norm, SharpnessSeries, Verdict,
};

/// Direct summation, smallest terms first.
fn reference(epsilon: f64, terms: usize) -> f64 {
    2.0 * PI * (0..=terms).rev().map(|k| (k as f64 + 1.0).powf(-1.0 - epsilon)).sum::<f64>()
}

#[test]
fn zeta_values_are_bracketed() {
    // ζ(2) and ζ(3/2).
    let a = series_plus_norm(1.0, 10_000).unwrap();
    assert!(a.brackets(2.0 * PI * PI * PI / 6.0));
    let b = series_plus_norm(0.5, 1_000_000).unwrap();
    assert!(b.brackets(2.0 * PI * 2.612_375_348_685_488));
}

#[test]
fn tail_bound_covers_long_reference_sums() {
    for eps in [0.25, 0.5, 1.0, 2.0] {
        let long = reference(eps, 10_000_000);
        for n in [10, 1000] {
            let a = series_plus_norm(eps, n).unwrap();
            assert!(a.brackets(long), "eps {eps} N {n}: {a:?} vs {long}");
        }
    }
}

#[test]
fn partial_sums_increase() {
    let series = SharpnessSeries::new(0.75, 0.25, 1.0, &[1, 2, 5, 10, 100, 1000]).unwrap();
    for w in series.rows.windows(2) {
        assert!(w[1].partial_a > w[0].partial_a);
        assert!(w[1].partial_b > w[0].partial_b);
        assert!(w[1].tail_a < w[0].tail_a);
    }
    assert!(series.rows.iter().all(|r| r.verdict == Verdict::Diverges));
}

#[test]
fn divergent_lower_bound_grows() {
    let small = series_hs_lower_bound(0.8, 0.1, 1000).unwrap();
    let large = series_hs_lower_bound(0.8, 0.1, 1_000_000).unwrap();
    assert_eq!(large.verdict, Verdict::Diverges);
    assert!(large.partial > 5.0 * small.partial, "{} vs {}", large.partial, small.partial);
}

#[test]
fn convergent_lower_bounds() {
    for eps in [0.01, 0.5, 1.0] {
        let b = series_hs_lower_bound(0.5, eps, 10_000).unwrap();
        assert_eq!(b.verdict, Verdict::Converges);
        assert!(b.corroborated);
    }
    // Σ k/(k+1)³ ≤ Σ k⁻² = π²/6.
    let b = series_hs_lower_bound(1.0, 2.0, 100_000).unwrap();
    assert_eq!(b.verdict, Verdict::Converges);
    assert!(b.partial < PI * PI * PI / 6.0);
}

#[test]
fn witnesses_for_several_smoothness_indices() {
    for s in [0.6, 0.75, 0.9] {
        let w = find_divergence_epsilon(s, 100_000).unwrap();
        assert!((w.epsilon - (2.0 * s - 1.0) / 2.0).abs() < 1e-15);
        assert!(w.certified(), "{w:?}");
    }
}

#[test]
fn discrete_norm_approaches_the_truncated_sum() {
    let eps = 0.5;
    let terms = 8;
    let want = series_plus_norm(eps, terms - 1).unwrap().partial;
    let coarse = discrete_series_norm(eps, terms, 64, 16).unwrap();
    let fine = discrete_series_norm(eps, terms, 128, 32).unwrap();
    let (e1, e2) = ((coarse - want).abs() / want, (fine - want).abs() / want);
    assert!(e2 < 0.05 && e2 < e1, "{e1} {e2}");
}

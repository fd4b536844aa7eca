use noncoercive_core::assembly::{assemble_forms, assemble_plus_form, dual_norm, AssembledForms, DualNorm};
use noncoercive_core::basis::{dual_orthogonality, generalized_eigenbasis, verify_orthogonality, ORTHO_TOL};
use noncoercive_core::estimates::compute_constants;
use noncoercive_core::linalg::inner;
use noncoercive_core::mesh::{build_mesh, FacetTag, Mesh};
use noncoercive_core::problem::{
    factorize_principal, split_zero_order, validate_coefficients, DomainKind, FacetSelector, FactorizedPrincipal, MatrixField,
    ProblemSpec, RealField, ScalarField,
};
use noncoercive_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const UNIT_SQUARE: DomainKind = DomainKind::Rectangle { ax: 0.0, bx: 1.0, ay: 0.0, by: 1.0 };

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cplx() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b))
}

fn cvec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec(cplx(), n)
}

fn setup(spec: &ProblemSpec, resolution: usize) -> (Mesh, FactorizedPrincipal, AssembledForms) {
    let mesh = build_mesh(spec.domain, resolution, &spec.dirichlet_set).unwrap();
    let fac = factorize_principal(spec, &spec.domain.sample_interior(8)).unwrap();
    let forms = assemble_forms(&mesh, spec, &fac).unwrap();
    (mesh, fac, forms)
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// Element-by-element energy with `∇u* 𝔄 ∇u` and exact P1 edge masses.
fn energy_oracle(mesh: &Mesh, a: [[Complex64; 2]; 2], a00: f64, ratio: f64, u: &[Complex64]) -> f64 {
    let mut total = 0.0;
    for cell in &mesh.cells {
        let geo = mesh.geometry(cell);
        let mut grad = [c(0.0, 0.0); 2];
        for (k, &node) in cell.nodes().iter().enumerate() {
            for l in 0..2 {
                grad[l] += u[node] * geo.gradients[k][l];
            }
        }
        let mut e = c(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                e += grad[i].conj() * a[i][j] * grad[j];
            }
        }
        let [p, q, r] = [cell.nodes()[0], cell.nodes()[1], cell.nodes()[2]].map(|n| u[n]);
        let mass = geo.measure / 6.0 * (p.norm_sqr() + q.norm_sqr() + r.norm_sqr() + (p * q.conj() + q * r.conj() + r * p.conj()).re);
        total += geo.measure * e.re + a00 * mass;
    }
    for f in mesh.facets.iter().filter(|f| f.tag == FacetTag::Robin) {
        let (p, q) = (u[f.nodes()[0]], u[f.nodes()[1]]);
        total += ratio * f.measure / 3.0 * (p.norm_sqr() + q.norm_sqr() + (p * q.conj()).re);
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn plus_form_matches_elementwise_energy(
        b in cvec(4), a00 in 0.0..3.0f64, ratio in 0.0..3.0f64, u in cvec(25)
    ) {
        // 𝔄 = B* B is Hermitian positive semidefinite.
        let bm = [[b[0], b[1]], [b[2], b[3]]];
        let mut a = [[c(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                a[i][j] = bm[0][i].conj() * bm[0][j] + bm[1][i].conj() * bm[1][j];
            }
        }
        let mut spec = ProblemSpec::new(UNIT_SQUARE, 1.0).with_principal(MatrixField::constant(a));
        spec.a00 = RealField::constant(a00);
        spec.b00 = RealField::constant(ratio);
        let mesh = build_mesh(spec.domain, 4, &spec.dirichlet_set).unwrap();
        let fac = factorize_principal(&spec, &spec.domain.sample_interior(4)).unwrap();
        let k = assemble_plus_form(&mesh, &spec, &fac).unwrap();
        let got = k.form(&u, &u);
        let want = energy_oracle(&mesh, a, a00, ratio, &u);
        prop_assert!(got.im.abs() <= 1e-10 * (1.0 + want));
        prop_assert!((got.re - want).abs() <= 1e-10 * (1.0 + want), "{} vs {}", got.re, want);
    }

    #[test]
    fn degenerate_matrix_is_positive_semidefinite(w in cvec(2)) {
        let a = MatrixField::degenerate_disk().eval([0.3, -0.2]);
        let mut q = c(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                q += w[i].conj() * a[i][j] * w[j];
            }
        }
        let spec = ProblemSpec::new(DomainKind::UnitDiskPolygon { segments: 16 }, 1.0).with_principal(MatrixField::degenerate_disk());
        let report = validate_coefficients(&spec, 8).unwrap();
        let n2 = w[0].norm_sqr() + w[1].norm_sqr();
        prop_assert!(q.im.abs() < 1e-12 * (1.0 + n2));
        prop_assert!(q.re >= report.min_complex_eigenvalue * n2 - 1e-12 * (1.0 + n2));
        // Real directions see the full ellipticity.
        let xi = [w[0].re, w[1].re];
        let real_q = xi[0] * xi[0] + xi[1] * xi[1];
        let qr = (0..2).map(|i| (0..2).map(|j| (a[i][j] * xi[i] * xi[j]).re).sum::<f64>()).sum::<f64>();
        prop_assert!((qr - report.ellipticity * real_q).abs() < 1e-12 * (1.0 + real_q));
    }

    #[test]
    fn zero_order_split_recombines(a0 in cplx(), b0 in cplx(), b1 in 0.1..3.0f64, x in 0.0..1.0f64, y in 0.0..1.0f64) {
        let split = split_zero_order(ScalarField::constant(a0), ScalarField::constant(b0), RealField::constant(b1), &[[0.0, 0.5]]).unwrap();
        let p = [x, y];
        let a = c(split.a00.eval(p), 0.0) + split.delta_a0.eval(p);
        let b = c(split.b00.eval(p), 0.0) + split.delta_b0.eval(p);
        prop_assert!((a - a0).norm() < 1e-15 && (b - b0).norm() < 1e-15);
        prop_assert!(split.a00.eval(p) >= 0.0 && split.b00.eval(p) / b1 >= 0.0);
        prop_assert!(split.delta_a0.eval(p).re <= 0.0);
    }

    #[test]
    fn lower_order_form_obeys_cauchy_bound(a1 in cplx(), a2 in cplx(), d in cplx(), v in cvec(25)) {
        let mut spec = ProblemSpec::new(UNIT_SQUARE, 1.0)
            .with_first_order(vec![ScalarField::constant(a1), ScalarField::new(move |x| a2 * x[0])]);
        spec.delta_a0 = ScalarField::new(move |x| d * x[1]);
        spec.b00 = RealField::constant(1.0);
        let (_, _, forms) = setup(&spec, 4);
        let k = compute_constants(&spec, 16);
        let cv = forms.first_order.form(&v, &v).norm();
        let plus = forms.plus_norm_sq(&v).sqrt();
        let l2 = forms.l2_norm_sq(&v).sqrt();
        prop_assert!(cv <= (k.c1 * plus * l2 + k.c2 * l2 * l2) * (1.0 + 1e-12), "{cv} > bound");
    }
}

fn dirichlet_interval(resolution: usize, count: usize) -> Vec<f64> {
    let spec = ProblemSpec::new(DomainKind::Interval { a: 0.0, b: 1.0 }, 1.0).with_dirichlet_set(FacetSelector::all());
    let (_, _, forms) = setup(&spec, resolution);
    generalized_eigenbasis(&forms.k_plus_dense(), &forms.mass_dense(), count).unwrap().eigenvalues
}

#[test]
fn dirichlet_eigenvalues_approach_squares_of_multiples_of_pi() {
    let lambda = dirichlet_interval(100, 3);
    for (j, l) in lambda.iter().enumerate() {
        let exact = ((j + 1) as f64 * std::f64::consts::PI).powi(2);
        assert!((l - exact).abs() / exact < 1e-2, "lambda_{} = {l}", j + 1);
        assert!(*l >= exact, "conforming P1 eigenvalues are upper bounds");
    }
}

#[test]
fn eigenvalues_decrease_under_nested_refinement() {
    let coarse = dirichlet_interval(16, 4);
    let fine = dirichlet_interval(32, 4);
    for (f, c) in fine.iter().zip(&coarse) {
        assert!(f <= c, "{f} > {c}");
    }
}

#[test]
fn eigenvalues_increase_with_larger_constraint_set() {
    let eig = |sel: FacetSelector| {
        let mut spec = ProblemSpec::new(UNIT_SQUARE, 1.0).with_dirichlet_set(sel);
        spec.b00 = RealField::constant(1.0);
        let (_, _, forms) = setup(&spec, 6);
        generalized_eigenbasis(&forms.k_plus_dense(), &forms.mass_dense(), 4).unwrap().eigenvalues
    };
    let small = eig(FacetSelector::new(|x| x[0] < 1e-12));
    let large = eig(FacetSelector::new(|x| x[0] < 1e-12 || x[1] < 1e-12));
    for (s, l) in small.iter().zip(&large) {
        assert!(l >= s, "{l} < {s}");
    }
}

fn disk_forms() -> AssembledForms {
    let mut spec = ProblemSpec::new(DomainKind::UnitDiskPolygon { segments: 12 }, 1.0).with_principal(MatrixField::degenerate_disk());
    spec.b00 = RealField::constant(1.0);
    setup(&spec, 3).2
}

#[test]
fn full_basis_is_orthogonal_in_all_three_products() {
    let forms = disk_forms();
    let (k, m) = (forms.k_plus_dense(), forms.mass_dense());
    let basis = generalized_eigenbasis(&k, &m, forms.free_count()).unwrap();
    assert!(verify_orthogonality(&basis, &k, &m).within(ORTHO_TOL));
    let dual = DualNorm::new(&k).unwrap();
    assert!(dual_orthogonality(&basis, &m, &dual) <= ORTHO_TOL);
}

#[test]
fn full_basis_is_complete() {
    let forms = disk_forms();
    let k = forms.k_plus_dense();
    let basis = generalized_eigenbasis(&k, &forms.mass_dense(), forms.free_count()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let x = random_vec(&mut rng, forms.free_count());
        let back = basis.resum(&basis.expand(&k, &x));
        let err = back.iter().zip(&x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }
}

#[test]
fn embedding_constant_is_the_first_eigenvalue() {
    let forms = disk_forms();
    let basis = generalized_eigenbasis(&forms.k_plus_dense(), &forms.mass_dense(), 1).unwrap();
    let lambda1 = basis.eigenvalues[0];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let v = random_vec(&mut rng, forms.free_count());
        assert!(forms.l2_norm_sq(&v) <= forms.plus_norm_sq(&v) / lambda1 * (1.0 + 1e-12));
    }
    // Equality at the first eigenvector.
    let h = basis.vector(0);
    let ratio = forms.plus_norm_sq(&h) / forms.l2_norm_sq(&h);
    assert!((ratio - lambda1).abs() < 1e-9 * lambda1);
}

#[test]
fn dual_norm_is_the_supremum_over_test_vectors() {
    let spec = ProblemSpec::new(DomainKind::Interval { a: 0.0, b: 1.0 }, 1.0).with_dirichlet_set(FacetSelector::all());
    let (_, _, forms) = setup(&spec, 4);
    let k = forms.k_plus_dense();
    let f = vec![c(1.0, 0.5), c(-0.3, 0.0), c(0.2, -1.0)];
    let exact = dual_norm(&f, &k).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut best = 0.0f64;
    for _ in 0..10_000 {
        let v = random_vec(&mut rng, 3);
        let q = inner(&v, &f).norm() / k.form(&v, &v).re.sqrt();
        assert!(q <= exact * (1.0 + 1e-12));
        best = best.max(q);
    }
    assert!(best >= 0.95 * exact, "{best} vs {exact}");
}

#[test]
fn dual_norm_of_mass_image_is_the_scaled_mass_norm() {
    let forms = disk_forms();
    let (k, m) = (forms.k_plus_dense(), forms.mass_dense());
    let basis = generalized_eigenbasis(&k, &m, 3).unwrap();
    let dual = DualNorm::new(&k).unwrap();
    for j in 0..3 {
        let mh = m.to_complex().mul_vec(&basis.vector(j));
        // ‖M h‖²₋ = h* M K⁻¹ M h = ‖h‖²_M / λ.
        let want = basis.mass_norms[j] / basis.eigenvalues[j];
        assert!((dual.norm_sq(&mh) - want).abs() < 1e-10 * want);
    }
}

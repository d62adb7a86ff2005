mod common;

use common::{gram, hermitize, qmat, qvec, real_rep, sym_eigenvalues};
use proptest::prelude::*;
use qcvx_core::convexity::{
    check_first_order, check_monotonicity, check_necessary_block, check_second_order_quadratic,
    check_strong_convexity, estimate_sigma, set_equivalence_probe, SampledDomain, Verdict,
};
use qcvx_core::ghr::QuadraticObjective;
use qcvx_core::random::{random_matrix, random_vector, seeded};
use qcvx_core::{QMatrix, QVector, Quaternion};

#[test]
fn least_squares_objectives_are_convex_by_every_criterion() {
    let mut rng = seeded(21);
    for (m, n) in [(3, 3), (5, 3), (6, 2)] {
        let a = random_matrix(&mut rng, m, n);
        let b = random_vector(&mut rng, m);
        let obj = QuadraticObjective::least_squares(&a, &b).unwrap();
        assert!(check_second_order_quadratic(&obj).unwrap().is_certified());
        let dom = SampledDomain::whole(n, 3.0, 1000, 5).unwrap();
        let grad = |q: &QVector| obj.gradient_conjugate(q).unwrap();
        assert_eq!(
            check_first_order(&obj, &grad, &dom).unwrap().verdict,
            Verdict::Inconclusive
        );
        assert_eq!(
            check_monotonicity(&obj, &grad, &dom).unwrap().verdict,
            Verdict::Inconclusive
        );
    }
}

#[test]
fn monotonicity_value_is_half_squared_residual_norm() {
    let mut rng = seeded(22);
    let a = random_matrix(&mut rng, 4, 3);
    let b = random_vector(&mut rng, 4);
    let obj = QuadraticObjective::least_squares(&a, &b).unwrap();
    for _ in 0..50 {
        let p = random_vector(&mut rng, 3);
        let q = random_vector(&mut rng, 3);
        let dg = obj
            .gradient_conjugate(&p)
            .unwrap()
            .try_sub(&obj.gradient_conjugate(&q).unwrap())
            .unwrap();
        let d = p.try_sub(&q).unwrap();
        let lhs = dg.real_inner(&d).unwrap();
        let rhs = 0.5 * a.matvec(&d).unwrap().norm_sqr();
        assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs));
    }
}

#[test]
fn refuted_objectives_are_refuted_by_monotonicity_with_injected_witness() {
    let mut rng = seeded(23);
    let mut refuted = 0;
    for _ in 0..20 {
        let b = random_matrix(&mut rng, 3, 3);
        let r = hermitize(&b);
        let obj = QuadraticObjective::new(r, random_vector(&mut rng, 3), 0.0).unwrap();
        let cert = check_second_order_quadratic(&obj).unwrap();
        if !cert.is_refuted() {
            continue;
        }
        refuted += 1;
        let w = cert.witness.as_ref().unwrap();
        assert!(w.violation > 0.0);
        let mut dom = SampledDomain::whole(3, 1.0, 5000, 9).unwrap();
        dom.inject_eigen_witness(&obj).unwrap();
        let grad = |q: &QVector| obj.gradient_conjugate(q).unwrap();
        let mono = check_monotonicity(&obj, &grad, &dom).unwrap();
        assert!(mono.is_refuted());
        assert!(!check_necessary_block(&obj).unwrap());
    }
    assert!(refuted > 0);
}

#[test]
fn sigma_of_scaled_identity() {
    for lam in [0.0, 0.25, 1.0, 3.5, 100.0] {
        let obj = QuadraticObjective::new(QMatrix::identity(3).scale(lam), QVector::zeros(3), 0.0)
            .unwrap();
        assert!((estimate_sigma(&obj).unwrap() - 2.0 * lam).abs() < 1e-9);
    }
}

#[test]
fn set_equivalence_on_random_boxes() {
    let mut rng = seeded(24);
    for seed in 0..5 {
        let c = random_vector(&mut rng, 3);
        let w = random_vector(&mut rng, 3)
            .map(|q| Quaternion::new(q.a.abs(), q.b.abs(), q.c.abs(), q.d.abs()));
        let lo = c.try_sub(&w).unwrap();
        let hi = c.try_add(&w).unwrap();
        let rep = set_equivalence_probe(&lo, &hi, 400, seed).unwrap();
        assert_eq!(rep.disagreements, 0);
        assert!(rep.max_mismatch < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn second_order_verdict_matches_real_spectrum(b in qmat(3, 3), shift in -3.0f64..3.0) {
        let r = hermitize(&b).try_add(&QMatrix::identity(3).scale(shift)).unwrap();
        let obj = QuadraticObjective::new(r.clone(), QVector::zeros(3), 0.0).unwrap();
        let real_min = sym_eigenvalues(&real_rep(&r))[0];
        prop_assume!(real_min.abs() > 1e-6);
        let cert = check_second_order_quadratic(&obj).unwrap();
        prop_assert_eq!(cert.is_certified(), real_min > 0.0);
        prop_assert_eq!(cert.is_refuted(), real_min < 0.0);
        // the real Hessian is 2R_R, so σ = λ_min(2R_R) when positive
        let sigma = estimate_sigma(&obj).unwrap();
        prop_assert!((sigma - (2.0 * real_min).max(0.0)).abs() < 1e-9 * (1.0 + sigma));
    }

    #[test]
    fn strong_certificates_are_monotone_in_sigma(a in qmat(4, 3), shift in 0.0f64..2.0, frac in 0.01f64..1.0) {
        let obj = QuadraticObjective::new(gram(&a, shift), QVector::zeros(3), 0.0).unwrap();
        let sigma = estimate_sigma(&obj).unwrap();
        prop_assume!(sigma > 1e-6);
        prop_assert!(check_strong_convexity(&obj, sigma).unwrap().is_certified());
        prop_assert!(check_strong_convexity(&obj, sigma * frac).unwrap().is_certified());
        prop_assert!(check_strong_convexity(&obj, sigma * 1.01 + 1e-6).unwrap().is_refuted());
    }

    #[test]
    fn certified_objectives_satisfy_necessary_block(a in qmat(3, 3), p in qvec(3)) {
        let obj = QuadraticObjective::new(gram(&a, 0.0), p, 0.0).unwrap();
        prop_assert!(check_second_order_quadratic(&obj).unwrap().is_certified());
        prop_assert!(check_necessary_block(&obj).unwrap());
    }
}

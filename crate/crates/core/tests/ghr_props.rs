mod common;

use common::{from_real_vec, hermitize, nonzero_quat, qmat, quat, qvec, real_rep, real_vec};
use proptest::prelude::*;
use qcvx_core::ghr::{
    default_step, ghr_derivative_numeric, ghr_derivative_numeric_quat, ghr_jacobian_numeric,
    gradient_numeric, QuadraticObjective, StandardForm,
};
use qcvx_core::random::{random_hermitian, random_vector, seeded};
use qcvx_core::{Axis, QMatrix, QVector, Quaternion};

fn rel_close(a: &QVector, b: &QVector, tol: f64) -> bool {
    a.distance(b).unwrap() <= tol * b.norm().max(1.0)
}

#[test]
fn conjugate_gradient_matches_numeric_on_100_points() {
    let mut rng = seeded(100);
    for trial in 0..100 {
        let n = 1 + trial % 4;
        let obj = QuadraticObjective::new(
            random_hermitian(&mut rng, n),
            random_vector(&mut rng, n),
            0.0,
        )
        .unwrap();
        let q = random_vector(&mut rng, n);
        let num = gradient_numeric(&obj, &q, true, default_step(&q)).unwrap();
        assert!(
            rel_close(&obj.gradient_conjugate(&q).unwrap(), &num, 1e-6),
            "trial {trial}"
        );
    }
}

#[test]
fn conjugate_gradient_is_quarter_real_gradient() {
    // ∇_{q*} f packs ¼ of the real gradient, read off the real form directly
    let mut rng = seeded(101);
    for _ in 0..20 {
        let obj = QuadraticObjective::new(
            random_hermitian(&mut rng, 3),
            random_vector(&mut rng, 3),
            1.0,
        )
        .unwrap();
        let q = random_vector(&mut rng, 3);
        let gr = real_rep(obj.r()) * real_vec(&q) * 2.0 - real_vec(obj.p()) * 2.0;
        let expect = from_real_vec(&(gr * 0.25));
        assert!(rel_close(
            &obj.gradient_conjugate(&q).unwrap(),
            &expect,
            1e-12
        ));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn least_squares_gradient(a in qmat(4, 3), b in qvec(4), q in qvec(3)) {
        // ∇_{q*}‖Aq − b‖² = ½Aᴴ(Aq − b)
        let obj = QuadraticObjective::least_squares(&a, &b).unwrap();
        let resid = a.matvec(&q).unwrap().try_sub(&b).unwrap();
        let expect = a.hermitian_transpose().matvec(&resid).unwrap().scale(0.5);
        let f = |x: &QVector| a.matvec(x).unwrap().try_sub(&b).unwrap().norm_sqr();
        let num = gradient_numeric(&f, &q, true, default_step(&q)).unwrap();
        prop_assert!(rel_close(&num, &expect, 1e-6));
        prop_assert!(rel_close(&obj.gradient_conjugate(&q).unwrap(), &expect, 1e-10));
    }

    #[test]
    fn conjugate_rule_for_real_fields(r in qmat(2, 2), p in qvec(2), q in qvec(2), idx in 0usize..2) {
        let obj = QuadraticObjective::new(hermitize(&r), p, 0.0).unwrap();
        let step = default_step(&q);
        for axis in Axis::ALL {
            let d = ghr_derivative_numeric(&obj, &q, idx, axis.unit(), false, step).unwrap();
            let dc = ghr_derivative_numeric(&obj, &q, idx, axis.unit(), true, step).unwrap();
            prop_assert!((d.conj() - dc).max_abs() < 1e-9 * (1.0 + d.norm()));
        }
    }

    #[test]
    fn rotation_rule_for_real_fields(r in qmat(2, 2), p in qvec(2), q in qvec(2), nu in nonzero_quat()) {
        let obj = QuadraticObjective::new(hermitize(&r), p, 0.0).unwrap();
        let step = default_step(&q);
        let base = ghr_derivative_numeric(&obj, &q, 1, Quaternion::ONE, false, step).unwrap();
        let rotated = ghr_derivative_numeric(&obj, &q, 1, nu, false, step).unwrap();
        prop_assert!((base.rotate(nu).unwrap() - rotated).max_abs() < 1e-6 * (1.0 + base.norm()));
    }

    #[test]
    fn standard_forms_match_numeric(
        a in qvec(3), beta in quat(), alpha in quat(), m in qmat(2, 3), sq in qmat(3, 3), q in qvec(3),
    ) {
        let rows = [
            StandardForm::LinearLeft { a: a.clone(), beta },
            StandardForm::ConjLinear { alpha, b: a.clone() },
            StandardForm::MatrixLinear { a: m, beta },
            StandardForm::Quadratic { a: sq },
        ];
        let step = default_step(&q);
        for row in &rows {
            let f = |x: &QVector| row.evaluate(x).unwrap();
            let d = row.derivative(&q).unwrap();
            let scale = d.d_dq.max_abs().max(d.d_dqconj.max_abs()).max(1.0);
            let num = ghr_jacobian_numeric(&f, &q, Quaternion::ONE, false, step).unwrap();
            let num_c = ghr_jacobian_numeric(&f, &q, Quaternion::ONE, true, step).unwrap();
            prop_assert!(num.max_diff(&d.d_dq).unwrap() < 1e-6 * scale, "{:?}", row);
            prop_assert!(num_c.max_diff(&d.d_dqconj).unwrap() < 1e-6 * scale, "{:?}", row);
        }
    }

    #[test]
    fn product_rule_on_scalar_forms(a in qmat(1, 1), b in qmat(1, 1), q in qvec(1), mu in nonzero_quat()) {
        // f g with f = q*Aq and g = q*Bq, differentiated as quaternion-valued functions
        let fa = StandardForm::Quadratic { a };
        let fb = StandardForm::Quadratic { a: b };
        let f = |x: &QVector| fa.evaluate(x).unwrap()[0];
        let g = |x: &QVector| fb.evaluate(x).unwrap()[0];
        let fg = |x: &QVector| f(x) * g(x);
        let step = default_step(&q);
        let gv = g(&q);
        prop_assume!(gv.norm() > 1e-3);
        for conj in [false, true] {
            let lhs = ghr_derivative_numeric_quat(&fg, &q, 0, mu, conj, step).unwrap();
            let dg = ghr_derivative_numeric_quat(&g, &q, 0, mu, conj, step).unwrap();
            let df = ghr_derivative_numeric_quat(&f, &q, 0, gv * mu, conj, step).unwrap();
            let rhs = f(&q) * dg + df * gv;
            prop_assert!((lhs - rhs).max_abs() < 1e-5 * (1.0 + rhs.norm()));
        }
    }
}

#[test]
fn hessian_first_row_of_squared_norm() {
    let blocks = QuadraticObjective::squared_norm(3).hessian_blocks();
    assert_eq!(blocks[0], QMatrix::identity(3).scale(0.5));
}

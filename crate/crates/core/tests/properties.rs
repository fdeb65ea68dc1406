use num_complex::Complex64;
use proptest::prelude::*;
use qrange::exact::{canonical_2x2, q_crawford_2x2, q_radius_2x2};
use qrange::format::sig12;
use qrange::random::{gaussian_matrix, gaussian_vector, random_weight, rng};
use qrange::semispace::spectral_norm;
use qrange::{
    a_inner, a_norm_vec, a_opnorm, aq_crawford, aq_radius, reduce, sample_pairs, Budget, CMatrix, QParam, Weight,
};

fn budget() -> Budget {
    Budget::with_restarts(16)
}

fn instance(seed: u64, d: usize) -> (Weight, CMatrix) {
    let mut r = rng(seed, 0);
    (random_weight(&mut r, d), gaussian_matrix(&mut r, d))
}

fn qparam(modulus: f64, phase: f64) -> QParam {
    QParam::new(Complex64::from_polar(modulus, phase)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inner_product_is_hermitian(seed in any::<u64>(), d in 1usize..5) {
        let mut r = rng(seed, 1);
        let w = random_weight(&mut r, d);
        let x = gaussian_vector(&mut r, d);
        let y = gaussian_vector(&mut r, d);
        let xy = a_inner(&w, &x, &y).unwrap();
        let yx = a_inner(&w, &y, &x).unwrap();
        prop_assert!((xy - yx.conj()).norm() <= 1e-10 * (1.0 + xy.norm()));
        let n = a_norm_vec(&w, &x).unwrap();
        prop_assert!((n * n - a_inner(&w, &x, &x).unwrap().re).abs() <= 1e-9 * (1.0 + n * n));
    }

    #[test]
    fn weight_square_root_squares_back(seed in any::<u64>(), d in 1usize..6) {
        let w = random_weight(&mut rng(seed, 2), d);
        let s = w.sqrt_a();
        let err = (s * s - w.matrix()).norm() / w.matrix().norm();
        prop_assert!(err <= 1e-10);
    }

    #[test]
    fn seminorm_is_norm_of_reduced_matrix(seed in any::<u64>(), d in 1usize..5) {
        let (w, t) = instance(seed, d);
        let a = a_opnorm(&w, &t).unwrap();
        let b = spectral_norm(&reduce(&w, &t).unwrap());
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
        // ||Tx||_A <= ||T||_A ||x||_A for any x.
        let x = gaussian_vector(&mut rng(seed, 3), d);
        let tx = &t * &x;
        prop_assert!(a_norm_vec(&w, &tx).unwrap() <= a * a_norm_vec(&w, &x).unwrap() * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn sampled_pairs_are_admissible(seed in any::<u64>(), d in 2usize..5, m in 0.05f64..1.0, ph in 0.0f64..6.28) {
        let w = random_weight(&mut rng(seed, 4), d);
        let q = qparam(m, ph);
        for p in sample_pairs(&w, q, 16, seed).unwrap() {
            prop_assert!((a_norm_vec(&w, &p.x).unwrap() - 1.0).abs() <= 1e-9);
            prop_assert!((a_norm_vec(&w, &p.y).unwrap() - 1.0).abs() <= 1e-9);
            prop_assert!((a_inner(&w, &p.x, &p.y).unwrap() - q.value()).norm() <= 1e-9);
        }
    }

    #[test]
    fn estimates_are_ordered_and_witnessed(seed in any::<u64>(), d in 2usize..5, m in 0.05f64..1.0, ph in 0.0f64..6.28) {
        let (w, t) = instance(seed, d);
        let q = qparam(m, ph);
        let omega = aq_radius(&w, &t, q, &budget()).unwrap();
        let c = aq_crawford(&w, &t, q, &budget()).unwrap();
        let norm = a_opnorm(&w, &t).unwrap();
        prop_assert!(c.value <= omega.value + 1e-9);
        prop_assert!(omega.value <= norm + 1e-9);
        for e in [&omega, &c] {
            let val = a_inner(&w, &(&t * &e.witness_x), &e.witness_y).unwrap().norm();
            prop_assert!((val - e.value).abs() <= 1e-7 * (1.0 + norm));
            prop_assert!((a_inner(&w, &e.witness_x, &e.witness_y).unwrap() - q.value()).norm() <= 1e-9);
        }
    }

    #[test]
    fn radius_depends_only_on_modulus(seed in any::<u64>(), d in 2usize..4, m in 0.05f64..1.0, ph in 0.0f64..6.28) {
        let (w, t) = instance(seed, d);
        let a = aq_radius(&w, &t, qparam(m, ph), &budget()).unwrap().value;
        let b = aq_radius(&w, &t, qparam(m, 0.0), &budget()).unwrap().value;
        prop_assert!((a - b).abs() <= 2e-3);
    }

    #[test]
    fn estimator_matches_closed_form_in_dim_two(seed in any::<u64>(), q in 0.02f64..1.0) {
        let t = gaussian_matrix(&mut rng(seed, 5), 2);
        let form = canonical_2x2(&t).unwrap();
        let w = Weight::identity(2);
        let qp = QParam::real(q).unwrap();
        let exact_w = q_radius_2x2(&form, Complex64::new(q, 0.0)).unwrap();
        let exact_c = q_crawford_2x2(&form, Complex64::new(q, 0.0)).unwrap();
        prop_assert!((aq_radius(&w, &t, qp, &budget()).unwrap().value - exact_w).abs() <= 1e-6);
        prop_assert!((aq_crawford(&w, &t, qp, &budget()).unwrap().value - exact_c).abs() <= 1e-6);
    }

    #[test]
    fn sig12_round_trips(x in -1e9f64..1e9) {
        let back: f64 = sig12(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs().max(1e-300));
    }
}

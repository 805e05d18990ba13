use proptest::prelude::*;

use schmidt_scope::criteria::{rc_check, zhang_check};
use schmidt_scope::linalg::{kron, partial_trace, trace_norm};
use schmidt_scope::schmidt::{ccn, realign, schmidt_spectrum, unrealign};
use schmidt_scope::states::{random_density, random_matrix, random_separable, random_unitary, Seed};
use schmidt_scope::{Dims, Matrix, State, Subsystem, Tolerances};

fn dims() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((2, 2)), Just((2, 3)), Just((3, 2)), Just((3, 3))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn realign_round_trips((na, nb) in dims(), seed in any::<u64>()) {
        let x = random_matrix::<f64>(na * nb, na * nb, Seed(seed));
        let d = Dims::new(na, nb);
        let back = unrealign(&realign(&x, d).unwrap(), d).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn trace_norm_is_unitarily_invariant(n in 2usize..6, seed in any::<u64>()) {
        let x = random_matrix::<f64>(n, n, Seed(seed));
        let u = random_unitary::<f64>(n, Seed(seed ^ 1));
        let v = random_unitary::<f64>(n, Seed(seed ^ 2));
        let y = u.matmul(&x).unwrap().matmul(&v).unwrap();
        prop_assert!((trace_norm(&x).unwrap() - trace_norm(&y).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn partial_traces_preserve_trace((na, nb) in dims(), seed in any::<u64>()) {
        let rho = random_density::<f64>(na * nb, Seed(seed));
        let d = Dims::new(na, nb);
        for keep in [Subsystem::A, Subsystem::B] {
            let t = partial_trace(&rho, d, keep).unwrap().trace();
            prop_assert!((t.re - 1.0).abs() < 1e-12 && t.im.abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_is_invariant_under_local_unitaries((na, nb) in dims(), seed in any::<u64>()) {
        let s = State::new(random_density(na * nb, Seed(seed)), na, nb).unwrap();
        let u = kron(&random_unitary::<f64>(na, Seed(seed ^ 3)), &random_unitary(nb, Seed(seed ^ 4))).unwrap();
        let t = State::new(u.sandwich(s.rho()).unwrap().hermitian_part(), na, nb).unwrap();
        let a = schmidt_spectrum(&s, 1e-9).unwrap();
        let b = schmidt_spectrum(&t, 1e-9).unwrap();
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn ccn_is_multiplicative_on_products(seed in any::<u64>()) {
        let a = random_matrix::<f64>(2, 2, Seed(seed));
        let b = random_matrix::<f64>(3, 3, Seed(seed ^ 5));
        let got = ccn(&kron(&a, &b).unwrap(), Dims::new(2, 3)).unwrap();
        prop_assert!((got - a.hs_norm() * b.hs_norm()).abs() < 1e-10);
    }

    #[test]
    fn separable_mixtures_are_never_detected((na, nb) in dims(), seed in any::<u64>(), terms in 1usize..12) {
        let s = random_separable::<f64>(na, nb, terms, Seed(seed));
        let t = Tolerances::default();
        prop_assert!(!rc_check(&s, &t).unwrap().detected());
        prop_assert!(!zhang_check(&s, &t).unwrap().detected());
    }

    #[test]
    fn spectrum_sum_of_squares_is_hs_norm((na, nb) in dims(), seed in any::<u64>()) {
        let x: Matrix = random_matrix(na * nb, na * nb, Seed(seed));
        let s = State::new_unchecked(x.clone(), Dims::new(na, nb));
        let sp = schmidt_spectrum(&s, 1e-9).unwrap();
        prop_assert!((sp.sum_of_squares() - x.hs_norm().powi(2)).abs() < 1e-9);
    }
}

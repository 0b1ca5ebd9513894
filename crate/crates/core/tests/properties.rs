use asep2::duality::{duality_exponent, qz_exponent};
use asep2::generator::{apply_generator, Rates};
use asep2::lattice::{all_configs, Config, Occ};
use asep2::measures::{pi_exponent, pi_exponent_positions};
use asep2::{QPoly, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = QPoly> {
    prop::collection::vec((-12i64..=12, -5i64..=5), 0..5).prop_map(|terms| {
        QPoly::from_half_terms(
            terms
                .into_iter()
                .map(|(h, c)| (h, Rational::from_integer(c.into()))),
        )
    })
}

fn config(max_l: usize) -> impl Strategy<Value = Config> {
    (1..=max_l).prop_flat_map(|l| {
        prop::collection::vec(0usize..3, 2 * l).prop_map(|ds| {
            Config::new(ds.into_iter().map(|d| Occ::from_digit(d).unwrap()).collect()).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, QPoly::zero());
        prop_assert_eq!(&a * &QPoly::one(), a.clone());
    }

    #[test]
    fn exact_division_inverts_multiplication(a in poly(), b in poly()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).exact_div(&b).unwrap(), a);
    }

    #[test]
    fn text_round_trip(a in poly()) {
        let back: QPoly = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly(), b in poly(), q in 0.5f64..2.0) {
        let lhs = (&a * &b).eval(q);
        let rhs = a.eval(q) * b.eval(q);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn config_round_trips(c in config(4)) {
        let text: Config = c.to_string().parse().unwrap();
        prop_assert_eq!(&text, &c);
        prop_assert_eq!(Config::from_basis_index(c.l(), c.basis_index()), c.clone());
        prop_assert_eq!(Config::from_positions(&c.to_positions()).unwrap(), c);
    }

    #[test]
    fn pi_forms_agree(c in config(5)) {
        prop_assert_eq!(pi_exponent(&c), pi_exponent_positions(&c.to_positions()));
    }

    #[test]
    fn detailed_balance_per_move(c in config(4)) {
        // pi(eta) w(eta -> eta') = pi(eta') w(eta' -> eta) with exact rates q, 1/q
        let rates = Rates::<QPoly>::exact();
        for (target, rate) in asep2::generator::transitions(&c, &rates) {
            let back = asep2::generator::transitions(&target, &rates)
                .into_iter()
                .find(|(t, _)| *t == c)
                .map(|(_, r)| r)
                .unwrap();
            let lhs = &QPoly::q_pow(pi_exponent(&c)) * &rate;
            let rhs = &QPoly::q_pow(pi_exponent(&target)) * &back;
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn duality_relation_pointwise(c in config(2), zi in 0usize..81) {
        // (L D(z, .))(eta) = (L D(., eta))(z) for the generator L = -H^T
        let l = c.l();
        let z = Config::from_basis_index(l, zi % 3usize.pow(2 * l as u32));
        let rates = Rates::<QPoly>::exact();
        let d = |zc: &Config, e: &Config| {
            duality_exponent(&zc.to_positions(), e).map_or_else(QPoly::zero, QPoly::q_pow)
        };
        let lhs = apply_generator(|e| d(&z, e), &c, &rates);
        let rhs = apply_generator(|zc| d(zc, &c), &z, &rates);
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn qz_vanishes_on_mismatch() {
    for c in all_configs(2) {
        let z = c.to_positions();
        for e in all_configs(2) {
            let fires = z.x.iter().all(|&x| e.get(x) == Occ::A) && z.y.iter().all(|&y| e.get(y) == Occ::B);
            assert_eq!(qz_exponent(&z, &e).is_some(), fires);
        }
    }
}

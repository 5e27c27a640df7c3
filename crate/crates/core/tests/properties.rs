use num_complex::Complex64 as C64;
use proptest::prelude::*;
use sdroots_core::fields::run_identity_suite;
use sdroots_core::indicial::{assemble_catalog, type3_roots};
use sdroots_core::oracle::pencil::check_mode;
use sdroots_core::spectra::{parse_hyperbolic_spectrum, tt_lower_bound, CrossSectionSpec};

fn lattice() -> impl Strategy<Value = [f64; 3]> {
    [0.5f64..5.0, 0.5f64..5.0, 0.5f64..5.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn torus_zero_root_has_dimension_fourteen(l in lattice()) {
        let cat = assemble_catalog(&CrossSectionSpec::torus(l).unwrap(), 1).unwrap();
        prop_assert_eq!(cat.kernel_dim_at_zero, 14);
        prop_assert_eq!(cat.cokernel_dim_at_zero, 14);
    }

    #[test]
    fn mode_pencil_matches_catalog(l in lattice(), xi in [-2i64..=2, -2i64..=2, -2i64..=2]) {
        let chk = check_mode(xi, l);
        prop_assert!(chk.pass, "{} {:e}", chk.name, chk.max_mismatch);
    }

    #[test]
    fn tensor_roots_come_in_opposite_pairs(kappa in -1i32..=1, excess in 0.0f64..50.0) {
        let lambda = tt_lower_bound(kappa) + excess;
        let roots = type3_roots(lambda, kappa).unwrap();
        for r in &roots {
            let partner = roots.iter().find(|s| (s.value + r.value).norm() < 1e-9 * r.value.norm().max(1.0));
            prop_assert!(partner.is_some_and(|s| s.order == r.order), "{} at lambda={lambda}", r.value);
        }
    }

    #[test]
    fn characteristic_polynomial_vanishes_on_tensor_roots(excess in 0.0f64..40.0) {
        // On S³ the four rates solve (x² − λ − 4)² = 4(λ + 3).
        let lambda = 6.0 + excess;
        for r in type3_roots(lambda, 1).unwrap() {
            let x = r.value;
            let lhs = (x * x - C64::new(lambda + 4.0, 0.0)).powi(2);
            let rhs = C64::new(4.0 * (lambda + 3.0), 0.0);
            prop_assert!((lhs - rhs).norm() < 1e-8 * rhs.norm(), "{x} lambda={lambda}");
        }
    }

    #[test]
    fn hyperbolic_cokernel_formula(b1 in 0usize..4, codazzi in 0usize..4) {
        let mut text = format!("b1 {b1}\ncodazzi {codazzi}\nscalar 0 0 1\n");
        if b1 > 0 {
            text += &format!("oneform 0 0 {b1}\n");
        }
        if codazzi > 0 {
            text += &format!("tt 0 3 {codazzi}\n");
        }
        text += "tt 1 9.5 2\n";
        let cs = CrossSectionSpec::hyperbolic(parse_hyperbolic_spectrum(&text, "generated").unwrap());
        let cat = assemble_catalog(&cs, 0).unwrap();
        prop_assert_eq!(cat.cokernel_dim_at_zero, 1 + b1 + 2 * codazzi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn identities_hold_on_random_tori(l in lattice(), seed in any::<u64>()) {
        for r in run_identity_suite(l, 4, seed) {
            prop_assert!(r.pass, "{}: {:e}", r.identity_name, r.residual);
        }
    }
}

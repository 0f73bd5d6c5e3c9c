//! Cross-module checks through the public API only.

use proptest::prelude::*;
use twincurve::arith::{twin_pairs_below, FactoredInteger};
use twincurve::classgroup::class_group;
use twincurve::curves::CurveSpec;
use twincurve::localdata::{count_points, reduction_data, tate};
use twincurve::lseries::{an_coefficients, l_value_at_1, root_number, root_number_constructive};
use twincurve::normindex::{delta_case, delta_components, TwistField};
use twincurve::{Budgets, Error};

fn twin_index() -> impl Strategy<Value = (u64, u64)> {
    let pairs = twin_pairs_below(2000);
    (0..pairs.len()).prop_map(move |i| pairs[i])
}

#[test]
fn smallest_pair_end_to_end() {
    for e in [1i64, -1] {
        let s = CurveSpec::validate(e, 3, 5, 1).unwrap();
        assert_eq!(s.invariants().unwrap().conductor, 480);
        assert_eq!(root_number(&s).unwrap() as i64, -e);
        assert_eq!(root_number_constructive(&s).unwrap().global as i64, -e);
        assert_eq!(s.torsion_group().unwrap().structure, vec![2, 2]);
    }
}

#[test]
fn conductor_is_product_of_local_exponents() {
    for (p, q) in twin_pairs_below(300) {
        for d in [1i128, -7, 35] {
            let Ok(s) = CurveSpec::validate(1, p, q, d) else { continue };
            let n: i128 = s
                .bad_primes()
                .into_iter()
                .map(|l| (l as i128).pow(reduction_data(&s, l).unwrap().conductor_exponent))
                .product();
            assert_eq!(n, s.invariants().unwrap().conductor, "p={p} D={d}");
        }
    }
}

#[test]
fn coefficients_agree_with_point_counts() {
    let s = CurveSpec::validate(-1, 11, 13, 1).unwrap();
    let a = an_coefficients(&s, 200, &Budgets::default()).unwrap();
    for l in [17u64, 19, 23, 29, 31, 37, 41, 43, 47] {
        assert_eq!(a[l as usize], count_points(&s, l, 10_000).unwrap().trace, "l={l}");
    }
}

#[test]
fn errors_are_typed() {
    assert!(matches!(CurveSpec::validate(1, 7, 9, 1), Err(Error::Primality(_)) | Err(Error::Twin { .. })));
    assert!(matches!(CurveSpec::validate(1, 3, 5, 15), Err(Error::Twist(_))));
    assert!(matches!(class_group(-16, &Budgets::default()), Err(Error::Domain(_))));
    let tight = Budgets { series_truncation: 5, ..Budgets::default() };
    let s = CurveSpec::validate(1, 5, 7, 1).unwrap();
    assert!(matches!(l_value_at_1(&s, Some(100), &tight), Err(Error::Range(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tate_matches_tables((p, q) in twin_index(), e in prop::sample::select(vec![1i64, -1]), d in prop::sample::select(vec![1i128, -1, 5, -11, 13, 35])) {
        if let Ok(s) = CurveSpec::validate(e, p, q, d) {
            for l in s.bad_primes() {
                let table = reduction_data(&s, l).unwrap();
                let alg = tate(&s.coeffs(), l).unwrap().data;
                prop_assert_eq!(table.kodaira, alg.kodaira);
                prop_assert_eq!(table.tamagawa, alg.tamagawa);
            }
        }
    }

    #[test]
    fn delta_rows_agree((p, q) in twin_index(), d in (1i128..200).prop_map(|x| 2 * x + 1), mu in prop::sample::select(vec![1i64, -1])) {
        let s = CurveSpec::validate(1, p, q, 1).unwrap();
        let sf = FactoredInteger::from_i128(d).map(|f| f.is_squarefree()).unwrap_or(false);
        if sf && d % p as i128 != 0 && d % q as i128 != 0 {
            let f = TwistField::new(mu, d).unwrap();
            prop_assert_eq!(delta_case(&s, &f).unwrap().total, delta_components(&s, &f).unwrap().total);
        }
    }
}

use mnl_core::function::{known_membership, Verdict};
use mnl_core::inclusion::{classify, decide_inclusion, Inclusion};
use mnl_core::means::{integral_mean, parseval_mean};
use mnl_core::norm::{mixed_norm, NormResult};
use mnl_core::rational::{parse_rational, ratio, ExtRational};
use mnl_core::{parse_function, AnalyticFunction, Lacunary, SpaceParams};
use num_complex::Complex64;
use proptest::prelude::*;

fn ext() -> impl Strategy<Value = ExtRational> {
    prop_oneof![(1i64..12, 1i64..5).prop_map(|(n, d)| ExtRational::Finite(ratio(n, d))), Just(ExtRational::Infinity)]
}

fn space() -> impl Strategy<Value = SpaceParams> {
    (ext(), ext(), 1i64..12, 1i64..5).prop_map(|(p, q, n, d)| SpaceParams::new(p, q, ratio(n, d)).unwrap())
}

fn function() -> impl Strategy<Value = AnalyticFunction> {
    prop_oneof![
        (-8i64..24, 1i64..8).prop_map(|(n, d)| AnalyticFunction::power(ratio(n, d))),
        (1i64..16, 1i64..6, 0i64..8, 1i64..4).prop_map(|(a, b, c, d)| AnalyticFunction::log_power(ratio(a, b), ratio(c, d))),
        (0u32..40).prop_map(AnalyticFunction::monomial),
        (0i64..6, 0i64..3).prop_map(|(b, k)| AnalyticFunction::Lacunary(Lacunary::geometric(ratio(b, 2), ratio(k, 1)))),
        (-0.95f64..0.95, -0.3f64..0.3, 1i64..4, 1i64..8).prop_map(|(re, im, s, e)| {
            AnalyticFunction::kernel(Complex64::new(re, im), ratio(s, 1), ratio(e, 2)).unwrap()
        }),
        proptest::collection::vec(-4.0f64..4.0, 1..6)
            .prop_map(|c| AnalyticFunction::Series { coeffs: c.into_iter().map(|x| Complex64::new(x, 0.0)).collect() }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shorthand_labels_parse_back(f in function()) {
        prop_assert_eq!(parse_function(&f.label()).unwrap(), f);
    }

    #[test]
    fn json_round_trip(f in function()) {
        let text = f.to_json().unwrap().to_string();
        prop_assert_eq!(parse_function(&text).unwrap(), f);
    }

    #[test]
    fn space_display_parses_back(s in space()) {
        let text = s.to_string();
        let inner = text.trim_start_matches('(').trim_end_matches(')');
        prop_assert_eq!(SpaceParams::parse(inner).unwrap(), s);
    }

    #[test]
    fn rationals_parse_exactly(n in -10_000i64..10_000, d in 1i64..10_000) {
        prop_assert_eq!(parse_rational(&format!("{n}/{d}")).unwrap(), ratio(n, d));
    }

    #[test]
    fn verdicts_carry_constant_or_witness(a in space(), b in space()) {
        let v = decide_inclusion(&a, &b).unwrap();
        prop_assert_eq!(v.branch, classify(&a, &b));
        match v.verdict {
            Inclusion::Included => {
                prop_assert!(v.witness.is_none());
                prop_assert!(v.constant.unwrap().value >= 1.0 - 1e-12 || a != b);
            }
            Inclusion::NotIncluded => {
                let w = v.witness.unwrap();
                prop_assert_eq!(known_membership(&w, &a).verdict, Verdict::Member);
                prop_assert_eq!(known_membership(&w, &b).verdict, Verdict::NotMember);
            }
        }
    }

    #[test]
    fn mean_at_two_matches_parseval(g in 1i64..8, r in 0.0f64..0.95) {
        let f = AnalyticFunction::power(ratio(g, 4));
        let q = integral_mean(&f, &"2".parse().unwrap(), r, 1e-10).unwrap();
        let s = parseval_mean(&f, r).unwrap();
        prop_assert!((q - s).abs() <= 1e-8 * s, "{} vs {}", q, s);
    }

    #[test]
    fn constants_have_unit_norm(s in space()) {
        let n = mixed_norm(&AnalyticFunction::constant(1.0), &s, 1e-8).unwrap();
        prop_assert!(matches!(n, NormResult::Finite { value, .. } if (value - 1.0).abs() < 1e-7), "{:?}", n);
    }
}

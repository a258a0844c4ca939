mod common;

use num_bigint::BigInt;
use num_rational::BigRational;

use pirarray::bounds::{beta_gamma, lower_formulas, two_type, upper_g_s, upper_g_st};
use pirarray::constructions::{
    construction1, construction2, general_construction, general_construction_rational, general_plan,
    Constructor,
};
use pirarray::designs::{load_steiner, make_steiner};
use pirarray::matching::{is_regular, max_matching};
use pirarray::scalar::rational;
use pirarray::verifier::{check_certificate, exact_k, VerifierConfig};
use pirarray::Error;

#[test]
fn every_pairing_graph_is_regular_and_matched() {
    let mut outputs: Vec<_> = common::grid().into_iter().map(|(_, o)| o).collect();
    outputs.push(general_construction(3, 3).unwrap());
    for out in &outputs {
        for part in 0..out.code.p() {
            for layer in 0..out.layout.type_count() - 1 {
                let pg = out.layout.pairing_graph(part, layer).unwrap();
                assert!(is_regular(&pg.graph).regular, "{:?} x_{part} layer {layer}", out.family);
                assert!(max_matching(&pg.graph).is_perfect_for(&pg.graph));
                assert_eq!(pg.left_servers.len(), pg.right_servers.len());
            }
        }
    }
}

#[test]
fn certificates_check_and_counts_match() {
    for (name, out) in common::grid() {
        assert_eq!(out.certificate.claimed_k, out.predicted_k, "{name}");
        assert_eq!(out.code.m(), out.predicted_m, "{name}");
        assert!(check_certificate(&out.code, &out.certificate).is_ok(), "{name}");
    }
}

#[test]
fn larger_instances_certify() {
    for out in [
        general_construction(3, 3).unwrap(),
        general_construction(4, 2).unwrap(),
        general_construction(3, 4).unwrap(),
        general_construction_rational(7, 3, 6).unwrap(),
    ] {
        assert!(check_certificate(&out.code, &out.certificate).is_ok(), "{:?}", out.family);
        let plan = general_plan(&out.s(), out.code.t()).unwrap();
        assert_eq!(plan.rate(), out.rate());
    }
}

#[test]
fn brute_force_matches_for_small_codes() {
    for (name, out) in common::grid() {
        if out.code.m() <= 14 {
            let report = exact_k(&out.code, &VerifierConfig::default());
            assert!(report.exact(), "{name}");
            assert!(report.k() >= out.predicted_k, "{name}");
        }
    }
}

#[test]
fn multi_type_rates_agree_with_closed_forms() {
    for s in 2..=5u64 {
        for t in 2..=6u64 {
            let plan = general_plan(&rational(s as i64, 1), t as usize).unwrap();
            assert_eq!(plan.rate(), beta_gamma(s, t).unwrap().2, "s={s} t={t}");
            assert!(plan.rate() < upper_g_s(&rational(s as i64, 1)));
        }
    }
    assert_eq!(general_plan(&rational(3, 1), 3).unwrap().rate(), rational(83, 132));
    assert_eq!(general_plan(&rational(4, 1), 2).unwrap().rate(), rational(407, 708));
    assert_eq!(general_plan(&rational(4, 1), 4).unwrap().m, BigInt::from(9_293_900));
}

#[test]
fn two_type_rates_match_formula() {
    for t in 2..=6usize {
        for d in 1..=t {
            let plan = general_plan(&rational((t + d) as i64, t as i64), t).unwrap();
            let want: BigRational = two_type(t as u64, d as u64);
            assert_eq!(plan.rate(), want);
            assert_eq!(want, upper_g_st::<BigRational>(t as u64, d as u64));
        }
    }
}

#[test]
fn constructions_agree_with_lower_formulas() {
    for (name, out) in common::grid() {
        let lower = lower_formulas(&out.s(), out.code.t() as u64);
        assert!(lower.iter().any(|(_, v)| *v == out.rate()), "{name}: {lower:?}");
    }
}

#[test]
fn design_family_is_smaller_with_same_rate() {
    for (t, d) in [(5, 2), (3, 1), (7, 2), (5, 1)] {
        let c2 = construction2(t, d, &make_steiner(d, t + d).unwrap()).unwrap();
        let c1 = construction1(t, d).unwrap();
        assert_eq!(c1.rate(), c2.rate());
        assert!(c2.predicted_m <= c1.predicted_m);
    }
    let fano = load_steiner(include_bytes!("../fixtures/fano.json")).unwrap();
    let out = construction2(5, 2, &fano).unwrap();
    assert_eq!(out.predicted_m, 35);
    assert!(check_certificate(&out.code, &out.certificate).is_ok());
}

#[test]
fn server_ordering_is_stable() {
    let a = construction1(3, 2).unwrap();
    let b = construction1(3, 2).unwrap();
    assert_eq!(a.code, b.code);
    assert_eq!(a.certificate, b.certificate);
    // singleton-only servers first, in lexicographic order of their parts
    assert_eq!(a.code.stored_singletons(0), vec![0, 1, 2]);
    let specs = a.layout.server_specs();
    assert!(specs.windows(2).all(|w| w[0].sum_cells.len() <= w[1].sum_cells.len()));
}

#[test]
fn cap_is_enforced() {
    let err = Constructor { max_servers: 1000 }.general_construction(3, 3).unwrap_err();
    assert!(matches!(err, Error::TooLarge(_)));
    assert!(matches!(general_construction(4, 4), Err(Error::TooLarge(_))));
}

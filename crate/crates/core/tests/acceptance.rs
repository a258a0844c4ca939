//! One PASS/FAIL line per acceptance criterion. Exits non-zero on any FAIL.

mod common;

use std::time::{Duration, Instant};

use num_integer::{binomial, Integer};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pirarray::bounds::{beta_gamma, lower_formulas, mixed_sum, three_type, upper_g_s, upper_g_st};
use pirarray::constructions::{
    construction1, construction2, general_construction, general_construction_rational,
};
use pirarray::designs::make_steiner;
use pirarray::emulator::emulate_trials;
use pirarray::matching::{hall_violator, is_regular, max_matching, neighborhood, Bipartite};
use pirarray::scalar::{format_rational, rational};
use pirarray::verifier::{check_certificate, exact_k, VerifierConfig};
use pirarray::example_7x4;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    ensure(spent < limit, || format!("took {spent:?}, limit {limit:?}"))
}

fn fixture() -> Check {
    let start = Instant::now();
    let report = exact_k(&example_7x4(), &VerifierConfig::default());
    ensure(report.k() == 3 && report.exact(), || format!("k={} exact={}", report.k(), report.exact()))?;
    ensure(report.rate() == rational(3, 4), || format!("rate {}", format_rational(&report.rate())))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("k=3 rate=3/4 in {:?}", start.elapsed()))
}

fn two_type_tightness() -> Check {
    let start = Instant::now();
    let mut brute = 0;
    for t in 2..=4usize {
        for d in 1..=t {
            let out = construction1(t, d).map_err(|e| e.to_string())?;
            let cap = upper_g_st::<BigRational>(t as u64, d as u64);
            ensure(out.rate() == cap, || format!("t={t} d={d}: rate {} vs cap {}", format_rational(&out.rate()), format_rational(&cap)))?;
            let theta = d.lcm(&t);
            let predicted = out.predicted_m - binomial(t + d - 1, t) * theta / d;
            ensure(out.predicted_k == predicted, || format!("t={t} d={d}: k formula"))?;
            check_certificate(&out.code, &out.certificate).map_err(|v| format!("t={t} d={d}: {v}"))?;
            if out.predicted_m <= 14 {
                let report = exact_k(&out.code, &VerifierConfig::default());
                ensure(report.exact() && report.k() == out.predicted_k, || {
                    format!("t={t} d={d}: exact k {} vs {}", report.k(), out.predicted_k)
                })?;
                brute += 1;
            }
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("9 instances equal the cap, {brute} brute-forced"))
}

fn s_two() -> Check {
    for t in 2..=4usize {
        let want = rational(3 * t as i64 + 1, 4 * t as i64 + 2);
        for out in [construction1(t, t), general_construction(2, t)] {
            let out = out.map_err(|e| e.to_string())?;
            ensure(out.rate() == want, || format!("t={t}: {}", format_rational(&out.rate())))?;
            check_certificate(&out.code, &out.certificate).map_err(|v| v.to_string())?;
        }
    }
    Ok("7/10, 5/7, 13/18".into())
}

fn steiner() -> Check {
    let c2 = construction2(5, 2, &make_steiner(2, 7).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let c1 = construction1(5, 2).map_err(|e| e.to_string())?;
    ensure(c2.predicted_m == 35 && c1.predicted_m == 175, || format!("m = {} and {}", c2.predicted_m, c1.predicted_m))?;
    ensure(c2.rate() == rational(29, 35) && c1.rate() == c2.rate(), || "rates differ".into())?;
    check_certificate(&c2.code, &c2.certificate).map_err(|v| v.to_string())?;
    Ok("m=35 < 175, rate 29/35".into())
}

fn three_types() -> Check {
    let out = general_construction(3, 2).map_err(|e| e.to_string())?;
    ensure(out.rate() == rational(79, 129), || format_rational(&out.rate()))?;
    check_certificate(&out.code, &out.certificate).map_err(|v| v.to_string())?;
    for t in 2..=8u64 {
        let (_, _, rate) = beta_gamma(3, t).map_err(|e| e.to_string())?;
        ensure(rate == three_type::<BigRational>(t), || format!("t={t}"))?;
    }
    let mut graphs = 0;
    for part in 0..out.code.p() {
        for layer in 0..2 {
            let pg = out.layout.pairing_graph(part, layer).map_err(|e| e.to_string())?;
            ensure(is_regular(&pg.graph).regular, || format!("x_{} layer {layer} irregular", part + 1))?;
            ensure(max_matching(&pg.graph).is_perfect_for(&pg.graph), || format!("x_{} layer {layer} unmatched", part + 1))?;
            graphs += 1;
        }
    }
    Ok(format!("79/129, closed form t=2..8, {graphs} graphs regular and matched"))
}

fn rational_case() -> Check {
    let out = general_construction_rational(7, 3, 3).map_err(|e| e.to_string())?;
    check_certificate(&out.code, &out.certificate).map_err(|v| v.to_string())?;
    let mixed = mixed_sum::<BigRational>(2, 1, 3);
    ensure(out.rate() == rational(52, 77), || format_rational(&out.rate()))?;
    ensure(mixed == rational(23, 35) && out.rate() > mixed, || "does not exceed 23/35".into())?;
    Ok("52/77 > 23/35".into())
}

fn asymptotics() -> Check {
    let cap = rational(2, 3);
    for t in (2..=60).chain([1000]) {
        let (_, _, rate) = beta_gamma(3, t).map_err(|e| e.to_string())?;
        ensure(rate < cap, || format!("t={t} not below 2/3"))?;
    }
    let (_, _, rate) = beta_gamma(3, 1000).map_err(|e| e.to_string())?;
    let gap = (&cap - &rate).to_f64().unwrap_or(1.0);
    ensure(gap < 1e-2, || format!("gap {gap}"))?;
    Ok(format!("gap at t=1000 is {gap:.2e}"))
}

fn upper_sanity() -> Check {
    let grid = common::grid();
    for (name, out) in &grid {
        let cap = upper_g_s(&out.s());
        let mut rate = rational(out.certificate.claimed_k as i64, out.code.m() as i64);
        if out.code.m() <= 14 {
            rate = exact_k(&out.code, &VerifierConfig::default()).rate();
        }
        ensure(rate < cap, || format!("{name}: {} >= {}", format_rational(&rate), format_rational(&cap)))?;
    }
    Ok(format!("{} codes strictly below (s+1)/(2s)", grid.len()))
}

fn regular_graph(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Bipartite {
    let mut sigma: Vec<usize> = (0..n).collect();
    let mut pi: Vec<usize> = (0..n).collect();
    sigma.shuffle(rng);
    pi.shuffle(rng);
    let adjacency = (0..n)
        .map(|l| (0..d).map(|j| pi[(sigma[l] + j) % n]).collect())
        .collect();
    Bipartite::from_adjacency(n, adjacency).unwrap()
}

fn matching_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..200 {
        let d = rng.random_range(1..=5);
        let n = rng.random_range(d..=50);
        let g = regular_graph(&mut rng, n, d);
        ensure(is_regular(&g).regular, || format!("regular case {case} not regular"))?;
        ensure(max_matching(&g).is_perfect_for(&g), || format!("regular case {case} unmatched"))?;
        ensure(hall_violator(&g).is_none(), || format!("regular case {case} has a violator"))?;
    }
    let mut imperfect = 0;
    for case in 0..200 {
        let n = rng.random_range(1..=50);
        let density = rng.random_range(0.01..0.2);
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|l| (0..n).map(move |r| (l, r)))
            .filter(|_| rng.random_bool(density))
            .collect();
        let g = Bipartite::from_edges(n, n, &edges).unwrap();
        let perfect = max_matching(&g).is_perfect_for(&g);
        match hall_violator(&g) {
            None => ensure(perfect, || format!("irregular case {case}: no violator but imperfect"))?,
            Some(x) => {
                imperfect += 1;
                ensure(!perfect, || format!("irregular case {case}: violator but perfect"))?;
                ensure(neighborhood(&g, &x).len() < x.len(), || format!("irregular case {case}: bad violator"))?;
            }
        }
    }
    Ok(format!("200 regular matched; 200 irregular consistent ({imperfect} imperfect)"))
}

fn emulation() -> Check {
    let start = Instant::now();
    let mut runs = vec![("7x4 example".to_string(), example_7x4(), exact_k(&example_7x4(), &VerifierConfig::default()).certificate())];
    runs.extend(common::grid().into_iter().map(|(n, o)| (n, o.code, o.certificate)));
    let mut recoveries = 0;
    for (name, code, cert) in &runs {
        let report = emulate_trials::<u64>(code, cert, 1, 100).map_err(|e| format!("{name}: {e}"))?;
        ensure(report.passed(), || format!("{name}: {} failures", report.failures.len()))?;
        recoveries += report.recoveries;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("{} codes x 100 databases, {recoveries} recoveries, 0 failures", runs.len()))
}

fn single_cell() -> Check {
    let want = [(2, 3), (4, 7), (8, 15), (16, 31), (32, 63)];
    for (s, (n, d)) in (2..=6).zip(want) {
        let lower = lower_formulas(&rational(s, 1), 1);
        let got = lower.iter().find(|(l, _)| l.starts_with("single-cell")).map(|(_, v)| v.clone());
        ensure(got == Some(rational(n, d)), || format!("s={s}: {got:?}"))?;
    }
    Ok("2/3, 4/7, 8/15, 16/31, 32/63".into())
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("fixture k=3", fixture),
        ("two-type family meets the fixed-t cap", two_type_tightness),
        ("s=2 rate (3t+1)/(4t+2)", s_two),
        ("design family uses fewer servers", steiner),
        ("three-type family at s=3", three_types),
        ("rational s=7/3", rational_case),
        ("asymptotic rate at s=3", asymptotics),
        ("rates below (s+1)/(2s)", upper_sanity),
        ("matching property suite", matching_suite),
        ("emulation", emulation),
        ("single-cell values", single_cell),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

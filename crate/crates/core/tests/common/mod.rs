#![allow(dead_code)]

use pirarray::constructions::{
    construction1, construction2, general_construction, general_construction_rational,
    ConstructionOutput,
};
use pirarray::designs::make_steiner;

/// Every family instance small enough for repeated emulation.
pub fn grid() -> Vec<(String, ConstructionOutput)> {
    let mut out = Vec::new();
    for t in 2..=4 {
        for d in 1..=t {
            out.push((format!("c1 t={t} d={d}"), construction1(t, d).unwrap()));
        }
    }
    out.push((
        "c2 t=5 d=2".into(),
        construction2(5, 2, &make_steiner(2, 7).unwrap()).unwrap(),
    ));
    out.push((
        "c2 t=3 d=1".into(),
        construction2(3, 1, &make_steiner(1, 4).unwrap()).unwrap(),
    ));
    out.push((
        "c2 t=7 d=2".into(),
        construction2(7, 2, &make_steiner(2, 9).unwrap()).unwrap(),
    ));
    for t in 2..=4 {
        out.push((format!("general s=2 t={t}"), general_construction(2, t).unwrap()));
    }
    out.push(("general s=3 t=2".into(), general_construction(3, 2).unwrap()));
    out.push((
        "general-rational s=7/3 t=3".into(),
        general_construction_rational(7, 3, 3).unwrap(),
    ));
    out.push((
        "general-rational s=5/2 t=2".into(),
        general_construction_rational(5, 2, 2).unwrap(),
    ));
    out
}

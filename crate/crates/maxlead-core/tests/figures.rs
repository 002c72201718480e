//! Distances and refinements of the resource-specification family.

mod common;

use common::*;
use maxlead_core::distance::GridSettings;
use maxlead_core::mecs::{mecs_distance, semantics, DelayMode};
use maxlead_core::refine::boolean_refines;
use maxlead_core::smts::bisim_reduce;
use maxlead_core::value::Value;

fn sem(m: &maxlead_core::mecs::Mecs) -> maxlead_core::smts::Smts {
    bisim_reduce(
        &semantics(m, maxlead_core::Rational::from_integer(1), 6, DelayMode::Interval, 200_000)
            .unwrap(),
    )
}

#[test]
fn s1_refines_s() {
    let a = sem(&sys_s1());
    let b = sem(&sys_s());
    let w = boolean_refines(&a, &b);
    assert!(w.holds(), "the tighter candidate refines the resource");
}

#[test]
fn s2_does_not_refine_s_but_is_one_away() {
    let a = sem(&sys_s2());
    let b = sem(&sys_s());
    let w = boolean_refines(&a, &b);
    assert!(!w.holds());

    let d = mecs_distance(
        &sys_s2(),
        &sys_s(),
        &GridSettings::default(),
        Some(6),
        DelayMode::Interval,
        200_000,
    )
    .unwrap();
    assert_eq!(d.value, Value::from_int(1));
    assert!(!d.saturated);
}

#[test]
fn s1_distance_to_s_is_zero() {
    let d = mecs_distance(
        &sys_s1(),
        &sys_s(),
        &GridSettings::default(),
        Some(6),
        DelayMode::Interval,
        200_000,
    )
    .unwrap();
    assert_eq!(d.value, Value::zero());
}

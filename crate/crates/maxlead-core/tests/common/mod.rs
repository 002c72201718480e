//! Shared fixtures: the resource-specification family used across the
//! integration suites, plus randomized system generators.

#![allow(dead_code)]

use maxlead_core::label::Symbol;
use maxlead_core::mecs::{ClockConstraint, LocId, Mecs};
use maxlead_core::value::{Rational, Value};
use maxlead_core::Interval;

pub const GET: Symbol = Symbol(0);
pub const GRANT: Symbol = Symbol(1);
pub const EXTRA: Symbol = Symbol(2);

pub fn alphabet() -> Vec<Symbol> {
    vec![GET, GRANT, EXTRA]
}

pub fn le(c: Symbol, k: i64) -> ClockConstraint {
    ClockConstraint::top()
        .with(
            c,
            Interval::new(Rational::from_integer(0), Value::from_int(k as u64)).unwrap(),
        )
        .unwrap()
}

/// The resource specification: get is required, the grant is required
/// while the get clock is at most 2, and an optional detour allows an
/// extra action with the grant then due by 5.
pub fn sys_s() -> Mecs {
    let mut m = Mecs::new(alphabet(), 3);
    m.add_must_with_may(LocId(0), GET, ClockConstraint::top(), LocId(1));
    m.add_must_with_may(LocId(1), GRANT, le(GET, 2), LocId(0));
    m.add_may(LocId(1), EXTRA, ClockConstraint::top(), LocId(2));
    m.add_must_with_may(LocId(2), GRANT, le(GET, 5), LocId(0));
    m
}

/// A refinement candidate granting within 1.
pub fn sys_s1() -> Mecs {
    let mut m = Mecs::new(alphabet(), 2);
    m.add_must_with_may(LocId(0), GET, ClockConstraint::top(), LocId(1));
    m.add_must_with_may(LocId(1), GRANT, le(GET, 1), LocId(0));
    m
}

/// A candidate that overshoots the grant deadline by one on its first
/// cycle and compensates later.
pub fn sys_s2() -> Mecs {
    let mut m = Mecs::new(alphabet(), 5);
    m.add_must_with_may(LocId(0), GET, ClockConstraint::top(), LocId(1));
    m.add_may(LocId(1), EXTRA, ClockConstraint::top(), LocId(2));
    m.add_must_with_may(LocId(2), GRANT, le(GET, 4), LocId(0));
    m.add_must_with_may(LocId(1), GRANT, le(GET, 3), LocId(3));
    m.add_must_with_may(LocId(3), GET, ClockConstraint::top(), LocId(4));
    m.add_must_with_may(LocId(4), GRANT, le(GET, 1), LocId(0));
    m
}

/// The accessing process composed with the resource family.
pub fn sys_t() -> Mecs {
    let mut m = Mecs::new(alphabet(), 2);
    m.add_must_with_may(LocId(0), GET, ClockConstraint::top(), LocId(0));
    m.add_must_with_may(LocId(0), GRANT, le(GET, 3), LocId(0));
    m.add_may(LocId(0), EXTRA, le(GET, 2), LocId(1));
    m.add_must_with_may(LocId(1), GRANT, le(GET, 5), LocId(0));
    m
}

/// Hand-encoded drawing of the composition of the resource with the
/// process.
pub fn sys_s_par_t() -> Mecs {
    let mut m = Mecs::new(alphabet(), 3);
    m.add_must_with_may(LocId(0), GET, ClockConstraint::top(), LocId(1));
    m.add_must_with_may(LocId(1), GRANT, le(GET, 2), LocId(0));
    m.add_may(LocId(1), EXTRA, le(GET, 2), LocId(2));
    m.add_must_with_may(LocId(2), GRANT, le(GET, 5), LocId(0));
    m
}

/// Hand-encoded composition of the tighter candidate with the process.
pub fn sys_s1_par_t() -> Mecs {
    let mut m = Mecs::new(alphabet(), 2);
    m.add_must_with_may(LocId(0), GET, ClockConstraint::top(), LocId(1));
    m.add_must_with_may(LocId(1), GRANT, le(GET, 1), LocId(0));
    m
}

/// Hand-encoded composition of the overshooting candidate with the
/// process.
pub fn sys_s2_par_t() -> Mecs {
    let mut m = Mecs::new(alphabet(), 5);
    m.add_must_with_may(LocId(0), GET, ClockConstraint::top(), LocId(1));
    m.add_must_with_may(LocId(1), GRANT, le(GET, 3), LocId(2));
    m.add_must_with_may(LocId(2), GET, ClockConstraint::top(), LocId(3));
    m.add_must_with_may(LocId(3), GRANT, le(GET, 1), LocId(0));
    m.add_may(LocId(1), EXTRA, le(GET, 2), LocId(4));
    m.add_must_with_may(LocId(4), GRANT, le(GET, 4), LocId(0));
    m
}

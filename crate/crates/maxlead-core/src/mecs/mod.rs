//! Modal event-clock specifications.
//!
//! A specification is a finite automaton whose edges carry an action, a
//! modality (may or must) and a closed clock constraint over the
//! event clocks: one clock per action, recording the time since that
//! action last occurred. Constraints are conjunctions of bounds `a ≤ k`
//! and `a ≥ k` with natural constants, equivalently one closed integer
//! interval per clock.
//!
//! The behavioral meaning of a specification is its interval-timed
//! semantics ([`semantics`]): a finite modal transition system over timed
//! labels, on which refinement and distances are computed. The syntactic
//! operations (composition, quotient, conjunction, widening) mirror the
//! system-level ones and are validated against them semantically.

mod ops;
mod semantics;

pub use ops::{mecs_compose, mecs_conjoin, mecs_quotient};
pub use semantics::{semantics, DelayMode};

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::distance::{refinement_distance, DistanceResult, GridSettings};
use crate::error::{Error, Result};
use crate::label::{Interval, Symbol};
use crate::value::{Rational, Value};

/// Location index within a specification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocId(pub u32);

impl LocId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A closed clock constraint: one integer interval per clock, with absent
/// clocks unconstrained (`[0, ∞]`).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClockConstraint(BTreeMap<Symbol, Interval>);

impl ClockConstraint {
    /// The trivially true constraint.
    pub fn top() -> ClockConstraint {
        ClockConstraint(BTreeMap::new())
    }

    /// Constrains one clock; intersects with any existing bound. Endpoints
    /// must be naturals (or ∞).
    pub fn with(mut self, clock: Symbol, window: Interval) -> Result<ClockConstraint> {
        if !window.lo().is_integer()
            || !matches!(window.hi(), Value::Infinity)
                && !window.hi().as_finite().unwrap().is_integer()
        {
            return Err(Error::Config(
                "clock constraints use natural constants".into(),
            ));
        }
        let merged = match self.0.get(&clock) {
            None => window,
            Some(old) => old.intersect(&window).ok_or_else(|| {
                Error::Config(format!("contradictory bounds on clock {:?}", clock))
            })?,
        };
        if merged == Interval::full() {
            self.0.remove(&clock);
        } else {
            self.0.insert(clock, merged);
        }
        Ok(ClockConstraint(self.0))
    }

    pub fn get(&self, clock: Symbol) -> Interval {
        self.0.get(&clock).copied().unwrap_or_else(Interval::full)
    }

    pub fn is_top(&self) -> bool {
        self.0.is_empty()
    }

    /// Clocks with a non-trivial bound.
    pub fn clocks(&self) -> impl Iterator<Item = (Symbol, Interval)> + '_ {
        self.0.iter().map(|(&c, &i)| (c, i))
    }

    /// Per-clock intersection; `None` when some clock's bounds become
    /// contradictory.
    pub fn intersect(&self, other: &ClockConstraint) -> Option<ClockConstraint> {
        let mut out = self.0.clone();
        for (&c, w) in &other.0 {
            match out.get(&c) {
                None => {
                    out.insert(c, *w);
                }
                Some(old) => {
                    out.insert(c, old.intersect(w)?);
                }
            }
        }
        Some(ClockConstraint(out))
    }

    /// Per-clock containment of satisfaction sets.
    pub fn subset_of(&self, other: &ClockConstraint) -> bool {
        other.0.iter().all(|(&c, w)| self.get(c).subset_of(w))
    }

    /// Relaxes every bound by `n` on both sides, clamping at zero.
    pub fn widen(&self, n: u32) -> ClockConstraint {
        let n = Rational::from_integer(n as i64);
        let widened = self
            .0
            .iter()
            .filter_map(|(&c, w)| {
                let lo = (w.lo() - n).max(Rational::zero());
                let hi = match w.hi() {
                    Value::Infinity => Value::Infinity,
                    Value::Finite(h) => Value::finite(h + n),
                };
                let w2 = Interval::new(lo, hi).expect("widening preserves validity");
                if w2 == Interval::full() {
                    None
                } else {
                    Some((c, w2))
                }
            })
            .collect();
        ClockConstraint(widened)
    }

    pub fn max_constant(&self) -> Rational {
        let mut m = Rational::zero();
        for (_, w) in self.clocks() {
            m = m.max(w.lo());
            if let Value::Finite(h) = w.hi() {
                m = m.max(h);
            }
        }
        m
    }
}

/// An interval clock valuation: each clock holds an interval of possible
/// values. Clocks absent from the map are unconstrained.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalValuation(BTreeMap<Symbol, Interval>);

impl IntervalValuation {
    pub fn new() -> IntervalValuation {
        IntervalValuation(BTreeMap::new())
    }

    pub fn set(mut self, clock: Symbol, window: Interval) -> IntervalValuation {
        self.0.insert(clock, window);
        self
    }

    pub fn get(&self, clock: Symbol) -> Interval {
        self.0.get(&clock).copied().unwrap_or_else(Interval::full)
    }
}

/// Constraint satisfaction for interval valuations: some concrete clock
/// reading inside the valuation satisfies the constraint. Constraints are
/// independent per clock, so per-clock intersection is exact.
pub fn constraint_sat(v: &IntervalValuation, phi: &ClockConstraint) -> bool {
    phi.clocks()
        .all(|(c, w)| v.get(c).intersect(&w).is_some())
}

/// An edge of a specification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MecsEdge {
    pub action: Symbol,
    pub guard: ClockConstraint,
    pub target: LocId,
}

/// A modal event-clock specification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mecs {
    alphabet: Vec<Symbol>,
    names: Vec<String>,
    initial: LocId,
    may: Vec<Vec<MecsEdge>>,
    must: Vec<Vec<MecsEdge>>,
}

impl Mecs {
    pub fn new(alphabet: Vec<Symbol>, n_locations: usize) -> Mecs {
        let mut alphabet = alphabet;
        alphabet.sort();
        alphabet.dedup();
        Mecs {
            alphabet,
            names: (0..n_locations).map(|i| format!("q{}", i)).collect(),
            initial: LocId(0),
            may: vec![Vec::new(); n_locations],
            must: vec![Vec::new(); n_locations],
        }
    }

    pub fn with_names(alphabet: Vec<Symbol>, names: Vec<String>, initial: LocId) -> Mecs {
        let mut alphabet = alphabet;
        alphabet.sort();
        alphabet.dedup();
        let n = names.len();
        assert!(initial.index() < n);
        Mecs {
            alphabet,
            names,
            initial,
            may: vec![Vec::new(); n],
            must: vec![Vec::new(); n],
        }
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn n_locations(&self) -> usize {
        self.names.len()
    }

    pub fn initial(&self) -> LocId {
        self.initial
    }

    pub fn set_initial(&mut self, q: LocId) {
        assert!(q.index() < self.names.len());
        self.initial = q;
    }

    pub fn add_location(&mut self, name: String) -> LocId {
        self.names.push(name);
        self.may.push(Vec::new());
        self.must.push(Vec::new());
        LocId(self.names.len() as u32 - 1)
    }

    pub fn name(&self, q: LocId) -> &str {
        &self.names[q.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn add_may(&mut self, from: LocId, action: Symbol, guard: ClockConstraint, to: LocId) {
        assert!(self.alphabet.contains(&action), "action not in the alphabet");
        let edge = MecsEdge {
            action,
            guard,
            target: to,
        };
        if !self.may[from.index()].contains(&edge) {
            self.may[from.index()].push(edge);
        }
    }

    pub fn add_must(&mut self, from: LocId, action: Symbol, guard: ClockConstraint, to: LocId) {
        assert!(self.alphabet.contains(&action), "action not in the alphabet");
        let edge = MecsEdge {
            action,
            guard,
            target: to,
        };
        if !self.must[from.index()].contains(&edge) {
            self.must[from.index()].push(edge);
        }
    }

    /// Adds a must edge and the may edge with the same guard that covers
    /// it, mirroring the convention that required behavior is drawn once.
    pub fn add_must_with_may(
        &mut self,
        from: LocId,
        action: Symbol,
        guard: ClockConstraint,
        to: LocId,
    ) {
        self.add_may(from, action, guard.clone(), to);
        self.add_must(from, action, guard, to);
    }

    pub fn may(&self, q: LocId) -> &[MecsEdge] {
        &self.may[q.index()]
    }

    pub fn must(&self, q: LocId) -> &[MecsEdge] {
        &self.must[q.index()]
    }

    pub fn may_edges(&self) -> impl Iterator<Item = (LocId, &MecsEdge)> + '_ {
        self.may
            .iter()
            .enumerate()
            .flat_map(|(i, es)| es.iter().map(move |e| (LocId(i as u32), e)))
    }

    pub fn must_edges(&self) -> impl Iterator<Item = (LocId, &MecsEdge)> + '_ {
        self.must
            .iter()
            .enumerate()
            .flat_map(|(i, es)| es.iter().map(move |e| (LocId(i as u32), e)))
    }

    /// Syntactic consistency: every must edge is covered by a may edge
    /// with the same action and target and a weaker guard.
    pub fn check_consistency(&self) -> Vec<(LocId, MecsEdge)> {
        let mut out = Vec::new();
        for (q, e) in self.must_edges() {
            let covered = self.may(q).iter().any(|m| {
                m.action == e.action && m.target == e.target && e.guard.subset_of(&m.guard)
            });
            if !covered {
                out.push((q, e.clone()));
            }
        }
        out
    }

    pub fn is_consistent(&self) -> bool {
        self.check_consistency().is_empty()
    }

    /// Strong determinism: two may edges on the same action from one
    /// location have equal satisfaction sets and equal targets.
    pub fn strongly_deterministic(&self) -> bool {
        for edges in &self.may {
            for (i, e1) in edges.iter().enumerate() {
                for e2 in &edges[i + 1..] {
                    if e1.action == e2.action && (e1.guard != e2.guard || e1.target != e2.target) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Largest constant in any guard.
    pub fn max_constant(&self) -> Rational {
        let mut m = Rational::zero();
        for (_, e) in self.may_edges().chain(self.must_edges()) {
            m = m.max(e.guard.max_constant());
        }
        m
    }

    /// Clocks that appear in some guard with a non-trivial bound; only
    /// these influence behavior, so only these are tracked by the
    /// semantics.
    pub fn relevant_clocks(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = self
            .may_edges()
            .chain(self.must_edges())
            .flat_map(|(_, e)| e.guard.clocks().map(|(c, _)| c))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Every guard relaxed by `n` on both sides; the structure is
    /// unchanged.
    pub fn widen(&self, n: u32) -> Mecs {
        let mut out = self.clone();
        for edges in out.may.iter_mut().chain(out.must.iter_mut()) {
            for e in edges.iter_mut() {
                e.guard = e.guard.widen(n);
            }
        }
        out
    }
}

/// The refinement distance between two specifications: the distance
/// between their finitized semantics, collapsed by bisimulation first
/// (the collapse leaves refinement and distances unchanged). The clock
/// cap defaults to the largest constant of either operand plus one.
pub fn mecs_distance(
    a: &Mecs,
    b: &Mecs,
    settings: &GridSettings,
    clock_cap: Option<u32>,
    mode: DelayMode,
    max_states: usize,
) -> Result<DistanceResult> {
    let cap = default_clock_cap(a, b, clock_cap);
    let sa = crate::smts::bisim_reduce(&semantics(a, settings.step, cap, mode, max_states)?);
    let sb = crate::smts::bisim_reduce(&semantics(b, settings.step, cap, mode, max_states)?);
    refinement_distance(&sa, &sb, settings)
}

/// The shared clock cap for a pair of specifications.
pub fn default_clock_cap(a: &Mecs, b: &Mecs, requested: Option<u32>) -> u32 {
    match requested {
        Some(c) => c,
        None => {
            let m = a.max_constant().max(b.max_constant());
            m.ceil().to_integer() as u32 + 1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::rat;

    const GET: Symbol = Symbol(0);

    fn ivl(lo: i64, hi: i64) -> Interval {
        Interval::new(Rational::from_integer(lo), Value::from_int(hi as u64)).unwrap()
    }

    fn le(k: i64) -> Interval {
        ivl(0, k)
    }

    #[test]
    fn constraint_sat_examples() {
        let phi = ClockConstraint::top().with(GET, le(2)).unwrap();
        let v = IntervalValuation::new().set(GET, ivl(0, 2));
        assert!(constraint_sat(&v, &phi));
        let v = IntervalValuation::new().set(GET, ivl(3, 5));
        assert!(!constraint_sat(&v, &phi));
        // A witness inside the overlap suffices.
        let v = IntervalValuation::new().set(GET, ivl(1, 4));
        assert!(constraint_sat(&v, &phi));
    }

    #[test]
    fn constraint_intersection_and_widening() {
        let a = ClockConstraint::top().with(GET, le(2)).unwrap();
        let b = ClockConstraint::top().with(GET, ivl(1, 5)).unwrap();
        let c = a.intersect(&b).unwrap();
        assert_eq!(c.get(GET), ivl(1, 2));
        // Disjoint bounds have no intersection.
        let d = ClockConstraint::top().with(GET, ivl(4, 5)).unwrap();
        assert!(a.intersect(&d).is_none());

        assert_eq!(a.widen(1).get(GET), le(3));
        let e = ClockConstraint::top().with(GET, ivl(2, 3)).unwrap();
        assert_eq!(e.widen(1).get(GET), ivl(1, 4));
        assert_eq!(e.widen(0), e);
        // Integer constants are enforced.
        assert!(ClockConstraint::top()
            .with(GET, Interval::new(rat(1, 2), Value::from_int(2)).unwrap())
            .is_err());
    }

    #[test]
    fn consistency_and_determinism() {
        let mut m = Mecs::new(vec![GET], 2);
        m.add_must_with_may(LocId(0), GET, ClockConstraint::top().with(GET, le(2)).unwrap(), LocId(1));
        assert!(m.is_consistent());
        assert!(m.strongly_deterministic());

        // A second may edge on the same action with a different guard.
        m.add_may(LocId(0), GET, ClockConstraint::top().with(GET, le(3)).unwrap(), LocId(1));
        assert!(!m.strongly_deterministic());

        // A must edge without coverage.
        let mut m = Mecs::new(vec![GET], 2);
        m.add_may(LocId(0), GET, ClockConstraint::top().with(GET, le(1)).unwrap(), LocId(1));
        m.add_must(LocId(0), GET, ClockConstraint::top().with(GET, le(2)).unwrap(), LocId(1));
        assert!(!m.is_consistent());
    }

    #[test]
    fn widening_examples() {
        let mut m = Mecs::new(vec![GET], 2);
        m.add_must_with_may(LocId(0), GET, ClockConstraint::top().with(GET, le(2)).unwrap(), LocId(1));
        let w = m.widen(1);
        assert_eq!(w.may(LocId(0))[0].guard.get(GET), le(3));
        assert_eq!(m.widen(0), m);
    }
}

//! Finite modal transition systems over timed labels.
//!
//! A system has a finite set of states, an initial state, and two labeled
//! transition relations: `may` (allowed behavior) and `must` (required
//! behavior). Consistency demands that everything required is also
//! allowed: every must transition is covered by a may transition to the
//! same target with a wider label.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::label::{widen, Action, Symbol, TimedLabel};
use crate::value::{Rational, Value};

/// Index of a state within its system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite structured modal transition system. Transitions are kept
/// sorted and deduplicated, so the edge relations behave as sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smts {
    names: Vec<String>,
    initial: StateId,
    may: Vec<Vec<(TimedLabel, StateId)>>,
    must: Vec<Vec<(TimedLabel, StateId)>>,
}

/// A must transition without covering may transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyViolation {
    pub state: StateId,
    pub label: TimedLabel,
    pub target: StateId,
}

impl Smts {
    /// Creates a system with `n` states named `s0..`, initial state 0.
    pub fn new(n: usize) -> Smts {
        Smts {
            names: (0..n).map(|i| format!("s{}", i)).collect(),
            initial: StateId(0),
            may: vec![Vec::new(); n],
            must: vec![Vec::new(); n],
        }
    }

    pub fn with_names(names: Vec<String>, initial: StateId) -> Smts {
        let n = names.len();
        assert!(initial.index() < n);
        Smts {
            names,
            initial,
            may: vec![Vec::new(); n],
            must: vec![Vec::new(); n],
        }
    }

    pub fn add_state(&mut self, name: String) -> StateId {
        self.names.push(name);
        self.may.push(Vec::new());
        self.must.push(Vec::new());
        StateId(self.names.len() as u32 - 1)
    }

    pub fn set_initial(&mut self, s: StateId) {
        assert!(s.index() < self.names.len());
        self.initial = s;
    }

    pub fn n_states(&self) -> usize {
        self.names.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.names[s.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn add_may(&mut self, from: StateId, label: TimedLabel, to: StateId) {
        insert_sorted(&mut self.may[from.index()], (label, to));
    }

    pub fn add_must(&mut self, from: StateId, label: TimedLabel, to: StateId) {
        insert_sorted(&mut self.must[from.index()], (label, to));
    }

    /// Adds a must transition together with its covering may transition.
    pub fn add_must_with_may(&mut self, from: StateId, label: TimedLabel, to: StateId) {
        self.add_must(from, label, to);
        self.add_may(from, label, to);
    }

    pub fn may(&self, s: StateId) -> &[(TimedLabel, StateId)] {
        &self.may[s.index()]
    }

    pub fn must(&self, s: StateId) -> &[(TimedLabel, StateId)] {
        &self.must[s.index()]
    }

    pub fn may_edges(&self) -> impl Iterator<Item = (StateId, TimedLabel, StateId)> + '_ {
        self.may.iter().enumerate().flat_map(|(i, edges)| {
            edges.iter().map(move |&(l, t)| (StateId(i as u32), l, t))
        })
    }

    pub fn must_edges(&self) -> impl Iterator<Item = (StateId, TimedLabel, StateId)> + '_ {
        self.must.iter().enumerate().flat_map(|(i, edges)| {
            edges.iter().map(move |&(l, t)| (StateId(i as u32), l, t))
        })
    }

    /// Discrete symbols occurring on any transition.
    pub fn alphabet(&self) -> Vec<Symbol> {
        let mut syms: Vec<Symbol> = self
            .may_edges()
            .chain(self.must_edges())
            .filter_map(|(_, l, _)| match l.action {
                Action::Discrete(s) => Some(s),
                Action::Delay => None,
            })
            .collect();
        syms.sort();
        syms.dedup();
        syms
    }

    /// Largest finite time constant on any label, or zero for a system
    /// without timing data.
    pub fn max_constant(&self) -> Rational {
        let mut m = Rational::from_integer(0);
        for (_, l, _) in self.may_edges().chain(self.must_edges()) {
            m = m.max(l.window.lo());
            if let Value::Finite(h) = l.window.hi() {
                m = m.max(h);
            }
        }
        m
    }

    /// Every must transition must be covered by a may transition to the
    /// same target with a refining-or-equal label. Returns the violations.
    pub fn check_consistency(&self) -> Vec<ConsistencyViolation> {
        let mut out = Vec::new();
        for (s, k, target) in self.must_edges() {
            let covered = self
                .may(s)
                .iter()
                .any(|&(l, t)| t == target && k.refines(&l));
            if !covered {
                out.push(ConsistencyViolation {
                    state: s,
                    label: k,
                    target,
                });
            }
        }
        out
    }

    pub fn is_consistent(&self) -> bool {
        self.check_consistency().is_empty()
    }

    /// Determinism for interval-timed systems: two may transitions with
    /// the same action from the same state must carry the same window and
    /// lead to the same state.
    pub fn is_deterministic(&self) -> bool {
        for edges in &self.may {
            for (i, &(k, s1)) in edges.iter().enumerate() {
                for &(l, s2) in &edges[i + 1..] {
                    if k.action == l.action && (k.window != l.window || s1 != s2) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Copy with every delay label widened by `n` on both sides (lower
    /// ends clamped at zero). The transition structure is unchanged.
    pub fn widen_labels(&self, n: Rational) -> Smts {
        let mut out = Smts::with_names(self.names.clone(), self.initial);
        for (s, l, t) in self.may_edges() {
            out.add_may(s, widen(&l, n), t);
        }
        for (s, l, t) in self.must_edges() {
            out.add_must(s, widen(&l, n), t);
        }
        out
    }

    /// States reachable from the initial state over may and must edges.
    pub fn reachable(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.n_states()];
        let mut stack = vec![self.initial];
        seen[self.initial.index()] = true;
        let mut out = Vec::new();
        while let Some(s) = stack.pop() {
            out.push(s);
            for &(_, t) in self.may(s).iter().chain(self.must(s)) {
                if !seen[t.index()] {
                    seen[t.index()] = true;
                    stack.push(t);
                }
            }
        }
        out.sort();
        out
    }
}

fn insert_sorted(edges: &mut Vec<(TimedLabel, StateId)>, edge: (TimedLabel, StateId)) {
    if let Err(pos) = edges.binary_search(&edge) {
        edges.insert(pos, edge);
    }
}

/// Quotient by the largest modal bisimulation: states with identical
/// labeled may/must behavior up to the equivalence collapse into one.
/// Refinement and distances are invariant under the collapse (the quotient
/// and the original refine each other both ways); semantics-generated
/// systems shrink substantially.
pub fn bisim_reduce(s: &Smts) -> Smts {
    use alloc::collections::BTreeMap;

    let n = s.n_states();
    let mut class = vec![0u32; n];
    let mut count = 1usize;
    loop {
        let mut keys: Vec<Vec<(bool, TimedLabel, u32)>> = Vec::with_capacity(n);
        for i in 0..n {
            let st = StateId(i as u32);
            let mut sig: Vec<(bool, TimedLabel, u32)> = s
                .may(st)
                .iter()
                .map(|&(l, t)| (false, l, class[t.index()]))
                .chain(
                    s.must(st)
                        .iter()
                        .map(|&(l, t)| (true, l, class[t.index()])),
                )
                .collect();
            sig.sort();
            sig.dedup();
            keys.push(sig);
        }
        // The old class is part of the key, so the partition only refines.
        let mut ids: BTreeMap<(u32, &[(bool, TimedLabel, u32)]), u32> = BTreeMap::new();
        let mut next = vec![0u32; n];
        for i in 0..n {
            let fresh = ids.len() as u32;
            let id = *ids.entry((class[i], keys[i].as_slice())).or_insert(fresh);
            next[i] = id;
        }
        let new_count = ids.len();
        if new_count == count {
            class = next;
            break;
        }
        count = new_count;
        class = next;
    }

    // Representative per class: the lowest original state.
    let mut rep: Vec<Option<StateId>> = vec![None; count];
    for i in 0..n {
        let c = class[i] as usize;
        if rep[c].is_none() {
            rep[c] = Some(StateId(i as u32));
        }
    }
    let names: Vec<String> = rep
        .iter()
        .map(|r| s.name(r.expect("inhabited class")).into())
        .collect();
    let mut out = Smts::with_names(names, StateId(class[s.initial().index()]));
    for (from, l, to) in s.may_edges() {
        out.add_may(StateId(class[from.index()]), l, StateId(class[to.index()]));
    }
    for (from, l, to) in s.must_edges() {
        out.add_must(StateId(class[from.index()]), l, StateId(class[to.index()]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Interval;

    fn dl(lo: i64, hi: i64) -> TimedLabel {
        TimedLabel::delay(
            Interval::new(Rational::from_integer(lo), Value::from_int(hi as u64)).unwrap(),
        )
    }

    #[test]
    fn consistency_examples() {
        // Implementation-style system: must = may.
        let mut s = Smts::new(2);
        s.add_must_with_may(StateId(0), dl(1, 1), StateId(1));
        assert!(s.is_consistent());

        // Must window wider than the covering may window.
        let mut s = Smts::new(2);
        s.add_must(StateId(0), dl(0, 2), StateId(1));
        s.add_may(StateId(0), dl(0, 1), StateId(1));
        let v = s.check_consistency();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].label, dl(0, 2));

        // No must transitions at all: vacuously consistent.
        let mut s = Smts::new(2);
        s.add_may(StateId(0), dl(0, 2), StateId(1));
        assert!(s.is_consistent());
    }

    #[test]
    fn determinism_examples() {
        let mut s = Smts::new(2);
        s.add_may(StateId(0), dl(0, 2), StateId(1));
        s.add_may(StateId(0), TimedLabel::discrete(Symbol(0)), StateId(1));
        assert!(s.is_deterministic());

        // Duplicate edges collapse; still deterministic.
        s.add_may(StateId(0), dl(0, 2), StateId(1));
        assert!(s.is_deterministic());
        assert_eq!(s.may(StateId(0)).len(), 2);

        // Same action, different window.
        s.add_may(StateId(0), dl(0, 3), StateId(1));
        assert!(!s.is_deterministic());
    }

    #[test]
    fn constants_and_alphabet() {
        let mut s = Smts::new(2);
        s.add_may(StateId(0), dl(0, 5), StateId(1));
        s.add_may(StateId(1), TimedLabel::discrete(Symbol(3)), StateId(0));
        assert_eq!(s.max_constant(), Rational::from_integer(5));
        assert_eq!(s.alphabet(), vec![Symbol(3)]);
    }

    #[test]
    fn widen_copy() {
        let mut s = Smts::new(2);
        s.add_must_with_may(StateId(0), dl(1, 2), StateId(1));
        let w = s.widen_labels(Rational::from_integer(1));
        assert_eq!(w.may(StateId(0))[0].0, dl(0, 3));
        assert_eq!(w.must(StateId(0))[0].0, dl(0, 3));
    }
}

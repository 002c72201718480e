//! Structural operations on systems: pruning, composition, quotient and
//! conjunction.
//!
//! Quotient and conjunction are partial: a construction "does not exist"
//! when required behavior cannot be realized and the resulting bad states
//! reach the initial state through required transitions. Partiality is a
//! value (`None`), not an error.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::label::{
    self, complement, conjoin as conjoin_label, quotient as quotient_label, Action, Interval,
    Symbol, TimedLabel,
};
use crate::lattice::GridConfig;
use crate::smts::{Smts, StateId};
use crate::value::{Rational, Value};

/// The delay-label space a quotient is taken relative to.
///
/// Systems produced by the event-clock semantics carry a fixed delay
/// alphabet (point delays below the clock cap plus one unbounded tail
/// window). Quotients of such systems must stay inside that alphabet for
/// the result to be comparable with a syntactically built counterpart:
/// quotient labels are decomposed into the alphabet's labels and the
/// universal state carries the alphabet itself, as both may and must
/// (every state of a semantics-generated system has all delays required).
///
/// `Full` is the unrestricted label space: quotient labels are kept as
/// computed and the universal state allows everything and requires
/// nothing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DelayUniverse {
    Full,
    Points { cap: Rational },
}

/// Removes `bad` states together with everything that must-reaches them.
/// `None` when the initial state is removed.
pub fn prune(s: &Smts, bad: &[StateId]) -> Option<Smts> {
    let n = s.n_states();
    let mut doomed = vec![false; n];
    let mut queue: VecDeque<StateId> = VecDeque::new();
    for &b in bad {
        if !doomed[b.index()] {
            doomed[b.index()] = true;
            queue.push_back(b);
        }
    }
    // Reverse must edges once.
    let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for (from, _, to) in s.must_edges() {
        rev[to.index()].push(from);
    }
    while let Some(q) = queue.pop_front() {
        for &p in &rev[q.index()] {
            if !doomed[p.index()] {
                doomed[p.index()] = true;
                queue.push_back(p);
            }
        }
    }
    if doomed[s.initial().index()] {
        return None;
    }
    let mut remap: Vec<Option<StateId>> = vec![None; n];
    let mut names = Vec::new();
    for i in 0..n {
        if !doomed[i] {
            remap[i] = Some(StateId(names.len() as u32));
            names.push(s.name(StateId(i as u32)).into());
        }
    }
    let mut out = Smts::with_names(names, remap[s.initial().index()].unwrap());
    for (from, l, to) in s.may_edges() {
        if let (Some(f), Some(t)) = (remap[from.index()], remap[to.index()]) {
            out.add_may(f, l, t);
        }
    }
    for (from, l, to) in s.must_edges() {
        if let (Some(f), Some(t)) = (remap[from.index()], remap[to.index()]) {
            out.add_must(f, l, t);
        }
    }
    Some(out)
}

/// Builder for reachable product constructions.
struct Product {
    out: Smts,
    index: BTreeMap<(StateId, StateId), StateId>,
    frontier: VecDeque<(StateId, StateId)>,
}

impl Product {
    fn new(left: &Smts, right: &Smts) -> Product {
        let root = (left.initial(), right.initial());
        let out = Smts::with_names(vec![pair_name(left, right, root)], StateId(0));
        let mut index = BTreeMap::new();
        index.insert(root, StateId(0));
        let mut frontier = VecDeque::new();
        frontier.push_back(root);
        Product {
            out,
            index,
            frontier,
        }
    }

    fn get(&mut self, left: &Smts, right: &Smts, pair: (StateId, StateId)) -> StateId {
        match self.index.get(&pair) {
            Some(&id) => id,
            None => {
                let id = self.out.add_state(pair_name(left, right, pair));
                self.index.insert(pair, id);
                self.frontier.push_back(pair);
                id
            }
        }
    }
}

fn pair_name(left: &Smts, right: &Smts, pair: (StateId, StateId)) -> String {
    format!("{}|{}", left.name(pair.0), right.name(pair.1))
}

/// Structural composition: CSP-style synchronization on actions with
/// window intersection, over the reachable product.
pub fn compose(s: &Smts, t: &Smts) -> Smts {
    let mut prod = Product::new(s, t);
    while let Some((a, b)) = prod.frontier.pop_front() {
        let from = prod.index[&(a, b)];
        for &(k, a2) in s.may(a) {
            for &(l, b2) in t.may(b) {
                if let Some(m) = label::compose(&k, &l) {
                    let to = prod.get(s, t, (a2, b2));
                    prod.out.add_may(from, m, to);
                }
            }
        }
        for &(k, a2) in s.must(a) {
            for &(l, b2) in t.must(b) {
                if let Some(m) = label::compose(&k, &l) {
                    let to = prod.get(s, t, (a2, b2));
                    prod.out.add_must(from, m, to);
                }
            }
        }
    }
    prod.out
}

/// The quotient `t ⧵⧵ s`: the most permissive system whose composition
/// with `s` refines `t`. Product states carry quotient labels; a state is
/// bad when `t` requires something no required transition of `s` can
/// deliver; labels nothing of `s` synchronizes with lead to a universal
/// state. The result is pruned; `None` when pruning removes the initial
/// pair.
///
/// The distance and refinement guarantees require `s` to be
/// deterministic; the construction itself runs regardless.
pub fn quotient(
    t: &Smts,
    s: &Smts,
    grid: &GridConfig,
    universe: &DelayUniverse,
) -> Result<Option<Smts>> {
    let mut alphabet: Vec<Symbol> = t.alphabet();
    alphabet.extend(s.alphabet());
    alphabet.sort();
    alphabet.dedup();

    let mut prod = Product::new(t, s);
    let mut bad: Vec<StateId> = Vec::new();
    // Edges into the universal state, resolved after the main loop so the
    // state is only materialized when referenced.
    let mut to_universal: Vec<(StateId, TimedLabel)> = Vec::new();

    while let Some((tt, ss)) = prod.frontier.pop_front() {
        let from = prod.index[&(tt, ss)];
        for &(l, t2) in t.may(tt) {
            for &(k, s2) in s.may(ss) {
                if let Some(m) = quotient_label(&l, &k) {
                    for m2 in expand_label(&m, universe, grid)? {
                        let to = prod.get(t, s, (t2, s2));
                        prod.out.add_may(from, m2, to);
                    }
                }
            }
        }
        for &(l, t2) in t.must(tt) {
            for &(k, s2) in s.must(ss) {
                if let Some(m) = quotient_label(&l, &k) {
                    for m2 in expand_label(&m, universe, grid)? {
                        let to = prod.get(t, s, (t2, s2));
                        prod.out.add_must(from, m2, to);
                    }
                }
            }
        }
        // Bad-state rule: a requirement of t with no quotientable
        // requirement of s.
        for &(l, _) in t.must(tt) {
            let fulfillable = s
                .must(ss)
                .iter()
                .any(|&(k, _)| quotient_label(&l, &k).is_some());
            if !fulfillable {
                bad.push(from);
                break;
            }
        }
        // Labels that synchronize with nothing s allows are free: they can
        // never violate t through the composition.
        let enabled: Vec<TimedLabel> = s.may(ss).iter().map(|&(k, _)| k).collect();
        for m in complement_in(&enabled, &alphabet, grid, universe)? {
            to_universal.push((from, m));
        }
    }

    if !to_universal.is_empty() {
        let u = prod.out.add_state("u".into());
        for (from, m) in to_universal {
            prod.out.add_may(from, m, u);
        }
        for m in universe_maximal(&alphabet, grid, universe)? {
            prod.out.add_may(u, m, u);
            if matches!(universe, DelayUniverse::Points { .. }) && m.action == Action::Delay {
                prod.out.add_must(u, m, u);
            }
        }
    }

    Ok(prune(&prod.out, &bad))
}

/// Conjunction: the greatest-lower-bound construction. Requirements of
/// either side must be allowed by the other, or the state is bad.
pub fn conjoin(s: &Smts, t: &Smts) -> Option<Smts> {
    let mut prod = Product::new(s, t);
    let mut bad: Vec<StateId> = Vec::new();
    while let Some((a, b)) = prod.frontier.pop_front() {
        let from = prod.index[&(a, b)];
        for &(k, a2) in s.may(a) {
            for &(l, b2) in t.may(b) {
                if let Some(m) = conjoin_label(&k, &l) {
                    let to = prod.get(s, t, (a2, b2));
                    prod.out.add_may(from, m, to);
                }
            }
        }
        for &(k, a2) in s.must(a) {
            for &(l, b2) in t.may(b) {
                if let Some(m) = conjoin_label(&k, &l) {
                    let to = prod.get(s, t, (a2, b2));
                    prod.out.add_must(from, m, to);
                }
            }
        }
        for &(k, a2) in s.may(a) {
            for &(l, b2) in t.must(b) {
                if let Some(m) = conjoin_label(&k, &l) {
                    let to = prod.get(s, t, (a2, b2));
                    prod.out.add_must(from, m, to);
                }
            }
        }
        for &(k, _) in s.must(a) {
            if !t.may(b).iter().any(|(l, _)| conjoin_label(&k, l).is_some()) {
                bad.push(from);
                break;
            }
        }
        for &(l, _) in t.must(b) {
            if !s.may(a).iter().any(|(k, _)| conjoin_label(k, &l).is_some()) {
                bad.push(from);
                break;
            }
        }
    }
    prune(&prod.out, &bad)
}

/// A single-state system that allows and requires every behavior over the
/// given alphabet: action and full-window delay self-loops, may and must.
/// The unit of composition.
pub fn universal_system(alphabet: &[Symbol]) -> Smts {
    let mut s = Smts::with_names(vec!["u".into()], StateId(0));
    for &a in alphabet {
        s.add_must_with_may(StateId(0), TimedLabel::discrete(a), StateId(0));
    }
    s.add_must_with_may(StateId(0), TimedLabel::delay(Interval::full()), StateId(0));
    s
}

/// A single-state system that allows everything and requires nothing.
/// The unit of conjunction (musts of the other operand pass through the
/// may/must rules unchanged).
pub fn permissive_system(alphabet: &[Symbol]) -> Smts {
    let mut s = Smts::with_names(vec!["u".into()], StateId(0));
    for &a in alphabet {
        s.add_may(StateId(0), TimedLabel::discrete(a), StateId(0));
    }
    s.add_may(StateId(0), TimedLabel::delay(Interval::full()), StateId(0));
    s
}

/// Decomposes a quotient label into the universe's labels refining it.
fn expand_label(
    m: &TimedLabel,
    universe: &DelayUniverse,
    grid: &GridConfig,
) -> Result<Vec<TimedLabel>> {
    match (universe, m.action) {
        (DelayUniverse::Full, _) | (_, Action::Discrete(_)) => Ok(vec![*m]),
        (DelayUniverse::Points { cap }, Action::Delay) => {
            let cap_u = grid.to_units(*cap)?;
            let (lo, hi) = m.window.units(grid)?;
            let mut out = Vec::new();
            let top = match hi {
                None => cap_u,
                Some(h) => h.min(cap_u),
            };
            for d in lo.max(1)..=top {
                out.push(TimedLabel::delay_point(grid.units_to_rational(d)));
            }
            if hi.is_none() && lo <= cap_u {
                out.push(TimedLabel::delay(Interval::from_units(grid, cap_u, None)));
            }
            Ok(out)
        }
    }
}

/// Universe labels that fail to synchronize with every enabled label.
fn complement_in(
    enabled: &[TimedLabel],
    alphabet: &[Symbol],
    grid: &GridConfig,
    universe: &DelayUniverse,
) -> Result<Vec<TimedLabel>> {
    match universe {
        DelayUniverse::Full => complement(enabled, alphabet, grid),
        DelayUniverse::Points { cap } => {
            let mut out = Vec::new();
            for &sym in alphabet {
                if !enabled.iter().any(|k| k.action == Action::Discrete(sym)) {
                    out.push(TimedLabel::discrete(sym));
                }
            }
            let cap_u = grid.to_units(*cap)?;
            let mut windows: Vec<(i64, Option<i64>)> = Vec::new();
            for k in enabled {
                if k.action == Action::Delay {
                    windows.push(k.window.units(grid)?);
                }
            }
            let covered =
                |d: i64| windows.iter().any(|&(lo, hi)| d >= lo && hi.map_or(true, |h| d <= h));
            for d in 1..=cap_u {
                if !covered(d) {
                    out.push(TimedLabel::delay_point(grid.units_to_rational(d)));
                }
            }
            // The unbounded tail label fails to synchronize only when no
            // enabled window reaches the cap.
            let tail_clear = windows.iter().all(|&(_, hi)| hi.map_or(false, |h| h < cap_u));
            if tail_clear {
                out.push(TimedLabel::delay(Interval::from_units(grid, cap_u, None)));
            }
            Ok(out)
        }
    }
}

/// The maximal labels of the universe over the given alphabet.
fn universe_maximal(
    alphabet: &[Symbol],
    grid: &GridConfig,
    universe: &DelayUniverse,
) -> Result<Vec<TimedLabel>> {
    let mut out: Vec<TimedLabel> = alphabet.iter().map(|&a| TimedLabel::discrete(a)).collect();
    match universe {
        DelayUniverse::Full => {
            out.push(TimedLabel::delay(Interval::full()));
        }
        DelayUniverse::Points { cap } => {
            let cap_u = grid.to_units(*cap)?;
            for d in 1..=cap_u {
                out.push(TimedLabel::delay_point(grid.units_to_rational(d)));
            }
            out.push(TimedLabel::delay(Interval::from_units(grid, cap_u, None)));
        }
    }
    Ok(out)
}

/// Point delays up to the cap plus the unbounded tail window: the delay
/// alphabet of semantics-generated systems.
pub(crate) fn semantic_delays(grid: &GridConfig, cap_units: i64) -> Vec<TimedLabel> {
    let mut out = Vec::new();
    for d in 1..=cap_units {
        out.push(TimedLabel::delay_point(grid.units_to_rational(d)));
    }
    out.push(TimedLabel::delay(Interval::from_units(grid, cap_units, None)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{refinement_distance, GridSettings};
    use crate::refine::boolean_refines;

    fn dl(lo: i64, hi: i64) -> TimedLabel {
        TimedLabel::delay(
            Interval::new(Rational::from_integer(lo), Value::from_int(hi as u64)).unwrap(),
        )
    }

    fn act(s: u32) -> TimedLabel {
        TimedLabel::discrete(Symbol(s))
    }

    fn equivalent(a: &Smts, b: &Smts) -> bool {
        boolean_refines(a, b).holds() && boolean_refines(b, a).holds()
    }

    #[test]
    fn prune_examples() {
        let mut s = Smts::new(3);
        s.add_must_with_may(StateId(0), act(0), StateId(1));
        s.add_may(StateId(1), dl(0, 1), StateId(2));

        // Empty bad set: unchanged.
        let p = prune(&s, &[]).unwrap();
        assert_eq!(p, s);

        // Bad state reachable only through a may edge: removed, the
        // initial state survives.
        let p = prune(&s, &[StateId(2)]).unwrap();
        assert_eq!(p.n_states(), 2);

        // Must path into the bad set kills the initial state.
        assert!(prune(&s, &[StateId(1)]).is_none());
    }

    #[test]
    fn compose_with_universal_is_identity() {
        let mut s = Smts::new(3);
        s.add_must_with_may(StateId(0), act(0), StateId(1));
        s.add_must_with_may(StateId(1), dl(0, 2), StateId(2));
        s.add_may(StateId(2), act(1), StateId(0));
        let u = universal_system(&s.alphabet());
        let c = compose(&s, &u);
        assert!(equivalent(&c, &s));
    }

    #[test]
    fn compose_disjoint_actions_is_empty() {
        let mut a = Smts::new(2);
        a.add_may(StateId(0), act(0), StateId(1));
        let mut b = Smts::new(2);
        b.add_may(StateId(0), act(1), StateId(1));
        let c = compose(&a, &b);
        assert_eq!(c.n_states(), 1);
        assert!(c.may(StateId(0)).is_empty());
    }

    #[test]
    fn quotient_by_universal_is_identity() {
        let grid = GridConfig::unit(8, 8);
        let mut t = Smts::new(3);
        t.add_must_with_may(StateId(0), act(0), StateId(1));
        t.add_must_with_may(StateId(1), dl(0, 2), StateId(2));
        t.add_may(StateId(2), act(1), StateId(0));
        let u = universal_system(&t.alphabet());
        let q = quotient(&t, &u, &grid, &DelayUniverse::Full)
            .unwrap()
            .expect("quotient exists");
        assert!(equivalent(&q, &t));
    }

    #[test]
    fn quotient_adjunction_on_a_small_example() {
        let grid = GridConfig::unit(8, 8);
        // s: requires a get, then allows a delay within [0,2].
        let mut s = Smts::new(2);
        s.add_must_with_may(StateId(0), act(0), StateId(1));
        s.add_may(StateId(1), dl(0, 2), StateId(0));
        // t: the composed target.
        let mut t = Smts::new(2);
        t.add_must_with_may(StateId(0), act(0), StateId(1));
        t.add_may(StateId(1), dl(0, 1), StateId(0));
        assert!(s.is_deterministic());
        let q = quotient(&t, &s, &grid, &DelayUniverse::Full)
            .unwrap()
            .expect("quotient exists");
        // x ≤ t⧵⧵s implies s∥x ≤ t, instantiated with x = t⧵⧵s.
        let sx = compose(&s, &q);
        assert!(boolean_refines(&sx, &t).holds());
        let r = refinement_distance(&sx, &t, &GridSettings::default()).unwrap();
        assert_eq!(r.value, Value::zero());
    }

    #[test]
    fn quotient_unfulfillable_requirement_does_not_exist() {
        let grid = GridConfig::unit(8, 8);
        // t requires action 5 immediately; s has no must at all, so the
        // requirement cannot be delivered through the composition.
        let mut t = Smts::new(2);
        t.add_must_with_may(StateId(0), act(5), StateId(1));
        let mut s = Smts::new(1);
        s.add_may(StateId(0), act(0), StateId(0));
        assert!(quotient(&t, &s, &grid, &DelayUniverse::Full)
            .unwrap()
            .is_none());
    }

    #[test]
    fn conjoin_idempotent_on_deterministic() {
        let mut a = Smts::new(2);
        a.add_must_with_may(StateId(0), dl(1, 3), StateId(1));
        a.add_may(StateId(1), act(0), StateId(0));
        assert!(a.is_deterministic());
        let c = conjoin(&a, &a).expect("conjunction exists");
        assert!(equivalent(&c, &a));
    }

    #[test]
    fn conjoin_disjoint_requirements_do_not_exist() {
        let mut a = Smts::new(2);
        a.add_must_with_may(StateId(0), dl(0, 1), StateId(1));
        let mut b = Smts::new(2);
        b.add_must_with_may(StateId(0), dl(2, 3), StateId(1));
        assert!(conjoin(&a, &b).is_none());
    }

    #[test]
    fn conjoin_with_permissive_is_identity() {
        let mut a = Smts::new(2);
        a.add_must_with_may(StateId(0), dl(1, 3), StateId(1));
        a.add_may(StateId(1), act(0), StateId(0));
        let u = permissive_system(&a.alphabet());
        let c = conjoin(&a, &u).expect("conjunction exists");
        assert!(equivalent(&c, &a));
    }

    #[test]
    fn quotient_label_expansion_in_point_universe() {
        let grid = GridConfig::unit(8, 8);
        let u = DelayUniverse::Points {
            cap: Rational::from_integer(3),
        };
        let full = TimedLabel::delay(Interval::full());
        let got = expand_label(&full, &u, &grid).unwrap();
        assert_eq!(got.len(), 4); // points 1..3 plus the tail [3, ∞]
        let win =
            TimedLabel::delay(Interval::new(Rational::from_integer(2), Value::Infinity).unwrap());
        let got = expand_label(&win, &u, &grid).unwrap();
        assert_eq!(got.len(), 3); // 2, 3, tail
    }
}

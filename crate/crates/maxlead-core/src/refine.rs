//! Boolean modal refinement and the widening relation.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::label::{label_distance, TimedLabel};
use crate::lattice::LeadFunction;
use crate::smts::{Smts, StateId};

/// Which transfer clause a counterexample step refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    /// Allowed behavior of the left system that the right cannot allow.
    May,
    /// Required behavior of the right system that the left cannot require.
    Must,
}

/// One step of a counterexample path: at `pair`, the transition with
/// `label` (read per `clause`) has no surviving response. `response`
/// records the followed response pair while the failure is deeper, and is
/// `None` at the final step, where no response matches at all.
#[derive(Clone, Debug)]
pub struct CexStep {
    pub pair: (StateId, StateId),
    pub clause: Clause,
    pub label: TimedLabel,
    pub response: Option<(TimedLabel, (StateId, StateId))>,
}

/// Outcome of a refinement check: either the greatest refinement relation
/// (containing the initial pair) or a shortest failing path.
#[derive(Clone, Debug)]
pub enum RefinementWitness {
    Relation(Vec<(StateId, StateId)>),
    Counterexample(Vec<CexStep>),
}

impl RefinementWitness {
    pub fn holds(&self) -> bool {
        matches!(self, RefinementWitness::Relation(_))
    }
}

/// Checks `S ≤ T`: every may of `S` transfers rightward, every must of `T`
/// transfers leftward, coinductively. Computes the greatest refinement
/// relation by iterated pruning of the full product.
pub fn boolean_refines(s: &Smts, t: &Smts) -> RefinementWitness {
    let (ns, nt) = (s.n_states(), t.n_states());
    // removed_round[i] = 0 while alive; round number when pruned.
    let mut removed = vec![0u32; ns * nt];
    let idx = |a: StateId, b: StateId| a.index() * nt + b.index();

    let pair_ok = |a: StateId, b: StateId, removed: &[u32]| -> bool {
        for &(k, a2) in s.may(a) {
            let matched = t
                .may(b)
                .iter()
                .any(|&(l, b2)| k.refines(&l) && removed[idx(a2, b2)] == 0);
            if !matched {
                return false;
            }
        }
        for &(l, b2) in t.must(b) {
            let matched = s
                .must(a)
                .iter()
                .any(|&(k, a2)| k.refines(&l) && removed[idx(a2, b2)] == 0);
            if !matched {
                return false;
            }
        }
        true
    };

    // Two-phase rounds: removals only take effect at round end, so a pair
    // pruned at round r has a violating transition whose responses all died
    // strictly before r. The counterexample walk below relies on that.
    let mut round = 0u32;
    loop {
        round += 1;
        let mut doomed = Vec::new();
        for a in 0..ns {
            for b in 0..nt {
                let i = idx(StateId(a as u32), StateId(b as u32));
                if removed[i] == 0 && !pair_ok(StateId(a as u32), StateId(b as u32), &removed) {
                    doomed.push(i);
                }
            }
        }
        if doomed.is_empty() {
            break;
        }
        for i in doomed {
            removed[i] = round;
        }
    }

    if removed[idx(s.initial(), t.initial())] == 0 {
        let mut relation = Vec::new();
        for a in 0..ns {
            for b in 0..nt {
                if removed[a * nt + b] == 0 {
                    relation.push((StateId(a as u32), StateId(b as u32)));
                }
            }
        }
        return RefinementWitness::Relation(relation);
    }

    // Walk a failing chain: at a pair pruned in round r, some transition
    // has every matching response pruned in an earlier round; follow the
    // response that survived longest until a transition with no matching
    // response at all.
    let mut path = Vec::new();
    let mut pair = (s.initial(), t.initial());
    loop {
        let r = removed[idx(pair.0, pair.1)];
        debug_assert!(r > 0);
        let mut best: Option<(Clause, TimedLabel, Option<(TimedLabel, (StateId, StateId))>, u32)> =
            None;
        for &(k, a2) in s.may(pair.0) {
            let mut responses = t
                .may(pair.1)
                .iter()
                .filter(|&&(l, _)| k.refines(&l))
                .peekable();
            if responses.peek().is_none() {
                best = Some((Clause::May, k, None, 0));
                break;
            }
            let all_dead = responses.clone().all(|&(_, b2)| {
                let rr = removed[idx(a2, b2)];
                rr != 0 && rr < r
            });
            if all_dead {
                let (l, b2) = responses
                    .max_by_key(|&&(_, b2)| removed[idx(a2, b2)])
                    .copied()
                    .expect("nonempty");
                let rr = removed[idx(a2, b2)];
                if best.as_ref().map_or(true, |&(_, _, _, br)| rr > br) {
                    best = Some((Clause::May, k, Some((l, (a2, b2))), rr));
                }
            }
        }
        if !matches!(best, Some((_, _, None, _))) {
            for &(l, b2) in t.must(pair.1) {
                let mut responses = s
                    .must(pair.0)
                    .iter()
                    .filter(|&&(k, _)| k.refines(&l))
                    .peekable();
                if responses.peek().is_none() {
                    best = Some((Clause::Must, l, None, 0));
                    break;
                }
                let all_dead = responses.clone().all(|&(_, a2)| {
                    let rr = removed[idx(a2, b2)];
                    rr != 0 && rr < r
                });
                if all_dead {
                    let (k, a2) = responses
                        .max_by_key(|&&(_, a2)| removed[idx(a2, b2)])
                        .copied()
                        .expect("nonempty");
                    let rr = removed[idx(a2, b2)];
                    if best.as_ref().map_or(true, |&(_, _, _, br)| rr > br) {
                        best = Some((Clause::Must, k, Some((l, (a2, b2))), rr));
                    }
                }
            }
        }
        let (clause, label, response, _) =
            best.expect("a pruned pair has a violating transition");
        let next = response.as_ref().map(|&(_, p)| p);
        path.push(CexStep {
            pair,
            clause,
            label,
            response,
        });
        match next {
            Some(p) => pair = p,
            None => break,
        }
    }
    RefinementWitness::Counterexample(path)
}

/// Checks whether `t` is a widening of `s` within `bound`: a relation from
/// the initial pair under which may and must transitions correspond both
/// ways, with the `t` label wider than the `s` label and the label
/// distance from the wider to the narrower label within the bound.
///
/// The label distance between any two related labels grows with the lead
/// magnitude `|d|` no matter how close the labels are, so the bound is
/// read at lead zero and compared against the distance net of that
/// unavoidable part: a label pair is admissible when
/// `dist(l → k)(d) ≤ |d| + bound(0)` at every lead. A system is a
/// 0-widening of itself, and widening every delay window by `n` yields an
/// `n`-widening.
pub fn is_widening(s: &Smts, t: &Smts, bound: &LeadFunction) -> Result<bool> {
    let grid = bound.grid().clone();
    let bot = LeadFunction::bottom(&grid);
    let budget = bound.eval_zero();
    let mut cache: BTreeMap<(TimedLabel, TimedLabel), bool> = BTreeMap::new();
    let mut admissible = |k: &TimedLabel, l: &TimedLabel| -> Result<bool> {
        if let Some(&b) = cache.get(&(*k, *l)) {
            return Ok(b);
        }
        let ok = if k.refines(l) {
            match budget {
                crate::value::Value::Infinity => true,
                crate::value::Value::Finite(b0) => {
                    let dist = label_distance(l, k, &bot)?;
                    let mut ok = true;
                    for (lead, v) in dist.iter() {
                        let abs = if lead < crate::value::Rational::from_integer(0) {
                            -lead
                        } else {
                            lead
                        };
                        // Entries whose allowance reaches the cap are
                        // saturated; nothing to compare there.
                        if abs + b0 >= grid.value_cap() {
                            continue;
                        }
                        if v > crate::value::Value::finite(abs + b0) {
                            ok = false;
                            break;
                        }
                    }
                    ok
                }
            }
        } else {
            false
        };
        cache.insert((*k, *l), ok);
        Ok(ok)
    };

    let (ns, nt) = (s.n_states(), t.n_states());
    let mut alive = vec![true; ns * nt];
    let idx = |a: usize, b: usize| a * nt + b;
    loop {
        let mut changed = false;
        for a in 0..ns {
            for b in 0..nt {
                if !alive[idx(a, b)] {
                    continue;
                }
                let sa = StateId(a as u32);
                let tb = StateId(b as u32);
                let mut ok = true;
                // Both directions, for both transition kinds.
                for &(k, a2) in s.may(sa) {
                    let mut any = false;
                    for &(l, b2) in t.may(tb) {
                        if alive[idx(a2.index(), b2.index())] && admissible(&k, &l)? {
                            any = true;
                            break;
                        }
                    }
                    if !any {
                        ok = false;
                    }
                }
                if ok {
                    for &(l, b2) in t.may(tb) {
                        let mut any = false;
                        for &(k, a2) in s.may(sa) {
                            if alive[idx(a2.index(), b2.index())] && admissible(&k, &l)? {
                                any = true;
                                break;
                            }
                        }
                        if !any {
                            ok = false;
                        }
                    }
                }
                if ok {
                    for &(k, a2) in s.must(sa) {
                        let mut any = false;
                        for &(l, b2) in t.must(tb) {
                            if alive[idx(a2.index(), b2.index())] && admissible(&k, &l)? {
                                any = true;
                                break;
                            }
                        }
                        if !any {
                            ok = false;
                        }
                    }
                }
                if ok {
                    for &(l, b2) in t.must(tb) {
                        let mut any = false;
                        for &(k, a2) in s.must(sa) {
                            if alive[idx(a2.index(), b2.index())] && admissible(&k, &l)? {
                                any = true;
                                break;
                            }
                        }
                        if !any {
                            ok = false;
                        }
                    }
                }
                if !ok {
                    alive[idx(a, b)] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(alive[idx(s.initial().index(), t.initial().index())])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::{Interval, Symbol, TimedLabel};
    use crate::lattice::GridConfig;
    use crate::value::{Rational, Value};

    fn dl(lo: i64, hi: i64) -> TimedLabel {
        TimedLabel::delay(
            Interval::new(Rational::from_integer(lo), Value::from_int(hi as u64)).unwrap(),
        )
    }

    #[test]
    fn reflexive_refinement() {
        let mut s = Smts::new(2);
        s.add_must_with_may(StateId(0), dl(0, 2), StateId(1));
        s.add_may(StateId(1), TimedLabel::discrete(Symbol(0)), StateId(0));
        let w = boolean_refines(&s, &s);
        assert!(w.holds());
    }

    #[test]
    fn window_widening_refines() {
        let mut narrow = Smts::new(2);
        narrow.add_must_with_may(StateId(0), dl(1, 2), StateId(1));
        let mut wide = Smts::new(2);
        wide.add_must_with_may(StateId(0), dl(0, 3), StateId(1));
        assert!(boolean_refines(&narrow, &wide).holds());
        assert!(!boolean_refines(&wide, &narrow).holds());
    }

    #[test]
    fn counterexample_path_ends_without_response() {
        // Left may do an action the right never allows, one step deep.
        let mut l = Smts::new(2);
        l.add_may(StateId(0), dl(0, 1), StateId(1));
        l.add_may(StateId(1), TimedLabel::discrete(Symbol(5)), StateId(1));
        let mut r = Smts::new(2);
        r.add_may(StateId(0), dl(0, 1), StateId(1));
        let w = boolean_refines(&l, &r);
        match w {
            RefinementWitness::Counterexample(path) => {
                assert!(!path.is_empty());
                let last = path.last().unwrap();
                assert!(last.response.is_none());
            }
            RefinementWitness::Relation(_) => panic!("refinement should fail"),
        }
    }

    #[test]
    fn unmatched_must_fails() {
        // Right requires an action the left does not require.
        let mut l = Smts::new(2);
        l.add_may(StateId(0), dl(0, 1), StateId(1));
        let mut r = Smts::new(2);
        r.add_must_with_may(StateId(0), dl(0, 1), StateId(1));
        let w = boolean_refines(&l, &r);
        assert!(!w.holds());
        if let RefinementWitness::Counterexample(path) = w {
            assert!(matches!(path[0].clause, Clause::Must));
        }
    }

    #[test]
    fn widening_relation() {
        let grid = GridConfig::unit(8, 8);
        let mut s = Smts::new(2);
        s.add_must_with_may(StateId(0), dl(1, 2), StateId(1));
        s.add_may(StateId(1), TimedLabel::discrete(Symbol(0)), StateId(0));

        // Zero widening relates a system to itself.
        let zero = LeadFunction::bottom(&grid);
        assert!(is_widening(&s, &s, &zero).unwrap());

        // Widening every delay label by one is a 1-widening but not a
        // 0-widening.
        let w = s.widen_labels(Rational::from_integer(1));
        let one = LeadFunction::constant(&grid, Value::from_int(1)).unwrap();
        assert!(is_widening(&s, &w, &one).unwrap());
        assert!(!is_widening(&s, &w, &zero).unwrap());
        // Widening implies Boolean refinement.
        assert!(boolean_refines(&s, &w).holds());

        // A system with an extra action is not a widening at any bound.
        let mut extra = s.clone();
        extra.add_may(StateId(0), TimedLabel::discrete(Symbol(9)), StateId(0));
        let top = LeadFunction::top(&grid);
        assert!(!is_widening(&s, &extra, &top).unwrap());
    }
}

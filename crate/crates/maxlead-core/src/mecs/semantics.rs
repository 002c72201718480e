//! Finitized interval-timed semantics of event-clock specifications.
//!
//! A semantic state is a location paired with a capped valuation of the
//! *relevant* clocks (those with a non-trivial bound in some guard;
//! untracked clocks never influence enabledness). Action transitions
//! follow enabled edges and reset the acted clock; delay transitions,
//! both may and must, exist at every state.
//!
//! Delays are finitized against the clock cap. In point mode every grid
//! duration up to the cap is a separate point-labeled transition, and one
//! unbounded tail window `[cap, ∞]` covers all longer delays (they all
//! reach the same absorbed valuation once every clock exceeds the cap).
//! The tail window is what lets a follower cancel an accumulated lead by
//! over-delaying, as it could with unboundedly many real delays. Interval
//! mode additionally emits every grid window below the cap and every
//! unbounded window; it explores the interval-valuation state space and
//! exists to audit the point-mode finitization.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::label::{Interval, Symbol, TimedLabel};
use crate::mecs::{LocId, Mecs, MecsEdge};
use crate::smts::{Smts, StateId};
use crate::value::{Rational, Value};

/// How delay transitions are finitized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DelayMode {
    /// Point delays per grid duration plus the unbounded tail window.
    Point,
    /// All grid windows below the cap plus all unbounded windows.
    Interval,
}

/// Capped per-clock value range in grid units; a component touching the
/// cap reads as unbounded above.
type Valuation = Vec<(i64, i64)>;

/// Guard intervals per relevant clock, in grid units (`None` = ∞).
type GuardU = Vec<(i64, Option<i64>)>;

/// Expands a specification into its finitized timed modal transition
/// system with default clock naming.
pub fn semantics(
    a: &Mecs,
    step: Rational,
    clock_cap: u32,
    mode: DelayMode,
    max_states: usize,
) -> Result<Smts> {
    semantics_with(a, step, clock_cap, mode, max_states, &|c| {
        format!("k{}", c.0)
    })
}

/// [`semantics`] with caller-supplied clock names for the state labels.
/// `clock_cap` must be at least every guard constant; reachable states
/// beyond `max_states` raise a budget error.
pub fn semantics_with(
    a: &Mecs,
    step: Rational,
    clock_cap: u32,
    mode: DelayMode,
    max_states: usize,
    clock_name: &dyn Fn(Symbol) -> String,
) -> Result<Smts> {
    let cap = Rational::from_integer(clock_cap as i64);
    if a.max_constant() > cap {
        return Err(Error::Config(
            "clock cap below a guard constant of the specification".into(),
        ));
    }
    let cap_q = cap / step;
    if !cap_q.is_integer() {
        return Err(Error::Config(
            "clock cap is not aligned to the grid step".into(),
        ));
    }
    let cap_u = cap_q.to_integer();
    if cap_u <= 0 {
        return Err(Error::Config("clock cap must be positive".into()));
    }

    let relevant = a.relevant_clocks();
    let mut exp = Expander {
        spec: a,
        step,
        cap,
        cap_u,
        relevant,
        mode,
        max_states,
        clock_name,
        out: Smts::with_names(vec![String::new()], StateId(0)),
        index: BTreeMap::new(),
        frontier: Vec::new(),
        may_units: Vec::new(),
        must_units: Vec::new(),
    };
    exp.run()
}

struct Expander<'a> {
    spec: &'a Mecs,
    step: Rational,
    cap: Rational,
    cap_u: i64,
    relevant: Vec<Symbol>,
    mode: DelayMode,
    max_states: usize,
    clock_name: &'a dyn Fn(Symbol) -> String,
    out: Smts,
    index: BTreeMap<(LocId, Valuation), StateId>,
    frontier: Vec<(LocId, Valuation)>,
    may_units: Vec<Vec<(Symbol, GuardU, LocId)>>,
    must_units: Vec<Vec<(Symbol, GuardU, LocId)>>,
}

impl<'a> Expander<'a> {
    fn run(&mut self) -> Result<Smts> {
        for q in 0..self.spec.n_locations() {
            let may = self
                .spec
                .may(LocId(q as u32))
                .iter()
                .map(|e| Ok((e.action, self.guard_units(e)?, e.target)))
                .collect::<Result<Vec<_>>>()?;
            let must = self
                .spec
                .must(LocId(q as u32))
                .iter()
                .map(|e| Ok((e.action, self.guard_units(e)?, e.target)))
                .collect::<Result<Vec<_>>>()?;
            self.may_units.push(may);
            self.must_units.push(must);
        }

        let zero: Valuation = vec![(0, 0); self.relevant.len()];
        let root = (self.spec.initial(), zero);
        let name = self.state_name(&root);
        self.out = Smts::with_names(vec![name], StateId(0));
        self.index.insert(root.clone(), StateId(0));
        self.frontier.push(root);

        while let Some((q, v)) = self.frontier.pop() {
            let from = self.index[&(q, v.clone())];
            self.action_steps(from, q, &v)?;
            self.delay_steps(from, q, &v)?;
        }
        Ok(core::mem::replace(
            &mut self.out,
            Smts::with_names(vec![String::new()], StateId(0)),
        ))
    }

    fn guard_units(&self, e: &MecsEdge) -> Result<GuardU> {
        self.relevant
            .iter()
            .map(|&c| {
                let w = e.guard.get(c);
                let lo_q = w.lo() / self.step;
                if !lo_q.is_integer() {
                    return Err(Error::Config(
                        "guard constant is not aligned to the grid step".into(),
                    ));
                }
                let hi = match w.hi() {
                    Value::Infinity => None,
                    Value::Finite(h) => {
                        let q = h / self.step;
                        if !q.is_integer() {
                            return Err(Error::Config(
                                "guard constant is not aligned to the grid step".into(),
                            ));
                        }
                        Some(q.to_integer())
                    }
                };
                Ok((lo_q.to_integer(), hi))
            })
            .collect()
    }

    /// Possible satisfaction of a unit guard by a capped valuation: per
    /// clock the value range meets the guard interval. A range touching
    /// the cap is unbounded above. Allowed behavior uses this reading.
    fn sat(&self, v: &Valuation, g: &GuardU) -> bool {
        v.iter().zip(g.iter()).all(|(&(lo, hi), &(glo, ghi))| {
            let lower = lo.max(glo);
            let upper_v = if hi >= self.cap_u { None } else { Some(hi) };
            match (upper_v, ghi) {
                (None, None) => true,
                (Some(h), None) => lower <= h,
                (None, Some(gh)) => lower <= gh,
                (Some(h), Some(gh)) => lower <= h.min(gh),
            }
        })
    }

    /// Guaranteed satisfaction: the whole value range lies inside the
    /// guard interval. Required behavior uses this reading: a requirement
    /// is only imposed where the guard certainly holds, whatever the
    /// actual clock reading within the range turns out to be. On point
    /// valuations the two readings coincide.
    fn sat_all(&self, v: &Valuation, g: &GuardU) -> bool {
        v.iter().zip(g.iter()).all(|(&(lo, hi), &(glo, ghi))| {
            if lo < glo {
                return false;
            }
            match ghi {
                None => true,
                // A range touching the cap is unbounded above and cannot
                // certainly satisfy a finite bound (guard constants lie
                // strictly below the cap).
                Some(gh) => hi < self.cap_u && hi <= gh,
            }
        })
    }

    fn intern(&mut self, key: (LocId, Valuation)) -> Result<StateId> {
        if let Some(&id) = self.index.get(&key) {
            return Ok(id);
        }
        if self.index.len() >= self.max_states {
            return Err(Error::Budget(format!(
                "semantics exceeded the state budget of {}",
                self.max_states
            )));
        }
        let name = self.state_name(&key);
        let id = self.out.add_state(name);
        self.index.insert(key.clone(), id);
        self.frontier.push(key);
        Ok(id)
    }

    fn action_steps(&mut self, from: StateId, q: LocId, v: &Valuation) -> Result<()> {
        for required in [false, true] {
            let edges = if required {
                self.must_units[q.index()].clone()
            } else {
                self.may_units[q.index()].clone()
            };
            for (action, g, target) in edges {
                let enabled = if required {
                    self.sat_all(v, &g)
                } else {
                    self.sat(v, &g)
                };
                if !enabled {
                    continue;
                }
                let mut v2 = v.clone();
                if let Some(pos) = self.relevant.iter().position(|&r| r == action) {
                    v2[pos] = (0, 0);
                }
                let to = self.intern((target, v2))?;
                let label = TimedLabel::discrete(action);
                if required {
                    self.out.add_must_with_may(from, label, to);
                } else {
                    self.out.add_may(from, label, to);
                }
            }
        }
        Ok(())
    }

    fn delay_steps(&mut self, from: StateId, q: LocId, v: &Valuation) -> Result<()> {
        let cap_u = self.cap_u;
        let bump = |x: i64, d: i64| (x + d).min(cap_u);
        match self.mode {
            DelayMode::Point => {
                for d in 1..=cap_u {
                    let v2: Valuation =
                        v.iter().map(|&(lo, hi)| (bump(lo, d), bump(hi, d))).collect();
                    let label =
                        TimedLabel::delay_point(self.step * Rational::from_integer(d));
                    let to = self.intern((q, v2))?;
                    self.out.add_must_with_may(from, label, to);
                }
                let v2: Valuation = v.iter().map(|_| (cap_u, cap_u)).collect();
                let label =
                    TimedLabel::delay(Interval::new(self.cap, Value::Infinity).unwrap());
                let to = self.intern((q, v2))?;
                self.out.add_must_with_may(from, label, to);
            }
            DelayMode::Interval => {
                for l in 0..=cap_u {
                    for r in l..=cap_u {
                        if l == 0 && r == 0 {
                            continue;
                        }
                        let v2: Valuation = v
                            .iter()
                            .map(|&(lo, hi)| (bump(lo, l), bump(hi, r)))
                            .collect();
                        let label = TimedLabel::delay(
                            Interval::new(
                                self.step * Rational::from_integer(l),
                                Value::finite(self.step * Rational::from_integer(r)),
                            )
                            .unwrap(),
                        );
                        let to = self.intern((q, v2))?;
                        self.out.add_must_with_may(from, label, to);
                    }
                    let v2: Valuation =
                        v.iter().map(|&(lo, _)| (bump(lo, l), cap_u)).collect();
                    let label = TimedLabel::delay(
                        Interval::new(
                            self.step * Rational::from_integer(l),
                            Value::Infinity,
                        )
                        .unwrap(),
                    );
                    let to = self.intern((q, v2))?;
                    self.out.add_must_with_may(from, label, to);
                }
            }
        }
        Ok(())
    }

    fn state_name(&self, key: &(LocId, Valuation)) -> String {
        let (q, v) = key;
        let mut name = String::from(self.spec.name(*q));
        for (i, &(lo, hi)) in v.iter().enumerate() {
            name.push(if i == 0 { '·' } else { ',' });
            name.push_str(&(self.clock_name)(self.relevant[i]));
            name.push('=');
            let render = |x: i64| format!("{}", self.step * Rational::from_integer(x));
            if lo >= self.cap_u {
                name.push_str(&format!("{}+", render(self.cap_u)));
            } else if lo == hi {
                name.push_str(&render(lo));
            } else if hi >= self.cap_u {
                name.push_str(&format!("{}..", render(lo)));
            } else {
                name.push_str(&format!("{}..{}", render(lo), render(hi)));
            }
        }
        name
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Action;
    use crate::mecs::ClockConstraint;

    const GET: Symbol = Symbol(0);
    const GRANT: Symbol = Symbol(1);
    const EXTRA: Symbol = Symbol(2);

    fn le(c: Symbol, k: i64) -> ClockConstraint {
        ClockConstraint::top()
            .with(
                c,
                Interval::new(Rational::from_integer(0), Value::from_int(k as u64)).unwrap(),
            )
            .unwrap()
    }

    /// Three-location resource specification: required get, required
    /// grant while the get clock is at most 2, and an optional detour
    /// granting later (get clock at most 5).
    fn resource() -> Mecs {
        let mut m = Mecs::new(vec![GET, GRANT, EXTRA], 3);
        m.add_must_with_may(LocId(0), GET, ClockConstraint::top(), LocId(1));
        m.add_must_with_may(LocId(1), GRANT, le(GET, 2), LocId(0));
        m.add_may(LocId(1), EXTRA, ClockConstraint::top(), LocId(2));
        m.add_must_with_may(LocId(2), GRANT, le(GET, 5), LocId(0));
        m
    }

    #[test]
    fn single_location_no_edges_is_a_delay_clock() {
        let m = Mecs::new(vec![GET], 1);
        let s = semantics(&m, Rational::from_integer(1), 3, DelayMode::Point, 1000).unwrap();
        // No guards: no relevant clocks, so delays self-loop on one state.
        assert_eq!(s.n_states(), 1);
        // Delays 1..3 plus the unbounded tail, each may and must.
        assert_eq!(s.may(StateId(0)).len(), 4);
        assert_eq!(s.must(StateId(0)).len(), 4);
    }

    #[test]
    fn resource_semantics_contains_the_grant_trace() {
        let m = resource();
        let s = semantics(&m, Rational::from_integer(1), 6, DelayMode::Point, 10_000).unwrap();
        // Follow get, delay 2, grant from the initial state.
        let from = s.initial();
        let (_, after_get) = s
            .must(from)
            .iter()
            .find(|(l, _)| l.action == Action::Discrete(GET))
            .copied()
            .expect("get is required");
        let two = TimedLabel::delay_point(Rational::from_integer(2));
        let (_, after_delay) = s
            .must(after_get)
            .iter()
            .find(|(l, _)| *l == two)
            .copied()
            .expect("delay 2 exists");
        assert!(s
            .must(after_delay)
            .iter()
            .any(|(l, _)| l.action == Action::Discrete(GRANT)));
    }

    #[test]
    fn grant_disabled_after_delay_three() {
        let m = resource();
        let s = semantics(&m, Rational::from_integer(1), 6, DelayMode::Point, 10_000).unwrap();
        let from = s.initial();
        let (_, after_get) = s
            .must(from)
            .iter()
            .find(|(l, _)| l.action == Action::Discrete(GET))
            .copied()
            .unwrap();
        let three = TimedLabel::delay_point(Rational::from_integer(3));
        let (_, after_delay) = s
            .must(after_get)
            .iter()
            .find(|(l, _)| *l == three)
            .copied()
            .unwrap();
        // The required grant needs the get clock at most 2; only the
        // optional detour remains.
        assert!(!s
            .must(after_delay)
            .iter()
            .any(|(l, _)| l.action == Action::Discrete(GRANT)));
        assert!(s
            .may(after_delay)
            .iter()
            .any(|(l, _)| l.action == Action::Discrete(EXTRA)));
    }

    #[test]
    fn semantics_is_consistent_and_small() {
        let m = resource();
        let s = semantics(&m, Rational::from_integer(1), 6, DelayMode::Point, 10_000).unwrap();
        assert!(s.is_consistent());
        // One relevant clock only: the state space stays small.
        assert!(s.n_states() <= 3 * 7);
    }

    #[test]
    fn budget_errors_propagate() {
        let m = resource();
        assert!(matches!(
            semantics(&m, Rational::from_integer(1), 6, DelayMode::Point, 3),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn interval_mode_expands_windows() {
        let m = Mecs::new(vec![GET], 1);
        let s = semantics(&m, Rational::from_integer(1), 2, DelayMode::Interval, 1000).unwrap();
        // Bounded windows over {0,1,2} except [0,0] plus the unbounded
        // tails [0,∞], [1,∞], [2,∞].
        assert_eq!(s.may(StateId(0)).len(), 8);
    }

    #[test]
    fn half_step_semantics() {
        let m = resource();
        let s = semantics(&m, Rational::new(1, 2), 6, DelayMode::Point, 100_000).unwrap();
        assert!(s.is_consistent());
        // Twice the delay resolution.
        assert!(s.n_states() <= 3 * 13);
    }
}

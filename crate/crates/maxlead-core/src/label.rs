//! Interval-timed labels and their operators.
//!
//! Labels are either a discrete action paired with the point window `[0,0]`
//! or the delay symbol `δ` paired with a closed extended interval. The
//! refinement order is window containment on equal actions; implementation
//! labels are exactly the point-window labels.
//!
//! This module provides the label-level machinery the system operations
//! build on: the refinement order, grid implementation sets, the
//! maximum-lead distance lift between labels, synchronization (`compose`),
//! the six-case interval quotient, conjunction, widening, and the
//! complement sets used to finitely encode universal behavior.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{GridConfig, LeadFunction, INF};
use crate::value::{Rational, Value};

/// Interned discrete action symbol. Name resolution lives with the caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u32);

/// Either a discrete action or the passage-of-time symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Discrete(Symbol),
    Delay,
}

/// Closed extended non-negative interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    lo: Rational,
    hi: Value,
}

impl Interval {
    pub fn new(lo: Rational, hi: Value) -> Result<Interval> {
        if lo < Rational::zero() {
            return Err(Error::Config("interval endpoints are non-negative".into()));
        }
        if Value::finite(lo) > hi {
            return Err(Error::Config("interval lower bound exceeds upper bound".into()));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(at: Rational) -> Interval {
        Interval {
            lo: at,
            hi: Value::finite(at),
        }
    }

    pub fn zero() -> Interval {
        Interval::point(Rational::zero())
    }

    pub fn full() -> Interval {
        Interval {
            lo: Rational::zero(),
            hi: Value::Infinity,
        }
    }

    pub fn lo(&self) -> Rational {
        self.lo
    }

    pub fn hi(&self) -> Value {
        self.hi
    }

    pub fn is_point(&self) -> bool {
        Value::finite(self.lo) == self.hi
    }

    /// Containment: `self ⊆ other`.
    pub fn subset_of(&self, other: &Interval) -> bool {
        self.lo >= other.lo && self.hi <= other.hi
    }

    /// Intersection, `None` when empty.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if Value::finite(lo) <= hi {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }

    /// Interval endpoints in grid units: `(lo, hi)` with `None` for ∞.
    pub(crate) fn units(&self, grid: &GridConfig) -> Result<(i64, Option<i64>)> {
        let lo = grid.to_units(self.lo)?;
        let hi = match self.hi {
            Value::Infinity => None,
            Value::Finite(r) => Some(grid.to_units(r)?),
        };
        Ok((lo, hi))
    }

    pub(crate) fn from_units(grid: &GridConfig, lo: i64, hi: Option<i64>) -> Interval {
        Interval {
            lo: grid.units_to_rational(lo),
            hi: match hi {
                None => Value::Infinity,
                Some(h) => Value::finite(grid.units_to_rational(h)),
            },
        }
    }
}

/// A specification label: action plus timing window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimedLabel {
    pub action: Action,
    pub window: Interval,
}

impl TimedLabel {
    /// Discrete action label; the window is pinned to `[0,0]`.
    pub fn discrete(sym: Symbol) -> TimedLabel {
        TimedLabel {
            action: Action::Discrete(sym),
            window: Interval::zero(),
        }
    }

    pub fn delay(window: Interval) -> TimedLabel {
        TimedLabel {
            action: Action::Delay,
            window,
        }
    }

    pub fn delay_point(at: Rational) -> TimedLabel {
        TimedLabel::delay(Interval::point(at))
    }

    /// Implementation labels are those whose window is a single point.
    pub fn is_implementation(&self) -> bool {
        self.window.is_point()
    }

    /// The refinement order: same action, contained window.
    pub fn refines(&self, other: &TimedLabel) -> bool {
        self.action == other.action && self.window.subset_of(&other.window)
    }
}

/// All grid implementation labels refining `k`. Infinite upper endpoints
/// are truncated at the grid's value cap (extended so the set is never
/// empty even for windows entirely above the cap).
pub fn implementations(k: &TimedLabel, grid: &GridConfig) -> Result<Vec<TimedLabel>> {
    let (lo, hi) = k.window.units(grid)?;
    let hi = match hi {
        Some(h) => h,
        None => lo.max(grid.cap_units() as i64),
    };
    Ok((lo..=hi)
        .map(|u| TimedLabel {
            action: k.action,
            window: Interval::point(grid.units_to_rational(u)),
        })
        .collect())
}

/// CSP-style synchronization: equal actions, window intersection.
/// `None` means the labels do not synchronize; partiality is a value here.
pub fn compose(k: &TimedLabel, l: &TimedLabel) -> Option<TimedLabel> {
    if k.action != l.action {
        return None;
    }
    let window = k.window.intersect(&l.window)?;
    Some(TimedLabel {
        action: k.action,
        window,
    })
}

/// Label conjunction coincides with synchronization for timed labels:
/// both constrain the shared timing.
pub fn conjoin(k: &TimedLabel, l: &TimedLabel) -> Option<TimedLabel> {
    compose(k, l)
}

/// The interval quotient `l ⊘ k`: the largest label `m` with
/// `compose(k, m)` defined and refining `l`, when one exists.
///
/// On windows `l = [l', r']`, `k = [l, r]` the six cases are
///
/// * `l < l' ≤ r ≤ r'` → `[l', ∞]`
/// * `l < l' ≤ r' < r` → `[l', r']`
/// * `l ≤ r < l' ≤ r'` → undefined
/// * `l' ≤ l ≤ r ≤ r'` → `[0, ∞]`
/// * `l' ≤ l ≤ r' < r` → `[0, r']`
/// * `l' ≤ r' < l ≤ r` → undefined
///
/// For discrete actions the result window is clamped back to `[0,0]`,
/// the only window a discrete label may carry.
pub fn quotient(l: &TimedLabel, k: &TimedLabel) -> Option<TimedLabel> {
    if k.action != l.action {
        return None;
    }
    let window = interval_quotient(&l.window, &k.window)?;
    let window = match k.action {
        Action::Discrete(_) => Interval::zero(),
        Action::Delay => window,
    };
    Some(TimedLabel {
        action: k.action,
        window,
    })
}

/// The window part of the quotient: the largest interval `m` with
/// `k ∩ m` nonempty and contained in `l`, per the six cases.
pub fn interval_quotient(l: &Interval, k: &Interval) -> Option<Interval> {
    let (klo, khi) = (k.lo, k.hi);
    let (llo, lhi) = (l.lo, l.hi);
    if klo < llo {
        if Value::finite(llo) <= khi {
            if khi <= lhi {
                Some(Interval {
                    lo: llo,
                    hi: Value::Infinity,
                })
            } else {
                Some(Interval { lo: llo, hi: lhi })
            }
        } else {
            None
        }
    } else if khi <= lhi {
        Some(Interval::full())
    } else if Value::finite(klo) <= lhi {
        Some(Interval {
            lo: Rational::zero(),
            hi: lhi,
        })
    } else {
        None
    }
}

/// Widens a delay window by `n` on both sides, clamping the lower end at
/// zero. Discrete labels are unchanged (their window is pinned).
pub fn widen(k: &TimedLabel, n: Rational) -> TimedLabel {
    match k.action {
        Action::Discrete(_) => *k,
        Action::Delay => {
            let lo = (k.window.lo - n).max(Rational::zero());
            let hi = match k.window.hi {
                Value::Infinity => Value::Infinity,
                Value::Finite(r) => Value::finite(r + n),
            };
            TimedLabel::delay(Interval { lo, hi })
        }
    }
}

/// Distance bound for synchronized labels: the pointwise maximum.
pub fn compose_bound(a: &LeadFunction, b: &LeadFunction) -> Result<LeadFunction> {
    a.max(b)
}

/// Relaxed distance bound for conjunction after widening by `beta`/`gamma`:
/// `max(a, b) ⊕ max(beta, gamma)`.
pub fn conjoin_relaxed_bound(
    beta: &LeadFunction,
    gamma: &LeadFunction,
    a: &LeadFunction,
    b: &LeadFunction,
) -> Result<LeadFunction> {
    a.max(b)?.add(&beta.max(gamma)?)
}

/// Maximal labels that fail to synchronize with every enabled label.
///
/// Per discrete action the result contains `(a, [0,0])` when nothing on
/// `a` is enabled. For delays the result is the grid-closed complement of
/// the union of the enabled delay windows, with a trailing unbounded
/// segment when the union has a finite upper end.
pub fn complement(
    enabled: &[TimedLabel],
    alphabet: &[Symbol],
    grid: &GridConfig,
) -> Result<Vec<TimedLabel>> {
    let mut out = Vec::new();
    for &sym in alphabet {
        let any = enabled
            .iter()
            .any(|k| k.action == Action::Discrete(sym));
        if !any {
            out.push(TimedLabel::discrete(sym));
        }
    }
    let mut windows: Vec<(i64, Option<i64>)> = Vec::new();
    for k in enabled {
        if k.action == Action::Delay {
            windows.push(k.window.units(grid)?);
        }
    }
    for (lo, hi) in delay_gaps(&mut windows) {
        out.push(TimedLabel::delay(Interval::from_units(grid, lo, hi)));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Gaps in `[0, ∞)` not covered by the union of the given unit windows,
/// as maximal closed grid intervals (`None` upper bound = ∞).
pub(crate) fn delay_gaps(windows: &mut Vec<(i64, Option<i64>)>) -> Vec<(i64, Option<i64>)> {
    windows.sort();
    let mut gaps = Vec::new();
    // `next` is the smallest unit not yet known to be covered.
    let mut next: i64 = 0;
    for &(lo, hi) in windows.iter() {
        if lo > next {
            gaps.push((next, Some(lo - 1)));
        }
        match hi {
            None => return gaps,
            Some(h) => next = next.max(h + 1),
        }
    }
    gaps.push((next, None));
    gaps
}

/// The maximum-lead distance between two implementation labels, relative
/// to a table `alpha` of future distances per lead: infinite on an action
/// mismatch, otherwise `λd. max(|d+t−t'|, alpha(d+t−t'))`.
pub fn point_distance(
    m: &TimedLabel,
    n: &TimedLabel,
    alpha: &LeadFunction,
) -> Result<LeadFunction> {
    label_distance(m, n, alpha)
}

/// The Hausdorff lift of [`point_distance`] to specification labels:
/// `sup` over implementations of `k` of the `inf` over implementations of
/// `l`. Windows must be grid-aligned. Equal to [`point_distance`] on
/// implementation labels.
pub fn label_distance(
    k: &TimedLabel,
    l: &TimedLabel,
    alpha: &LeadFunction,
) -> Result<LeadFunction> {
    let grid = alpha.grid().clone();
    let len = grid.table_len();
    if k.action != l.action {
        return Ok(LeadFunction::top(&grid));
    }
    let kw = k.window.units(&grid)?;
    let lw = l.window.units(&grid)?;
    let gt = GTable::new(alpha.units(), &grid);
    let mut out = vec![INF; len];
    let mut scratch = FScratch::default();
    f_units_into(&mut out, kw, lw, &gt, &grid, &mut scratch);
    Ok(LeadFunction::from_units(&grid, out))
}

/// `g(x) = max(|x|, alpha(x))` over the lead grid, with its prefix minima.
pub(crate) struct GTable {
    pub g: Vec<u64>,
    pub prefix_min: Vec<u64>,
}

impl GTable {
    pub(crate) fn new(alpha_units: &[u64], grid: &GridConfig) -> GTable {
        let n = grid.lead_units();
        let mut g = Vec::with_capacity(alpha_units.len());
        for (i, &a) in alpha_units.iter().enumerate() {
            let abs = (i as i64 - n).unsigned_abs();
            let abs = grid.saturate(abs);
            g.push(if a == INF || abs == INF { INF } else { a.max(abs) });
        }
        let mut prefix_min = Vec::with_capacity(g.len());
        let mut m = INF;
        for &v in &g {
            m = m.min(v);
            prefix_min.push(m);
        }
        GTable { g, prefix_min }
    }
}

#[derive(Default)]
pub(crate) struct FScratch {
    h: Vec<u64>,
    deque: VecDeque<(i64, u64)>,
}

/// Fills `out` with the label-distance table for windows `kw` (the refining,
/// sup side) and `lw` (the refined, inf side), both in grid units with
/// `None` = ∞ upper ends.
///
/// The three window shapes are handled exactly:
/// * `lw` unbounded: the inner infimum over `t'` only grows with `t`, so the
///   supremum is attained at the window start and the result is a prefix
///   minimum of `g`.
/// * `kw` unbounded, `lw` bounded: the supremum diverges; the table is ⊤.
/// * both bounded: two sliding-window passes (min over `t'`, max over `t`).
pub(crate) fn f_units_into(
    out: &mut [u64],
    kw: (i64, Option<i64>),
    lw: (i64, Option<i64>),
    gt: &GTable,
    grid: &GridConfig,
    scratch: &mut FScratch,
) {
    let w = grid.table_len() as i64;
    let n = grid.lead_units();
    debug_assert_eq!(out.len(), w as usize);
    let (a1, b1) = kw;
    let (a2, b2) = lw;
    match (b1, b2) {
        (_, None) => {
            // out[i] = min g over x ≤ (i − n) + a1 − a2.
            for i in 0..w {
                let idx = i + a1 - a2;
                out[i as usize] = if idx < 0 {
                    INF
                } else {
                    gt.prefix_min[(idx.min(w - 1)) as usize]
                };
            }
        }
        (None, Some(_)) => {
            out.fill(INF);
        }
        (Some(b1), Some(b2)) => {
            // H(j) = min over x ∈ [j−b2, j−a2] of g(x), for j = d + t + n
            // ranging over [a1, w−1+b1]; then out[i] = max over
            // j ∈ [i+a1, i+b1] of H(j).
            let h_lo = a1;
            let h_hi = w - 1 + b1;
            let h = &mut scratch.h;
            h.clear();
            h.resize((h_hi - h_lo + 1) as usize, INF);
            let dq = &mut scratch.deque;
            dq.clear();
            let mut cursor = h_lo - b2; // next g-index to admit
            for j in h_lo..=h_hi {
                let win_lo = j - b2;
                let win_hi = j - a2;
                while cursor <= win_hi {
                    if cursor >= 0 && cursor < w {
                        let v = gt.g[cursor as usize];
                        while dq.back().is_some_and(|&(_, bv)| bv >= v) {
                            dq.pop_back();
                        }
                        dq.push_back((cursor, v));
                    }
                    cursor += 1;
                }
                while dq.front().is_some_and(|&(fi, _)| fi < win_lo) {
                    dq.pop_front();
                }
                h[(j - h_lo) as usize] = dq.front().map_or(INF, |&(_, v)| v);
            }
            dq.clear();
            let mut cursor = 0i64; // next h-offset to admit
            for i in 0..w {
                let win_lo = i + a1 - h_lo;
                let win_hi = i + b1 - h_lo;
                while cursor <= win_hi {
                    let v = h[cursor as usize];
                    while dq.back().is_some_and(|&(_, bv)| bv <= v) {
                        dq.pop_back();
                    }
                    dq.push_back((cursor, v));
                    cursor += 1;
                }
                while dq.front().is_some_and(|&(fi, _)| fi < win_lo) {
                    dq.pop_front();
                }
                out[i as usize] = dq.front().map_or(INF, |&(_, v)| v);
            }
            let _ = n;
        }
    }
}

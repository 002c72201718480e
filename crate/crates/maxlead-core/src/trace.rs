//! Trace-level distances.
//!
//! Two independent characterizations of the maximum-lead distance between
//! finite traces of implementation labels:
//!
//! * [`lead_table`] computes, back to front, the recursion that threads the
//!   label distance through a table of future distances per lead;
//! * [`max_lead_direct`] computes the distance directly as the largest
//!   absolute difference of accumulated delays over all prefixes.
//!
//! Evaluating the first at lead zero must agree with the second; the test
//! suites use them as mutual oracles.

use num_traits::Zero;

use crate::error::Result;
use crate::label::{label_distance, Action, TimedLabel};
use crate::lattice::{GridConfig, LeadFunction};
use crate::value::{Rational, Value};

/// A finite trace of implementation labels.
pub type Trace = [TimedLabel];

/// The recursive lead-table distance between finite traces.
///
/// Empty versus empty is ⊥; empty versus non-empty is ⊤; otherwise the
/// head labels are compared relative to the table computed for the tails.
pub fn lead_table(sigma: &Trace, tau: &Trace, grid: &GridConfig) -> Result<LeadFunction> {
    match (sigma.split_first(), tau.split_first()) {
        (None, None) => Ok(LeadFunction::bottom(grid)),
        (None, Some(_)) | (Some(_), None) => Ok(LeadFunction::top(grid)),
        (Some((s0, s1)), Some((t0, t1))) => {
            let rest = lead_table(s1, t1, grid)?;
            label_distance(s0, t0, &rest)
        }
    }
}

/// The maximum-lead distance, computed directly: infinite when lengths or
/// discrete actions differ, otherwise the maximum over prefixes of the
/// absolute accumulated-delay difference. Exact rational arithmetic; no
/// grid is involved.
pub fn max_lead_direct(sigma: &Trace, tau: &Trace) -> Value {
    if sigma.len() != tau.len() {
        return Value::Infinity;
    }
    let mut acc_s = Rational::zero();
    let mut acc_t = Rational::zero();
    let mut worst = Rational::zero();
    for (s, t) in sigma.iter().zip(tau.iter()) {
        if s.action != t.action {
            return Value::Infinity;
        }
        if let Action::Delay = s.action {
            acc_s += s.window.lo();
            acc_t += t.window.lo();
        }
        let diff = if acc_s >= acc_t {
            acc_s - acc_t
        } else {
            acc_t - acc_s
        };
        worst = worst.max(diff);
    }
    Value::finite(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::label::Symbol;

    const GET: Symbol = Symbol(0);
    const GRANT: Symbol = Symbol(1);

    fn d(t: i64) -> TimedLabel {
        TimedLabel::delay_point(Rational::from_integer(t))
    }

    fn a(s: Symbol) -> TimedLabel {
        TimedLabel::discrete(s)
    }

    #[test]
    fn base_cases() {
        let grid = GridConfig::unit(10, 10);
        assert_eq!(lead_table(&[], &[], &grid).unwrap(), LeadFunction::bottom(&grid));
        assert_eq!(
            lead_table(&[], &[d(1)], &grid).unwrap(),
            LeadFunction::top(&grid)
        );
        assert_eq!(
            lead_table(&[d(1)], &[], &grid).unwrap(),
            LeadFunction::top(&grid)
        );
    }

    #[test]
    fn recursion_matches_direct_formula() {
        let grid = GridConfig::unit(16, 16);
        let sigma = vec![a(GET), d(3), a(GRANT)];
        let tau = vec![a(GET), d(2), a(GRANT)];
        let table = lead_table(&sigma, &tau, &grid).unwrap();
        assert_eq!(table.eval_zero(), Value::from_int(1));
        assert_eq!(max_lead_direct(&sigma, &tau), Value::from_int(1));
    }

    #[test]
    fn direct_formula_examples() {
        let sigma = vec![d(3), d(1)];
        let tau = vec![d(2), d(2)];
        // Prefix sums |3−2| = 1, |4−4| = 0.
        assert_eq!(max_lead_direct(&sigma, &tau), Value::from_int(1));
        assert_eq!(max_lead_direct(&sigma, &sigma), Value::zero());
        assert_eq!(max_lead_direct(&[a(GET)], &[a(GRANT)]), Value::Infinity);
        assert_eq!(max_lead_direct(&[d(1)], &[]), Value::Infinity);
    }
}

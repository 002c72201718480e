//! Finite representation of lead functions.
//!
//! A lead function maps each *lead* (the accumulated timing offset between
//! two runs, a real number) to an extended non-negative distance. This
//! module finitizes that space: leads are restricted to a symmetric grid
//! `{-D, -D+ε, …, D}` and values are exact multiples of the same step `ε`,
//! saturated to infinity above a configurable cap. Leads outside the grid
//! implicitly map to infinity.
//!
//! Internally both leads and values are stored as integer multiples of `ε`,
//! so all lattice operations are exact integer arithmetic.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::value::{Rational, Value};

/// Sentinel for infinity in unit-valued tables.
pub(crate) const INF: u64 = u64::MAX;

/// Grid parameters shared by all lead functions of one computation.
///
/// * `step` — the lead/time granularity `ε` (positive rational).
/// * `lead_bound` — leads are represented on `[-lead_bound, lead_bound]`.
/// * `value_cap` — finite values above the cap saturate to infinity.
///
/// Both bounds must be positive integer multiples of the step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridConfig {
    step: Rational,
    lead_units: i64,
    cap_units: u64,
}

impl GridConfig {
    pub fn new(step: Rational, lead_bound: Rational, value_cap: Rational) -> Result<GridConfig> {
        if step <= Rational::zero() {
            return Err(Error::Config("grid step must be positive".into()));
        }
        let lead_units = exact_units(lead_bound, step)
            .ok_or_else(|| Error::Config("lead bound must be a multiple of the step".into()))?;
        let cap_units = exact_units(value_cap, step)
            .ok_or_else(|| Error::Config("value cap must be a multiple of the step".into()))?;
        if lead_units <= 0 || cap_units <= 0 {
            return Err(Error::Config("grid bounds must be positive".into()));
        }
        Ok(GridConfig {
            step,
            lead_units,
            cap_units: cap_units as u64,
        })
    }

    /// Unit-step grid with integer bounds; the common case in tests.
    pub fn unit(lead_bound: i64, value_cap: i64) -> GridConfig {
        GridConfig::new(
            Rational::from_integer(1),
            Rational::from_integer(lead_bound),
            Rational::from_integer(value_cap),
        )
        .expect("valid unit grid")
    }

    pub fn step(&self) -> Rational {
        self.step
    }

    pub fn lead_bound(&self) -> Rational {
        self.step * Rational::from_integer(self.lead_units)
    }

    pub fn value_cap(&self) -> Rational {
        self.step * Rational::from_integer(self.cap_units as i64)
    }

    pub(crate) fn lead_units(&self) -> i64 {
        self.lead_units
    }

    pub(crate) fn cap_units(&self) -> u64 {
        self.cap_units
    }

    pub(crate) fn table_len(&self) -> usize {
        (2 * self.lead_units + 1) as usize
    }

    /// Converts a rational to grid units, failing if it is off-grid.
    pub(crate) fn to_units(&self, r: Rational) -> Result<i64> {
        exact_units(r, self.step).ok_or_else(|| {
            Error::Config("value is not aligned to the grid step".into())
        })
    }

    pub(crate) fn units_to_rational(&self, units: i64) -> Rational {
        self.step * Rational::from_integer(units)
    }

    pub(crate) fn units_to_value(&self, units: u64) -> Value {
        if units == INF {
            Value::Infinity
        } else {
            Value::finite(self.units_to_rational(units as i64))
        }
    }

    /// Clamps a non-negative unit magnitude to the saturated value domain.
    pub(crate) fn saturate(&self, units: u64) -> u64 {
        if units > self.cap_units {
            INF
        } else {
            units
        }
    }

    /// All grid leads from `-D` to `D`.
    pub fn leads(&self) -> impl Iterator<Item = Rational> + '_ {
        (-self.lead_units..=self.lead_units).map(move |u| self.units_to_rational(u))
    }
}

fn exact_units(r: Rational, step: Rational) -> Option<i64> {
    let q = r / step;
    if q.is_integer() {
        Some(q.to_integer())
    } else {
        None
    }
}

/// A finitized lead function: one saturated value per grid lead.
///
/// The bottom element maps every lead to zero; the top element maps every
/// lead to infinity. Values are immutable after construction.
#[derive(Clone, PartialEq, Eq)]
pub struct LeadFunction {
    grid: GridConfig,
    values: Vec<u64>,
}

impl LeadFunction {
    /// `⊥`: the all-zero table.
    pub fn bottom(grid: &GridConfig) -> LeadFunction {
        LeadFunction {
            values: vec![0; grid.table_len()],
            grid: grid.clone(),
        }
    }

    /// `⊤`: the all-infinity table.
    pub fn top(grid: &GridConfig) -> LeadFunction {
        LeadFunction {
            values: vec![INF; grid.table_len()],
            grid: grid.clone(),
        }
    }

    /// Constant table; the value saturates like any other entry.
    pub fn constant(grid: &GridConfig, v: Value) -> Result<LeadFunction> {
        let units = match v {
            Value::Infinity => INF,
            Value::Finite(r) => {
                let u = grid.to_units(r)?;
                if u < 0 {
                    return Err(Error::Config("lead-function values are non-negative".into()));
                }
                grid.saturate(u as u64)
            }
        };
        Ok(LeadFunction {
            values: vec![units; grid.table_len()],
            grid: grid.clone(),
        })
    }

    pub(crate) fn from_units(grid: &GridConfig, values: Vec<u64>) -> LeadFunction {
        debug_assert_eq!(values.len(), grid.table_len());
        LeadFunction {
            grid: grid.clone(),
            values,
        }
    }

    pub(crate) fn units(&self) -> &[u64] {
        &self.values
    }

    pub fn grid(&self) -> &GridConfig {
        &self.grid
    }

    fn check_grid(&self, other: &LeadFunction) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Pointwise order: true iff `self(d) ≤ other(d)` at every grid lead.
    pub fn leq(&self, other: &LeadFunction) -> Result<bool> {
        self.check_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .all(|(a, b)| a <= b))
    }

    /// Pointwise sum with absorbing infinity; sums above the cap saturate.
    pub fn add(&self, other: &LeadFunction) -> Result<LeadFunction> {
        self.check_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| {
                if a == INF || b == INF {
                    INF
                } else {
                    self.grid.saturate(a + b)
                }
            })
            .collect();
        Ok(LeadFunction {
            grid: self.grid.clone(),
            values,
        })
    }

    /// Pointwise maximum (the binary join).
    pub fn max(&self, other: &LeadFunction) -> Result<LeadFunction> {
        self.check_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a.max(b))
            .collect();
        Ok(LeadFunction {
            grid: self.grid.clone(),
            values,
        })
    }

    /// The value at lead zero: the distance assuming both runs start in sync.
    pub fn eval_zero(&self) -> Value {
        let mid = self.grid.lead_units() as usize;
        self.grid.units_to_value(self.values[mid])
    }

    /// Value at an arbitrary lead; leads outside the grid map to infinity.
    pub fn get(&self, lead: Rational) -> Result<Value> {
        let u = self.grid.to_units(lead)?;
        let n = self.grid.lead_units();
        if u < -n || u > n {
            return Ok(Value::Infinity);
        }
        Ok(self.grid.units_to_value(self.values[(u + n) as usize]))
    }

    /// Supremum of pointwise absolute differences over the grid, with
    /// `∞ − ∞` counted as zero.
    pub fn sup_distance(&self, other: &LeadFunction) -> Result<Value> {
        self.check_grid(other)?;
        let mut sup: u64 = 0;
        for (&a, &b) in self.values.iter().zip(&other.values) {
            let d = match (a == INF, b == INF) {
                (true, true) => 0,
                (false, false) => a.abs_diff(b),
                _ => return Ok(Value::Infinity),
            };
            sup = sup.max(d);
        }
        Ok(self.grid.units_to_value(sup))
    }

    /// Iterates over `(lead, value)` pairs in increasing lead order.
    pub fn iter(&self) -> impl Iterator<Item = (Rational, Value)> + '_ {
        let n = self.grid.lead_units();
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.grid.units_to_rational(i as i64 - n), self.grid.units_to_value(v)))
    }
}

impl fmt::Debug for LeadFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LeadFunction[")?;
        let mid = self.grid.lead_units() as usize;
        // Tables can be wide; show the window around lead zero.
        let lo = mid.saturating_sub(4);
        let hi = (mid + 4).min(self.values.len() - 1);
        for i in lo..=hi {
            if i > lo {
                write!(f, " ")?;
            }
            if self.values[i] == INF {
                write!(f, "inf")?;
            } else {
                write!(f, "{}", self.values[i])?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridConfig {
        GridConfig::unit(5, 10)
    }

    #[test]
    fn grid_invariants() {
        assert!(GridConfig::new(
            Rational::new(1, 2),
            Rational::from_integer(3),
            Rational::from_integer(4)
        )
        .is_ok());
        // Bound not a multiple of the step.
        assert!(GridConfig::new(
            Rational::new(1, 3),
            Rational::new(1, 2),
            Rational::from_integer(1)
        )
        .is_err());
        assert!(GridConfig::new(
            Rational::from_integer(0),
            Rational::from_integer(1),
            Rational::from_integer(1)
        )
        .is_err());
    }

    #[test]
    fn order_examples() {
        let g = grid();
        let bot = LeadFunction::bottom(&g);
        let top = LeadFunction::top(&g);
        assert!(bot.leq(&top).unwrap());
        assert!(bot.leq(&bot).unwrap());
        assert!(!top.leq(&bot).unwrap());

        // Differ only at lead 0.
        let mut a = bot.values.clone();
        let mut b = bot.values.clone();
        a[g.lead_units() as usize] = 2;
        b[g.lead_units() as usize] = 1;
        let alpha = LeadFunction::from_units(&g, a);
        let beta = LeadFunction::from_units(&g, b);
        assert!(!alpha.leq(&beta).unwrap());
        assert!(beta.leq(&alpha).unwrap());
    }

    #[test]
    fn add_examples() {
        let g = grid();
        let bot = LeadFunction::bottom(&g);
        let top = LeadFunction::top(&g);
        let one = LeadFunction::constant(&g, Value::from_int(1)).unwrap();
        let two = LeadFunction::constant(&g, Value::from_int(2)).unwrap();
        let three = LeadFunction::constant(&g, Value::from_int(3)).unwrap();
        assert_eq!(bot.add(&one).unwrap(), one);
        assert_eq!(top.add(&one).unwrap(), top);
        assert_eq!(one.add(&two).unwrap(), three);

        // Saturation above the cap.
        let nine = LeadFunction::constant(&g, Value::from_int(9)).unwrap();
        assert_eq!(nine.add(&two).unwrap(), top);
    }

    #[test]
    fn max_examples() {
        let g = grid();
        let bot = LeadFunction::bottom(&g);
        let one = LeadFunction::constant(&g, Value::from_int(1)).unwrap();
        let three = LeadFunction::constant(&g, Value::from_int(3)).unwrap();
        assert_eq!(bot.max(&one).unwrap(), one);
        assert_eq!(one.max(&one).unwrap(), one);
        assert_eq!(one.max(&three).unwrap(), three);
    }

    #[test]
    fn eval_zero_examples() {
        let g = grid();
        assert_eq!(LeadFunction::bottom(&g).eval_zero(), Value::zero());
        assert_eq!(LeadFunction::top(&g).eval_zero(), Value::Infinity);
        let mut v = LeadFunction::bottom(&g).values.clone();
        v[g.lead_units() as usize] = 1;
        assert_eq!(
            LeadFunction::from_units(&g, v).eval_zero(),
            Value::from_int(1)
        );
    }

    #[test]
    fn sup_distance_examples() {
        let g = grid();
        let bot = LeadFunction::bottom(&g);
        let top = LeadFunction::top(&g);
        let two = LeadFunction::constant(&g, Value::from_int(2)).unwrap();
        assert_eq!(two.sup_distance(&two).unwrap(), Value::zero());
        assert_eq!(bot.sup_distance(&two).unwrap(), Value::from_int(2));
        assert_eq!(bot.sup_distance(&top).unwrap(), Value::Infinity);
    }

    #[test]
    fn out_of_range_leads_are_infinite() {
        let g = grid();
        let bot = LeadFunction::bottom(&g);
        assert_eq!(bot.get(Rational::from_integer(6)).unwrap(), Value::Infinity);
        assert_eq!(bot.get(Rational::from_integer(-6)).unwrap(), Value::Infinity);
        assert_eq!(bot.get(Rational::from_integer(5)).unwrap(), Value::zero());
        assert!(bot.get(Rational::new(1, 2)).is_err());
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let a = LeadFunction::bottom(&GridConfig::unit(5, 10));
        let b = LeadFunction::bottom(&GridConfig::unit(6, 10));
        assert_eq!(a.leq(&b), Err(Error::GridMismatch));
        assert_eq!(a.add(&b), Err(Error::GridMismatch));
    }
}

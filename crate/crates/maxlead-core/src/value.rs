//! Extended non-negative rational values.
//!
//! Distances, lead-function entries and interval endpoints all live in
//! the extended non-negative rationals: exact fractions plus a single
//! absorbing infinity. No floating point is used anywhere in the crate.

use core::cmp::Ordering;
use core::fmt;

/// Exact rational number. All time data handled by this crate is a
/// multiple of a configured grid step, so `i64` components are ample.
pub type Rational = num_rational::Ratio<i64>;

/// Builds a rational from a numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

/// An element of the extended non-negative rational line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Finite(Rational),
    Infinity,
}

impl Value {
    pub const INFINITY: Value = Value::Infinity;

    pub fn zero() -> Value {
        Value::Finite(Rational::new(0, 1))
    }

    /// Wraps a finite rational; panics on negative input, which would
    /// break the lattice laws silently otherwise.
    pub fn finite(r: Rational) -> Value {
        assert!(r >= Rational::new(0, 1), "Value must be non-negative");
        Value::Finite(r)
    }

    pub fn from_int(n: u64) -> Value {
        Value::Finite(Rational::from_integer(n as i64))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Value::Infinity)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    pub fn as_finite(&self) -> Option<Rational> {
        match self {
            Value::Finite(r) => Some(*r),
            Value::Infinity => None,
        }
    }

    /// Addition with absorbing infinity.
    pub fn add(self, other: Value) -> Value {
        match (self, other) {
            (Value::Finite(a), Value::Finite(b)) => Value::Finite(a + b),
            _ => Value::Infinity,
        }
    }

    pub fn max(self, other: Value) -> Value {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Value) -> Value {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Absolute difference, with `∞ − ∞` treated as zero and any
    /// finite/infinite mix as infinity.
    pub fn abs_diff(self, other: Value) -> Value {
        match (self, other) {
            (Value::Finite(a), Value::Finite(b)) => {
                let d = if a >= b { a - b } else { b - a };
                Value::Finite(d)
            }
            (Value::Infinity, Value::Infinity) => Value::zero(),
            _ => Value::Infinity,
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Value) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Finite(a), Value::Finite(b)) => a.cmp(b),
            (Value::Finite(_), Value::Infinity) => Ordering::Less,
            (Value::Infinity, Value::Finite(_)) => Ordering::Greater,
            (Value::Infinity, Value::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Ratio's Display already prints `p/q`, or just `p` when the
            // denominator is 1.
            Value::Finite(r) => write!(f, "{}", r),
            Value::Infinity => write!(f, "inf"),
        }
    }
}

impl From<Rational> for Value {
    fn from(r: Rational) -> Value {
        Value::finite(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_arithmetic() {
        let one = Value::from_int(1);
        let two = Value::from_int(2);
        assert!(one < two);
        assert!(two < Value::Infinity);
        assert_eq!(one.add(two), Value::from_int(3));
        assert_eq!(one.add(Value::Infinity), Value::Infinity);
        assert_eq!(Value::Infinity.abs_diff(Value::Infinity), Value::zero());
        assert_eq!(one.abs_diff(Value::Infinity), Value::Infinity);
        assert_eq!(two.abs_diff(one), one);
    }

    #[test]
    fn display_forms() {
        use alloc::string::ToString;
        assert_eq!(Value::from_int(3).to_string(), "3");
        assert_eq!(Value::finite(rat(1, 2)).to_string(), "1/2");
        assert_eq!(Value::Infinity.to_string(), "inf");
    }
}

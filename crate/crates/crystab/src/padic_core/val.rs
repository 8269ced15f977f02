//! Extended rational valuations.

use num_rational::Rational64;
use num_traits::Zero;
use std::fmt;

/// Rational numbers used for valuations and precisions.
pub type Q = Rational64;

/// A p-adic valuation as far as it is determined.
///
/// `AtLeast(n)` is what an element indistinguishable from zero reports: all
/// we know is that its valuation is not below its absolute precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Val {
    Finite(Q),
    AtLeast(Q),
}

impl Val {
    /// A guaranteed lower bound for the valuation.
    pub fn lower_bound(&self) -> Q {
        match *self {
            Val::Finite(v) | Val::AtLeast(v) => v,
        }
    }

    pub fn finite(&self) -> Option<Q> {
        match *self {
            Val::Finite(v) => Some(v),
            Val::AtLeast(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Val::Finite(_))
    }

    /// Adds a known shift to the valuation.
    pub fn shift(self, by: Q) -> Val {
        match self {
            Val::Finite(v) => Val::Finite(v + by),
            Val::AtLeast(v) => Val::AtLeast(v + by),
        }
    }

    /// The valuation of a sum of terms with pairwise distinct valuations, or
    /// more generally the minimum over a family: finite only if the smallest
    /// bound is attained by a finite entry and no undetermined entry could
    /// undercut it.
    pub fn min_of<I: IntoIterator<Item = Val>>(it: I) -> Option<Val> {
        let mut best_finite: Option<Q> = None;
        let mut best_bound: Option<Q> = None;
        for v in it {
            match v {
                Val::Finite(x) => best_finite = Some(best_finite.map_or(x, |b| b.min(x))),
                Val::AtLeast(x) => best_bound = Some(best_bound.map_or(x, |b| b.min(x))),
            }
        }
        match (best_finite, best_bound) {
            (None, None) => None,
            (Some(f), None) => Some(Val::Finite(f)),
            (None, Some(b)) => Some(Val::AtLeast(b)),
            (Some(f), Some(b)) if f < b => Some(Val::Finite(f)),
            (Some(f), Some(b)) => Some(Val::AtLeast(f.min(b))),
        }
    }

    /// Whether the valuation is certainly at least `bound`.
    pub fn certainly_ge(&self, bound: Q) -> bool {
        self.lower_bound() >= bound
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(v) => write!(f, "{}", fmt_q(*v)),
            Val::AtLeast(v) => write!(f, ">={}", fmt_q(*v)),
        }
    }
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_q(q: Q) -> String {
    if q.denom() == &1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `n` or `n/d`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => s.parse::<i64>().ok().map(Q::from_integer),
    }
}

/// Smallest integer not below `q`.
pub fn ceil_q(q: Q) -> i64 {
    q.ceil().to_integer()
}

/// Largest integer not above `q`.
pub fn floor_q(q: Q) -> i64 {
    q.floor().to_integer()
}

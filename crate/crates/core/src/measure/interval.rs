//! Intervals over a [`Scalar`] with open, closed or infinite ends.

use std::fmt;

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Interval<T> {
    /// `None` is −∞.
    pub lo: Option<T>,
    /// `None` is +∞.
    pub hi: Option<T>,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl<T: Scalar> Interval<T> {
    pub fn point(x: T) -> Self {
        Interval {
            lo: Some(x.clone()),
            hi: Some(x),
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn closed(lo: T, hi: T) -> Self {
        Interval {
            lo: Some(lo),
            hi: Some(hi),
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn open(lo: Option<T>, hi: Option<T>) -> Self {
        Interval {
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_some() && self.hi.is_some()
    }

    pub fn is_empty(&self) -> bool {
        match (&self.lo, &self.hi) {
            (Some(a), Some(b)) => a > b || (a == b && !(self.lo_closed && self.hi_closed)),
            _ => false,
        }
    }

    /// Lebesgue length; `None` when unbounded.
    pub fn length(&self) -> Option<T> {
        if self.is_empty() {
            return Some(T::zero());
        }
        match (&self.lo, &self.hi) {
            (Some(a), Some(b)) => Some(b.clone() - a.clone()),
            _ => None,
        }
    }

    pub fn contains(&self, x: &T) -> bool {
        let above = match &self.lo {
            None => true,
            Some(a) if self.lo_closed => x >= a,
            Some(a) => x > a,
        };
        let below = match &self.hi {
            None => true,
            Some(b) if self.hi_closed => x <= b,
            Some(b) => x < b,
        };
        above && below
    }

    /// Joins two adjacent intervals (`self` to the left of `other`).
    pub fn join(&self, other: &Interval<T>) -> Interval<T> {
        Interval {
            lo: self.lo.clone(),
            hi: other.hi.clone(),
            lo_closed: self.lo_closed,
            hi_closed: other.hi_closed,
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Interval<U> {
        Interval {
            lo: self.lo.as_ref().map(&f),
            hi: self.hi.as_ref().map(&f),
            lo_closed: self.lo_closed,
            hi_closed: self.hi_closed,
        }
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let (Some(a), true) = (&self.lo, self.lo == self.hi && self.lo_closed && self.hi_closed) {
            return write!(f, "{{{a}}}");
        }
        f.write_str(if self.lo_closed { "[" } else { "(" })?;
        match &self.lo {
            Some(a) => write!(f, "{a}")?,
            None => f.write_str("-inf")?,
        }
        f.write_str(", ")?;
        match &self.hi {
            Some(b) => write!(f, "{b}")?,
            None => f.write_str("inf")?,
        }
        f.write_str(if self.hi_closed { "]" } else { ")" })
    }
}

/// The cells cut out of the real line by sorted, distinct breakpoints:
/// `(-inf, b1), {b1}, (b1, b2), ..., {bm}, (bm, inf)`.
pub fn cells<T: Scalar>(breaks: &[T]) -> Vec<Interval<T>> {
    let mut out = Vec::with_capacity(2 * breaks.len() + 1);
    let mut prev: Option<T> = None;
    for b in breaks {
        out.push(Interval::open(prev.clone(), Some(b.clone())));
        out.push(Interval::point(b.clone()));
        prev = Some(b.clone());
    }
    out.push(Interval::open(prev, None));
    out
}

/// A point inside a cell.
pub fn representative<T: Scalar>(cell: &Interval<T>) -> T {
    match (&cell.lo, &cell.hi) {
        (Some(a), Some(b)) => T::midpoint(a, b),
        (Some(a), None) => a.clone() + T::one(),
        (None, Some(b)) => b.clone() - T::one(),
        (None, None) => T::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use num_rational::BigRational;

    #[test]
    fn cells_partition_the_line() {
        let c = cells(&[int(0), int(3)]);
        assert_eq!(c.len(), 5);
        let probes = [-1.0, 0.0, 1.5, 3.0, 4.0];
        for (i, x) in probes.iter().enumerate() {
            let x = BigRational::from_float(*x).unwrap();
            let hits: Vec<_> = c.iter().enumerate().filter(|(_, k)| k.contains(&x)).map(|(j, _)| j).collect();
            assert_eq!(hits, vec![i]);
            assert!(c[i].contains(&representative(&c[i])));
        }
        assert_eq!(c[2].length(), Some(int(3)));
        assert_eq!(c[4].length(), None);
        assert_eq!(c[2].join(&c[3]).to_string(), "(0, 3]");
        assert_eq!(Interval::point(rat(1, 2)).to_string(), "{1/2}");
    }

    #[test]
    fn emptiness() {
        assert!(Interval { lo: Some(1.0), hi: Some(1.0), lo_closed: true, hi_closed: false }.is_empty());
        assert!(!Interval::point(1.0).is_empty());
        assert_eq!(Interval::<f64>::open(Some(2.0), Some(1.0)).length(), Some(0.0));
    }
}

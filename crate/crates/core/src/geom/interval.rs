use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// An interval `[lo, hi] ⊆ [0,1]` with per-endpoint open/closed bookkeeping.
///
/// Masses never see the open/closed distinction (tree measures carry no
/// atoms); geometry keeps it so complements of closed balls stay honest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalInterval {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl RationalInterval {
    /// Closed interval; errors unless `0 <= lo <= hi <= 1`.
    pub fn closed(lo: Rational, hi: Rational) -> Result<Self> {
        if lo.is_negative() || hi > Rational::one() || lo > hi {
            return Err(Error::InvalidParameter(alloc::format!(
                "interval [{lo}, {hi}] is not inside [0,1]"
            )));
        }
        Ok(Self::closed_unchecked(lo, hi))
    }

    pub(crate) fn closed_unchecked(lo: Rational, hi: Rational) -> Self {
        RationalInterval {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    /// Open interval `(lo, hi)`.
    pub fn open(lo: Rational, hi: Rational) -> Result<Self> {
        let mut i = Self::closed(lo, hi)?;
        i.lo_open = true;
        i.hi_open = true;
        Ok(i)
    }

    pub fn unit() -> Self {
        Self::closed_unchecked(Rational::zero(), Rational::one())
    }

    pub fn diameter(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_open || self.hi_open,
            Ordering::Less => false,
        }
    }

    /// The closure `[lo, hi]`.
    pub fn closure(&self) -> Self {
        Self::closed_unchecked(self.lo.clone(), self.hi.clone())
    }

    pub fn contains_point(&self, x: &Rational) -> bool {
        let left = if self.lo_open { *x > self.lo } else { *x >= self.lo };
        let right = if self.hi_open { *x < self.hi } else { *x <= self.hi };
        left && right
    }

    /// Set containment `other ⊆ self`, honoring open endpoints.
    pub fn contains(&self, other: &RationalInterval) -> bool {
        if other.is_empty() {
            return true;
        }
        let left = match other.lo.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => !self.lo_open || other.lo_open,
            Ordering::Less => false,
        };
        let right = match other.hi.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => !self.hi_open || other.hi_open,
            Ordering::Greater => false,
        };
        left && right
    }

    /// Whether the two sets share at least one point.
    pub fn meets(&self, other: &RationalInterval) -> bool {
        if self.is_empty() || other.is_empty() {
            return false;
        }
        let (a, b) = if self.lo <= other.lo {
            (self, other)
        } else {
            (other, self)
        };
        match b.lo.cmp(&a.hi) {
            Ordering::Less => true,
            Ordering::Equal => !b.lo_open && !a.hi_open,
            Ordering::Greater => false,
        }
    }

    /// Whether the intersection has positive length.
    pub fn overlaps(&self, other: &RationalInterval) -> bool {
        self.lo.clone().max(other.lo.clone()) < self.hi.clone().min(other.hi.clone())
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_open { '(' } else { '[' };
        let r = if self.hi_open { ')' } else { ']' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// Merges closed intervals into disjoint closed components, sorted.
pub fn merge_closed(intervals: &[RationalInterval]) -> Vec<RationalInterval> {
    let mut sorted: Vec<&RationalInterval> = intervals.iter().collect();
    sorted.sort_by(|a, b| a.lo.cmp(&b.lo));
    let mut out: Vec<RationalInterval> = Vec::new();
    for iv in sorted {
        match out.last_mut() {
            Some(last) if iv.lo <= last.hi => {
                if iv.hi > last.hi {
                    last.hi = iv.hi.clone();
                }
            }
            _ => out.push(iv.closure()),
        }
    }
    out
}

/// Lebesgue measure of a finite union of intervals.
pub fn union_length(intervals: &[RationalInterval]) -> Rational {
    merge_closed(intervals)
        .iter()
        .map(RationalInterval::diameter)
        .fold(Rational::zero(), |a, b| a + b)
}

/// `piece ∖ ⋃ removed` where `removed` are closed, merged, sorted intervals.
/// Boundary points adjacent to removed sets become open endpoints.
pub fn subtract_closed(
    piece: &RationalInterval,
    removed: &[RationalInterval],
) -> Vec<RationalInterval> {
    let mut out = Vec::new();
    let mut cur = piece.clone();
    let start = removed.partition_point(|r| r.hi < piece.lo);
    for r in &removed[start..] {
        if cur.is_empty() {
            break;
        }
        if r.hi < cur.lo || (r.hi == cur.lo && cur.lo_open) {
            continue;
        }
        if r.lo > cur.hi || (r.lo == cur.hi && cur.hi_open) {
            break;
        }
        // r meets cur: keep the part left of r, continue right of r.
        let left = RationalInterval {
            lo: cur.lo.clone(),
            hi: r.lo.clone(),
            lo_open: cur.lo_open,
            hi_open: true,
        };
        if !left.is_empty() {
            out.push(left);
        }
        cur = RationalInterval {
            lo: r.hi.clone(),
            hi: cur.hi.clone(),
            lo_open: true,
            hi_open: cur.hi_open,
        };
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

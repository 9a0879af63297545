use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::seq::SequenceFamily;

use super::cantor::ConstructionTree;
use super::interval::{merge_closed, subtract_closed, RationalInterval};

/// The space the balls are cut out of.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ambient {
    UnitInterval,
    /// The deepest level of a construction tree stands in for its Cantor set.
    Tree(ConstructionTree),
}

impl Ambient {
    /// Closed pieces making up the ambient space at its resolved depth.
    pub fn pieces(&self) -> Vec<RationalInterval> {
        match self {
            Ambient::UnitInterval => vec![RationalInterval::unit()],
            Ambient::Tree(t) => t.leaves().to_vec(),
        }
    }
}

/// Closed balls `B_1, B_2, ...` removed from the ambient space, with a
/// family bounding their diameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutOutConfig {
    pub balls: Vec<RationalInterval>,
    pub diam_family: SequenceFamily,
    pub ambient: Ambient,
}

impl CutOutConfig {
    /// Orders the balls by non-increasing diameter and checks
    /// `diam(B_i) <= α_i` and that each ball meets the ambient space.
    pub fn new(
        balls: Vec<RationalInterval>,
        diam_family: SequenceFamily,
        ambient: Ambient,
    ) -> Result<Self> {
        let mut cfg = CutOutConfig {
            balls,
            diam_family,
            ambient,
        };
        cfg.normalize_order();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Stable sort by non-increasing diameter.
    pub fn normalize_order(&mut self) {
        self.balls.sort_by_key(|b| core::cmp::Reverse(b.diameter()));
    }

    pub fn validate(&self) -> Result<()> {
        let pieces = self.ambient.pieces();
        for (i, b) in self.balls.iter().enumerate() {
            if b.lo_open || b.hi_open {
                return Err(Error::InvalidParameter(format!("ball {} is not closed", i + 1)));
            }
            if b.lo.is_negative() || b.hi > Rational::one() || b.lo > b.hi {
                return Err(Error::InvalidParameter(format!("ball {} leaves [0,1]", i + 1)));
            }
            let bound = self.diam_family.term(i as u64 + 1)?;
            if b.diameter() > bound.lo {
                return Err(Error::InvalidParameter(format!(
                    "diam(B_{}) = {} exceeds the family bound {}",
                    i + 1,
                    b.diameter(),
                    bound.lo
                )));
            }
            let at = pieces.partition_point(|p| p.hi < b.lo);
            if !pieces[at..].iter().take_while(|p| p.lo <= b.hi).any(|p| p.meets(b)) {
                return Err(Error::InvalidParameter(format!(
                    "ball {} misses the ambient space",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n > self.balls.len() {
            Err(Error::InvalidParameter(format!(
                "N = {n} exceeds the {} balls provided",
                self.balls.len()
            )))
        } else {
            Ok(())
        }
    }

    /// `E_N = X ∖ ⋃_{i<=N} B_i` as disjoint intervals, left to right.
    pub fn remaining_set(&self, n: usize) -> Result<Vec<RationalInterval>> {
        self.check_n(n)?;
        let removed = merge_closed(&self.balls[..n]);
        let mut out = Vec::new();
        for piece in self.ambient.pieces() {
            out.extend(subtract_closed(&piece, &removed));
        }
        Ok(out)
    }

    /// Leftmost component of `E_N` of maximal diameter.
    pub fn largest_gap(&self, n: usize) -> Result<(RationalInterval, Rational)> {
        let rem = self.remaining_set(n)?;
        let mut best: Option<&RationalInterval> = None;
        for c in &rem {
            if best.is_none_or(|b| c.diameter() > b.diameter()) {
                best = Some(c);
            }
        }
        let g = best.ok_or(Error::EmptyRemainder(n))?.clone();
        let d = g.diameter();
        Ok((g, d))
    }

    /// The open neighborhoods `B_i(ζ)` for `i <= N`, clipped to `[0,1]`
    /// and returned unmerged.
    pub fn inflate(&self, n: usize, zeta: &Rational) -> Result<Vec<RationalInterval>> {
        self.check_n(n)?;
        if !zeta.is_positive() {
            return Err(Error::InvalidParameter("inflation radius must be positive".into()));
        }
        Ok(self.balls[..n]
            .iter()
            .map(|b| {
                let lo = &b.lo - zeta;
                let hi = &b.hi + zeta;
                let (lo, lo_open) = if lo.is_negative() {
                    (Rational::zero(), false)
                } else {
                    (lo, true)
                };
                let (hi, hi_open) = if hi > Rational::one() {
                    (Rational::one(), false)
                } else {
                    (hi, true)
                };
                RationalInterval {
                    lo,
                    hi,
                    lo_open,
                    hi_open,
                }
            })
            .collect())
    }
}

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};
use crate::seq::SequenceFamily;

use super::interval::RationalInterval;

/// Default depth cap for builders that materialize every node.
pub const DEFAULT_MAX_DEPTH: u32 = 24;

/// Binary construction tree of a middle-interval Cantor set `C(β_n)`.
///
/// Level 0 is `[0,1]`. Each level-`k` node loses an open middle gap of
/// relative length `β_{k+1}` and leaves two closed children of relative
/// length `(1 - β_{k+1}) / 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionTree {
    pub beta: SequenceFamily,
    pub depth: u32,
    /// `nodes[k]` holds the `2^k` level-`k` intervals, left to right.
    pub nodes: Vec<Vec<RationalInterval>>,
    /// `gaps[k]` holds the open middles removed from level-`k` nodes.
    pub gaps: Vec<Vec<RationalInterval>>,
    /// Largest realized ratio `gap length / child length` over the built levels.
    pub gap_ratio_sup: Option<Rational>,
    /// Realized uniform-perfectness diagnostic `2 (1 + gap_ratio_sup)`.
    pub perfectness_constant: Option<Rational>,
}

pub fn build_cantor(beta: &SequenceFamily, depth: u32) -> Result<ConstructionTree> {
    build_cantor_with_limit(beta, depth, DEFAULT_MAX_DEPTH)
}

pub fn build_cantor_with_limit(
    beta: &SequenceFamily,
    depth: u32,
    max_depth: u32,
) -> Result<ConstructionTree> {
    if depth > max_depth {
        return Err(Error::DepthLimit {
            requested: depth,
            limit: max_depth,
        });
    }
    let two = int(2);
    let mut nodes = vec![vec![RationalInterval::unit()]];
    let mut gaps = Vec::new();
    let mut ratio_sup: Option<Rational> = None;
    for k in 0..depth {
        let b = beta.term_exact(k as u64 + 1)?;
        let child_frac = (Rational::one() - &b) / &two;
        let ratio = &b / &child_frac;
        if ratio_sup.as_ref().is_none_or(|r| ratio > *r) {
            ratio_sup = Some(ratio);
        }
        let parents = &nodes[k as usize];
        let mut children = Vec::with_capacity(parents.len() * 2);
        let mut level_gaps = Vec::with_capacity(parents.len());
        for p in parents {
            let len = p.diameter();
            let c = &len * &child_frac;
            let left_hi = &p.lo + &c;
            let right_lo = &p.hi - &c;
            children.push(RationalInterval::closed_unchecked(p.lo.clone(), left_hi.clone()));
            level_gaps.push(RationalInterval {
                lo: left_hi,
                hi: right_lo.clone(),
                lo_open: true,
                hi_open: true,
            });
            children.push(RationalInterval::closed_unchecked(right_lo, p.hi.clone()));
        }
        nodes.push(children);
        gaps.push(level_gaps);
    }
    let perfectness_constant = ratio_sup.as_ref().map(|r| (r + int(1)) * int(2));
    Ok(ConstructionTree {
        beta: beta.clone(),
        depth,
        nodes,
        gaps,
        gap_ratio_sup: ratio_sup,
        perfectness_constant,
    })
}

impl ConstructionTree {
    pub fn level(&self, k: u32) -> &[RationalInterval] {
        &self.nodes[k as usize]
    }

    pub fn leaves(&self) -> &[RationalInterval] {
        self.level(self.depth)
    }

    pub fn node(&self, level: u32, index: u64) -> Result<&RationalInterval> {
        self.nodes
            .get(level as usize)
            .and_then(|l| l.get(index as usize))
            .ok_or(Error::InvalidNode { level, index })
    }

    /// Total length of the level-`k` nodes.
    pub fn level_length(&self, k: u32) -> Rational {
        self.level(k)
            .iter()
            .map(RationalInterval::diameter)
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Total length of the gaps removed at level `k`.
    pub fn gap_length(&self, k: u32) -> Rational {
        self.gaps[k as usize]
            .iter()
            .map(RationalInterval::diameter)
            .fold(Rational::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn thirds() -> SequenceFamily {
        SequenceFamily::constant(rat(1, 3)).unwrap()
    }

    #[test]
    fn middle_thirds_first_level() {
        let t = build_cantor(&thirds(), 1).unwrap();
        assert_eq!(t.level(1)[0], RationalInterval::closed(rat(0, 1), rat(1, 3)).unwrap());
        assert_eq!(t.level(1)[1], RationalInterval::closed(rat(2, 3), rat(1, 1)).unwrap());
        assert_eq!(t.gaps[0][0].lo, rat(1, 3));
        assert!(t.gaps[0][0].lo_open);
    }

    #[test]
    fn depth_zero_is_unit() {
        let t = build_cantor(&thirds(), 0).unwrap();
        assert_eq!(t.leaves(), &[RationalInterval::unit()]);
        assert!(t.gaps.is_empty());
        assert_eq!(t.perfectness_constant, None);
    }

    #[test]
    fn telescoping_lengths() {
        let beta = SequenceFamily::power(int(1), int(2), int(1)).unwrap();
        let t = build_cantor(&beta, 8).unwrap();
        for d in 0..=8u32 {
            // ∏_{k=1}^{d} (1 - (k+1)^-2) = (d+2) / (2(d+1)).
            assert_eq!(t.level_length(d), rat(d as i64 + 2, 2 * (d as i64 + 1)));
            assert_eq!(t.level(d).len(), 1 << d);
        }
        for k in 0..8u32 {
            let b = beta.term_exact(k as u64 + 1).unwrap();
            assert_eq!(t.gap_length(k), b * t.level_length(k));
        }
    }

    #[test]
    fn depth_guard() {
        assert!(matches!(
            build_cantor_with_limit(&thirds(), 5, 4),
            Err(Error::DepthLimit { requested: 5, limit: 4 })
        ));
    }

    #[test]
    fn children_nested_and_disjoint() {
        let t = build_cantor(&thirds(), 4).unwrap();
        for k in 1..=4u32 {
            let lv = t.level(k);
            for (i, c) in lv.iter().enumerate() {
                assert!(t.level(k - 1)[i / 2].contains(c));
            }
            for w in lv.windows(2) {
                assert!(w[0].hi < w[1].lo);
            }
        }
    }
}

//! (α_n)-thick structures: nested families `(I_{n,j}, J_{n,j})` with bounded
//! overlap, relative gap sizes controlled by `α_n`, and interior witness balls.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, rat, Rational};
use crate::seq::SequenceFamily;

use super::cantor::ConstructionTree;
use super::interval::{merge_closed, subtract_closed, RationalInterval};

/// One `(I_{n,j}, J_{n,j})` pair with its witness center `x_{n,j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThickPair {
    pub outer: RationalInterval,
    pub inner: RationalInterval,
    pub center: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThickStructure {
    /// `levels[n - 1]` holds the pairs of level `n`.
    pub levels: Vec<Vec<ThickPair>>,
    pub overlap_bound: u32,
    pub c: Rational,
    pub alpha: SequenceFamily,
    /// Closed intervals that must contain `E_0 ∖ ⋃ J`.
    pub target: Vec<RationalInterval>,
}

/// The five defining conditions, in order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThickCondition {
    Bounded,
    Overlap,
    GapSize,
    WitnessBall,
    Containment,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThickVerdict {
    Valid,
    Violation {
        condition: ThickCondition,
        level: u32,
        index: usize,
    },
}

/// `1 - β` below this makes the witness balls degenerate.
const MIN_CHILD_FRACTION: (i64, i64) = (1, 1_000_000);

impl ThickStructure {
    /// Witness radius `δ_{n,j} = c · diam(I_{n,j})`.
    pub fn radius(&self, pair: &ThickPair) -> Rational {
        &self.c * pair.outer.diameter()
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }
}

/// Thick structure of a middle-interval Cantor tree: `I` = construction
/// intervals, `J` = their middle gaps, `N = 1`, `α_n = β_n`,
/// `c = min(1, (1 - β_max)/4)`, witnesses at left-child midpoints.
pub fn thick_from_cantor(tree: &ConstructionTree) -> Result<ThickStructure> {
    let mut beta_max = Rational::zero();
    for k in 1..=tree.depth as u64 {
        let b = tree.beta.term_exact(k)?;
        if b > beta_max {
            beta_max = b;
        }
    }
    let c = if tree.depth == 0 {
        Rational::one()
    } else {
        let slack = Rational::one() - &beta_max;
        if slack < rat(MIN_CHILD_FRACTION.0, MIN_CHILD_FRACTION.1) {
            let level = (1..=tree.depth)
                .find(|&k| tree.beta.term_exact(k as u64).ok() == Some(beta_max.clone()))
                .unwrap_or(1);
            return Err(Error::FailsThickness { level });
        }
        (slack / int(4)).min(Rational::one())
    };
    let mut levels = Vec::with_capacity(tree.depth as usize);
    for k in 0..tree.depth {
        let pairs = tree
            .level(k)
            .iter()
            .zip(&tree.gaps[k as usize])
            .enumerate()
            .map(|(i, (outer, gap))| {
                let left = &tree.level(k + 1)[2 * i];
                ThickPair {
                    outer: outer.clone(),
                    inner: gap.clone(),
                    center: left.midpoint(),
                }
            })
            .collect();
        levels.push(pairs);
    }
    Ok(ThickStructure {
        levels,
        overlap_bound: 1,
        c,
        alpha: tree.beta.clone(),
        target: tree.leaves().to_vec(),
    })
}

/// Maximum number of closed intervals sharing a point.
fn max_overlap(intervals: &[&RationalInterval]) -> (usize, usize) {
    // Events: starts sort before ends at equal coordinates so touching
    // closed intervals count as overlapping.
    let mut events: Vec<(&Rational, u8, usize)> = Vec::with_capacity(intervals.len() * 2);
    for (i, iv) in intervals.iter().enumerate() {
        events.push((&iv.lo, 0, i));
        events.push((&iv.hi, 1, i));
    }
    events.sort();
    let mut cur = 0usize;
    let mut best = (0usize, 0usize);
    for (_, kind, i) in events {
        if kind == 0 {
            cur += 1;
            if cur > best.0 {
                best = (cur, i);
            }
        } else {
            cur -= 1;
        }
    }
    best
}

/// Checks conditions (i)–(v) on levels `1..=depth` by exact interval arithmetic.
pub fn verify_thick(ts: &ThickStructure, depth: u32) -> ThickVerdict {
    use ThickCondition::*;
    let depth = depth.min(ts.depth());
    let violation = |condition, level, index| ThickVerdict::Violation {
        condition,
        level,
        index,
    };
    let unit = RationalInterval::unit();
    if !ts.c.is_positive() || ts.c > Rational::one() {
        return violation(GapSize, 0, 0);
    }
    let mut earlier_gaps: Vec<RationalInterval> = Vec::new();
    for n in 1..=depth {
        let pairs = &ts.levels[n as usize - 1];
        for (j, p) in pairs.iter().enumerate() {
            if !unit.contains(&p.outer) {
                return violation(Bounded, n, j);
            }
        }
        let outers: Vec<&RationalInterval> = pairs.iter().map(|p| &p.outer).collect();
        let (overlap, at) = max_overlap(&outers);
        if overlap > ts.overlap_bound as usize {
            return violation(Overlap, n, at);
        }
        let alpha = match ts.alpha.term(n as u64) {
            Ok(a) => a.lo,
            Err(_) => return violation(GapSize, n, 0),
        };
        for (j, p) in pairs.iter().enumerate() {
            if !p.outer.contains(&p.inner)
                || &ts.c * p.inner.diameter() > &alpha * p.outer.diameter()
            {
                return violation(GapSize, n, j);
            }
            let r = ts.radius(p);
            if !r.is_positive() {
                return violation(WitnessBall, n, j);
            }
            let ball = RationalInterval {
                lo: &p.center - &r,
                hi: &p.center + &r,
                lo_open: false,
                hi_open: false,
            };
            if !p.outer.contains(&ball) || earlier_gaps.iter().any(|g| g.meets(&ball)) {
                return violation(WitnessBall, n, j);
            }
        }
        earlier_gaps.extend(pairs.iter().map(|p| p.inner.clone()));
    }
    // (v): E_0 ∖ ⋃ J ⊆ target, with E_0 the union of all I's used.
    let all_outer: Vec<RationalInterval> = ts.levels[..depth as usize]
        .iter()
        .flatten()
        .map(|p| p.outer.clone())
        .collect();
    let e0 = merge_closed(&all_outer);
    let mut gaps_sorted = earlier_gaps;
    gaps_sorted.sort_by(|a, b| a.lo.cmp(&b.lo));
    for piece in &e0 {
        for rest in subtract_open(piece, &gaps_sorted) {
            if !ts.target.iter().any(|t| t.contains(&rest)) {
                return violation(Containment, depth, 0);
            }
        }
    }
    ThickVerdict::Valid
}

/// `piece ∖ ⋃ gaps` for open, sorted, pairwise disjoint gaps.
fn subtract_open(piece: &RationalInterval, gaps: &[RationalInterval]) -> Vec<RationalInterval> {
    // Removing open gaps leaves closed pieces; reuse the closed-subtraction
    // routine on closures and then close the resulting endpoints.
    let closures: Vec<RationalInterval> = gaps.iter().map(RationalInterval::closure).collect();
    subtract_closed(piece, &merge_closed(&closures))
        .into_iter()
        .map(|r| r.closure())
        .collect()
}

//! Worked examples: nested leftmost-descendant removals on a Cantor tree,
//! and finite interval families tiling `[0, T]`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geom::{build_cantor, union_length, Ambient, ConstructionTree, CutOutConfig, RationalInterval};
use crate::measure::{MeasureBase, TreeMeasure, Weights};
use crate::rational::{pow2, powi, rat, Rational};
use crate::seq::{log_floor_exponent, Convergence, SequenceFamily};

use super::product::{scaled_product_bracket, ProductBracket};

/// Largest stage count handled by the left-count histogram.
pub const EX54_MAX_STAGES: u64 = 64;
/// Largest stage count handled by explicit ball enumeration.
pub const EX54_MAX_ENUMERATED_STAGES: u64 = 7;
/// Truncation point of the positive-limit bracket.
pub const EX54_LIMIT_N: u64 = (1 << 13) - 2;
/// A partial product below this counts as numerically zero.
pub const EX54_ZERO_THRESHOLD: (i64, i64) = (1, 1_000_000);
/// Give up on locating the zero-threshold stage after this many factors.
pub const EX54_MAX_ZERO_STAGES: u64 = 1 << 20;

/// Stage `j` acts on tree level `k_j - 1` and cuts `m_j` levels down.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ex54Stage {
    pub j: u64,
    pub m: u32,
    /// 0-based tree level of the nodes being cut.
    pub level: u32,
}

/// `k_1 = 1`, `k_{j+1} = k_j + m_j` with `m_j = floor(log2(j + 1))`.
pub fn example54_schedule(stages: u64) -> Vec<Ex54Stage> {
    let mut level = 0u32;
    (1..=stages)
        .map(|j| {
            let m = log_floor_exponent(j);
            let st = Ex54Stage { j, m, level };
            level += m;
            st
        })
        .collect()
}

/// 0-based tree depth reached after `stages` stages.
pub fn example54_depth(stages: u64) -> u32 {
    example54_schedule(stages).iter().map(|s| s.m).sum()
}

fn binomials(m: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for _ in 0..m {
        let mut next = vec![BigInt::one(); row.len() + 1];
        for i in 1..row.len() {
            next[i] = &row[i - 1] + &row[i];
        }
        row = next;
    }
    row
}

/// Mass left after `stages` stages, by counting surviving nodes per
/// number of left turns on their root path.
pub fn example54_histogram_mass(p: &Rational, stages: u64) -> Result<Rational> {
    if stages > EX54_MAX_STAGES {
        return Err(Error::DepthLimit {
            requested: stages as u32,
            limit: EX54_MAX_STAGES as u32,
        });
    }
    let mut hist = vec![BigInt::one()];
    let mut depth = 0u32;
    for st in example54_schedule(stages) {
        let c = binomials(st.m);
        let mut next = vec![BigInt::zero(); hist.len() + st.m as usize];
        for (l, count) in hist.iter().enumerate() {
            if count.is_zero() {
                continue;
            }
            for (dl, ways) in c.iter().enumerate() {
                let ways = if dl == st.m as usize { ways - 1 } else { ways.clone() };
                next[l + dl] += count * ways;
            }
        }
        hist = next;
        depth += st.m;
    }
    let q = Rational::one() - p;
    let mut mass = Rational::zero();
    for (l, count) in hist.iter().enumerate() {
        if count.is_zero() {
            continue;
        }
        mass += Rational::from_integer(count.clone())
            * powi(p, l as i64)
            * powi(&q, (depth - l as u32) as i64);
    }
    Ok(mass)
}

/// Cantor tree with `β_n = 1 - 2^{-n}`: gaps swallow almost everything,
/// so it is not uniformly perfect.
pub fn example54_tree(depth: u32) -> Result<ConstructionTree> {
    let beta: Vec<Rational> = (1..=depth.max(1) as i64)
        .map(|n| Rational::one() - pow2(-n))
        .collect();
    build_cantor(&SequenceFamily::explicit(beta)?, depth)
}

/// The removed nodes as closed balls on [`example54_tree`].
pub fn example54_config(stages: u64) -> Result<CutOutConfig> {
    if stages > EX54_MAX_ENUMERATED_STAGES {
        return Err(Error::DepthLimit {
            requested: stages as u32,
            limit: EX54_MAX_ENUMERATED_STAGES as u32,
        });
    }
    let depth = example54_depth(stages);
    let tree = example54_tree(depth)?;
    let mut removed: Vec<(u32, u64)> = Vec::new();
    let mut alive: Vec<u64> = vec![0];
    for st in example54_schedule(stages) {
        let mut next = Vec::with_capacity(alive.len() << st.m);
        for &i in &alive {
            let first = i << st.m;
            removed.push((st.level + st.m, first));
            next.extend(first + 1..first + (1u64 << st.m));
        }
        alive = next;
    }
    let balls: Vec<RationalInterval> = removed
        .iter()
        .map(|&(l, i)| tree.node(l, i).cloned())
        .collect::<Result<_>>()?;
    let mut diams: Vec<Rational> = balls.iter().map(RationalInterval::diameter).collect();
    diams.sort_by(|a, b| b.cmp(a));
    CutOutConfig::new(balls, SequenceFamily::explicit(diams)?, Ambient::Tree(tree))
}

/// Mass left after `stages` stages, by measuring the explicit remainder.
pub fn example54_enumerated_mass(p: &Rational, stages: u64) -> Result<Rational> {
    let cfg = example54_config(stages)?;
    let Ambient::Tree(tree) = &cfg.ambient else {
        unreachable!()
    };
    let depth = tree.depth;
    let m = TreeMeasure::new(
        MeasureBase::Cantor(tree.clone()),
        Weights::Binomial(p.clone()),
        Rational::one(),
    )?;
    let mb = m.cutout_mass(&cfg, cfg.balls.len(), depth)?;
    if !mb.is_exact() {
        return Err(Error::Inexact("remainder mass is not resolved exactly".into()));
    }
    Ok(mb.lower)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ex54Limit {
    /// `∏ (1 - p^{m_j}) > 0`, certified by a product bracket.
    Positive(ProductBracket),
    /// The partial product first drops below the threshold at `stage`.
    Zero { stage: u64, partial: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Example54 {
    pub p: Rational,
    pub stages: u64,
    pub closed_form: ProductBracket,
    pub brute_force: Rational,
    /// Whether `Σ p^{m_j}` converges.
    pub summable: bool,
}

pub fn example54_limit(p: &Rational) -> Result<Ex54Limit> {
    let fam = SequenceFamily::log_floor(p.clone())?;
    if fam.classify_ellp(&Rational::one())? == Convergence::Converges {
        let b = scaled_product_bracket(&fam, &Rational::one(), &Rational::one(), 1, EX54_LIMIT_N)?;
        if !b.lower().is_positive() {
            return Err(Error::NoProgress(EX54_LIMIT_N));
        }
        return Ok(Ex54Limit::Positive(b));
    }
    let threshold = rat(EX54_ZERO_THRESHOLD.0, EX54_ZERO_THRESHOLD.1);
    let mut partial = Rational::one();
    for j in 1..=EX54_MAX_ZERO_STAGES {
        partial *= Rational::one() - powi(p, log_floor_exponent(j) as i64);
        // Keep denominators small: the bound only needs to stay above.
        partial = crate::rational::round_up(&partial, 256);
        if partial < threshold {
            return Ok(Ex54Limit::Zero { stage: j, partial });
        }
    }
    Err(Error::NoProgress(EX54_MAX_ZERO_STAGES))
}

/// Closed-form product versus histogram mass after `stages` stages.
pub fn example54_mass(p: &Rational, stages: u64) -> Result<Example54> {
    let fam = SequenceFamily::log_floor(p.clone())?;
    let closed_form = scaled_product_bracket(&fam, &Rational::one(), &Rational::one(), 1, stages)?;
    let brute_force = example54_histogram_mass(p, stages)?;
    let summable = fam.classify_ellp(&Rational::one())? == Convergence::Converges;
    Ok(Example54 {
        p: p.clone(),
        stages,
        closed_form,
        brute_force,
        summable,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Example51Verdict {
    /// The remainder is Lebesgue-null.
    Thin,
    /// The remainder has at least this (normalized) length.
    Fat { remainder_lower: Rational },
}

/// Decides whether `[0,1] ∖ ⋃ I_i` has positive length, where `I_i` are the
/// listed intervals (rescaled from `[0, T]`) followed by disjointly placed
/// intervals of lengths `α_i / T` for `i` past the list.
pub fn example51_verdict(
    intervals: &[RationalInterval],
    total: &Rational,
    family: Option<&SequenceFamily>,
) -> Result<Example51Verdict> {
    if !total.is_positive() {
        return Err(Error::InvalidParameter("T must be positive".into()));
    }
    let n = intervals.len() as u64;
    if let Some(f) = family {
        for (i, iv) in intervals.iter().enumerate() {
            if iv.diameter() * total != f.term_exact(i as u64 + 1)? {
                return Err(Error::LengthMismatch);
            }
        }
    }
    let tail = match family {
        Some(f) => f.tail_sum_upper(&Rational::one(), n)? / total,
        None => Rational::zero(),
    };
    let sum: Rational = intervals.iter().map(RationalInterval::diameter).sum();
    if &sum + &tail > Rational::one() {
        return Err(Error::LengthMismatch);
    }
    let covered = union_length(intervals);
    let remainder = Rational::one() - covered - tail;
    if remainder.is_positive() {
        Ok(Example51Verdict::Fat {
            remainder_lower: remainder,
        })
    } else {
        Ok(Example51Verdict::Thin)
    }
}

/// Consecutive intervals of lengths `α_1, ..., α_n` packed from the left
/// of `[0, T]`, rescaled to `[0,1]`.
pub fn example51_packed(family: &SequenceFamily, total: &Rational, n: u64) -> Result<Vec<RationalInterval>> {
    let mut at = Rational::zero();
    let mut out = Vec::with_capacity(n as usize);
    for i in 1..=n {
        let len = family.term_exact(i)? / total;
        let next = &at + &len;
        out.push(RationalInterval::closed(at, next.clone())?);
        at = next;
    }
    Ok(out)
}

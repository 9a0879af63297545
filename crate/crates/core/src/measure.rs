//! Measures given by mass-splitting weights on binary construction trees.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geom::{ConstructionTree, CutOutConfig, RationalInterval};
use crate::rational::{int, pow2, Rational};

/// Levels beyond this are never materialized in full.
pub const MAX_ENUMERATION_DEPTH: u32 = 26;

/// The tree whose nodes carry mass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MeasureBase {
    /// Dyadic intervals `[i 2^-k, (i+1) 2^-k]`, unbounded depth.
    Dyadic,
    /// Nodes of a middle-interval construction tree, up to its depth.
    Cantor(ConstructionTree),
}

/// Left-mass fraction of each node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Weights {
    Binomial(Rational),
    /// `table[k][i]` is the left fraction of node `(k, i)`.
    Table(Vec<Vec<Rational>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeMeasure {
    pub base: MeasureBase,
    pub weights: Weights,
    pub total_mass: Rational,
}

/// Certified enclosure of a mass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassBracket {
    pub lower: Rational,
    pub upper: Rational,
}

impl MassBracket {
    pub fn exact(v: Rational) -> Self {
        MassBracket {
            lower: v.clone(),
            upper: v,
        }
    }

    pub fn zero() -> Self {
        Self::exact(Rational::zero())
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lower <= v && v <= &self.upper
    }

    pub fn add(&self, other: &MassBracket) -> MassBracket {
        MassBracket {
            lower: &self.lower + &other.lower,
            upper: &self.upper + &other.upper,
        }
    }
}

impl fmt::Display for MassBracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lower)
        } else {
            write!(f, "[{}, {}]", self.lower, self.upper)
        }
    }
}

fn in_open_unit(w: &Rational) -> bool {
    w.is_positive() && w < &Rational::one()
}

impl TreeMeasure {
    pub fn new(base: MeasureBase, weights: Weights, total_mass: Rational) -> Result<Self> {
        let m = TreeMeasure {
            base,
            weights,
            total_mass,
        };
        m.validate()?;
        Ok(m)
    }

    /// `μ_p` on the dyadic tree: left children get fraction `p`.
    pub fn binomial(p: Rational) -> Result<Self> {
        Self::new(MeasureBase::Dyadic, Weights::Binomial(p), Rational::one())
    }

    pub fn lebesgue() -> Self {
        TreeMeasure {
            base: MeasureBase::Dyadic,
            weights: Weights::Binomial(Rational::new(1.into(), 2.into())),
            total_mass: Rational::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.total_mass.is_positive() {
            return Err(Error::InvalidParameter("total mass must be positive".into()));
        }
        match &self.weights {
            Weights::Binomial(p) => {
                if !in_open_unit(p) {
                    return Err(Error::InvalidParameter(format!("weight {p} is not in (0,1)")));
                }
            }
            Weights::Table(t) => {
                for (k, row) in t.iter().enumerate() {
                    if k >= 64 || row.len() != 1usize << k {
                        return Err(Error::InvalidParameter(format!(
                            "weight table level {k} has {} entries",
                            row.len()
                        )));
                    }
                    if let Some(i) = row.iter().position(|w| !in_open_unit(w)) {
                        return Err(Error::InvalidParameter(format!(
                            "weight ({k}, {i}) is not in (0,1)"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Deepest level at which node masses are defined; `None` means unbounded.
    pub fn resolvable_depth(&self) -> Option<u32> {
        let from_base = match &self.base {
            MeasureBase::Dyadic => None,
            MeasureBase::Cantor(t) => Some(t.depth),
        };
        let from_weights = match &self.weights {
            Weights::Binomial(_) => None,
            Weights::Table(t) => Some(t.len() as u32),
        };
        match (from_base, from_weights) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    fn effective_depth(&self, depth: u32) -> u32 {
        self.resolvable_depth().map_or(depth, |d| d.min(depth))
    }

    fn check_node(&self, level: u32, index: u64) -> Result<()> {
        let ok = level < 64
            && index < (1u64 << level)
            && self.resolvable_depth().is_none_or(|d| level <= d);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidNode { level, index })
        }
    }

    pub fn node_interval(&self, level: u32, index: u64) -> Result<RationalInterval> {
        self.check_node(level, index)?;
        Ok(self.node_interval_unchecked(level, index))
    }

    fn node_interval_unchecked(&self, level: u32, index: u64) -> RationalInterval {
        match &self.base {
            MeasureBase::Dyadic => {
                let w = pow2(-(level as i64));
                let lo = Rational::from_integer(BigInt::from(index)) * &w;
                let hi = &lo + &w;
                RationalInterval::closed_unchecked(lo, hi)
            }
            MeasureBase::Cantor(t) => t.level(level)[index as usize].clone(),
        }
    }

    fn left_weight(&self, level: u32, index: u64) -> &Rational {
        match &self.weights {
            Weights::Binomial(p) => p,
            Weights::Table(t) => &t[level as usize][index as usize],
        }
    }

    /// Exact mass of node `(level, index)`: the product of edge weights on
    /// its root path times the total mass.
    pub fn node_mass(&self, level: u32, index: u64) -> Result<Rational> {
        self.check_node(level, index)?;
        let mut mass = self.total_mass.clone();
        for k in 0..level {
            let parent = index >> (level - k);
            let w = self.left_weight(k, parent);
            if (index >> (level - k - 1)) & 1 == 0 {
                mass *= w;
            } else {
                mass *= Rational::one() - w;
            }
        }
        Ok(mass)
    }

    /// Masses of every node at `level`, left to right.
    pub fn level_masses(&self, level: u32) -> Result<Vec<Rational>> {
        if level > MAX_ENUMERATION_DEPTH {
            return Err(Error::DepthLimit {
                requested: level,
                limit: MAX_ENUMERATION_DEPTH,
            });
        }
        if let Some(d) = self.resolvable_depth() {
            if level > d {
                return Err(Error::DepthLimit {
                    requested: level,
                    limit: d,
                });
            }
        }
        let mut cur = vec![self.total_mass.clone()];
        for k in 0..level {
            let mut next = Vec::with_capacity(cur.len() * 2);
            for (i, m) in cur.iter().enumerate() {
                let l = m * self.left_weight(k, i as u64);
                next.push(l.clone());
                next.push(m - l);
            }
            cur = next;
        }
        Ok(cur)
    }

    /// Bracket for `μ(I)`: nodes at `depth` inside `I` count in both
    /// bounds, nodes that only straddle `I` count in the upper bound.
    pub fn interval_mass(&self, iv: &RationalInterval, depth: u32) -> MassBracket {
        let depth = self.effective_depth(depth);
        let mut acc = MassBracket::zero();
        let mut stack = vec![(0u32, 0u64, self.total_mass.clone())];
        while let Some((level, index, mass)) = stack.pop() {
            let node = self.node_interval_unchecked(level, index);
            if !node.overlaps(iv) {
                continue;
            }
            if iv.lo <= node.lo && node.hi <= iv.hi {
                acc.lower += &mass;
                acc.upper += &mass;
                continue;
            }
            if level == depth {
                acc.upper += &mass;
                continue;
            }
            let l = &mass * self.left_weight(level, index);
            let r = &mass - &l;
            stack.push((level + 1, 2 * index + 1, r));
            stack.push((level + 1, 2 * index, l));
        }
        acc
    }

    /// Bracket for `μ([0, x])`.
    pub fn cdf(&self, x: &Rational, depth: u32) -> Result<MassBracket> {
        if x.is_negative() || x > &Rational::one() {
            return Err(Error::InvalidParameter(format!("x = {x} is outside [0,1]")));
        }
        Ok(self.interval_mass(
            &RationalInterval::closed_unchecked(Rational::zero(), x.clone()),
            depth,
        ))
    }

    /// Mass of the remainder `E_N` of a cut-out configuration.
    pub fn cutout_mass(&self, config: &CutOutConfig, n: usize, depth: u32) -> Result<MassBracket> {
        Ok(config
            .remaining_set(n)?
            .iter()
            .fold(MassBracket::zero(), |acc, c| acc.add(&self.interval_mass(c, depth))))
    }

    /// Exact `μ([0, x])` for a binomial measure on the dyadic tree at any
    /// rational `x`, summed over the eventually periodic binary expansion.
    pub fn binomial_cdf_exact(&self, x: &Rational) -> Option<Rational> {
        let p = match (&self.base, &self.weights) {
            (MeasureBase::Dyadic, Weights::Binomial(p)) => p,
            _ => return None,
        };
        if !x.is_positive() {
            return Some(Rational::zero());
        }
        if x >= &Rational::one() {
            return Some(self.total_mass.clone());
        }
        let q = Rational::one() - p;
        let mut digits: Vec<bool> = Vec::new();
        let mut seen: BTreeMap<Rational, usize> = BTreeMap::new();
        let mut r = x.clone();
        let cycle_start = loop {
            if r.is_zero() {
                break None;
            }
            if let Some(&at) = seen.get(&r) {
                break Some(at);
            }
            seen.insert(r.clone(), digits.len());
            r *= int(2);
            let bit = r >= Rational::one();
            if bit {
                r -= Rational::one();
            }
            digits.push(bit);
        };
        // Sum of left-sibling masses over a digit block, and the block's mass.
        let block = |bits: &[bool]| {
            let mut sum = Rational::zero();
            let mut prefix = Rational::one();
            for &b in bits {
                if b {
                    sum += &prefix * p;
                    prefix *= &q;
                } else {
                    prefix *= p;
                }
            }
            (sum, prefix)
        };
        let value = match cycle_start {
            None => block(&digits).0,
            Some(s) => {
                let (a, m_pre) = block(&digits[..s]);
                let (b, m_per) = block(&digits[s..]);
                a + m_pre * b / (Rational::one() - m_per)
            }
        };
        Some(value * &self.total_mass)
    }

    /// Exact `μ(I)` when it is computable: binomial dyadic measures at any
    /// rational endpoints, otherwise only when the bracket at full
    /// resolution collapses.
    pub fn exact_interval_mass(&self, iv: &RationalInterval) -> Option<Rational> {
        if let (Some(a), Some(b)) = (self.binomial_cdf_exact(&iv.lo), self.binomial_cdf_exact(&iv.hi))
        {
            return Some(b - a);
        }
        let d = self.resolvable_depth()?;
        let br = self.interval_mass(iv, d);
        br.is_exact().then_some(br.lower)
    }
}

/// Restriction of `m` to the construction tree: node `(k, i)` carries
/// `μ(node ∩ F_d)` with `F_d` the union of the depth-`d` nodes, so the total
/// mass is `μ(F_d)`.
pub fn restrict(m: &TreeMeasure, tree: &ConstructionTree) -> Result<TreeMeasure> {
    if tree.depth == 0 {
        return Ok(m.clone());
    }
    if tree.depth > MAX_ENUMERATION_DEPTH {
        return Err(Error::DepthLimit {
            requested: tree.depth,
            limit: MAX_ENUMERATION_DEPTH,
        });
    }
    let leaves: Vec<Rational> = match &m.base {
        MeasureBase::Cantor(base) => {
            if base.beta != tree.beta || base.depth < tree.depth {
                return Err(Error::Misaligned(
                    "target tree is not a truncation of the measure's tree".into(),
                ));
            }
            let d = m.resolvable_depth().unwrap_or(0);
            if d < tree.depth {
                return Err(Error::Misaligned(format!(
                    "weights resolve only {d} levels, tree has {}",
                    tree.depth
                )));
            }
            m.level_masses(tree.depth)?
        }
        MeasureBase::Dyadic => tree
            .leaves()
            .iter()
            .map(|leaf| {
                m.exact_interval_mass(leaf).ok_or_else(|| {
                    Error::Misaligned(format!("leaf {leaf} is not a union of measure nodes"))
                })
            })
            .collect::<Result<_>>()?,
    };
    let mut masses = vec![leaves];
    for _ in 0..tree.depth {
        let below = masses.last().unwrap();
        let above: Vec<Rational> = below.chunks(2).map(|c| &c[0] + &c[1]).collect();
        masses.push(above);
    }
    masses.reverse();
    let mut table = Vec::with_capacity(tree.depth as usize);
    for k in 0..tree.depth as usize {
        let row: Vec<Rational> = masses[k]
            .iter()
            .enumerate()
            .map(|(i, parent)| &masses[k + 1][2 * i] / parent)
            .collect();
        table.push(row);
    }
    TreeMeasure::new(
        MeasureBase::Cantor(tree.clone()),
        Weights::Table(table),
        masses[0][0].clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{build_cantor, Ambient};
    use crate::rational::rat;
    use crate::seq::SequenceFamily;

    fn c(lo: Rational, hi: Rational) -> RationalInterval {
        RationalInterval::closed(lo, hi).unwrap()
    }

    fn mu(p: Rational) -> TreeMeasure {
        TreeMeasure::binomial(p).unwrap()
    }

    #[test]
    fn node_masses() {
        assert_eq!(TreeMeasure::lebesgue().node_mass(2, 0).unwrap(), rat(1, 4));
        let m = mu(rat(1, 3));
        assert_eq!(m.node_mass(2, 0).unwrap(), rat(1, 9));
        assert_eq!(m.node_mass(2, 3).unwrap(), rat(4, 9));
        assert_eq!(m.node_mass(3, 5).unwrap(), rat(4, 27));
        assert!(matches!(m.node_mass(2, 4), Err(Error::InvalidNode { .. })));
    }

    #[test]
    fn interval_masses() {
        let leb = TreeMeasure::lebesgue();
        let b = leb.interval_mass(&c(int(0), rat(1, 3)), 10);
        assert!(b.contains(&rat(1, 3)));
        assert!(b.width() <= rat(2, 1024));
        let m = mu(rat(1, 3));
        assert_eq!(m.interval_mass(&c(int(0), rat(1, 2)), 1), MassBracket::exact(rat(1, 3)));
        assert_eq!(m.interval_mass(&c(rat(1, 4), rat(1, 2)), 2), MassBracket::exact(rat(2, 9)));
        assert_eq!(m.interval_mass(&c(rat(1, 4), rat(1, 4)), 8), MassBracket::zero());
    }

    #[test]
    fn cdf_values() {
        assert_eq!(
            TreeMeasure::lebesgue().cdf(&rat(3, 8), 3).unwrap(),
            MassBracket::exact(rat(3, 8))
        );
        let m = mu(rat(1, 3));
        assert_eq!(m.cdf(&rat(1, 4), 2).unwrap(), MassBracket::exact(rat(1, 9)));
        let b = m.cdf(&rat(1, 3), 20).unwrap();
        let exact = m.binomial_cdf_exact(&rat(1, 3)).unwrap();
        assert!(b.contains(&exact));
        // The straddling leaf at depth 20 has 10 left and 10 right steps.
        assert!(b.width() <= crate::rational::powi(&rat(2, 9), 10));
    }

    #[test]
    fn exact_cdf_periodic() {
        // 1/3 = 0.0101...; F = p Σ (p q)^k q ... summed in closed form.
        let p = rat(1, 3);
        let m = mu(p.clone());
        let q = Rational::one() - &p;
        let want = &p * &p / (Rational::one() - &p * &q);
        assert_eq!(m.binomial_cdf_exact(&rat(1, 3)).unwrap(), want);
        let leb = TreeMeasure::lebesgue();
        for (a, b) in [(1, 3), (2, 7), (5, 12), (1, 10)] {
            assert_eq!(leb.binomial_cdf_exact(&rat(a, b)).unwrap(), rat(a, b));
        }
    }

    #[test]
    fn cutout_examples() {
        let fam = SequenceFamily::constant(rat(9, 10)).unwrap();
        let cfg = CutOutConfig::new(
            vec![c(int(0), rat(1, 4)), c(rat(1, 8), rat(3, 8))],
            fam.clone(),
            Ambient::UnitInterval,
        )
        .unwrap();
        assert_eq!(
            TreeMeasure::lebesgue().cutout_mass(&cfg, 2, 4).unwrap(),
            MassBracket::exact(rat(5, 8))
        );
        let cfg = CutOutConfig::new(vec![c(rat(1, 2), int(1))], fam, Ambient::UnitInterval).unwrap();
        assert_eq!(
            mu(rat(1, 3)).cutout_mass(&cfg, 1, 4).unwrap(),
            MassBracket::exact(rat(1, 3))
        );
    }

    #[test]
    fn level_consistency() {
        let m = mu(rat(2, 7));
        for k in 0..6u32 {
            let up = m.level_masses(k).unwrap();
            let down = m.level_masses(k + 1).unwrap();
            for (i, v) in up.iter().enumerate() {
                assert_eq!(v, &(&down[2 * i] + &down[2 * i + 1]));
                assert_eq!(v, &m.node_mass(k, i as u64).unwrap());
            }
        }
    }

    #[test]
    fn restrict_lebesgue_to_thirds() {
        let tree = build_cantor(&SequenceFamily::constant(rat(1, 3)).unwrap(), 3).unwrap();
        let r = restrict(&TreeMeasure::lebesgue(), &tree).unwrap();
        assert_eq!(r.total_mass, rat(8, 27));
        match &r.weights {
            Weights::Table(t) => assert!(t.iter().flatten().all(|w| *w == rat(1, 2))),
            _ => panic!("expected a table"),
        }
        assert_eq!(r.node_mass(2, 1).unwrap(), rat(2, 27));
    }

    #[test]
    fn restrict_binomial_to_thirds() {
        let m = mu(rat(1, 3));
        let tree = build_cantor(&SequenceFamily::constant(rat(1, 3)).unwrap(), 1).unwrap();
        let r = restrict(&m, &tree).unwrap();
        let left = m.binomial_cdf_exact(&rat(1, 3)).unwrap();
        let right = Rational::one() - m.binomial_cdf_exact(&rat(2, 3)).unwrap();
        match &r.weights {
            Weights::Table(t) => assert_eq!(t[0][0], &left / (&left + &right)),
            _ => panic!("expected a table"),
        }
        assert_eq!(r.total_mass, left + right);
    }

    #[test]
    fn restrict_depth_zero_is_identity() {
        let tree = build_cantor(&SequenceFamily::constant(rat(1, 3)).unwrap(), 0).unwrap();
        let m = mu(rat(1, 3));
        assert_eq!(restrict(&m, &tree).unwrap(), m);
    }

    #[test]
    fn restrict_misaligned_table() {
        let tree = build_cantor(&SequenceFamily::constant(rat(1, 3)).unwrap(), 1).unwrap();
        let m = TreeMeasure::new(
            MeasureBase::Dyadic,
            Weights::Table(vec![vec![rat(1, 2)], vec![rat(1, 3), rat(1, 3)]]),
            int(1),
        )
        .unwrap();
        assert!(matches!(restrict(&m, &tree), Err(Error::Misaligned(_))));
    }
}

//! Dyadic porous Cantor construction: every surviving piece loses one
//! aligned dyadic subinterval of length comparable to `α_n · diam`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{floor_log2, pow2, Rational};
use crate::seq::SequenceFamily;

use super::interval::RationalInterval;

/// Finest dyadic level a porous build may touch unless told otherwise.
pub const DEFAULT_RESOLUTION: u32 = 48;
/// Cap on the number of surviving pieces at any stage.
pub const DEFAULT_NODE_LIMIT: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PorousStage {
    /// Surviving pieces `Q^j` of `F_n`, left to right.
    pub pieces: Vec<RationalInterval>,
    /// `Q̃^j` removed from each piece on the way to `F_{n+1}`.
    pub removed: Vec<RationalInterval>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PorousConstruction {
    pub alpha: SequenceFamily,
    /// `stages[n]` describes `F_n`; the last stage has no removals.
    pub stages: Vec<PorousStage>,
}

impl PorousConstruction {
    pub fn depth(&self) -> u32 {
        self.stages.len() as u32 - 1
    }

    pub fn pieces(&self, n: u32) -> &[RationalInterval] {
        &self.stages[n as usize].pieces
    }

    /// Lebesgue measure of `F_n`.
    pub fn length(&self, n: u32) -> Rational {
        self.pieces(n)
            .iter()
            .map(RationalInterval::diameter)
            .fold(Rational::zero(), |a, b| a + b)
    }
}

pub fn build_porous(alpha: &SequenceFamily, depth: u32) -> Result<PorousConstruction> {
    build_porous_with_limits(alpha, depth, DEFAULT_RESOLUTION, DEFAULT_NODE_LIMIT)
}

/// Splits `[lo, hi]` (dyadic endpoints) into maximal aligned dyadic pieces.
fn aligned_pieces(lo: &Rational, hi: &Rational, out: &mut Vec<RationalInterval>) {
    let mut at = lo.clone();
    while &at < hi {
        // Largest 2^-k that divides `at` and fits before `hi`.
        let room = hi - &at;
        let mut k = -floor_log2(&room);
        loop {
            let len = pow2(-k);
            if (&at / &len).is_integer() {
                let next = &at + &len;
                out.push(RationalInterval::closed_unchecked(at.clone(), next.clone()));
                at = next;
                break;
            }
            k += 1;
        }
    }
}

pub fn build_porous_with_limits(
    alpha: &SequenceFamily,
    depth: u32,
    resolution: u32,
    node_limit: usize,
) -> Result<PorousConstruction> {
    let mut stages = Vec::with_capacity(depth as usize + 1);
    let mut current = vec![RationalInterval::unit()];
    for n in 1..=depth {
        let a = alpha.term_exact(n as u64)?;
        if a <= Rational::zero() || a >= Rational::one() {
            return Err(Error::InvalidParameter(alloc::format!(
                "alpha_{n} = {a} is not in (0,1)"
            )));
        }
        let mut removed = Vec::with_capacity(current.len());
        let mut next = Vec::new();
        for q in &current {
            let target = &a * q.diameter();
            let e = floor_log2(&target);
            let required = u32::try_from(-e).unwrap_or(0);
            if -e > resolution as i64 {
                return Err(Error::ResolutionExhausted {
                    required,
                    budget: resolution,
                });
            }
            let len = pow2(e);
            let cut_hi = &q.lo + &len;
            removed.push(RationalInterval::closed_unchecked(q.lo.clone(), cut_hi.clone()));
            aligned_pieces(&cut_hi, &q.hi, &mut next);
            if next.len() > node_limit {
                return Err(Error::NodeLimit(node_limit));
            }
        }
        stages.push(PorousStage {
            pieces: core::mem::replace(&mut current, next),
            removed,
        });
    }
    stages.push(PorousStage {
        pieces: current,
        removed: Vec::new(),
    });
    Ok(PorousConstruction {
        alpha: alpha.clone(),
        stages,
    })
}

use alloc::format;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::geom::{verify_thick, ThickStructure, ThickVerdict};
use crate::rational::Rational;
use crate::real::{pow, Bracket, DEFAULT_PRECISION};
use crate::seq::{Convergence, SequenceFamily};

use super::product::{scaled_product_bracket, ProductBracket};

/// Factors kept exact beyond `N_0` before the tail bounds take over.
pub const DEFAULT_FAT_TERMS: u64 = 64;
/// Largest truncation tried when the tail sum is still too big.
const MAX_FAT_TERMS: u64 = 1 << 16;
/// Index cap for the `N_0` search.
const MAX_INDEX: u64 = 1 << 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FatConclusion {
    Positive,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FatnessCertificate {
    pub alpha: SequenceFamily,
    pub t: Rational,
    pub c3n: Rational,
    pub n0: u64,
    pub bound: ProductBracket,
    pub conclusion: FatConclusion,
}

/// Least `N_0` with `C3N · α_n^t < 1` for every `n >= N_0`, certified from
/// term upper bounds. Needs a non-increasing family.
pub fn solve_n0(alpha: &SequenceFamily, t: &Rational, c3n: &Rational) -> Result<u64> {
    if !alpha.is_monotone() {
        return Err(Error::PreconditionViolated(
            "N_0 search needs non-increasing terms".into(),
        ));
    }
    let ok = |n: u64| -> Result<bool> { Ok(c3n * alpha.term_pow(n, t)?.hi < Rational::one()) };
    if let Some(len) = alpha.len() {
        // Finite families: scan, the cap is the length.
        for n in 1..=len as u64 {
            if ok(n)? {
                return Ok(n);
            }
        }
        return Ok(len as u64 + 1);
    }
    if ok(1)? {
        return Ok(1);
    }
    // Gallop to a passing index, then bisect.
    let mut bad = 1u64;
    let mut good = 2u64;
    while !ok(good)? {
        bad = good;
        if good >= MAX_INDEX {
            return Err(Error::NoProgress(good));
        }
        good = good.saturating_mul(2);
    }
    while good - bad > 1 {
        let mid = bad + (good - bad) / 2;
        if ok(mid)? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(good)
}

/// Certificate for a thick structure: checks the structure, then bounds
/// `∏_{n>=N_0} (1 - C3N α_n^t)`.
pub fn certify_fat_thick(ts: &ThickStructure, t: &Rational, c3n: &Rational) -> Result<FatnessCertificate> {
    certify_fat_thick_with(ts, t, c3n, DEFAULT_FAT_TERMS)
}

pub fn certify_fat_thick_with(
    ts: &ThickStructure,
    t: &Rational,
    c3n: &Rational,
    terms: u64,
) -> Result<FatnessCertificate> {
    match verify_thick(ts, ts.depth()) {
        ThickVerdict::Valid => {}
        ThickVerdict::Violation {
            condition,
            level,
            index,
        } => {
            return Err(Error::PreconditionViolated(format!(
                "thick structure fails {condition:?} at level {level}, index {index}"
            )))
        }
    }
    certify_fat_alpha(&ts.alpha, t, c3n, terms)
}

/// The product part of the certificate, for a bare sequence.
pub fn certify_fat_alpha(
    alpha: &SequenceFamily,
    t: &Rational,
    c3n: &Rational,
    terms: u64,
) -> Result<FatnessCertificate> {
    if !t.is_positive() || !c3n.is_positive() {
        return Err(Error::InvalidParameter("t and C3N must be positive".into()));
    }
    if alpha.classify_ellp(t)? == Convergence::Diverges {
        return Err(Error::NotInEllT);
    }
    let n0 = solve_n0(alpha, t, c3n)?;
    let mut terms = terms.max(1);
    let bound = loop {
        let b = scaled_product_bracket(alpha, c3n, t, n0, n0 + terms - 1)?;
        if b.tail_lower.is_positive() || terms >= MAX_FAT_TERMS {
            break b;
        }
        terms *= 4;
    };
    let conclusion = if bound.lower().is_positive() {
        FatConclusion::Positive
    } else {
        FatConclusion::Inconclusive
    };
    Ok(FatnessCertificate {
        alpha: alpha.clone(),
        t: t.clone(),
        c3n: c3n.clone(),
        n0,
        bound,
        conclusion,
    })
}

/// `C_3 = c^{-t} C_1 C_2 C^m`, enclosed.
pub fn assemble_c3(
    c: &Rational,
    t: &Rational,
    c1: &Rational,
    c2: &Rational,
    doubling: &Rational,
    m: u32,
) -> Bracket {
    pow(c, &-t, DEFAULT_PRECISION)
        .scale(&(c1 * c2))
        .scale(&crate::rational::powi(doubling, m as i64))
}

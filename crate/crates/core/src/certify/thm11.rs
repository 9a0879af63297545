use alloc::format;

use num_traits::{One, Signed};

use crate::doubling::DoublingReport;
use crate::error::{Error, Result};
use crate::geom::CutOutConfig;
use crate::rational::{int, Rational};
use crate::real::{pow, DEFAULT_PRECISION};
use crate::seq::Convergence;

use super::fat::FatConclusion;
use super::lemmas::zeta_tail;

/// Explicit terms of `c_p` before the family's tail bound.
const CP_TERMS: u64 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thm11Bound {
    pub n: u64,
    pub r: Rational,
    pub p: Rational,
    pub s: Rational,
    pub t: Rational,
    /// `C_1 = λ 2^{-s}`: a ball of diameter `d` has radius `d/2`.
    pub c1: Rational,
    pub c2: Rational,
    pub gap: Rational,
    pub c_p_upper: Rational,
    /// Lower bound on `C_1 N^{-Rs}`.
    pub main_term: Rational,
    /// Upper bound on `c_p^{t/p} C_2 Σ_{m>=N} m^{-t/p}`.
    pub tail_term: Rational,
    /// `main_term - tail_term`, a certified lower bound on `ν(E)`.
    pub value: Rational,
    pub conclusion: FatConclusion,
}

/// Lower bound on `C_1 N^{-Rs}` and upper bound on
/// `c_p^{t/p} C_2 Σ_{m>=N} m^{-t/p}`.
#[allow(clippy::too_many_arguments)]
pub fn thm11_terms(
    c1: &Rational,
    c2: &Rational,
    r: &Rational,
    s: &Rational,
    t: &Rational,
    p: &Rational,
    n: u64,
    c_p_upper: &Rational,
) -> (Rational, Rational) {
    let prec = DEFAULT_PRECISION;
    let main = c1 * pow(&int(n as i64), &-(r * s), prec).lo;
    let q = t / p;
    let tail = pow(c_p_upper, &q, prec).hi * c2 * zeta_tail(n, &q).hi;
    (main, tail)
}

/// The final lower bound for `ν(E)` with `(λ, s, Λ, t)` from a doubling
/// report's validated fit.
pub fn thm11_bound(
    config: &CutOutConfig,
    report: &DoublingReport,
    r: &Rational,
    n: u64,
    p: &Rational,
) -> Result<Thm11Bound> {
    let fit = report.lemma21_fit.as_ref().ok_or_else(|| {
        Error::PreconditionViolated("doubling report has no validated (λ, s, Λ, t) fit".into())
    })?;
    if !r.is_positive() || !p.is_positive() {
        return Err(Error::InvalidParameter("R and p must be positive".into()));
    }
    let (s, t) = (&fit.s, &fit.t);
    if p >= &(t / (r * s + Rational::one())) {
        return Err(Error::ExponentWindowEmpty);
    }
    let family = &config.diam_family;
    if family.classify_ellp(p)? == Convergence::Diverges {
        return Err(Error::DivergentSeries);
    }
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let prec = DEFAULT_PRECISION;
    let nn = int(n as i64);
    let (_, gap) = config.largest_gap(n as usize)?;
    let floor = pow(&nn, &-r.clone(), prec);
    if gap < floor.hi {
        return Err(Error::GapTooSmall {
            gap: format!("{gap}"),
        });
    }
    let c1 = &fit.lambda_lower * pow(&int(2), &-s.clone(), prec).lo;
    let c2 = fit.lambda_upper.clone();
    let terms = match family.len() {
        Some(len) => CP_TERMS.min(len as u64),
        None => CP_TERMS,
    };
    let c_p_upper = family.partial_sum(p, 1, terms)?.hi + family.tail_sum_upper(p, terms)?;
    let (main_term, tail_term) = thm11_terms(&c1, &c2, r, s, t, p, n, &c_p_upper);
    let value = &main_term - &tail_term;
    let conclusion = if value.is_positive() {
        FatConclusion::Positive
    } else {
        FatConclusion::Inconclusive
    };
    Ok(Thm11Bound {
        n,
        r: r.clone(),
        p: p.clone(),
        s: s.clone(),
        t: t.clone(),
        c1,
        c2,
        gap,
        c_p_upper,
        main_term,
        tail_term,
        value,
        conclusion,
    })
}

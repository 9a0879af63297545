use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};
use crate::real::{log2, pow, Bracket, Exp2Table, DEFAULT_PRECISION};

/// Grid step for exponents solved here.
pub const Q_GRID: i64 = 64;
/// Direct terms summed before the integral tail takes over.
const DIRECT_TERMS: u64 = 64;
const MAX_M: u64 = 1 << 40;

/// Least `Q` on the `1/64` grid with `Λ (D+2)^t 2^{1-tQ} < ε/6`, checked
/// with a certified enclosure of the left side. Never below `1/64`.
pub fn lemma41_solve(lambda: &Rational, t: &Rational, d: &Rational, eps: &Rational) -> Result<Rational> {
    for (name, v) in [("Λ", lambda), ("t", t), ("D", d), ("ε", eps)] {
        if !v.is_positive() {
            return Err(Error::InvalidParameter(format!("{name} must be positive")));
        }
    }
    let prec = DEFAULT_PRECISION;
    let e2 = Exp2Table::new(prec);
    let base = pow(&(d + int(2)), t, prec).scale(lambda);
    let target = eps / int(6);
    let lhs = |q: &Rational| -> Bracket {
        let e = Rational::one() - t * q;
        base.mul(&e2.eval(&Bracket::exact(e)))
    };
    // Q* = (1 + log2(6 Λ (D+2)^t / ε)) / t; start just below its grid floor.
    let ratio = Bracket::new(&base.lo / &target, &base.hi / &target);
    let l = Bracket::new(log2(&ratio.lo, prec).lo, log2(&ratio.hi, prec).hi);
    let q_star_lo = (&l.lo + Rational::one()) / t;
    let step = Rational::new(1.into(), Q_GRID.into());
    let mut k = (&q_star_lo / &step).floor().to_integer().to_i64().unwrap_or(i64::MAX) - 1;
    k = k.max(1);
    loop {
        let q = int(k) * &step;
        if lhs(&q).hi < target {
            return Ok(q);
        }
        k = k.checked_add(1).ok_or(Error::NoProgress(u64::MAX))?;
    }
}

/// Outcome of the tail-sum threshold scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma43Result {
    /// Least `M` such that the inequality holds for every `N >= M`.
    pub m: u64,
    /// From where the integral bound alone settles every larger `N`.
    pub integral_m: u64,
    /// `N` values in `[M, 4M]` rechecked by direct certified summation.
    pub verified: Vec<u64>,
    /// Whether `M - 1` is a certified failure (false when `M = 1`).
    pub fails_below: bool,
}

fn pow_b(x: &Rational, y: &Rational) -> Bracket {
    pow(x, y, DEFAULT_PRECISION)
}

/// Enclosure of `Σ_{m>=N} m^{-δ}`: direct terms plus integral tails
/// `∫_L^∞ <= tail <= ∫_{L-1/2}^∞`.
pub fn zeta_tail(n: u64, delta: &Rational) -> Bracket {
    let mut acc = Bracket::zero();
    let neg = -delta.clone();
    for m in n..n + DIRECT_TERMS {
        acc = acc.add(&pow_b(&int(m as i64), &neg));
    }
    let l = int((n + DIRECT_TERMS) as i64);
    let e = Rational::one() - delta;
    let dm1 = delta - Rational::one();
    let lower = pow_b(&l, &e).lo / &dm1;
    let upper = pow_b(&(l - Rational::new(1.into(), 2.into())), &e).hi / &dm1;
    acc.add(&Bracket::new(lower, upper))
}

/// Decides `Σ_{m>=N} m^{-δ} < ε N^{-γ}`: `Some(true)` holds, `Some(false)`
/// fails, `None` undecided at this precision.
fn direct_check(n: u64, eps: &Rational, delta: &Rational, gamma: &Rational) -> Option<bool> {
    let lhs = zeta_tail(n, delta);
    let rhs = pow_b(&int(n as i64), &-gamma.clone()).scale(eps);
    if lhs.hi < rhs.lo {
        Some(true)
    } else if lhs.lo > rhs.hi {
        Some(false)
    } else {
        None
    }
}

/// Least `M` with `Σ_{m>=N} m^{-δ} < ε / N^γ` for all `N >= M`.
///
/// `N^γ (N-1)^{1-δ} / (δ-1)` bounds the left side times `N^γ` and decreases
/// for `N >= 2`, so once it drops below `ε` every larger `N` holds. Below
/// that point the scan walks down with direct certified sums.
pub fn lemma43_find_m(eps: &Rational, delta: &Rational, gamma: &Rational) -> Result<Lemma43Result> {
    if !eps.is_positive() || !gamma.is_positive() {
        return Err(Error::InvalidParameter("ε and γ must be positive".into()));
    }
    if delta <= &(gamma + Rational::one()) {
        return Err(Error::PreconditionViolated(format!(
            "need δ > γ + 1, got δ = {delta}, γ = {gamma}"
        )));
    }
    let dm1 = delta - Rational::one();
    let integral_ok = |n: u64| -> bool {
        let a = pow_b(&int(n as i64), gamma);
        let b = pow_b(&int(n as i64 - 1), &-dm1.clone());
        &a.hi * &b.hi / &dm1 < *eps
    };
    let mut bad = 1u64;
    let mut good = 2u64;
    while !integral_ok(good) {
        bad = good;
        good = good.checked_mul(2).filter(|g| *g <= MAX_M).ok_or(Error::NoProgress(MAX_M))?;
    }
    while good - bad > 1 {
        let mid = bad + (good - bad) / 2;
        if mid >= 2 && integral_ok(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    let integral_m = good;
    let mut m = integral_m;
    let mut fails_below = false;
    while m > 1 {
        match direct_check(m - 1, eps, delta, gamma) {
            Some(true) => m -= 1,
            Some(false) => {
                fails_below = true;
                break;
            }
            None => break,
        }
    }
    let verified = (m..=4 * m)
        .filter(|&n| direct_check(n, eps, delta, gamma) == Some(true))
        .collect();
    Ok(Lemma43Result {
        m,
        integral_m,
        verified,
        fails_below,
    })
}

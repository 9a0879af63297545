use core::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{powi, Rational};
use crate::real::{exp_neg_upper, Bracket};
use crate::seq::{log_floor_exponent, Convergence, SequenceFamily};

/// Terms added to the upper tail estimate `exp(-Σ x_i)`.
pub const TAIL_TERMS: u64 = 16;
/// Exact partial products are rounded outward once they outgrow this.
const EXACT_BITS_LIMIT: u64 = 1 << 15;
const ROUND_BITS: u32 = 256;

/// Certified enclosure of `∏_{i>=from} (1 - x_i)`, split at `n`:
/// an enclosure of the finite part `i <= n` times tail bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductBracket {
    pub from: u64,
    pub n: u64,
    pub partial: Bracket,
    /// `1 - Σ_{i>n} x_i`, or zero when that sum is not below one.
    pub tail_lower: Rational,
    /// `exp(-Σ x_i)` over the next few tail terms, enclosed from above.
    pub tail_upper: Rational,
}

impl ProductBracket {
    pub fn lower(&self) -> Rational {
        &self.partial.lo * &self.tail_lower
    }

    pub fn upper(&self) -> Rational {
        &self.partial.hi * &self.tail_upper
    }

    pub fn width(&self) -> Rational {
        self.upper() - self.lower()
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lower() <= v && v <= &self.upper()
    }
}

impl fmt::Display for ProductBracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower(), self.upper())
    }
}

fn size(r: &Rational) -> u64 {
    r.numer().bits() + r.denom().bits()
}

/// Enclosure of `∏_{i=from}^{to} (1 - c x_i^t)`; factors below zero are
/// clamped to zero.
pub fn factor_product(
    x: &SequenceFamily,
    c: &Rational,
    t: &Rational,
    from: u64,
    to: u64,
) -> Result<Bracket> {
    let mut lo = Rational::one();
    let mut hi = Rational::one();
    let mut apply = |y: &Bracket, count: u64| {
        let f_lo = (Rational::one() - c * &y.hi).max(Rational::zero());
        let f_hi = (Rational::one() - c * &y.lo).max(Rational::zero());
        if count == 1 {
            lo *= f_lo;
            hi *= f_hi;
        } else {
            lo *= powi(&f_lo, count as i64);
            hi *= powi(&f_hi, count as i64);
        }
        if size(&lo) > EXACT_BITS_LIMIT || size(&hi) > EXACT_BITS_LIMIT {
            let b = Bracket::new(lo.clone(), hi.clone()).round_outward(ROUND_BITS);
            lo = b.lo;
            hi = b.hi;
        }
    };
    if from > to {
        return Ok(Bracket::exact(Rational::one()));
    }
    if let SequenceFamily::LogFloor { .. } = x {
        // Terms are constant on blocks [2^k - 1, 2^{k+1} - 2].
        let mut i = from;
        while i <= to {
            let k = log_floor_exponent(i);
            let end = ((1u64 << (k + 1)) - 2).min(to);
            apply(&x.term_pow(i, t)?, end - i + 1);
            i = end + 1;
        }
    } else {
        for i in from..=to {
            apply(&x.term_pow(i, t)?, 1);
        }
    }
    Ok(Bracket::new(lo, hi))
}

/// Certified `Σ_{i>n} c x_i^t`, or `None` when the series diverges.
fn tail_sum(x: &SequenceFamily, c: &Rational, t: &Rational, n: u64) -> Result<Option<Rational>> {
    match x.classify_ellp(t) {
        Ok(Convergence::Diverges) => Ok(None),
        Ok(Convergence::Converges) | Err(Error::Undecidable) => {
            Ok(Some(c * x.tail_sum_upper(t, n)?))
        }
        Err(e) => Err(e),
    }
}

fn tail_upper(x: &SequenceFamily, c: &Rational, t: &Rational, n: u64) -> Result<Rational> {
    let last = match x.len() {
        Some(len) => (len as u64).min(n + TAIL_TERMS),
        None => n + TAIL_TERMS,
    };
    let mut s = Rational::zero();
    for i in n + 1..=last {
        s += c * x.term_pow(i, t)?.lo;
    }
    Ok(exp_neg_upper(&s))
}

/// Enclosure of `∏_{i>=from} (1 - c x_i^t)` truncated at `n`. A tail sum
/// of one or more gives a zero lower tail instead of an error.
pub fn scaled_product_bracket(
    x: &SequenceFamily,
    c: &Rational,
    t: &Rational,
    from: u64,
    n: u64,
) -> Result<ProductBracket> {
    let partial = factor_product(x, c, t, from, n)?;
    let tail_lower = match tail_sum(x, c, t, n)? {
        Some(s) if s < Rational::one() => Rational::one() - s,
        _ => Rational::zero(),
    };
    Ok(ProductBracket {
        from,
        n,
        partial,
        tail_lower,
        tail_upper: tail_upper(x, c, t, n)?,
    })
}

/// Enclosure of `∏_{i>=1} (1 - x_i)` from the first `n` factors.
///
/// Fails with [`Error::TailTooLarge`] when the series converges but its
/// certified tail after `n` is not below one.
pub fn product_bracket(x: &SequenceFamily, n: u64) -> Result<ProductBracket> {
    let one = Rational::one();
    if let Some(s) = tail_sum(x, &one, &one, n)? {
        if s >= one {
            return Err(Error::TailTooLarge(n));
        }
    }
    scaled_product_bracket(x, &one, &one, 1, n)
}

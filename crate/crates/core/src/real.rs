//! Certified rational enclosures of real quantities.
//!
//! Every function here returns a [`Bracket`] `[lo, hi]` guaranteed to contain
//! the true value. Irrational quantities (`log2`, `2^x`, `x^y`) are enclosed by
//! dyadic rationals with outward rounding at a working precision given in bits.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::{self, pow2, powi, round_down, round_up, Rational};

/// Default working precision for irrational enclosures, in bits.
pub const DEFAULT_PRECISION: u32 = 128;

/// A closed rational interval known to contain some real quantity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bracket {
    pub lo: Rational,
    pub hi: Rational,
}

impl Bracket {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi, "inverted bracket");
        Bracket { lo, hi }
    }

    pub fn exact(v: Rational) -> Self {
        Bracket { lo: v.clone(), hi: v }
    }

    pub fn zero() -> Self {
        Self::exact(Rational::zero())
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn add(&self, other: &Bracket) -> Bracket {
        Bracket::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn sub(&self, other: &Bracket) -> Bracket {
        Bracket::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    pub fn neg(&self) -> Bracket {
        Bracket::new(-&self.hi, -&self.lo)
    }

    pub fn scale(&self, c: &Rational) -> Bracket {
        if c.is_negative() {
            Bracket::new(&self.hi * c, &self.lo * c)
        } else {
            Bracket::new(&self.lo * c, &self.hi * c)
        }
    }

    pub fn mul(&self, other: &Bracket) -> Bracket {
        let corners = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = corners.iter().min().unwrap().clone();
        let hi = corners.iter().max().unwrap().clone();
        Bracket::new(lo, hi)
    }

    /// Outward rounding to dyadic endpoints with `bits` fractional bits.
    pub fn round_outward(&self, bits: u32) -> Bracket {
        if self.is_exact() {
            return self.clone();
        }
        Bracket::new(round_down(&self.lo, bits), round_up(&self.hi, bits))
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

/// Enclosure of `x^(1/n)` for `x >= 0`; exact when `x` is a perfect `n`-th power.
pub fn nth_root(x: &Rational, n: u32, prec: u32) -> Bracket {
    assert!(n >= 1);
    assert!(!x.is_negative(), "root of a negative number");
    if n == 1 || x.is_zero() {
        return Bracket::exact(x.clone());
    }
    let p = x.numer();
    let q = x.denom();
    // x^(1/n) = (p q^(n-1))^(1/n) / q; first try the exact root.
    let m = p * num_traits::pow(q.clone(), (n - 1) as usize);
    let r = m.nth_root(n);
    if num_traits::pow(r.clone(), n as usize) == m {
        return Bracket::exact(Rational::new(r, q.clone()));
    }
    let scaled = m << (prec as usize * n as usize);
    let r = scaled.nth_root(n);
    let den = q << prec as usize;
    Bracket::new(
        Rational::new(r.clone(), den.clone()),
        Rational::new(r + 1, den),
    )
}

/// Enclosure of `log2 x` for `x > 0`, width at most `2^-prec`.
pub fn log2(x: &Rational, prec: u32) -> Bracket {
    assert!(x.is_positive(), "log2 of a non-positive number");
    if let Some(k) = rational::exact_log2(x) {
        return Bracket::exact(rational::int(k));
    }
    let k = rational::floor_log2(x);
    let y = x * pow2(-k);
    let work = prec + 16;
    let two = rational::int(2);
    let frac_bits = |mut v: Rational, upward: bool| -> Rational {
        let mut acc = Rational::zero();
        let mut bit = Rational::one();
        for _ in 0..prec {
            bit /= &two;
            let sq = &v * &v;
            v = if upward {
                round_up(&sq, work)
            } else {
                round_down(&sq, work)
            };
            if v >= two {
                acc += &bit;
                v /= &two;
            }
        }
        acc
    };
    let lo = frac_bits(round_down(&y, work), false);
    let hi = frac_bits(round_up(&y, work), true) + pow2(-(prec as i64));
    let base = rational::int(k);
    Bracket::new(&base + lo, base + hi)
}

/// Enclosures of `2^(2^-i)` for `i = 1..=count`.
fn root_table(count: u32, work: u32) -> Vec<Bracket> {
    let mut out = Vec::with_capacity(count as usize);
    let mut lo = rational::int(2);
    let mut hi = rational::int(2);
    for _ in 0..count {
        lo = nth_root(&lo, 2, work).lo;
        hi = nth_root(&hi, 2, work).hi;
        lo = round_down(&lo, work);
        hi = round_up(&hi, work);
        out.push(Bracket::new(lo.clone(), hi.clone()));
    }
    out
}

/// `2^d` for a dyadic rational `d` with at most `bits` fractional bits,
/// rounded in the requested direction.
fn exp2_dyadic(d: &Rational, bits: u32, work: u32, table: &[Bracket], upward: bool) -> Rational {
    let whole = rational::floor(d);
    let frac = d - Rational::from_integer(whole.clone());
    let mut scaled = rational::floor(&(frac * pow2(bits as i64)));
    let mut acc = Rational::one();
    let mut i = bits as usize;
    while !scaled.is_zero() {
        if (&scaled & BigInt::one()).is_one() {
            let f = &table[i - 1];
            acc *= if upward { &f.hi } else { &f.lo };
            acc = if upward {
                round_up(&acc, work)
            } else {
                round_down(&acc, work)
            };
        }
        scaled >>= 1;
        i -= 1;
    }
    let w: i64 = whole.try_into().expect("exponent out of range");
    acc * pow2(w)
}

/// Precomputed square-root table for repeated `2^z` evaluations.
#[derive(Clone, Debug)]
pub struct Exp2Table {
    prec: u32,
    work: u32,
    roots: Vec<Bracket>,
}

impl Exp2Table {
    pub fn new(prec: u32) -> Self {
        let work = prec + 16;
        Exp2Table {
            prec,
            work,
            roots: root_table(prec, work),
        }
    }

    /// Enclosure of `2^z` for every `z` in the bracket.
    pub fn eval(&self, z: &Bracket) -> Bracket {
        if z.is_exact() {
            if let Some(k) = integer_value(&z.lo) {
                return Bracket::exact(pow2(k));
            }
        }
        let lo_d = round_down(&z.lo, self.prec);
        let hi_d = round_up(&z.hi, self.prec);
        Bracket::new(
            exp2_dyadic(&lo_d, self.prec, self.work, &self.roots, false),
            exp2_dyadic(&hi_d, self.prec, self.work, &self.roots, true),
        )
    }
}

/// Enclosure of `2^z` for every `z` in the bracket.
pub fn exp2(z: &Bracket, prec: u32) -> Bracket {
    if z.is_exact() {
        if let Some(k) = integer_value(&z.lo) {
            return Bracket::exact(pow2(k));
        }
    }
    Exp2Table::new(prec).eval(z)
}

fn integer_value(r: &Rational) -> Option<i64> {
    if r.denom().is_one() {
        r.numer().try_into().ok()
    } else {
        None
    }
}

/// Enclosure of `x^y` for rational `x > 0` and rational `y`.
///
/// Integer exponents are exact; small-denominator exponents go through an
/// integer root (exact for perfect powers); everything else through
/// `2^(y log2 x)`.
pub fn pow(x: &Rational, y: &Rational, prec: u32) -> Bracket {
    assert!(x.is_positive(), "pow of a non-positive base");
    if x.is_one() || y.is_zero() {
        return Bracket::exact(Rational::one());
    }
    if let Some(k) = integer_value(y) {
        if k.abs() <= 1 << 16 {
            return Bracket::exact(powi(x, k));
        }
    }
    let den: Option<u32> = y.denom().try_into().ok();
    let num: Option<i64> = y.numer().try_into().ok();
    if let (Some(den), Some(num)) = (den, num) {
        let size = (x.numer().bits() + x.denom().bits()) as i64 * num.abs();
        if den <= 64 && size <= 1 << 14 {
            let base = powi(x, num);
            return nth_root(&base, den, prec + 8).round_outward(prec + 8);
        }
    }
    if let Some(k) = rational::exact_log2(x) {
        return exp2(&Bracket::exact(y * rational::int(k)), prec);
    }
    exp2(&log2(x, prec + 8).scale(y), prec)
}

/// Enclosure of `x^y` over brackets `x` (positive) and `y`.
pub fn pow_bracket(x: &Bracket, y: &Bracket, prec: u32) -> Bracket {
    if x.is_exact() && y.is_exact() {
        return pow(&x.lo, &y.lo, prec);
    }
    assert!(x.lo.is_positive(), "pow of a non-positive base");
    let l = Bracket::new(log2(&x.lo, prec + 8).lo, log2(&x.hi, prec + 8).hi);
    exp2(&l.mul(y), prec)
}

/// Upper bound on `exp(-s)` for `s >= 0`, from `e^s >= sum_{k<=4} s^k/k!`.
pub fn exp_neg_upper(s: &Rational) -> Rational {
    let mut term = Rational::one();
    let mut sum = Rational::one();
    for k in 1..=4i64 {
        term = term * s / rational::int(k);
        sum += &term;
    }
    sum.recip()
}

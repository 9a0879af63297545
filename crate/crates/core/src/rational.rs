//! Exact rational helpers: parsing, rendering, dyadic rounding.

use alloc::format;
use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number used throughout the crate.
pub type Rational = BigRational;

/// `n/d` from machine integers. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"num/den"`, a bare integer, or a finite decimal such as `"0.125"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_abs = whole.trim_start_matches(['-', '+']);
        let digits = format!("{whole_abs}{frac}");
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10u8), frac.len());
        let r = Rational::new(n, d);
        return Ok(if negative { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Renders as `"num/den"` (always with a denominator).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal rendering truncated toward zero after `digits` fractional digits.
pub fn to_decimal(r: &Rational, digits: usize) -> String {
    let negative = r.is_negative();
    let abs = r.abs();
    let scale = num_traits::pow(BigInt::from(10u8), digits);
    let scaled = (abs.numer() * &scale).div_floor(abs.denom());
    let (whole, frac) = scaled.div_rem(&scale);
    let mut out = String::new();
    if negative && !(whole.is_zero() && frac.is_zero()) {
        out.push('-');
    }
    out.push_str(&whole.to_string());
    if digits > 0 {
        let f = frac.to_string();
        out.push('.');
        for _ in f.len()..digits {
            out.push('0');
        }
        out.push_str(&f);
    }
    out
}

/// Lossy conversion for diagnostics only; never fed back into decisions.
pub fn to_f64_lossy(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::one() << (e as usize))
    } else {
        Rational::new(BigInt::one(), BigInt::one() << ((-e) as usize))
    }
}

/// `r^e` for an integer exponent; `r` must be nonzero when `e < 0`.
pub fn powi(r: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(r.clone(), e as usize)
    } else {
        num_traits::pow(r.recip(), (-e) as usize)
    }
}

/// `floor(r * 2^bits) / 2^bits`.
pub fn round_down(r: &Rational, bits: u32) -> Rational {
    let scaled = (r.numer() << bits as usize).div_floor(r.denom());
    Rational::new(scaled, BigInt::one() << bits as usize)
}

/// `ceil(r * 2^bits) / 2^bits`.
pub fn round_up(r: &Rational, bits: u32) -> Rational {
    let scaled = -((-(r.numer() << bits as usize)).div_floor(r.denom()));
    Rational::new(scaled, BigInt::one() << bits as usize)
}

/// `floor(log2 r)` for `r > 0`.
pub fn floor_log2(r: &Rational) -> i64 {
    debug_assert!(r.is_positive());
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    // 2^(nb-1) <= n < 2^nb, same for d, so log2 r lies in (nb-db-1, nb-db+1).
    let guess = nb - db;
    if *r >= pow2(guess) {
        guess
    } else {
        guess - 1
    }
}

/// Exponent `k` when `r == 2^k`.
pub fn exact_log2(r: &Rational) -> Option<i64> {
    if !r.is_positive() {
        return None;
    }
    let is_pow2 = |n: &BigInt| {
        let m = n.magnitude();
        m.count_ones() == 1
    };
    if r.denom().is_one() && is_pow2(r.numer()) {
        Some(r.numer().bits() as i64 - 1)
    } else if r.numer().is_one() && is_pow2(r.denom()) {
        Some(-(r.denom().bits() as i64 - 1))
    } else {
        None
    }
}

pub fn floor(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn ceil(r: &Rational) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

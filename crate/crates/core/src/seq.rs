//! Symbolic positive sequences in (0,1) with exact ℓ^p membership decisions
//! and certified tail-sum bounds.
//!
//! Finite data cannot decide convergence, so only the symbolic kinds answer
//! [`SequenceFamily::classify_ellp`]; [`SequenceFamily::ExplicitFinite`] is a
//! diagnostic kind that answers with [`Error::Undecidable`].

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, pow2, powi, Rational};
use crate::real::{self, Bracket, DEFAULT_PRECISION};

/// A positive sequence `α_1, α_2, ...` with every term in `(0,1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SequenceFamily {
    /// `α_n = a q^(n-1)`, so the first term is `a`.
    Geometric { a: Rational, q: Rational },
    /// `α_n = a (n + offset)^(-gamma)`.
    Power {
        a: Rational,
        gamma: Rational,
        offset: Rational,
    },
    /// `α_j = base^(m_j)` with `m_j = floor(log2(j+1))`.
    LogFloor { base: Rational },
    /// `α_n = a` for every `n`.
    Constant { a: Rational },
    /// Finitely many explicit terms; convergence questions are undecidable.
    ExplicitFinite(Vec<Rational>),
    /// `α_n = c · inner_n`.
    Scaled { c: Rational, inner: Box<SequenceFamily> },
}

/// Outcome of an ℓ^p membership decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convergence {
    Converges,
    Diverges,
}

/// Outcome of an ℓ^0 membership decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ell0 {
    InEll0,
    /// The p-sum diverges at this exponent.
    NotInEll0 { witness: Rational },
    Undecidable,
}

/// `m_j = floor(log2(j + 1))`.
pub fn log_floor_exponent(j: u64) -> u32 {
    (j + 1).ilog2()
}

fn check(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg.into()))
    }
}

fn in_unit_open(x: &Rational) -> bool {
    x.is_positive() && *x < Rational::one()
}

impl SequenceFamily {
    pub fn geometric(a: Rational, q: Rational) -> Result<Self> {
        Self::Geometric { a, q }.validated()
    }

    pub fn power(a: Rational, gamma: Rational, offset: Rational) -> Result<Self> {
        Self::Power { a, gamma, offset }.validated()
    }

    pub fn log_floor(base: Rational) -> Result<Self> {
        Self::LogFloor { base }.validated()
    }

    pub fn constant(a: Rational) -> Result<Self> {
        Self::Constant { a }.validated()
    }

    pub fn explicit(terms: Vec<Rational>) -> Result<Self> {
        Self::ExplicitFinite(terms).validated()
    }

    pub fn scaled(c: Rational, inner: SequenceFamily) -> Result<Self> {
        Self::Scaled {
            c,
            inner: Box::new(inner),
        }
        .validated()
    }

    /// Checks the parameter ranges that keep every term inside `(0,1)`.
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Geometric { a, q } => {
                check(in_unit_open(q), "geometric ratio must lie in (0,1)")?;
                check(a.is_positive(), "geometric scale must be positive")?;
                check(a < &Rational::one(), "geometric first term must be < 1")
            }
            Self::Power { a, gamma, offset } => {
                check(gamma.is_positive(), "power exponent must be positive")?;
                check(a.is_positive(), "power scale must be positive")?;
                check(!offset.is_negative(), "power offset must be non-negative")?;
                let first = real::pow(&(offset + int(1)), &-gamma, DEFAULT_PRECISION).scale(a);
                check(first.hi < Rational::one(), "power first term must be < 1")
            }
            Self::LogFloor { base } => check(in_unit_open(base), "log-floor base must lie in (0,1)"),
            Self::Constant { a } => check(in_unit_open(a), "constant term must lie in (0,1)"),
            Self::ExplicitFinite(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    check(in_unit_open(t), &format!("term {} must lie in (0,1)", i + 1))?;
                }
                Ok(())
            }
            Self::Scaled { c, inner } => {
                inner.validate()?;
                check(c.is_positive(), "scale must be positive")?;
                check(
                    (inner.sup_upper() * c) < Rational::one(),
                    "scaled terms must stay below 1",
                )
            }
        }
    }

    /// Rational upper bound on `sup_n α_n`.
    pub fn sup_upper(&self) -> Rational {
        match self {
            Self::Geometric { a, .. } => a.clone(),
            Self::Power { a, gamma, offset } => {
                real::pow(&(offset + int(1)), &-gamma, DEFAULT_PRECISION).hi * a
            }
            Self::LogFloor { base } => base.clone(),
            Self::Constant { a } => a.clone(),
            Self::ExplicitFinite(t) => t.iter().max().cloned().unwrap_or_else(Rational::zero),
            Self::Scaled { c, inner } => inner.sup_upper() * c,
        }
    }

    /// Number of terms, `None` for infinite families.
    pub fn len(&self) -> Option<usize> {
        match self {
            Self::ExplicitFinite(t) => Some(t.len()),
            Self::Scaled { inner, .. } => inner.len(),
            _ => None,
        }
    }

    /// Whether terms are non-increasing in `n`.
    pub fn is_monotone(&self) -> bool {
        match self {
            Self::ExplicitFinite(t) => t.windows(2).all(|w| w[0] >= w[1]),
            Self::Scaled { inner, .. } => inner.is_monotone(),
            _ => true,
        }
    }

    /// `α_n` (1-based). Exact except for `Power` with non-integer exponent.
    pub fn term(&self, n: u64) -> Result<Bracket> {
        if n == 0 {
            return Err(Error::InvalidParameter("sequence indices start at 1".into()));
        }
        Ok(match self {
            Self::Geometric { a, q } => Bracket::exact(a * powi(q, n as i64 - 1)),
            Self::Power { a, gamma, offset } => {
                let base = Rational::from_integer(n.into()) + offset;
                real::pow(&base, &-gamma, DEFAULT_PRECISION).scale(a)
            }
            Self::LogFloor { base } => {
                Bracket::exact(powi(base, log_floor_exponent(n) as i64))
            }
            Self::Constant { a } => Bracket::exact(a.clone()),
            Self::ExplicitFinite(t) => {
                let v = t.get(n as usize - 1).ok_or(Error::IndexOutOfRange {
                    index: n,
                    len: t.len(),
                })?;
                Bracket::exact(v.clone())
            }
            Self::Scaled { c, inner } => inner.term(n)?.scale(c),
        })
    }

    /// `α_n` as an exact rational, or [`Error::Inexact`].
    pub fn term_exact(&self, n: u64) -> Result<Rational> {
        let b = self.term(n)?;
        if b.is_exact() {
            Ok(b.lo)
        } else {
            Err(Error::Inexact(format!("term {n} is irrational")))
        }
    }

    /// Enclosure of `α_n^p`.
    pub fn term_pow(&self, n: u64, p: &Rational) -> Result<Bracket> {
        match self {
            Self::Power { a, gamma, offset } => {
                let base = Rational::from_integer(n.into()) + offset;
                let e = -(gamma * p);
                let s = real::pow(a, p, DEFAULT_PRECISION);
                Ok(s.mul(&real::pow(&base, &e, DEFAULT_PRECISION)))
            }
            Self::Scaled { c, inner } => {
                Ok(real::pow(c, p, DEFAULT_PRECISION).mul(&inner.term_pow(n, p)?))
            }
            _ => {
                let t = self.term_exact(n)?;
                Ok(real::pow(&t, p, DEFAULT_PRECISION))
            }
        }
    }

    /// Decides whether `Σ α_n^p < ∞` by the closed-form criterion of each kind.
    pub fn classify_ellp(&self, p: &Rational) -> Result<Convergence> {
        if !p.is_positive() {
            return Err(Error::InvalidParameter("exponent p must be positive".into()));
        }
        use Convergence::*;
        Ok(match self {
            Self::Geometric { .. } => Converges,
            Self::Power { gamma, .. } => {
                if gamma * p > Rational::one() {
                    Converges
                } else {
                    Diverges
                }
            }
            Self::LogFloor { base } => {
                // Σ_k 2^k base^(kp) < ∞  iff  base^p < 1/2  iff  base^u < 2^-v for p = u/v.
                let u: i64 = p.numer().try_into().map_err(|_| exponent_too_large())?;
                let v: i64 = p.denom().try_into().map_err(|_| exponent_too_large())?;
                if powi(base, u) < pow2(-v) {
                    Converges
                } else {
                    Diverges
                }
            }
            Self::Constant { .. } => Diverges,
            Self::ExplicitFinite(_) => return Err(Error::Undecidable),
            Self::Scaled { inner, .. } => return inner.classify_ellp(p),
        })
    }

    /// Decides membership in `ℓ^0 = ∩_{p>0} ℓ^p`.
    pub fn classify_ell0(&self) -> Ell0 {
        match self {
            Self::Geometric { .. } => Ell0::InEll0,
            Self::Power { gamma, .. } => Ell0::NotInEll0 {
                witness: gamma.recip(),
            },
            Self::LogFloor { base } => {
                // Diverges at p = 2^-k as soon as base >= 2^(-2^k).
                let mut k = 0u32;
                loop {
                    let bound = pow2(-(1i64 << k));
                    if *base >= bound {
                        return Ell0::NotInEll0 { witness: pow2(-(k as i64)) };
                    }
                    k += 1;
                }
            }
            Self::Constant { .. } => Ell0::NotInEll0 {
                witness: Rational::one(),
            },
            Self::ExplicitFinite(_) => Ell0::Undecidable,
            Self::Scaled { inner, .. } => inner.classify_ell0(),
        }
    }

    /// Certified rational `B >= Σ_{n>N} α_n^p`.
    pub fn tail_sum_upper(&self, p: &Rational, n: u64) -> Result<Rational> {
        if let Self::ExplicitFinite(t) = self {
            let mut acc = Rational::zero();
            for i in (n + 1)..=(t.len() as u64) {
                acc += self.term_pow(i, p)?.hi;
            }
            return Ok(acc);
        }
        if self.classify_ellp(p)? == Convergence::Diverges {
            return Err(Error::DivergentSeries);
        }
        let prec = DEFAULT_PRECISION;
        match self {
            Self::Geometric { a, q } => {
                let ap = real::pow(a, p, prec).hi;
                let qp = real::pow(q, p, prec);
                let e = p * int(n as i64);
                let qn = real::pow(q, &e, prec).hi;
                Ok(ap * qn / (Rational::one() - qp.hi))
            }
            Self::Power { a, gamma, offset } => {
                // Σ_{n>N} f(n) <= ∫_N^∞ f for decreasing f; the first term is
                // added separately when the integral would start at zero.
                let gp = gamma * p;
                let ap = real::pow(a, p, prec).hi;
                let mut start = int(n as i64) + offset;
                let mut extra = Rational::zero();
                if start.is_zero() {
                    extra = self.term_pow(1, p)?.hi;
                    start = int(1) + offset;
                }
                let e = Rational::one() - &gp;
                let integral = real::pow(&start, &e, prec).hi * ap / (&gp - Rational::one());
                Ok(extra + integral)
            }
            Self::LogFloor { base } => {
                let r = real::pow(base, p, prec).hi;
                let two_r = &r * int(2);
                if two_r >= Rational::one() {
                    return Err(Error::Inexact(
                        "ratio enclosure too wide near the convergence boundary".into(),
                    ));
                }
                let k = log_floor_exponent(n + 1) as i64;
                let last_with_k = (1i64 << (k + 1)) - 2;
                let count = int(last_with_k - n as i64);
                let head = count * powi(&r, k);
                let rest = powi(&two_r, k + 1) / (Rational::one() - two_r);
                Ok(head + rest)
            }
            Self::Scaled { c, inner } => {
                Ok(real::pow(c, p, prec).hi * inner.tail_sum_upper(p, n)?)
            }
            Self::Constant { .. } | Self::ExplicitFinite(_) => unreachable!(),
        }
    }

    /// Enclosure of `Σ_{n=from}^{to} α_n^p`.
    pub fn partial_sum(&self, p: &Rational, from: u64, to: u64) -> Result<Bracket> {
        let mut acc = Bracket::zero();
        for n in from..=to {
            let t = self.term_pow(n, p)?;
            acc = acc.add(&t);
            if !t.is_exact() {
                acc = acc.round_outward(2 * DEFAULT_PRECISION);
            }
        }
        Ok(acc)
    }
}

fn exponent_too_large() -> Error {
    Error::InvalidParameter("exponent has an oversized numerator or denominator".into())
}

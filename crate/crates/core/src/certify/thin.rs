use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::seq::{Convergence, SequenceFamily};

/// Stage cap for the decay search.
pub const MAX_THIN_STAGES: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThinnessCertificate {
    pub alpha: SequenceFamily,
    pub s: Rational,
    pub c: Rational,
    pub divergence: Convergence,
    pub epsilon: Rational,
    /// `decay_curve[n]` bounds `μ(F_n) / μ(F_0)` from above; entry 0 is 1.
    pub decay_curve: Vec<Rational>,
    /// Least `n` with `decay_curve[n] < ε`.
    pub n_star: u64,
}

/// Iterates `u_n = ∏_{k<=n} (1 - c α_k^s)` until it drops below `ε`.
pub fn certify_thin_porous(
    alpha: &SequenceFamily,
    s: &Rational,
    c: &Rational,
    epsilon: &Rational,
) -> Result<ThinnessCertificate> {
    if !c.is_positive() || c > &Rational::one() {
        return Err(Error::InvalidParameter("c must lie in (0,1]".into()));
    }
    if !epsilon.is_positive() {
        return Err(Error::InvalidParameter("ε must be positive".into()));
    }
    let divergence = alpha.classify_ellp(s)?;
    if divergence == Convergence::Converges {
        return Err(Error::SeriesConverges);
    }
    let mut curve = vec![Rational::one()];
    let mut u = Rational::one();
    let mut n = 0u64;
    while &u >= epsilon {
        n += 1;
        if n > MAX_THIN_STAGES {
            return Err(Error::NoProgress(MAX_THIN_STAGES));
        }
        let y = alpha.term_pow(n, s)?.lo;
        u *= (Rational::one() - c * y).max(Rational::zero());
        curve.push(u.clone());
        if u.is_zero() {
            break;
        }
    }
    Ok(ThinnessCertificate {
        alpha: alpha.clone(),
        s: s.clone(),
        c: c.clone(),
        divergence,
        epsilon: epsilon.clone(),
        decay_curve: curve,
        n_star: n,
    })
}

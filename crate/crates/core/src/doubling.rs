//! Finite-scale doubling constants and the exponent bounds they imply.
//!
//! Every constant here is certified only over the sampled grid: centers at
//! node endpoints and midpoints of a fixed level, dyadic radii.

use alloc::format;
use alloc::string::String;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geom::RationalInterval;
use crate::measure::{MassBracket, MeasureBase, TreeMeasure, MAX_ENUMERATION_DEPTH};
use crate::rational::{int, pow2, round_down, round_up, Rational};
use crate::real::{log2, pow_bracket, Bracket, Exp2Table, DEFAULT_PRECISION};

/// Deepest scan level accepted.
pub const MAX_SCAN_DEPTH: u32 = 20;
/// Largest realized gap ratio still treated as uniformly perfect.
pub const UNIFORM_PERFECTNESS_LIMIT: i64 = 64;
/// Exponent grid used by the fits: multiples of `1/T_GRID`.
pub const T_GRID: i64 = 64;
/// Fitted constants are rounded outward to this many bits.
const REPORT_BITS: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub x: Rational,
    pub r: Rational,
    pub ratio: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eq22Fit {
    pub lambda: Rational,
    pub t: Rational,
    /// Scale gap `j` (with `r/R = 2^-j`) that forces `lambda`.
    pub binding_gap: u32,
    pub holdout_checked: usize,
    pub holdout_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma21Fit {
    pub lambda_lower: Rational,
    pub s: Rational,
    pub lambda_upper: Rational,
    pub t: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoublingReport {
    /// Certified upper bound on the doubling ratio over the grid.
    pub c: Rational,
    /// Largest ratio provably attained on the grid.
    pub c_lower: Rational,
    /// `log2 C`.
    pub s: Bracket,
    /// Smallest and largest sampled radius.
    pub window: (Rational, Rational),
    pub depth: u32,
    pub centers: usize,
    pub radii: usize,
    pub witness: Witness,
    pub eq22_fit: Option<Eq22Fit>,
    pub lemma21_fit: Option<Lemma21Fit>,
    pub violations: Vec<String>,
}

/// Sampled centers and radii (radii descending, all `2^-k`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub depth: u32,
    pub centers: Vec<Rational>,
    pub radii: Vec<Rational>,
}

fn check_depth(depth: u32) -> Result<()> {
    if depth > MAX_SCAN_DEPTH {
        Err(Error::DepthLimit {
            requested: depth,
            limit: MAX_SCAN_DEPTH,
        })
    } else {
        Ok(())
    }
}

/// Centers: endpoints and midpoints of the level-`depth` nodes. Radii:
/// `2^-k` for `k <= depth`, dropping radii smaller than the largest node.
pub fn scan_grid(m: &TreeMeasure, depth: u32) -> Result<Grid> {
    check_depth(depth)?;
    let (centers, finest) = match &m.base {
        MeasureBase::Dyadic => {
            let n = 1u64 << (depth + 1);
            let step = pow2(-(depth as i64 + 1));
            let centers = (0..=n).map(|i| Rational::from_integer(i.into()) * &step).collect();
            (centers, pow2(-(depth as i64)))
        }
        MeasureBase::Cantor(t) => {
            let level = depth.min(t.depth);
            let mut centers = Vec::new();
            let mut finest = Rational::zero();
            for node in t.level(level) {
                centers.push(node.lo.clone());
                centers.push(node.midpoint());
                centers.push(node.hi.clone());
                finest = finest.max(node.diameter());
            }
            centers.sort();
            centers.dedup();
            (centers, finest)
        }
    };
    let radii: Vec<Rational> = (0..=depth as i64)
        .map(|k| pow2(-k))
        .filter(|r| *r >= finest)
        .collect();
    if radii.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no dyadic radius at depth {depth} exceeds the node size"
        )));
    }
    Ok(Grid {
        depth,
        centers,
        radii,
    })
}

/// Ball masses, via an exact cdf table when the measure is dyadic and the
/// ball endpoints land on the table grid.
struct BallMasses<'a> {
    m: &'a TreeMeasure,
    depth: u32,
    table: Option<(Rational, Vec<Rational>)>,
}

impl<'a> BallMasses<'a> {
    fn new(m: &'a TreeMeasure, depth: u32) -> Self {
        let table = match m.base {
            MeasureBase::Dyadic if depth <= MAX_ENUMERATION_DEPTH => {
                m.level_masses(depth).ok().map(|leaves| {
                    let mut cdf = Vec::with_capacity(leaves.len() + 1);
                    let mut acc = Rational::zero();
                    cdf.push(acc.clone());
                    for v in leaves {
                        acc += v;
                        cdf.push(acc.clone());
                    }
                    (pow2(depth as i64), cdf)
                })
            }
            _ => None,
        };
        BallMasses { m, depth, table }
    }

    fn index(&self, scale: &Rational, x: &Rational) -> Option<usize> {
        let v = x * scale;
        if v.is_integer() {
            usize::try_from(v.to_integer()).ok()
        } else {
            None
        }
    }

    fn interval(&self, lo: &Rational, hi: &Rational) -> MassBracket {
        if let Some((scale, cdf)) = &self.table {
            if let (Some(a), Some(b)) = (self.index(scale, lo), self.index(scale, hi)) {
                return MassBracket::exact(&cdf[b] - &cdf[a]);
            }
        }
        self.m
            .interval_mass(&RationalInterval::closed_unchecked(lo.clone(), hi.clone()), self.depth)
    }

    /// `μ(B(x, r))` for the closed ball clipped to `[0,1]`.
    fn ball(&self, x: &Rational, r: &Rational) -> MassBracket {
        let lo = (x - r).max(Rational::zero());
        let hi = (x + r).min(Rational::one());
        self.interval(&lo, &hi)
    }
}

fn zero_mass(x: &Rational) -> Error {
    Error::ZeroMassBall(format!("{x}"))
}

/// Ball masses for every grid center at radii `2r_0, r_0, r_1, ...`.
fn grid_masses(bm: &BallMasses, grid: &Grid) -> Result<Vec<Vec<MassBracket>>> {
    let mut out = Vec::with_capacity(grid.centers.len());
    for x in &grid.centers {
        let mut row = Vec::with_capacity(grid.radii.len() + 1);
        row.push(bm.ball(x, &(&grid.radii[0] * int(2))));
        for r in &grid.radii {
            let b = bm.ball(x, r);
            if !b.upper.is_positive() {
                return Err(zero_mass(x));
            }
            row.push(b);
        }
        out.push(row);
    }
    Ok(out)
}

/// Maximum of `μ(B(x, 2r)) / μ(B(x, r))` over the grid.
pub fn doubling_scan(m: &TreeMeasure, depth: u32) -> Result<DoublingReport> {
    let grid = scan_grid(m, depth)?;
    let bm = BallMasses::new(m, depth + 1);
    let masses = grid_masses(&bm, &grid)?;
    let mut c: Option<Rational> = None;
    let mut c_lower = Rational::zero();
    let mut witness = None;
    for (x, row) in grid.centers.iter().zip(&masses) {
        for (k, r) in grid.radii.iter().enumerate() {
            let (big, small) = (&row[k], &row[k + 1]);
            if !small.lower.is_positive() {
                return Err(zero_mass(x));
            }
            let hi = &big.upper / &small.lower;
            let lo = &big.lower / &small.upper;
            if c.as_ref().is_none_or(|c| hi > *c) {
                witness = Some(Witness {
                    x: x.clone(),
                    r: r.clone(),
                    ratio: hi.clone(),
                });
                c = Some(hi);
            }
            if lo > c_lower {
                c_lower = lo;
            }
        }
    }
    let c = c.expect("grid is never empty");
    let s = log2(&c, DEFAULT_PRECISION);
    Ok(DoublingReport {
        c,
        c_lower,
        s,
        window: (
            grid.radii.last().unwrap().clone(),
            grid.radii[0].clone(),
        ),
        depth,
        centers: grid.centers.len(),
        radii: grid.radii.len(),
        witness: witness.unwrap(),
        eq22_fit: None,
        lemma21_fit: None,
        violations: Vec::new(),
    })
}

/// Certified upper bound on `max_x μ(B(x, 2r)) / μ(B(x, r))` for each
/// grid radius `r`, largest radius first.
pub fn ratio_by_scale(m: &TreeMeasure, depth: u32) -> Result<Vec<(Rational, Rational)>> {
    let grid = scan_grid(m, depth)?;
    let bm = BallMasses::new(m, depth + 1);
    let masses = grid_masses(&bm, &grid)?;
    let mut out: Vec<(Rational, Rational)> =
        grid.radii.iter().map(|r| (r.clone(), Rational::zero())).collect();
    for (x, row) in grid.centers.iter().zip(&masses) {
        for (k, slot) in out.iter_mut().enumerate() {
            if !row[k + 1].lower.is_positive() {
                return Err(zero_mass(x));
            }
            let hi = &row[k].upper / &row[k + 1].lower;
            if hi > slot.1 {
                slot.1 = hi;
            }
        }
    }
    Ok(out)
}

/// One sampled configuration for the lower mass bound: a bounded set `A`,
/// a point `x ∈ A` and a radius `0 < r < diam(A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eq21Trial {
    pub a: RationalInterval,
    pub x: Rational,
    pub r: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Eq21Verdict {
    Holds {
        checked: usize,
    },
    Counterexample {
        trial: Eq21Trial,
        ratio: MassBracket,
        bound: Bracket,
    },
    /// Some trials could not be decided at this resolution.
    Inconclusive {
        checked: usize,
        undecided: usize,
    },
}

/// Checks `μ(B(x,r)) / μ(A) >= 2^-s (r / diam A)^s` with `s = log2 C`.
pub fn verify_eq21(
    m: &TreeMeasure,
    c: &Rational,
    trials: &[Eq21Trial],
    depth: u32,
) -> Result<Eq21Verdict> {
    if c < &Rational::one() {
        return Err(Error::InvalidParameter(format!("doubling constant {c} is below 1")));
    }
    verify_eq21_exponent(m, &log2(c, DEFAULT_PRECISION), trials, depth)
}

/// As [`verify_eq21`] with the exponent given directly.
pub fn verify_eq21_exponent(
    m: &TreeMeasure,
    s: &Bracket,
    trials: &[Eq21Trial],
    depth: u32,
) -> Result<Eq21Verdict> {
    let bm = BallMasses::new(m, depth);
    let e2 = Exp2Table::new(DEFAULT_PRECISION);
    let mut bounds: BTreeMap<Rational, Bracket> = BTreeMap::new();
    let mut undecided = 0usize;
    for t in trials {
        let d = t.a.diameter();
        if !t.a.contains_point(&t.x) || !t.r.is_positive() || t.r >= d {
            return Err(Error::InvalidParameter(format!(
                "trial needs x in A and 0 < r < diam A (A = {}, x = {}, r = {})",
                t.a, t.x, t.r
            )));
        }
        let ball = bm.ball(&t.x, &t.r);
        let set = bm.interval(&t.a.lo, &t.a.hi);
        if !set.lower.is_positive() {
            undecided += 1;
            continue;
        }
        let ratio = MassBracket {
            lower: &ball.lower / &set.upper,
            upper: &ball.upper / &set.lower,
        };
        let base = &t.r / (&d * int(2));
        let bound = bounds
            .entry(base)
            .or_insert_with_key(|b| e2.eval(&log2(b, DEFAULT_PRECISION + 8).mul(s)))
            .clone();
        if ratio.lower >= bound.hi {
            continue;
        }
        if ratio.upper < bound.lo {
            return Ok(Eq21Verdict::Counterexample {
                trial: t.clone(),
                ratio,
                bound,
            });
        }
        undecided += 1;
    }
    Ok(if undecided == 0 {
        Eq21Verdict::Holds {
            checked: trials.len(),
        }
    } else {
        Eq21Verdict::Inconclusive {
            checked: trials.len(),
            undecided,
        }
    })
}

fn check_uniformly_perfect(m: &TreeMeasure) -> Result<()> {
    if let MeasureBase::Cantor(t) = &m.base {
        if let Some(g) = &t.gap_ratio_sup {
            if g > &int(UNIFORM_PERFECTNESS_LIMIT) {
                return Err(Error::NotUniformlyPerfect(format!("{g}")));
            }
        }
    }
    Ok(())
}

/// `max_j M_j 2^{jt}`, rounded up, with `M_j` indexed by `j - 1`.
fn lambda_for(m_j: &[Rational], t: &Rational, e2: &Exp2Table) -> (Rational, u32) {
    let mut best = Rational::zero();
    let mut at = 1;
    for (i, mj) in m_j.iter().enumerate() {
        let j = i as i64 + 1;
        let f = e2.eval(&Bracket::exact(t * int(j)));
        let v = mj * f.hi;
        if v > best {
            best = v;
            at = j as u32;
        }
    }
    (round_up(&best, REPORT_BITS), at)
}

/// Fits `μ(B(x,r)) / μ(B(x,R)) <= Λ (r/R)^t` over grid radii `r < R`.
///
/// `t` is the largest multiple of `1/64` whose minimal `Λ` stays within the
/// scanned doubling constant; `Λ` is then the smallest valid value on the
/// grid, rounded up. The result is rechecked on off-grid centers.
pub fn fit_eq22(m: &TreeMeasure, depth: u32) -> Result<Eq22Fit> {
    check_uniformly_perfect(m)?;
    let grid = scan_grid(m, depth)?;
    let report = doubling_scan(m, depth)?;
    let bm = BallMasses::new(m, depth + 1);
    let masses = grid_masses(&bm, &grid)?;
    let gaps = grid.radii.len() - 1;
    if gaps == 0 {
        return Err(Error::InvalidParameter("need at least two radii".into()));
    }
    // M_j = max over centers and radius pairs with r/R = 2^-j.
    let mut m_j = alloc::vec![Rational::zero(); gaps];
    for row in &masses {
        for b in 0..grid.radii.len() {
            let big = &row[b + 1];
            for a in b + 1..grid.radii.len() {
                let v = &row[a + 1].upper / &big.lower;
                let slot = &mut m_j[a - b - 1];
                if v > *slot {
                    *slot = v;
                }
            }
        }
    }
    let e2 = Exp2Table::new(DEFAULT_PRECISION);
    let mut t_best: Option<Rational> = None;
    for k in 1..=T_GRID * 8 {
        let t = Rational::new(k.into(), T_GRID.into());
        let (lam, _) = lambda_for(&m_j, &t, &e2);
        if lam > report.c {
            break;
        }
        t_best = Some(t);
    }
    let t = t_best.ok_or_else(|| {
        Error::InvalidParameter(format!(
            "no exponent t >= 1/{T_GRID} keeps Λ within C = {}",
            report.c
        ))
    })?;
    let (lambda, binding_gap) = lambda_for(&m_j, &t, &e2);
    let (holdout_checked, holdout_violations) = holdout_eq22(m, &grid, depth, &lambda, &t)?;
    Ok(Eq22Fit {
        lambda,
        t,
        binding_gap,
        holdout_checked,
        holdout_violations,
    })
}

/// Off-grid recheck: centers halfway between fitting centers.
fn holdout_eq22(
    m: &TreeMeasure,
    grid: &Grid,
    depth: u32,
    lambda: &Rational,
    t: &Rational,
) -> Result<(usize, usize)> {
    let bm = BallMasses::new(m, depth + 2);
    let two = int(2);
    let e2 = Exp2Table::new(DEFAULT_PRECISION);
    let factors: Vec<Rational> = (1..grid.radii.len() as i64)
        .map(|j| e2.eval(&Bracket::exact(-(t * int(j)))).lo)
        .collect();
    let mut checked = 0;
    let mut bad = 0;
    for w in grid.centers.windows(2) {
        let x = (&w[0] + &w[1]) / &two;
        let row: Vec<MassBracket> = grid.radii.iter().map(|r| bm.ball(&x, r)).collect();
        for b in 0..row.len() {
            if !row[b].lower.is_positive() {
                continue;
            }
            for a in b + 1..row.len() {
                checked += 1;
                let ratio = &row[a].upper / &row[b].lower;
                if ratio > lambda * &factors[a - b - 1] {
                    bad += 1;
                }
            }
        }
    }
    Ok((checked, bad))
}

/// `λ r^s <= μ(B(x,r)) <= Λ r^t` over the grid, with `s` the grid upper
/// bound of `log2 C` and `t` from the fitted upper-ratio pair.
pub fn lemma21_fit(m: &TreeMeasure, depth: u32, report: &DoublingReport, t: &Rational) -> Result<Lemma21Fit> {
    let grid = scan_grid(m, depth)?;
    let bm = BallMasses::new(m, depth + 1);
    let masses = grid_masses(&bm, &grid)?;
    let grid_step = Rational::new(1.into(), T_GRID.into());
    let s = (&report.s.hi / &grid_step).ceil() * &grid_step;
    let mut lambda_lower: Option<Rational> = None;
    let mut lambda_upper = Rational::zero();
    for (k, r) in grid.radii.iter().enumerate() {
        let rs = pow_bracket(&Bracket::exact(r.clone()), &Bracket::exact(s.clone()), DEFAULT_PRECISION);
        let rt = pow_bracket(&Bracket::exact(r.clone()), &Bracket::exact(t.clone()), DEFAULT_PRECISION);
        for row in &masses {
            let b = &row[k + 1];
            let lo = &b.lower / &rs.hi;
            if lambda_lower.as_ref().is_none_or(|l| lo < *l) {
                lambda_lower = Some(lo);
            }
            let hi = &b.upper / &rt.lo;
            if hi > lambda_upper {
                lambda_upper = hi;
            }
        }
    }
    let lambda_lower = round_down(&lambda_lower.unwrap_or_else(Rational::zero), REPORT_BITS);
    if !lambda_lower.is_positive() {
        return Err(Error::ZeroMassBall("a grid ball has zero certified mass".into()));
    }
    Ok(Lemma21Fit {
        lambda_lower,
        s,
        lambda_upper: round_up(&lambda_upper, REPORT_BITS),
        t: t.clone(),
    })
}

/// Scan plus both fits; fit failures are recorded as violations.
pub fn full_report(m: &TreeMeasure, depth: u32) -> Result<DoublingReport> {
    let mut report = doubling_scan(m, depth)?;
    match fit_eq22(m, depth) {
        Ok(fit) => {
            if fit.holdout_violations > 0 {
                report.violations.push(format!(
                    "upper-ratio fit fails on {} of {} holdout configurations",
                    fit.holdout_violations, fit.holdout_checked
                ));
            }
            match lemma21_fit(m, depth, &report, &fit.t) {
                Ok(l) => report.lemma21_fit = Some(l),
                Err(e) => report.violations.push(format!("{e}")),
            }
            report.eq22_fit = Some(fit);
        }
        Err(e @ Error::NotUniformlyPerfect(_)) => return Err(e),
        Err(e) => report.violations.push(format!("{e}")),
    }
    Ok(report)
}

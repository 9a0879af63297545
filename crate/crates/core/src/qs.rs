//! The correspondence between doubling measures on `[0,1]` and increasing
//! maps `f(x) = μ([0, x])`, with empirical triple-ratio scans.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::doubling::MAX_SCAN_DEPTH;
use crate::error::{Error, Result};
use crate::measure::{MassBracket, MeasureBase, TreeMeasure, Weights};
use crate::rational::{exact_log2, int, powi, rat, Rational};
use crate::real::{log2, pow_bracket, Bracket, DEFAULT_PRECISION};

/// Ratios `τ` reported by [`qs_ratio_scan`].
pub const SCAN_TAUS: [(i64, i64); 5] = [(1, 4), (1, 2), (1, 1), (2, 1), (4, 1)];
const STEPS: [i64; 3] = [1, 2, 4];

/// `f(x) = μ([0, x])`, brackets resolved to `eval_depth` when not exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSMap {
    pub source: TreeMeasure,
    pub eval_depth: u32,
}

/// Values of a map at the `2^depth + 1` node endpoints of one tree level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSTable {
    pub base: MeasureBase,
    pub depth: u32,
    pub points: Vec<Rational>,
    pub values: Vec<Rational>,
}

impl QSMap {
    pub fn new(source: TreeMeasure, eval_depth: u32) -> Self {
        QSMap { source, eval_depth }
    }

    pub fn evaluate(&self, x: &Rational) -> Result<MassBracket> {
        if x.is_negative() || x > &Rational::one() {
            return Err(Error::InvalidParameter(alloc::format!("x = {x} is outside [0,1]")));
        }
        if let Some(v) = self.source.binomial_cdf_exact(x) {
            return Ok(MassBracket::exact(v));
        }
        self.source.cdf(x, self.eval_depth)
    }

    /// `f` at the endpoints of every node at `depth`; exact there.
    pub fn tabulate(&self, depth: u32) -> Result<QSTable> {
        let masses = self.source.level_masses(depth)?;
        let mut points = Vec::with_capacity(masses.len() + 1);
        let mut values = Vec::with_capacity(masses.len() + 1);
        let mut acc = Rational::zero();
        for (i, m) in masses.iter().enumerate() {
            points.push(self.source.node_interval(depth, i as u64)?.lo);
            values.push(acc.clone());
            acc += m;
        }
        points.push(Rational::one());
        values.push(acc);
        Ok(QSTable {
            base: self.source.base.clone(),
            depth,
            points,
            values,
        })
    }
}

impl QSTable {
    /// A table on the dyadic grid `i / 2^depth`.
    pub fn dyadic(depth: u32, values: Vec<Rational>) -> Result<Self> {
        if depth > MAX_SCAN_DEPTH || values.len() != (1usize << depth) + 1 {
            return Err(Error::InvalidParameter(alloc::format!(
                "expected {} values for depth {depth}",
                (1u64 << depth.min(63)) + 1
            )));
        }
        let step = powi(&int(2), -(depth as i64));
        let points = (0..values.len()).map(|i| &step * int(i as i64)).collect();
        Ok(QSTable {
            base: MeasureBase::Dyadic,
            depth,
            points,
            values,
        })
    }
}

/// The measure `μ([a,b]) = f(b) - f(a)` as a weight table over the grid.
pub fn measure_from_map(table: &QSTable) -> Result<TreeMeasure> {
    let f = &table.values;
    if let Some(i) = f.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotone(i));
    }
    let d = table.depth;
    let mut weights = Vec::with_capacity(d as usize);
    for k in 0..d {
        let span = 1usize << (d - k);
        let row = (0..1usize << k)
            .map(|i| {
                let lo = &f[i * span];
                (&f[i * span + span / 2] - lo) / (&f[(i + 1) * span] - lo)
            })
            .collect();
        weights.push(row);
    }
    TreeMeasure::new(
        table.base.clone(),
        Weights::Table(weights),
        &f[f.len() - 1] - &f[0],
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSRatioRow {
    pub tau: Rational,
    pub max_ratio: Rational,
    /// `(x, y, z)` attaining the maximum.
    pub witness: (Rational, Rational, Rational),
}

/// Largest `|f(x)-f(y)| / |f(x)-f(z)|` over dyadic triples
/// `y = x ± a h`, `z = x ± b h` with `h = 2^{-k}`, `a, b ∈ {1, 2, 4}` and
/// `k` in `levels`, for each `τ` in [`SCAN_TAUS`] over triples with
/// `a / b <= τ`. An empirical lower envelope for the distortion gauge.
pub fn qs_ratio_scan_levels(map: &QSMap, from: u32, to: u32) -> Result<Vec<QSRatioRow>> {
    if !matches!(map.source.base, MeasureBase::Dyadic) {
        return Err(Error::InvalidParameter("ratio scans need the dyadic base".into()));
    }
    if to > MAX_SCAN_DEPTH {
        return Err(Error::DepthLimit {
            requested: to,
            limit: MAX_SCAN_DEPTH,
        });
    }
    let table = map.tabulate(to)?;
    let f = &table.values;
    let n = 1i64 << to;
    let taus: Vec<Rational> = SCAN_TAUS.iter().map(|&(a, b)| rat(a, b)).collect();
    let mut best: Vec<Option<(Rational, [i64; 3])>> = alloc::vec![None; taus.len()];
    for k in from.max(1)..=to {
        let h = 1i64 << (to - k);
        for x in (0..=n).step_by(h as usize) {
            for a in STEPS {
                for b in STEPS {
                    let ratio = rat(a, b);
                    for sy in [-1, 1] {
                        for sz in [-1, 1] {
                            let (y, z) = (x + sy * a * h, x + sz * b * h);
                            if y < 0 || y > n || z < 0 || z > n || y == z {
                                continue;
                            }
                            let fx = &f[x as usize];
                            let num = (fx - &f[y as usize]).abs();
                            let den = (fx - &f[z as usize]).abs();
                            let image = num / den;
                            for (t, slot) in taus.iter().zip(best.iter_mut()) {
                                if &ratio <= t && slot.as_ref().is_none_or(|(m, _)| &image > m) {
                                    *slot = Some((image.clone(), [x, y, z]));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let pt = |i: i64| table.points[i as usize].clone();
    Ok(taus
        .into_iter()
        .zip(best)
        .filter_map(|(tau, b)| {
            b.map(|(max_ratio, [x, y, z])| QSRatioRow {
                tau,
                max_ratio,
                witness: (pt(x), pt(y), pt(z)),
            })
        })
        .collect())
}

pub fn qs_ratio_scan(map: &QSMap, depth: u32) -> Result<Vec<QSRatioRow>> {
    qs_ratio_scan_levels(map, 1, depth)
}

/// `C^{2 log2(η(2)) + 1}`, the doubling constant of a measure pulled back
/// by an `η`-quasisymmetric map.
pub fn pullback_constant(c: &Rational, eta2: &Rational) -> Result<Bracket> {
    if c < &Rational::one() || eta2 < &Rational::one() {
        return Err(Error::InvalidParameter("need C >= 1 and eta(2) >= 1".into()));
    }
    if let Some(k) = exact_log2(eta2) {
        return Ok(Bracket::exact(powi(c, 2 * k + 1)));
    }
    let e = log2(eta2, DEFAULT_PRECISION).scale(&int(2)).add(&Bracket::exact(int(1)));
    Ok(pow_bracket(&Bracket::exact(c.clone()), &e, DEFAULT_PRECISION))
}

//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Every tolerance is a named constant below. Oracles are written here
//! independently of the library: plain f64 products, leaf enumeration on the
//! binary tree, and a direct dyadic distribution function.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use dmlab::sampling::eq21_trials;
use dmlab::{run_example, ExperimentSpec, Limits, EXAMPLES};
use dmlab_core::certify::{
    certify_fat_thick, certify_thin_porous, example54_depth, example54_enumerated_mass,
    example54_limit, example54_mass, example54_schedule, lemma43_find_m, product_bracket,
    Ex54Limit, FatConclusion,
};
use dmlab_core::doubling::{full_report, verify_eq21, Eq21Verdict};
use dmlab_core::geom::{build_cantor, build_porous, thick_from_cantor};
use dmlab_core::measure::{TreeMeasure, Weights};
use dmlab_core::qs::{measure_from_map, pullback_constant, QSMap, QSTable};
use dmlab_core::rational::{int, pow2, powi, rat, to_f64_lossy, Rational};
use dmlab_core::seq::SequenceFamily;

type Outcome = Result<String, String>;

const EX54_PS: [(i64, i64); 4] = [(1, 4), (1, 3), (1, 2), (2, 3)];
const EX54_STAGES: u64 = 12;
/// Leaf enumeration is run while the tree has at most this many levels.
const EX54_ENUM_DEPTH: u32 = 14;
const EX54_TIME_BUDGET: Duration = Duration::from_secs(10);
const EX54_POSITIVE_FLOOR: (i64, i64) = (1, 10);
const EX54_ZERO_CEILING: (i64, i64) = (1, 1_000_000);
const EX54_MIN_TRUNCATION: u64 = 1 << 12;
/// f64 product for p = 1/3, compared against the certified bracket.
const EX54_ORACLE_TERMS: u64 = 1 << 20;
const EX54_ORACLE_SLACK: f64 = 1e-9;

const TELESCOPE_N: u64 = 10_000;
const TELESCOPE_TOL: (i64, i64) = (1, 1000);

const FAT_LITERAL: f64 = 0.2887880951;
const FAT_TOL: f64 = 1e-8;
const FAT_ORACLE_N: i32 = 100;
const FAT_TREE_DEPTH: u32 = 6;

const LEMMA43_M: u64 = 2;
const LEMMA43_VERIFIED: std::ops::RangeInclusive<u64> = 2..=8;

const DOUBLING_DEPTH: u32 = 10;

const EQ21_DEPTH: u32 = 8;
const EQ21_TRIALS_PER_MEASURE: usize = 250;
const EQ21_MEASURES: [(i64, i64); 4] = [(1, 2), (1, 3), (1, 5), (3, 4)];
const EQ21_WRONG_C: (i64, i64) = (3, 2);
const EQ21_F64_SLACK: f64 = 1e-9;

const QS_DEPTH: u32 = 8;
const QS_PS: [(i64, i64); 3] = [(1, 2), (1, 3), (1, 5)];

const THIN_EPS: (i64, i64) = (1, 1000);
const THIN_N_STAR: u64 = 10;
const THIN_POROUS_DEPTH: u32 = 10;
const TELESCOPE_THIN_EPS: (i64, i64) = (1, 50);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// `m_j = floor(log2(j + 1))`, recomputed without the library.
fn oracle_m(j: u64) -> u32 {
    63 - (j + 1).leading_zeros()
}

/// Mass of the surviving leaves by walking all `2^D` leaves. Stage windows
/// are consecutive blocks of `m_j` levels; a leaf dies when some block is
/// all left turns.
fn ex54_leaf_mass(p: &Rational, stages: u64) -> Rational {
    let windows: Vec<u32> = (1..=stages).map(oracle_m).collect();
    let depth: u32 = windows.iter().sum();
    let q = int(1) - p;
    let mut by_lefts = vec![0u64; depth as usize + 1];
    for leaf in 0u64..(1 << depth) {
        // Bit (depth - 1 - level) is the turn taken below `level`; 0 = left.
        let mut level = 0;
        let mut alive = true;
        for &w in &windows {
            let block = (leaf >> (depth - level - w)) & ((1 << w) - 1);
            if block == 0 {
                alive = false;
                break;
            }
            level += w;
        }
        if alive {
            by_lefts[(depth - leaf.count_ones()) as usize] += 1;
        }
    }
    by_lefts
        .iter()
        .enumerate()
        .map(|(l, &c)| int(c as i64) * powi(p, l as i64) * powi(&q, (depth - l as u32) as i64))
        .fold(int(0), |a, b| a + b)
}

fn closed_form(p: &Rational, stages: u64) -> Rational {
    (1..=stages)
        .map(|j| int(1) - powi(p, oracle_m(j) as i64))
        .fold(int(1), |a, b| a * b)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut enumerated = 0;
    for (n, d) in EX54_PS {
        let p = rat(n, d);
        for stages in 1..=EX54_STAGES {
            let expect = closed_form(&p, stages);
            let got = example54_mass(&p, stages).map_err(err)?;
            ensure(got.closed_form.partial.lo == expect && got.closed_form.partial.hi == expect, || {
                format!("closed form differs at p={p}, stages={stages}")
            })?;
            ensure(got.brute_force == expect, || {
                format!("histogram mass {} != {expect} at p={p}, stages={stages}", got.brute_force)
            })?;
            if example54_depth(stages) <= EX54_ENUM_DEPTH {
                let leaves = ex54_leaf_mass(&p, stages);
                ensure(leaves == expect, || format!("leaf oracle {leaves} != {expect} at p={p}, stages={stages}"))?;
                let tree = example54_enumerated_mass(&p, stages).map_err(err)?;
                ensure(tree == expect, || format!("tree cut-out mass {tree} != {expect} at p={p}, stages={stages}"))?;
                enumerated += 1;
            }
        }
    }
    let took = start.elapsed();
    ensure(took < EX54_TIME_BUDGET, || format!("took {took:?}"))?;
    Ok(format!(
        "48 (p, stages) pairs exact; {enumerated} also by leaf and tree enumeration at depth <= {EX54_ENUM_DEPTH}; {:.2}s",
        took.as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    for j in 1..=64 {
        let st = &example54_schedule(j)[j as usize - 1];
        ensure(st.m == oracle_m(j), || format!("schedule m_{j} = {}", st.m))?;
    }
    let Ex54Limit::Positive(b) = example54_limit(&rat(1, 3)).map_err(err)? else {
        return Err("p = 1/3 is not PositiveLimit".into());
    };
    ensure(b.n >= EX54_MIN_TRUNCATION, || format!("truncated at {} < 2^12", b.n))?;
    let floor = rat(EX54_POSITIVE_FLOOR.0, EX54_POSITIVE_FLOOR.1);
    ensure(b.lower() >= floor, || format!("lower bound {} < 1/10", to_f64_lossy(&b.lower())))?;
    let oracle: f64 = (1..=EX54_ORACLE_TERMS)
        .map(|j| 1.0 - (1.0f64 / 3.0).powi(oracle_m(j) as i32))
        .product();
    let (lo, hi) = (to_f64_lossy(&b.lower()), to_f64_lossy(&b.upper()));
    ensure(lo - EX54_ORACLE_SLACK <= oracle && oracle <= hi + EX54_ORACLE_SLACK, || {
        format!("f64 oracle {oracle} outside [{lo}, {hi}]")
    })?;
    let Ex54Limit::Zero { stage, partial } = example54_limit(&rat(2, 3)).map_err(err)? else {
        return Err("p = 2/3 is not ZeroLimit".into());
    };
    let ceiling = rat(EX54_ZERO_CEILING.0, EX54_ZERO_CEILING.1);
    ensure(partial < ceiling, || format!("partial product {partial} not below 1e-6"))?;
    let exact = closed_form(&rat(2, 3), stage);
    ensure(exact <= partial, || "certified partial product is not an upper bound".into())?;
    Ok(format!(
        "p=1/3 limit in [{lo:.6}, {hi:.6}] (N={}, oracle {oracle:.6}); p=2/3 product < 1e-6 at stage {stage}",
        b.n
    ))
}

fn criterion_3() -> Outcome {
    let beta = SequenceFamily::power(int(1), int(2), int(1)).map_err(err)?;
    for n in 1..=8u64 {
        let t = beta.term_exact(n).map_err(err)?;
        ensure(t == rat(1, ((n + 1) * (n + 1)) as i64), || format!("β_{n} = {t}"))?;
    }
    let b = product_bracket(&beta, TELESCOPE_N).map_err(err)?;
    let n = TELESCOPE_N as i64;
    // ∏_{k<=N} (1 - (k+1)^-2) = (N+2) / (2(N+1)).
    let partial = rat(n + 2, 2 * (n + 1));
    ensure(b.partial.contains(&partial), || "partial product misses the telescoped value".into())?;
    let half = rat(1, 2);
    let tol = rat(TELESCOPE_TOL.0, TELESCOPE_TOL.1);
    ensure(b.lower() <= half && half <= b.upper(), || "bracket misses 1/2".into())?;
    ensure(b.lower() >= &half - &tol && b.upper() <= &half + &tol, || "bracket wider than 1e-3".into())?;
    let tree = build_cantor(&beta, 10).map_err(err)?;
    ensure(tree.level_length(10) == rat(12, 22), || "level-10 length is not 12/22".into())?;
    Ok(format!(
        "N=10^4 bracket [{:.9}, {:.9}] encloses 1/2",
        to_f64_lossy(&b.lower()),
        to_f64_lossy(&b.upper())
    ))
}

fn criterion_4() -> Outcome {
    let alpha = SequenceFamily::geometric(rat(1, 2), rat(1, 2)).map_err(err)?;
    let ts = thick_from_cantor(&build_cantor(&alpha, FAT_TREE_DEPTH).map_err(err)?).map_err(err)?;
    let cert = certify_fat_thick(&ts, &int(1), &int(1)).map_err(err)?;
    ensure(cert.conclusion == FatConclusion::Positive, || "not Positive".into())?;
    let oracle: f64 = (1..=FAT_ORACLE_N).map(|n| 1.0 - 0.5f64.powi(n)).product();
    let (lo, hi) = (to_f64_lossy(&cert.bound.lower()), to_f64_lossy(&cert.bound.upper()));
    ensure(lo <= oracle + 1e-15 && oracle <= hi + 1e-15, || format!("oracle {oracle} outside [{lo}, {hi}]"))?;
    ensure(hi - lo <= FAT_TOL, || format!("bracket width {}", hi - lo))?;
    ensure((lo - FAT_LITERAL).abs() <= FAT_TOL && (hi - FAT_LITERAL).abs() <= FAT_TOL, || {
        format!("[{lo}, {hi}] not within 1e-8 of {FAT_LITERAL}")
    })?;
    Ok(format!("N0={}, bracket [{lo:.12}, {hi:.12}], oracle {oracle:.12}", cert.n0))
}

fn criterion_5() -> Outcome {
    let r = lemma43_find_m(&int(1), &int(2), &rat(1, 2)).map_err(err)?;
    ensure(r.m == LEMMA43_M, || format!("M = {}", r.m))?;
    ensure(r.fails_below, || "N = 1 not certified to fail".into())?;
    for n in LEMMA43_VERIFIED {
        ensure(r.verified.contains(&n), || format!("N = {n} not verified"))?;
    }
    // Σ_{m>=N} m^-2 < N^{-1/2}, checked in f64 with a long direct sum.
    let tail = |n: u64| -> f64 {
        let direct: f64 = (n..n + 100_000).map(|m| 1.0 / (m as f64 * m as f64)).sum();
        direct + 1.0 / (n as f64 + 100_000.0 - 0.5)
    };
    ensure(tail(1) > 1.0, || "f64 oracle: N = 1 should fail".into())?;
    for n in LEMMA43_VERIFIED {
        ensure(tail(n) < 1.0 / (n as f64).sqrt(), || format!("f64 oracle fails at N = {n}"))?;
    }
    Ok(format!("M = {}, N=1 fails, N in 2..=8 verified {:?}", r.m, r.verified))
}

/// Exact `F(i / 2^level)` for the binomial measure with left weight `p`.
fn dyadic_cdf(p: &Rational, level: u32) -> Vec<Rational> {
    let q = int(1) - p;
    let mut out = Vec::with_capacity((1 << level) + 1);
    let mut acc = int(0);
    out.push(acc.clone());
    for i in 0u64..(1 << level) {
        let rights = i.count_ones() as i64;
        acc += powi(p, level as i64 - rights) * powi(&q, rights);
        out.push(acc.clone());
    }
    out
}

/// Max of `μ(B(x, 2r)) / μ(B(x, r))` over centers `i / 2^(D+1)` and radii
/// `2^-k`, `0 <= k <= D`, balls clipped to [0,1].
fn oracle_doubling(p: &Rational, depth: u32) -> Rational {
    let level = depth + 1;
    let f = dyadic_cdf(p, level);
    let n = 1i64 << level;
    let ball = |x: i64, r: i64| &f[(x + r).min(n) as usize] - &f[(x - r).max(0) as usize];
    let mut best = int(0);
    for x in 0..=n {
        for k in 0..=depth {
            let r = 1i64 << (level - k);
            let ratio = ball(x, 2 * r) / ball(x, r);
            if ratio > best {
                best = ratio;
            }
        }
    }
    best
}

fn criterion_6() -> Outcome {
    let half = full_report(&TreeMeasure::binomial(rat(1, 2)).map_err(err)?, DOUBLING_DEPTH).map_err(err)?;
    ensure(half.c == int(2), || format!("Binomial(1/2): C = {}", half.c))?;
    ensure(oracle_doubling(&rat(1, 2), DOUBLING_DEPTH) == int(2), || "oracle disagrees at p = 1/2".into())?;
    let third = full_report(&TreeMeasure::binomial(rat(1, 3)).map_err(err)?, DOUBLING_DEPTH).map_err(err)?;
    let oracle = oracle_doubling(&rat(1, 3), DOUBLING_DEPTH);
    ensure(third.c == oracle, || format!("Binomial(1/3): C = {} but oracle {oracle}", third.c))?;
    ensure(third.c >= int(3), || format!("Binomial(1/3): C = {} < 3", third.c))?;
    let w = &third.witness;
    ensure(w.ratio == third.c, || "witness ratio is not C".into())?;
    let f = dyadic_cdf(&rat(1, 3), DOUBLING_DEPTH + 1);
    let scale = pow2(DOUBLING_DEPTH as i64 + 1);
    let at = |v: Rational| -> Rational {
        let v = v.max(int(0)).min(int(1));
        f[(v * &scale).to_integer().try_into().unwrap_or(0usize)].clone()
    };
    let wr = &w.r;
    let check = (at(&w.x + wr * int(2)) - at(&w.x - wr * int(2))) / (at(&w.x + wr) - at(&w.x - wr));
    ensure(check == w.ratio, || format!("witness recomputes to {check}"))?;
    let mirror = full_report(&TreeMeasure::binomial(rat(2, 3)).map_err(err)?, DOUBLING_DEPTH).map_err(err)?;
    ensure(mirror.c == third.c, || format!("C(2/3) = {} != C(1/3) = {}", mirror.c, third.c))?;
    Ok(format!(
        "C(1/2) = 2; C(1/3) = C(2/3) = {} ~ {:.4} at x={}, r={}",
        third.c,
        to_f64_lossy(&third.c),
        w.x,
        w.r
    ))
}

fn criterion_7() -> Outcome {
    let mut checked = 0;
    for (i, (n, d)) in EQ21_MEASURES.into_iter().enumerate() {
        let p = rat(n, d);
        let m = TreeMeasure::binomial(p.clone()).map_err(err)?;
        let c = full_report(&m, EQ21_DEPTH).map_err(err)?.c;
        let trials = eq21_trials(EQ21_DEPTH, EQ21_TRIALS_PER_MEASURE, Limits::default().seed + i as u64);
        match verify_eq21(&m, &c, &trials, EQ21_DEPTH + 1).map_err(err)? {
            Eq21Verdict::Holds { checked: k } => checked += k,
            other => return Err(format!("p = {p}, C = {c}: {other:?}")),
        }
        // Independent recheck in f64 on the exact dyadic distribution function.
        let f = dyadic_cdf(&p, EQ21_DEPTH + 2);
        let scale = pow2(EQ21_DEPTH as i64 + 2);
        let at = |v: Rational| to_f64_lossy(&f[(v.max(int(0)).min(int(1)) * &scale).to_integer().try_into().unwrap_or(0usize)]);
        let s = to_f64_lossy(&c).log2();
        for t in &trials {
            let ball = at(&t.x + &t.r) - at(&t.x - &t.r);
            let set = at(t.a.hi.clone()) - at(t.a.lo.clone());
            let bound = (to_f64_lossy(&t.r) / (2.0 * to_f64_lossy(&t.a.diameter()))).powf(s);
            ensure(ball / set >= bound - EQ21_F64_SLACK, || format!("f64 oracle: counterexample at {t:?}"))?;
        }
    }
    let wrong = rat(EQ21_WRONG_C.0, EQ21_WRONG_C.1);
    let trials = eq21_trials(EQ21_DEPTH, EQ21_TRIALS_PER_MEASURE, Limits::default().seed);
    let Eq21Verdict::Counterexample { trial, ratio, bound } =
        verify_eq21(&TreeMeasure::lebesgue(), &wrong, &trials, EQ21_DEPTH + 1).map_err(err)?
    else {
        return Err("C = 3/2 on Lebesgue produced no counterexample".into());
    };
    // Lebesgue: ratio = |B ∩ [0,1]| / |A| exactly.
    let clip = |v: Rational| v.max(int(0)).min(int(1));
    let exact = (clip(&trial.x + &trial.r) - clip(&trial.x - &trial.r)) / trial.a.diameter();
    let s = 1.5f64.log2();
    let bound_f = (to_f64_lossy(&trial.r) / (2.0 * to_f64_lossy(&trial.a.diameter()))).powf(s);
    ensure(ratio.lower <= exact && exact <= ratio.upper, || "counterexample ratio misreported".into())?;
    ensure(to_f64_lossy(&exact) < bound_f - EQ21_F64_SLACK, || "f64 oracle does not confirm the counterexample".into())?;
    ensure(ratio.upper < bound.lo, || "counterexample is not certified".into())?;
    Ok(format!(
        "{checked} configurations hold with scanned C; C=3/2 fails at A={}, x={}, r={}",
        trial.a, trial.x, trial.r
    ))
}

fn criterion_8() -> Outcome {
    for (n, d) in QS_PS {
        let p = rat(n, d);
        let src = TreeMeasure::binomial(p.clone()).map_err(err)?;
        let map = QSMap::new(src, QS_DEPTH);
        let table = map.tabulate(QS_DEPTH).map_err(err)?;
        let oracle = dyadic_cdf(&p, QS_DEPTH);
        ensure(table.values == oracle, || format!("tabulated values differ from the oracle at p = {p}"))?;
        for (i, v) in oracle.iter().enumerate() {
            let x = rat(i as i64, 1 << QS_DEPTH);
            let e = map.evaluate(&x).map_err(err)?;
            ensure(e.is_exact() && &e.lower == v, || format!("evaluate({x}) at p = {p}"))?;
        }
        for t in [table, QSTable::dyadic(QS_DEPTH, oracle).map_err(err)?] {
            let back = measure_from_map(&t).map_err(err)?;
            let Weights::Table(rows) = &back.weights else {
                return Err("measure_from_map did not return table weights".into());
            };
            ensure(rows.len() == QS_DEPTH as usize, || "wrong depth".into())?;
            for (k, row) in rows.iter().enumerate() {
                ensure(row.len() == 1 << k && row.iter().all(|w| w == &p), || {
                    format!("level {k} weights are not all {p}")
                })?;
            }
        }
    }
    let c = pullback_constant(&int(2), &int(2)).map_err(err)?;
    ensure(c.lo == int(8) && c.hi == int(8), || format!("pullback_constant(2,2) = [{}, {}]", c.lo, c.hi))?;
    Ok("round trip exact at depth 8 for p in {1/2, 1/3, 1/5}; pullback_constant(2,2) = 8".into())
}

fn criterion_9() -> Outcome {
    let half = SequenceFamily::constant(rat(1, 2)).map_err(err)?;
    let cert = certify_thin_porous(&half, &int(1), &int(1), &rat(THIN_EPS.0, THIN_EPS.1)).map_err(err)?;
    ensure(cert.n_star == THIN_N_STAR, || format!("n* = {}", cert.n_star))?;
    for (n, u) in cert.decay_curve.iter().enumerate() {
        ensure(*u == pow2(-(n as i64)), || format!("u_{n} = {u}"))?;
    }
    let porous = build_porous(&half, THIN_POROUS_DEPTH).map_err(err)?;
    for n in 0..=THIN_POROUS_DEPTH {
        ensure(porous.length(n) == pow2(-(n as i64)), || format!("|F_{n}| = {}", porous.length(n)))?;
    }
    // α_n = 1/n from n = 2, i.e. α_k = 1/(k+1) after reindexing.
    let harmonic = SequenceFamily::power(int(1), int(1), int(1)).map_err(err)?;
    let eps = rat(TELESCOPE_THIN_EPS.0, TELESCOPE_THIN_EPS.1);
    let cert = certify_thin_porous(&harmonic, &int(1), &int(1), &eps).map_err(err)?;
    for (k, u) in cert.decay_curve.iter().enumerate() {
        ensure(*u == rat(1, k as i64 + 1), || format!("telescoping curve u_{k} = {u}"))?;
    }
    ensure(cert.n_star == TELESCOPE_THIN_EPS.1 as u64, || format!("telescoping n* = {}", cert.n_star))?;
    Ok(format!(
        "n*(1e-3) = 10 on the 2^-n curve; 1/n curve exact through n* = {}",
        cert.n_star
    ))
}

fn criterion_10() -> Outcome {
    let limits = Limits::default();
    let spec = ExperimentSpec::default();
    let bin = env!("CARGO_BIN_EXE_dmlab");
    for name in EXAMPLES {
        let a = run_example(name, &spec, &limits).map_err(err)?.render();
        let b = run_example(name, &spec, &limits).map_err(err)?.render();
        ensure(a == b, || format!("{name}: library reports differ"))?;
        let runs: Vec<Vec<u8>> = (0..2)
            .map(|_| Command::new(bin).args(["example", name]).output().map(|o| o.stdout))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        ensure(runs[0] == runs[1], || format!("{name}: CLI reports differ"))?;
        ensure(runs[0] == a.as_bytes(), || format!("{name}: CLI and library reports differ"))?;
    }
    Ok(format!("{} examples byte-identical across library and CLI runs", EXAMPLES.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("leftmost-descendant mass exactness", criterion_1),
        ("leftmost-descendant limit verdicts", criterion_2),
        ("telescoping product", criterion_3),
        ("fatness product", criterion_4),
        ("tail-sum threshold solver", criterion_5),
        ("doubling scans", criterion_6),
        ("mass decay sampling", criterion_7),
        ("qs round trip", criterion_8),
        ("thinness decay", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

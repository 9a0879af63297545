//! One function per subcommand; each returns a finished [`Report`].

use anyhow::{Context, Result};
use dmlab_core::certify::{
    certify_fat_alpha, certify_fat_thick_with, certify_thin_porous, example54_limit,
    example54_mass, example54_schedule, thm11_bound, Ex54Limit, FatConclusion,
    FatnessCertificate, ProductBracket, DEFAULT_FAT_TERMS,
};
use dmlab_core::doubling::{full_report, ratio_by_scale, verify_eq21, DoublingReport, Eq21Verdict};
use dmlab_core::geom::{
    build_cantor, build_porous_with_limits, thick_from_cantor, verify_thick, Ambient,
    CutOutConfig, RationalInterval, ThickVerdict, DEFAULT_RESOLUTION,
};
use dmlab_core::measure::{MeasureBase, TreeMeasure};
use dmlab_core::qs::{pullback_constant, qs_ratio_scan, QSMap};
use dmlab_core::rational::{int, powi, Rational};
use dmlab_core::seq::{log_floor_exponent, Convergence, Ell0, SequenceFamily};
use serde_json::{json, Value};

use crate::limits::Limits;
use crate::parse::family_label;
use crate::plotdata::Series;
use crate::report::{bracket, enclosure, exact, mass, text, window, Report, Status};
use crate::sampling::eq21_trials;

fn convergence(c: Convergence) -> &'static str {
    match c {
        Convergence::Converges => "converges",
        Convergence::Diverges => "diverges",
    }
}

fn product_json(b: &ProductBracket) -> Value {
    json!({
        "from": b.from,
        "n": b.n,
        "partial": enclosure(&b.partial),
        "tail_lower": exact(&b.tail_lower),
        "tail_upper": exact(&b.tail_upper),
        "limit": bracket(&b.lower(), &b.upper()),
    })
}

pub fn seq(f: &SequenceFamily, p: Option<&Rational>, terms: u64, tail_at: u64) -> Result<Report> {
    let mut r = Report::new("seq", "classify the family in the ℓ^p scale");
    r.input("family", family_label(f)).input("terms", terms).input("tail_at", tail_at);
    let shown = f.len().map_or(terms, |l| terms.min(l as u64));
    let list: Vec<Value> = (1..=shown)
        .map(|n| f.term(n).map(|b| enclosure(&b)))
        .collect::<std::result::Result<_, _>>()?;
    r.result("terms", list);
    r.result(
        "ell0",
        match f.classify_ell0() {
            Ell0::InEll0 => json!({ "member": true }),
            Ell0::NotInEll0 { witness } => json!({ "member": false, "diverges_at": exact(&witness) }),
            Ell0::Undecidable => json!({ "member": "undecidable" }),
        },
    );
    if let Some(p) = p {
        r.input("p", exact(p));
        match f.classify_ellp(p) {
            Ok(c) => {
                r.result("ellp", convergence(c));
                if c == Convergence::Converges {
                    let head = f.partial_sum(p, 1, tail_at)?;
                    r.result("partial_sum", enclosure(&head));
                    r.result("tail_upper", exact(&f.tail_sum_upper(p, tail_at)?));
                }
            }
            Err(dmlab_core::Error::Undecidable) => {
                r.result("ellp", "undecidable");
                r.status = Status::Inconclusive;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(r)
}

pub fn cantor(beta: &SequenceFamily, depth: u32, limits: &Limits) -> Result<Report> {
    limits.depth("tree", depth)?;
    limits.nodes("tree", 1u64 << depth)?;
    let tree = build_cantor(beta, depth)?;
    let mut r = Report::new("cantor", "level k has length ∏_{j<=k} (1 - β_j)");
    r.input("beta", family_label(beta)).input("depth", depth);
    let mut series = Series::new("level_length");
    let mut expect = int(1);
    let mut ok = true;
    let mut lengths = Vec::new();
    for k in 0..=depth {
        let len = tree.level_length(k);
        ok &= len == expect;
        lengths.push(exact(&len));
        series.push(k, len);
        if k < depth {
            expect *= int(1) - beta.term_exact(k as u64 + 1)?;
        }
    }
    r.series.push(series);
    r.result("level_lengths", lengths);
    if let Some(g) = &tree.gap_ratio_sup {
        r.result("gap_ratio_sup", exact(g));
    }
    if let Some(c) = &tree.perfectness_constant {
        r.result("perfectness_constant", exact(c));
    }
    match thick_from_cantor(&tree) {
        Ok(ts) => {
            let v = verify_thick(&ts, depth);
            r.result(
                "thick",
                json!({ "c": exact(&ts.c), "overlap": ts.overlap_bound, "valid": v == ThickVerdict::Valid }),
            );
            ok &= v == ThickVerdict::Valid;
        }
        Err(e) => {
            r.result("thick", json!({ "error": e.to_string() }));
        }
    }
    r.status = Status::from_bool(ok);
    Ok(r)
}

pub fn measure(label: &str, m: &TreeMeasure, depth: u32, xs: &[Rational], limits: &Limits) -> Result<Report> {
    limits.depth("measure", depth)?;
    let mut r = Report::new("measure", "cdf values of the tree measure");
    r.input("measure", label).input("depth", depth);
    r.result("total_mass", exact(&m.total_mass));
    let cdf: Vec<Value> = xs
        .iter()
        .map(|x| -> Result<Value> {
            let v = match m.binomial_cdf_exact(x) {
                Some(v) => exact(&v),
                None => mass(&m.cdf(x, depth)?),
            };
            Ok(json!({ "x": text(x), "cdf": v }))
        })
        .collect::<Result<_>>()?;
    r.result("cdf", cdf);
    let shown = depth.min(8);
    let masses = m.level_masses(shown)?;
    let mut series = Series::new("cdf");
    let mut acc = int(0);
    series.push(text(&m.node_interval(shown, 0)?.lo), acc.clone());
    for (i, w) in masses.iter().enumerate() {
        acc += w;
        series.push(text(&m.node_interval(shown, i as u64)?.hi), acc.clone());
    }
    r.series.push(series);
    Ok(r)
}

fn doubling_json(rep: &DoublingReport) -> Value {
    let w = (&rep.window.0, &rep.window.1);
    let mut v = json!({
        "C": window(&rep.c, w),
        "C_attained": window(&rep.c_lower, w),
        "s": enclosure(&rep.s),
        "centers": rep.centers,
        "radii": rep.radii,
        "witness": {
            "x": text(&rep.witness.x),
            "r": text(&rep.witness.r),
            "ratio": exact(&rep.witness.ratio),
        },
        "violations": rep.violations,
    });
    if let Some(f) = &rep.eq22_fit {
        v["upper_ratio_fit"] = json!({
            "Lambda": window(&f.lambda, w),
            "t": exact(&f.t),
            "binding_gap": f.binding_gap,
            "holdout_checked": f.holdout_checked,
            "holdout_violations": f.holdout_violations,
        });
    }
    if let Some(f) = &rep.lemma21_fit {
        v["mass_bounds_fit"] = json!({
            "lambda": window(&f.lambda_lower, w),
            "s": exact(&f.s),
            "Lambda": window(&f.lambda_upper, w),
            "t": exact(&f.t),
        });
    }
    v
}

fn eq21_json(v: &Eq21Verdict) -> Value {
    match v {
        Eq21Verdict::Holds { checked } => json!({ "verdict": "holds", "checked": checked }),
        Eq21Verdict::Counterexample { trial, ratio, bound } => json!({
            "verdict": "counterexample",
            "A": [text(&trial.a.lo), text(&trial.a.hi)],
            "x": text(&trial.x),
            "r": text(&trial.r),
            "ratio": mass(ratio),
            "bound": enclosure(bound),
        }),
        Eq21Verdict::Inconclusive { checked, undecided } => {
            json!({ "verdict": "inconclusive", "checked": checked, "undecided": undecided })
        }
    }
}

pub struct DoublingArgs<'a> {
    pub label: &'a str,
    pub depth: u32,
    pub trials: usize,
    pub wrong_c: Option<Rational>,
}

pub fn doubling(m: &TreeMeasure, args: &DoublingArgs, limits: &Limits) -> Result<Report> {
    limits.depth("scan", args.depth)?;
    let rep = full_report(m, args.depth)?;
    let mut r = Report::new(
        "doubling",
        "μ(B(x,r)) / μ(A) >= (r / 2 diam A)^s with s = log2 C on sampled configurations",
    );
    r.input("measure", args.label).input("depth", args.depth);
    r.result("scan", doubling_json(&rep));
    let mut series = Series::new("doubling_ratio_by_scale");
    for (radius, ratio) in ratio_by_scale(m, args.depth)? {
        series.push(text(&radius), ratio);
    }
    r.series.push(series);
    let mut status = if rep.violations.is_empty() {
        Status::Passed
    } else {
        Status::Inconclusive
    };
    if args.trials > 0 {
        if !matches!(m.base, MeasureBase::Dyadic) {
            r.result("eq21", json!({ "skipped": "sampling needs the dyadic base" }));
        } else {
            r.input("trials", args.trials).input("seed", limits.seed);
            let trials = eq21_trials(args.depth, args.trials, limits.seed);
            let v = verify_eq21(m, &rep.c, &trials, args.depth + 1)?;
            match v {
                Eq21Verdict::Counterexample { .. } => status = Status::Failed,
                Eq21Verdict::Inconclusive { .. } if status == Status::Passed => {
                    status = Status::Inconclusive
                }
                _ => {}
            }
            r.result("eq21", eq21_json(&v));
            if let Some(c) = &args.wrong_c {
                r.input("wrong_C", exact(c));
                let w = verify_eq21(m, c, &trials, args.depth + 1)?;
                r.result("eq21_wrong_C", eq21_json(&w));
            }
        }
    }
    r.status = status;
    Ok(r)
}

fn fat_json(c: &FatnessCertificate) -> Value {
    json!({
        "N0": c.n0,
        "bound": product_json(&c.bound),
        "conclusion": match c.conclusion {
            FatConclusion::Positive => "positive",
            FatConclusion::Inconclusive => "inconclusive",
        },
    })
}

fn fat_status(c: FatConclusion) -> Status {
    match c {
        FatConclusion::Positive => Status::Passed,
        FatConclusion::Inconclusive => Status::Inconclusive,
    }
}

/// With `depth > 0` the certificate goes through the thick structure of
/// the middle-interval tree built from `alpha`.
pub fn certify_fat(alpha: &SequenceFamily, t: &Rational, c3n: &Rational, depth: u32, limits: &Limits) -> Result<Report> {
    limits.depth("tree", depth)?;
    let mut r = Report::new("certify fat", "∏_{n>=N0} (1 - C3N α_n^t) > 0");
    r.input("alpha", family_label(alpha))
        .input("t", exact(t))
        .input("C3N", exact(c3n))
        .input("depth", depth);
    let cert = if depth > 0 {
        let tree = build_cantor(alpha, depth)?;
        let ts = thick_from_cantor(&tree)?;
        r.result("thick_c", exact(&ts.c));
        certify_fat_thick_with(&ts, t, c3n, DEFAULT_FAT_TERMS)?
    } else {
        certify_fat_alpha(alpha, t, c3n, DEFAULT_FAT_TERMS)?
    };
    r.result("certificate", fat_json(&cert));
    r.status = fat_status(cert.conclusion);
    Ok(r)
}

pub fn certify_thin(alpha: &SequenceFamily, s: &Rational, c: &Rational, eps: &Rational, limits: &Limits) -> Result<Report> {
    let mut r = Report::new("certify thin", "μ(F_n) <= ∏_{k<=n} (1 - c α_k^s) μ(F_0) → 0");
    r.input("alpha", family_label(alpha))
        .input("s", exact(s))
        .input("c", exact(c))
        .input("epsilon", exact(eps));
    let cert = certify_thin_porous(alpha, s, c, eps)?;
    r.result("divergence", convergence(cert.divergence));
    r.result("n_star", cert.n_star);
    r.result("bound_at_n_star", exact(cert.decay_curve.last().expect("curve has entry 0")));
    let mut series = Series::new("decay_curve");
    for (n, u) in cert.decay_curve.iter().enumerate() {
        series.push(n, u.clone());
    }
    r.series.push(series);
    // Lebesgue lengths of the dyadic porous construction, where it fits.
    let depth = (cert.n_star as u32).min(limits.max_depth).min(16);
    if let Ok(p) = build_porous_with_limits(alpha, depth, DEFAULT_RESOLUTION, limits.max_nodes) {
        let mut lengths = Series::new("porous_length");
        for n in 0..=depth {
            lengths.push(n, p.length(n));
        }
        r.result(
            "porous_lengths",
            lengths.points.iter().map(|(_, y)| exact(y)).collect::<Vec<_>>(),
        );
        r.series.push(lengths);
    }
    Ok(r)
}

pub struct CutoutArgs<'a> {
    pub label: &'a str,
    pub family: SequenceFamily,
    /// Diameters are `scale · α_i`, packed from the left.
    pub scale: Rational,
    pub count: u64,
    pub balls: Option<Vec<(Rational, Rational)>>,
    pub depth: u32,
    pub r: Rational,
    pub n: u64,
    pub p: Rational,
}

pub fn packed_balls(f: &SequenceFamily, scale: &Rational, count: u64) -> Result<Vec<RationalInterval>> {
    let mut at = int(0);
    let mut out = Vec::new();
    for i in 1..=count {
        let d = f.term_exact(i)? * scale;
        let next = &at + &d;
        out.push(RationalInterval::closed(at, next.clone())?);
        at = next;
    }
    Ok(out)
}

pub fn certify_cutout(m: &TreeMeasure, args: &CutoutArgs, limits: &Limits) -> Result<Report> {
    limits.depth("scan", args.depth)?;
    limits.nodes("balls", args.count)?;
    let balls = match &args.balls {
        Some(b) => b
            .iter()
            .map(|(lo, hi)| RationalInterval::closed(lo.clone(), hi.clone()))
            .collect::<std::result::Result<_, _>>()?,
        None => packed_balls(&args.family, &args.scale, args.count)?,
    };
    let cfg = CutOutConfig::new(balls, args.family.clone(), Ambient::UnitInterval)?;
    let rep = full_report(m, args.depth)?;
    let mut r = Report::new(
        "certify cutout",
        "ν(E) >= C1 N^{-Rs} - c_p^{t/p} C2 Σ_{m>=N} m^{-t/p} > 0",
    );
    r.input("measure", args.label)
        .input("family", family_label(&args.family))
        .input("balls", cfg.balls.len())
        .input("depth", args.depth)
        .input("R", exact(&args.r))
        .input("N", args.n)
        .input("p", exact(&args.p));
    r.result("scan", doubling_json(&rep));
    let b = thm11_bound(&cfg, &rep, &args.r, args.n, &args.p).context("final bound")?;
    r.result(
        "bound",
        json!({
            "s": exact(&b.s),
            "t": exact(&b.t),
            "C1": exact(&b.c1),
            "C2": exact(&b.c2),
            "largest_gap": exact(&b.gap),
            "c_p_upper": exact(&b.c_p_upper),
            "main_term_lower": exact(&b.main_term),
            "tail_term_upper": exact(&b.tail_term),
            "value": exact(&b.value),
            "conclusion": match b.conclusion {
                FatConclusion::Positive => "positive",
                FatConclusion::Inconclusive => "inconclusive",
            },
        }),
    );
    r.status = fat_status(b.conclusion);
    Ok(r)
}

pub fn certify_example54(p: &Rational, stages: u64) -> Result<Report> {
    let mut r = Report::new(
        "certify example54",
        "μ_p(E) > 0 iff Σ p^{m_j} < ∞ (positive for p = 1/3, zero for p = 2/3)",
    );
    r.input("p", exact(p)).input("stages", stages);
    let res = example54_mass(p, stages)?;
    let schedule: Vec<Value> = example54_schedule(stages)
        .iter()
        .map(|s| json!({ "j": s.j, "m": s.m, "k": s.level + 1 }))
        .collect();
    r.result("schedule", schedule);
    let mut series = Series::new("partial_product");
    let mut prod = int(1);
    let mut decreasing = true;
    for j in 1..=stages {
        let next = &prod * (int(1) - powi(p, log_floor_exponent(j) as i64));
        decreasing &= next < prod;
        prod = next;
        series.push(j, prod.clone());
    }
    r.series.push(series);
    let agree = res.closed_form.partial.is_exact() && res.closed_form.partial.lo == res.brute_force;
    r.result("closed_form", product_json(&res.closed_form));
    r.result("brute_force", exact(&res.brute_force));
    r.result("exact_match", agree);
    r.result("partial_products_decreasing", decreasing);
    r.result("summable", res.summable);
    let limit = example54_limit(p)?;
    let limit_ok = match &limit {
        Ex54Limit::Positive(b) => {
            r.result("verdict", "PositiveLimit");
            r.result("limit", product_json(b));
            res.summable && b.lower() > int(0)
        }
        Ex54Limit::Zero { stage, partial } => {
            r.result("verdict", "ZeroLimit");
            r.result("limit", json!({ "stage": stage, "partial_upper": exact(partial) }));
            !res.summable
        }
    };
    r.status = Status::from_bool(agree && decreasing && limit_ok);
    Ok(r)
}

pub fn qs_scan(label: &str, m: &TreeMeasure, depth: u32, limits: &Limits) -> Result<(Report, String)> {
    limits.depth("scan", depth)?;
    let rows = qs_ratio_scan(&QSMap::new(m.clone(), depth), depth)?;
    let mut r = Report::new("qs scan", "empirical envelope of the triple-ratio distortion");
    r.input("measure", label).input("depth", depth);
    let mut csv = String::from("tau,max_ratio_num,max_ratio_den,witness_x,witness_y,witness_z\n");
    let mut series = Series::new("max_ratio");
    let mut out = Vec::new();
    for row in &rows {
        let (x, y, z) = &row.witness;
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            text(&row.tau),
            row.max_ratio.numer(),
            row.max_ratio.denom(),
            text(x),
            text(y),
            text(z)
        ));
        series.push(text(&row.tau), row.max_ratio.clone());
        out.push(json!({
            "tau": text(&row.tau),
            "max_ratio": window(&row.max_ratio, (&dmlab_core::rational::pow2(-(depth as i64)), &int(1))),
            "witness": [text(x), text(y), text(z)],
        }));
    }
    r.series.push(series);
    r.result("rows", out);
    Ok((r, csv))
}

pub fn qs_pullback(c: &Rational, eta2: &Rational) -> Result<Report> {
    let mut r = Report::new("qs pullback", "pulled-back doubling constant C^{2 log2 η(2) + 1}");
    r.input("C", exact(c)).input("eta2", exact(eta2));
    r.result("constant", enclosure(&pullback_constant(c, eta2)?));
    Ok(r)
}

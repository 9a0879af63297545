//! Runners for the worked examples, configured by an [`ExperimentSpec`].

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use dmlab_core::certify::{
    example51_packed, example51_verdict, lemma41_solve, lemma43_find_m, product_bracket,
    Example51Verdict,
};
use dmlab_core::geom::{build_cantor, RationalInterval};
use dmlab_core::measure::TreeMeasure;
use dmlab_core::rational::{int, rat, Rational};
use dmlab_core::seq::{Convergence, SequenceFamily};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::commands::{self, CutoutArgs};
use crate::limits::Limits;
use crate::parse;
use crate::report::{bracket, exact, Report, Status};

pub const EXAMPLES: [&str; 6] = ["ex5_1", "ex5_2", "ex5_4", "prop2_3", "thm3_2", "thm1_1"];

/// Experiment configuration, from a JSON file and/or flags. Rationals are
/// strings (`"1/3"`); families and measures are text forms or `{"kind": ...}`
/// objects, see [`crate::parse`].
#[derive(Clone, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: Option<String>,
    pub p: Option<String>,
    pub stages: Option<u64>,
    pub family: Option<Value>,
    pub measure: Option<Value>,
    pub depth: Option<u32>,
    pub n: Option<u64>,
    pub t: Option<String>,
    pub s: Option<String>,
    pub c: Option<String>,
    pub c3n: Option<String>,
    pub epsilon: Option<String>,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("invalid experiment spec")
    }

    /// Fields set in `other` win.
    pub fn merge(self, other: ExperimentSpec) -> ExperimentSpec {
        ExperimentSpec {
            name: other.name.or(self.name),
            p: other.p.or(self.p),
            stages: other.stages.or(self.stages),
            family: other.family.or(self.family),
            measure: other.measure.or(self.measure),
            depth: other.depth.or(self.depth),
            n: other.n.or(self.n),
            t: other.t.or(self.t),
            s: other.s.or(self.s),
            c: other.c.or(self.c),
            c3n: other.c3n.or(self.c3n),
            epsilon: other.epsilon.or(self.epsilon),
            out: other.out.or(self.out),
            plot: other.plot.or(self.plot),
        }
    }

    fn rational_or(&self, v: &Option<String>, default: Rational) -> Result<Rational> {
        v.as_deref().map_or(Ok(default), parse::rational)
    }

    fn family_or(&self, default: &str) -> Result<SequenceFamily> {
        match &self.family {
            Some(v) => parse::family_json(v),
            None => parse::family(default),
        }
    }
}

pub fn run_example(name: &str, spec: &ExperimentSpec, limits: &Limits) -> Result<Report> {
    let mut r = match name {
        "ex5_1" => ex5_1(spec),
        "ex5_2" => ex5_2(spec, limits),
        "ex5_4" => ex5_4(spec),
        "prop2_3" => prop2_3(spec, limits),
        "thm3_2" => thm3_2(spec, limits),
        "thm1_1" => thm1_1(spec, limits),
        _ => bail!("unknown example {name:?}; expected one of {}", EXAMPLES.join(", ")),
    }
    .with_context(|| format!("example {name}"))?;
    r.command = format!("example {name}");
    Ok(r)
}

fn verdict_json(v: &Example51Verdict) -> Value {
    match v {
        Example51Verdict::Thin => json!({ "verdict": "thin" }),
        Example51Verdict::Fat { remainder_lower } => {
            json!({ "verdict": "fat", "remainder_lower": exact(remainder_lower) })
        }
    }
}

/// Intervals tiling `[0, T]` leave a thin remainder exactly when their
/// interiors are disjoint.
fn ex5_1(spec: &ExperimentSpec) -> Result<Report> {
    let f = spec.family_or("geometric:1/2:1/2")?;
    let n = spec.n.unwrap_or(12);
    let total = match &f {
        SequenceFamily::Geometric { a, q } => a / (int(1) - q),
        _ => bail!("ex5_1 needs a geometric family so that T = Σ α_i is exact"),
    };
    let mut r = Report::new(
        "example",
        "the remainder of intervals of total length T in [0,T] is thin iff their interiors are pairwise disjoint",
    );
    r.input("family", parse::family_label(&f)).input("n", n).input("T", exact(&total));
    let packed = example51_packed(&f, &total, n)?;
    let disjoint = example51_verdict(&packed, &total, Some(&f))?;
    // Slide the second interval left over half of the first.
    let mut overlapping = packed.clone();
    if overlapping.len() >= 2 {
        let shift = overlapping[0].diameter() / int(2);
        let iv = &overlapping[1];
        overlapping[1] = RationalInterval::closed(&iv.lo - &shift, &iv.hi - &shift)?;
    }
    let overlap = example51_verdict(&overlapping, &total, None)?;
    let prefix_only = example51_verdict(&packed, &total, None)?;
    r.result("disjoint_tiling", verdict_json(&disjoint));
    r.result("overlapping_prefix", verdict_json(&overlap));
    r.result("prefix_without_tail", verdict_json(&prefix_only));
    let ok = disjoint == Example51Verdict::Thin
        && matches!(overlap, Example51Verdict::Fat { .. })
        && matches!(prefix_only, Example51Verdict::Fat { .. });
    r.status = Status::from_bool(ok);
    Ok(r)
}

/// `C(β)` with `β_n = (n+1)^{-2}` has Lebesgue measure `1/2`, so it is not
/// thin; fatness is beyond any finite computation.
fn ex5_2(spec: &ExperimentSpec, limits: &Limits) -> Result<Report> {
    let beta = spec.family_or("power:1:2:1")?;
    let n = spec.n.unwrap_or(10_000);
    let depth = limits.depth("tree", spec.depth.unwrap_or(10))?;
    let mut r = Report::new(
        "example",
        "C(β) is neither thin nor fat: positive Lebesgue measure witnesses non-thinness",
    );
    r.input("beta", parse::family_label(&beta)).input("N", n).input("depth", depth);
    let mut classes = serde_json::Map::new();
    for p in [rat(2, 5), rat(1, 2), rat(3, 5), int(1)] {
        let c = beta.classify_ellp(&p)?;
        classes.insert(
            crate::report::text(&p),
            json!(if c == Convergence::Converges { "converges" } else { "diverges" }),
        );
    }
    r.result("ellp", classes);
    let b = product_bracket(&beta, n)?;
    r.result("lebesgue_mass", bracket(&b.lower(), &b.upper()));
    let tree = build_cantor(&beta, depth)?;
    r.result("level_length", exact(&tree.level_length(depth)));
    r.result("fatness", "open");
    r.result("note", "desk-scale cannot refute fatness");
    let half = rat(1, 2);
    r.status = Status::from_bool(b.lower() > int(0) && b.lower() <= half && half <= b.upper());
    Ok(r)
}

fn ex5_4(spec: &ExperimentSpec) -> Result<Report> {
    let p = spec.rational_or(&spec.p, rat(1, 3))?;
    let stages = spec.stages.unwrap_or(12);
    commands::certify_example54(&p, stages)
}

fn prop2_3(spec: &ExperimentSpec, limits: &Limits) -> Result<Report> {
    let alpha = spec.family_or("constant:1/2")?;
    let s = spec.rational_or(&spec.s, int(1))?;
    let c = spec.rational_or(&spec.c, int(1))?;
    let eps = spec.rational_or(&spec.epsilon, rat(1, 1000))?;
    commands::certify_thin(&alpha, &s, &c, &eps, limits)
}

fn thm3_2(spec: &ExperimentSpec, limits: &Limits) -> Result<Report> {
    let alpha = spec.family_or("geometric:1/2:1/2")?;
    let t = spec.rational_or(&spec.t, int(1))?;
    let c3n = spec.rational_or(&spec.c3n, int(1))?;
    commands::certify_fat(&alpha, &t, &c3n, spec.depth.unwrap_or(6), limits)
}

fn thm1_1(spec: &ExperimentSpec, limits: &Limits) -> Result<Report> {
    let mv = spec.measure.clone().unwrap_or_else(|| Value::from("lebesgue"));
    let label = parse::json_label(&mv);
    let m: TreeMeasure = parse::measure_json(&mv, limits.max_depth)?;
    let n = spec.n.unwrap_or(32);
    let args = CutoutArgs {
        label: &label,
        family: spec.family_or("geometric:1/8:1/2")?,
        scale: int(1),
        count: n,
        balls: None,
        depth: spec.depth.unwrap_or(6),
        r: int(1),
        n,
        p: spec.rational_or(&spec.p, rat(1, 4))?,
    };
    let mut r = commands::certify_cutout(&m, &args, limits)?;
    let l43 = lemma43_find_m(&int(1), &int(2), &rat(1, 2))?;
    r.result(
        "lemma43",
        json!({
            "epsilon": "1", "delta": "2", "gamma": "1/2",
            "M": l43.m,
            "fails_below": l43.fails_below,
            "verified": l43.verified,
        }),
    );
    let q = lemma41_solve(&int(2), &int(1), &int(1), &rat(1, 2))?;
    r.result(
        "lemma41",
        json!({ "Lambda": "2", "t": "1", "D": "1", "epsilon": "1/2", "Q": exact(&q) }),
    );
    Ok(r)
}

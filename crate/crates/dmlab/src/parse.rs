//! Text forms for rationals, sequence families and measures.
//!
//! Families: `geometric:A:Q`, `power:A:GAMMA:OFFSET`, `logfloor:B`,
//! `constant:A`, `explicit:A1,A2,...`, `scaled:C:<family>`.
//! Measures: `lebesgue`, `binomial:P`, `cantor:P:DEPTH:<family>`.
//!
//! JSON configs accept either those strings or objects such as
//! `{"kind":"geometric","a":"1/2","q":"1/2"}` and
//! `{"kind":"table","weights":[["1/2"],["1/3","2/3"]]}`.

use anyhow::{anyhow, bail, Context, Result};
use dmlab_core::geom::build_cantor;
use dmlab_core::measure::{MeasureBase, TreeMeasure, Weights};
use dmlab_core::rational::{int, parse_rational, Rational};
use dmlab_core::seq::SequenceFamily;
use serde_json::Value;

pub fn rational(s: &str) -> Result<Rational> {
    Ok(parse_rational(s)?)
}

pub fn family(s: &str) -> Result<SequenceFamily> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    let args: Vec<&str> = rest.split(':').collect();
    let want = |n: usize| -> Result<()> {
        if args.len() != n || args.iter().any(|a| a.is_empty()) {
            bail!("family {kind:?} takes {n} argument(s): {s:?}");
        }
        Ok(())
    };
    let f = match kind {
        "geometric" => {
            want(2)?;
            SequenceFamily::geometric(rational(args[0])?, rational(args[1])?)
        }
        "power" => {
            want(3)?;
            SequenceFamily::power(rational(args[0])?, rational(args[1])?, rational(args[2])?)
        }
        "logfloor" => {
            want(1)?;
            SequenceFamily::log_floor(rational(args[0])?)
        }
        "constant" => {
            want(1)?;
            SequenceFamily::constant(rational(args[0])?)
        }
        "explicit" => {
            let terms = rest
                .split(',')
                .map(rational)
                .collect::<Result<Vec<_>>>()?;
            SequenceFamily::explicit(terms)
        }
        "scaled" => {
            let (c, inner) = rest
                .split_once(':')
                .ok_or_else(|| anyhow!("scaled family needs C and an inner family: {s:?}"))?;
            SequenceFamily::scaled(rational(c)?, family(inner)?)
        }
        _ => bail!("unknown family {kind:?}"),
    };
    f.with_context(|| format!("invalid family {s:?}"))
}

/// Inverse of [`family`].
pub fn family_label(f: &SequenceFamily) -> String {
    let r = |x: &Rational| x.to_string();
    match f {
        SequenceFamily::Geometric { a, q } => format!("geometric:{}:{}", r(a), r(q)),
        SequenceFamily::Power { a, gamma, offset } => {
            format!("power:{}:{}:{}", r(a), r(gamma), r(offset))
        }
        SequenceFamily::LogFloor { base } => format!("logfloor:{}", r(base)),
        SequenceFamily::Constant { a } => format!("constant:{}", r(a)),
        SequenceFamily::ExplicitFinite(t) => {
            let parts: Vec<String> = t.iter().map(r).collect();
            format!("explicit:{}", parts.join(","))
        }
        SequenceFamily::Scaled { c, inner } => format!("scaled:{}:{}", r(c), family_label(inner)),
    }
}

pub fn measure(s: &str, max_depth: u32) -> Result<TreeMeasure> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    match kind {
        "lebesgue" if rest.is_empty() => Ok(TreeMeasure::lebesgue()),
        "binomial" => Ok(TreeMeasure::binomial(rational(rest)?)?),
        "cantor" => {
            let mut it = rest.splitn(3, ':');
            let (p, depth, beta) = match (it.next(), it.next(), it.next()) {
                (Some(p), Some(d), Some(b)) => (p, d, b),
                _ => bail!("cantor measure is cantor:P:DEPTH:<family>: {s:?}"),
            };
            let depth: u32 = depth.parse().with_context(|| format!("bad depth in {s:?}"))?;
            if depth > max_depth {
                bail!("tree depth {depth} exceeds the cap {max_depth}");
            }
            let tree = build_cantor(&family(beta)?, depth)?;
            Ok(TreeMeasure::new(
                MeasureBase::Cantor(tree),
                Weights::Binomial(rational(p)?),
                int(1),
            )?)
        }
        _ => bail!("unknown measure {s:?}"),
    }
}

/// `a,b;c,d;...` as closed intervals.
pub fn intervals(s: &str) -> Result<Vec<(Rational, Rational)>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (a, b) = p
                .split_once(',')
                .ok_or_else(|| anyhow!("interval {p:?} is not lo,hi"))?;
            Ok((rational(a)?, rational(b)?))
        })
        .collect()
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| anyhow!("missing field {key:?} in {v}"))
}

fn json_rational(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => rational(s),
        Value::Number(n) if n.is_i64() => Ok(int(n.as_i64().unwrap_or_default())),
        _ => bail!("expected a rational string like \"1/3\", got {v}"),
    }
}

fn rat_field(v: &Value, key: &str) -> Result<Rational> {
    json_rational(field(v, key)?).with_context(|| format!("field {key:?}"))
}

fn kind(v: &Value) -> Result<&str> {
    field(v, "kind")?
        .as_str()
        .ok_or_else(|| anyhow!("\"kind\" must be a string in {v}"))
}

/// A family given as a text form or as a `{"kind": ...}` object.
pub fn family_json(v: &Value) -> Result<SequenceFamily> {
    if let Value::String(s) = v {
        return family(s);
    }
    let f = match kind(v)? {
        "geometric" => SequenceFamily::geometric(rat_field(v, "a")?, rat_field(v, "q")?),
        "power" => SequenceFamily::power(
            rat_field(v, "a")?,
            rat_field(v, "gamma")?,
            rat_field(v, "offset")?,
        ),
        "logfloor" => SequenceFamily::log_floor(rat_field(v, "base")?),
        "constant" => SequenceFamily::constant(rat_field(v, "a")?),
        "explicit" => {
            let terms = field(v, "terms")?
                .as_array()
                .ok_or_else(|| anyhow!("\"terms\" must be an array"))?
                .iter()
                .map(json_rational)
                .collect::<Result<Vec<_>>>()?;
            SequenceFamily::explicit(terms)
        }
        "scaled" => SequenceFamily::scaled(rat_field(v, "c")?, family_json(field(v, "inner")?)?),
        k => bail!("unknown family kind {k:?}"),
    };
    f.with_context(|| format!("invalid family {v}"))
}

/// A measure given as a text form or as a `{"kind": ...}` object.
pub fn measure_json(v: &Value, max_depth: u32) -> Result<TreeMeasure> {
    if let Value::String(s) = v {
        return measure(s, max_depth);
    }
    match kind(v)? {
        "lebesgue" => Ok(TreeMeasure::lebesgue()),
        "binomial" => Ok(TreeMeasure::binomial(rat_field(v, "p")?)?),
        "table" => {
            let rows = field(v, "weights")?
                .as_array()
                .ok_or_else(|| anyhow!("\"weights\" must be an array of levels"))?;
            if rows.len() as u32 > max_depth {
                bail!("table depth {} exceeds the cap {max_depth}", rows.len());
            }
            let table = rows
                .iter()
                .map(|row| {
                    row.as_array()
                        .ok_or_else(|| anyhow!("each weight level must be an array"))?
                        .iter()
                        .map(json_rational)
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(TreeMeasure::new(MeasureBase::Dyadic, Weights::Table(table), int(1))?)
        }
        "cantor" => {
            let depth = field(v, "depth")?
                .as_u64()
                .ok_or_else(|| anyhow!("\"depth\" must be a non-negative integer"))?;
            if depth > max_depth as u64 {
                bail!("tree depth {depth} exceeds the cap {max_depth}");
            }
            let tree = build_cantor(&family_json(field(v, "beta")?)?, depth as u32)?;
            Ok(TreeMeasure::new(
                MeasureBase::Cantor(tree),
                Weights::Binomial(rat_field(v, "p")?),
                int(1),
            )?)
        }
        k => bail!("unknown measure kind {k:?}"),
    }
}

/// Short label for a family or measure value as it appears in reports.
pub fn json_label(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_round_trip() {
        for s in [
            "geometric:1/2:1/2",
            "power:1:2:1",
            "logfloor:1/3",
            "constant:1/2",
            "explicit:1/2,1/4",
            "scaled:3/2:geometric:1/2:1/2",
        ] {
            assert_eq!(family_label(&family(s).unwrap()), s);
        }
        assert!(family("geometric:1/2").is_err());
        assert!(family("wavelet:1").is_err());
    }

    #[test]
    fn measures() {
        assert_eq!(measure("lebesgue", 20).unwrap(), TreeMeasure::lebesgue());
        assert!(measure("binomial:1/3", 20).is_ok());
        assert!(measure("cantor:1/2:4:constant:1/3", 20).is_ok());
        assert!(measure("cantor:1/2:40:constant:1/3", 20).is_err());
    }

    #[test]
    fn json_forms() {
        let g = serde_json::json!({"kind": "geometric", "a": "1/2", "q": "1/2"});
        assert_eq!(family_json(&g).unwrap(), family("geometric:1/2:1/2").unwrap());
        let sc = serde_json::json!({"kind": "scaled", "c": "2", "inner": "constant:1/4"});
        assert_eq!(family_label(&family_json(&sc).unwrap()), "scaled:2:constant:1/4");
        let b = serde_json::json!({"kind": "binomial", "p": "1/3"});
        assert_eq!(measure_json(&b, 20).unwrap(), measure("binomial:1/3", 20).unwrap());
        let t = serde_json::json!({"kind": "table", "weights": [["1/2"], ["1/3", "2/3"]]});
        assert!(measure_json(&t, 20).is_ok());
        assert!(measure_json(&t, 1).is_err());
        assert!(family_json(&serde_json::json!({"kind": "geometric", "a": 0.5})).is_err());
    }
}

//! Deterministic JSON reports. Every measured number is tagged `exact`,
//! `bracket` or `window-validated`.

use std::time::Duration;

use dmlab_core::measure::MassBracket;
use dmlab_core::rational::{format_rational, to_decimal, Rational};
use dmlab_core::real::Bracket;
use serde_json::{json, Map, Value};

use crate::plotdata::Series;

pub const SCHEMA: &str = "dmlab-report/1";
const DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Passed,
    Inconclusive,
    Failed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Passed => "passed",
            Status::Inconclusive => "inconclusive",
            Status::Failed => "failed",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Passed => 0,
            Status::Inconclusive => 2,
            Status::Failed => 1,
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Passed
        } else {
            Status::Failed
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub results: Map<String, Value>,
    pub statement: String,
    pub status: Status,
    pub series: Vec<Series>,
    pub elapsed: Option<Duration>,
}

impl Report {
    pub fn new(command: impl Into<String>, statement: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            inputs: Map::new(),
            results: Map::new(),
            statement: statement.into(),
            status: Status::Passed,
            series: Vec::new(),
            elapsed: None,
        }
    }

    pub fn input(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.to_owned(), v.into());
        self
    }

    pub fn result(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.results.insert(key.to_owned(), v.into());
        self
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "schema": SCHEMA,
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "check": {
                "statement": self.statement,
                "status": self.status.as_str(),
            },
        });
        if let Some(d) = self.elapsed {
            v["timing"] = json!({ "wall_ms": d.as_millis() as u64 });
        }
        v
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("reports serialize");
        s.push('\n');
        s
    }
}

pub fn text(r: &Rational) -> String {
    format_rational(r)
}

pub fn decimal(r: &Rational) -> String {
    to_decimal(r, DIGITS)
}

pub fn exact(r: &Rational) -> Value {
    json!({ "tag": "exact", "value": text(r), "decimal": decimal(r) })
}

pub fn bracket(lo: &Rational, hi: &Rational) -> Value {
    if lo == hi {
        return exact(lo);
    }
    json!({
        "tag": "bracket",
        "lo": text(lo),
        "hi": text(hi),
        "lo_decimal": decimal(lo),
        "hi_decimal": decimal(hi),
    })
}

pub fn enclosure(b: &Bracket) -> Value {
    bracket(&b.lo, &b.hi)
}

pub fn mass(b: &MassBracket) -> Value {
    bracket(&b.lower, &b.upper)
}

/// A value certified only over a finite scan window.
pub fn window(r: &Rational, window: (&Rational, &Rational)) -> Value {
    json!({
        "tag": "window-validated",
        "value": text(r),
        "decimal": decimal(r),
        "window": [text(window.0), text(window.1)],
    })
}

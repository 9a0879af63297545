//! Long-format plot data: `series,x,y_num,y_den,y_decimal`.

use dmlab_core::rational::Rational;

use crate::report::{decimal, Report};

pub const HEADER: &str = "series,x,y_num,y_den,y_decimal";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    pub name: String,
    /// `(x label, y)`; x is an index or an exact rational.
    pub points: Vec<(String, Rational)>,
}

impl Series {
    pub fn new(name: impl Into<String>) -> Self {
        Series {
            name: name.into(),
            points: Vec::new(),
        }
    }

    pub fn push(&mut self, x: impl ToString, y: Rational) {
        self.points.push((x.to_string(), y));
    }
}

pub fn emit_plotdata(report: &Report) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for s in &report.series {
        for (x, y) in &s.points {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s.name,
                x,
                y.numer(),
                y.denom(),
                decimal(y)
            ));
        }
    }
    out
}

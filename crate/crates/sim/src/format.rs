//! Tabular output shared by the CLI: CSV or JSON, numbers at 12
//! significant digits.

use std::io::Write;

use rbf_core::markov::{SteadyState, TransitionTable};
use serde_json::{Map, Value};

use crate::error::Result;
use crate::experiment::SimulationReport;
use crate::stats::RateSummary;

/// `x` with 12 significant digits, like C's `%.12g`.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (11 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_g(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            // Round-trip through the 12-digit text so CSV and JSON agree.
            Cell::Float(x) => fmt_g(*x)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Rows under a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::csv))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(h, c)| (h.to_string(), c.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    /// A one-row table is written as a JSON object, anything else as an
    /// array of objects.
    pub fn write<W: Write>(&self, format: Format, mut w: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => {
                let mut value = self.to_json();
                if self.rows.len() == 1 {
                    value = value.as_array_mut().expect("array").remove(0);
                }
                serde_json::to_writer_pretty(&mut w, &value)?;
                writeln!(w)?;
                Ok(())
            }
        }
    }
}

/// `i,j,tau` for every nonzero transition.
pub fn transition_table(table: &TransitionTable) -> Table {
    let mut t = Table::new(vec!["i", "j", "tau"]);
    for (i, j, p) in table.entries() {
        t.push(vec![i.into(), j.into(), p.into()]);
    }
    t
}

/// `i,pi`.
pub fn steady_table(steady: &SteadyState) -> Table {
    let mut t = Table::new(vec!["i", "pi"]);
    for (i, &p) in steady.pi.iter().enumerate() {
        t.push(vec![i.into(), p.into()]);
    }
    t
}

pub const REPORT_HEADER: [&str; 13] = [
    "row",
    "seed",
    "arrivals",
    "new_messages",
    "fp_first_arrivals",
    "fp_each_arrivals",
    "count_instance",
    "count_first",
    "count_each",
    "cycles",
    "mean_new_per_cycle",
    "mean_bit_setting_per_cycle",
    "max_bits_set",
];

/// One row per epoch (`row` = epoch index), then `mean`, `std`, `ci_low`
/// and `ci_high` rows over the three rates, then one `predict:<name>` row
/// per analytic value with the value in the `count_instance` column.
type SummaryColumn = (&'static str, fn(&RateSummary) -> f64);

pub fn report_table(report: &SimulationReport) -> Table {
    let mut t = Table::new(REPORT_HEADER.to_vec());
    for (i, e) in report.epochs.iter().enumerate() {
        t.push(vec![
            i.into(),
            e.seed.into(),
            e.arrivals.into(),
            e.new_messages.into(),
            e.fp_count_instance.into(),
            e.fp_count_each.into(),
            e.rate_count_instance.into(),
            e.rate_count_first.into(),
            e.rate_count_each.into(),
            e.cycles.into(),
            e.mean_new_per_cycle.into(),
            e.mean_bit_setting_per_cycle.into(),
            e.max_bits_set.into(),
        ]);
    }
    let pick: [SummaryColumn; 4] = [
        ("mean", |s| s.mean),
        ("std", |s| s.std),
        ("ci_low", |s| s.ci_low),
        ("ci_high", |s| s.ci_high),
    ];
    for (name, f) in pick {
        let mut row = vec![Cell::from(name)];
        row.extend(std::iter::repeat_n(Cell::Empty, 5));
        row.push(f(&report.count_instance).into());
        row.push(f(&report.count_first).into());
        row.push(f(&report.count_each).into());
        row.extend(std::iter::repeat_n(Cell::Empty, 4));
        t.push(row);
    }
    for p in &report.predictions {
        let mut row = vec![Cell::from(format!("predict:{}", p.name))];
        row.extend(std::iter::repeat_n(Cell::Empty, 5));
        row.push(p.value.into());
        row.extend(std::iter::repeat_n(Cell::Empty, 6));
        t.push(row);
    }
    t
}

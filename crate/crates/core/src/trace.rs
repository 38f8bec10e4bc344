//! Uniformly sampled multi-channel signals.
//!
//! Traces are stored row-major: one row per time step, one column per
//! channel. On disk a trace is a CSV file whose first column is `time`.

use std::fs::File;
use std::io::{Read, Write};
use std::ops::RangeInclusive;
use std::path::Path;

use thiserror::Error;

use crate::formula::PredicateExpr;

/// Relative tolerance, in units of `dt`, used when mapping real times onto
/// sample indices.
pub const GRID_GUARD: f64 = 1e-6;

/// Maximum deviation, in seconds, between consecutive time stamps and `dt`.
pub const UNIFORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed header: {0}")]
    Header(String),
    #[error("row {row}: expected {expected} cells, found {found}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("row {row}, column {column}: `{cell}` is not a number")]
    NonNumeric { row: usize, column: usize, cell: String },
    #[error("row {row}: time column is not increasing")]
    NonIncreasingTime { row: usize },
    #[error("row {row}: time step deviates from uniform spacing {dt}")]
    NonUniformTime { row: usize, dt: f64 },
    #[error("trace has no samples")]
    Empty,
    #[error("invalid time step {0}")]
    InvalidStep(f64),
    #[error("duplicate channel `{0}`")]
    DuplicateChannel(String),
    #[error("row {row} has {found} values for {expected} channels")]
    RowWidth { row: usize, expected: usize, found: usize },
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),
    #[error("norm of an empty vector")]
    EmptyNorm,
    #[error("window [{from}, {to}] contains no samples")]
    EmptyWindow { from: f64, to: f64 },
    #[error("time {0} is not on the sampling grid")]
    OffGrid(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    t0: f64,
    dt: f64,
    channels: Vec<String>,
    data: Vec<f64>,
}

impl Trace {
    /// Builds a trace from row vectors. Every row must carry one value per
    /// channel.
    pub fn new(
        t0: f64,
        dt: f64,
        channels: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self, TraceError> {
        let width = channels.len();
        let mut data = Vec::with_capacity(rows.len() * width);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != width {
                return Err(TraceError::RowWidth { row: i, expected: width, found: row.len() });
            }
            data.extend(row);
        }
        Self::from_flat(t0, dt, channels, data)
    }

    /// Builds a trace from row-major data.
    pub fn from_flat(
        t0: f64,
        dt: f64,
        channels: Vec<String>,
        data: Vec<f64>,
    ) -> Result<Self, TraceError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(TraceError::InvalidStep(dt));
        }
        for (i, name) in channels.iter().enumerate() {
            if channels[..i].contains(name) {
                return Err(TraceError::DuplicateChannel(name.clone()));
            }
        }
        if channels.is_empty() {
            return Err(TraceError::Header("trace needs at least one channel".into()));
        }
        if data.is_empty() {
            return Err(TraceError::Empty);
        }
        let width = channels.len();
        if data.len() % width != 0 {
            return Err(TraceError::RowWidth {
                row: data.len() / width,
                expected: width,
                found: data.len() % width,
            });
        }
        Ok(Trace { t0, dt, channels, data })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.data.len() / self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn channels(&self) -> &[String] {
        &self.channels
    }

    pub fn channel_index(&self, name: &str) -> Option<usize> {
        self.channels.iter().position(|c| c == name)
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// Time stamp of the last sample.
    pub fn end_time(&self) -> f64 {
        self.time(self.len() - 1)
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let w = self.channels.len();
        &self.data[k * w..(k + 1) * w]
    }

    pub fn value(&self, k: usize, channel: usize) -> f64 {
        self.data[k * self.channels.len() + channel]
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>, TraceError> {
        let c = self
            .channel_index(name)
            .ok_or_else(|| TraceError::UnknownChannel(name.to_string()))?;
        Ok((0..self.len()).map(|k| self.value(k, c)).collect())
    }

    /// Index of the sample at time `t`, which must lie on the grid.
    pub fn index_of(&self, t: f64) -> Result<usize, TraceError> {
        let pos = (t - self.t0) / self.dt;
        let k = pos.round();
        if !pos.is_finite() || (pos - k).abs() > GRID_GUARD || k < 0.0 || k as usize >= self.len() {
            return Err(TraceError::OffGrid(t));
        }
        Ok(k as usize)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TraceError> {
        Self::read_csv(File::open(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), TraceError> {
        let mut file = File::create(path)?;
        self.write_csv(&mut file)
    }

    pub fn read_csv(reader: impl Read) -> Result<Self, TraceError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.len() < 2 || &header[0] != "time" {
            return Err(TraceError::Header(
                "expected `time` followed by at least one channel".into(),
            ));
        }
        let channels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        if channels.iter().any(String::is_empty) {
            return Err(TraceError::Header("empty channel name".into()));
        }
        let mut times = Vec::new();
        let mut data = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let row = i + 1;
            if record.len() != header.len() {
                return Err(TraceError::Ragged { row, expected: header.len(), found: record.len() });
            }
            for (column, cell) in record.iter().enumerate() {
                let v: f64 = cell.parse().map_err(|_| TraceError::NonNumeric {
                    row,
                    column,
                    cell: cell.to_string(),
                })?;
                if column == 0 {
                    times.push(v);
                } else {
                    data.push(v);
                }
            }
        }
        if times.is_empty() {
            return Err(TraceError::Empty);
        }
        for (i, w) in times.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(TraceError::NonIncreasingTime { row: i + 2 });
            }
        }
        // A single sample carries no spacing information; unit spacing is assumed.
        let dt = if times.len() > 1 {
            (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64
        } else {
            1.0
        };
        for (i, w) in times.windows(2).enumerate() {
            if ((w[1] - w[0]) - dt).abs() > UNIFORM_TOLERANCE {
                return Err(TraceError::NonUniformTime { row: i + 2, dt });
            }
        }
        Self::from_flat(times[0], dt, channels, data)
    }

    /// Writes the trace as CSV with nine significant digits per value.
    pub fn write_csv(&self, mut out: impl Write) -> Result<(), TraceError> {
        let mut line = String::from("time");
        for c in &self.channels {
            line.push(',');
            line.push_str(c);
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
        for k in 0..self.len() {
            line.clear();
            line.push_str(&format_significant(self.time(k), 9));
            for v in self.row(k) {
                line.push(',');
                line.push_str(&format_significant(*v, 9));
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }
}

/// Formats `v` with `digits` significant digits, trimming trailing zeros,
/// in the style of C's `%g`.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "NaN".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Inclusive range of sample indices whose time stamps fall in
/// `[t + a, t + b]`, widened by `dt * GRID_GUARD` on both sides and clipped
/// to the trace.
pub fn window_indices(
    trace: &Trace,
    t: f64,
    a: f64,
    b: f64,
) -> Result<RangeInclusive<usize>, TraceError> {
    let lo = ((t + a - trace.t0) / trace.dt - GRID_GUARD).ceil().max(0.0);
    let hi = ((t + b - trace.t0) / trace.dt + GRID_GUARD).floor();
    let last = (trace.len() - 1) as f64;
    let hi = hi.min(last);
    if !(lo <= hi) {
        return Err(TraceError::EmptyWindow { from: t + a, to: t + b });
    }
    Ok(lo as usize..=hi as usize)
}

/// Predicate expression with channel names resolved against a trace layout.
#[derive(Debug, Clone)]
pub enum BoundExpr {
    Const(f64),
    Channel(usize),
    Add(Box<BoundExpr>, Box<BoundExpr>),
    Sub(Box<BoundExpr>, Box<BoundExpr>),
    Scale(f64, Box<BoundExpr>),
    Norm(Vec<BoundExpr>),
}

impl BoundExpr {
    pub fn bind(expr: &PredicateExpr, channels: &[String]) -> Result<Self, TraceError> {
        Ok(match expr {
            PredicateExpr::Const(c) => BoundExpr::Const(*c),
            PredicateExpr::Channel(name) => BoundExpr::Channel(
                channels
                    .iter()
                    .position(|c| c == name)
                    .ok_or_else(|| TraceError::UnknownChannel(name.clone()))?,
            ),
            PredicateExpr::Add(l, r) => {
                BoundExpr::Add(Box::new(Self::bind(l, channels)?), Box::new(Self::bind(r, channels)?))
            }
            PredicateExpr::Sub(l, r) => {
                BoundExpr::Sub(Box::new(Self::bind(l, channels)?), Box::new(Self::bind(r, channels)?))
            }
            PredicateExpr::Scale(c, e) => BoundExpr::Scale(*c, Box::new(Self::bind(e, channels)?)),
            PredicateExpr::Norm(items) => {
                if items.is_empty() {
                    return Err(TraceError::EmptyNorm);
                }
                BoundExpr::Norm(
                    items.iter().map(|e| Self::bind(e, channels)).collect::<Result<_, _>>()?,
                )
            }
        })
    }

    pub fn eval(&self, row: &[f64]) -> f64 {
        match self {
            BoundExpr::Const(c) => *c,
            BoundExpr::Channel(i) => row[*i],
            BoundExpr::Add(l, r) => l.eval(row) + r.eval(row),
            BoundExpr::Sub(l, r) => l.eval(row) - r.eval(row),
            BoundExpr::Scale(c, e) => c * e.eval(row),
            BoundExpr::Norm(items) => items.iter().map(|e| e.eval(row).powi(2)).sum::<f64>().sqrt(),
        }
    }
}

/// Pointwise value of the predicate expression at every sample.
pub fn predicate_signal(trace: &Trace, p: &PredicateExpr) -> Result<Vec<f64>, TraceError> {
    let bound = BoundExpr::bind(p, trace.channels())?;
    Ok((0..trace.len()).map(|k| bound.eval(trace.row(k))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, Formula};

    fn constant_trace(n: usize, dt: f64, values: &[(&str, f64)]) -> Trace {
        let channels = values.iter().map(|(c, _)| c.to_string()).collect();
        let rows = (0..n).map(|_| values.iter().map(|(_, v)| *v).collect()).collect();
        Trace::new(0.0, dt, channels, rows).unwrap()
    }

    fn predicate(text: &str) -> PredicateExpr {
        match parse_formula(text).unwrap() {
            Formula::Predicate(p) => p,
            other => panic!("not a predicate: {other}"),
        }
    }

    #[test]
    fn loads_two_row_file() {
        let t = Trace::read_csv("time,x1,x2\n0,2,2\n0.02,2,2.01\n".as_bytes()).unwrap();
        assert_eq!(t.t0(), 0.0);
        assert!((t.dt() - 0.02).abs() < 1e-15);
        assert_eq!(t.len(), 2);
        assert_eq!(t.row(1), &[2.0, 2.01]);
    }

    #[test]
    fn loads_single_row_file() {
        let t = Trace::read_csv("time,x\n0.5,3\n".as_bytes()).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.t0(), 0.5);
    }

    #[test]
    fn rejects_bad_files() {
        let cases = [
            "t,x\n0,1\n",
            "time,x\n0,1\n0.1,1,2\n",
            "time,x\n0,abc\n",
            "time,x\n0,1\n0,1\n",
            "time,x\n0,1\n0.02,1\n0.04000001,1\n",
            "time,x\n",
        ];
        for text in cases {
            assert!(Trace::read_csv(text.as_bytes()).is_err(), "accepted {text:?}");
        }
        assert!(matches!(
            Trace::read_csv("time,x\n0,1\n0.02,1\n0.04000001,1\n".as_bytes()),
            Err(TraceError::NonUniformTime { .. })
        ));
    }

    #[test]
    fn save_load_round_trip() {
        let t = Trace::new(
            0.0,
            0.02,
            vec!["x1".into(), "x2".into()],
            (0..50).map(|k| vec![(k as f64 * 0.37).sin(), 1.0 / (k as f64 + 3.0)]).collect(),
        )
        .unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = Trace::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.channels(), t.channels());
        assert_eq!(back.len(), t.len());
        for k in 0..t.len() {
            for (a, b) in back.row(k).iter().zip(t.row(k)) {
                assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-300), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(0.02, 9), "0.02");
        assert_eq!(format_significant(9.98, 9), "9.98");
        assert_eq!(format_significant(-0.5070678118654752, 9), "-0.507067812");
        assert_eq!(format_significant(1.0e-7, 9), "1e-7");
        assert_eq!(format_significant(123456789012.0, 9), "1.23456789e11");
        assert_eq!(format_significant(10.0, 9), "10");
    }

    #[test]
    fn ball_predicate_at_start_state() {
        let t = constant_trace(3, 0.02, &[("x1", 2.0), ("x2", 2.0)]);
        let s = predicate_signal(&t, &predicate("0.2 - norm(x1 - 1.5, x2 - 2.5)")).unwrap();
        for v in s {
            assert!((v - (0.2 - 0.5f64.sqrt())).abs() < 1e-15);
            assert!((v + 0.5071).abs() < 1e-4);
        }
    }

    #[test]
    fn constant_and_channel_predicates() {
        let t = constant_trace(4, 0.1, &[("x1", 3.0)]);
        assert_eq!(predicate_signal(&t, &PredicateExpr::Const(1.0)).unwrap(), vec![1.0; 4]);
        assert_eq!(predicate_signal(&t, &PredicateExpr::channel("x1")).unwrap(), vec![3.0; 4]);
        assert!(matches!(
            predicate_signal(&t, &PredicateExpr::channel("y")),
            Err(TraceError::UnknownChannel(_))
        ));
        assert!(matches!(
            predicate_signal(&t, &PredicateExpr::Norm(vec![])),
            Err(TraceError::EmptyNorm)
        ));
    }

    #[test]
    fn window_examples() {
        let t = constant_trace(501, 0.02, &[("x", 0.0)]);
        assert_eq!(window_indices(&t, 0.0, 0.0, 4.0).unwrap(), 0..=200);
        assert_eq!(window_indices(&t, 6.0, 0.0, 4.0).unwrap(), 300..=500);
        assert!(matches!(
            window_indices(&t, 9.99, 0.5, 1.0),
            Err(TraceError::EmptyWindow { .. })
        ));
        // between two samples
        assert!(window_indices(&t, 0.0, 0.005, 0.015).is_err());
    }

    #[test]
    fn index_of_grid_times() {
        let t = constant_trace(501, 0.02, &[("x", 0.0)]);
        assert_eq!(t.index_of(6.0).unwrap(), 300);
        assert!(t.index_of(0.01).is_err());
        assert!(t.index_of(10.02).is_err());
    }
}

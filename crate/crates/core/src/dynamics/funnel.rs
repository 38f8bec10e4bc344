use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use super::DynamicsError;

/// Piecewise-linear lower bound `γ(t)` on a predicate's robustness.
#[derive(Debug, Clone, PartialEq)]
pub struct Funnel {
    knots: Vec<(f64, f64)>,
}

impl Funnel {
    /// Knots must be finite with strictly increasing times.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self, DynamicsError> {
        if knots.is_empty() {
            return Err(DynamicsError::Funnel("no knots".into()));
        }
        if knots.iter().any(|(t, g)| !t.is_finite() || !g.is_finite()) {
            return Err(DynamicsError::Funnel("non-finite knot".into()));
        }
        if let Some(w) = knots.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(DynamicsError::Funnel(format!(
                "knot times must increase strictly, found {} after {}",
                w[1].0, w[0].0
            )));
        }
        Ok(Funnel { knots })
    }

    pub fn constant(gamma: f64, start: f64, end: f64) -> Result<Self, DynamicsError> {
        Self::new(vec![(start, gamma), (end, gamma)])
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn start(&self) -> f64 {
        self.knots[0].0
    }

    pub fn end(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    /// Linear interpolation between the surrounding knots.
    pub fn eval(&self, t: f64) -> Result<f64, DynamicsError> {
        let (start, end) = (self.start(), self.end());
        if !(t >= start && t <= end) {
            return Err(DynamicsError::OutsideFunnel { t, start, end });
        }
        let j = self.knots.partition_point(|(tk, _)| *tk <= t);
        if j == self.knots.len() {
            return Ok(self.knots[j - 1].1);
        }
        let (t0, g0) = self.knots[j - 1];
        let (t1, g1) = self.knots[j];
        Ok(g0 + (g1 - g0) * (t - t0) / (t1 - t0))
    }

    /// `γ'(t) = 2γ(t_0) - γ(t)`, the funnel for the opposite goal.
    pub fn mirror(&self) -> Funnel {
        let g0 = self.knots[0].1;
        Funnel { knots: self.knots.iter().map(|&(t, g)| (t, 2.0 * g0 - g)).collect() }
    }

    /// Reads `t,gamma` CSV with a header row.
    pub fn read_csv(reader: impl Read) -> Result<Self, DynamicsError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.len() != 2 || &header[0] != "t" || &header[1] != "gamma" {
            return Err(DynamicsError::Funnel("expected header `t,gamma`".into()));
        }
        let mut knots = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let parse = |cell: &str| {
                cell.parse::<f64>()
                    .map_err(|_| DynamicsError::Funnel(format!("row {}: `{cell}` is not a number", i + 1)))
            };
            knots.push((parse(&record[0])?, parse(&record[1])?));
        }
        Self::new(knots)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DynamicsError> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

/// The three built-in guide profiles for the first goal of the case study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Guidance {
    None,
    Weak,
    Strong,
}

impl Guidance {
    pub const ALL: [Guidance; 3] = [Guidance::None, Guidance::Weak, Guidance::Strong];

    pub fn label(&self) -> &'static str {
        match self {
            Guidance::None => "none",
            Guidance::Weak => "weak",
            Guidance::Strong => "strong",
        }
    }

    fn knot_file(&self) -> &'static str {
        match self {
            Guidance::None => include_str!("../../data/funnels/none.csv"),
            Guidance::Weak => include_str!("../../data/funnels/weak.csv"),
            Guidance::Strong => include_str!("../../data/funnels/strong.csv"),
        }
    }

    pub fn funnel(&self) -> Funnel {
        Funnel::read_csv(self.knot_file().as_bytes()).expect("bundled funnel data is valid")
    }
}

impl fmt::Display for Guidance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Guidance {
    type Err = DynamicsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(Guidance::None),
            "weak" => Ok(Guidance::Weak),
            "strong" => Ok(Guidance::Strong),
            other => Err(DynamicsError::Scenario(format!("unknown guidance `{other}`"))),
        }
    }
}

//! Long-format result tables: `sweep_var,value,metric,estimate,stderr,source`.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::analytics::DelayResult;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "sweep_var,value,metric,estimate,stderr,source";

/// A metric value; diverging delays carry no number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimate {
    Value(f64),
    Unstable,
}

impl Estimate {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Self::Value(v) => Some(v),
            Self::Unstable => None,
        }
    }
}

impl From<DelayResult> for Estimate {
    fn from(d: DelayResult) -> Self {
        match d {
            DelayResult::Finite(v) => Self::Value(v),
            DelayResult::Unstable => Self::Unstable,
        }
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Value(v) => write!(f, "{v:.16e}"),
            Self::Unstable => f.write_str("unstable"),
        }
    }
}

impl FromStr for Estimate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "unstable" => Ok(Self::Unstable),
            t => t
                .parse()
                .map(Self::Value)
                .map_err(|_| Error::Parse(format!("bad estimate `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Analytic,
    Simulated,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Analytic => "analytic",
            Self::Simulated => "simulated",
        })
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "analytic" => Ok(Self::Analytic),
            "simulated" => Ok(Self::Simulated),
            t => Err(Error::Parse(format!("bad source `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_var: String,
    pub value: f64,
    /// Metric name, with the series label in brackets when present, e.g.
    /// `p_us[alpha=4;model=pcp]`.
    pub metric: String,
    pub estimate: Estimate,
    pub stderr: f64,
    pub source: Source,
}

impl SweepRow {
    /// Metric name without the series label.
    pub fn base_metric(&self) -> &str {
        self.metric.split('[').next().unwrap_or(&self.metric)
    }
}

/// Metric name with an optional series label.
pub fn metric_name(base: &str, label: &str) -> String {
    if label.is_empty() {
        base.to_string()
    } else {
        format!("{base}[{label}]")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.16e},{},{},{:.16e},{}\n",
                r.sweep_var, r.value, r.metric, r.estimate, r.stderr, r.source
            ));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == CSV_HEADER => {}
            _ => return Err(Error::Parse(format!("missing header `{CSV_HEADER}`"))),
        }
        let rows = lines
            .map(|(i, line)| {
                let f: Vec<&str> = line.split(',').collect();
                let [var, value, metric, est, se, src] = f.as_slice() else {
                    return Err(Error::Parse(format!("line {}: expected 6 fields", i + 1)));
                };
                let ctx = |e: Error| Error::Parse(format!("line {}: {e}", i + 1));
                Ok(SweepRow {
                    sweep_var: var.to_string(),
                    value: value
                        .parse()
                        .map_err(|_| ctx(Error::Parse(format!("bad value `{value}`"))))?,
                    metric: metric.to_string(),
                    estimate: est.parse().map_err(ctx)?,
                    stderr: se
                        .parse()
                        .map_err(|_| ctx(Error::Parse(format!("bad stderr `{se}`"))))?,
                    source: src.parse().map_err(ctx)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { rows })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::File::create(path)?.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

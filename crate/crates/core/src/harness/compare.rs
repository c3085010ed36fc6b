//! Analytic-vs-simulated comparison reports.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harness::table::{Estimate, SweepRow, SweepTable};

/// Relative tolerance for one metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub relative: f64,
    /// Reported but never failing.
    pub informational: bool,
}

/// Per-metric tolerances.
///
/// Text form: comma-separated `metric=tol` entries, `*` for the default and
/// an optional `:info` suffix, e.g. `*=0.02,busy_prob=0.1:info`. A bare
/// number sets the default.
#[derive(Debug, Clone, PartialEq)]
pub struct TolerancePolicy {
    pub default: Tolerance,
    pub per_metric: Vec<(String, Tolerance)>,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            default: Tolerance {
                relative: 0.02,
                informational: false,
            },
            per_metric: Vec::new(),
        }
    }
}

impl TolerancePolicy {
    /// Full metric name first, then its base name, then the default.
    pub fn for_metric(&self, metric: &str) -> Tolerance {
        let base = metric.split('[').next().unwrap_or(metric);
        self.per_metric
            .iter()
            .find(|(m, _)| m == metric)
            .or_else(|| self.per_metric.iter().find(|(m, _)| m == base))
            .map_or(self.default, |(_, t)| *t)
    }
}

impl FromStr for TolerancePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut policy = Self::default();
        for entry in s.split(',').map(str::trim).filter(|e| !e.is_empty()) {
            let (metric, spec) = entry.rsplit_once('=').unwrap_or(("*", entry));
            let (num, informational) = match spec.strip_suffix(":info") {
                Some(n) => (n, true),
                None => (spec, false),
            };
            let relative: f64 = num
                .trim()
                .parse()
                .ok()
                .filter(|v: &f64| *v >= 0.0)
                .ok_or_else(|| Error::Parse(format!("tolerance `{entry}`")))?;
            let tol = Tolerance {
                relative,
                informational,
            };
            match metric.trim() {
                "*" => policy.default = tol,
                m => policy.per_metric.push((m.to_string(), tol)),
            }
        }
        Ok(policy)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub sweep_var: String,
    pub value: f64,
    pub metric: String,
    pub analytic: Estimate,
    pub simulated: Estimate,
    pub stderr: f64,
    /// `|sim − ana| / |ana|`, absolute when the analytic value is 0,
    /// infinite when exactly one side diverges.
    pub gap: f64,
    pub tolerance: Tolerance,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
}

pub const REPORT_HEADER: &str =
    "sweep_var,value,metric,analytic,simulated,stderr,gap,tolerance,informational,pass";

fn gap(a: Estimate, s: Estimate) -> f64 {
    match (a, s) {
        (Estimate::Unstable, Estimate::Unstable) => 0.0,
        (Estimate::Value(a), Estimate::Value(s)) => {
            if a == 0.0 {
                (s - a).abs()
            } else {
                ((s - a) / a).abs()
            }
        }
        _ => f64::INFINITY,
    }
}

/// Matches rows by (sweep variable, grid value, metric). Both tables must
/// cover exactly the same keys.
pub fn compare(
    analytic: &SweepTable,
    simulated: &SweepTable,
    policy: &TolerancePolicy,
) -> Result<ComparisonReport> {
    type Key = (String, u64, String);
    let key = |r: &SweepRow| -> Key { (r.sweep_var.clone(), r.value.to_bits(), r.metric.clone()) };
    let sim: HashMap<Key, &SweepRow> = simulated.rows.iter().map(|r| (key(r), r)).collect();
    let ana_keys: HashMap<Key, ()> = analytic.rows.iter().map(|r| (key(r), ())).collect();

    let mut problems = String::new();
    for r in &analytic.rows {
        if !sim.contains_key(&key(r)) {
            let _ = writeln!(problems, "  only analytic: {}={} {}", r.sweep_var, r.value, r.metric);
        }
    }
    for r in &simulated.rows {
        if !ana_keys.contains_key(&key(r)) {
            let _ = writeln!(problems, "  only simulated: {}={} {}", r.sweep_var, r.value, r.metric);
        }
    }
    if !problems.is_empty() {
        return Err(Error::GridMismatch(problems));
    }

    let rows = analytic
        .rows
        .iter()
        .map(|a| {
            let s = sim[&key(a)];
            let g = gap(a.estimate, s.estimate);
            let tolerance = policy.for_metric(&a.metric);
            ComparisonRow {
                sweep_var: a.sweep_var.clone(),
                value: a.value,
                metric: a.metric.clone(),
                analytic: a.estimate,
                simulated: s.estimate,
                stderr: s.stderr,
                gap: g,
                tolerance,
                pass: g <= tolerance.relative,
            }
        })
        .collect();
    Ok(ComparisonReport { rows })
}

impl ComparisonReport {
    /// No non-informational row fails.
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass || r.tolerance.informational)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.16e},{},{},{},{:.16e},{:.16e},{:.16e},{},{}",
                r.sweep_var,
                r.value,
                r.metric,
                r.analytic,
                r.simulated,
                r.stderr,
                r.gap,
                r.tolerance.relative,
                r.tolerance.informational,
                r.pass
            );
        }
        out
    }

    pub fn summary(&self) -> String {
        let failed: Vec<&ComparisonRow> = self.rows.iter().filter(|r| !r.pass).collect();
        let hard = failed.iter().filter(|r| !r.tolerance.informational).count();
        let worst = self
            .rows
            .iter()
            .max_by(|a, b| a.gap.total_cmp(&b.gap));
        let mut out = format!(
            "{} rows compared, {} outside tolerance ({} informational)\n",
            self.rows.len(),
            failed.len(),
            failed.len() - hard
        );
        if let Some(w) = worst {
            let _ = writeln!(
                out,
                "largest gap {:.4e} at {}={} {}",
                w.gap, w.sweep_var, w.value, w.metric
            );
        }
        for r in failed {
            let _ = writeln!(
                out,
                "  {} {}={} {}: analytic {} simulated {} gap {:.4e} > {}",
                if r.tolerance.informational { "INFO" } else { "FAIL" },
                r.sweep_var,
                r.value,
                r.metric,
                r.analytic,
                r.simulated,
                r.gap,
                r.tolerance.relative
            );
        }
        out.push_str(if self.passed() { "PASS\n" } else { "FAIL\n" });
        out
    }
}

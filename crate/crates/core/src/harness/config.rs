//! Experiment configuration files.
//!
//! The format is flat `key = value` lines grouped under section headers.
//! `#` starts a comment. Every key may appear once.
//!
//! ```text
//! [scenario]
//! name = fig11
//! kind = delay            # pmf | variance | rate | delay | unstable | link | sir | network
//!
//! [network]
//! lambda_b = 1e-5         # per m²
//! lambda_u = 2e-4
//! theta_db = 10           # or `theta` (linear)
//! alpha = 4
//! beta = 100
//! pcp_r_c = 1             # PCP users: radius plus exactly one of
//! pcp_lambda_p = 0.289    #   pcp_lambda_p (parents per m²)
//!                         #   pcp_lambda_c (daughters per m² of a disc)
//!
//! [traffic]
//! rate = exp-mean:0.01    # det:<r> | unif:0:<b> | exp-mean:<m>
//! model = ppp             # ppp | pcp
//! xi0 = 0.005             # typical user's rate
//! n = 20                  # users in the typical cell
//! s = 10                  # cell area, m²
//! q = 0.5                 # BS activity probability
//! k = 0                   # user count
//!
//! [sweep]
//! var = xi0
//! values = 0.001, 0.002   # or: range = <start>:<stop>:<count>
//!
//! [series]
//! alpha = 2.5, 3, 4       # cartesian product over all series keys
//!
//! [simulation]
//! seed = 1                # required
//! horizon = 1000000
//! warmup = 200000
//! replications = 1
//! samples = 1000000
//! queues = 1
//! field = independent     # independent | others
//!
//! [output]
//! dir = out
//! ```
//!
//! Sweep and series keys can name any numeric key from `[network]` or
//! `[traffic]`; series can also list `model` and `rate` values. With PCP
//! users the anchored cluster parameter stays fixed and the other one
//! follows `lambda_u`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::analytics::{db_to_linear, NetworkParameters, PopulationModel};
use crate::error::{Error, Result};
use crate::geometry::PcpParams;
use crate::simulator::InterfererField;
use crate::traffic::ArrivalRateDistribution;

/// What is evaluated at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisKind {
    /// User-count PMF at `k`.
    Pmf,
    /// Mean and variance of the summed arrival rate in a cell.
    Variance,
    /// Achievable rate.
    Rate,
    /// Mean delay of the typical queue.
    Delay,
    /// Unstable probability for a cell of area `s`.
    Unstable,
    /// Busy probability, success probability, service rate and delay.
    Link,
    /// Success probability at a given BS activity `q`.
    Sir,
    /// Coupled network metrics.
    Network,
}

impl AnalysisKind {
    pub const ALL: [AnalysisKind; 8] = [
        Self::Pmf,
        Self::Variance,
        Self::Rate,
        Self::Delay,
        Self::Unstable,
        Self::Link,
        Self::Sir,
        Self::Network,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Pmf => "pmf",
            Self::Variance => "variance",
            Self::Rate => "rate",
            Self::Delay => "delay",
            Self::Unstable => "unstable",
            Self::Link => "link",
            Self::Sir => "sir",
            Self::Network => "network",
        }
    }
}

impl fmt::Display for AnalysisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnalysisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown analysis kind `{s}`")))
    }
}

/// Which PCP parameter is held fixed while `lambda_u` varies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PcpAnchor {
    ParentIntensity(f64),
    DaughterIntensity(f64),
}

/// Scalar inputs of a single evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub lambda_b: f64,
    pub lambda_u: f64,
    /// Linear SIR threshold.
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub p_b: f64,
    pub pcp_r_c: Option<f64>,
    pub pcp_anchor: Option<PcpAnchor>,
    pub rate: Option<ArrivalRateDistribution>,
    pub model: PopulationModel,
    pub xi0: Option<f64>,
    pub n: Option<f64>,
    pub s: Option<f64>,
    pub q: Option<f64>,
    pub k: Option<f64>,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            lambda_b: 1e-5,
            lambda_u: 1e-4,
            theta: 10.0,
            alpha: 4.0,
            beta: 100.0,
            p_b: 1.0,
            pcp_r_c: None,
            pcp_anchor: None,
            rate: None,
            model: PopulationModel::Ppp,
            xi0: None,
            n: None,
            s: None,
            q: None,
            k: None,
        }
    }
}

/// Numeric keys accepted by [`Scenario::set`].
pub const NUMERIC_KEYS: [&str; 15] = [
    "lambda_b",
    "lambda_u",
    "theta",
    "theta_db",
    "alpha",
    "beta",
    "p_b",
    "pcp_r_c",
    "pcp_lambda_p",
    "pcp_lambda_c",
    "xi0",
    "n",
    "s",
    "q",
    "k",
];

impl Scenario {
    /// Sets a numeric key. `theta_db` is converted to linear.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::Parse(format!("`{key}` must be finite")));
        }
        match key {
            "lambda_b" => self.lambda_b = value,
            "lambda_u" => self.lambda_u = value,
            "theta" => self.theta = value,
            "theta_db" => self.theta = db_to_linear(value),
            "alpha" => self.alpha = value,
            "beta" => self.beta = value,
            "p_b" => self.p_b = value,
            "pcp_r_c" => self.pcp_r_c = Some(value),
            "pcp_lambda_p" => self.pcp_anchor = Some(PcpAnchor::ParentIntensity(value)),
            "pcp_lambda_c" => self.pcp_anchor = Some(PcpAnchor::DaughterIntensity(value)),
            "xi0" => self.xi0 = Some(value),
            "n" => self.n = Some(value),
            "s" => self.s = Some(value),
            "q" => self.q = Some(value),
            "k" => self.k = Some(value),
            _ => return Err(Error::Parse(format!("unknown numeric key `{key}`"))),
        }
        Ok(())
    }

    /// Cluster parameters implied by `lambda_u` and the anchored intensity.
    pub fn pcp(&self) -> Result<PcpParams> {
        let (Some(r_c), Some(anchor)) = (self.pcp_r_c, self.pcp_anchor) else {
            return Err(Error::param(
                "pcp",
                "PCP users need pcp_r_c and one of pcp_lambda_p / pcp_lambda_c",
            ));
        };
        let disc = std::f64::consts::PI * r_c * r_c;
        match anchor {
            PcpAnchor::ParentIntensity(lp) => PcpParams::new(lp, self.lambda_u / (lp * disc), r_c),
            PcpAnchor::DaughterIntensity(lc) => PcpParams::new(self.lambda_u / (lc * disc), lc, r_c),
        }
    }

    /// Network parameters for the current population model.
    pub fn network(&self) -> Result<NetworkParameters> {
        let base = NetworkParameters::new(self.lambda_b, self.lambda_u, self.theta, self.alpha)?
            .with_beta(self.beta)?
            .with_power(self.p_b)?;
        match self.model {
            PopulationModel::Ppp => Ok(base),
            PopulationModel::Pcp => base.with_pcp(self.pcp()?),
        }
    }

    pub fn rate(&self) -> Result<ArrivalRateDistribution> {
        self.rate
            .ok_or_else(|| Error::param("rate", "an arrival-rate law is required"))
    }

    pub fn xi0(&self) -> Result<f64> {
        self.xi0.ok_or_else(|| Error::param("xi0", "required"))
    }

    pub fn s(&self) -> Result<f64> {
        self.s.ok_or_else(|| Error::param("s", "required"))
    }

    pub fn q(&self) -> Result<f64> {
        self.q.ok_or_else(|| Error::param("q", "required"))
    }

    pub fn n(&self) -> Result<u32> {
        whole("n", self.n)
    }

    pub fn k(&self) -> Result<u64> {
        whole("k", self.k).map(u64::from)
    }
}

fn whole(name: &'static str, v: Option<f64>) -> Result<u32> {
    let v = v.ok_or_else(|| Error::param(name, "required"))?;
    if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
        return Err(Error::param(name, format!("must be a whole number, got {v}")));
    }
    Ok(v as u32)
}

/// One value of a series key.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesValue {
    Number(f64),
    Model(PopulationModel),
    Rate(ArrivalRateDistribution),
}

impl SeriesValue {
    fn apply(&self, key: &str, scenario: &mut Scenario) -> Result<()> {
        match *self {
            Self::Number(v) => scenario.set(key, v),
            Self::Model(m) => {
                scenario.model = m;
                Ok(())
            }
            Self::Rate(r) => {
                scenario.rate = Some(r);
                Ok(())
            }
        }
    }
}

impl fmt::Display for SeriesValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Number(v) => write!(f, "{v}"),
            Self::Model(m) => write!(f, "{m}"),
            Self::Rate(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub key: String,
    pub values: Vec<SeriesValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub var: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationControls {
    pub seed: u64,
    pub horizon: u64,
    /// Defaults to a fifth of the horizon.
    pub warmup: Option<u64>,
    pub replications: u32,
    /// Monte Carlo draws for static estimators.
    pub samples: u64,
    /// Replica queues per delay-oracle run.
    pub queues: u32,
    pub field: InterfererField,
}

impl SimulationControls {
    pub fn warmup(&self) -> u64 {
        self.warmup.unwrap_or(self.horizon / 5)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: AnalysisKind,
    pub base: Scenario,
    pub sweep: Sweep,
    pub series: Vec<Series>,
    pub simulation: SimulationControls,
    pub output_dir: Option<PathBuf>,
}

/// A labelled scenario: one combination of series values.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    /// `key=value` pairs joined by `;`, empty without series.
    pub label: String,
    pub scenario: Scenario,
}

impl ExperimentConfig {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        parse_config(&text, &path.display().to_string())
    }

    /// Applies a `key=value` override with the same meaning as in the file.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let mut draft = Draft::from_config(self);
        draft.set(key, value)?;
        *self = draft.finish()?;
        Ok(())
    }

    /// Checks grid, required fields and that every point builds.
    pub fn validate(&self) -> Result<()> {
        let grid = &self.sweep.values;
        if grid.is_empty() {
            return Err(Error::config("[sweep] values", "grid is empty"));
        }
        if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::config(
                "[sweep] values",
                format!("grid must be strictly increasing ({} then {})", w[0], w[1]),
            ));
        }
        if !is_sweepable(&self.sweep.var) {
            return Err(Error::config(
                "[sweep] var",
                format!("`{}` is not a numeric key", self.sweep.var),
            ));
        }
        if self.simulation.replications == 0 {
            return Err(Error::config("[simulation] replications", "must be at least 1"));
        }
        for s in &self.series {
            if s.values.is_empty() {
                return Err(Error::config(format!("[series] {}", s.key), "no values"));
            }
        }
        Ok(())
    }

    /// Cartesian product of all series, in file order with the last key
    /// varying fastest.
    pub fn series_points(&self) -> Result<Vec<SeriesPoint>> {
        let mut points = vec![SeriesPoint {
            label: String::new(),
            scenario: self.base,
        }];
        for s in &self.series {
            let mut next = Vec::with_capacity(points.len() * s.values.len());
            for p in &points {
                for v in &s.values {
                    let mut scenario = p.scenario;
                    v.apply(&s.key, &mut scenario)?;
                    let pair = format!("{}={v}", s.key);
                    let label = if p.label.is_empty() {
                        pair
                    } else {
                        format!("{};{pair}", p.label)
                    };
                    next.push(SeriesPoint { label, scenario });
                }
            }
            points = next;
        }
        Ok(points)
    }

    /// Scenario at one grid value, starting from a series point.
    pub fn at(&self, point: &SeriesPoint, value: f64) -> Result<Scenario> {
        let mut s = point.scenario;
        s.set(&self.sweep.var, value)?;
        Ok(s)
    }

    /// Output directory from the config, else `fallback`.
    pub fn output_dir_or(&self, fallback: &Path) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| fallback.to_path_buf())
    }
}

fn is_sweepable(key: &str) -> bool {
    NUMERIC_KEYS.contains(&key)
}

const SECTIONS: [(&str, &[&str]); 6] = [
    ("scenario", &["name", "kind"]),
    (
        "network",
        &[
            "lambda_b",
            "lambda_u",
            "theta",
            "theta_db",
            "alpha",
            "beta",
            "p_b",
            "pcp_r_c",
            "pcp_lambda_p",
            "pcp_lambda_c",
        ],
    ),
    ("traffic", &["rate", "model", "xi0", "n", "s", "q", "k"]),
    ("sweep", &["var", "values", "range"]),
    (
        "simulation",
        &["seed", "horizon", "warmup", "replications", "samples", "queues", "field"],
    ),
    ("output", &["dir"]),
];

/// Parses a config. `origin` names the source in diagnostics.
pub fn parse_config(text: &str, origin: &str) -> Result<ExperimentConfig> {
    let mut draft = Draft::default();
    let mut section: Option<String> = None;
    let mut seen: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let at = |what: &str| format!("{origin}:{} {what}", i + 1);
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::config(at(""), "unterminated section header"))?
                .trim();
            if name != "series" && !SECTIONS.iter().any(|(s, _)| *s == name) {
                return Err(Error::config(at(""), format!("unknown section [{name}]")));
            }
            section = Some(name.to_string());
            continue;
        }
        let Some(sec) = section.as_deref() else {
            return Err(Error::config(at(""), "key outside of any section"));
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(at(""), "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        let field = at(&format!("[{sec}] {key}"));
        if seen.iter().any(|(s, k)| s == sec && k == key) {
            return Err(Error::config(field, "duplicate key"));
        }
        seen.push((sec.to_string(), key.to_string()));
        if sec == "series" {
            draft.add_series(key, value).map_err(|e| Error::config(&field, e.to_string()))?;
            continue;
        }
        let allowed = SECTIONS.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key) {
            return Err(Error::config(field, format!("unknown key in [{sec}]")));
        }
        draft.set(key, value).map_err(|e| Error::config(&field, e.to_string()))?;
    }
    draft.finish().map_err(|e| match e {
        Error::Config { location, reason } => Error::config(format!("{origin}: {location}"), reason),
        other => Error::config(origin, other.to_string()),
    })
}

#[derive(Debug, Default)]
struct Draft {
    name: Option<String>,
    kind: Option<AnalysisKind>,
    scenario: Scenario,
    theta_keys: u8,
    anchor_keys: u8,
    sweep_var: Option<String>,
    sweep_values: Option<Vec<f64>>,
    series: Vec<Series>,
    seed: Option<u64>,
    horizon: Option<u64>,
    warmup: Option<u64>,
    replications: Option<u32>,
    samples: Option<u64>,
    queues: Option<u32>,
    field: Option<InterfererField>,
    output_dir: Option<PathBuf>,
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::Parse(format!("`{key}`: cannot parse `{value}`")))
}

/// Integer counts may be written in exponent form (`1e6`).
fn count(key: &str, value: &str) -> Result<u64> {
    if let Ok(v) = value.trim().parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = num(key, value)?;
    if f >= 0.0 && f.fract() == 0.0 && f < u64::MAX as f64 {
        Ok(f as u64)
    } else {
        Err(Error::Parse(format!("`{key}`: `{value}` is not a whole number")))
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// `start:stop:count`, both ends included.
pub fn linear_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(Error::Parse(format!("range `{spec}`: expected start:stop:count")));
    };
    let (a, b): (f64, f64) = (num("range", a)?, num("range", b)?);
    let n = count("range", n)?;
    match n {
        0 => Ok(Vec::new()),
        1 => Ok(vec![a]),
        _ => Ok((0..n)
            .map(|i| {
                if i == n - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect()),
    }
}

impl Draft {
    fn from_config(c: &ExperimentConfig) -> Self {
        Self {
            name: Some(c.name.clone()),
            kind: Some(c.kind),
            scenario: c.base,
            theta_keys: 0,
            anchor_keys: 0,
            sweep_var: Some(c.sweep.var.clone()),
            sweep_values: Some(c.sweep.values.clone()),
            series: c.series.clone(),
            seed: Some(c.simulation.seed),
            horizon: Some(c.simulation.horizon),
            warmup: c.simulation.warmup,
            replications: Some(c.simulation.replications),
            samples: Some(c.simulation.samples),
            queues: Some(c.simulation.queues),
            field: Some(c.simulation.field),
            output_dir: c.output_dir.clone(),
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "name" => self.name = Some(value.to_string()),
            "kind" => self.kind = Some(value.parse()?),
            "rate" => self.scenario.rate = Some(value.parse()?),
            "model" => self.scenario.model = value.parse()?,
            "theta" | "theta_db" => {
                self.theta_keys += 1;
                self.scenario.set(key, num(key, value)?)?;
            }
            "pcp_lambda_p" | "pcp_lambda_c" => {
                self.anchor_keys += 1;
                self.scenario.set(key, num(key, value)?)?;
            }
            k if NUMERIC_KEYS.contains(&k) => self.scenario.set(k, num(k, value)?)?,
            "var" => self.sweep_var = Some(value.to_string()),
            "values" => {
                self.sweep_values = Some(list(value).map(|v| num("values", v)).collect::<Result<_>>()?)
            }
            "range" => self.sweep_values = Some(linear_range(value)?),
            "seed" => self.seed = Some(count(key, value)?),
            "horizon" => self.horizon = Some(count(key, value)?),
            "warmup" => self.warmup = Some(count(key, value)?),
            "replications" => self.replications = Some(u32::try_from(count(key, value)?).map_err(|_| Error::Parse("`replications` too large".into()))?),
            "samples" => self.samples = Some(count(key, value)?),
            "queues" => self.queues = Some(u32::try_from(count(key, value)?).map_err(|_| Error::Parse("`queues` too large".into()))?),
            "field" => {
                self.field = Some(match value {
                    "independent" => InterfererField::IndependentPpp,
                    "others" => InterfererField::OtherBaseStations,
                    _ => return Err(Error::Parse(format!("`field`: expected independent or others, got `{value}`"))),
                })
            }
            "dir" => self.output_dir = Some(PathBuf::from(value)),
            _ => return Err(Error::Parse(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    fn add_series(&mut self, key: &str, value: &str) -> Result<()> {
        let values = match key {
            "model" => list(value)
                .map(|v| v.parse().map(SeriesValue::Model))
                .collect::<Result<Vec<_>>>()?,
            "rate" => list(value)
                .map(|v| v.parse().map(SeriesValue::Rate))
                .collect::<Result<Vec<_>>>()?,
            k if NUMERIC_KEYS.contains(&k) => list(value)
                .map(|v| num(k, v).map(SeriesValue::Number))
                .collect::<Result<Vec<_>>>()?,
            _ => return Err(Error::Parse(format!("`{key}` cannot be a series"))),
        };
        self.series.push(Series {
            key: key.to_string(),
            values,
        });
        Ok(())
    }

    fn finish(self) -> Result<ExperimentConfig> {
        if self.theta_keys > 1 {
            return Err(Error::config("[network] theta", "give theta or theta_db, not both"));
        }
        if self.anchor_keys > 1 {
            return Err(Error::config(
                "[network] pcp_lambda_p",
                "give exactly one of pcp_lambda_p and pcp_lambda_c",
            ));
        }
        let config = ExperimentConfig {
            name: self.name.ok_or_else(|| Error::config("[scenario] name", "missing"))?,
            kind: self.kind.ok_or_else(|| Error::config("[scenario] kind", "missing"))?,
            base: self.scenario,
            sweep: Sweep {
                var: self.sweep_var.ok_or_else(|| Error::config("[sweep] var", "missing"))?,
                values: self
                    .sweep_values
                    .ok_or_else(|| Error::config("[sweep] values", "missing values or range"))?,
            },
            series: self.series,
            simulation: SimulationControls {
                seed: self.seed.ok_or_else(|| Error::config("[simulation] seed", "missing"))?,
                horizon: self.horizon.unwrap_or(1_000_000),
                warmup: self.warmup,
                replications: self.replications.unwrap_or(1),
                samples: self.samples.unwrap_or(1_000_000),
                queues: self.queues.unwrap_or(1),
                field: self.field.unwrap_or(InterfererField::IndependentPpp),
            },
            output_dir: self.output_dir,
        };
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
[scenario]
name = t
kind = delay
[network]
theta = 10
alpha = 4
[traffic]
n = 20
[sweep]
var = xi0
values = 0.001, 0.002, 0.004
[series]
alpha = 3, 4
[simulation]
seed = 7
";

    #[test]
    fn parses_minimal_config() {
        let c = parse_config(MINIMAL, "mem").unwrap();
        assert_eq!(c.kind, AnalysisKind::Delay);
        assert_eq!(c.sweep.values, vec![0.001, 0.002, 0.004]);
        assert_eq!(c.simulation.seed, 7);
        let pts = c.series_points().unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1].label, "alpha=4");
    }

    #[test]
    fn seed_is_mandatory() {
        let text = MINIMAL.replace("seed = 7", "");
        let err = parse_config(&text, "mem").unwrap_err().to_string();
        assert!(err.contains("seed"), "{err}");
    }

    #[test]
    fn grid_must_increase() {
        let text = MINIMAL.replace("0.001, 0.002, 0.004", "0.002, 0.001");
        let err = parse_config(&text, "mem").unwrap_err().to_string();
        assert!(err.contains("strictly increasing"), "{err}");
        let text = MINIMAL.replace("values = 0.001, 0.002, 0.004", "values =");
        assert!(parse_config(&text, "mem").is_err());
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let text = MINIMAL.replace("alpha = 4\n", "alpha = four\n");
        let err = parse_config(&text, "cfg.ini").unwrap_err().to_string();
        assert!(err.contains("cfg.ini:7 [network] alpha"), "{err}");
        let text = MINIMAL.replace("n = 20", "bogus = 1");
        let err = parse_config(&text, "cfg.ini").unwrap_err().to_string();
        assert!(err.contains("unknown key"), "{err}");
    }

    #[test]
    fn theta_db_is_linearized() {
        let text = MINIMAL.replace("theta = 10", "theta_db = 10");
        let c = parse_config(&text, "mem").unwrap();
        assert!((c.base.theta - 10.0).abs() < 1e-12);
        let text = MINIMAL.replace("theta = 10", "theta = 10\ntheta_db = 10");
        assert!(parse_config(&text, "mem").is_err());
    }

    #[test]
    fn pcp_anchor_follows_lambda_u() {
        let mut s = Scenario {
            lambda_u: 2.0,
            pcp_r_c: Some(1.0),
            ..Scenario::default()
        };
        s.set("pcp_lambda_p", 1.0 / (1.1 * std::f64::consts::PI)).unwrap();
        let p = s.pcp().unwrap();
        assert!((p.lambda_c - 2.2).abs() < 1e-12);
        s.set("pcp_lambda_c", 1.1).unwrap();
        let p = s.pcp().unwrap();
        assert!((p.user_intensity() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn range_hits_both_ends() {
        let r = linear_range("0.1:3:30").unwrap();
        assert_eq!(r.len(), 30);
        assert_eq!(r[0], 0.1);
        assert_eq!(r[29], 3.0);
        assert!(linear_range("1:2").is_err());
    }

    #[test]
    fn overrides_reuse_file_keys() {
        let mut c = parse_config(MINIMAL, "mem").unwrap();
        c.set("lambda_b", "2e-5").unwrap();
        c.set("seed", "9").unwrap();
        assert_eq!(c.base.lambda_b, 2e-5);
        assert_eq!(c.simulation.seed, 9);
        assert!(c.set("values", "3, 2").is_err());
    }
}

//! Closed-form traffic, SIR, delay and stability results.
//!
//! Conventions: `δ = 2/α` and `sinc(δ) = sin(πδ)/(πδ)`. Interference is the
//! only impairment; transmit power cancels out of every SIR expression.
//! Everything here is a pure function of its arguments.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{require_non_negative, require_positive, require_probability, Error, Result};
use crate::geometry::PcpParams;
use crate::traffic::ArrivalRateDistribution;

/// Default truncation tolerance for infinite Poisson-type series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-10;

/// `E[S²]λ_b² − 1` under the Gamma(3.5) cell-area approximation, i.e.
/// `Γ(5.5)/(3.5² Γ(3.5)) − 1 = 2/7`.
pub const CELL_AREA_EXCESS_SECOND_MOMENT: f64 = 2.0 / 7.0;

/// Normalized sinc, `sin(πx)/(πx)`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// SIR threshold and path-loss exponent, the two link parameters every
/// closed form depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirModel {
    theta: f64,
    alpha: f64,
}

impl SirModel {
    /// `theta` is linear. `alpha` must exceed 2.
    pub fn new(theta: f64, alpha: f64) -> Result<Self> {
        require_positive("theta", theta)?;
        if !(alpha.is_finite() && alpha > 2.0) {
            return Err(Error::param(
                "alpha",
                format!("path-loss exponent must exceed 2, got {alpha}"),
            ));
        }
        Ok(Self { theta, alpha })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        2.0 / self.alpha
    }

    pub fn sinc_delta(&self) -> f64 {
        sinc(self.delta())
    }

    /// `θ^δ`
    pub fn theta_delta(&self) -> f64 {
        self.theta.powf(self.delta())
    }

    /// Per-user rate threshold for one user, `sinc/(sinc + θ^δ)`.
    /// The threshold for a cell of `n` users is this divided by `n`.
    pub fn unit_branch_point(&self) -> f64 {
        let s = self.sinc_delta();
        s / (s + self.theta_delta())
    }

    /// `B0` for a cell of `n` users.
    pub fn branch_point(&self, n: u32) -> f64 {
        self.unit_branch_point() / n as f64
    }
}

/// Scalar model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParameters {
    /// BS intensity, per m².
    pub lambda_b: f64,
    /// User intensity, per m².
    pub lambda_u: f64,
    /// Cluster parameters when users form a PCP; must imply `lambda_u`.
    pub pcp: Option<PcpParams>,
    /// Linear SIR threshold.
    pub theta: f64,
    pub alpha: f64,
    /// Transmit power in watts. Cancels in every SIR ratio.
    pub p_b: f64,
    /// Mean delay requirement, slots.
    pub beta: f64,
}

impl NetworkParameters {
    pub fn new(lambda_b: f64, lambda_u: f64, theta: f64, alpha: f64) -> Result<Self> {
        let params = Self {
            lambda_b,
            lambda_u,
            pcp: None,
            theta,
            alpha,
            p_b: 1.0,
            beta: 100.0,
        };
        params.validate()?;
        Ok(params)
    }

    /// Attaches cluster parameters; `lambda_u` is replaced by the intensity
    /// they imply.
    pub fn with_pcp(mut self, pcp: PcpParams) -> Result<Self> {
        pcp.validate()?;
        self.lambda_u = pcp.user_intensity();
        self.pcp = Some(pcp);
        self.validate()?;
        Ok(self)
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        self.beta = beta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_power(mut self, p_b: f64) -> Result<Self> {
        self.p_b = p_b;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("lambda_b", self.lambda_b)?;
        require_positive("lambda_u", self.lambda_u)?;
        require_positive("p_b", self.p_b)?;
        require_positive("beta", self.beta)?;
        SirModel::new(self.theta, self.alpha)?;
        if let Some(pcp) = &self.pcp {
            pcp.validate()?;
            let implied = pcp.user_intensity();
            if ((implied - self.lambda_u) / self.lambda_u).abs() > 1e-9 {
                return Err(Error::param(
                    "lambda_u",
                    format!("{} disagrees with the PCP intensity {implied}", self.lambda_u),
                ));
            }
        }
        Ok(())
    }

    pub fn sir(&self) -> SirModel {
        SirModel {
            theta: self.theta,
            alpha: self.alpha,
        }
    }

    pub fn delta(&self) -> f64 {
        2.0 / self.alpha
    }

    /// Mean users per cell, `λ_u/λ_b`.
    pub fn users_per_cell(&self) -> f64 {
        self.lambda_u / self.lambda_b
    }

    fn pcp_or_err(&self) -> Result<&PcpParams> {
        self.pcp
            .as_ref()
            .ok_or_else(|| Error::param("pcp", "cluster parameters required for the PCP model"))
    }
}

/// Spatial law of the users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PopulationModel {
    #[default]
    Ppp,
    Pcp,
}

impl fmt::Display for PopulationModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ppp => "ppp",
            Self::Pcp => "pcp",
        })
    }
}

impl FromStr for PopulationModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ppp" => Ok(Self::Ppp),
            "pcp" => Ok(Self::Pcp),
            other => Err(Error::Parse(format!("unknown population model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

/// `A1`, `A2` are user-count bounds; `b0` is the per-user rate threshold
/// for a single-user cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityThresholds {
    pub b0: f64,
    /// Largest cell population (exclusive) with a finite mean delay.
    pub a1: f64,
    /// Largest cell population (exclusive) meeting the delay requirement.
    pub a2: f64,
}

/// Mean delay in slots, or the queue does not settle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayResult {
    Finite(f64),
    Unstable,
}

impl DelayResult {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Self::Finite(v) => Some(v),
            Self::Unstable => None,
        }
    }

    pub fn is_unstable(&self) -> bool {
        matches!(self, Self::Unstable)
    }
}

impl fmt::Display for DelayResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Unstable => f.write_str("unstable"),
        }
    }
}

fn ln_factorial(k: u64) -> f64 {
    libm::lgamma(k as f64 + 1.0)
}

/// Poisson log-probability, handling a zero mean.
fn ln_poisson(k: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -mean + k as f64 * mean.ln() - ln_factorial(k)
}

fn check_tol(tol: f64) -> Result<f64> {
    if tol > 0.0 && tol <= 1e-6 {
        Ok(tol)
    } else {
        Err(Error::param("tol", format!("must lie in (0, 1e-6], got {tol}")))
    }
}

/// Upper bound on series length before we give up.
fn term_budget(mean: f64) -> u64 {
    (mean + 60.0 * mean.sqrt() + 2_000.0) as u64
}

/// `P(N = k)` for PPP users in a cell of area `s`.
pub fn pmf_users_ppp(k: u64, lambda_u: f64, s: f64) -> Result<f64> {
    require_non_negative("lambda_u", lambda_u)?;
    require_positive("s", s)?;
    Ok(ln_poisson(k, lambda_u * s).exp())
}

/// Cell population law for PCP users when whole clusters attach to the BS
/// nearest their parent: a Poisson(`λ_p s`) number of clusters, each of
/// Poisson(`π r_c² λ_c`) users.
#[derive(Debug, Clone)]
pub struct PcpCountLaw {
    cluster_mean: f64,
    /// `ln P(N_p = a)` for the retained parent counts `a = 0..`.
    ln_parent: Vec<f64>,
}

impl PcpCountLaw {
    pub fn new(pcp: &PcpParams, s: f64, tol: f64) -> Result<Self> {
        pcp.validate()?;
        require_positive("s", s)?;
        check_tol(tol)?;
        let parent_mean = pcp.lambda_p * s;
        let budget = term_budget(parent_mean);
        let mut ln_parent = Vec::new();
        let mut cdf = 0.0;
        for a in 0.. {
            if a > budget {
                return Err(Error::Numeric(format!(
                    "parent-count series did not reach tail mass {tol} within {budget} terms"
                )));
            }
            let lp = ln_poisson(a, parent_mean);
            ln_parent.push(lp);
            cdf += lp.exp();
            if a as f64 >= parent_mean && 1.0 - cdf < tol {
                break;
            }
        }
        Ok(Self {
            cluster_mean: pcp.mean_cluster_size(),
            ln_parent,
        })
    }

    pub fn pmf(&self, k: u64) -> Result<f64> {
        let mut total = 0.0;
        for (a, &lp) in self.ln_parent.iter().enumerate() {
            let term = lp + ln_poisson(k, a as f64 * self.cluster_mean);
            total += term.exp();
        }
        if total.is_finite() {
            Ok(total)
        } else {
            Err(Error::Numeric(format!("PCP pmf at k={k} is not finite")))
        }
    }
}

/// `P(N = k)` for PCP users, cluster-level association.
pub fn pmf_users_pcp(k: u64, pcp: &PcpParams, s: f64, tol: f64) -> Result<f64> {
    PcpCountLaw::new(pcp, s, tol)?.pmf(k)
}

/// Mean and variance of the summed arrival rate in a typical cell.
///
/// Only `E[ξ]` enters: the per-user rates are treated as their mean.
pub fn total_arrival_moments(
    dist: &ArrivalRateDistribution,
    params: &NetworkParameters,
    model: PopulationModel,
) -> Result<Moments> {
    dist.validate()?;
    params.validate()?;
    let mean_rate = dist.mean();
    let ratio = params.users_per_cell();
    let linear = match model {
        PopulationModel::Ppp => ratio,
        PopulationModel::Pcp => ratio * (params.pcp_or_err()?.mean_cluster_size() + 1.0),
    };
    Ok(Moments {
        mean: mean_rate * ratio,
        variance: mean_rate * mean_rate * (CELL_AREA_EXCESS_SECOND_MOMENT * ratio * ratio + linear),
    })
}

fn check_load(n: u32, xi0: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n", "a cell needs at least one user"));
    }
    require_probability("xi0", xi0)?;
    Ok(())
}

/// Closed-form solution `q*` of the busy-probability fixed point.
pub fn solve_busy_probability(n: u32, xi0: f64, sir: &SirModel) -> Result<f64> {
    check_load(n, xi0)?;
    if xi0 >= sir.branch_point(n) {
        return Ok(1.0);
    }
    let s = sir.sinc_delta();
    let load = n as f64 * xi0;
    Ok(load * s / (s - load * sir.theta_delta()))
}

/// Result of iterating the fixed-point map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointIteration {
    pub q: f64,
    pub iterations: u32,
}

/// Iterates `q ← min(nξ0(sinc + qθ^δ)/sinc, 1)` from `q = 0` until the step
/// drops below `tol`.
pub fn iterate_busy_probability(
    n: u32,
    xi0: f64,
    sir: &SirModel,
    tol: f64,
) -> Result<FixedPointIteration> {
    check_load(n, xi0)?;
    require_positive("tol", tol)?;
    let s = sir.sinc_delta();
    let td = sir.theta_delta();
    let load = n as f64 * xi0;
    let mut q = 0.0f64;
    for it in 1..=10_000_000u32 {
        let next = (load * (s + q * td) / s).min(1.0);
        let step = (next - q).abs();
        q = next;
        if step < tol {
            return Ok(FixedPointIteration { q, iterations: it });
        }
    }
    Err(Error::Numeric("fixed-point iteration did not converge".into()))
}

/// Success probability with interferers busy independently with probability
/// `q`: `sinc/(sinc + qθ^δ)`.
pub fn success_probability(q: f64, sir: &SirModel) -> Result<f64> {
    require_probability("q", q)?;
    let s = sir.sinc_delta();
    Ok(s / (s + q * sir.theta_delta()))
}

/// Success probability at the busy-probability fixed point.
pub fn approx_success_probability(n: u32, xi0: f64, sir: &SirModel) -> Result<f64> {
    check_load(n, xi0)?;
    if xi0 >= sir.branch_point(n) {
        Ok(sir.unit_branch_point())
    } else {
        Ok(1.0 - n as f64 * xi0 * sir.theta_delta() / sir.sinc_delta())
    }
}

/// Achievable rate in bit/s/Hz with `log2(1 + θ)` bits per packet.
pub fn achievable_rate(n: u32, xi0: f64, sir: &SirModel) -> Result<f64> {
    Ok(approx_success_probability(n, xi0, sir)? * (1.0 + sir.theta()).log2())
}

/// Per-user service rate under random scheduling, `P̃s / n`.
pub fn service_rate(n: u32, xi0: f64, sir: &SirModel) -> Result<f64> {
    Ok(approx_success_probability(n, xi0, sir)? / n as f64)
}

/// Mean sojourn time of a Geo/Geo/1 queue with arrival probability `xi0` and
/// per-slot success probability `mu`: `(1 − ξ0)/(μ − ξ0)`.
pub fn geo_queue_delay(xi0: f64, mu: f64) -> DelayResult {
    if mu > xi0 {
        DelayResult::Finite((1.0 - xi0) / (mu - xi0))
    } else {
        DelayResult::Unstable
    }
}

/// Mean delay of the typical user in a cell of `n` users.
pub fn mean_delay(n: u32, xi0: f64, sir: &SirModel) -> Result<DelayResult> {
    check_load(n, xi0)?;
    let s = sir.sinc_delta();
    // finite iff n < A1, i.e. n ξ0 (sinc + θ^δ) < sinc
    if n as f64 * xi0 * (s + sir.theta_delta()) >= s {
        return Ok(DelayResult::Unstable);
    }
    let mu = service_rate(n, xi0, sir)?;
    Ok(geo_queue_delay(xi0, mu))
}

pub fn stability_thresholds(xi0: f64, sir: &SirModel, beta: f64) -> Result<StabilityThresholds> {
    if !(xi0 > 0.0 && xi0 < 1.0) {
        return Err(Error::param("xi0", format!("must lie in (0, 1), got {xi0}")));
    }
    if !(beta.is_finite() && beta > 1.0) {
        return Err(Error::param("beta", format!("must exceed 1, got {beta}")));
    }
    let s = sir.sinc_delta();
    let td = sir.theta_delta();
    let saturation = xi0 * td + xi0 * s;
    Ok(StabilityThresholds {
        b0: sir.unit_branch_point(),
        a1: s / saturation,
        a2: s / ((1.0 - xi0) * s / beta + saturation),
    })
}

/// Largest per-user rate keeping a queue in a `k`-user cell stable,
/// `f(k) = sinc/(k(sinc + θ^δ))`.
pub fn rate_threshold(k: u64, sir: &SirModel) -> f64 {
    sir.unit_branch_point() / k as f64
}

/// Probability that the typical queue is unstable, `P(ξ0 ≥ f(N))`, with `N`
/// the population of a cell of area `s`.
///
/// The user-count series stops once the remaining mass drops below `tol`.
pub fn unstable_probability(
    dist: &ArrivalRateDistribution,
    model: PopulationModel,
    params: &NetworkParameters,
    s: f64,
    tol: f64,
) -> Result<f64> {
    check_tol(tol)?;
    require_positive("s", s)?;
    params.validate()?;
    dist.validate()?;
    if matches!(dist, ArrivalRateDistribution::Deterministic(_)) {
        return Err(Error::param(
            "dist",
            "unstable probability supports uniform and exponential rate laws",
        ));
    }
    let sir = params.sir();

    enum Law {
        Ppp(f64),
        Pcp(PcpCountLaw),
    }
    let (law, mean_n, slack) = match model {
        PopulationModel::Ppp => {
            let m = params.lambda_u * s;
            (Law::Ppp(m), m, tol)
        }
        PopulationModel::Pcp => {
            let pcp = params.pcp_or_err()?;
            let m = pcp.user_intensity() * s;
            // the pmf itself is short by at most `tol` in total
            (Law::Pcp(PcpCountLaw::new(pcp, s, tol)?), m, 2.0 * tol)
        }
    };
    let pmf = |k: u64| -> Result<f64> {
        match &law {
            Law::Ppp(m) => Ok(ln_poisson(k, *m).exp()),
            Law::Pcp(l) => l.pmf(k),
        }
    };

    let p0 = pmf(0)?;
    let mut cumulative = p0;
    let mut stable = p0;
    let budget = term_budget(mean_n * 10.0);
    let mut k = 0u64;
    while 1.0 - cumulative >= slack || (k as f64) < mean_n {
        k += 1;
        if k > budget {
            return Err(Error::Numeric(format!(
                "user-count series did not reach tail mass {tol} within {budget} terms"
            )));
        }
        let p = pmf(k)?;
        cumulative += p;
        stable += dist.cdf(rate_threshold(k, &sir)) * p;
    }
    Ok((1.0 - stable).clamp(0.0, 1.0))
}

//! Per-user arrival-rate laws and Bernoulli packet streams.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{require_non_negative, require_positive, require_probability, Error, Result};
use crate::rng::{derive_seed, hashed_uniform, rng_from_seed};

/// Law of the per-user packet arrival rate ξ.
///
/// Text form: `det:0.3`, `unif:0:0.02`, `exp-mean:0.01`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArrivalRateDistribution {
    /// Every user has the same rate.
    Deterministic(f64),
    /// Uniform on `[0, upper]`.
    Uniform { upper: f64 },
    /// Exponential, parameterized by its mean (rate `1/mean`).
    Exponential { mean: f64 },
}

/// One draw from an [`ArrivalRateDistribution`] made usable as a Bernoulli
/// parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateDraw {
    pub rate: f64,
    /// The raw draw exceeded 1 and was clamped.
    pub clamped: bool,
}

impl ArrivalRateDistribution {
    /// Validated constructor for the deterministic law.
    ///
    /// The value may exceed 1 so that traffic-volume studies can use
    /// mean rates above one packet per slot; such values are clamped when
    /// they become Bernoulli parameters.
    pub fn deterministic(rate: f64) -> Result<Self> {
        require_non_negative("rate", rate)?;
        Ok(Self::Deterministic(rate))
    }

    pub fn uniform(upper: f64) -> Result<Self> {
        require_positive("upper", upper)?;
        Ok(Self::Uniform { upper })
    }

    pub fn exponential_mean(mean: f64) -> Result<Self> {
        require_positive("mean", mean)?;
        Ok(Self::Exponential { mean })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Deterministic(r) => require_non_negative("rate", r).map(drop),
            Self::Uniform { upper } => require_positive("upper", upper).map(drop),
            Self::Exponential { mean } => require_positive("mean", mean).map(drop),
        }
    }

    /// Exact CDF, `P(ξ <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Deterministic(r) => {
                if x >= r {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Uniform { upper } => (x / upper).clamp(0.0, 1.0),
            Self::Exponential { mean } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x / mean).exp_m1()
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Deterministic(r) => r,
            Self::Uniform { upper } => upper / 2.0,
            Self::Exponential { mean } => mean,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::Deterministic(_) => 0.0,
            Self::Uniform { upper } => upper * upper / 12.0,
            Self::Exponential { mean } => mean * mean,
        }
    }

    /// Unclamped draw.
    pub fn sample_raw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Deterministic(r) => r,
            Self::Uniform { upper } => rng.random::<f64>() * upper,
            Self::Exponential { mean } => Exp::new(1.0 / mean)
                .expect("validated mean")
                .sample(rng),
        }
    }

    /// Draw clamped into `[0, 1]`.
    pub fn sample_clamped<R: Rng + ?Sized>(&self, rng: &mut R) -> RateDraw {
        let raw = self.sample_raw(rng);
        RateDraw {
            rate: raw.min(1.0),
            clamped: raw > 1.0,
        }
    }

    /// Seeded single draw, clamped into `[0, 1]`.
    pub fn sample_rate(&self, seed: u64) -> RateDraw {
        self.sample_clamped(&mut rng_from_seed(seed))
    }
}

pub fn rate_cdf(dist: &ArrivalRateDistribution, x: f64) -> f64 {
    dist.cdf(x)
}

pub fn rate_mean(dist: &ArrivalRateDistribution) -> f64 {
    dist.mean()
}

pub fn sample_rate(dist: &ArrivalRateDistribution, seed: u64) -> RateDraw {
    dist.sample_rate(seed)
}

impl fmt::Display for ArrivalRateDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Deterministic(r) => write!(f, "det:{r}"),
            Self::Uniform { upper } => write!(f, "unif:0:{upper}"),
            Self::Exponential { mean } => write!(f, "exp-mean:{mean}"),
        }
    }
}

impl FromStr for ArrivalRateDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("arrival law `{s}`: {why}"));
        let num = |t: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| bad(&format!("`{t}` is not a number")))
        };
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["det", r] => Self::deterministic(num(r)?),
            ["unif", lo, hi] => {
                if num(lo)? != 0.0 {
                    return Err(bad("uniform laws start at 0"));
                }
                Self::uniform(num(hi)?)
            }
            ["exp-mean", m] => Self::exponential_mean(num(m)?),
            _ => Err(bad("expected det:<r>, unif:0:<b> or exp-mean:<m>")),
        }
    }
}

/// Bernoulli arrivals with random access by slot index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalStream {
    rate: f64,
    seed: u64,
}

impl ArrivalStream {
    pub fn new(rate: f64, seed: u64) -> Result<Self> {
        require_probability("rate", rate)?;
        Ok(Self { rate, seed })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Whether a packet arrives in `slot`. Pure in `(seed, slot)`.
    #[inline]
    pub fn next_arrival(&self, slot: u64) -> bool {
        hashed_uniform(self.seed, slot) < self.rate
    }
}

/// Seed of the arrival stream owned by user `user` in a run seeded with
/// `seed`.
pub fn user_stream_seed(seed: u64, user: u64) -> u64 {
    derive_seed(derive_seed(seed, 0xA55_1CE), user)
}

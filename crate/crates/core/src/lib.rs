//! Spatio-temporal traffic in single-tier cellular networks.
//!
//! Base stations form a Poisson point process; users form either a second
//! PPP or a Poisson cluster process. Every user owns a FIFO queue fed by a
//! Bernoulli packet stream whose rate is drawn per user. Each slot a base
//! station picks one of its users at random and transmits if that queue is
//! not empty; the packet succeeds when the SIR clears the threshold.
//!
//! The crate is split into:
//! - [`geometry`]: PPP/PCP sampling, nearest-BS association, cell areas.
//! - [`traffic`]: per-user arrival-rate laws and Bernoulli streams.
//! - [`analytics`]: closed-form PMFs, busy probability fixed point,
//!   success probability, rate, mean delay and unstable probability.
//! - [`simulator`]: Monte Carlo oracles for the closed forms.
//! - [`harness`]: sweep configs, CSV output and comparison reports.

pub mod analytics;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod rng;
pub mod simulator;
pub mod traffic;

pub use error::{Error, Result};

//! Bayesian Markov-switching regressions for exchange-rate returns.
//!
//! Regimes are structural exchange-rate models (Taylor rule, monetary, PPP,
//! UIP) or unrestricted "kitchen-sink" regressions. Transition probabilities
//! follow a multinomial logit in lagged policy rates. Estimation is a Gibbs
//! sampler with spike-and-slab coefficient priors, forward-filtering
//! backward-sampling of the regime path and Pólya-Gamma augmentation of the
//! logit. A recursive out-of-sample harness scores density and point
//! forecasts against a driftless random walk.

pub mod calendar;
pub mod data;
pub mod distributions;
pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod forecast;
pub mod gibbs;
pub mod model;
pub mod numeric;
pub mod synthetic;

pub use calendar::YearMonth;
pub use error::{Error, Result};

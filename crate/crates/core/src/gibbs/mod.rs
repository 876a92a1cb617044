//! Gibbs sampler for Markov-switching regressions with logit transition laws.

pub mod conjugate;
pub mod ffbs;
pub mod logit;
mod model;
pub mod permutation;
pub mod sampler;
pub mod summary;
pub mod transition;

pub use conjugate::{beta_posteriors, draw_beta_sigma, draw_delta, inclusion_probability, BlockPosterior};
pub use ffbs::{draw_states_ffbs, filter_state, forward_filter, ffbs, FilterOutput};
pub use logit::{draw_gamma_pg, gamma_conditional};
pub use model::{sample_categorical, GibbsState, Model, SamplerOptions};
pub use permutation::{apply_permutation, permutation_step};
pub use sampler::{run_mcmc, PosteriorDraw, PosteriorSample, Sampler};
pub use summary::{state_probability_summary, StateSummary};
pub use transition::{TransitionModel, PROB_FLOOR};

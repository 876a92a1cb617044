use rand::Rng;

use crate::error::{Error, Result};
use crate::gibbs::model::{GibbsState, Model};
use crate::numeric::symmetric_log_sum_exp;

/// Output of the forward filter.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutput {
    pub states: usize,
    /// Row-major `(T + 1) × K` log filtered probabilities; row 0 is the uniform `S_0` prior.
    pub log_filtered: Vec<f64>,
    /// `ln p(y_1, …, y_T)`.
    pub log_likelihood: f64,
}

impl FilterOutput {
    pub fn len(&self) -> usize {
        self.log_filtered.len() / self.states - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `P(S_t = · | y_1..y_t)` for `t = 1..=T`.
    pub fn filtered(&self, t: usize) -> Vec<f64> {
        let k = self.states;
        self.log_filtered[t * k..(t + 1) * k].iter().map(|l| l.exp()).collect()
    }

    /// Filtered probabilities after the last observation.
    pub fn terminal(&self) -> Vec<f64> {
        self.filtered(self.len())
    }
}

/// Forward filter in log space.
///
/// `log_lik` is row-major `T × K`; `log_trans` is row-major `T × K × K`, with
/// matrix `t` (previous state by next state) governing the move into row `t`.
pub fn forward_filter(log_lik: &[f64], log_trans: &[f64], k: usize) -> Result<FilterOutput> {
    let t_len = log_lik.len() / k;
    debug_assert_eq!(log_trans.len(), t_len * k * k);
    let mut lf = vec![0.0; (t_len + 1) * k];
    lf[..k].iter_mut().for_each(|v| *v = -(k as f64).ln());
    let mut total = 0.0;
    let mut terms = vec![0.0; k];
    let mut unnorm = vec![0.0; k];
    for t in 0..t_len {
        let trans = &log_trans[t * k * k..(t + 1) * k * k];
        for b in 0..k {
            for a in 0..k {
                terms[a] = lf[t * k + a] + trans[a * k + b];
            }
            unnorm[b] = symmetric_log_sum_exp(&terms) + log_lik[t * k + b];
        }
        let c = symmetric_log_sum_exp(&unnorm);
        if !c.is_finite() {
            return Err(Error::Numerical(format!(
                "forward filter: non-finite predictive likelihood at row {t}"
            )));
        }
        total += c;
        for b in 0..k {
            lf[(t + 1) * k + b] = unnorm[b] - c;
        }
    }
    Ok(FilterOutput {
        states: k,
        log_filtered: lf,
        log_likelihood: total,
    })
}

fn sample_log_weights<R: Rng + ?Sized>(log_w: &[f64], scratch: &mut [f64], rng: &mut R) -> usize {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for (wi, l) in scratch.iter_mut().zip(log_w) {
        *wi = (l - max).exp();
    }
    crate::gibbs::model::sample_categorical(&scratch[..log_w.len()], rng)
}

/// Backward sampling of `(S_0, S_1..S_T)` given the filter output.
pub fn backward_sample<R: Rng + ?Sized>(
    filter: &FilterOutput,
    log_trans: &[f64],
    rng: &mut R,
) -> (usize, Vec<usize>) {
    let k = filter.states;
    let t_len = filter.len();
    let lf = &filter.log_filtered;
    let mut path = vec![0usize; t_len + 1];
    let mut scratch = vec![0.0; k];
    path[t_len] = sample_log_weights(&lf[t_len * k..(t_len + 1) * k], &mut scratch, rng);
    let mut w = vec![0.0; k];
    for t in (0..t_len).rev() {
        let next = path[t + 1];
        let trans = &log_trans[t * k * k..(t + 1) * k * k];
        for a in 0..k {
            w[a] = lf[t * k + a] + trans[a * k + next];
        }
        path[t] = sample_log_weights(&w, &mut scratch, rng);
    }
    let s0 = path[0];
    path.remove(0);
    (s0, path)
}

/// Joint draw of the pre-sample state and the state path, and the filter it came from.
pub fn ffbs<R: Rng + ?Sized>(
    log_lik: &[f64],
    log_trans: &[f64],
    k: usize,
    rng: &mut R,
) -> Result<(usize, Vec<usize>, FilterOutput)> {
    let filter = forward_filter(log_lik, log_trans, k)?;
    let (s0, path) = backward_sample(&filter, log_trans, rng);
    Ok((s0, path, filter))
}

/// Forward filter of `model` at the parameters in `state`.
pub fn filter_state(model: &Model, state: &GibbsState) -> Result<FilterOutput> {
    let ll = model.log_likelihoods(&state.beta, &state.sigma_sq);
    let lt = model.log_transition_matrices(&state.transition);
    forward_filter(&ll, &lt, model.states())
}

/// Multimove draw of `S_0, S_1..S_T` given the other unknowns in `state`.
pub fn draw_states_ffbs<R: Rng + ?Sized>(
    model: &Model,
    state: &GibbsState,
    rng: &mut R,
) -> Result<(usize, Vec<usize>, FilterOutput)> {
    let ll = model.log_likelihoods(&state.beta, &state.sigma_sq);
    let lt = model.log_transition_matrices(&state.transition);
    ffbs(&ll, &lt, model.states(), rng)
}

use std::io::Write;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::calendar::YearMonth;
use crate::error::{Error, Result};
use crate::gibbs::conjugate::{draw_beta_sigma, draw_delta};
use crate::gibbs::ffbs::{draw_states_ffbs, filter_state};
use crate::gibbs::logit::draw_gamma_pg;
use crate::gibbs::model::{GibbsState, Model};
use crate::gibbs::permutation::permutation_step;
use crate::gibbs::transition::TransitionModel;
use crate::model::McmcSettings;

/// One retained sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorDraw {
    pub beta: Vec<f64>,
    pub sigma_sq: Vec<f64>,
    pub delta: Vec<bool>,
    pub transition: TransitionModel,
    pub states: Vec<u8>,
    pub initial_state: u8,
    /// `P(S_T = · | y_1..y_T)` at this draw's parameters.
    pub terminal_filtered: Vec<f64>,
    pub log_likelihood: f64,
}

/// Retained draws plus running sums of the per-draw filtered state
/// probabilities and transition matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSample {
    pub states: usize,
    pub regime_names: Vec<String>,
    pub dates: Vec<YearMonth>,
    pub draws: Vec<PosteriorDraw>,
    /// Row-major `T × K`.
    pub filtered_sum: Vec<f64>,
    /// Row-major `T × K × K`.
    pub transition_sum: Vec<f64>,
}

impl PosteriorSample {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// Writes one row per draw: coefficients, variances, indicators, identified
    /// logit coefficients, `S_0`, terminal filtered probabilities and log-likelihood.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        let Some(first) = self.draws.first() else {
            return Ok(());
        };
        let gamma = first.transition.gamma();
        let mut header = vec!["draw".to_string()];
        header.extend((1..=first.beta.len()).map(|i| format!("beta_{i}")));
        header.extend((1..=self.states).map(|k| format!("sigma_sq_{k}")));
        header.extend((1..=first.delta.len()).map(|i| format!("delta_{i}")));
        for (j, g) in gamma.iter().enumerate() {
            header.extend((0..g.len()).map(|d| format!("gamma_{}_{d}", j + 1)));
        }
        header.push("initial_state".into());
        header.extend((1..=self.states).map(|k| format!("filtered_last_{k}")));
        header.push("log_likelihood".into());
        w.write_record(&header).map_err(|e| Error::csv(path, e))?;
        for (i, d) in self.draws.iter().enumerate() {
            let mut row = vec![i.to_string()];
            row.extend(d.beta.iter().map(f64::to_string));
            row.extend(d.sigma_sq.iter().map(f64::to_string));
            row.extend(d.delta.iter().map(|&b| u8::from(b).to_string()));
            for g in d.transition.gamma() {
                row.extend(g.iter().map(f64::to_string));
            }
            row.push((d.initial_state + 1).to_string());
            row.extend(d.terminal_filtered.iter().map(f64::to_string));
            row.push(d.log_likelihood.to_string());
            w.write_record(&row).map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Writes the sampled state paths, one row per draw, labels starting at 1.
    pub fn write_state_paths(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        let header: Vec<String> = std::iter::once("draw".to_string())
            .chain(self.dates.iter().map(|d| d.to_string()))
            .collect();
        writeln!(out, "{}", header.join(",")).map_err(|e| Error::io(path, e))?;
        for (i, d) in self.draws.iter().enumerate() {
            let row: Vec<String> = d.states.iter().map(|s| (s + 1).to_string()).collect();
            writeln!(out, "{i},{}", row.join(",")).map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }
}

/// A single Gibbs chain.
#[derive(Debug, Clone)]
pub struct Sampler<'m> {
    model: &'m Model,
    state: GibbsState,
}

impl<'m> Sampler<'m> {
    pub fn new<R: Rng + ?Sized>(model: &'m Model, rng: &mut R) -> Self {
        Self {
            model,
            state: GibbsState::initial(model, rng),
        }
    }

    pub fn with_state(model: &'m Model, state: GibbsState) -> Result<Self> {
        state.validate(model)?;
        Ok(Self { model, state })
    }

    pub fn state(&self) -> &GibbsState {
        &self.state
    }

    pub fn into_state(self) -> GibbsState {
        self.state
    }

    /// Coefficients and variances, indicators, states, logit coefficients, then relabeling.
    pub fn sweep<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let model = self.model;
        let s = &mut self.state;
        let (beta, sigma_sq) = draw_beta_sigma(model, &s.states, &s.delta, &s.sigma_sq, rng)?;
        s.beta = beta;
        s.sigma_sq = sigma_sq;
        s.delta = draw_delta(&s.beta, model.prior(), rng);
        let (s0, states, filter) = draw_states_ffbs(model, s, rng)?;
        if !filter.log_likelihood.is_finite() {
            return Err(Error::Numerical("non-finite log-likelihood".into()));
        }
        s.initial_state = s0;
        s.states = states;
        let (tm, psi) = draw_gamma_pg(model, s, rng)?;
        s.transition = tm;
        s.psi = psi;
        permutation_step(model, s, rng);
        Ok(())
    }
}

fn dump(state: &GibbsState) -> String {
    format!(
        "sigma_sq = {:?}, beta = {:?}, gamma = {:?}",
        state.sigma_sq,
        state.beta,
        state.transition.gamma()
    )
}

/// Runs the chain and keeps every `thin`-th sweep after burn-in.
pub fn run_mcmc<R: Rng + ?Sized>(model: &Model, mcmc: &McmcSettings, rng: &mut R) -> Result<PosteriorSample> {
    mcmc.validate()?;
    let k = model.states();
    let t_len = model.len();
    let mut sampler = Sampler::new(model, rng);
    let mut sample = PosteriorSample {
        states: k,
        regime_names: model.regimes().iter().map(|r| r.name.clone()).collect(),
        dates: model.dates().to_vec(),
        draws: Vec::with_capacity(mcmc.retained_draws()),
        filtered_sum: vec![0.0; t_len * k],
        transition_sum: vec![0.0; t_len * k * k],
    };
    for iter in 0..mcmc.iterations {
        if let Err(e) = sampler.sweep(rng) {
            return Err(Error::Numerical(format!(
                "sweep {}: {e}; {}",
                iter + 1,
                dump(sampler.state())
            )));
        }
        if !mcmc.retains(iter) {
            continue;
        }
        let state = sampler.state();
        let filter = filter_state(model, state).map_err(|e| {
            Error::Numerical(format!("sweep {}: {e}; {}", iter + 1, dump(state)))
        })?;
        if !filter.log_likelihood.is_finite() {
            return Err(Error::Numerical(format!(
                "sweep {}: non-finite log-likelihood; {}",
                iter + 1,
                dump(state)
            )));
        }
        for (acc, lf) in sample.filtered_sum.iter_mut().zip(&filter.log_filtered[k..]) {
            *acc += lf.exp();
        }
        let lt = model.log_transition_matrices(&state.transition);
        for (acc, l) in sample.transition_sum.iter_mut().zip(&lt) {
            *acc += l.exp();
        }
        sample.draws.push(PosteriorDraw {
            beta: state.beta.clone(),
            sigma_sq: state.sigma_sq.clone(),
            delta: state.delta.clone(),
            transition: state.transition.clone(),
            states: state.states.iter().map(|&s| s as u8).collect(),
            initial_state: state.initial_state as u8,
            terminal_filtered: filter.terminal(),
            log_likelihood: filter.log_likelihood,
        });
    }
    Ok(sample)
}

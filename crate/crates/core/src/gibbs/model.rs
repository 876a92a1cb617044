use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::calendar::YearMonth;
use crate::data::FundamentalsPanel;
use crate::distributions::{bernoulli, sample_inverse_gamma};
use crate::error::{Error, Result};
use crate::gibbs::transition::TransitionModel;
use crate::model::{block_offsets, ModelConfig, PriorSpec, RegimeSpec, TransitionMode, VarianceMode};
use crate::numeric::{ln_normal_pdf, sample_variance};

/// Sampler switches that are not part of the prior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerOptions {
    pub transition: TransitionMode,
    pub variance: VarianceMode,
    /// Random relabeling after every sweep; only valid for identical regimes.
    pub permute: bool,
}

/// Data, regimes and prior of one Markov-switching regression.
#[derive(Debug, Clone)]
pub struct Model {
    y: Vec<f64>,
    /// Per state, row-major `T × M_k` regressor values.
    designs: Vec<Vec<f64>>,
    z: Vec<f64>,
    n_covariates: usize,
    regimes: Vec<RegimeSpec>,
    offsets: Vec<usize>,
    n_coef: usize,
    prior: PriorSpec,
    options: SamplerOptions,
    dates: Vec<YearMonth>,
}

impl Model {
    pub fn new(
        panel: &FundamentalsPanel,
        regimes: Vec<RegimeSpec>,
        prior: PriorSpec,
        options: SamplerOptions,
    ) -> Result<Self> {
        if regimes.is_empty() {
            return Err(Error::Invalid("at least one regime is required".into()));
        }
        if panel.is_empty() {
            return Err(Error::Invalid("empty panel".into()));
        }
        for r in &regimes {
            r.validate(panel.n_predictors())?;
        }
        let (offsets, n_coef) = block_offsets(&regimes);
        prior.validate()?;
        if prior.len() != n_coef {
            return Err(Error::Invalid(format!(
                "prior covers {} coefficients, regimes have {n_coef}",
                prior.len()
            )));
        }
        if options.permute && regimes.windows(2).any(|w| w[0].regressors != w[1].regressors) {
            return Err(Error::Invalid(
                "label permutation requires identical regimes".into(),
            ));
        }
        let t = panel.len();
        let designs = regimes
            .iter()
            .map(|r| {
                let mut d = Vec::with_capacity(t * r.len());
                for row in 0..t {
                    d.extend(r.row_values(panel.predictor_row(row)));
                }
                d
            })
            .collect();
        let mut z = Vec::with_capacity(t * panel.n_covariates());
        for row in 0..t {
            z.extend_from_slice(panel.z(row));
        }
        let model = Self {
            y: panel.target().to_vec(),
            designs,
            z,
            n_covariates: panel.n_covariates(),
            regimes,
            offsets,
            n_coef,
            prior,
            options,
            dates: panel.dates().to_vec(),
        };
        let min_rows = 10 * n_coef;
        if t < min_rows {
            log::debug!("{t} observations for {n_coef} coefficients (fewer than {min_rows})");
        }
        Ok(model)
    }

    /// Regimes and semiautomatic prior from a grid cell.
    pub fn from_config(panel: &FundamentalsPanel, config: &ModelConfig) -> Result<Self> {
        config.validate()?;
        let regimes = config.resolve_regimes(panel.n_predictors())?;
        let prior = PriorSpec::semiautomatic(panel, &regimes, &config.priors, config.shrinkage)?;
        let options = SamplerOptions {
            transition: config.transition,
            variance: config.variance,
            permute: config.is_unidentified(),
        };
        Self::new(panel, regimes, prior, options)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn states(&self) -> usize {
        self.regimes.len()
    }

    pub fn n_coefficients(&self) -> usize {
        self.n_coef
    }

    pub fn n_covariates(&self) -> usize {
        self.n_covariates
    }

    pub fn regimes(&self) -> &[RegimeSpec] {
        &self.regimes
    }

    pub fn block(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k] + self.regimes[k].len()
    }

    pub fn prior(&self) -> &PriorSpec {
        &self.prior
    }

    pub fn options(&self) -> SamplerOptions {
        self.options
    }

    pub fn target(&self) -> &[f64] {
        &self.y
    }

    pub fn dates(&self) -> &[YearMonth] {
        &self.dates
    }

    /// Replaces the regression target, keeping regressors and covariates.
    pub fn set_target(&mut self, y: Vec<f64>) -> Result<()> {
        if y.len() != self.y.len() {
            return Err(Error::Invalid(format!(
                "target of length {} for a {}-row model",
                y.len(),
                self.y.len()
            )));
        }
        self.y = y;
        Ok(())
    }

    /// Regressor row of state `k` at time `t`.
    pub fn design_row(&self, k: usize, t: usize) -> &[f64] {
        let m = self.regimes[k].len();
        &self.designs[k][t * m..(t + 1) * m]
    }

    /// Logit covariates `z_t`.
    pub fn z(&self, t: usize) -> &[f64] {
        &self.z[t * self.n_covariates..(t + 1) * self.n_covariates]
    }

    /// Conditional mean `x_{k,t}'β_k`.
    pub fn mean(&self, k: usize, t: usize, beta: &[f64]) -> f64 {
        self.design_row(k, t)
            .iter()
            .zip(&beta[self.block(k)])
            .map(|(x, b)| x * b)
            .sum()
    }

    /// Row-major `T × K` log densities `ln N(y_t; x_{k,t}'β_k, σ²_k)`.
    pub fn log_likelihoods(&self, beta: &[f64], sigma_sq: &[f64]) -> Vec<f64> {
        let k = self.states();
        let mut out = Vec::with_capacity(self.len() * k);
        for t in 0..self.len() {
            for s in 0..k {
                out.push(ln_normal_pdf(self.y[t], self.mean(s, t, beta), sigma_sq[s]));
            }
        }
        out
    }

    /// Row-major `T × K × K` log transition matrices; matrix `t` governs `S_{t−1} → S_t`.
    pub fn log_transition_matrices(&self, tm: &TransitionModel) -> Vec<f64> {
        let k = self.states();
        let mut out = vec![0.0; self.len() * k * k];
        for t in 0..self.len() {
            tm.log_matrix(self.z(t), &mut out[t * k * k..(t + 1) * k * k]);
        }
        out
    }

    /// Complete-data log-likelihood of `y` and the state path.
    pub fn complete_data_log_likelihood(&self, state: &GibbsState) -> f64 {
        let k = self.states();
        let mut ll = -(k as f64).ln();
        let mut prev = state.initial_state;
        let mut row = vec![0.0; k];
        for t in 0..self.len() {
            let s = state.states[t];
            state.transition.log_transition_probs(self.z(t), prev, &mut row);
            ll += row[s];
            ll += ln_normal_pdf(self.y[t], self.mean(s, t, &state.beta), state.sigma_sq[s]);
            prev = s;
        }
        ll
    }

    /// Simulates a target series given parameters and the state path.
    pub fn simulate_target<R: Rng + ?Sized>(&self, state: &GibbsState, rng: &mut R) -> Vec<f64> {
        (0..self.len())
            .map(|t| {
                let s = state.states[t];
                let e: f64 = rng.sample(StandardNormal);
                self.mean(s, t, &state.beta) + state.sigma_sq[s].sqrt() * e
            })
            .collect()
    }

    /// Simulates a state path from the Markov chain with uniform `S_0`.
    pub fn simulate_states<R: Rng + ?Sized>(&self, tm: &TransitionModel, rng: &mut R) -> (usize, Vec<usize>) {
        let k = self.states();
        let s0 = rng.random_range(0..k);
        let mut prev = s0;
        let mut path = Vec::with_capacity(self.len());
        for t in 0..self.len() {
            let p = tm.transition_probs(self.z(t), prev);
            let s = sample_categorical(&p, rng);
            path.push(s);
            prev = s;
        }
        (s0, path)
    }
}

/// Index drawn with probabilities proportional to `weights`.
pub fn sample_categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}

/// Current values of every unknown in the sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsState {
    pub beta: Vec<f64>,
    /// One entry per state; all equal under a common variance.
    pub sigma_sq: Vec<f64>,
    pub delta: Vec<bool>,
    /// `S_1, …, S_T` as zero-based labels.
    pub states: Vec<usize>,
    /// Pre-sample state `S_0`.
    pub initial_state: usize,
    pub transition: TransitionModel,
    /// Row-major `T × (K − 1)` Pólya-Gamma auxiliaries of the latest logit update.
    pub psi: Vec<f64>,
}

impl GibbsState {
    /// Uniform states, prior-mean coefficients, sample-variance σ², zero logits, all δ = 1.
    pub fn initial<R: Rng + ?Sized>(model: &Model, rng: &mut R) -> Self {
        let k = model.states();
        let t = model.len();
        let var = sample_variance(model.target());
        let var = if var.is_finite() && var > 0.0 { var } else { 1.0 };
        Self {
            beta: model.prior().prior_mean.clone(),
            sigma_sq: vec![var; k],
            delta: vec![true; model.n_coefficients()],
            states: (0..t).map(|_| rng.random_range(0..k)).collect(),
            initial_state: rng.random_range(0..k),
            transition: TransitionModel::new(model.options().transition, k, model.n_covariates()),
            psi: vec![0.0; t * (k - 1)],
        }
    }

    /// Independent draw of every unknown from the prior.
    pub fn from_prior<R: Rng + ?Sized>(model: &Model, rng: &mut R) -> Result<Self> {
        let prior = model.prior();
        let k = model.states();
        let delta: Vec<bool> = prior.omega.iter().map(|&w| bernoulli(w, rng)).collect();
        let beta = (0..model.n_coefficients())
            .map(|i| {
                let v = if delta[i] { prior.tau1_sq[i] } else { prior.tau0_sq[i] };
                let e: f64 = rng.sample(StandardNormal);
                prior.prior_mean[i] + v.sqrt() * e
            })
            .collect();
        let sigma_sq = match model.options().variance {
            VarianceMode::StateSpecific => (0..k)
                .map(|_| sample_inverse_gamma(prior.a0, prior.a_scale, rng))
                .collect::<Result<Vec<_>>>()?,
            VarianceMode::Common => vec![sample_inverse_gamma(prior.a0, prior.a_scale, rng)?; k],
        };
        let mut transition = TransitionModel::new(model.options().transition, k, model.n_covariates());
        let cov = transition.covariate_block();
        for j in 0..k.saturating_sub(1) {
            let g: Vec<f64> = (0..transition.dim())
                .map(|d| {
                    if transition.mode() == TransitionMode::Fixed && cov.contains(&d) {
                        0.0
                    } else {
                        prior.zeta.sqrt() * rng.sample::<f64, _>(StandardNormal)
                    }
                })
                .collect();
            transition.set_gamma(j, &g)?;
        }
        let (initial_state, states) = model.simulate_states(&transition, rng);
        Ok(Self {
            beta,
            sigma_sq,
            delta,
            psi: vec![0.0; model.len() * (k - 1)],
            states,
            initial_state,
            transition,
        })
    }

    /// Checks shapes and ranges against `model`.
    pub fn validate(&self, model: &Model) -> Result<()> {
        let k = model.states();
        if self.beta.len() != model.n_coefficients()
            || self.delta.len() != model.n_coefficients()
            || self.sigma_sq.len() != k
            || self.states.len() != model.len()
        {
            return Err(Error::Invalid("Gibbs state does not match the model".into()));
        }
        if self.states.iter().any(|&s| s >= k) || self.initial_state >= k {
            return Err(Error::Invalid("state label out of range".into()));
        }
        if self.sigma_sq.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::Numerical(format!("invalid variances {:?}", self.sigma_sq)));
        }
        Ok(())
    }
}

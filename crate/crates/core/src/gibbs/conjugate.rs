use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::distributions::{bernoulli, sample_inverse_gamma, sample_mvn_precision};
use crate::error::{Error, Result};
use crate::gibbs::model::Model;
use crate::model::{PriorSpec, VarianceMode};
use crate::numeric::ln_normal_pdf;

/// Gaussian full conditional of one state's coefficient block in precision form.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPosterior {
    pub precision: DMatrix<f64>,
    pub linear: DVector<f64>,
}

impl BlockPosterior {
    pub fn mean(&self) -> Result<DVector<f64>> {
        self.precision
            .clone()
            .cholesky()
            .map(|c| c.solve(&self.linear))
            .ok_or_else(|| Error::Numerical("block posterior precision is not positive definite".into()))
    }
}

/// Full conditionals of every coefficient block given the states, δ and σ².
///
/// The prior of coefficient `i` is `N(β̱_i, τ²_{i,δ_i})`; observations with
/// `S_t = k` enter block `k` with weight `1/σ²_k`.
pub fn beta_posteriors(
    model: &Model,
    states: &[usize],
    delta: &[bool],
    sigma_sq: &[f64],
) -> Vec<BlockPosterior> {
    let prior = model.prior();
    let mut posts: Vec<BlockPosterior> = (0..model.states())
        .map(|k| {
            let block = model.block(k);
            let m = block.len();
            let mut precision = DMatrix::zeros(m, m);
            let mut linear = DVector::zeros(m);
            for (local, i) in block.enumerate() {
                let v = if delta[i] { prior.tau1_sq[i] } else { prior.tau0_sq[i] };
                precision[(local, local)] = 1.0 / v;
                linear[local] = prior.prior_mean[i] / v;
            }
            BlockPosterior { precision, linear }
        })
        .collect();
    let y = model.target();
    for (t, &k) in states.iter().enumerate() {
        let x = model.design_row(k, t);
        let w = 1.0 / sigma_sq[k];
        let post = &mut posts[k];
        let m = x.len();
        for i in 0..m {
            let xi = x[i] * w;
            post.linear[i] += xi * y[t];
            for j in 0..=i {
                post.precision[(i, j)] += xi * x[j];
            }
        }
    }
    for post in &mut posts {
        post.precision.fill_upper_triangle_with_lower_triangle();
    }
    posts
}

/// Sum of squared residuals and observation count per state.
pub fn residual_sums(model: &Model, states: &[usize], beta: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let k = model.states();
    let mut ssr = vec![0.0; k];
    let mut count = vec![0usize; k];
    let y = model.target();
    for (t, &s) in states.iter().enumerate() {
        let r = y[t] - model.mean(s, t, beta);
        ssr[s] += r * r;
        count[s] += 1;
    }
    (ssr, count)
}

/// Draws β block by block given `sigma_sq`, then σ² given the new β.
///
/// States never visited draw both from the prior. In common-variance mode all
/// residuals feed one inverse-Gamma draw.
pub fn draw_beta_sigma<R: Rng + ?Sized>(
    model: &Model,
    states: &[usize],
    delta: &[bool],
    sigma_sq: &[f64],
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut beta = vec![0.0; model.n_coefficients()];
    for (k, post) in beta_posteriors(model, states, delta, sigma_sq).iter().enumerate() {
        let (draw, _) = sample_mvn_precision(&post.precision, &post.linear, rng)
            .map_err(|e| Error::Numerical(format!("coefficients of state {}: {e}", k + 1)))?;
        beta[model.block(k)].copy_from_slice(draw.as_slice());
    }
    let prior = model.prior();
    let (ssr, count) = residual_sums(model, states, &beta);
    let sigma_sq = match model.options().variance {
        VarianceMode::StateSpecific => (0..model.states())
            .map(|k| {
                sample_inverse_gamma(
                    prior.a0 + 0.5 * count[k] as f64,
                    prior.a_scale + 0.5 * ssr[k],
                    rng,
                )
            })
            .collect::<Result<Vec<_>>>()?,
        VarianceMode::Common => {
            let n: usize = count.iter().sum();
            let s: f64 = ssr.iter().sum();
            let v = sample_inverse_gamma(prior.a0 + 0.5 * n as f64, prior.a_scale + 0.5 * s, rng)?;
            vec![v; model.states()]
        }
    };
    Ok((beta, sigma_sq))
}

/// `P(δ_i = 1 | β_i)` under the spike-and-slab prior.
pub fn inclusion_probability(beta: f64, mean: f64, tau0_sq: f64, tau1_sq: f64, omega: f64) -> f64 {
    if omega >= 1.0 {
        return 1.0;
    }
    if omega <= 0.0 {
        return 0.0;
    }
    let log_odds = omega.ln() - (1.0 - omega).ln() + ln_normal_pdf(beta, mean, tau1_sq)
        - ln_normal_pdf(beta, mean, tau0_sq);
    1.0 / (1.0 + (-log_odds).exp())
}

/// Independent Bernoulli draws of the inclusion indicators.
pub fn draw_delta<R: Rng + ?Sized>(beta: &[f64], prior: &PriorSpec, rng: &mut R) -> Vec<bool> {
    beta.iter()
        .enumerate()
        .map(|(i, &b)| {
            let p = inclusion_probability(
                b,
                prior.prior_mean[i],
                prior.tau0_sq[i],
                prior.tau1_sq[i],
                prior.omega[i],
            );
            bernoulli(p, rng)
        })
        .collect()
}

//! Regimes driven by a simulated policy rate crossing a threshold.
//!
//! The economy sits in the first regime while the rate is above zero, up to a
//! little noise in the threshold, so the probability of moving from the
//! second regime into the first rises with the rate.

use fxregime::distributions::RngStream;
use fxregime::gibbs::{run_mcmc, state_probability_summary, Model, SamplerOptions};
use fxregime::model::{McmcSettings, PriorSettings, PriorSpec, Shrinkage, TransitionMode, VarianceMode};
use fxregime::synthetic::{simulate_regressors, RegressorDesign};
use rand_distr::{Distribution, StandardNormal};

use crate::common::{correlation, simple_regime};
use crate::Verdict;

const REPLICATIONS: usize = 20;
const ROWS: usize = 240;
const MCMC: McmcSettings = McmcSettings {
    iterations: 2_000,
    burn_in: 1_000,
    thin: 1,
};
// Each regime loads on its own predictor, which pins down the labels.
const BETA: [[f64; 2]; 2] = [[1.0, 1.0], [-1.0, 1.0]];
const SIGMA_SQ: f64 = 0.3;
const THRESHOLD_NOISE: f64 = 0.2;

/// Correlation between the posterior-mean `p_{2→1,t}` and the rate.
fn replication(r: usize) -> f64 {
    let mut rng = RngStream::derive(10, &["sign", &r.to_string()]);
    let mut design = RegressorDesign::new(ROWS, 2, 1);
    design.covariate_ar = 0.95;
    let regressors = simulate_regressors(&design, &mut rng).unwrap();
    let regimes = vec![simple_regime("high-rate", 0), simple_regime("low-rate", 1)];
    let target: Vec<f64> = (0..ROWS)
        .map(|t| {
            let shock: f64 = StandardNormal.sample(&mut rng);
            let s = if regressors.z(t)[0] + THRESHOLD_NOISE * shock > 0.0 { 0 } else { 1 };
            let e: f64 = StandardNormal.sample(&mut rng);
            regimes[s].linear_predictor(regressors.predictor_row(t), &BETA[s]) + SIGMA_SQ.sqrt() * e
        })
        .collect();
    let panel = regressors.with_target(target).unwrap();
    let prior = PriorSpec::semiautomatic(&panel, &regimes, &PriorSettings::default(), Shrinkage::Ssvs).unwrap();
    let options = SamplerOptions {
        transition: TransitionMode::Tvp,
        variance: VarianceMode::StateSpecific,
        permute: false,
    };
    let model = Model::new(&panel, regimes, prior, options).unwrap();
    let sample = run_mcmc(&model, &MCMC, &mut rng).unwrap();
    let summary = state_probability_summary(&sample).unwrap();
    let p: Vec<f64> = (0..ROWS).map(|t| summary.transition(t, 1, 0)).collect();
    let z: Vec<f64> = (0..ROWS).map(|t| panel.z(t)[0]).collect();
    correlation(&p, &z)
}

pub fn run() -> Verdict {
    let corr: Vec<f64> = (0..REPLICATIONS).map(replication).collect();
    let right = corr.iter().filter(|&&c| c > 0.0).count();
    let shown: Vec<String> = corr.iter().map(|c| format!("{c:.2}")).collect();
    Verdict::new(
        right >= 18,
        format!("positive in {right}/{REPLICATIONS} replications (need 18); correlations {}", shown.join(" ")),
    )
}

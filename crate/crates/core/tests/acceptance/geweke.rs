//! Geweke's joint-distribution test on a small identified model.
//!
//! Marginal-conditional draws take every unknown from the prior. The
//! successive-conditional chain alternates one Gibbs sweep with a fresh draw
//! of the data given the current unknowns. Both target the prior, so the
//! means of any function of the unknowns must agree.

use fxregime::distributions::RngStream;
use fxregime::gibbs::{GibbsState, Model, Sampler, SamplerOptions};
use fxregime::model::{PriorSpec, TransitionMode, VarianceMode};
use fxregime::synthetic::{simulate_regressors, RegressorDesign};

use crate::common::{batch_mean_variance, mean, simple_regime, variance};
use crate::Verdict;

const ROWS: usize = 40;
const PRIOR_DRAWS: usize = 100_000;
const CHAIN: usize = 300_000;
const BATCHES: usize = 100;

fn model() -> Model {
    let mut rng = RngStream::derive(3, &["geweke", "regressors"]);
    let panel = simulate_regressors(&RegressorDesign::new(ROWS, 2, 2), &mut rng).unwrap();
    let regimes = vec![simple_regime("a", 0), simple_regime("b", 1)];
    let prior = PriorSpec {
        prior_mean: vec![0.2, -0.3, 0.1, 0.4],
        tau0_sq: vec![0.05; 4],
        tau1_sq: vec![1.0; 4],
        omega: vec![0.5; 4],
        a0: 6.0,
        a_scale: 5.0,
        zeta: 1.0,
    };
    let options = SamplerOptions {
        transition: TransitionMode::Tvp,
        variance: VarianceMode::StateSpecific,
        permute: false,
    };
    Model::new(&panel, regimes, prior, options).unwrap()
}

/// First and second moments of β, σ² and the identified logit coefficients.
fn statistics(state: &GibbsState) -> Vec<f64> {
    let mut base = state.beta.clone();
    base.extend_from_slice(&state.sigma_sq);
    base.extend(state.transition.gamma().concat());
    let squares: Vec<f64> = base.iter().map(|v| v * v).collect();
    base.extend(squares);
    base
}

fn names() -> Vec<String> {
    let base = ["b1", "b2", "b3", "b4", "s1", "s2", "g0", "g1", "g2", "g3"];
    let mut out: Vec<String> = base.iter().map(|s| s.to_string()).collect();
    out.extend(base.iter().map(|s| format!("{s}^2")));
    out
}

fn columns(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..rows[0].len()).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

pub fn run() -> Verdict {
    let mut model = model();
    let mut rng = RngStream::derive(3, &["geweke", "prior"]);
    let prior_rows: Vec<Vec<f64>> = (0..PRIOR_DRAWS)
        .map(|_| statistics(&GibbsState::from_prior(&model, &mut rng).unwrap()))
        .collect();

    let mut rng = RngStream::derive(3, &["geweke", "chain"]);
    let mut state = GibbsState::from_prior(&model, &mut rng).unwrap();
    let mut chain_rows = Vec::with_capacity(CHAIN);
    for _ in 0..CHAIN {
        let y = model.simulate_target(&state, &mut rng);
        model.set_target(y).unwrap();
        let mut sampler = Sampler::with_state(&model, state).unwrap();
        sampler.sweep(&mut rng).unwrap();
        state = sampler.into_state();
        chain_rows.push(statistics(&state));
    }

    let prior_cols = columns(&prior_rows);
    let chain_cols = columns(&chain_rows);
    let mut worst = (0.0f64, String::new());
    let mut bad = Vec::new();
    for ((name, p), c) in names().into_iter().zip(&prior_cols).zip(&chain_cols) {
        let se = (variance(p) / p.len() as f64 + batch_mean_variance(c, BATCHES)).sqrt();
        let z = (mean(p) - mean(c)) / se;
        if z.abs() > worst.0 {
            worst = (z.abs(), name.clone());
        }
        if z.abs() >= 4.0 {
            bad.push(format!("{name}: z={z:+.2}"));
        }
    }
    let detail = format!(
        "{} statistics, largest |z| = {:.2} ({}), tolerance 4{}",
        prior_cols.len(),
        worst.0,
        worst.1,
        if bad.is_empty() { String::new() } else { format!("; {}", bad.join(", ")) }
    );
    Verdict::new(bad.is_empty() && prior_cols.len() == 20, detail)
}

//! Simulated data for tests, examples and smoke runs.
//!
//! Regressors follow stationary Gaussian AR(1) processes with unit marginal
//! variance; targets are drawn from a Markov-switching regression with a
//! given transition law.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::calendar::YearMonth;
use crate::data::{CountrySeries, FundamentalsPanel, PREDICTOR_NAMES};
use crate::error::{Error, Result};
use crate::gibbs::{sample_categorical, TransitionModel};
use crate::model::RegimeSpec;

/// Shape of a simulated regressor panel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressorDesign {
    pub rows: usize,
    pub n_predictors: usize,
    pub n_covariates: usize,
    pub start: YearMonth,
    pub predictor_ar: f64,
    pub covariate_ar: f64,
}

impl RegressorDesign {
    pub fn new(rows: usize, n_predictors: usize, n_covariates: usize) -> Self {
        Self {
            rows,
            n_predictors,
            n_covariates,
            start: YearMonth::new(1990, 1).expect("valid month"),
            predictor_ar: 0.5,
            covariate_ar: 0.9,
        }
    }
}

fn ar1_path<R: Rng + ?Sized>(len: usize, phi: f64, rng: &mut R) -> Vec<f64> {
    let scale = (1.0 - phi * phi).sqrt();
    let mut x: f64 = rng.sample(StandardNormal);
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(x);
        let e: f64 = rng.sample(StandardNormal);
        x = phi * x + scale * e;
    }
    out
}

/// Interleaves per-column paths of length `rows + 1` into the lagged rows
/// `0..rows` and the following rows `1..=rows`.
fn lagged_and_next(paths: &[Vec<f64>], rows: usize) -> (Vec<f64>, Vec<f64>) {
    let mut lagged = Vec::with_capacity(rows * paths.len());
    let mut next = Vec::with_capacity(rows * paths.len());
    for t in 0..rows {
        for p in paths {
            lagged.push(p[t]);
            next.push(p[t + 1]);
        }
    }
    (lagged, next)
}

/// Panel of AR(1) regressors and covariates with a zero target.
pub fn simulate_regressors<R: Rng + ?Sized>(design: &RegressorDesign, rng: &mut R) -> Result<FundamentalsPanel> {
    if design.rows == 0 {
        return Err(Error::Invalid("simulated panel needs at least one row".into()));
    }
    let rows = design.rows;
    let names: Vec<String> = if design.n_predictors == PREDICTOR_NAMES.len() {
        PREDICTOR_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        (1..=design.n_predictors).map(|i| format!("x{i}")).collect()
    };
    let x: Vec<Vec<f64>> = (0..design.n_predictors)
        .map(|_| ar1_path(rows + 1, design.predictor_ar, rng))
        .collect();
    let z: Vec<Vec<f64>> = (0..design.n_covariates)
        .map(|_| ar1_path(rows + 1, design.covariate_ar, rng))
        .collect();
    let (predictors, current) = lagged_and_next(&x, rows);
    let (z_raw, z_next) = lagged_and_next(&z, rows);
    let dates = (0..rows as i64).map(|k| design.start.add_months(k)).collect();
    FundamentalsPanel::from_parts(
        names,
        dates,
        vec![0.0; rows],
        predictors,
        current,
        design.n_covariates,
        z_raw,
        z_next,
    )
}

/// Parameters of a data-generating Markov-switching regression.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingTruth {
    pub regimes: Vec<RegimeSpec>,
    /// Stacked coefficients in regime order.
    pub beta: Vec<f64>,
    pub sigma_sq: Vec<f64>,
    pub transition: TransitionModel,
}

/// A simulated panel together with the state path that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedSwitching {
    pub panel: FundamentalsPanel,
    pub initial_state: usize,
    pub states: Vec<usize>,
}

/// Draws `S_0` uniformly, the path from the transition law evaluated at the
/// panel's demeaned covariates, then the target.
pub fn simulate_switching<R: Rng + ?Sized>(
    regressors: &FundamentalsPanel,
    truth: &SwitchingTruth,
    rng: &mut R,
) -> Result<SimulatedSwitching> {
    let k = truth.regimes.len();
    if truth.sigma_sq.len() != k || truth.transition.states() != k {
        return Err(Error::Invalid("truth has inconsistent state counts".into()));
    }
    let mut offsets = Vec::with_capacity(k);
    let mut m = 0;
    for r in &truth.regimes {
        r.validate(regressors.n_predictors())?;
        offsets.push(m);
        m += r.len();
    }
    if truth.beta.len() != m {
        return Err(Error::Invalid(format!("{} coefficients for {m} slots", truth.beta.len())));
    }
    let s0 = rng.random_range(0..k);
    let mut prev = s0;
    let mut states = Vec::with_capacity(regressors.len());
    let mut target = Vec::with_capacity(regressors.len());
    for t in 0..regressors.len() {
        let p = truth.transition.transition_probs(regressors.z(t), prev);
        let s = sample_categorical(&p, rng);
        let r = &truth.regimes[s];
        let mean = r.linear_predictor(regressors.predictor_row(t), &truth.beta[offsets[s]..offsets[s] + r.len()]);
        let e: f64 = rng.sample(StandardNormal);
        target.push(mean + truth.sigma_sq[s].sqrt() * e);
        states.push(s);
        prev = s;
    }
    Ok(SimulatedSwitching {
        panel: regressors.with_target(target)?,
        initial_state: s0,
        states,
    })
}

/// Random-walk-like raw series for one country: log levels drift with small
/// Gaussian steps, interest rates follow a bounded AR(1) in percent.
pub fn simulate_country<R: Rng + ?Sized>(months: usize, with_exchange_rate: bool, rng: &mut R) -> CountrySeries {
    let level = |start: f64, drift: f64, sd: f64, rng: &mut R| {
        let mut x = start.ln();
        (0..months)
            .map(|_| {
                let e: f64 = rng.sample(StandardNormal);
                x += drift + sd * e;
                x.exp()
            })
            .collect::<Vec<f64>>()
    };
    let exchange_rate = with_exchange_rate.then(|| level(1.3, 0.0, 0.02, rng));
    let industrial_production = level(100.0, 0.002, 0.01, rng);
    let money = level(500.0, 0.004, 0.005, rng);
    let cpi = level(100.0, 0.002, 0.002, rng);
    let mut r = 4.0;
    let interest_rate = (0..months)
        .map(|_| {
            let e: f64 = rng.sample(StandardNormal);
            r = (4.0 + 0.97 * (r - 4.0) + 0.15 * e).max(0.05);
            r
        })
        .collect();
    CountrySeries {
        exchange_rate,
        industrial_production,
        money,
        interest_rate,
        cpi,
    }
}

/// Writes one country's series with the standard column names.
pub fn write_country_csv(path: &Path, prefix: &str, start: YearMonth, series: &CountrySeries) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let mut header = vec!["date".to_string()];
    if series.exchange_rate.is_some() {
        header.push(format!("{prefix}EXR"));
    }
    for name in ["IP", "M", "IR3M", "CPI"] {
        header.push(format!("{prefix}{name}"));
    }
    writeln!(out, "{}", header.join(",")).map_err(|e| Error::io(path, e))?;
    for t in 0..series.cpi.len() {
        let mut row = vec![start.add_months(t as i64).to_string()];
        if let Some(exr) = &series.exchange_rate {
            row.push(exr[t].to_string());
        }
        row.push(series.industrial_production[t].to_string());
        row.push(series.money[t].to_string());
        row.push(series.interest_rate[t].to_string());
        row.push(series.cpi[t].to_string());
        writeln!(out, "{}", row.join(",")).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

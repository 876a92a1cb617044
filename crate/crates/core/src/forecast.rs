//! Recursive pseudo out-of-sample forecasts and the random-walk benchmark.
//!
//! At each origin the model is re-estimated on the expanding window that ends
//! there. For horizons beyond one month the fundamentals and the transition
//! covariates are frozen at their last observed values and only the Markov
//! state is propagated, so the forecast target is the one-month return `h`
//! months ahead. Densities are scored as Gaussian mixtures: per posterior draw
//! the state distribution at the target month mixes the regime densities, and
//! the draws are averaged with equal weights.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::calendar::YearMonth;
use crate::data::FundamentalsPanel;
use crate::distributions::RngStream;
use crate::error::{Error, Result};
use crate::gibbs::{run_mcmc, sample_categorical, Model, PosteriorSample};
use crate::model::{block_offsets, ModelConfig, RegimeSpec};
use crate::numeric::{ln_normal_pdf, log_sum_exp, median, sample_variance, symmetric_log_sum_exp, symmetric_sum};

/// Densities are floored here before taking logs.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// Model id of the driftless random walk.
pub const RANDOM_WALK_ID: &str = "random-walk";

/// Returns needed before the random walk variance is trusted.
pub const MIN_RW_RETURNS: usize = 24;

fn floor_log(v: f64) -> f64 {
    let floor = DENSITY_FLOOR.ln();
    if v.is_nan() || v < floor {
        floor
    } else {
        v
    }
}

/// One forecast of `Δe` at `origin + horizon` made at `origin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRecord {
    pub model_id: String,
    pub origin: YearMonth,
    pub horizon: usize,
    /// Median of the predictive draws.
    pub point: f64,
    pub realized: f64,
    /// Log predictive density at the realized value, floored.
    pub log_score: f64,
    pub sq_error: f64,
    /// Predictive draws; empty for the random walk and for records read
    /// back from the summary CSV.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub draws: Vec<f64>,
}

impl ForecastRecord {
    fn new(model_id: &str, origin: YearMonth, horizon: usize, point: f64, realized: f64, log_score: f64, draws: Vec<f64>) -> Self {
        let e = realized - point;
        Self {
            model_id: model_id.to_string(),
            origin,
            horizon,
            point,
            realized,
            log_score,
            sq_error: e * e,
            draws,
        }
    }
}

/// Per-draw Gaussian mixtures over the states at the target month.
///
/// All arrays are row-major `D × K`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveMixture {
    pub states: usize,
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

impl PredictiveMixture {
    pub fn len(&self) -> usize {
        self.weights.len() / self.states
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `ln Σ_s w_ds φ(y; μ_ds, σ²_ds)` for every draw `d`. The inner sum does not
    /// depend on the order of the states.
    pub fn log_densities(&self, y: f64) -> Vec<f64> {
        let k = self.states;
        let mut terms = vec![0.0; k];
        (0..self.len())
            .map(|d| {
                for s in 0..k {
                    let i = d * k + s;
                    terms[s] = if self.weights[i] > 0.0 {
                        self.weights[i].ln() + ln_normal_pdf(y, self.means[i], self.variances[i])
                    } else {
                        f64::NEG_INFINITY
                    };
                }
                symmetric_log_sum_exp(&terms)
            })
            .collect()
    }

    /// Log predictive score: the equal-weight average of the per-draw mixtures.
    pub fn log_score(&self, y: f64) -> f64 {
        let ld = self.log_densities(y);
        floor_log(log_sum_exp(&ld) - (ld.len() as f64).ln())
    }

    /// One draw per posterior draw: a state from the draw's weights, then the return.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let k = self.states;
        (0..self.len())
            .map(|d| {
                let r = d * k..(d + 1) * k;
                let s = d * k + sample_categorical(&self.weights[r], rng);
                let e: f64 = rng.sample(StandardNormal);
                self.means[s] + self.variances[s].sqrt() * e
            })
            .collect()
    }
}

/// `ln[(1/D) Σ_d φ(y; μ_d, σ²_d)]` for equally weighted Gaussian components, floored.
pub fn log_predictive_score(means: &[f64], variances: &[f64], realized: f64) -> f64 {
    assert_eq!(means.len(), variances.len(), "component arrays differ in length");
    if means.is_empty() {
        return DENSITY_FLOOR.ln();
    }
    let ld: Vec<f64> = means
        .iter()
        .zip(variances)
        .map(|(&m, &v)| ln_normal_pdf(realized, m, v))
        .collect();
    floor_log(log_sum_exp(&ld) - (ld.len() as f64).ln())
}

/// Builds the `h`-step predictive mixture of every retained draw.
///
/// `x` is the fundamentals row the target month's regression conditions on and
/// `z` the transition covariates; both stay fixed across the `h` steps. The
/// starting state distribution is the draw's filtered probability of the last
/// in-sample month.
pub fn predictive_mixture(
    sample: &PosteriorSample,
    regimes: &[RegimeSpec],
    x: &[f64],
    z: &[f64],
    h: usize,
) -> Result<PredictiveMixture> {
    let k = sample.states;
    if regimes.len() != k {
        return Err(Error::Invalid(format!("{} regimes for a {k}-state sample", regimes.len())));
    }
    if h == 0 {
        return Err(Error::Invalid("forecast horizon must be positive".into()));
    }
    if sample.is_empty() {
        return Err(Error::Invalid("no posterior draws to forecast from".into()));
    }
    let (offsets, _) = block_offsets(regimes);
    let d_len = sample.len();
    let mut out = PredictiveMixture {
        states: k,
        weights: Vec::with_capacity(d_len * k),
        means: Vec::with_capacity(d_len * k),
        variances: Vec::with_capacity(d_len * k),
    };
    let mut next = vec![0.0; k];
    let mut terms = vec![0.0; k];
    for draw in &sample.draws {
        let p = draw.transition.matrix(z);
        let mut w = draw.terminal_filtered.clone();
        for _ in 0..h {
            for (j, n) in next.iter_mut().enumerate() {
                for i in 0..k {
                    terms[i] = w[i] * p[i * k + j];
                }
                *n = symmetric_sum(&terms);
            }
            w.copy_from_slice(&next);
        }
        let total = symmetric_sum(&w);
        out.weights.extend(w.iter().map(|v| v / total));
        for (s, r) in regimes.iter().enumerate() {
            out.means.push(r.linear_predictor(x, &draw.beta[offsets[s]..offsets[s] + r.len()]));
            out.variances.push(draw.sigma_sq[s]);
        }
    }
    Ok(out)
}

/// Predictive mixture at `origin` for a sample estimated on rows `0..=origin`
/// of `panel`, which may be the estimation window itself.
pub fn origin_mixture(
    sample: &PosteriorSample,
    regimes: &[RegimeSpec],
    panel: &FundamentalsPanel,
    origin: usize,
    h: usize,
) -> Result<PredictiveMixture> {
    if origin >= panel.len() {
        return Err(Error::Invalid(format!("origin row {origin} beyond a {}-row panel", panel.len())));
    }
    predictive_mixture(sample, regimes, panel.current_row(origin), &panel.z_next(origin), h)
}

/// One predictive draw per retained posterior draw.
pub fn predictive_draws<R: Rng + ?Sized>(
    sample: &PosteriorSample,
    regimes: &[RegimeSpec],
    panel: &FundamentalsPanel,
    origin: usize,
    h: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(origin_mixture(sample, regimes, panel, origin, h)?.sample(rng))
}

/// Rows at which forecasts are made: from the row of `t0` up to the last row
/// that still leaves the shortest horizon in sample.
pub fn forecast_origins(panel: &FundamentalsPanel, t0: YearMonth, horizons: &[usize]) -> Result<std::ops::Range<usize>> {
    let first = panel
        .row_of(t0)
        .ok_or_else(|| Error::Config(format!("t0 {t0} lies outside the panel")))?;
    let h_min = horizons.iter().copied().min().unwrap_or(0);
    let h_max = horizons.iter().copied().max().unwrap_or(0);
    if h_min == 0 {
        return Err(Error::Config("horizons must be positive".into()));
    }
    if first + h_max >= panel.len() {
        return Err(Error::Config(format!(
            "t0 {t0} leaves fewer than {h_max} months after it"
        )));
    }
    Ok(first..panel.len() - h_min)
}

/// Task stream for one model at one origin.
pub fn origin_stream(seed: u64, model_id: &str, origin: YearMonth) -> RngStream {
    RngStream::derive(seed, &[model_id, &origin.to_string()])
}

/// Re-estimates `config` on rows `0..=origin` and forecasts every horizon
/// whose target month is in the panel.
pub fn forecast_origin(panel: &FundamentalsPanel, config: &ModelConfig, origin: usize, keep_draws: bool) -> Result<Vec<ForecastRecord>> {
    let window = panel.window(origin)?;
    let model = Model::from_config(&window, config)?;
    let model_id = config.model_id();
    let date = panel.dates()[origin];
    let mut rng = origin_stream(config.seed, &model_id, date);
    let sample = run_mcmc(&model, &config.mcmc, &mut rng)
        .map_err(|e| Error::Numerical(format!("{model_id} at {date}: {e}")))?;
    let mut records = Vec::new();
    for &h in &config.horizons {
        if origin + h >= panel.len() {
            continue;
        }
        let mixture = origin_mixture(&sample, model.regimes(), &window, origin, h)?;
        let draws = mixture.sample(&mut rng);
        let realized = panel.target()[origin + h];
        records.push(ForecastRecord::new(
            &model_id,
            date,
            h,
            median(&draws),
            realized,
            mixture.log_score(realized),
            if keep_draws { draws } else { Vec::new() },
        ));
    }
    Ok(records)
}

/// Runs [`forecast_origin`] over every origin in turn, optionally only the first
/// `max_origins`. Records come out ordered by origin, then horizon.
pub fn recursive_forecast(panel: &FundamentalsPanel, config: &ModelConfig, max_origins: Option<usize>) -> Result<Vec<ForecastRecord>> {
    config.validate()?;
    let origins = forecast_origins(panel, config.t0, &config.horizons)?;
    let n = max_origins.unwrap_or(usize::MAX);
    let mut out = Vec::new();
    for o in origins.take(n) {
        out.extend(forecast_origin(panel, config, o, false)?);
    }
    Ok(out)
}

/// Driftless random walk: point forecast zero, density `N(0, σ̂²)` with σ̂² the
/// sample variance of the returns through the origin.
pub fn random_walk_forecast(panel: &FundamentalsPanel, origin: usize, h: usize) -> Result<ForecastRecord> {
    if h == 0 {
        return Err(Error::Invalid("forecast horizon must be positive".into()));
    }
    if origin + h >= panel.len() {
        return Err(Error::Invalid(format!(
            "origin row {origin} plus horizon {h} beyond a {}-row panel",
            panel.len()
        )));
    }
    let history = &panel.target()[..=origin];
    if history.len() < MIN_RW_RETURNS {
        return Err(Error::Invalid(format!(
            "random walk needs {MIN_RW_RETURNS} returns, {} available at {}",
            history.len(),
            panel.dates()[origin]
        )));
    }
    let var = sample_variance(history);
    let constant = history.iter().all(|&v| v == history[0]);
    if constant || !(var > 0.0 && var.is_finite()) {
        return Err(Error::Invalid(format!(
            "returns through {} have zero variance",
            panel.dates()[origin]
        )));
    }
    let realized = panel.target()[origin + h];
    Ok(ForecastRecord::new(
        RANDOM_WALK_ID,
        panel.dates()[origin],
        h,
        0.0,
        realized,
        floor_log(ln_normal_pdf(realized, 0.0, var)),
        Vec::new(),
    ))
}

#[derive(Serialize, Deserialize)]
struct RecordRow {
    origin: YearMonth,
    horizon: usize,
    model_id: String,
    point: f64,
    realized: f64,
    log_score: f64,
}

/// Writes `origin,horizon,model_id,point,realized,log_score`.
pub fn write_records(path: &Path, records: &[ForecastRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    for r in records {
        w.serialize(RecordRow {
            origin: r.origin,
            horizon: r.horizon,
            model_id: r.model_id.clone(),
            point: r.point,
            realized: r.realized,
            log_score: r.log_score,
        })
        .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a file written by [`write_records`]; draws are not restored.
pub fn read_records(path: &Path) -> Result<Vec<ForecastRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    r.deserialize::<RecordRow>()
        .map(|row| {
            let row = row.map_err(|e| Error::csv(path, e))?;
            Ok(ForecastRecord::new(&row.model_id, row.origin, row.horizon, row.point, row.realized, row.log_score, Vec::new()))
        })
        .collect()
}

/// Sidecar of raw predictive draws: `origin,horizon,model_id` then one column per draw.
pub fn write_draws(path: &Path, records: &[ForecastRecord]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    for r in records {
        write!(out, "{},{},{}", r.origin, r.horizon, r.model_id).map_err(|e| Error::io(path, e))?;
        for d in &r.draws {
            write!(out, ",{d}").map_err(|e| Error::io(path, e))?;
        }
        writeln!(out).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

use std::path::Path;

use serde::Serialize;

use crate::calendar::YearMonth;
use crate::error::{Error, Result};
use crate::gibbs::sampler::PosteriorSample;

/// Posterior means of the filtered state probabilities and transition matrices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSummary {
    pub states: usize,
    pub regime_names: Vec<String>,
    pub dates: Vec<YearMonth>,
    /// Row-major `T × K`.
    pub filtered: Vec<f64>,
    /// Row-major `T × K × K`, previous state by next state.
    pub transitions: Vec<f64>,
}

impl StateSummary {
    pub fn filtered_row(&self, t: usize) -> &[f64] {
        &self.filtered[t * self.states..(t + 1) * self.states]
    }

    /// Mean of `p_{from→to,t}` across draws.
    pub fn transition(&self, t: usize, from: usize, to: usize) -> f64 {
        let k = self.states;
        self.transitions[t * k * k + from * k + to]
    }

    /// Tidy layout: `date,state,probability`, states numbered from 1.
    pub fn write_filtered_tidy(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        w.write_record(["date", "state", "regime", "probability"])
            .map_err(|e| Error::csv(path, e))?;
        for (t, date) in self.dates.iter().enumerate() {
            for (k, p) in self.filtered_row(t).iter().enumerate() {
                w.write_record([
                    date.to_string(),
                    (k + 1).to_string(),
                    self.regime_names[k].clone(),
                    p.to_string(),
                ])
                .map_err(|e| Error::csv(path, e))?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Wide layout: one column per state.
    pub fn write_filtered_wide(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        let mut header = vec!["date".to_string()];
        header.extend(self.regime_names.iter().cloned());
        w.write_record(&header).map_err(|e| Error::csv(path, e))?;
        for (t, date) in self.dates.iter().enumerate() {
            let mut row = vec![date.to_string()];
            row.extend(self.filtered_row(t).iter().map(f64::to_string));
            w.write_record(&row).map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Tidy layout: `date,from,to,probability`.
    pub fn write_transitions(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        w.write_record(["date", "from", "to", "probability"])
            .map_err(|e| Error::csv(path, e))?;
        let k = self.states;
        for (t, date) in self.dates.iter().enumerate() {
            for from in 0..k {
                for to in 0..k {
                    w.write_record([
                        date.to_string(),
                        (from + 1).to_string(),
                        (to + 1).to_string(),
                        self.transition(t, from, to).to_string(),
                    ])
                    .map_err(|e| Error::csv(path, e))?;
                }
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Averages the per-draw filtered probabilities and transition matrices.
pub fn state_probability_summary(sample: &PosteriorSample) -> Result<StateSummary> {
    if sample.is_empty() {
        return Err(Error::Invalid("empty posterior sample".into()));
    }
    let n = sample.len() as f64;
    let k = sample.states;
    let mut filtered: Vec<f64> = sample.filtered_sum.iter().map(|s| s / n).collect();
    let mut transitions: Vec<f64> = sample.transition_sum.iter().map(|s| s / n).collect();
    // Renormalize away the rounding of the running sums.
    for row in filtered.chunks_mut(k).chain(transitions.chunks_mut(k)) {
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= total);
    }
    Ok(StateSummary {
        states: k,
        regime_names: sample.regime_names.clone(),
        dates: sample.dates.clone(),
        filtered,
        transitions,
    })
}

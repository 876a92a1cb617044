use serde::{Deserialize, Serialize};

use crate::data::col;
use crate::error::{Error, Result};

/// One regression slot of a regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regressor {
    /// The regime's own intercept.
    Intercept,
    /// A fundamentals column of the panel.
    Predictor(usize),
}

/// The structural models that define theoretical regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructuralModel {
    TaylorRule,
    Monetary,
    Ppp,
    Uip,
}

impl StructuralModel {
    pub const ALL: [StructuralModel; 4] = [
        StructuralModel::TaylorRule,
        StructuralModel::Monetary,
        StructuralModel::Ppp,
        StructuralModel::Uip,
    ];

    pub fn label(self) -> &'static str {
        match self {
            StructuralModel::TaylorRule => "taylor-rule",
            StructuralModel::Monetary => "monetary",
            StructuralModel::Ppp => "ppp",
            StructuralModel::Uip => "uip",
        }
    }

    /// Fundamentals and theory-implied prior means, intercept excluded.
    fn predictors(self) -> &'static [(usize, f64)] {
        match self {
            StructuralModel::TaylorRule => &[
                (col::I_PREV, 0.0),
                (col::I_PREV_F, 0.0),
                (col::PI, 1.5),
                (col::PI_F, -1.5),
                (col::X, 0.5),
                (col::X_F, -0.5),
                (col::Q, 0.0),
            ],
            StructuralModel::Monetary => &[
                (col::M, 1.0),
                (col::M_F, -1.0),
                (col::Y, 1.0),
                (col::Y_F, -1.0),
                (col::E, -1.0),
            ],
            StructuralModel::Ppp => &[(col::E, -1.0), (col::P, 1.0), (col::P_F, -1.0)],
            StructuralModel::Uip => &[(col::I, 1.0), (col::I_F, -1.0)],
        }
    }

    pub fn regime(self) -> RegimeSpec {
        let mut regressors = vec![Regressor::Intercept];
        let mut prior_mean = vec![0.0];
        for &(c, mean) in self.predictors() {
            regressors.push(Regressor::Predictor(c));
            prior_mean.push(mean);
        }
        RegimeSpec {
            name: self.label().to_string(),
            regressors,
            prior_mean,
        }
    }
}

/// Regressors and prior mean of one regime. The intercept always comes first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub name: String,
    pub regressors: Vec<Regressor>,
    pub prior_mean: Vec<f64>,
}

impl RegimeSpec {
    pub fn new(name: impl Into<String>, regressors: Vec<Regressor>, prior_mean: Vec<f64>) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            regressors,
            prior_mean,
        };
        spec.validate(usize::MAX)?;
        Ok(spec)
    }

    /// Coefficient count `M_k`.
    pub fn len(&self) -> usize {
        self.regressors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regressors.is_empty()
    }

    /// Checks distinct regressors, matching prior length and column bounds.
    pub fn validate(&self, n_predictors: usize) -> Result<()> {
        if self.regressors.is_empty() {
            return Err(Error::Invalid(format!("regime `{}` has no regressors", self.name)));
        }
        if self.prior_mean.len() != self.regressors.len() {
            return Err(Error::Invalid(format!(
                "regime `{}`: {} prior means for {} regressors",
                self.name,
                self.prior_mean.len(),
                self.regressors.len()
            )));
        }
        for (i, r) in self.regressors.iter().enumerate() {
            if self.regressors[..i].contains(r) {
                return Err(Error::Invalid(format!(
                    "regime `{}` repeats regressor {r:?}",
                    self.name
                )));
            }
            if let Regressor::Predictor(c) = r {
                if *c >= n_predictors {
                    return Err(Error::Invalid(format!(
                        "regime `{}` references column {c} of a {n_predictors}-column panel",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Regressor values for one row of fundamentals.
    pub fn row_values<'a>(&'a self, predictors: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
        self.regressors.iter().map(move |r| match r {
            Regressor::Intercept => 1.0,
            Regressor::Predictor(c) => predictors[*c],
        })
    }

    /// `x'β_k` for one row of fundamentals.
    pub fn linear_predictor(&self, predictors: &[f64], beta: &[f64]) -> f64 {
        self.regressors
            .iter()
            .zip(beta)
            .map(|(r, b)| match r {
                Regressor::Intercept => *b,
                Regressor::Predictor(c) => predictors[*c] * b,
            })
            .sum()
    }
}

/// Taylor rule, monetary, PPP and UIP regimes with their theory-implied prior means.
pub fn theoretical_regimes() -> Vec<RegimeSpec> {
    StructuralModel::ALL.iter().map(|m| m.regime()).collect()
}

/// `states` identical regimes with every predictor, centered on zero.
pub fn kitchen_sink_regimes(states: usize, n_predictors: usize) -> Result<Vec<RegimeSpec>> {
    if !(2..=4).contains(&states) {
        return Err(Error::Invalid(format!(
            "kitchen-sink models use 2 to 4 states, got {states}"
        )));
    }
    let mut regressors = vec![Regressor::Intercept];
    regressors.extend((0..n_predictors).map(Regressor::Predictor));
    let prior_mean = vec![0.0; regressors.len()];
    Ok((0..states)
        .map(|k| RegimeSpec {
            name: format!("state-{}", k + 1),
            regressors: regressors.clone(),
            prior_mean: prior_mean.clone(),
        })
        .collect())
}

/// Offsets of each regime's block in the stacked coefficient vector, plus the total `M`.
pub fn block_offsets(regimes: &[RegimeSpec]) -> (Vec<usize>, usize) {
    let mut offsets = Vec::with_capacity(regimes.len());
    let mut m = 0;
    for r in regimes {
        offsets.push(m);
        m += r.len();
    }
    (offsets, m)
}

use serde::{Deserialize, Serialize};

use crate::calendar::YearMonth;
use crate::error::{Error, Result};
use crate::model::priors::PriorSettings;
use crate::model::regimes::{kitchen_sink_regimes, theoretical_regimes, RegimeSpec, StructuralModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeFamily {
    /// Four states, one per structural model.
    Theoretical,
    /// `K` identical states carrying every fundamental.
    KitchenSink,
    /// Single-state regression on one structural model.
    Linear(StructuralModel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionMode {
    Tvp,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceMode {
    Common,
    StateSpecific,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shrinkage {
    Ssvs,
    None,
}

/// Model class used to group forecast comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelClass {
    MsTvp,
    MsFt,
    Linear,
}

impl ModelClass {
    pub fn label(self) -> &'static str {
        match self {
            ModelClass::MsTvp => "ms-tvp",
            ModelClass::MsFt => "ms-ft",
            ModelClass::Linear => "linear",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McmcSettings {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
}

impl Default for McmcSettings {
    fn default() -> Self {
        Self {
            iterations: 80_000,
            burn_in: 30_000,
            thin: 10,
        }
    }
}

impl McmcSettings {
    /// Short chains for smoke runs.
    pub const SMOKE: McmcSettings = McmcSettings {
        iterations: 200,
        burn_in: 100,
        thin: 1,
    };

    pub fn validate(&self) -> Result<()> {
        if self.iterations <= self.burn_in {
            return Err(Error::Config(format!(
                "iterations ({}) must exceed burn_in ({})",
                self.iterations, self.burn_in
            )));
        }
        if self.thin == 0 {
            return Err(Error::Config("thin must be at least 1".into()));
        }
        Ok(())
    }

    /// Whether sweep `iter` (zero-based) is kept.
    pub fn retains(&self, iter: usize) -> bool {
        iter >= self.burn_in && (iter + 1 - self.burn_in) % self.thin == 0
    }

    pub fn retained_draws(&self) -> usize {
        (self.iterations - self.burn_in) / self.thin
    }
}

pub fn default_t0() -> YearMonth {
    YearMonth::new(2004, 12).expect("valid month")
}

pub fn default_horizons() -> Vec<usize> {
    vec![1, 3, 12]
}

/// One cell of the model grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub family: RegimeFamily,
    pub states: usize,
    pub transition: TransitionMode,
    pub variance: VarianceMode,
    pub shrinkage: Shrinkage,
    pub priors: PriorSettings,
    pub mcmc: McmcSettings,
    pub seed: u64,
    pub horizons: Vec<usize>,
    pub t0: YearMonth,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            family: RegimeFamily::Theoretical,
            states: 4,
            transition: TransitionMode::Tvp,
            variance: VarianceMode::StateSpecific,
            shrinkage: Shrinkage::Ssvs,
            priors: PriorSettings::default(),
            mcmc: McmcSettings::default(),
            seed: 0,
            horizons: default_horizons(),
            t0: default_t0(),
        }
    }
}

impl ModelConfig {
    pub fn theoretical(transition: TransitionMode, variance: VarianceMode, shrinkage: Shrinkage) -> Self {
        Self {
            family: RegimeFamily::Theoretical,
            states: 4,
            transition,
            variance,
            shrinkage,
            ..Self::default()
        }
    }

    pub fn kitchen_sink(states: usize, transition: TransitionMode, variance: VarianceMode, shrinkage: Shrinkage) -> Self {
        Self {
            family: RegimeFamily::KitchenSink,
            states,
            transition,
            variance,
            shrinkage,
            ..Self::default()
        }
    }

    /// Single-state regression under the slab prior only.
    pub fn linear(model: StructuralModel) -> Self {
        Self {
            family: RegimeFamily::Linear(model),
            states: 1,
            transition: TransitionMode::Fixed,
            variance: VarianceMode::Common,
            shrinkage: Shrinkage::None,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            RegimeFamily::Theoretical if self.states != 4 => {
                return Err(Error::Config(format!(
                    "the theoretical family has 4 states, got {}",
                    self.states
                )))
            }
            RegimeFamily::KitchenSink if !(2..=4).contains(&self.states) => {
                return Err(Error::Config(format!(
                    "kitchen-sink models use 2 to 4 states, got {}",
                    self.states
                )))
            }
            RegimeFamily::Linear(_) if self.states != 1 => {
                return Err(Error::Config("linear models have a single state".into()))
            }
            _ => {}
        }
        if self.horizons.is_empty() || self.horizons.contains(&0) {
            return Err(Error::Config("horizons must be a nonempty list of positive integers".into()));
        }
        self.mcmc.validate()?;
        self.priors.validate()
    }

    pub fn resolve_regimes(&self, n_predictors: usize) -> Result<Vec<RegimeSpec>> {
        let regimes = match self.family {
            RegimeFamily::Theoretical => theoretical_regimes(),
            RegimeFamily::KitchenSink => kitchen_sink_regimes(self.states, n_predictors)?,
            RegimeFamily::Linear(m) => vec![m.regime()],
        };
        for r in &regimes {
            r.validate(n_predictors)?;
        }
        Ok(regimes)
    }

    pub fn class(&self) -> ModelClass {
        match (self.family, self.transition) {
            (RegimeFamily::Linear(_), _) => ModelClass::Linear,
            (_, TransitionMode::Tvp) => ModelClass::MsTvp,
            (_, TransitionMode::Fixed) => ModelClass::MsFt,
        }
    }

    /// Stable identifier such as `ms-tvp_kitchen-sink_k3_ssvs_state-specific`.
    pub fn model_id(&self) -> String {
        let family = match self.family {
            RegimeFamily::Theoretical => "theoretical",
            RegimeFamily::KitchenSink => "kitchen-sink",
            RegimeFamily::Linear(m) => return format!("linear_{}", m.label()),
        };
        let shrinkage = match self.shrinkage {
            Shrinkage::Ssvs => "ssvs",
            Shrinkage::None => "none",
        };
        let variance = match self.variance {
            VarianceMode::Common => "common",
            VarianceMode::StateSpecific => "state-specific",
        };
        format!(
            "{}_{family}_k{}_{shrinkage}_{variance}",
            self.class().label(),
            self.states
        )
    }

    /// Whether the permutation sampler applies.
    pub fn is_unidentified(&self) -> bool {
        self.family == RegimeFamily::KitchenSink
    }
}

/// The full comparison roster: theoretical MS-TVP and MS-FT models over
/// shrinkage and variance modes, kitchen-sink models with two to four states,
/// and the four linear regressions.
pub fn default_grid() -> Vec<ModelConfig> {
    let mut grid = Vec::new();
    for transition in [TransitionMode::Tvp, TransitionMode::Fixed] {
        for shrinkage in [Shrinkage::None, Shrinkage::Ssvs] {
            for variance in [VarianceMode::Common, VarianceMode::StateSpecific] {
                grid.push(ModelConfig::theoretical(transition, variance, shrinkage));
            }
        }
    }
    for transition in [TransitionMode::Tvp, TransitionMode::Fixed] {
        for states in 2..=4 {
            for variance in [VarianceMode::Common, VarianceMode::StateSpecific] {
                grid.push(ModelConfig::kitchen_sink(states, transition, variance, Shrinkage::Ssvs));
            }
        }
    }
    grid.extend(StructuralModel::ALL.iter().map(|&m| ModelConfig::linear(m)));
    grid
}

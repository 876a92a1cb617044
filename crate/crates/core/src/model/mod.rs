//! Regimes, selection matrices, priors and model configurations.

pub mod config;
pub mod priors;
pub mod regimes;
pub mod selection;

pub use config::{
    default_grid, default_horizons, default_t0, McmcSettings, ModelClass, ModelConfig, RegimeFamily, Shrinkage, TransitionMode,
    VarianceMode,
};
pub use priors::{semiautomatic_scales, semiautomatic_scales_stabilized, PriorSettings, PriorSpec};
pub use regimes::{
    block_offsets, kitchen_sink_regimes, theoretical_regimes, RegimeSpec, Regressor, StructuralModel,
};
pub use selection::{augment, make_selection_matrix, SelectionMatrix};

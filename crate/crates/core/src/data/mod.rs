//! Raw series ingestion and construction of the aligned fundamentals panel.

mod fundamentals;
mod hp;
mod raw;

pub use fundamentals::{
    build_fundamentals, build_fundamentals_with_lambda, FundamentalsPanel, PREDICTOR_NAMES,
};
pub use hp::{hp_filter, HpDecomposition, MONTHLY_LAMBDA};
pub use raw::{load_panel, CountrySeries, RawSeriesPanel, SeriesSchema};

/// Column positions of the fundamentals vector, in the order of the full
/// predictor set (Taylor block, monetary block, price levels, current rates).
pub mod col {
    pub const I_PREV: usize = 0;
    pub const I_PREV_F: usize = 1;
    pub const PI: usize = 2;
    pub const PI_F: usize = 3;
    pub const X: usize = 4;
    pub const X_F: usize = 5;
    pub const Q: usize = 6;
    pub const M: usize = 7;
    pub const M_F: usize = 8;
    pub const Y: usize = 9;
    pub const Y_F: usize = 10;
    pub const E: usize = 11;
    pub const P: usize = 12;
    pub const P_F: usize = 13;
    pub const I: usize = 14;
    pub const I_F: usize = 15;
    /// Number of fundamentals.
    pub const COUNT: usize = 16;
}

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::regimes::{block_offsets, RegimeSpec, Regressor};

/// Binary selection matrix `D_k` of one state.
///
/// Rows index the intercept-augmented predictor vector: the `R` fundamentals
/// followed by one intercept slot per state. Columns index the stacked
/// coefficient vector `β = (β_1', …, β_K')'`. Column `i` of block `k` has a
/// single one, in the row of the regressor it multiplies; every other column
/// is zero, so `x_aug' D_k β = x_k' β_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionMatrix {
    pub state: usize,
    pub rows: usize,
    pub cols: usize,
    /// `(row, column)` positions of the ones, in column order.
    ones: Vec<(usize, usize)>,
    block: std::ops::Range<usize>,
}

impl SelectionMatrix {
    pub fn ones(&self) -> &[(usize, usize)] {
        &self.ones
    }

    /// Coefficient positions belonging to this state.
    pub fn block(&self) -> std::ops::Range<usize> {
        self.block.clone()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.rows, self.cols);
        for &(r, c) in &self.ones {
            d[(r, c)] = 1.0;
        }
        d
    }

    /// `D_k β`, a vector over the augmented predictors.
    pub fn apply(&self, beta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for &(r, c) in &self.ones {
            out[r] += beta[c];
        }
        out
    }

    /// `β` with every block except this state's zeroed.
    pub fn mask(&self, beta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        out[self.block.clone()].copy_from_slice(&beta[self.block.clone()]);
        out
    }
}

/// Augmented predictor vector: fundamentals followed by `states` intercept ones.
pub fn augment(predictors: &[f64], states: usize) -> Vec<f64> {
    let mut v = predictors.to_vec();
    v.extend(std::iter::repeat_n(1.0, states));
    v
}

pub fn make_selection_matrix(
    state: usize,
    all_regimes: &[RegimeSpec],
    n_predictors: usize,
) -> Result<SelectionMatrix> {
    let k = all_regimes.len();
    if state >= k {
        return Err(Error::Invalid(format!("state {state} outside 0..{k}")));
    }
    for r in all_regimes {
        r.validate(n_predictors)?;
    }
    let (offsets, m) = block_offsets(all_regimes);
    let regime = &all_regimes[state];
    let ones = regime
        .regressors
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let row = match r {
                Regressor::Predictor(c) => *c,
                Regressor::Intercept => n_predictors + state,
            };
            (row, offsets[state] + i)
        })
        .collect();
    Ok(SelectionMatrix {
        state,
        rows: n_predictors + k,
        cols: m,
        ones,
        block: offsets[state]..offsets[state] + regime.len(),
    })
}

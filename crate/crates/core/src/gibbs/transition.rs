use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::TransitionMode;
use crate::numeric::symmetric_log_sum_exp;

/// Smallest transition probability; keeps every row a strict simplex point.
pub const PROB_FLOOR: f64 = 1e-300;

/// Multinomial-logit transition law.
///
/// The logit of moving from state `a` to state `b` at time `t` is
/// `intercept[a][b] + loading[b]·z_t`. In the identified parameterization the
/// last state is the reference destination with all-zero coefficients, and for
/// every other destination `j` a coefficient vector `γ_j` acts on
/// `Z_t = (1, z_t', I[S_{t−1}=1], …, I[S_{t−1}=K−1])'`. The redundant storage
/// lets state labels be permuted by moving entries, without arithmetic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionModel {
    mode: TransitionMode,
    states: usize,
    n_covariates: usize,
    /// Row-major `K × K`, previous state by destination.
    intercepts: Vec<f64>,
    /// Row-major `K × N`, destination by covariate.
    loadings: Vec<f64>,
}

impl TransitionModel {
    /// All coefficients zero: uniform transitions.
    pub fn new(mode: TransitionMode, states: usize, n_covariates: usize) -> Self {
        assert!(states >= 1, "at least one state");
        Self {
            mode,
            states,
            n_covariates,
            intercepts: vec![0.0; states * states],
            loadings: vec![0.0; states * n_covariates],
        }
    }

    /// Builds the model from `K − 1` identified coefficient vectors of length [`Self::dim`].
    pub fn from_gamma(
        mode: TransitionMode,
        states: usize,
        n_covariates: usize,
        gamma: &[Vec<f64>],
    ) -> Result<Self> {
        let mut tm = Self::new(mode, states, n_covariates);
        if gamma.len() != states - 1 {
            return Err(Error::Invalid(format!(
                "{} coefficient vectors for {states} states",
                gamma.len()
            )));
        }
        for (j, g) in gamma.iter().enumerate() {
            tm.set_gamma(j, g)?;
        }
        Ok(tm)
    }

    pub fn mode(&self) -> TransitionMode {
        self.mode
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn n_covariates(&self) -> usize {
        self.n_covariates
    }

    /// Length of `Z_t`: intercept, covariates and `K − 1` previous-state indicators.
    pub fn dim(&self) -> usize {
        1 + self.n_covariates + self.states - 1
    }

    /// Positions of the covariate block inside `γ_j`.
    pub fn covariate_block(&self) -> std::ops::Range<usize> {
        1..1 + self.n_covariates
    }

    /// `Z_t` for covariates `z` and previous state `s_prev`.
    pub fn design_row(&self, z: &[f64], s_prev: usize) -> Vec<f64> {
        let mut row = Vec::with_capacity(self.dim());
        row.push(1.0);
        row.extend_from_slice(z);
        row.extend((0..self.states - 1).map(|a| if a == s_prev { 1.0 } else { 0.0 }));
        row
    }

    /// Shifts every coefficient so the last state is the zero reference.
    /// A model that is already normalized is left bit-identical.
    pub fn normalize(&mut self) {
        let k = self.states;
        let n = self.n_covariates;
        for a in 0..k {
            let r = self.intercepts[a * k + k - 1];
            for b in 0..k {
                self.intercepts[a * k + b] -= r;
            }
        }
        for c in 0..n {
            let r = self.loadings[(k - 1) * n + c];
            for b in 0..k {
                self.loadings[b * n + c] -= r;
            }
        }
    }

    /// Identified coefficient vectors `γ_1, …, γ_{K−1}`.
    pub fn gamma(&self) -> Vec<Vec<f64>> {
        let mut norm = self.clone();
        norm.normalize();
        let k = self.states;
        let n = self.n_covariates;
        (0..k - 1)
            .map(|j| {
                let g0 = norm.intercepts[(k - 1) * k + j];
                let mut g = vec![g0];
                g.extend((0..n).map(|c| norm.loadings[j * n + c]));
                g.extend((0..k - 1).map(|a| norm.intercepts[a * k + j] - g0));
                g
            })
            .collect()
    }

    /// Sets `γ_j` for a non-reference destination `j < K − 1`.
    ///
    /// The model is normalized first. In fixed mode the covariate block must be zero.
    pub fn set_gamma(&mut self, j: usize, gamma: &[f64]) -> Result<()> {
        let k = self.states;
        let n = self.n_covariates;
        if j + 1 >= k {
            return Err(Error::Invalid(format!("destination {j} is the reference or out of range")));
        }
        if gamma.len() != self.dim() {
            return Err(Error::Invalid(format!(
                "gamma has length {}, expected {}",
                gamma.len(),
                self.dim()
            )));
        }
        if self.mode == TransitionMode::Fixed && gamma[self.covariate_block()].iter().any(|&g| g != 0.0) {
            return Err(Error::Invalid(
                "fixed transition mode requires zero covariate coefficients".into(),
            ));
        }
        self.normalize();
        let g0 = gamma[0];
        self.intercepts[(k - 1) * k + j] = g0;
        for a in 0..k - 1 {
            self.intercepts[a * k + j] = g0 + gamma[1 + n + a];
        }
        for c in 0..n {
            self.loadings[j * n + c] = gamma[1 + c];
        }
        Ok(())
    }

    /// Logits of every destination from `s_prev`.
    pub fn logits(&self, z: &[f64], s_prev: usize, out: &mut [f64]) {
        let k = self.states;
        let n = self.n_covariates;
        debug_assert_eq!(z.len(), n);
        for (b, o) in out.iter_mut().enumerate().take(k) {
            let mut v = self.intercepts[s_prev * k + b];
            for c in 0..n {
                v += self.loadings[b * n + c] * z[c];
            }
            *o = v;
        }
    }

    /// Log transition probabilities from `s_prev`, floored at `ln PROB_FLOOR`.
    pub fn log_transition_probs(&self, z: &[f64], s_prev: usize, out: &mut [f64]) {
        let k = self.states;
        self.logits(z, s_prev, out);
        let lse = symmetric_log_sum_exp(&out[..k]);
        let floor = PROB_FLOOR.ln();
        for o in out.iter_mut().take(k) {
            *o = (*o - lse).max(floor);
        }
    }

    /// Transition probabilities `P(S_t = · | S_{t−1} = s_prev, z_t)`.
    pub fn transition_probs(&self, z: &[f64], s_prev: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.states];
        self.log_transition_probs(z, s_prev, &mut out);
        out.iter().map(|l| l.exp()).collect()
    }

    /// Row-major `K × K` transition matrix for covariates `z`.
    pub fn matrix(&self, z: &[f64]) -> Vec<f64> {
        let k = self.states;
        let mut m = vec![0.0; k * k];
        for a in 0..k {
            let row = self.transition_probs(z, a);
            m[a * k..(a + 1) * k].copy_from_slice(&row);
        }
        m
    }

    /// Row-major `K × K` log transition matrix for covariates `z`.
    pub fn log_matrix(&self, z: &[f64], out: &mut [f64]) {
        let k = self.states;
        for a in 0..k {
            self.log_transition_probs(z, a, &mut out[a * k..(a + 1) * k]);
        }
    }

    /// Relabels states: old state `s` becomes `perm[s]`.
    pub fn permute(&mut self, perm: &[usize]) {
        let k = self.states;
        let n = self.n_covariates;
        let mut intercepts = vec![0.0; k * k];
        let mut loadings = vec![0.0; k * n];
        for a in 0..k {
            for b in 0..k {
                intercepts[perm[a] * k + perm[b]] = self.intercepts[a * k + b];
            }
        }
        for b in 0..k {
            for c in 0..n {
                loadings[perm[b] * n + c] = self.loadings[b * n + c];
            }
        }
        self.intercepts = intercepts;
        self.loadings = loadings;
    }

    /// The same coefficients with the covariate block zeroed, as a fixed-mode model.
    pub fn to_fixed(&self) -> Self {
        let mut tm = self.clone();
        tm.mode = TransitionMode::Fixed;
        tm.loadings.iter_mut().for_each(|l| *l = 0.0);
        tm
    }
}

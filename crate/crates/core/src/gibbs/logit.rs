use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::distributions::{sample_mvn_precision, sample_polya_gamma};
use crate::error::{Error, Result};
use crate::gibbs::conjugate::BlockPosterior;
use crate::gibbs::model::{GibbsState, Model};
use crate::gibbs::transition::TransitionModel;
use crate::model::TransitionMode;
use crate::numeric::log_sum_exp;

/// Rows `Z_t` for `t = 1..T`, built from the covariates and the lagged state.
pub fn logit_design(model: &Model, tm: &TransitionModel, initial_state: usize, states: &[usize]) -> DMatrix<f64> {
    let d = tm.dim();
    let t_len = model.len();
    let mut z = DMatrix::zeros(t_len, d);
    let mut prev = initial_state;
    for t in 0..t_len {
        let row = tm.design_row(model.z(t), prev);
        for (c, v) in row.into_iter().enumerate() {
            z[(t, c)] = v;
        }
        prev = states[t];
    }
    z
}

/// Columns of `Z_t` that carry free coefficients under `mode`.
pub fn free_columns(tm: &TransitionModel) -> Vec<usize> {
    let cov = tm.covariate_block();
    (0..tm.dim())
        .filter(|c| tm.mode() == TransitionMode::Tvp || !cov.contains(c))
        .collect()
}

/// Gaussian conditional of `γ_j` given the Pólya-Gamma auxiliaries.
///
/// `ψ_t` enters as the precision weight of observation `t`, the working
/// response of `γ_j` is `κ_t + ψ_t C_t` with `κ_t = I[S_t = j] − 1/2`, and the
/// prior is `N(0, ζ I)`.
pub fn gamma_conditional(
    design: &DMatrix<f64>,
    kappa: &[f64],
    psi: &[f64],
    offset: &[f64],
    zeta: f64,
) -> BlockPosterior {
    let (t_len, d) = design.shape();
    let mut precision = DMatrix::identity(d, d) / zeta;
    let mut linear = DVector::zeros(d);
    for t in 0..t_len {
        let w = psi[t];
        let r = kappa[t] + w * offset[t];
        for i in 0..d {
            let zi = design[(t, i)];
            if zi == 0.0 {
                continue;
            }
            linear[i] += zi * r;
            for j in 0..=i {
                precision[(i, j)] += w * zi * design[(t, j)];
            }
        }
    }
    precision.fill_upper_triangle_with_lower_triangle();
    BlockPosterior { precision, linear }
}

/// Pólya-Gamma update of every non-reference destination in turn.
///
/// Returns the new transition law and the `T × (K − 1)` auxiliaries.
pub fn draw_gamma_pg<R: Rng + ?Sized>(
    model: &Model,
    state: &GibbsState,
    rng: &mut R,
) -> Result<(TransitionModel, Vec<f64>)> {
    let k = model.states();
    let t_len = model.len();
    let tm = &state.transition;
    if k == 1 {
        return Ok((tm.clone(), Vec::new()));
    }
    let mut gammas = tm.gamma();
    let full = logit_design(model, tm, state.initial_state, &state.states);
    let cols = free_columns(tm);
    let design = full.select_columns(cols.iter());
    let zeta = model.prior().zeta;

    // Linear predictors Z_t'γ_l; the reference destination stays at zero.
    let mut eta = vec![0.0; t_len * k];
    for l in 0..k - 1 {
        let g = DVector::from_column_slice(&gammas[l]);
        let e = &full * g;
        for t in 0..t_len {
            eta[t * k + l] = e[t];
        }
    }

    let mut psi_all = vec![0.0; t_len * (k - 1)];
    let mut offset = vec![0.0; t_len];
    let mut psi = vec![0.0; t_len];
    let mut kappa = vec![0.0; t_len];
    let mut others = vec![0.0; k - 1];
    for j in 0..k - 1 {
        for t in 0..t_len {
            let row = &eta[t * k..(t + 1) * k];
            let mut n = 0;
            for (l, &v) in row.iter().enumerate() {
                if l != j {
                    others[n] = v;
                    n += 1;
                }
            }
            let c = log_sum_exp(&others);
            offset[t] = c;
            psi[t] = sample_polya_gamma(row[j] - c, rng);
            kappa[t] = if state.states[t] == j { 0.5 } else { -0.5 };
            psi_all[t * (k - 1) + j] = psi[t];
        }
        let post = gamma_conditional(&design, &kappa, &psi, &offset, zeta);
        let (draw, _) = sample_mvn_precision(&post.precision, &post.linear, rng)
            .map_err(|e| Error::Numerical(format!("logit coefficients of destination {}: {e}", j + 1)))?;
        let g = &mut gammas[j];
        g.iter_mut().for_each(|v| *v = 0.0);
        for (v, &c) in draw.iter().zip(&cols) {
            g[c] = *v;
        }
        let e = &full * DVector::from_column_slice(g);
        for t in 0..t_len {
            eta[t * k + j] = e[t];
        }
    }
    let new = TransitionModel::from_gamma(tm.mode(), k, tm.n_covariates(), &gammas)?;
    Ok((new, psi_all))
}

use rand::seq::SliceRandom;
use rand::Rng;

use crate::gibbs::model::{GibbsState, Model};

/// Relabels the states of `state`: old label `s` becomes `perm[s]`.
///
/// Coefficient blocks, variances, inclusion indicators, the state path and the
/// transition law move together, so every likelihood and predictive quantity
/// is unchanged.
pub fn apply_permutation(model: &Model, state: &GibbsState, perm: &[usize]) -> GibbsState {
    let k = model.states();
    assert_eq!(perm.len(), k, "permutation length");
    let mut out = state.clone();
    for old in 0..k {
        let src = model.block(old);
        let dst = model.block(perm[old]);
        out.beta[dst.clone()].copy_from_slice(&state.beta[src.clone()]);
        out.delta[dst].copy_from_slice(&state.delta[src]);
        out.sigma_sq[perm[old]] = state.sigma_sq[old];
    }
    out.states = state.states.iter().map(|&s| perm[s]).collect();
    out.initial_state = perm[state.initial_state];
    out.transition.permute(perm);
    out
}

/// Random permutation step for models whose regimes are not identified.
///
/// Applies a uniformly random relabeling in place when the model allows it
/// and leaves the draw untouched otherwise. Returns the permutation used.
pub fn permutation_step<R: Rng + ?Sized>(model: &Model, state: &mut GibbsState, rng: &mut R) -> Option<Vec<usize>> {
    if !model.options().permute || model.states() < 2 {
        return None;
    }
    let mut perm: Vec<usize> = (0..model.states()).collect();
    perm.shuffle(rng);
    *state = apply_permutation(model, state, &perm);
    Some(perm)
}

//! Random streams and the samplers used by the Gibbs engine.

mod gaussian;
mod polya_gamma;
mod rng;

pub use gaussian::{cholesky_with_jitter, sample_mvn, sample_mvn_precision};
pub use polya_gamma::{
    draw_polya_gamma, polya_gamma_mean, polya_gamma_variance, sample_polya_gamma, PolyaGammaDraw,
};
pub use rng::RngStream;

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};

/// Largest inverse-Gamma draw returned. A vague prior on a state with no
/// observations puts visible mass beyond the range of `f64`; such draws are
/// capped here instead of overflowing.
pub const VARIANCE_CEILING: f64 = 1e300;

/// Draw from the inverse-Gamma distribution with density ∝ x^{-shape-1} e^{-scale/x}.
///
/// Draws above [`VARIANCE_CEILING`] are returned as the ceiling.
pub fn sample_inverse_gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> Result<f64> {
    if !(shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()) {
        return Err(Error::Invalid(format!(
            "inverse-Gamma parameters must be positive, got shape {shape}, scale {scale}"
        )));
    }
    let g = Gamma::new(shape, 1.0).map_err(|e| Error::Invalid(e.to_string()))?;
    let draw = (scale / g.sample(rng)).min(VARIANCE_CEILING);
    if draw > 0.0 && draw.is_finite() {
        Ok(draw)
    } else {
        Err(Error::Numerical(format!(
            "inverse-Gamma draw {draw} for shape {shape}, scale {scale}"
        )))
    }
}

pub fn bernoulli<R: Rng + ?Sized>(p: f64, rng: &mut R) -> bool {
    if p >= 1.0 {
        true
    } else if p <= 0.0 {
        false
    } else {
        rng.random::<f64>() < p
    }
}

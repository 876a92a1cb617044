use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

fn standard_normals<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Cholesky factor of a symmetric PSD matrix, retried once with a diagonal
/// jitter of `1e-10·trace/n`.
pub fn cholesky_with_jitter(matrix: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    if let Some(c) = Cholesky::new(matrix.clone()) {
        return Ok(c);
    }
    let n = matrix.nrows();
    let jitter = 1e-10 * matrix.trace() / n as f64;
    if jitter > 0.0 && jitter.is_finite() {
        let mut m = matrix.clone();
        for i in 0..n {
            m[(i, i)] += jitter;
        }
        if let Some(c) = Cholesky::new(m) {
            return Ok(c);
        }
    }
    Err(Error::Numerical(format!(
        "{n}x{n} matrix is not positive semi-definite"
    )))
}

/// Draw from `N(mean, covariance)` through the Cholesky factor.
///
/// An all-zero covariance returns the mean.
pub fn sample_mvn<R: Rng + ?Sized>(
    mean: &DVector<f64>,
    covariance: &DMatrix<f64>,
    rng: &mut R,
) -> Result<DVector<f64>> {
    let n = mean.len();
    if covariance.shape() != (n, n) {
        return Err(Error::Invalid(format!(
            "covariance is {:?}, mean has length {n}",
            covariance.shape()
        )));
    }
    if covariance.iter().all(|&v| v == 0.0) {
        return Ok(mean.clone());
    }
    let l = cholesky_with_jitter(covariance)?.unpack();
    let e = standard_normals(n, rng);
    Ok(mean + l * e)
}

/// Draw from `N(Q⁻¹b, Q⁻¹)` given the precision `Q` and linear term `b`.
///
/// Returns the draw together with the mean `Q⁻¹b`.
pub fn sample_mvn_precision<R: Rng + ?Sized>(
    precision: &DMatrix<f64>,
    linear: &DVector<f64>,
    rng: &mut R,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let chol = cholesky_with_jitter(precision)?;
    let mean = chol.solve(linear);
    let e = standard_normals(linear.len(), rng);
    let offset = chol
        .l()
        .transpose()
        .solve_upper_triangular(&e)
        .ok_or_else(|| Error::Numerical("singular precision factor".into()))?;
    let draw = &mean + offset;
    if draw.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite Gaussian draw".into()));
    }
    Ok((draw, mean))
}

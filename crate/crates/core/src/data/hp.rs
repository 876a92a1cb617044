use crate::error::{Error, Result};

/// Smoothing parameter for monthly data.
pub const MONTHLY_LAMBDA: f64 = 14_400.0;

#[derive(Debug, Clone, PartialEq)]
pub struct HpDecomposition {
    pub trend: Vec<f64>,
    pub gap: Vec<f64>,
}

/// Hodrick-Prescott trend/cycle split.
///
/// Solves `(I + λ D'D) τ = y` where `D` is the second-difference operator,
/// using a banded LDLᵀ factorization of the symmetric pentadiagonal system.
pub fn hp_filter(series: &[f64], lambda: f64) -> Result<HpDecomposition> {
    let n = series.len();
    if n < 4 {
        return Err(Error::Invalid(format!(
            "HP filter needs at least 4 observations, got {n}"
        )));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Invalid(format!(
            "HP lambda must be positive, got {lambda}"
        )));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid(
            "HP filter input contains non-finite values".into(),
        ));
    }

    // Bands of I + λ D'D: diag[i] = A[i][i], off1[i] = A[i][i+1], off2[i] = A[i][i+2].
    let mut diag = vec![1.0; n];
    let mut off1 = vec![0.0; n - 1];
    let mut off2 = vec![0.0; n - 2];
    const STENCIL: [f64; 3] = [1.0, -2.0, 1.0];
    for r in 0..n - 2 {
        for a in 0..3 {
            diag[r + a] += lambda * STENCIL[a] * STENCIL[a];
            for b in a + 1..3 {
                let v = lambda * STENCIL[a] * STENCIL[b];
                if b - a == 1 {
                    off1[r + a] += v;
                } else {
                    off2[r + a] += v;
                }
            }
        }
    }

    let trend = solve_pentadiagonal_spd(&diag, &off1, &off2, series)?;
    let gap = series.iter().zip(&trend).map(|(y, t)| y - t).collect();
    Ok(HpDecomposition { trend, gap })
}

/// LDLᵀ solve for a symmetric positive definite matrix with bandwidth 2.
fn solve_pentadiagonal_spd(
    diag: &[f64],
    off1: &[f64],
    off2: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut d = vec![0.0; n];
    // l1[i] = L[i+1][i], l2[i] = L[i+2][i]
    let mut l1 = vec![0.0; n.saturating_sub(1)];
    let mut l2 = vec![0.0; n.saturating_sub(2)];

    for i in 0..n {
        let mut di = diag[i];
        if i >= 1 {
            di -= l1[i - 1] * l1[i - 1] * d[i - 1];
        }
        if i >= 2 {
            di -= l2[i - 2] * l2[i - 2] * d[i - 2];
        }
        if !(di > 0.0) {
            return Err(Error::Numerical(
                "pentadiagonal system is not positive definite".into(),
            ));
        }
        d[i] = di;
        if i + 1 < n {
            let mut v = off1[i];
            if i >= 1 {
                v -= l2[i - 1] * l1[i - 1] * d[i - 1];
            }
            l1[i] = v / di;
        }
        if i + 2 < n {
            l2[i] = off2[i] / di;
        }
    }

    // L y = b
    let mut x = rhs.to_vec();
    for i in 0..n {
        if i >= 1 {
            x[i] -= l1[i - 1] * x[i - 1];
        }
        if i >= 2 {
            x[i] -= l2[i - 2] * x[i - 2];
        }
    }
    for i in 0..n {
        x[i] /= d[i];
    }
    // Lᵀ x = y
    for i in (0..n).rev() {
        if i + 1 < n {
            x[i] -= l1[i] * x[i + 1];
        }
        if i + 2 < n {
            x[i] -= l2[i] * x[i + 2];
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};

    /// Dense oracle: build I + λ D'D explicitly and LU-solve it.
    fn dense_trend(series: &[f64], lambda: f64) -> Vec<f64> {
        let n = series.len();
        let mut d = DMatrix::<f64>::zeros(n - 2, n);
        for r in 0..n - 2 {
            d[(r, r)] = 1.0;
            d[(r, r + 1)] = -2.0;
            d[(r, r + 2)] = 1.0;
        }
        let a = DMatrix::<f64>::identity(n, n) + lambda * d.transpose() * &d;
        let b = DVector::from_column_slice(series);
        a.lu().solve(&b).unwrap().iter().copied().collect()
    }

    #[test]
    fn constant_series_has_zero_gap() {
        let out = hp_filter(&[3.5; 30], 14_400.0).unwrap();
        for (t, g) in out.trend.iter().zip(&out.gap) {
            assert!((t - 3.5).abs() < 1e-9);
            assert!(g.abs() < 1e-9);
        }
    }

    #[test]
    fn linear_trend_is_preserved() {
        let y: Vec<f64> = (0..120).map(|t| 2.0 + 0.03 * t as f64).collect();
        let out = hp_filter(&y, MONTHLY_LAMBDA).unwrap();
        assert!(out.gap.iter().all(|g| g.abs() < 1e-8));
    }

    #[test]
    fn matches_dense_solve() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let y: Vec<f64> = (0..50).map(|_| rng.random::<f64>() * 10.0 - 5.0).collect();
        let out = hp_filter(&y, MONTHLY_LAMBDA).unwrap();
        let oracle = dense_trend(&y, MONTHLY_LAMBDA);
        for (a, b) in out.trend.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        for ((t, g), v) in out.trend.iter().zip(&out.gap).zip(&y) {
            assert!((t + g - v).abs() <= 4.0 * f64::EPSILON * v.abs().max(1.0));
        }
    }

    #[test]
    fn short_series_and_bad_lambda_rejected() {
        assert!(hp_filter(&[1.0, 2.0, 3.0], 1.0).is_err());
        assert!(hp_filter(&[1.0, 2.0, 3.0, 4.0], 0.0).is_err());
        assert!(hp_filter(&[1.0, 2.0, 3.0, 4.0], 10.0).is_ok());
    }

    #[test]
    fn gap_mean_vanishes_on_smooth_input() {
        let y: Vec<f64> = (0..300)
            .map(|t| {
                let t = t as f64;
                4.0 + 0.002 * t + 0.05 * (t / 9.0).sin()
            })
            .collect();
        let out = hp_filter(&y, MONTHLY_LAMBDA).unwrap();
        let mean = out.gap.iter().sum::<f64>() / y.len() as f64;
        assert!(mean.abs() < 1e-6);
    }
}

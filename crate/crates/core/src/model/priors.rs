use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::FundamentalsPanel;
use crate::error::{Error, Result};
use crate::model::config::Shrinkage;
use crate::model::regimes::RegimeSpec;

/// Scalar prior hyperparameters of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PriorSettings {
    /// Spike variance multiplier on the OLS variance.
    pub c0: f64,
    /// Slab variance multiplier on the OLS variance.
    pub c1: f64,
    /// Prior inclusion probability.
    pub omega: f64,
    /// Inverse-Gamma shape of the error variances.
    pub a0: f64,
    /// Inverse-Gamma scale of the error variances.
    #[serde(rename = "A0")]
    pub a_scale: f64,
    /// Prior variance of the transition logit coefficients.
    pub zeta: f64,
}

impl Default for PriorSettings {
    fn default() -> Self {
        Self {
            c0: 0.1,
            c1: 10.0,
            omega: 0.5,
            a0: 0.01,
            a_scale: 0.01,
            zeta: 100.0,
        }
    }
}

impl PriorSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("c0", self.c0),
            ("c1", self.c1),
            ("a0", self.a0),
            ("A0", self.a_scale),
            ("zeta", self.zeta),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("prior `{name}` must be positive, got {v}")));
            }
        }
        if self.c1 <= self.c0 {
            return Err(Error::Config(format!(
                "slab multiplier c1 = {} must exceed spike multiplier c0 = {}",
                self.c1, self.c0
            )));
        }
        if !(0.0..=1.0).contains(&self.omega) {
            return Err(Error::Config(format!("omega must lie in [0, 1], got {}", self.omega)));
        }
        Ok(())
    }
}

/// Per-coefficient prior over the stacked coefficient vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub prior_mean: Vec<f64>,
    pub tau0_sq: Vec<f64>,
    pub tau1_sq: Vec<f64>,
    pub omega: Vec<f64>,
    pub a0: f64,
    pub a_scale: f64,
    pub zeta: f64,
}

impl PriorSpec {
    pub fn len(&self) -> usize {
        self.prior_mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prior_mean.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.prior_mean.len();
        if self.tau0_sq.len() != m || self.tau1_sq.len() != m || self.omega.len() != m {
            return Err(Error::Invalid("prior vectors have inconsistent lengths".into()));
        }
        for i in 0..m {
            let (t0, t1) = (self.tau0_sq[i], self.tau1_sq[i]);
            if !(t0 > 0.0 && t1 > t0 && t1.is_finite()) {
                return Err(Error::Invalid(format!(
                    "coefficient {i}: need slab variance {t1} > spike variance {t0} > 0"
                )));
            }
            if !(0.0..=1.0).contains(&self.omega[i]) {
                return Err(Error::Invalid(format!("coefficient {i}: omega outside [0, 1]")));
            }
        }
        if !(self.a0 > 0.0 && self.a_scale > 0.0 && self.zeta > 0.0) {
            return Err(Error::Invalid("a0, A0 and zeta must be positive".into()));
        }
        Ok(())
    }

    /// Semiautomatic spike-and-slab prior for every regime.
    ///
    /// Under `Shrinkage::None` every coefficient is included with certainty
    /// and only the slab variance is ever used.
    pub fn semiautomatic(
        panel: &FundamentalsPanel,
        regimes: &[RegimeSpec],
        settings: &PriorSettings,
        shrinkage: Shrinkage,
    ) -> Result<Self> {
        settings.validate()?;
        let mut spec = PriorSpec {
            prior_mean: Vec::new(),
            tau0_sq: Vec::new(),
            tau1_sq: Vec::new(),
            omega: Vec::new(),
            a0: settings.a0,
            a_scale: settings.a_scale,
            zeta: settings.zeta,
        };
        for regime in regimes {
            let (t0, t1) = semiautomatic_scales_stabilized(panel, regime, settings.c0, settings.c1)?;
            spec.prior_mean.extend_from_slice(&regime.prior_mean);
            spec.tau0_sq.extend(t0);
            spec.tau1_sq.extend(t1);
            let omega = match shrinkage {
                Shrinkage::Ssvs => settings.omega,
                Shrinkage::None => 1.0,
            };
            spec.omega.extend(std::iter::repeat_n(omega, regime.len()));
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// OLS design and response for one regime over every panel row.
pub fn regime_design(panel: &FundamentalsPanel, regime: &RegimeSpec) -> (DMatrix<f64>, DVector<f64>) {
    let t = panel.len();
    let x = DMatrix::from_fn(t, regime.len(), |row, c| {
        regime.row_values(panel.predictor_row(row)).nth(c).unwrap()
    });
    let y = DVector::from_column_slice(panel.target());
    (x, y)
}

fn ols_variances(x: &DMatrix<f64>, y: &DVector<f64>, ridge: f64) -> Option<Vec<f64>> {
    let (t, m) = x.shape();
    let mut xtx = x.transpose() * x;
    for i in 0..m {
        xtx[(i, i)] += ridge;
    }
    let inv = xtx.cholesky()?.inverse();
    let beta = &inv * (x.transpose() * y);
    let resid = y - x * beta;
    let dof = t.saturating_sub(m).max(1) as f64;
    let s2 = resid.norm_squared() / dof;
    let v: Vec<f64> = (0..m).map(|i| s2 * inv[(i, i)]).collect();
    v.iter().all(|v| *v > 0.0 && v.is_finite()).then_some(v)
}

fn is_rank_deficient(x: &DMatrix<f64>) -> bool {
    let (t, m) = x.shape();
    if t <= m {
        return true;
    }
    let eig = (x.transpose() * x).symmetric_eigenvalues();
    let max = eig.max();
    let min = eig.min();
    !(max > 0.0) || min <= 1e-10 * max
}

/// Spike and slab variances `c0·Var(β̂)` and `c1·Var(β̂)` from the regime's OLS fit.
///
/// Errors when the regime's design is rank deficient.
pub fn semiautomatic_scales(
    panel: &FundamentalsPanel,
    regime: &RegimeSpec,
    c0: f64,
    c1: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (x, y) = regime_design(panel, regime);
    if is_rank_deficient(&x) {
        return Err(Error::Numerical(format!(
            "regime `{}`: OLS design is rank deficient",
            regime.name
        )));
    }
    let v = ols_variances(&x, &y, 0.0).ok_or_else(|| {
        Error::Numerical(format!("regime `{}`: OLS variances not positive", regime.name))
    })?;
    Ok(scale(&v, c0, c1))
}

/// [`semiautomatic_scales`], falling back to a ridge fit with penalty
/// `1e-6·trace(X'X)/M_k` on a rank-deficient design.
pub fn semiautomatic_scales_stabilized(
    panel: &FundamentalsPanel,
    regime: &RegimeSpec,
    c0: f64,
    c1: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    match semiautomatic_scales(panel, regime, c0, c1) {
        Ok(s) => Ok(s),
        Err(Error::Numerical(msg)) => {
            log::debug!("{msg}; using ridge-stabilized OLS variances");
            let (x, y) = regime_design(panel, regime);
            let m = x.ncols();
            let trace: f64 = x.iter().map(|v| v * v).sum();
            let ridge = 1e-6 * trace / m as f64;
            let v = ols_variances(&x, &y, ridge).ok_or_else(|| {
                Error::Numerical(format!(
                    "regime `{}`: ridge-stabilized OLS variances not positive",
                    regime.name
                ))
            })?;
            Ok(scale(&v, c0, c1))
        }
        Err(e) => Err(e),
    }
}

fn scale(v: &[f64], c0: f64, c1: f64) -> (Vec<f64>, Vec<f64>) {
    (v.iter().map(|v| c0 * v).collect(), v.iter().map(|v| c1 * v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calendar::YearMonth;
    use crate::model::regimes::Regressor;

    /// Columns of the 8×8 Sylvester-Hadamard matrix.
    fn hadamard(col: usize) -> Vec<f64> {
        (0..8usize)
            .map(|row| if (row & col).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
            .collect()
    }

    fn panel_from(target: Vec<f64>, columns: &[Vec<f64>]) -> FundamentalsPanel {
        let t = target.len();
        let start: YearMonth = "2000-01".parse().unwrap();
        let dates = (0..t as i64).map(|k| start.add_months(k)).collect();
        let r = columns.len();
        let mut preds = Vec::with_capacity(t * r);
        for row in 0..t {
            preds.extend(columns.iter().map(|c| c[row]));
        }
        FundamentalsPanel::from_parts(
            (0..r).map(|i| format!("x{i}")).collect(),
            dates,
            target,
            preds.clone(),
            preds,
            0,
            vec![],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn orthogonal_design_unit_noise() {
        // X = [1, h1, h2] with X'X = 8·I, residual built from the other Hadamard
        // columns with squared norm T - M = 5, so s² = 1 and Var(β̂_i) = 1/8.
        let a = (5.0f64 / 32.0).sqrt();
        let coef = [0.3, -1.2, 0.7];
        let target: Vec<f64> = (0..8)
            .map(|r| {
                coef[0] * hadamard(0)[r]
                    + coef[1] * hadamard(1)[r]
                    + coef[2] * hadamard(2)[r]
                    + a * (4..8).map(|c| hadamard(c)[r]).sum::<f64>()
            })
            .collect();
        let panel = panel_from(target, &[hadamard(1), hadamard(2)]);
        let regime = RegimeSpec::new(
            "orth",
            vec![Regressor::Intercept, Regressor::Predictor(0), Regressor::Predictor(1)],
            vec![0.0; 3],
        )
        .unwrap();
        let (t0, t1) = semiautomatic_scales(&panel, &regime, 0.1, 10.0).unwrap();
        for (a, b) in t0.iter().zip(&t1) {
            assert!((b - 10.0 / 8.0).abs() < 1e-12);
            assert!((a - 0.1 / 8.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ratio_is_scale_free_and_rank_deficiency_handled() {
        let x1: Vec<f64> = (0..40).map(|t| (t as f64 * 0.37).sin()).collect();
        let x2: Vec<f64> = (0..40).map(|t| (t as f64 * 0.11).cos()).collect();
        let dup: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| a - 2.0 * b).collect();
        let y: Vec<f64> = (0..40).map(|t| 0.1 * (t as f64 * 1.7).sin() + 0.3 * x1[t]).collect();
        let panel = panel_from(y, &[x1, x2, dup]);
        let good = RegimeSpec::new(
            "ok",
            vec![Regressor::Intercept, Regressor::Predictor(0), Regressor::Predictor(1)],
            vec![0.0; 3],
        )
        .unwrap();
        let (t0, t1) = semiautomatic_scales(&panel, &good, 0.1, 10.0).unwrap();
        for (a, b) in t0.iter().zip(&t1) {
            assert!((b / a - 100.0).abs() < 1e-9);
        }
        let collinear = RegimeSpec::new(
            "bad",
            vec![
                Regressor::Intercept,
                Regressor::Predictor(0),
                Regressor::Predictor(1),
                Regressor::Predictor(2),
            ],
            vec![0.0; 4],
        )
        .unwrap();
        assert!(semiautomatic_scales(&panel, &collinear, 0.1, 10.0).is_err());
        let (t0, t1) = semiautomatic_scales_stabilized(&panel, &collinear, 0.1, 10.0).unwrap();
        assert!(t0.iter().zip(&t1).all(|(a, b)| *a > 0.0 && b > a));
    }

    #[test]
    fn degenerate_multipliers_rejected() {
        let s = PriorSettings {
            c0: 1.0,
            c1: 1.0,
            ..PriorSettings::default()
        };
        assert!(s.validate().is_err());
        let spec = PriorSpec {
            prior_mean: vec![0.0],
            tau0_sq: vec![1.0],
            tau1_sq: vec![1.0],
            omega: vec![0.5],
            a0: 0.01,
            a_scale: 0.01,
            zeta: 100.0,
        };
        assert!(spec.validate().is_err());
    }
}

use std::path::Path;

use crate::calendar::YearMonth;
use crate::data::col;
use crate::data::hp::{hp_filter, MONTHLY_LAMBDA};
use crate::data::raw::RawSeriesPanel;
use crate::error::{Error, Result};

/// Names of the fundamentals, `_f` marking the foreign country.
pub const PREDICTOR_NAMES: [&str; col::COUNT] = [
    "i_prev", "i_prev_f", "pi", "pi_f", "x", "x_f", "q", "m", "m_f", "y", "y_f", "e", "p", "p_f",
    "i", "i_f",
];

/// Regression-ready panel.
///
/// Row `t` pairs the target `Δe_t` with the fundamentals dated `t − 1`
/// (`predictor_row`), so `Δe_t = X'_{t−1} D_{S_t} β + η_t` is evaluable row by
/// row. `current_row(t)` holds the fundamentals dated `t`, which is what a
/// forecast made at `t` conditions on. The transition covariates `z_t` are
/// demeaned over the rows of this panel.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalsPanel {
    names: Vec<String>,
    dates: Vec<YearMonth>,
    target: Vec<f64>,
    predictors: Vec<f64>,
    current: Vec<f64>,
    z_raw: Vec<f64>,
    z_raw_next: Vec<f64>,
    n_predictors: usize,
    n_covariates: usize,
    z_mean: Vec<f64>,
    z: Vec<f64>,
}

impl FundamentalsPanel {
    /// Assembles a panel from row-major parts.
    ///
    /// `z_raw[t]` is the undemeaned covariate for row `t`; `z_raw_next[t]` is the
    /// covariate of row `t + 1`, known at date `t`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        names: Vec<String>,
        dates: Vec<YearMonth>,
        target: Vec<f64>,
        predictors: Vec<f64>,
        current: Vec<f64>,
        n_covariates: usize,
        z_raw: Vec<f64>,
        z_raw_next: Vec<f64>,
    ) -> Result<Self> {
        let t = dates.len();
        let r = names.len();
        if t == 0 {
            return Err(Error::Invalid("empty panel".into()));
        }
        if target.len() != t
            || predictors.len() != t * r
            || current.len() != t * r
            || z_raw.len() != t * n_covariates
            || z_raw_next.len() != t * n_covariates
        {
            return Err(Error::Invalid("panel parts have inconsistent lengths".into()));
        }
        for w in dates.windows(2) {
            if w[0].months_until(w[1]) != 1 {
                return Err(Error::NonMonthlyGap {
                    before: w[0],
                    after: w[1],
                });
            }
        }
        let all = target
            .iter()
            .chain(&predictors)
            .chain(&current)
            .chain(&z_raw)
            .chain(&z_raw_next);
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("panel contains non-finite cells".into()));
        }
        let mut panel = Self {
            names,
            dates,
            target,
            predictors,
            current,
            z_raw,
            z_raw_next,
            n_predictors: r,
            n_covariates,
            z_mean: vec![0.0; n_covariates],
            z: Vec::new(),
        };
        panel.demean();
        Ok(panel)
    }

    fn demean(&mut self) {
        let n = self.n_covariates;
        let t = self.len();
        let mut mean = vec![0.0; n];
        for row in self.z_raw.chunks_exact(n.max(1)).take(if n == 0 { 0 } else { t }) {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= t as f64;
        }
        self.z = self
            .z_raw
            .iter()
            .enumerate()
            .map(|(i, v)| v - mean[i % n])
            .collect();
        self.z_mean = mean;
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn dates(&self) -> &[YearMonth] {
        &self.dates
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn n_predictors(&self) -> usize {
        self.n_predictors
    }

    pub fn n_covariates(&self) -> usize {
        self.n_covariates
    }

    /// Fundamentals dated `t − 1`, the regressors for `Δe_t`.
    pub fn predictor_row(&self, t: usize) -> &[f64] {
        &self.predictors[t * self.n_predictors..(t + 1) * self.n_predictors]
    }

    /// Fundamentals dated `t`.
    pub fn current_row(&self, t: usize) -> &[f64] {
        &self.current[t * self.n_predictors..(t + 1) * self.n_predictors]
    }

    /// Demeaned transition covariates for row `t`.
    pub fn z(&self, t: usize) -> &[f64] {
        &self.z[t * self.n_covariates..(t + 1) * self.n_covariates]
    }

    pub fn z_mean(&self) -> &[f64] {
        &self.z_mean
    }

    /// Covariates of the row after `t`, demeaned with this panel's mean.
    pub fn z_next(&self, t: usize) -> Vec<f64> {
        let n = self.n_covariates;
        self.z_raw_next[t * n..(t + 1) * n]
            .iter()
            .zip(&self.z_mean)
            .map(|(v, m)| v - m)
            .collect()
    }

    pub fn row_of(&self, date: YearMonth) -> Option<usize> {
        let first = *self.dates.first()?;
        let k = first.months_until(date);
        (k >= 0 && (k as usize) < self.len()).then_some(k as usize)
    }

    /// 64-bit FNV-1a digest of the dates and every stored value, used to
    /// tie checkpoints to the data they were computed from.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        for d in &self.dates {
            eat(&d.ordinal().to_le_bytes());
        }
        for n in &self.names {
            eat(n.as_bytes());
        }
        let values = self
            .target
            .iter()
            .chain(&self.predictors)
            .chain(&self.current)
            .chain(&self.z_raw)
            .chain(&self.z_raw_next);
        for v in values {
            eat(&v.to_bits().to_le_bytes());
        }
        h
    }

    /// The same panel with the target replaced.
    pub fn with_target(&self, target: Vec<f64>) -> Result<Self> {
        if target.len() != self.len() {
            return Err(Error::Invalid(format!(
                "{} target values for a panel of {} rows",
                target.len(),
                self.len()
            )));
        }
        if target.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite target value".into()));
        }
        let mut out = self.clone();
        out.target = target;
        Ok(out)
    }

    /// Rows `0..=last`, with covariates re-demeaned over that window.
    pub fn window(&self, last: usize) -> Result<Self> {
        if last >= self.len() {
            return Err(Error::Invalid(format!(
                "window end {last} beyond panel of {} rows",
                self.len()
            )));
        }
        let rows = last + 1;
        let r = self.n_predictors;
        let n = self.n_covariates;
        Self::from_parts(
            self.names.clone(),
            self.dates[..rows].to_vec(),
            self.target[..rows].to_vec(),
            self.predictors[..rows * r].to_vec(),
            self.current[..rows * r].to_vec(),
            n,
            self.z_raw[..rows * n].to_vec(),
            self.z_raw_next[..rows * n].to_vec(),
        )
    }

    fn covariate_names(&self) -> Vec<String> {
        (0..self.n_covariates).map(|k| format!("z{k}")).collect()
    }

    /// Writes the panel as CSV: date, target, lagged predictors, current
    /// fundamentals (`cur_` prefix), raw covariates and next-row covariates.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        let mut header = vec!["date".to_string(), "d_e".to_string()];
        header.extend(self.names.iter().cloned());
        header.extend(self.names.iter().map(|n| format!("cur_{n}")));
        header.extend(self.covariate_names().iter().map(|n| format!("{n}_raw")));
        header.extend(self.covariate_names().iter().map(|n| format!("{n}_raw_next")));
        w.write_record(&header).map_err(|e| Error::csv(path, e))?;
        let n = self.n_covariates;
        for t in 0..self.len() {
            let mut rec = vec![self.dates[t].to_string(), self.target[t].to_string()];
            rec.extend(self.predictor_row(t).iter().map(f64::to_string));
            rec.extend(self.current_row(t).iter().map(f64::to_string));
            rec.extend(self.z_raw[t * n..(t + 1) * n].iter().map(f64::to_string));
            rec.extend(self.z_raw_next[t * n..(t + 1) * n].iter().map(f64::to_string));
            w.write_record(&rec).map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| Error::csv(path, e))?
            .iter()
            .map(str::to_string)
            .collect();
        let bad = |m: &str| Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: m.to_string(),
        };
        if header.len() < 2 || header[0] != "date" || header[1] != "d_e" {
            return Err(bad("expected leading columns `date,d_e`"));
        }
        let r = header.iter().skip(2).take_while(|h| !h.starts_with("cur_")).count();
        let n_z = header.len().checked_sub(2 + 2 * r).ok_or_else(|| bad("truncated header"))?;
        if n_z % 2 != 0 {
            return Err(bad("unbalanced covariate columns"));
        }
        let n = n_z / 2;
        let names = header[2..2 + r].to_vec();

        let (mut dates, mut target, mut predictors, mut current, mut z_raw, mut z_next) =
            (vec![], vec![], vec![], vec![], vec![], vec![]);
        for record in reader.records() {
            let record = record.map_err(|e| Error::csv(path, e))?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let parse_err = |m: String| Error::Parse {
                path: path.to_path_buf(),
                line,
                message: m,
            };
            dates.push(
                record[0]
                    .parse::<YearMonth>()
                    .map_err(|e| parse_err(e.to_string()))?,
            );
            let values = record
                .iter()
                .skip(1)
                .map(|s| s.parse::<f64>().map_err(|_| parse_err(format!("bad number `{s}`"))))
                .collect::<Result<Vec<f64>>>()?;
            if values.len() != 1 + 2 * r + 2 * n {
                return Err(parse_err("wrong number of fields".into()));
            }
            target.push(values[0]);
            predictors.extend_from_slice(&values[1..1 + r]);
            current.extend_from_slice(&values[1 + r..1 + 2 * r]);
            z_raw.extend_from_slice(&values[1 + 2 * r..1 + 2 * r + n]);
            z_next.extend_from_slice(&values[1 + 2 * r + n..]);
        }
        Self::from_parts(names, dates, target, predictors, current, n, z_raw, z_next)
    }
}

/// [`build_fundamentals_with_lambda`] with the monthly smoothing parameter.
pub fn build_fundamentals(
    home: &RawSeriesPanel,
    foreign: &RawSeriesPanel,
) -> Result<FundamentalsPanel> {
    build_fundamentals_with_lambda(home, foreign, MONTHLY_LAMBDA)
}

/// Builds the fundamentals panel for a country pair.
///
/// Levels are logged except interest rates; inflation is the month-on-month
/// log difference of CPI; `q = log EXR + log CPI* − log CPI`; the output gap is
/// the HP cycle of log industrial production over the overlapping window. The
/// first two months are lost to differencing and lagging. Transition
/// covariates are the previous month's home and foreign interest rates.
pub fn build_fundamentals_with_lambda(
    home: &RawSeriesPanel,
    foreign: &RawSeriesPanel,
    lambda: f64,
) -> Result<FundamentalsPanel> {
    let exr_home = home
        .series()
        .exchange_rate
        .as_ref()
        .ok_or_else(|| Error::Invalid("home panel has no exchange rate series".into()))?;
    let (h0, f0) = match (home.first_date(), foreign.first_date()) {
        (Some(h), Some(f)) => (h, f),
        _ => return Err(Error::Invalid("empty input panel".into())),
    };
    let start = h0.max(f0);
    let end = (*home.dates().last().unwrap()).min(*foreign.dates().last().unwrap());
    let span = start.months_until(end) + 1;
    if span < 6 {
        return Err(Error::Invalid(format!(
            "overlap {start}..{end} too short after losing two months to lags"
        )));
    }
    let span = span as usize;
    let ho = h0.months_until(start) as usize;
    let fo = f0.months_until(start) as usize;
    let slice = |v: &[f64], off: usize| v[off..off + span].to_vec();
    let ln = |v: Vec<f64>| v.into_iter().map(f64::ln).collect::<Vec<_>>();

    let (hs, fs) = (home.series(), foreign.series());
    let e = ln(slice(exr_home, ho));
    let p = ln(slice(&hs.cpi, ho));
    let p_f = ln(slice(&fs.cpi, fo));
    let y = ln(slice(&hs.industrial_production, ho));
    let y_f = ln(slice(&fs.industrial_production, fo));
    let m = ln(slice(&hs.money, ho));
    let m_f = ln(slice(&fs.money, fo));
    let i = slice(&hs.interest_rate, ho);
    let i_f = slice(&fs.interest_rate, fo);
    let x = hp_filter(&y, lambda)?.gap;
    let x_f = hp_filter(&y_f, lambda)?.gap;

    // Fundamentals vector dated s, defined for s >= 1.
    let fundamentals = |s: usize| -> [f64; col::COUNT] {
        let mut v = [0.0; col::COUNT];
        v[col::I_PREV] = i[s - 1];
        v[col::I_PREV_F] = i_f[s - 1];
        v[col::PI] = p[s] - p[s - 1];
        v[col::PI_F] = p_f[s] - p_f[s - 1];
        v[col::X] = x[s];
        v[col::X_F] = x_f[s];
        v[col::Q] = e[s] + p_f[s] - p[s];
        v[col::M] = m[s];
        v[col::M_F] = m_f[s];
        v[col::Y] = y[s];
        v[col::Y_F] = y_f[s];
        v[col::E] = e[s];
        v[col::P] = p[s];
        v[col::P_F] = p_f[s];
        v[col::I] = i[s];
        v[col::I_F] = i_f[s];
        v
    };

    let rows = span - 2;
    let mut dates = Vec::with_capacity(rows);
    let mut target = Vec::with_capacity(rows);
    let mut predictors = Vec::with_capacity(rows * col::COUNT);
    let mut current = Vec::with_capacity(rows * col::COUNT);
    let mut z_raw = Vec::with_capacity(rows * 2);
    let mut z_raw_next = Vec::with_capacity(rows * 2);
    for s in 2..span {
        dates.push(start.add_months(s as i64));
        target.push(e[s] - e[s - 1]);
        predictors.extend_from_slice(&fundamentals(s - 1));
        current.extend_from_slice(&fundamentals(s));
        z_raw.extend_from_slice(&[i[s - 1], i_f[s - 1]]);
        z_raw_next.extend_from_slice(&[i[s], i_f[s]]);
    }
    FundamentalsPanel::from_parts(
        PREDICTOR_NAMES.iter().map(|s| s.to_string()).collect(),
        dates,
        target,
        predictors,
        current,
        2,
        z_raw,
        z_raw_next,
    )
}

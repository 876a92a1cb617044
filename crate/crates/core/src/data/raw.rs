use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calendar::YearMonth;
use crate::error::{Error, Result};

/// Maps the logical series of one country onto CSV column names.
///
/// The exchange rate is optional because the base country (the US dollar side)
/// has no bilateral rate of its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSchema {
    #[serde(default = "default_date_column")]
    pub date: String,
    #[serde(default)]
    pub exchange_rate: Option<String>,
    pub industrial_production: String,
    pub money: String,
    pub interest_rate: String,
    pub cpi: String,
}

fn default_date_column() -> String {
    "date".to_string()
}

impl SeriesSchema {
    /// Conventional column names `EXR`, `IP`, `M`, `IR3M`, `CPI`, optionally
    /// with a prefix such as `CA_` for wide files.
    pub fn standard(prefix: &str, with_exchange_rate: bool) -> Self {
        Self {
            date: default_date_column(),
            exchange_rate: with_exchange_rate.then(|| format!("{prefix}EXR")),
            industrial_production: format!("{prefix}IP"),
            money: format!("{prefix}M"),
            interest_rate: format!("{prefix}IR3M"),
            cpi: format!("{prefix}CPI"),
        }
    }
}

/// Monthly series of one country, complete over its date range.
#[derive(Debug, Clone, PartialEq)]
pub struct CountrySeries {
    pub exchange_rate: Option<Vec<f64>>,
    pub industrial_production: Vec<f64>,
    pub money: Vec<f64>,
    /// Three-month money market rate in percent.
    pub interest_rate: Vec<f64>,
    pub cpi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawSeriesPanel {
    dates: Vec<YearMonth>,
    series: CountrySeries,
}

impl RawSeriesPanel {
    /// Validates contiguity, lengths and positivity of the log-transformed series.
    pub fn new(dates: Vec<YearMonth>, series: CountrySeries) -> Result<Self> {
        check_dates(&dates)?;
        let n = dates.len();
        let mut columns: Vec<(&str, &[f64], bool)> = vec![
            ("industrial_production", &series.industrial_production, true),
            ("money", &series.money, true),
            ("interest_rate", &series.interest_rate, false),
            ("cpi", &series.cpi, true),
        ];
        if let Some(exr) = &series.exchange_rate {
            columns.push(("exchange_rate", exr, true));
        }
        for (name, values, logged) in columns {
            if values.len() != n {
                return Err(Error::Invalid(format!(
                    "series `{name}` has {} values for {n} dates",
                    values.len()
                )));
            }
            for (date, &v) in dates.iter().zip(values) {
                if !v.is_finite() {
                    return Err(Error::InteriorMissing {
                        column: name.to_string(),
                        date: *date,
                    });
                }
                if logged && v <= 0.0 {
                    return Err(Error::NonPositive {
                        column: name.to_string(),
                        date: *date,
                        value: v,
                    });
                }
            }
        }
        Ok(Self { dates, series })
    }

    pub fn dates(&self) -> &[YearMonth] {
        &self.dates
    }

    pub fn series(&self) -> &CountrySeries {
        &self.series
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn first_date(&self) -> Option<YearMonth> {
        self.dates.first().copied()
    }
}

fn check_dates(dates: &[YearMonth]) -> Result<()> {
    for w in dates.windows(2) {
        match w[0].months_until(w[1]) {
            1 => {}
            0 => return Err(Error::DuplicateDate { date: w[1] }),
            _ => {
                return Err(Error::NonMonthlyGap {
                    before: w[0],
                    after: w[1],
                })
            }
        }
    }
    Ok(())
}

fn is_missing_marker(s: &str) -> bool {
    matches!(
        s.trim(),
        "" | "NA" | "N/A" | "#N/A" | "NaN" | "nan" | "." | "null"
    )
}

/// Reads one country's series from a CSV file.
///
/// Rows are sorted by date; leading and trailing rows with any missing value
/// are trimmed, interior gaps are an error.
pub fn load_panel(path: &Path, schema: &SeriesSchema) -> Result<RawSeriesPanel> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    let index: HashMap<&str, usize> = headers.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let find = |name: &str| {
        index.get(name).copied().ok_or_else(|| Error::MissingColumn {
            path: path.to_path_buf(),
            column: name.to_string(),
        })
    };

    let date_col = find(&schema.date)?;
    let mut value_cols: Vec<(&str, usize)> = vec![
        (schema.industrial_production.as_str(), find(&schema.industrial_production)?),
        (schema.money.as_str(), find(&schema.money)?),
        (schema.interest_rate.as_str(), find(&schema.interest_rate)?),
        (schema.cpi.as_str(), find(&schema.cpi)?),
    ];
    if let Some(exr) = &schema.exchange_rate {
        value_cols.push((exr.as_str(), find(exr)?));
    }

    let mut rows: Vec<(YearMonth, Vec<Option<f64>>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let date: YearMonth = record
            .get(date_col)
            .unwrap_or("")
            .parse()
            .map_err(|e: Error| parse_err(e.to_string()))?;
        let mut values = Vec::with_capacity(value_cols.len());
        for &(name, c) in &value_cols {
            let raw = record.get(c).unwrap_or("");
            if is_missing_marker(raw) {
                values.push(None);
            } else {
                let v: f64 = raw
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(format!("column `{name}`: cannot parse `{raw}`")))?;
                values.push(Some(v).filter(|v| v.is_finite()));
            }
        }
        rows.push((date, values));
    }
    rows.sort_by_key(|(d, _)| *d);
    let dates: Vec<YearMonth> = rows.iter().map(|(d, _)| *d).collect();
    check_dates(&dates)?;

    let complete = |r: &(YearMonth, Vec<Option<f64>>)| r.1.iter().all(Option::is_some);
    let first = rows.iter().position(complete);
    let last = rows.iter().rposition(complete);
    let (first, last) = match (first, last) {
        (Some(f), Some(l)) => (f, l),
        _ => {
            return Err(Error::Invalid(format!(
                "{}: no complete rows",
                path.display()
            )))
        }
    };
    let window = &rows[first..=last];
    for (date, values) in window {
        if let Some(i) = values.iter().position(Option::is_none) {
            return Err(Error::InteriorMissing {
                column: value_cols[i].0.to_string(),
                date: *date,
            });
        }
    }
    let column = |i: usize| -> Vec<f64> { window.iter().map(|(_, v)| v[i].unwrap()).collect() };
    let series = CountrySeries {
        industrial_production: column(0),
        money: column(1),
        interest_rate: column(2),
        cpi: column(3),
        exchange_rate: schema.exchange_rate.as_ref().map(|_| column(4)),
    };
    let panel_dates = window.iter().map(|(d, _)| *d).collect();
    RawSeriesPanel::new(panel_dates, series).map_err(|e| match e {
        Error::NonPositive { date, value, column } => Error::NonPositive {
            column: schema_name(schema, &column),
            date,
            value,
        },
        other => other,
    })
}

fn schema_name(schema: &SeriesSchema, logical: &str) -> String {
    match logical {
        "industrial_production" => schema.industrial_production.clone(),
        "money" => schema.money.clone(),
        "interest_rate" => schema.interest_rate.clone(),
        "cpi" => schema.cpi.clone(),
        "exchange_rate" => schema.exchange_rate.clone().unwrap_or_default(),
        other => other.to_string(),
    }
}

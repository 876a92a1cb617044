//! Forecast comparison against the random walk.
//!
//! Paths are cumulative sums over origins of the per-origin gap between a
//! model and the random walk: squared point errors (negative is better than
//! the random walk) and log predictive scores (positive is better). Sums run
//! in origin order with compensated summation, so results depend only on the
//! set of records, not on the order they arrive in.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;

use crate::calendar::YearMonth;
use crate::error::{Error, Result};
use crate::forecast::{ForecastRecord, RANDOM_WALK_ID};
use crate::model::{ModelClass, ModelConfig, RegimeFamily, Shrinkage, TransitionMode, VarianceMode};
use crate::numeric::CompensatedSum;

/// Number of cells per class kept in the top path files.
pub const TOP_N: usize = 5;

/// Pairs model and benchmark records of one horizon by origin, in origin order.
fn align<'a>(model: &'a [ForecastRecord], rw: &'a [ForecastRecord]) -> Result<Vec<(&'a ForecastRecord, &'a ForecastRecord)>> {
    if model.len() != rw.len() {
        return Err(Error::Invalid(format!(
            "{} model records against {} benchmark records",
            model.len(),
            rw.len()
        )));
    }
    let key = |r: &ForecastRecord| (r.origin, r.horizon);
    let mut m: Vec<&ForecastRecord> = model.iter().collect();
    let mut b: Vec<&ForecastRecord> = rw.iter().collect();
    m.sort_by_key(|r| key(r));
    b.sort_by_key(|r| key(r));
    for w in m.windows(2) {
        if key(w[0]) == key(w[1]) {
            return Err(Error::Invalid(format!(
                "duplicate record for {} at {} h={}",
                w[0].model_id, w[0].origin, w[0].horizon
            )));
        }
    }
    m.into_iter()
        .zip(b)
        .map(|(a, b)| {
            if key(a) != key(b) {
                Err(Error::Invalid(format!(
                    "records misaligned: {} h={} against {} h={}",
                    a.origin, a.horizon, b.origin, b.horizon
                )))
            } else {
                Ok((a, b))
            }
        })
        .collect()
}

fn cumulative(pairs: &[(&ForecastRecord, &ForecastRecord)], gap: impl Fn(&ForecastRecord, &ForecastRecord) -> f64) -> Vec<f64> {
    let mut acc = CompensatedSum::default();
    pairs
        .iter()
        .map(|(m, b)| {
            acc.add(gap(m, b));
            acc.value()
        })
        .collect()
}

fn sq_err(r: &ForecastRecord) -> f64 {
    let e = r.realized - r.point;
    e * e
}

/// `Σ_{s≤t} (e²_model,s − e²_rw,s)` over aligned origins.
pub fn csfe_difference(model: &[ForecastRecord], rw: &[ForecastRecord]) -> Result<Vec<f64>> {
    Ok(cumulative(&align(model, rw)?, |m, b| sq_err(m) - sq_err(b)))
}

/// `Σ_{s≤t} (LPS_model,s − LPS_rw,s)` over aligned origins.
pub fn cumulative_lbf(model: &[ForecastRecord], rw: &[ForecastRecord]) -> Result<Vec<f64>> {
    Ok(cumulative(&align(model, rw)?, |m, b| m.log_score - b.log_score))
}

/// Grid metadata of one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellMeta {
    pub model_id: String,
    pub class: ModelClass,
    pub family: RegimeFamily,
    pub states: usize,
    pub transition: TransitionMode,
    pub variance: VarianceMode,
    pub shrinkage: Shrinkage,
}

impl From<&ModelConfig> for CellMeta {
    fn from(c: &ModelConfig) -> Self {
        Self {
            model_id: c.model_id(),
            class: c.class(),
            family: c.family,
            states: c.states,
            transition: c.transition,
            variance: c.variance,
            shrinkage: c.shrinkage,
        }
    }
}

/// Paths of one cell at one horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub model_id: String,
    pub class: ModelClass,
    pub horizon: usize,
    pub origins: Vec<YearMonth>,
    pub csfe_path: Vec<f64>,
    pub lbf_path: Vec<f64>,
    pub terminal_lbf: f64,
    pub terminal_csfe: f64,
}

/// Cells of one class at one horizon, best terminal LBF first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ranking {
    pub class: ModelClass,
    pub horizon: usize,
    pub model_ids: Vec<String>,
    pub terminal_lbf: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub grid: Vec<CellMeta>,
    pub horizons: Vec<usize>,
    pub cells: Vec<CellReport>,
    pub rankings: Vec<Ranking>,
    /// Grid cells without any forecast record.
    pub missing: Vec<String>,
}

/// Order of `(id, value)` entries by value descending, ties by id.
pub fn rank_by_value(entries: &[(String, f64)]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..entries.len()).collect();
    idx.sort_by(|&a, &b| {
        entries[b]
            .1
            .total_cmp(&entries[a].1)
            .then_with(|| entries[a].0.cmp(&entries[b].0))
    });
    idx
}

/// Paths and rankings for every grid cell with records.
///
/// Cells without records are listed as missing and the rest of the report is
/// still produced; a class without any cell at a horizon is left out with a
/// warning. Fails when the random-walk records are absent or a cell's origins
/// do not line up with them.
pub fn build_report(records: &[ForecastRecord], grid: &[ModelConfig]) -> Result<EvaluationReport> {
    let mut by_cell: BTreeMap<(&str, usize), Vec<ForecastRecord>> = BTreeMap::new();
    for r in records {
        by_cell.entry((r.model_id.as_str(), r.horizon)).or_default().push(r.clone());
    }
    let horizons: BTreeSet<usize> = records
        .iter()
        .filter(|r| r.model_id == RANDOM_WALK_ID)
        .map(|r| r.horizon)
        .collect();
    if horizons.is_empty() {
        return Err(Error::Invalid("no random-walk records to compare against".into()));
    }
    let meta: Vec<CellMeta> = grid.iter().map(CellMeta::from).collect();
    let mut cells = Vec::new();
    let mut missing = Vec::new();
    for m in &meta {
        let mut any = false;
        for &h in &horizons {
            let Some(recs) = by_cell.get(&(m.model_id.as_str(), h)) else {
                continue;
            };
            any = true;
            let rw: Vec<ForecastRecord> = by_cell[&(RANDOM_WALK_ID, h)]
                .iter()
                .filter(|b| recs.iter().any(|r| r.origin == b.origin))
                .cloned()
                .collect();
            let csfe_path = csfe_difference(recs, &rw)?;
            let lbf_path = cumulative_lbf(recs, &rw)?;
            let mut origins: Vec<YearMonth> = recs.iter().map(|r| r.origin).collect();
            origins.sort();
            cells.push(CellReport {
                model_id: m.model_id.clone(),
                class: m.class,
                horizon: h,
                origins,
                terminal_lbf: lbf_path.last().copied().unwrap_or(0.0),
                terminal_csfe: csfe_path.last().copied().unwrap_or(0.0),
                csfe_path,
                lbf_path,
            });
        }
        if !any {
            log::warn!("no forecast records for grid cell {}", m.model_id);
            missing.push(m.model_id.clone());
        }
    }
    let mut rankings = Vec::new();
    for &h in &horizons {
        for class in [ModelClass::MsTvp, ModelClass::MsFt, ModelClass::Linear] {
            let entries: Vec<(String, f64)> = cells
                .iter()
                .filter(|c| c.class == class && c.horizon == h)
                .map(|c| (c.model_id.clone(), c.terminal_lbf))
                .collect();
            if entries.is_empty() {
                if grid.iter().any(|c| c.class() == class) {
                    log::warn!("class {} has no evaluated cells at horizon {h}", class.label());
                }
                continue;
            }
            let order = rank_by_value(&entries);
            rankings.push(Ranking {
                class,
                horizon: h,
                model_ids: order.iter().map(|&i| entries[i].0.clone()).collect(),
                terminal_lbf: order.iter().map(|&i| entries[i].1).collect(),
            });
        }
    }
    Ok(EvaluationReport {
        grid: meta,
        horizons: horizons.into_iter().collect(),
        cells,
        rankings,
        missing,
    })
}

impl EvaluationReport {
    pub fn cell(&self, model_id: &str, horizon: usize) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.model_id == model_id && c.horizon == horizon)
    }

    /// Writes `lbf_terminal.csv`, `lbf_path.csv`, `csfe_path.csv`, one
    /// `top5_<class>_h<h>.csv` per ranking and `summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("lbf_terminal.csv");
        let mut w = csv::Writer::from_path(&path).map_err(|e| Error::csv(&path, e))?;
        w.write_record(["model_id", "horizon", "value"]).map_err(|e| Error::csv(&path, e))?;
        for c in &self.cells {
            w.write_record([c.model_id.clone(), c.horizon.to_string(), c.terminal_lbf.to_string()])
                .map_err(|e| Error::csv(&path, e))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;

        for (name, pick) in [
            ("lbf_path.csv", (|c: &CellReport| &c.lbf_path) as fn(&CellReport) -> &Vec<f64>),
            ("csfe_path.csv", |c: &CellReport| &c.csfe_path),
        ] {
            let path = dir.join(name);
            let mut w = csv::Writer::from_path(&path).map_err(|e| Error::csv(&path, e))?;
            w.write_record(["model_id", "horizon", "origin", "value"])
                .map_err(|e| Error::csv(&path, e))?;
            for c in &self.cells {
                for (o, v) in c.origins.iter().zip(pick(c)) {
                    w.write_record([c.model_id.clone(), c.horizon.to_string(), o.to_string(), v.to_string()])
                        .map_err(|e| Error::csv(&path, e))?;
                }
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
        }

        for r in &self.rankings {
            let path = dir.join(format!("top5_{}_h{}.csv", r.class.label(), r.horizon));
            let mut w = csv::Writer::from_path(&path).map_err(|e| Error::csv(&path, e))?;
            w.write_record(["rank", "model_id", "origin", "lbf", "csfe"])
                .map_err(|e| Error::csv(&path, e))?;
            for (rank, id) in r.model_ids.iter().take(TOP_N).enumerate() {
                let c = self.cell(id, r.horizon).expect("ranked cell exists");
                for i in 0..c.origins.len() {
                    w.write_record([
                        (rank + 1).to_string(),
                        id.clone(),
                        c.origins[i].to_string(),
                        c.lbf_path[i].to_string(),
                        c.csfe_path[i].to_string(),
                    ])
                    .map_err(|e| Error::csv(&path, e))?;
                }
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
        }

        #[derive(Serialize)]
        struct Summary<'a> {
            grid: &'a [CellMeta],
            horizons: &'a [usize],
            terminal: Vec<Terminal<'a>>,
            rankings: &'a [Ranking],
            missing: &'a [String],
        }
        #[derive(Serialize)]
        struct Terminal<'a> {
            model_id: &'a str,
            horizon: usize,
            origins: usize,
            lbf: f64,
            csfe_difference: f64,
        }
        let summary = Summary {
            grid: &self.grid,
            horizons: &self.horizons,
            terminal: self
                .cells
                .iter()
                .map(|c| Terminal {
                    model_id: &c.model_id,
                    horizon: c.horizon,
                    origins: c.origins.len(),
                    lbf: c.terminal_lbf,
                    csfe_difference: c.terminal_csfe,
                })
                .collect(),
            rankings: &self.rankings,
            missing: &self.missing,
        };
        let path = dir.join("summary.json");
        let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Invalid(e.to_string()))?;
        std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
    }
}

//! Config-driven experiments: data transformation, the recursive forecast
//! grid with checkpoints, in-sample diagnostics and reports.
//!
//! Output layout under the configured output directory:
//!
//! ```text
//! panel.csv, transform_log.txt          transform
//! checkpoints/<model_id>/<origin>.json  one per finished (cell, origin) task
//! records/<model_id>.csv                merged forecast records per cell
//! records/random-walk.csv               benchmark records
//! draws/<model_id>.csv                  predictive draws, when kept
//! report/                               evaluation tables and summary.json
//! diagnose/<model_id>/                  in-sample state summaries
//! ```

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calendar::YearMonth;
use crate::data::{build_fundamentals_with_lambda, load_panel, FundamentalsPanel, SeriesSchema, MONTHLY_LAMBDA};
use crate::distributions::RngStream;
use crate::error::{Error, Result};
use crate::evaluation::{build_report, EvaluationReport};
use crate::forecast::{
    forecast_origin, forecast_origins, random_walk_forecast, read_records, write_draws, write_records, ForecastRecord,
    RANDOM_WALK_ID,
};
use crate::gibbs::{run_mcmc, state_probability_summary, Model};
use crate::model::{
    default_grid, default_horizons, default_t0, McmcSettings, ModelConfig, PriorSettings, Shrinkage, StructuralModel,
    TransitionMode, VarianceMode,
};

/// Environment variable that relocates relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "FXREGIME_OUTPUT_ROOT";

fn default_workers() -> usize {
    1
}

fn default_output() -> PathBuf {
    PathBuf::from("output")
}

fn default_lambda() -> f64 {
    MONTHLY_LAMBDA
}

fn home_schema() -> SeriesSchema {
    SeriesSchema::standard("", true)
}

fn foreign_schema() -> SeriesSchema {
    SeriesSchema::standard("", false)
}

/// Input files of the country pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// Home country series, including the bilateral exchange rate.
    pub home: PathBuf,
    pub foreign: PathBuf,
    #[serde(default = "home_schema")]
    pub home_schema: SeriesSchema,
    #[serde(default = "foreign_schema")]
    pub foreign_schema: SeriesSchema,
    #[serde(default = "default_lambda")]
    pub hp_lambda: f64,
    /// Panel location; defaults to `panel.csv` in the output directory.
    #[serde(default)]
    pub panel: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridFamily {
    Theoretical,
    KitchenSink,
}

fn all_families() -> Vec<GridFamily> {
    vec![GridFamily::Theoretical, GridFamily::KitchenSink]
}

fn all_states() -> Vec<usize> {
    vec![2, 3, 4]
}

fn all_transitions() -> Vec<TransitionMode> {
    vec![TransitionMode::Tvp, TransitionMode::Fixed]
}

fn all_variances() -> Vec<VarianceMode> {
    vec![VarianceMode::Common, VarianceMode::StateSpecific]
}

fn all_shrinkages() -> Vec<Shrinkage> {
    vec![Shrinkage::None, Shrinkage::Ssvs]
}

fn all_linear() -> Vec<StructuralModel> {
    StructuralModel::ALL.to_vec()
}

/// Lists whose Cartesian product forms the grid. `states` applies to the
/// kitchen-sink family only; theoretical models always have four states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "all_families")]
    pub families: Vec<GridFamily>,
    #[serde(default = "all_states")]
    pub states: Vec<usize>,
    #[serde(default = "all_transitions")]
    pub transitions: Vec<TransitionMode>,
    #[serde(default = "all_variances")]
    pub variances: Vec<VarianceMode>,
    #[serde(default = "all_shrinkages")]
    pub shrinkages: Vec<Shrinkage>,
    #[serde(default = "all_linear")]
    pub linear: Vec<StructuralModel>,
}

impl GridSpec {
    pub fn expand(&self) -> Vec<ModelConfig> {
        let mut out = Vec::new();
        for &family in &self.families {
            let states: &[usize] = match family {
                GridFamily::Theoretical => &[4],
                GridFamily::KitchenSink => &self.states,
            };
            for &k in states {
                for &t in &self.transitions {
                    for &s in &self.shrinkages {
                        for &v in &self.variances {
                            out.push(match family {
                                GridFamily::Theoretical => ModelConfig::theoretical(t, v, s),
                                GridFamily::KitchenSink => ModelConfig::kitchen_sink(k, t, v, s),
                            });
                        }
                    }
                }
            }
        }
        out.extend(self.linear.iter().map(|&m| ModelConfig::linear(m)));
        out
    }
}

/// One experiment, read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Label of the country pair, for example `USD/CAD`.
    #[serde(default)]
    pub pair: Option<String>,
    pub data: DataConfig,
    #[serde(default = "default_t0")]
    pub t0: YearMonth,
    #[serde(default = "default_horizons")]
    pub horizons: Vec<usize>,
    /// Only the first this many origins, for desk-scale runs.
    #[serde(default)]
    pub max_origins: Option<usize>,
    #[serde(default)]
    pub mcmc: McmcSettings,
    #[serde(default)]
    pub priors: PriorSettings,
    /// Absent means the full default roster.
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// Also write the raw predictive draws.
    #[serde(default)]
    pub keep_draws: bool,
    /// Directory relative paths resolve against; the config file's directory.
    #[serde(skip)]
    pub base_dir: PathBuf,
    /// Replaces `base_dir` for a relative `output`.
    #[serde(skip)]
    pub output_root: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: Self = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizons.is_empty() || self.horizons.contains(&0) {
            return Err(Error::Config("horizons must be a nonempty list of positive integers".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if self.max_origins == Some(0) {
            return Err(Error::Config("max_origins must be positive".into()));
        }
        if !(self.data.hp_lambda > 0.0 && self.data.hp_lambda.is_finite()) {
            return Err(Error::Config(format!("hp_lambda must be positive, got {}", self.data.hp_lambda)));
        }
        self.mcmc.validate()?;
        self.priors.validate()?;
        let cells = self.cells();
        if cells.is_empty() {
            return Err(Error::Config("the model grid is empty".into()));
        }
        let mut ids: Vec<String> = cells.iter().map(ModelConfig::model_id).collect();
        ids.sort();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!("grid lists {} twice", w[0])));
        }
        for c in &cells {
            c.validate()?;
        }
        Ok(())
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        match &self.output_root {
            Some(root) if self.output.is_relative() => root.join(&self.output),
            _ => self.resolve(&self.output),
        }
    }

    pub fn panel_path(&self) -> PathBuf {
        match &self.data.panel {
            Some(p) => self.resolve(p),
            None => self.output_dir().join("panel.csv"),
        }
    }

    /// Grid cells carrying the experiment's priors, chain lengths, seed, horizons and t0.
    pub fn cells(&self) -> Vec<ModelConfig> {
        let base = match &self.grid {
            Some(g) => g.expand(),
            None => default_grid(),
        };
        base.into_iter()
            .map(|c| ModelConfig {
                priors: self.priors,
                mcmc: self.mcmc,
                seed: self.seed,
                horizons: self.horizons.clone(),
                t0: self.t0,
                ..c
            })
            .collect()
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes through a temporary file and a rename, so readers never see a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
        f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    }
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Builds the fundamentals panel and writes it with a log of the transformations.
pub fn transform(config: &ExperimentConfig) -> Result<FundamentalsPanel> {
    let home_path = config.resolve(&config.data.home);
    let foreign_path = config.resolve(&config.data.foreign);
    let home = load_panel(&home_path, &config.data.home_schema)?;
    let foreign = load_panel(&foreign_path, &config.data.foreign_schema)?;
    let panel = build_fundamentals_with_lambda(&home, &foreign, config.data.hp_lambda)?;
    let out = config.panel_path();
    if let Some(dir) = out.parent() {
        create_dir(dir)?;
    }
    panel.write_csv(&out)?;

    let dates = panel.dates();
    let log_lines = [
        format!("pair: {}", config.pair.as_deref().unwrap_or("unnamed")),
        // As written in the config, so the log does not depend on where the run lives.
        format!("home: {}", config.data.home.display()),
        format!("foreign: {}", config.data.foreign.display()),
        format!(
            "rows: {} ({} to {})",
            panel.len(),
            dates[0],
            dates[dates.len() - 1]
        ),
        "target d_e: first difference of log exchange rate".into(),
        "e: log exchange rate".into(),
        "p, p_f: log CPI".into(),
        "pi, pi_f: first difference of log CPI".into(),
        "q: log exchange rate + log foreign CPI - log home CPI".into(),
        "m, m_f: log money".into(),
        "y, y_f: log industrial production".into(),
        format!(
            "x, x_f: cycle of log industrial production, two-sided HP filter over the overlap, lambda {}",
            config.data.hp_lambda
        ),
        "i, i_f: three-month interest rate in percent; i_prev, i_prev_f: its first lag".into(),
        "predictors: fundamentals dated one month before the target".into(),
        "transition covariates: lagged home and foreign interest rates, demeaned per estimation window".into(),
    ];
    let log_path = out.with_file_name("transform_log.txt");
    std::fs::write(&log_path, log_lines.join("\n") + "\n").map_err(|e| Error::io(&log_path, e))?;
    Ok(panel)
}

fn load_panel_for(config: &ExperimentConfig) -> Result<FundamentalsPanel> {
    let path = config.panel_path();
    if !path.exists() {
        return Err(Error::Config(format!(
            "panel {} not found; run `transform` first",
            path.display()
        )));
    }
    FundamentalsPanel::read_csv(&path)
}

/// Saved result of one (cell, origin) task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Checkpoint {
    config: ModelConfig,
    origin: YearMonth,
    panel: String,
    keep_draws: bool,
    records: Vec<ForecastRecord>,
}

fn checkpoint_path(dir: &Path, model_id: &str, origin: YearMonth) -> PathBuf {
    dir.join("checkpoints").join(model_id).join(format!("{origin}.json"))
}

fn read_checkpoint(path: &Path, expect: &Checkpoint) -> Option<Vec<ForecastRecord>> {
    let text = std::fs::read_to_string(path).ok()?;
    let cp: Checkpoint = serde_json::from_str(&text).ok()?;
    let same = cp.config == expect.config
        && cp.origin == expect.origin
        && cp.panel == expect.panel
        && cp.keep_draws == expect.keep_draws;
    same.then_some(cp.records)
}

/// Outcome of [`run`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub cells: usize,
    pub origins: usize,
    pub tasks: usize,
    /// Tasks read back from checkpoints instead of recomputed.
    pub resumed: usize,
    pub failed: Vec<String>,
}

/// Forecasts every grid cell at every origin, plus the random walk, then
/// writes merged records and the evaluation report.
///
/// Finished tasks are checkpointed, and a rerun with the same settings picks
/// them up instead of recomputing. Output files do not depend on the worker
/// count. When a task fails the remaining cells are still written and
/// reported, and the first failure is returned.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let panel = load_panel_for(config)?;
    let out = config.output_dir();
    let cells = config.cells();
    let origins: Vec<usize> = forecast_origins(&panel, config.t0, &config.horizons)?
        .take(config.max_origins.unwrap_or(usize::MAX))
        .collect();
    let fingerprint = format!("{:016x}", panel.fingerprint());
    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| origins.iter().map(move |&o| (c, o)))
        .collect();
    log::info!(
        "{} cells x {} origins on {} worker(s)",
        cells.len(),
        origins.len(),
        config.workers
    );
    // The sampler itself only logs this per window at debug level.
    if let Some(&first) = origins.first() {
        for cell in &cells {
            let m: usize = cell.resolve_regimes(panel.n_predictors())?.iter().map(|r| r.len()).sum();
            if first + 1 < 10 * m {
                log::warn!(
                    "{}: first window has {} observations for {m} coefficients (fewer than {})",
                    cell.model_id(),
                    first + 1,
                    10 * m
                );
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let started = Instant::now();
    let results: Vec<Result<(Vec<ForecastRecord>, bool)>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(c, o)| {
                let cell = &cells[c];
                let id = cell.model_id();
                let date = panel.dates()[o];
                let path = checkpoint_path(&out, &id, date);
                let mut expect = Checkpoint {
                    config: cell.clone(),
                    origin: date,
                    panel: fingerprint.clone(),
                    keep_draws: config.keep_draws,
                    records: Vec::new(),
                };
                if let Some(records) = read_checkpoint(&path, &expect) {
                    return Ok((records, true));
                }
                let t = Instant::now();
                let records = forecast_origin(&panel, cell, o, config.keep_draws)?;
                log::debug!("{id} at {date}: {:.1}s", t.elapsed().as_secs_f64());
                expect.records = records;
                create_dir(path.parent().expect("checkpoint has a parent"))?;
                let json = serde_json::to_vec(&expect).map_err(|e| Error::Invalid(e.to_string()))?;
                write_atomic(&path, &json)?;
                Ok((expect.records, false))
            })
            .collect()
    });
    log::info!("forecasts finished in {:.1}s", started.elapsed().as_secs_f64());

    // Merge in task order, which is fixed, so files do not depend on scheduling.
    let mut per_cell: BTreeMap<usize, Vec<ForecastRecord>> = BTreeMap::new();
    let mut errors: BTreeMap<usize, Error> = BTreeMap::new();
    let mut resumed = 0;
    for (&(c, _), result) in tasks.iter().zip(results) {
        match result {
            Ok((records, was_resumed)) => {
                resumed += usize::from(was_resumed);
                per_cell.entry(c).or_default().extend(records);
            }
            Err(e) => {
                errors.entry(c).or_insert(e);
            }
        }
    }

    let mut rw = Vec::new();
    for &o in &origins {
        for &h in &config.horizons {
            if o + h < panel.len() {
                rw.push(random_walk_forecast(&panel, o, h)?);
            }
        }
    }

    let records_dir = out.join("records");
    create_dir(&records_dir)?;
    write_records(&records_dir.join(format!("{RANDOM_WALK_ID}.csv")), &rw)?;
    let mut all = rw;
    for (c, cell) in cells.iter().enumerate() {
        if errors.contains_key(&c) {
            continue;
        }
        let mut records = per_cell.remove(&c).unwrap_or_default();
        records.sort_by_key(|r| (r.origin, r.horizon));
        let id = cell.model_id();
        write_records(&records_dir.join(format!("{id}.csv")), &records)?;
        if config.keep_draws {
            let draws_dir = out.join("draws");
            create_dir(&draws_dir)?;
            write_draws(&draws_dir.join(format!("{id}.csv")), &records)?;
        }
        all.extend(records);
    }
    let report = build_report(&all, &cells)?;
    report.write(&out.join("report"))?;

    let failed: Vec<String> = errors.keys().map(|&c| cells[c].model_id()).collect();
    let summary = RunSummary {
        cells: cells.len(),
        origins: origins.len(),
        tasks: tasks.len(),
        resumed,
        failed: failed.clone(),
    };
    if let Some((c, e)) = errors.into_iter().next() {
        let msg = format!("{} of {} cells failed; first, {}: {e}", failed.len(), cells.len(), cells[c].model_id());
        return Err(match e {
            Error::Numerical(_) => Error::Numerical(msg),
            _ => Error::Invalid(msg),
        });
    }
    Ok(summary)
}

/// Rebuilds the evaluation report from the persisted record files alone.
pub fn report(config: &ExperimentConfig) -> Result<EvaluationReport> {
    let out = config.output_dir();
    let records_dir = out.join("records");
    let cells = config.cells();
    let mut all = read_records(&records_dir.join(format!("{RANDOM_WALK_ID}.csv")))?;
    for cell in &cells {
        let path = records_dir.join(format!("{}.csv", cell.model_id()));
        if path.exists() {
            all.extend(read_records(&path)?);
        }
    }
    let report = build_report(&all, &cells)?;
    report.write(&out.join("report"))?;
    Ok(report)
}

/// Estimates one cell on the full panel and writes its filtered state
/// probabilities, transition paths and posterior draws.
pub fn diagnose(config: &ExperimentConfig, model_id: &str) -> Result<PathBuf> {
    let cells = config.cells();
    let cell = cells.iter().find(|c| c.model_id() == model_id).ok_or_else(|| {
        let ids: Vec<String> = cells.iter().map(ModelConfig::model_id).collect();
        Error::Config(format!("no grid cell `{model_id}`; known cells: {}", ids.join(", ")))
    })?;
    let panel = load_panel_for(config)?;
    let model = Model::from_config(&panel, cell)?;
    let mut rng = RngStream::derive(config.seed, &["diagnose", model_id]);
    let sample = run_mcmc(&model, &cell.mcmc, &mut rng)?;
    let summary = state_probability_summary(&sample)?;
    let dir = config.output_dir().join("diagnose").join(model_id);
    create_dir(&dir)?;
    summary.write_filtered_wide(&dir.join("filtered.csv"))?;
    summary.write_filtered_tidy(&dir.join("filtered_tidy.csv"))?;
    summary.write_transitions(&dir.join("transitions.csv"))?;
    sample.write_csv(&dir.join("draws.csv"))?;
    Ok(dir)
}

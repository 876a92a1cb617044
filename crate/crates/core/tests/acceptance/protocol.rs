use std::path::Path;

use fxregime::data::{MONTHLY_LAMBDA, PREDICTOR_NAMES};
use fxregime::experiment::ExperimentConfig;
use fxregime::model::{theoretical_regimes, ModelConfig, Regressor};
use fxregime::YearMonth;

use crate::Verdict;

/// Every default that fixes the forecasting protocol, read back from
/// serialized configs rather than from the Rust constants.
pub fn constants() -> Verdict {
    let dump = toml::to_string(&ModelConfig::default()).unwrap();
    let v: toml::Table = dump.parse().unwrap();
    let int = |t: &toml::Table, k: &str| t[k].as_integer().unwrap();
    let float = |t: &toml::Table, k: &str| t[k].as_float().unwrap();
    let mcmc = v["mcmc"].as_table().unwrap();
    let priors = v["priors"].as_table().unwrap();
    let horizons: Vec<i64> = v["horizons"].as_array().unwrap().iter().map(|h| h.as_integer().unwrap()).collect();

    let model = ModelConfig::default();
    let retained = (0..model.mcmc.iterations).filter(|&i| model.mcmc.retains(i)).count();

    // A minimal experiment file inherits the same protocol.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("experiment.toml");
    std::fs::write(&path, "[data]\nhome = \"home.csv\"\nforeign = \"foreign.csv\"\n").unwrap();
    let experiment = ExperimentConfig::load(Path::new(&path)).unwrap();

    let checks = [
        ("iterations 80000", int(mcmc, "iterations") == 80_000),
        ("burn-in 30000", int(mcmc, "burn_in") == 30_000),
        ("thin 10", int(mcmc, "thin") == 10),
        ("5000 retained", retained == 5_000 && model.mcmc.retained_draws() == 5_000),
        ("t0 2004-12", v["t0"].as_str() == Some("2004-12") && model.t0 == YearMonth::new(2004, 12).unwrap()),
        ("horizons 1,3,12", horizons == [1, 3, 12]),
        ("HP lambda 14400", MONTHLY_LAMBDA == 14_400.0 && experiment.data.hp_lambda == 14_400.0),
        ("zeta 100", float(priors, "zeta") == 100.0),
        ("a0 0.01", float(priors, "a0") == 0.01),
        ("A0 0.01", float(priors, "A0") == 0.01),
        ("omega 0.5", float(priors, "omega") == 0.5),
        (
            "experiment defaults",
            experiment.mcmc == model.mcmc
                && experiment.priors == model.priors
                && experiment.t0 == model.t0
                && experiment.horizons == model.horizons,
        ),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let detail = if failed.is_empty() {
        format!("{} exact checks: {}", checks.len(), checks.map(|c| c.0).join(", "))
    } else {
        format!("mismatched: {}", failed.join(", "))
    };
    Verdict::new(failed.is_empty(), detail)
}

const COLUMNS: [&str; 17] = [
    "intercept", "i_prev", "i_prev_f", "pi", "pi_f", "x", "x_f", "q", "m", "m_f", "y", "y_f", "e", "p", "p_f", "i",
    "i_f",
];

/// Prior means of the four structural regimes; `None` marks an excluded regressor.
const TABLE: [(&str, [Option<f64>; 17]); 4] = [
    (
        "taylor-rule",
        [
            Some(0.0), Some(0.0), Some(0.0), Some(1.5), Some(-1.5), Some(0.5), Some(-0.5), Some(0.0),
            None, None, None, None, None, None, None, None, None,
        ],
    ),
    (
        "monetary",
        [
            Some(0.0), None, None, None, None, None, None, None,
            Some(1.0), Some(-1.0), Some(1.0), Some(-1.0), Some(-1.0), None, None, None, None,
        ],
    ),
    (
        "ppp",
        [
            Some(0.0), None, None, None, None, None, None, None,
            None, None, None, None, Some(-1.0), Some(1.0), Some(-1.0), None, None,
        ],
    ),
    (
        "uip",
        [
            Some(0.0), None, None, None, None, None, None, None,
            None, None, None, None, None, None, None, Some(1.0), Some(-1.0),
        ],
    ),
];

pub fn prior_table() -> Verdict {
    let regimes = theoretical_regimes();
    let mut mismatches = Vec::new();
    if regimes.len() != TABLE.len() {
        mismatches.push(format!("{} regimes", regimes.len()));
    }
    for (r, (name, row)) in regimes.iter().zip(TABLE.iter()) {
        let mut got = [None; 17];
        for (reg, &mean) in r.regressors.iter().zip(&r.prior_mean) {
            let col = match *reg {
                Regressor::Intercept => 0,
                Regressor::Predictor(i) => {
                    let c = COLUMNS.iter().position(|n| *n == PREDICTOR_NAMES[i]).unwrap();
                    assert_eq!(c, i + 1);
                    c
                }
            };
            got[col] = Some(mean);
        }
        if r.name != *name || got != *row || r.regressors.len() != row.iter().flatten().count() {
            mismatches.push(format!("{name}: got {got:?}"));
        }
    }
    let detail = if mismatches.is_empty() {
        "4 regimes, 21 prior means equal row for row".to_string()
    } else {
        mismatches.join("; ")
    };
    Verdict::new(mismatches.is_empty(), detail)
}

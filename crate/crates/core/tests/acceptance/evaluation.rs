use fxregime::distributions::RngStream;
use fxregime::evaluation::{build_report, csfe_difference, cumulative_lbf};
use fxregime::forecast::{random_walk_forecast, ForecastRecord, RANDOM_WALK_ID};
use fxregime::gibbs::TransitionModel;
use fxregime::model::{ModelConfig, StructuralModel, TransitionMode};
use fxregime::synthetic::{simulate_regressors, simulate_switching, RegressorDesign, SwitchingTruth};
use fxregime::YearMonth;

use crate::common::simple_regime;
use crate::Verdict;

const TOLERANCE: f64 = 1e-12;

fn record(id: &str, origin: YearMonth, point: f64, realized: f64, log_score: f64) -> ForecastRecord {
    ForecastRecord {
        model_id: id.to_string(),
        origin,
        horizon: 1,
        point,
        realized,
        log_score,
        sq_error: (realized - point) * (realized - point),
        draws: Vec::new(),
    }
}

/// A model identical to the benchmark, at every horizon of a simulated panel.
fn identical_to_benchmark() -> bool {
    let mut rng = RngStream::derive(8, &["evaluation"]);
    let regressors = simulate_regressors(&RegressorDesign::new(120, 16, 2), &mut rng).unwrap();
    let truth = SwitchingTruth {
        regimes: vec![simple_regime("a", 0), simple_regime("b", 1)],
        beta: vec![0.3, 1.0, -0.2, 0.5],
        sigma_sq: vec![0.5, 1.5],
        transition: TransitionModel::new(TransitionMode::Tvp, 2, 2),
    };
    let panel = simulate_switching(&regressors, &truth, &mut rng).unwrap().panel;
    let cell = ModelConfig::linear(StructuralModel::Uip);
    let mut records = Vec::new();
    for h in [1, 3, 12] {
        for origin in 40..panel.len() - h {
            let rw = random_walk_forecast(&panel, origin, h).unwrap();
            let mut same = rw.clone();
            same.model_id = cell.model_id();
            records.push(rw);
            records.push(same);
        }
    }
    let report = build_report(&records, &[cell.clone()]).unwrap();
    [1, 3, 12].iter().all(|&h| {
        let c = report.cell(&cell.model_id(), h).unwrap();
        !c.lbf_path.is_empty()
            && c.lbf_path.iter().chain(&c.csfe_path).all(|&v| v == 0.0)
            && c.terminal_lbf == 0.0
            && c.terminal_csfe == 0.0
    })
}

pub fn run() -> Verdict {
    let zero = identical_to_benchmark();

    // Three origins, listed out of order to exercise the alignment.
    let months: Vec<YearMonth> = (1..=3).map(|m| YearMonth::new(2005, m).unwrap()).collect();
    let realized = [0.5, -1.0, 2.0];
    let model_point = [-0.5, 1.0, 1.5];
    let model_lps = [-1.2, -0.7, -2.05];
    let rw_lps = [-1.0, -1.1, -1.3];
    let order = [2, 0, 1];
    let model: Vec<ForecastRecord> =
        order.iter().map(|&i| record("m", months[i], model_point[i], realized[i], model_lps[i])).collect();
    let rw: Vec<ForecastRecord> =
        order.iter().map(|&i| record(RANDOM_WALK_ID, months[i], 0.0, realized[i], rw_lps[i])).collect();
    // Squared errors 1, 4, 0.25 against 0.25, 1, 4.
    let csfe_expected = [0.75, 3.75, 0.0];
    // Score gaps -0.2, 0.4, -0.75.
    let lbf_expected = [-0.2, 0.2, -0.55];
    let csfe = csfe_difference(&model, &rw).unwrap();
    let lbf = cumulative_lbf(&model, &rw).unwrap();
    let err = csfe
        .iter()
        .zip(&csfe_expected)
        .chain(lbf.iter().zip(&lbf_expected))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let hand = csfe.len() == 3 && lbf.len() == 3 && err <= TOLERANCE;
    Verdict::new(
        zero && hand,
        format!("model = benchmark gives zero paths: {zero}; 3-origin example max error {err:.1e} (tolerance 1e-12)"),
    )
}

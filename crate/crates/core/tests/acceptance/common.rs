use fxregime::model::{RegimeSpec, Regressor};

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
}

/// Variance of the mean of an autocorrelated series from `batches` batch means.
pub fn batch_mean_variance(v: &[f64], batches: usize) -> f64 {
    let size = v.len() / batches;
    let means: Vec<f64> = v.chunks_exact(size).map(mean).collect();
    variance(&means) / means.len() as f64
}

/// Type-7 sample quantile of sorted values.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Regime `name` with an intercept and one predictor, centered on zero.
pub fn simple_regime(name: &str, predictor: usize) -> RegimeSpec {
    RegimeSpec::new(name, vec![Regressor::Intercept, Regressor::Predictor(predictor)], vec![0.0, 0.0]).unwrap()
}

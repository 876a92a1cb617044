use fxregime::distributions::{polya_gamma_mean, polya_gamma_variance, sample_polya_gamma, RngStream};
use fxregime::numeric::ks_two_sample;

use crate::common::mean;
use crate::Verdict;

const DRAWS: usize = 1_000_000;
const KS_DRAWS: usize = 200_000;

pub fn run() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for c in [0.0, 0.5, 2.0, 5.0] {
        let mut rng = RngStream::derive(2, &["pg-mean", &c.to_string()]);
        let draws: Vec<f64> = (0..DRAWS).map(|_| sample_polya_gamma(c, &mut rng)).collect();
        let se = (polya_gamma_variance(c) / DRAWS as f64).sqrt();
        let z = (mean(&draws) - polya_gamma_mean(c)) / se;
        pass &= z.abs() < 3.0;
        parts.push(format!("c={c}: z={z:+.2}"));
    }
    let mut p_min = 1.0f64;
    for c in [0.5, 2.0] {
        let mut pos = RngStream::derive(2, &["pg-ks", "+", &c.to_string()]);
        let mut neg = RngStream::derive(2, &["pg-ks", "-", &c.to_string()]);
        let a: Vec<f64> = (0..KS_DRAWS).map(|_| sample_polya_gamma(c, &mut pos)).collect();
        let b: Vec<f64> = (0..KS_DRAWS).map(|_| sample_polya_gamma(-c, &mut neg)).collect();
        p_min = p_min.min(ks_two_sample(&a, &b).p_value);
    }
    pass &= p_min > 0.01;
    Verdict::new(
        pass,
        format!("{}, |z| < 3 at 1e6 draws; KS c vs -c min p = {p_min:.3} > 0.01", parts.join(", ")),
    )
}

//! FFBS against brute-force enumeration of every state path.

use fxregime::distributions::RngStream;
use fxregime::gibbs::ffbs::{backward_sample, forward_filter};
use fxregime::gibbs::TransitionModel;
use fxregime::model::TransitionMode;
use fxregime::numeric::{ln_normal_pdf, log_sum_exp};

use crate::Verdict;

const DRAWS: usize = 200_000;
const VARIANCE: f64 = 0.25;

struct Case {
    t_len: usize,
    k: usize,
}

fn transition(k: usize) -> TransitionModel {
    let gamma = match k {
        2 => vec![vec![0.3, 1.2, 0.8]],
        _ => vec![vec![0.2, 1.0, 1.5, -0.5], vec![-0.3, -0.8, 0.4, 1.0]],
    };
    TransitionModel::from_gamma(TransitionMode::Tvp, k, 1, &gamma).unwrap()
}

/// Observations sit on a state mean except at two months, which fall between
/// the first two states, so the posterior spreads over a handful of paths
/// whose weights depend on the covariate-driven transitions.
fn observations(case: &Case) -> (Vec<f64>, Vec<f64>) {
    let mu: Vec<f64> = (0..case.k).map(|s| 3.0 * s as f64).collect();
    let ambiguous = [1, case.t_len - 1];
    let y = (0..case.t_len)
        .map(|t| {
            if ambiguous.contains(&t) {
                1.5 + 0.1 * t as f64
            } else {
                mu[t % case.k]
            }
        })
        .collect();
    (y, mu)
}

/// Exact `P(S_1..S_T)` given the data, indexed by `Σ S_t K^(t−1)`.
fn enumerate(log_lik: &[f64], log_trans: &[f64], k: usize, t_len: usize) -> Vec<f64> {
    let n_paths = k.pow(t_len as u32);
    let mut joint = vec![f64::NEG_INFINITY; n_paths];
    for s0 in 0..k {
        for (code, slot) in joint.iter_mut().enumerate() {
            let mut prev = s0;
            let mut c = code;
            let mut lp = -(k as f64).ln();
            for t in 0..t_len {
                let s = c % k;
                c /= k;
                lp += log_trans[t * k * k + prev * k + s] + log_lik[t * k + s];
                prev = s;
            }
            *slot = log_sum_exp(&[*slot, lp]);
        }
    }
    let total = log_sum_exp(&joint);
    joint.iter().map(|l| (l - total).exp()).collect()
}

pub fn run() -> Verdict {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut checked = 0;
    for k in [2, 3] {
        for t_len in [3, 6, 8] {
            let case = Case { t_len, k };
            let (y, mu) = observations(&case);
            let tm = transition(k);
            let mut log_lik = Vec::with_capacity(t_len * k);
            let mut log_trans = vec![0.0; t_len * k * k];
            for t in 0..t_len {
                log_lik.extend(mu.iter().map(|&m| ln_normal_pdf(y[t], m, VARIANCE)));
                let z = [(t as f64 * 1.3).sin()];
                tm.log_matrix(&z, &mut log_trans[t * k * k..(t + 1) * k * k]);
            }
            let exact = enumerate(&log_lik, &log_trans, k, t_len);
            let filter = forward_filter(&log_lik, &log_trans, k).unwrap();
            let mut rng = RngStream::derive(1, &["ffbs", &k.to_string(), &t_len.to_string()]);
            let mut counts = vec![0usize; exact.len()];
            for _ in 0..DRAWS {
                let (_, path) = backward_sample(&filter, &log_trans, &mut rng);
                let code = path.iter().rev().fold(0, |acc, &s| acc * k + s);
                counts[code] += 1;
            }
            for (code, (&p, &n)) in exact.iter().zip(&counts).enumerate() {
                let freq = n as f64 / DRAWS as f64;
                let se = (p * (1.0 - p) / DRAWS as f64).sqrt();
                let dev = (freq - p).abs();
                if p > 0.0 && se > 0.0 {
                    worst = worst.max(dev / se);
                }
                checked += 1;
                if dev > 3.0 * se {
                    failures.push(format!("K={k} T={t_len} path {code}: freq {freq:.6} vs {p:.6}"));
                }
            }
        }
    }
    let detail = format!(
        "{checked} paths over 6 models, largest deviation {worst:.2} s.e., tolerance 3 s.e.{}",
        if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
    );
    Verdict::new(failures.is_empty(), detail)
}

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::numeric::ln_norm_cdf;

/// Truncation point between the inverse-Gaussian and exponential proposals.
const TRUNC: f64 = 0.64;

/// One draw from PG(1, c).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyaGammaDraw {
    pub value: f64,
    pub tilt: f64,
}

/// Exact draw from the Pólya-Gamma distribution PG(1, c).
///
/// Alternating-series rejection sampler for the Jacobi distribution J*(1, c/2),
/// returned as `J / 4`.
pub fn sample_polya_gamma<R: Rng + ?Sized>(c: f64, rng: &mut R) -> f64 {
    debug_assert!(c.is_finite());
    0.25 * sample_jacobi(0.5 * c.abs(), rng)
}

/// [`sample_polya_gamma`] wrapped with its tilt.
pub fn draw_polya_gamma<R: Rng + ?Sized>(c: f64, rng: &mut R) -> PolyaGammaDraw {
    PolyaGammaDraw {
        value: sample_polya_gamma(c, rng),
        tilt: c,
    }
}

fn sample_jacobi<R: Rng + ?Sized>(z: f64, rng: &mut R) -> f64 {
    let k = PI * PI / 8.0 + 0.5 * z * z;
    // Mixture weights of the two proposal pieces, kept in log space.
    let ln_p = (PI / (2.0 * k)).ln() - k * TRUNC;
    let ln_q = std::f64::consts::LN_2 + ln_ig_cdf_term(z);
    let p_right = 1.0 / (1.0 + (ln_q - ln_p).exp());

    loop {
        let x = if rng.random::<f64>() < p_right {
            let e: f64 = rng.sample(Exp1);
            TRUNC + e / k
        } else {
            truncated_inverse_gaussian(z, rng)
        };
        let mut s = coefficient(0, x);
        let y = rng.random::<f64>() * s;
        let mut n = 0;
        loop {
            n += 1;
            if n % 2 == 1 {
                s -= coefficient(n, x);
                if y <= s {
                    return x;
                }
            } else {
                s += coefficient(n, x);
                if y > s {
                    break;
                }
            }
        }
    }
}

/// `ln( exp(-z) · P(IG(1/z, 1) < t) )`, finite also at `z = 0`.
fn ln_ig_cdf_term(z: f64) -> f64 {
    let b = 1.0 / TRUNC.sqrt();
    let a1 = -z + ln_norm_cdf(b * (TRUNC * z - 1.0));
    let a2 = z + ln_norm_cdf(-b * (TRUNC * z + 1.0));
    let m = a1.max(a2);
    m + ((a1 - m).exp() + (a2 - m).exp()).ln()
}

/// Series coefficient `a_n(x)` of the Jacobi density.
fn coefficient(n: u32, x: f64) -> f64 {
    let h = f64::from(n) + 0.5;
    if x <= TRUNC {
        PI * h * (2.0 / (PI * x)).powf(1.5) * (-2.0 * h * h / x).exp()
    } else {
        PI * h * (-0.5 * h * h * PI * PI * x).exp()
    }
}

/// Inverse-Gaussian draw with mean `1/z`, shape 1, truncated to `(0, TRUNC)`.
fn truncated_inverse_gaussian<R: Rng + ?Sized>(z: f64, rng: &mut R) -> f64 {
    let mu = if z > 0.0 { 1.0 / z } else { f64::INFINITY };
    if mu > TRUNC {
        loop {
            // 1/X from a truncated chi-square, then accept with the tilt.
            let x = loop {
                let e1: f64 = rng.sample(Exp1);
                let e2: f64 = rng.sample(Exp1);
                if e1 * e1 <= 2.0 * e2 / TRUNC {
                    let v = 1.0 + TRUNC * e1;
                    break TRUNC / (v * v);
                }
            };
            if rng.random::<f64>() <= (-0.5 * z * z * x).exp() {
                return x;
            }
        }
    } else {
        loop {
            let n: f64 = rng.sample(StandardNormal);
            let y = n * n;
            let my = mu * y;
            let mut x = mu + 0.5 * mu * my - 0.5 * mu * (4.0 * my + my * my).sqrt();
            if rng.random::<f64>() > mu / (mu + x) {
                x = mu * mu / x;
            }
            if x < TRUNC {
                return x;
            }
        }
    }
}

/// `E[PG(1, c)] = tanh(c/2) / (2c)`, with limit 1/4 at zero.
pub fn polya_gamma_mean(c: f64) -> f64 {
    if c.abs() < 1e-6 {
        0.25 - c * c / 48.0
    } else {
        (0.5 * c).tanh() / (2.0 * c)
    }
}

/// `Var[PG(1, c)] = (sinh c − c) / (4 c³ cosh²(c/2))`, with limit 1/24 at zero.
pub fn polya_gamma_variance(c: f64) -> f64 {
    let c = c.abs();
    if c < 1e-3 {
        1.0 / 24.0 - c * c / 120.0
    } else {
        let ch = (0.5 * c).cosh();
        (c.sinh() - c) / (4.0 * c.powi(3) * ch * ch)
    }
}

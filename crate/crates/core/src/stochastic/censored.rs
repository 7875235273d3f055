//! Closed-form moments of `min(K, X)`, `max(K, X)` and `(K - X)⁺` for a
//! normally distributed price `X`.
//!
//! Every expectation is routed through whichever of the call or put payoff
//! is out of the money, so the small option term is computed from a tail
//! probability and never as the difference of two large numbers.

use serde::{Deserialize, Serialize};

use super::normal::{std_normal_cdf, std_normal_pdf};
use crate::error::{ensure_finite, Error, Result};

/// Mean and absolute standard deviation of a normally distributed forward price.
///
/// The model puts no floor at zero: a forward price can come out negative
/// when the deviation is large compared with the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub mean: f64,
    pub sd: f64,
}

impl GaussianParams {
    pub fn new(mean: f64, sd: f64) -> Result<Self> {
        ensure_finite("mean", mean)?;
        ensure_finite("sd", sd)?;
        if sd < 0.0 {
            return Err(Error::invalid("sd", format!("must be non-negative, got {sd}")));
        }
        Ok(Self { mean, sd })
    }

    fn standardize(&self, strike: f64) -> f64 {
        (strike - self.mean) / self.sd
    }
}

/// `E[(X - K)⁺]`.
pub fn call_payoff_mean(strike: f64, g: GaussianParams) -> f64 {
    if g.sd == 0.0 {
        return (g.mean - strike).max(0.0);
    }
    let a = g.standardize(strike);
    if a >= 0.0 {
        g.sd * out_of_money_value(a)
    } else {
        // parity: (X-K)⁺ = (X-K) + (K-X)⁺
        (g.mean - strike) + g.sd * out_of_money_value(-a)
    }
}

/// `E[(K - X)⁺]`, the expected payoff of a put struck at `strike`.
pub fn put_payoff_mean(strike: f64, g: GaussianParams) -> f64 {
    if g.sd == 0.0 {
        return (strike - g.mean).max(0.0);
    }
    let a = g.standardize(strike);
    if a <= 0.0 {
        g.sd * out_of_money_value(-a)
    } else {
        (strike - g.mean) + g.sd * out_of_money_value(a)
    }
}

/// `E[(Z - b)⁺]` for standard normal `Z` and `b ≥ 0`: `φ(b) - b·Φ(-b)`.
fn out_of_money_value(b: f64) -> f64 {
    (std_normal_pdf(b) - b * std_normal_cdf(-b)).max(0.0)
}

/// `E[min(K, X)]`.
pub fn censored_min_mean(strike: f64, g: GaussianParams) -> f64 {
    if strike <= g.mean {
        strike - put_payoff_mean(strike, g)
    } else {
        g.mean - call_payoff_mean(strike, g)
    }
}

/// `E[max(K, X)]`.
pub fn censored_max_mean(strike: f64, g: GaussianParams) -> f64 {
    if strike >= g.mean {
        strike + call_payoff_mean(strike, g)
    } else {
        g.mean + put_payoff_mean(strike, g)
    }
}

/// Standard deviation of `min(K, X)`, in the units of `X`.
pub fn censored_min_sd(strike: f64, g: GaussianParams) -> f64 {
    if g.sd == 0.0 {
        return 0.0;
    }
    g.sd * standardized_censored_variance(g.standardize(strike)).sqrt()
}

/// Standard deviation of `max(K, X)`; by reflection it equals the sd of
/// `min(-K, -X)`.
pub fn censored_max_sd(strike: f64, g: GaussianParams) -> f64 {
    if g.sd == 0.0 {
        return 0.0;
    }
    g.sd * standardized_censored_variance(-g.standardize(strike)).sqrt()
}

/// Variance of `min(a, Z)` for standard normal `Z`.
///
/// `min(a, Z) = a - (a - Z)⁺` so the variance equals that of the put payoff.
/// Below zero the put is out of the money and its moments are written in
/// terms of the upper tail at `b = -a`; above zero the direct truncated
/// moments are well conditioned.
fn standardized_censored_variance(a: f64) -> f64 {
    let var = if a < 0.0 {
        let b = -a;
        let tail = std_normal_cdf(-b);
        let dens = std_normal_pdf(b);
        let first = dens - b * tail;
        let second = (b * b + 1.0) * tail - b * dens;
        second - first * first
    } else {
        let below = std_normal_cdf(a);
        let dens = std_normal_pdf(a);
        let mean = a - (a * below + dens);
        let second = below - a * dens + a * a * (1.0 - below);
        second - mean * mean
    };
    var.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_one() -> GaussianParams {
        // forward of 100000 at 3% p.a. and 19% vol over one day (360 basis)
        GaussianParams::new(
            100_000.0 * (1.0 + 0.03 / 360.0),
            100_000.0 * 0.19 / 360f64.sqrt(),
        )
        .unwrap()
    }

    /// Composite Simpson over `mean ± 14 sd`, split at the strike; independent
    /// of the closed forms above.
    fn quadrature_moments(strike: f64, g: GaussianParams, payoff: impl Fn(f64) -> f64) -> (f64, f64) {
        let density = |x: f64| {
            let z = (x - g.mean) / g.sd;
            (-0.5 * z * z).exp() / (g.sd * (2.0 * std::f64::consts::PI).sqrt())
        };
        let lo = g.mean - 14.0 * g.sd;
        let hi = g.mean + 14.0 * g.sd;
        let mut knots = vec![lo];
        if strike > lo && strike < hi {
            knots.push(strike);
        }
        knots.push(hi);
        let (mut m1, mut m2) = (0.0, 0.0);
        for w in knots.windows(2) {
            let n = 20_000;
            let h = (w[1] - w[0]) / n as f64;
            for i in 0..=n {
                let x = w[0] + i as f64 * h;
                let c = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                let p = payoff(x);
                let f = density(x) * c * h / 3.0;
                m1 += p * f;
                m2 += p * p * f;
            }
        }
        (m1, (m2 - m1 * m1).max(0.0).sqrt())
    }

    #[test]
    fn rejects_negative_sd() {
        assert!(GaussianParams::new(1.0, -1e-12).is_err());
        assert!(GaussianParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn min_mean_example_one_cases() {
        let g = example_one();
        let m = censored_min_mean(97_003.92, g);
        assert!((m - 97_003.53).abs() <= 0.05, "{m}");
        // 50-digit evaluation of the closed form at the exact three-sigma strike
        let strike = (1.0 - 3.0 * 0.19 / 360f64.sqrt()) * g.mean;
        let m = censored_min_mean(strike, g);
        assert!((m - 97_003.536_862_277_33).abs() < 1e-8, "{m}");
        let strike = (1.0 - 2.0 * 0.19 / 360f64.sqrt()) * g.mean;
        let m = censored_min_mean(strike, g);
        assert!((m - 97_996.891_893_024_78).abs() < 1e-8, "{m}");
    }

    #[test]
    fn min_sd_example_one_cases() {
        let g = example_one();
        let s = censored_min_sd(97_003.92, g);
        assert!((s - 15.0).abs() <= 1.0, "{s}");
        let s = censored_min_sd(98_005.39, g);
        assert!((s - 77.0).abs() <= 2.0, "{s}");
        let strike = (1.0 - 2.0 * 0.19 / 360f64.sqrt()) * g.mean;
        assert!((censored_min_sd(strike, g) - 75.562_462_548_252_78).abs() < 1e-8);
        let strike = (1.0 - 3.0 * 0.19 / 360f64.sqrt()) * g.mean;
        assert!((censored_min_sd(strike, g) - 14.271_035_891_658_81).abs() < 1e-8);
    }

    #[test]
    fn deterministic_price_branches() {
        let g = GaussianParams::new(90.0, 0.0).unwrap();
        assert_eq!(censored_min_mean(100.0, g), 90.0);
        assert_eq!(censored_max_mean(100.0, g), 100.0);
        assert_eq!(censored_min_sd(100.0, g), 0.0);
        assert_eq!(censored_max_sd(80.0, g), 0.0);
        assert_eq!(put_payoff_mean(100.0, g), 10.0);
        assert_eq!(put_payoff_mean(80.0, g), 0.0);
    }

    #[test]
    fn at_the_mean_symmetry() {
        let g = GaussianParams::new(250.0, 12.5).unwrap();
        let expect = 12.5 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((censored_min_mean(250.0, g) - (250.0 - expect)).abs() < 1e-12);
        assert!((put_payoff_mean(250.0, g) - expect).abs() < 1e-12);
        assert!((censored_max_mean(250.0, g) - (250.0 + expect)).abs() < 1e-12);
    }

    #[test]
    fn put_example_two() {
        let g = example_one();
        let w = put_payoff_mean(g.mean, g);
        assert!((w - 399.53).abs() <= 0.5, "{w}");
        assert!((w - 399.495_982_653_192).abs() < 1e-9);
        let max = censored_max_mean(g.mean, g);
        assert!((max - (g.mean + 399.53)).abs() <= 0.5);
    }

    #[test]
    fn put_deep_in_and_out_of_the_money() {
        let g = GaussianParams::new(1000.0, 20.0).unwrap();
        assert!(put_payoff_mean(1000.0 - 200.0, g) < 1e-10 * 20.0);
        let deep = put_payoff_mean(1200.0, g);
        assert!((deep - 200.0).abs() < 1e-12 * 200.0);
    }

    #[test]
    fn closed_forms_agree_with_quadrature() {
        let g = GaussianParams::new(100.0, 7.0).unwrap();
        for strike in [70.0, 85.0, 95.0, 100.0, 104.0, 118.0, 130.0] {
            let (m, s) = quadrature_moments(strike, g, |x| x.min(strike));
            assert!((censored_min_mean(strike, g) - m).abs() < 1e-9, "min mean at {strike}");
            assert!((censored_min_sd(strike, g) - s).abs() < 1e-7, "min sd at {strike}");
            let (m, s) = quadrature_moments(strike, g, |x| x.max(strike));
            assert!((censored_max_mean(strike, g) - m).abs() < 1e-9, "max mean at {strike}");
            assert!((censored_max_sd(strike, g) - s).abs() < 1e-7, "max sd at {strike}");
            let (m, _) = quadrature_moments(strike, g, |x| (strike - x).max(0.0));
            assert!((put_payoff_mean(strike, g) - m).abs() < 1e-9, "put at {strike}");
        }
    }

    #[test]
    fn sd_bounded_by_price_sd() {
        let g = example_one();
        for k in [-5.0, -1.0, 0.0, 0.5, 2.0, 8.0] {
            let strike = g.mean + k * g.sd;
            let s = censored_min_sd(strike, g);
            assert!((0.0..=g.sd).contains(&s));
        }
        assert!((censored_min_sd(g.mean + 40.0 * g.sd, g) - g.sd).abs() < 1e-9 * g.sd);
    }
}

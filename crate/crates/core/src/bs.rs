//! Lognormal Black-Scholes prices for European calls and puts, used as the
//! benchmark for the implicit options.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::stochastic::std_normal_cdf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsInputs {
    pub spot: f64,
    pub strike: f64,
    /// Continuously compounded, per annum.
    pub rate: f64,
    /// Lognormal volatility, per annum.
    pub vol: f64,
    /// Years.
    pub tenor: f64,
}

impl BsInputs {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("spot", self.spot),
            ("strike", self.strike),
            ("rate", self.rate),
            ("vol", self.vol),
            ("tenor", self.tenor),
        ] {
            ensure_finite(field, v)?;
        }
        if self.spot <= 0.0 {
            return Err(Error::invalid("spot", "must be positive"));
        }
        if self.strike <= 0.0 {
            return Err(Error::invalid("strike", "must be positive"));
        }
        if self.vol < 0.0 {
            return Err(Error::invalid("vol", "must be non-negative"));
        }
        if self.tenor <= 0.0 {
            return Err(Error::invalid("tenor", "must be positive"));
        }
        Ok(())
    }

    fn discounted_strike(&self) -> f64 {
        self.strike * (-self.rate * self.tenor).exp()
    }

    fn d1_d2(&self) -> (f64, f64) {
        let vol_sqrt_t = self.vol * self.tenor.sqrt();
        let d1 = ((self.spot / self.strike).ln() + (self.rate + 0.5 * self.vol * self.vol) * self.tenor)
            / vol_sqrt_t;
        (d1, d1 - vol_sqrt_t)
    }
}

pub fn bs_call(inp: &BsInputs) -> Result<f64> {
    inp.validate()?;
    let df_strike = inp.discounted_strike();
    if inp.vol == 0.0 {
        return Ok((inp.spot - df_strike).max(0.0));
    }
    let (d1, d2) = inp.d1_d2();
    Ok(inp.spot * std_normal_cdf(d1) - df_strike * std_normal_cdf(d2))
}

pub fn bs_put(inp: &BsInputs) -> Result<f64> {
    inp.validate()?;
    let df_strike = inp.discounted_strike();
    if inp.vol == 0.0 {
        return Ok((df_strike - inp.spot).max(0.0));
    }
    let (d1, d2) = inp.d1_d2();
    Ok(df_strike * std_normal_cdf(-d2) - inp.spot * std_normal_cdf(-d1))
}

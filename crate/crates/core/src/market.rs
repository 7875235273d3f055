//! Market inputs shared by the general and special repo engines, and the
//! simple-interest rate conventions used throughout.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::stochastic::GaussianParams;

/// Days per year for simple-interest scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum DayCount {
    #[default]
    Act360,
    Act365,
}

impl DayCount {
    pub fn days(self) -> u32 {
        match self {
            Self::Act360 => 360,
            Self::Act365 => 365,
        }
    }
}

impl TryFrom<u32> for DayCount {
    type Error = String;

    fn try_from(days: u32) -> std::result::Result<Self, Self::Error> {
        match days {
            360 => Ok(Self::Act360),
            365 => Ok(Self::Act365),
            other => Err(format!("day_count must be 360 or 365, got {other}")),
        }
    }
}

impl From<DayCount> for u32 {
    fn from(dc: DayCount) -> u32 {
        dc.days()
    }
}

impl fmt::Display for DayCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.days())
    }
}

/// A holding period with its day-count basis. Rates quoted per annum are
/// converted with simple scaling: `rate_period = rate_pa * tenor / day_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub tenor_days: u32,
    pub day_count: DayCount,
}

impl Period {
    pub fn new(tenor_days: u32, day_count: DayCount) -> Result<Self> {
        if tenor_days == 0 {
            return Err(Error::invalid("tenor_days", "must be at least one day"));
        }
        Ok(Self { tenor_days, day_count })
    }

    pub fn overnight() -> Self {
        Self {
            tenor_days: 1,
            day_count: DayCount::Act360,
        }
    }

    /// Length of the period in years.
    pub fn year_fraction(&self) -> f64 {
        f64::from(self.tenor_days) / f64::from(self.day_count.days())
    }

    pub fn to_period(&self, rate_pa: f64) -> f64 {
        rate_pa * self.year_fraction()
    }

    pub fn annualize(&self, rate_period: f64) -> f64 {
        rate_period * f64::from(self.day_count.days()) / f64::from(self.tenor_days)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketParams {
    /// Spot value of the collateral, P₀.
    pub spot_price: f64,
    /// Expected yield of the collateral, per annum.
    pub intrinsic_yield: f64,
    /// Annualized volatility of the collateral price, relative to spot.
    pub volatility: f64,
    pub tenor_days: u32,
    /// Per annum.
    pub risk_free_rate: f64,
    #[serde(default)]
    pub day_count: DayCount,
}

impl MarketParams {
    pub fn validate(&self) -> Result<()> {
        ensure_finite("spot_price", self.spot_price)?;
        ensure_finite("intrinsic_yield", self.intrinsic_yield)?;
        ensure_finite("volatility", self.volatility)?;
        ensure_finite("risk_free_rate", self.risk_free_rate)?;
        if self.spot_price <= 0.0 {
            return Err(Error::invalid("spot_price", "must be positive"));
        }
        if self.volatility < 0.0 {
            return Err(Error::invalid("volatility", "must be non-negative"));
        }
        Period::new(self.tenor_days, self.day_count)?;
        Ok(())
    }

    pub fn period(&self) -> Period {
        Period {
            tenor_days: self.tenor_days,
            day_count: self.day_count,
        }
    }

    /// Volatility over the holding period, as a fraction of spot.
    pub fn period_volatility(&self) -> f64 {
        self.volatility * self.period().year_fraction().sqrt()
    }
}

/// Normal law of the forward collateral price over the holding period.
pub fn forward_gaussian(m: &MarketParams) -> Result<GaussianParams> {
    m.validate()?;
    let period = m.period();
    GaussianParams::new(
        m.spot_price * (1.0 + period.to_period(m.intrinsic_yield)),
        m.spot_price * m.period_volatility(),
    )
}

/// Repurchase price set `k` period-sigmas below the expected forward price.
pub fn strike_from_sigma_multiple(m: &MarketParams, k: f64) -> Result<f64> {
    ensure_finite("k", k)?;
    if k < 0.0 {
        return Err(Error::invalid("k", "sigma multiple must be non-negative"));
    }
    let g = forward_gaussian(m)?;
    let strike = (1.0 - k * m.period_volatility()) * g.mean;
    if strike <= 0.0 {
        return Err(Error::invalid(
            "k",
            format!("repurchase price {strike} is not positive"),
        ));
    }
    Ok(strike)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn example_market() -> MarketParams {
        MarketParams {
            spot_price: 100_000.0,
            intrinsic_yield: 0.03,
            volatility: 0.19,
            tenor_days: 1,
            risk_free_rate: 0.0,
            day_count: DayCount::Act360,
        }
    }
}

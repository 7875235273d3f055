//! General repo pricing.
//!
//! The lender's receipt at the closing leg is `min(Q₁, P)`; the borrower's
//! haircut `H_c = P₀ - Q₀` is the premium of the call struck at `Q₁` that the
//! lender writes. The lender's expected rate follows the ergodic rule
//! `⟨r⟩ = r_rf + (⟨r_S⟩ - r_rf)·σ²_{M}/σ²_S`, with both volatilities taken
//! over the holding period and relative to spot, and `Q₀` discounts the
//! expected receipt at that rate over one period.

use serde::{Deserialize, Serialize};

use crate::bs::{bs_call, BsInputs};
use crate::error::{ensure_finite, Error, Result};
use crate::market::{forward_gaussian, MarketParams};
use crate::stochastic::{censored_min_mean, censored_min_sd};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralRepoQuote {
    /// Q₁
    pub repurchase_price: f64,
    /// Q₀
    pub lent_amount: f64,
    /// H_c = P₀ - Q₀
    pub haircut: f64,
    /// h_c = H_c / P₀
    pub haircut_rate: f64,
    /// r_R, per annum
    pub repo_rate_pa: f64,
    /// ⟨r_L⟩, per annum
    pub lender_rate_pa: f64,
    /// ⟨M_g⟩
    pub revenue_mean: f64,
    /// σ_M as a fraction of P₀ over the holding period
    pub revenue_sd_rel: f64,
    /// σ_M in currency
    pub revenue_sd: f64,
    /// ⟨V⟩ = ⟨P⟩ - ⟨M_g⟩
    pub option_value_mean: f64,
    /// ⟨r_V⟩ = ⟨V⟩ / H_c - 1, per period
    pub option_yield_period: f64,
    /// ⟨P⟩
    pub forward_mean: f64,
}

/// Prices a general repo with repurchase price `repurchase_price` under the
/// ergodic rate model.
pub fn price_general_repo(m: &MarketParams, repurchase_price: f64) -> Result<GeneralRepoQuote> {
    m.validate()?;
    ensure_finite("repurchase_price", repurchase_price)?;
    if repurchase_price <= 0.0 {
        return Err(Error::invalid("repurchase_price", "must be positive"));
    }
    if m.volatility == 0.0 {
        return Err(Error::ZeroVolatility);
    }
    let period = m.period();
    let spot = m.spot_price;
    let g = forward_gaussian(m)?;

    let revenue_mean = censored_min_mean(repurchase_price, g);
    let revenue_sd = censored_min_sd(repurchase_price, g);
    let revenue_sd_rel = revenue_sd / spot;

    let ratio = (revenue_sd_rel / m.period_volatility()).powi(2);
    let lender_rate_pa = m.risk_free_rate + (m.intrinsic_yield - m.risk_free_rate) * ratio;

    let lent_amount = revenue_mean / (1.0 + period.to_period(lender_rate_pa));
    let haircut = spot - lent_amount;
    // also rejects NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(haircut > 0.0) {
        return Err(Error::NonPositiveHaircut { haircut });
    }
    let option_value_mean = g.mean - revenue_mean;

    Ok(GeneralRepoQuote {
        repurchase_price,
        lent_amount,
        haircut,
        haircut_rate: haircut / spot,
        repo_rate_pa: period.annualize(repurchase_price / lent_amount - 1.0),
        lender_rate_pa,
        revenue_mean,
        revenue_sd_rel,
        revenue_sd,
        option_value_mean,
        option_yield_period: option_value_mean / haircut - 1.0,
        forward_mean: g.mean,
    })
}

/// Black-Scholes value of the implicit call: spot P₀, strike Q₁, the
/// risk-free rate, the collateral volatility, and the holding period.
pub fn bs_haircut(m: &MarketParams, repurchase_price: f64) -> Result<f64> {
    m.validate()?;
    bs_call(&BsInputs {
        spot: m.spot_price,
        strike: repurchase_price,
        rate: m.risk_free_rate,
        vol: m.volatility,
        tenor: m.period().year_fraction(),
    })
}

/// Lender's expected rate (per annum) when the haircut is set to the
/// Black-Scholes call value instead of the ergodic model.
pub fn lender_rate_from_bs(m: &MarketParams, repurchase_price: f64) -> Result<f64> {
    let call = bs_haircut(m, repurchase_price)?;
    if call >= m.spot_price {
        return Err(Error::CallNotBelowSpot {
            call,
            spot: m.spot_price,
        });
    }
    let g = forward_gaussian(m)?;
    let revenue_mean = censored_min_mean(repurchase_price, g);
    Ok(m.period().annualize(revenue_mean / (m.spot_price - call) - 1.0))
}

/// `h_c(r_V - r_L) - (r_S - r_L)` with all three rates over the holding
/// period. Zero up to rounding for any quote built from the definitions.
pub fn identity_residual(q: &GeneralRepoQuote, m: &MarketParams) -> f64 {
    let period = m.period();
    let lender = period.to_period(q.lender_rate_pa);
    let intrinsic = period.to_period(m.intrinsic_yield);
    q.haircut_rate * (q.option_yield_period - lender) - (intrinsic - lender)
}

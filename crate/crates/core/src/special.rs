//! Special repo analytics.
//!
//! Two unrelated sign conventions for the special-collateral adjustment
//! live here and must not be mixed:
//!
//! | model                  | type                   | lent cash           |
//! |------------------------|------------------------|---------------------|
//! | lender may fail        | [`SpecialLenderQuote`] | `Q₀ = P₀ + H_p` (premium) |
//! | dealer may fail        | [`SpecialRepoRelations`] | `Q₀ = P₀(1 - h_p)` (haircut) |
//!
//! The rate/haircut relations are exact per-period identities; annualize
//! only when reporting.

use serde::{Deserialize, Serialize};

use crate::bs::{bs_put, BsInputs};
use crate::error::{ensure_finite, Error, Result};
use crate::market::{forward_gaussian, MarketParams};
use crate::stochastic::put_payoff_mean;

/// Tolerance used to classify regimes and to accept externally supplied
/// relation tuples.
pub const RELATION_TOL: f64 = 1e-9;

/// Special repo where the securities lender (a dealer) receives a premium for
/// the put it implicitly writes to the cash lender.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecialLenderQuote {
    /// H_p, the Black-Scholes value of the put struck at Q₁
    pub premium: f64,
    /// h_p = H_p / P₀
    pub premium_rate: f64,
    /// Q₀ = P₀ + H_p
    pub lent_amount: f64,
    /// Q₁
    pub repurchase_price: f64,
    /// r_sR, per annum
    pub special_rate_pa: f64,
    /// ⟨W⟩ = E[max(Q₁ - P, 0)]
    pub put_value_mean: f64,
    /// ⟨W⟩ / H_p - 1 over the holding period; absent when the premium is zero
    pub trader_return_period: Option<f64>,
}

pub fn price_lender_fail(m: &MarketParams, repurchase_price: f64) -> Result<SpecialLenderQuote> {
    m.validate()?;
    ensure_finite("repurchase_price", repurchase_price)?;
    if repurchase_price <= 0.0 {
        return Err(Error::invalid("repurchase_price", "must be positive"));
    }
    let period = m.period();
    let premium = bs_put(&BsInputs {
        spot: m.spot_price,
        strike: repurchase_price,
        rate: m.risk_free_rate,
        vol: m.volatility,
        tenor: period.year_fraction(),
    })?;
    let lent_amount = m.spot_price + premium;
    let put_value_mean = put_payoff_mean(repurchase_price, forward_gaussian(m)?);
    Ok(SpecialLenderQuote {
        premium,
        premium_rate: premium / m.spot_price,
        lent_amount,
        repurchase_price,
        special_rate_pa: period.annualize(repurchase_price / lent_amount - 1.0),
        put_value_mean,
        trader_return_period: (premium > 0.0).then(|| put_value_mean / premium - 1.0),
    })
}

fn check_rate(field: &'static str, rate: f64) -> Result<f64> {
    ensure_finite(field, rate)?;
    if rate <= -1.0 {
        return Err(Error::invalid(field, format!("must exceed -1, got {rate}")));
    }
    Ok(rate)
}

fn check_haircut(field: &'static str, haircut: f64) -> Result<f64> {
    ensure_finite(field, haircut)?;
    if haircut >= 1.0 {
        return Err(Error::invalid(field, format!("must be below 1, got {haircut}")));
    }
    Ok(haircut)
}

/// Auction fee as a fraction of P₀: `(r_R - r_sR)(1 - h_c)/(1 + r_sR)`.
pub fn fed_fee_rate(general_rate: f64, special_rate: f64, general_haircut: f64) -> Result<f64> {
    ensure_finite("general_rate", general_rate)?;
    check_rate("special_rate", special_rate)?;
    ensure_finite("general_haircut", general_haircut)?;
    Ok((general_rate - special_rate) * (1.0 - general_haircut) / (1.0 + special_rate))
}

/// Largest auction fee the dealer can pay out of the client's cash:
/// `P₀(1 - h_p)(r_R - r_sR)/(1 + r_R)`.
pub fn max_fed_fee(spot: f64, special_haircut: f64, general_rate: f64, special_rate: f64) -> Result<f64> {
    ensure_finite("spot", spot)?;
    check_haircut("special_haircut", special_haircut)?;
    check_rate("general_rate", general_rate)?;
    ensure_finite("special_rate", special_rate)?;
    Ok(spot * (1.0 - special_haircut) * (general_rate - special_rate) / (1.0 + general_rate))
}

/// Special haircut implied by the general terms and the special rate.
pub fn special_haircut(general_haircut: f64, general_rate: f64, special_rate: f64) -> Result<f64> {
    ensure_finite("general_haircut", general_haircut)?;
    ensure_finite("general_rate", general_rate)?;
    check_rate("special_rate", special_rate)?;
    let denom = 1.0 + special_rate;
    Ok(general_haircut * (1.0 + general_rate) / denom - (general_rate - special_rate) / denom)
}

/// Special rate implied by the general terms and the special haircut.
pub fn special_rate(general_haircut: f64, special_haircut: f64, general_rate: f64) -> Result<f64> {
    ensure_finite("general_haircut", general_haircut)?;
    check_haircut("special_haircut", special_haircut)?;
    ensure_finite("general_rate", general_rate)?;
    Ok(
        (general_rate - general_haircut * (1.0 + general_rate) + special_haircut)
            / (1.0 - special_haircut),
    )
}

/// Rates and haircuts of a dealer-fail special repo tied together by
/// `(1 + r_sR)(1 - h_p) = (1 + r_R)(1 - h_c)`. Rates are per period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecialRepoRelations {
    pub spot: f64,
    pub general_rate: f64,
    pub special_rate: f64,
    pub general_haircut: f64,
    pub special_haircut: f64,
    pub fed_fee_rate: f64,
    pub max_fee: f64,
    /// Q_g0 = P₀(1 - h_c), cash lent in the general repo
    pub general_lend: f64,
}

impl SpecialRepoRelations {
    pub fn from_special_rate(spot: f64, general_rate: f64, general_haircut: f64, special_rate: f64) -> Result<Self> {
        let special_haircut = special_haircut(general_haircut, general_rate, special_rate)?;
        Self::assemble(spot, general_rate, special_rate, general_haircut, special_haircut)
    }

    pub fn from_special_haircut(
        spot: f64,
        general_rate: f64,
        general_haircut: f64,
        special_haircut: f64,
    ) -> Result<Self> {
        let special_rate = special_rate(general_haircut, special_haircut, general_rate)?;
        Self::assemble(spot, general_rate, special_rate, general_haircut, special_haircut)
    }

    /// Accepts both special terms from outside and rejects them unless they
    /// satisfy the rate/haircut relation to [`RELATION_TOL`].
    pub fn from_both(
        spot: f64,
        general_rate: f64,
        general_haircut: f64,
        special_rate: f64,
        special_haircut: f64,
    ) -> Result<Self> {
        let rel = Self::assemble(spot, general_rate, special_rate, general_haircut, special_haircut)?;
        rel.check_consistency()?;
        Ok(rel)
    }

    fn assemble(
        spot: f64,
        general_rate: f64,
        special_rate: f64,
        general_haircut: f64,
        special_haircut: f64,
    ) -> Result<Self> {
        ensure_finite("spot", spot)?;
        if spot <= 0.0 {
            return Err(Error::invalid("spot", "must be positive"));
        }
        check_haircut("general_haircut", general_haircut)?;
        check_rate("general_rate", general_rate)?;
        let fee_rate = fed_fee_rate(general_rate, special_rate, general_haircut)?;
        let max_fee = max_fed_fee(spot, special_haircut, general_rate, special_rate)?;
        Ok(Self {
            spot,
            general_rate,
            special_rate,
            general_haircut,
            special_haircut,
            fed_fee_rate: fee_rate,
            max_fee,
            general_lend: spot * (1.0 - general_haircut),
        })
    }

    /// `(1 + r_sR)(1 - h_p) - (1 + r_R)(1 - h_c)`
    pub fn residual(&self) -> f64 {
        (1.0 + self.special_rate) * (1.0 - self.special_haircut)
            - (1.0 + self.general_rate) * (1.0 - self.general_haircut)
    }

    pub fn check_consistency(&self) -> Result<()> {
        let residual = self.residual();
        let fee_gap = self.fed_fee_rate - (self.general_haircut - self.special_haircut);
        if residual.abs() > RELATION_TOL || fee_gap.abs() > RELATION_TOL || !residual.is_finite() {
            return Err(Error::InconsistentRelations { residual });
        }
        Ok(())
    }

    /// Cash received from the client, `Q₀ = P₀(1 - h_p)`.
    pub fn client_cash(&self) -> f64 {
        self.spot * (1.0 - self.special_haircut)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// No put in the dealer's hands (`h_p = 0`): the special rate sits near `-h_c`.
    GuaranteedDelivery,
    /// Special rate at zero with a positive auction fee.
    Stressed,
    /// No auction fee: special and general rates coincide.
    NoDemand,
    Normal,
}

pub fn classify_regime(rel: &SpecialRepoRelations) -> Result<Regime> {
    rel.check_consistency()?;
    let regime = if rel.special_haircut.abs() <= RELATION_TOL {
        Regime::GuaranteedDelivery
    } else if rel.special_rate.abs() <= RELATION_TOL && rel.fed_fee_rate > RELATION_TOL {
        Regime::Stressed
    } else if rel.fed_fee_rate.abs() <= RELATION_TOL {
        Regime::NoDemand
    } else {
        Regime::Normal
    };
    Ok(regime)
}

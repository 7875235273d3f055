//! The two worked examples, recomputed and set against the published figures.
//!
//! Example 1 prices a one-day general repo at the 3σ and 2σ repurchase
//! prices. Example 2 prices a one-day special repo struck at the forward.
//! Rates are in % p.a., volatilities in % of P₀, amounts in USD.

use crate::error::Error;
use crate::general::{bs_haircut, price_general_repo};
use crate::market::{forward_gaussian, strike_from_sigma_multiple, DayCount, MarketParams};
use crate::report::{OracleRow, ToleranceRow};
use crate::scenario::McConfig;
use crate::special::price_lender_fail;
use crate::stochastic::{censored_min_mean, censored_min_sd, mc_sample_stats, put_payoff_mean, PayoffMode};

pub const CASE_FORWARD: &str = "forward";
pub const CASE_3SIGMA: &str = "ex1-3sigma";
pub const CASE_2SIGMA: &str = "ex1-2sigma";
pub const CASE_SPECIAL: &str = "ex2";

const USD: &str = "USD";
const PCT_PA: &str = "% p.a.";
const PCT_SPOT: &str = "% of P0";

/// P₀ = 100000, ⟨r_S⟩ = 3%, σ_S = 19%, overnight, r_rf = 0.
pub fn example_market(day_count: DayCount) -> MarketParams {
    MarketParams {
        spot_price: 100_000.0,
        intrinsic_yield: 0.03,
        volatility: 0.19,
        tenor_days: 1,
        risk_free_rate: 0.0,
        day_count,
    }
}

fn general_rows(case: &str, m: &MarketParams, k: f64, targets: &GeneralTargets) -> Result<Vec<ToleranceRow>, Error> {
    let strike = strike_from_sigma_multiple(m, k)?;
    let q = price_general_repo(m, strike)?;
    let h_bs = bs_haircut(m, strike)?;
    let mut rows = vec![
        ToleranceRow::new(case, "repurchase_price", USD, targets.strike.0, strike, targets.strike.1),
        ToleranceRow::new(case, "revenue_mean", USD, targets.revenue_mean.0, q.revenue_mean, targets.revenue_mean.1),
        ToleranceRow::new(
            case,
            "revenue_sd",
            PCT_SPOT,
            targets.revenue_sd.0,
            100.0 * q.revenue_sd_rel,
            targets.revenue_sd.1,
        ),
    ];
    if let Some((v, tol)) = targets.lender_rate {
        rows.push(ToleranceRow::new(case, "lender_rate", PCT_PA, v, 100.0 * q.lender_rate_pa, tol));
    }
    rows.extend([
        ToleranceRow::new(case, "haircut", USD, targets.haircut.0, q.haircut, targets.haircut.1),
        ToleranceRow::new(case, "haircut_bs", USD, targets.haircut_bs.0, h_bs, targets.haircut_bs.1),
    ]);
    if let Some(tol) = targets.max_bs_gap {
        rows.push(ToleranceRow::new(case, "haircut_gap", USD, 0.0, q.haircut - h_bs, tol));
    }
    rows.push(ToleranceRow::new(case, "repo_rate", PCT_PA, targets.repo_rate.0, 100.0 * q.repo_rate_pa, targets.repo_rate.1));
    Ok(rows)
}

struct GeneralTargets {
    strike: (f64, f64),
    revenue_mean: (f64, f64),
    revenue_sd: (f64, f64),
    lender_rate: Option<(f64, f64)>,
    haircut: (f64, f64),
    haircut_bs: (f64, f64),
    max_bs_gap: Option<f64>,
    repo_rate: (f64, f64),
}

/// Every published figure of both examples with its tolerance.
pub fn tracked_values(m: &MarketParams) -> Result<Vec<ToleranceRow>, Error> {
    let g = forward_gaussian(m)?;
    let mut rows = vec![ToleranceRow::new(CASE_FORWARD, "forward_mean", USD, 100_008.33, g.mean, 0.01)];
    rows.extend(general_rows(
        CASE_3SIGMA,
        m,
        3.0,
        &GeneralTargets {
            strike: (97_003.92, 0.10),
            revenue_mean: (97_003.53, 0.05),
            revenue_sd: (0.015, 0.002),
            lender_rate: None,
            haircut: (2_996.47, 0.50),
            haircut_bs: (2_996.41, 1.00),
            max_bs_gap: Some(1.5),
            repo_rate: (0.14, 0.02),
        },
    )?);
    rows.extend(general_rows(
        CASE_2SIGMA,
        m,
        2.0,
        &GeneralTargets {
            strike: (98_005.39, 0.10),
            revenue_mean: (97_996.89, 0.10),
            revenue_sd: (0.077, 0.004),
            lender_rate: Some((0.018, 0.003)),
            haircut: (2_003.16, 0.50),
            haircut_bs: (2_002.76, 1.00),
            max_bs_gap: None,
            repo_rate: (3.1, 0.2),
        },
    )?);
    let s = price_lender_fail(m, g.mean)?;
    rows.extend([
        ToleranceRow::new(CASE_SPECIAL, "premium_bs", USD, 403.69, s.premium, 1.00),
        ToleranceRow::new(CASE_SPECIAL, "lent_amount", USD, 100_403.69, s.lent_amount, 1.00),
        ToleranceRow::new(CASE_SPECIAL, "special_rate", PCT_PA, -142.0, 100.0 * s.special_rate_pa, 2.0),
        ToleranceRow::new(CASE_SPECIAL, "put_value_mean", USD, 399.53, s.put_value_mean, 0.50),
    ]);
    Ok(rows)
}

/// Closed-form moments of both examples against the sampler.
pub fn oracle_rows(m: &MarketParams, mc: McConfig) -> Result<Vec<OracleRow>, Error> {
    let g = forward_gaussian(m)?;
    let mut rows = Vec::new();
    for (case, k) in [(CASE_3SIGMA, 3.0), (CASE_2SIGMA, 2.0)] {
        let strike = strike_from_sigma_multiple(m, k)?;
        let est = mc_sample_stats(strike, g, mc.n, mc.seed, PayoffMode::Min)?;
        rows.push(OracleRow::new(case, "revenue_mean", censored_min_mean(strike, g), est.mean, est.se_mean));
        rows.push(OracleRow::new(case, "revenue_sd", censored_min_sd(strike, g), est.sd, est.se_sd));
    }
    let est = mc_sample_stats(g.mean, g, mc.n, mc.seed, PayoffMode::PutPayoff)?;
    rows.push(OracleRow::new(CASE_SPECIAL, "put_value_mean", put_payoff_mean(g.mean, g), est.mean, est.se_mean));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_tracked_values_reproduce_at_360() {
        let rows = tracked_values(&example_market(DayCount::Act360)).unwrap();
        assert_eq!(rows.len(), 19);
        for r in &rows {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn act365_moves_the_annualized_rates_out_of_tolerance() {
        let rows = tracked_values(&example_market(DayCount::Act365)).unwrap();
        assert!(rows.iter().any(|r| !r.pass));
    }

    #[test]
    fn small_oracle_run_agrees() {
        let rows = oracle_rows(&example_market(DayCount::Act360), McConfig { n: 200_000, seed: 7 }).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.pass), "{rows:?}");
    }
}

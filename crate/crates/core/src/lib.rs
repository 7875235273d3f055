//! Pricing of the options embedded in repurchase agreements.
//!
//! A general repo is read as a cash loan bundled with a European call the
//! lender writes to the borrower; its haircut is the call premium. A special
//! repo carries a put written the other way. The crate prices both legs,
//! derives the repo-rate and haircut relations between general and special
//! collateral, replays the dealer's financing chain in a ledger, and checks
//! closed forms against Black-Scholes and a seeded Monte Carlo sampler.

pub mod bs;
pub mod commands;
pub mod error;
pub mod general;
pub mod ledger;
pub mod market;
pub mod report;
pub mod reproduce;
pub mod scenario;
pub mod special;
pub mod stochastic;

pub use bs::{bs_call, bs_put, BsInputs};
pub use error::{Error, ErrorKind, LiquidityCondition, Result};
pub use general::{
    bs_haircut, identity_residual, lender_rate_from_bs, price_general_repo, GeneralRepoQuote,
};
pub use market::{forward_gaussian, strike_from_sigma_multiple, DayCount, MarketParams, Period};
pub use ledger::{
    check_liquidity, run_dealer_scenario, CashflowReport, ConditionCheck, DealerRun, DealerScenario,
    LedgerEntry, LedgerState, LiquidityMode,
};
pub use special::{
    classify_regime, fed_fee_rate, max_fed_fee, price_lender_fail, special_haircut, special_rate,
    Regime, SpecialLenderQuote, SpecialRepoRelations,
};
pub use stochastic::{GaussianParams, McEstimate, PayoffMode};

//! Command implementations behind the CLI. Each returns a report document;
//! the binary only parses arguments, renders, and maps errors to exit codes.

use std::path::Path;

use crate::error::{Error, ErrorKind};
use crate::general::{bs_haircut, identity_residual, lender_rate_from_bs, price_general_repo};
use crate::ledger::{run_dealer_scenario, LiquidityMode};
use crate::market::{forward_gaussian, DayCount, MarketParams};
use crate::report::{
    AnnualizedRelations, BsComparison, Conventions, OracleRow, Outputs, Provenance, ReportDocument, StrikeRow,
    REPORT_SCHEMA_VERSION,
};
use crate::reproduce;
use crate::scenario::{load_scenario, LoadedScenario, McConfig, Scenario, ScenarioError};
use crate::special::{classify_regime, price_lender_fail};
use crate::stochastic::{censored_min_mean, censored_min_sd, mc_sample_stats, put_payoff_mean, PayoffMode};

/// Residual bound for the haircut/rate identity of a general quote.
pub const IDENTITY_TOL: f64 = 1e-9;

pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_TOLERANCE: i32 = 4;
pub const EXIT_LIQUIDITY: i32 = 5;
pub const EXIT_PRICING: i32 = 6;
pub const EXIT_IO: i32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{0}")]
    Model(#[from] Error),
    #[error("wrong scenario kind: {0}")]
    WrongKind(String),
    #[error("invalid argument: {0}")]
    Argument(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Scenario(ScenarioError::Io { .. }) => EXIT_IO,
            Self::Scenario(ScenarioError::Parse(_)) => EXIT_PARSE,
            Self::Scenario(ScenarioError::Validation(e)) | Self::Model(e) => match e.kind() {
                ErrorKind::Validation => EXIT_VALIDATION,
                ErrorKind::Pricing => EXIT_PRICING,
                ErrorKind::Liquidity => EXIT_LIQUIDITY,
            },
            Self::WrongKind(_) | Self::Argument(_) => EXIT_VALIDATION,
        }
    }
}

/// Options shared by every command.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Overrides the Monte Carlo seed from the scenario file.
    pub seed: Option<u64>,
}

fn mc_config(loaded: &LoadedScenario, opts: RunOptions) -> Option<McConfig> {
    loaded.file.mc.map(|mc| McConfig {
        n: mc.n,
        seed: opts.seed.unwrap_or(mc.seed),
    })
}

fn document(
    command: &str,
    conventions: Conventions,
    inputs: serde_json::Value,
    outputs: Outputs,
    oracle: Option<Vec<OracleRow>>,
    seed: Option<u64>,
) -> ReportDocument {
    let mut failures: Vec<String> = Vec::new();
    if let Some(rows) = &oracle {
        failures.extend(
            rows.iter()
                .filter(|r| !r.pass)
                .map(|r| format!("{} {}: closed form off the Monte Carlo estimate by {:.2} se", r.case, r.quantity, r.z)),
        );
    }
    match &outputs {
        Outputs::General { identity_residual, .. } if identity_residual.abs() > IDENTITY_TOL => {
            failures.push(format!("haircut/rate identity residual {identity_residual:e}"));
        }
        Outputs::Reproduction { rows } => failures.extend(
            rows.iter()
                .filter(|r| !r.pass)
                .map(|r| format!("{} {}: computed {} vs {} ± {}", r.case, r.quantity, r.computed, r.expected, r.tolerance)),
        ),
        _ => {}
    }
    ReportDocument {
        schema_version: REPORT_SCHEMA_VERSION.to_owned(),
        command: command.to_owned(),
        conventions,
        inputs,
        outputs,
        oracle,
        failures,
        provenance: Provenance::new(seed),
    }
}

fn inputs_echo(loaded: &LoadedScenario) -> serde_json::Value {
    serde_json::to_value(&loaded.file).expect("scenario serializes")
}

fn market_conventions(m: &MarketParams) -> Conventions {
    Conventions::simple(m.tenor_days, m.day_count.days())
}

/// Closed-form moments of a general quote against the sampler.
pub fn general_oracle(case: &str, m: &MarketParams, strike: f64, mc: McConfig) -> Result<Vec<OracleRow>, Error> {
    let g = forward_gaussian(m)?;
    let est = mc_sample_stats(strike, g, mc.n, mc.seed, PayoffMode::Min)?;
    Ok(vec![
        OracleRow::new(case, "revenue_mean", censored_min_mean(strike, g), est.mean, est.se_mean),
        OracleRow::new(case, "revenue_sd", censored_min_sd(strike, g), est.sd, est.se_sd),
    ])
}

pub fn put_oracle(case: &str, m: &MarketParams, strike: f64, mc: McConfig) -> Result<Vec<OracleRow>, Error> {
    let g = forward_gaussian(m)?;
    let est = mc_sample_stats(strike, g, mc.n, mc.seed, PayoffMode::PutPayoff)?;
    Ok(vec![OracleRow::new(
        case,
        "put_value_mean",
        put_payoff_mean(strike, g),
        est.mean,
        est.se_mean,
    )])
}

pub fn general_outputs(m: &MarketParams, strike: f64) -> Result<Outputs, Error> {
    let quote = price_general_repo(m, strike)?;
    let haircut_bs = bs_haircut(m, strike)?;
    let period = m.period();
    Ok(Outputs::General {
        black_scholes: BsComparison {
            haircut_bs,
            haircut_gap: quote.haircut - haircut_bs,
            lender_rate_bs_pa: lender_rate_from_bs(m, strike)?,
        },
        lender_rate_period: period.to_period(quote.lender_rate_pa),
        repo_rate_period: quote.repurchase_price / quote.lent_amount - 1.0,
        identity_residual: identity_residual(&quote, m),
        quote,
    })
}

pub fn price_general(path: &Path, opts: RunOptions) -> Result<ReportDocument, CommandError> {
    let loaded = load_scenario(path)?;
    let Scenario::General { market, strike } = loaded.scenario else {
        return Err(CommandError::WrongKind("price-general expects kind \"general\"".into()));
    };
    let strike = strike.resolve(&market)?;
    let outputs = general_outputs(&market, strike)?;
    let mc = mc_config(&loaded, opts);
    let oracle = mc.map(|mc| general_oracle("scenario", &market, strike, mc)).transpose()?;
    Ok(document(
        "price-general",
        market_conventions(&market),
        inputs_echo(&loaded),
        outputs,
        oracle,
        mc.map(|c| c.seed),
    ))
}

pub fn price_special(path: &Path, opts: RunOptions) -> Result<ReportDocument, CommandError> {
    let loaded = load_scenario(path)?;
    let mc = mc_config(&loaded, opts);
    match loaded.scenario {
        Scenario::SpecialLender { market, strike } => {
            let strike = strike.resolve(&market)?;
            let quote = price_lender_fail(&market, strike)?;
            let oracle = mc.map(|mc| put_oracle("scenario", &market, strike, mc)).transpose()?;
            Ok(document(
                "price-special",
                market_conventions(&market),
                inputs_echo(&loaded),
                Outputs::SpecialLender { quote },
                oracle,
                mc.map(|c| c.seed),
            ))
        }
        Scenario::SpecialRelations(t) => {
            let relations = t.relations()?;
            let regime = classify_regime(&relations)?;
            let period = t.period()?;
            Ok(document(
                "price-special",
                Conventions::simple(t.tenor_days, t.day_count.days()),
                inputs_echo(&loaded),
                Outputs::SpecialRelations {
                    annualized: AnnualizedRelations {
                        general_rate_pa: period.annualize(relations.general_rate),
                        special_rate_pa: period.annualize(relations.special_rate),
                        fed_fee_rate_pa: period.annualize(relations.fed_fee_rate),
                    },
                    relations,
                    regime,
                },
                None,
                None,
            ))
        }
        _ => Err(CommandError::WrongKind(
            "price-special expects kind \"special_lender\" or \"special_relations\"".into(),
        )),
    }
}

pub fn dealer_sim(path: &Path, mode: LiquidityMode) -> Result<ReportDocument, CommandError> {
    let loaded = load_scenario(path)?;
    let Scenario::Dealer(t) = loaded.scenario else {
        return Err(CommandError::WrongKind("dealer-sim expects kind \"dealer\"".into()));
    };
    let scenario = t.dealer_scenario()?;
    let run = run_dealer_scenario(&scenario, mode)?;
    Ok(document(
        "dealer-sim",
        Conventions::simple(t.tenor_days, t.day_count.days()),
        inputs_echo(&loaded),
        Outputs::Dealer {
            mode,
            scenario,
            cashflows: run.cashflows,
            liquidity: run.liquidity,
            ledger: run.ledger,
        },
        None,
        None,
    ))
}

/// Parses a comma-separated list of repurchase prices.
pub fn parse_strikes(list: &str) -> Result<Vec<f64>, CommandError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v > 0.0)
                .ok_or_else(|| CommandError::Argument(format!("bad strike {s:?}")))
        })
        .collect()
}

pub fn compare_bs(path: &Path, strikes: Option<&[f64]>) -> Result<ReportDocument, CommandError> {
    let loaded = load_scenario(path)?;
    let Scenario::General { market, strike } = loaded.scenario else {
        return Err(CommandError::WrongKind("compare-bs expects kind \"general\"".into()));
    };
    let strikes = match strikes {
        Some(s) if !s.is_empty() => s.to_vec(),
        _ => vec![strike.resolve(&market)?],
    };
    let g = forward_gaussian(&market)?;
    let rows = strikes
        .iter()
        .map(|&k| {
            let quote = price_general_repo(&market, k)?;
            let haircut_bs = bs_haircut(&market, k)?;
            let gap = quote.haircut - haircut_bs;
            Ok(StrikeRow {
                repurchase_price: k,
                sigma_multiple: (g.mean - k) / g.sd,
                haircut: quote.haircut,
                haircut_bs,
                haircut_gap: gap,
                relative_gap: gap / haircut_bs,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(document(
        "compare-bs",
        market_conventions(&market),
        inputs_echo(&loaded),
        Outputs::BsComparison { rows },
        None,
        None,
    ))
}

#[derive(Debug, Clone, Copy)]
pub struct ReproduceOptions {
    pub day_count: DayCount,
    pub mc: Option<McConfig>,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self {
            day_count: DayCount::Act360,
            mc: None,
        }
    }
}

pub fn reproduce_examples(opts: ReproduceOptions) -> Result<ReportDocument, CommandError> {
    let market = reproduce::example_market(opts.day_count);
    let rows = reproduce::tracked_values(&market)?;
    let oracle = opts.mc.map(|mc| reproduce::oracle_rows(&market, mc)).transpose()?;
    let inputs = serde_json::json!({ "market": market, "mc": opts.mc });
    Ok(document(
        "reproduce-examples",
        market_conventions(&market),
        inputs,
        Outputs::Reproduction { rows },
        oracle,
        opts.mc.map(|c| c.seed),
    ))
}

//! Scenario files: versioned JSON documents describing one pricing job.
//!
//! All rates in a scenario file are simple rates per annum; the holding
//! period and day count given alongside them convert to per-period values.
//! Unknown fields are rejected everywhere.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error};
use crate::ledger::DealerScenario;
use crate::market::{strike_from_sigma_multiple, DayCount, MarketParams, Period};
use crate::special::SpecialRepoRelations;

pub const SCENARIO_SCHEMA_VERSION: &str = "1";

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(#[from] Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    General,
    SpecialLender,
    SpecialRelations,
    Dealer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub n: u64,
    pub seed: u64,
}

/// The document as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: String,
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub currency: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub market: Option<MarketParams>,
    pub terms: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McConfig>,
}

/// Repurchase price given directly or as a number of period sigmas below
/// the expected forward price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrikeTerms {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repurchase_price: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_multiple: Option<f64>,
}

impl StrikeTerms {
    pub fn resolve(&self, m: &MarketParams) -> Result<f64, Error> {
        match (self.repurchase_price, self.sigma_multiple) {
            (Some(q), None) => {
                ensure_finite("repurchase_price", q)?;
                if q <= 0.0 {
                    return Err(Error::invalid("repurchase_price", "must be positive"));
                }
                Ok(q)
            }
            (None, Some(k)) => strike_from_sigma_multiple(m, k),
            _ => Err(Error::invalid(
                "terms",
                "give exactly one of repurchase_price or sigma_multiple",
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationsTerms {
    pub spot_price: f64,
    pub tenor_days: u32,
    #[serde(default)]
    pub day_count: DayCount,
    /// Per annum.
    pub general_rate: f64,
    pub general_haircut: f64,
    /// Per annum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special_haircut: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeeTerms {
    Amount(f64),
    Named(FeeKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeeKeyword {
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DealerTerms {
    pub note_count: u64,
    pub note_spot: f64,
    pub intermediate_price: f64,
    pub tenor_days: u32,
    #[serde(default)]
    pub day_count: DayCount,
    /// Per annum.
    pub general_rate: f64,
    pub general_haircut: f64,
    /// Per annum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special_haircut: Option<f64>,
    /// Auction fee in currency, or `"max"` for the largest affordable fee.
    pub fed_fee: FeeTerms,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    General { market: MarketParams, strike: StrikeTerms },
    SpecialLender { market: MarketParams, strike: StrikeTerms },
    SpecialRelations(RelationsTerms),
    Dealer(DealerTerms),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedScenario {
    pub file: ScenarioFile,
    pub scenario: Scenario,
}

pub fn load_scenario(path: &Path) -> Result<LoadedScenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<LoadedScenario, ScenarioError> {
    // serde_json's messages carry "at line L column C".
    let file: ScenarioFile =
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    if file.schema_version != SCENARIO_SCHEMA_VERSION {
        return Err(ScenarioError::Parse(format!(
            "unsupported schema_version {:?}, expected {SCENARIO_SCHEMA_VERSION:?}",
            file.schema_version
        )));
    }
    let scenario = match file.kind {
        ScenarioKind::General | ScenarioKind::SpecialLender => {
            let market = file.market.ok_or_else(|| {
                ScenarioError::Validation(Error::invalid("market", "required for this kind"))
            })?;
            market.validate()?;
            let strike: StrikeTerms = terms(&file.terms)?;
            strike.resolve(&market)?;
            if file.kind == ScenarioKind::General {
                Scenario::General { market, strike }
            } else {
                Scenario::SpecialLender { market, strike }
            }
        }
        ScenarioKind::SpecialRelations => {
            reject_market(&file)?;
            let t: RelationsTerms = terms(&file.terms)?;
            t.relations()?;
            Scenario::SpecialRelations(t)
        }
        ScenarioKind::Dealer => {
            reject_market(&file)?;
            let t: DealerTerms = terms(&file.terms)?;
            t.dealer_scenario()?;
            Scenario::Dealer(t)
        }
    };
    if let Some(mc) = file.mc {
        if mc.n < 2 {
            return Err(Error::invalid("mc.n", "need at least 2 samples").into());
        }
    }
    Ok(LoadedScenario { file, scenario })
}

fn terms<T: serde::de::DeserializeOwned>(v: &serde_json::Value) -> Result<T, ScenarioError> {
    T::deserialize(v).map_err(|e| ScenarioError::Parse(format!("terms: {e}")))
}

fn reject_market(file: &ScenarioFile) -> Result<(), ScenarioError> {
    if file.market.is_some() {
        return Err(Error::invalid("market", "not used by this kind; put the period in terms").into());
    }
    Ok(())
}

fn relations_from(
    spot: f64,
    period: Period,
    general_rate_pa: f64,
    general_haircut: f64,
    special_rate_pa: Option<f64>,
    special_haircut: Option<f64>,
) -> Result<SpecialRepoRelations, Error> {
    ensure_finite("general_rate", general_rate_pa)?;
    let general_rate = period.to_period(general_rate_pa);
    if general_haircut < 0.0 {
        return Err(Error::invalid("general_haircut", "must be non-negative"));
    }
    match (special_rate_pa, special_haircut) {
        (Some(rs), None) => {
            ensure_finite("special_rate", rs)?;
            SpecialRepoRelations::from_special_rate(spot, general_rate, general_haircut, period.to_period(rs))
        }
        (None, Some(hp)) => SpecialRepoRelations::from_special_haircut(spot, general_rate, general_haircut, hp),
        (Some(rs), Some(hp)) => {
            ensure_finite("special_rate", rs)?;
            SpecialRepoRelations::from_both(spot, general_rate, general_haircut, period.to_period(rs), hp)
        }
        (None, None) => Err(Error::invalid(
            "terms",
            "give special_rate, special_haircut, or both",
        )),
    }
}

impl RelationsTerms {
    pub fn period(&self) -> Result<Period, Error> {
        Period::new(self.tenor_days, self.day_count)
    }

    pub fn relations(&self) -> Result<SpecialRepoRelations, Error> {
        ensure_finite("spot_price", self.spot_price)?;
        if self.spot_price <= 0.0 {
            return Err(Error::invalid("spot_price", "must be positive"));
        }
        relations_from(
            self.spot_price,
            self.period()?,
            self.general_rate,
            self.general_haircut,
            self.special_rate,
            self.special_haircut,
        )
    }
}

impl DealerTerms {
    pub fn period(&self) -> Result<Period, Error> {
        Period::new(self.tenor_days, self.day_count)
    }

    pub fn relations(&self) -> Result<SpecialRepoRelations, Error> {
        ensure_finite("note_spot", self.note_spot)?;
        if self.note_count == 0 || self.note_spot <= 0.0 {
            return Err(Error::invalid("note_spot", "note_count and note_spot must be positive"));
        }
        relations_from(
            self.note_spot * self.note_count as f64,
            self.period()?,
            self.general_rate,
            self.general_haircut,
            self.special_rate,
            self.special_haircut,
        )
    }

    pub fn dealer_scenario(&self) -> Result<DealerScenario, Error> {
        let rel = self.relations()?;
        let mut s = DealerScenario::at_max_fee(&rel, self.note_count, self.intermediate_price)?;
        s.note_spot = self.note_spot;
        if let FeeTerms::Amount(fee) = self.fed_fee {
            s.fed_fee = fee;
        }
        s.validate()?;
        Ok(s)
    }
}

//! Report documents and their JSON, CSV and table renderings.
//!
//! CSV output is a fixed two-column layout, `path,value`, one row per leaf
//! of the report's JSON tree in document order. Paths join object keys and
//! array indices with dots (`outputs.quote.haircut`,
//! `outputs.ledger.step_log.2.cash`). Numbers are written in the shortest
//! form that parses back to the same `f64`, exactly as in the JSON output.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::general::GeneralRepoQuote;
use crate::ledger::{CashflowReport, ConditionCheck, DealerScenario, LedgerState, LiquidityMode};
use crate::special::{Regime, SpecialLenderQuote, SpecialRepoRelations};

pub const REPORT_SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub artifact: String,
    pub version: String,
    pub seed: Option<u64>,
    pub generator: Option<String>,
}

impl Provenance {
    pub fn new(seed: Option<u64>) -> Self {
        Self {
            artifact: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            seed,
            generator: seed.map(|_| crate::stochastic::mc::GENERATOR.to_owned()),
        }
    }
}

/// How the rates in the report are quoted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Conventions {
    pub tenor_days: Option<u32>,
    pub day_count: Option<u32>,
    pub rates: String,
}

impl Conventions {
    pub fn simple(tenor_days: u32, day_count: u32) -> Self {
        Self {
            tenor_days: Some(tenor_days),
            day_count: Some(day_count),
            rates: "fields ending in _pa are simple rates per annum (period rate * day_count / tenor_days); \
                    fields ending in _period and unsuffixed rates/haircuts are per holding period"
                .to_owned(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BsComparison {
    /// (H_c)_BS
    pub haircut_bs: f64,
    /// H_c - (H_c)_BS
    pub haircut_gap: f64,
    /// Lender rate implied by the Black-Scholes haircut, per annum.
    pub lender_rate_bs_pa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnualizedRelations {
    pub general_rate_pa: f64,
    pub special_rate_pa: f64,
    pub fed_fee_rate_pa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrikeRow {
    pub repurchase_price: f64,
    pub sigma_multiple: f64,
    pub haircut: f64,
    pub haircut_bs: f64,
    pub haircut_gap: f64,
    pub relative_gap: f64,
}

/// One quantity checked against a reference value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceRow {
    pub case: String,
    pub quantity: String,
    pub unit: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ToleranceRow {
    pub fn new(case: &str, quantity: &str, unit: &str, expected: f64, computed: f64, tolerance: f64) -> Self {
        Self {
            case: case.to_owned(),
            quantity: quantity.to_owned(),
            unit: unit.to_owned(),
            expected,
            computed,
            tolerance,
            pass: (computed - expected).abs() <= tolerance,
        }
    }
}

/// Closed form against the Monte Carlo estimate of the same moment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleRow {
    pub case: String,
    pub quantity: String,
    pub closed_form: f64,
    pub estimate: f64,
    pub standard_error: f64,
    pub delta: f64,
    pub z: f64,
    pub pass: bool,
}

/// Oracle rows fail beyond this many standard errors.
pub const ORACLE_MAX_Z: f64 = 4.0;

impl OracleRow {
    pub fn new(case: &str, quantity: &str, closed_form: f64, estimate: f64, standard_error: f64) -> Self {
        let delta = closed_form - estimate;
        let z = if standard_error > 0.0 {
            delta.abs() / standard_error
        } else if delta == 0.0 {
            0.0
        } else {
            f64::MAX
        };
        Self {
            case: case.to_owned(),
            quantity: quantity.to_owned(),
            closed_form,
            estimate,
            standard_error,
            delta,
            z,
            pass: z <= ORACLE_MAX_Z,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Outputs {
    General {
        quote: GeneralRepoQuote,
        black_scholes: BsComparison,
        lender_rate_period: f64,
        repo_rate_period: f64,
        identity_residual: f64,
    },
    SpecialLender {
        quote: SpecialLenderQuote,
    },
    SpecialRelations {
        relations: SpecialRepoRelations,
        regime: Regime,
        annualized: AnnualizedRelations,
    },
    Dealer {
        mode: LiquidityMode,
        scenario: DealerScenario,
        cashflows: CashflowReport,
        liquidity: Vec<ConditionCheck>,
        ledger: LedgerState,
    },
    BsComparison {
        rows: Vec<StrikeRow>,
    },
    Reproduction {
        rows: Vec<ToleranceRow>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub schema_version: String,
    pub command: String,
    pub conventions: Conventions,
    pub inputs: Value,
    pub outputs: Outputs,
    pub oracle: Option<Vec<OracleRow>>,
    /// Failed checks; a non-empty list maps to the tolerance exit code.
    pub failures: Vec<String>,
    pub provenance: Provenance,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let tree = serde_json::to_value(self).expect("report serializes");
        let mut rows = Vec::new();
        flatten(&tree, String::new(), &mut rows);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["path", "value"]).expect("in-memory write");
        for (path, value) in rows {
            w.write_record([path, value]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} (report schema {})", self.command, self.schema_version);
        match &self.outputs {
            Outputs::Reproduction { rows } => {
                let _ = writeln!(
                    out,
                    "{:<10} {:<22} {:>16} {:>16} {:>10} {:<10} status",
                    "case", "quantity", "expected", "computed", "tolerance", "unit"
                );
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{:<10} {:<22} {:>16.4} {:>16.4} {:>10.4} {:<10} {}",
                        r.case,
                        r.quantity,
                        r.expected,
                        r.computed,
                        r.tolerance,
                        r.unit,
                        if r.pass { "ok" } else { "MISMATCH" }
                    );
                }
            }
            Outputs::BsComparison { rows } => {
                let _ = writeln!(
                    out,
                    "{:>14} {:>8} {:>12} {:>12} {:>10} {:>10}",
                    "strike", "sigmas", "haircut", "haircut_bs", "gap", "rel_gap"
                );
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{:>14.2} {:>8.3} {:>12.4} {:>12.4} {:>10.4} {:>10.6}",
                        r.repurchase_price, r.sigma_multiple, r.haircut, r.haircut_bs, r.haircut_gap, r.relative_gap
                    );
                }
            }
            Outputs::Dealer { ledger, .. } => {
                let _ = writeln!(
                    out,
                    "{:>4} {:<62} {:>16} {:>6} {:>16}",
                    "step", "action", "cash delta", "notes", "cash"
                );
                for e in &ledger.step_log {
                    let _ = writeln!(
                        out,
                        "{:>4} {:<62} {:>16.4} {:>6} {:>16.4}",
                        e.step, e.label, e.cash_delta, e.note_delta, e.cash
                    );
                }
                let tree = serde_json::to_value(&self.outputs).expect("serializes");
                let mut rows = Vec::new();
                for key in ["cashflows", "liquidity"] {
                    flatten(&tree[key], key.to_owned(), &mut rows);
                }
                write_pairs(&mut out, &rows);
            }
            other => {
                let tree = serde_json::to_value(other).expect("serializes");
                let mut rows = Vec::new();
                flatten(&tree, String::new(), &mut rows);
                write_pairs(&mut out, &rows);
            }
        }
        if let Some(oracle) = &self.oracle {
            let _ = writeln!(out, "\nMonte Carlo oracle");
            for r in oracle {
                let _ = writeln!(
                    out,
                    "{:<10} {:<22} closed {:>16.6} mc {:>16.6} se {:>10.6} z {:>6.2} {}",
                    r.case,
                    r.quantity,
                    r.closed_form,
                    r.estimate,
                    r.standard_error,
                    r.z,
                    if r.pass { "ok" } else { "FAIL" }
                );
            }
        }
        for f in &self.failures {
            let _ = writeln!(out, "FAILED: {f}");
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Table => self.to_table(),
        }
    }
}

fn write_pairs(out: &mut String, rows: &[(String, String)]) {
    let width = rows.iter().map(|(p, _)| p.len()).max().unwrap_or(0);
    for (path, value) in rows {
        let shown = match value.parse::<f64>() {
            Ok(v) if v != 0.0 && v.abs() < 1e-3 => format!("{v:.6e}"),
            Ok(v) if value.contains('.') || value.contains('e') => format!("{v:.6}"),
            _ => value.clone(),
        };
        let _ = writeln!(out, "{path:<width$}  {shown}");
    }
}

fn flatten(v: &Value, path: String, out: &mut Vec<(String, String)>) {
    let child = |key: &str| {
        if path.is_empty() {
            key.to_owned()
        } else {
            format!("{path}.{key}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(v, child(k), out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(v, child(&i.to_string()), out);
            }
        }
        Value::String(s) => out.push((path, s.clone())),
        Value::Null => out.push((path, String::new())),
        other => out.push((path, other.to_string())),
    }
}

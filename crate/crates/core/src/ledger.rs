//! Replay of a dealer's special-repo financing chain.
//!
//! The dealer takes cash from a client against a promise of specific notes,
//! lends part of it in the general repo market, pledges the general
//! collateral at the central bank's auction to borrow the notes, shorts them,
//! buys them back, and unwinds every leg. All interest is simple interest
//! over one period. Steps run strictly in order; the three closing-leg steps
//! (7 to 9) settle together, so liquidity at the close is judged on their
//! net effect.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, LiquidityCondition, Result};
use crate::special::SpecialRepoRelations;

/// Slack below `-LIQUIDITY_TOL * P₀` counts as a breach.
pub const LIQUIDITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DealerScenario {
    /// N
    pub note_count: u64,
    /// p₀, spot price per note
    pub note_spot: f64,
    /// p, price per note at which the short is covered
    pub intermediate_price: f64,
    /// r_sR, per period
    pub special_rate: f64,
    /// r_R, per period
    pub general_rate: f64,
    /// h_p, haircut on the specific collateral
    pub special_haircut: f64,
    /// h_c, haircut on the general collateral
    pub general_haircut: f64,
    /// F₀, auction fee paid in cash
    pub fed_fee: f64,
}

impl DealerScenario {
    /// Scenario paying the largest affordable auction fee for the given
    /// relation tuple, with `P₀` split into `note_count` notes.
    pub fn at_max_fee(rel: &SpecialRepoRelations, note_count: u64, intermediate_price: f64) -> Result<Self> {
        if note_count == 0 {
            return Err(Error::invalid("note_count", "must be at least one"));
        }
        Ok(Self {
            note_count,
            note_spot: rel.spot / note_count as f64,
            intermediate_price,
            special_rate: rel.special_rate,
            general_rate: rel.general_rate,
            special_haircut: rel.special_haircut,
            general_haircut: rel.general_haircut,
            fed_fee: rel.max_fee,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.note_count == 0 {
            return Err(Error::invalid("note_count", "must be at least one"));
        }
        if self.note_count > i64::MAX as u64 {
            return Err(Error::invalid("note_count", "too large"));
        }
        for (field, v) in [
            ("note_spot", self.note_spot),
            ("intermediate_price", self.intermediate_price),
            ("special_rate", self.special_rate),
            ("general_rate", self.general_rate),
            ("special_haircut", self.special_haircut),
            ("general_haircut", self.general_haircut),
            ("fed_fee", self.fed_fee),
        ] {
            ensure_finite(field, v)?;
        }
        if self.note_spot <= 0.0 {
            return Err(Error::invalid("note_spot", "must be positive"));
        }
        if self.intermediate_price < 0.0 {
            return Err(Error::invalid("intermediate_price", "must be non-negative"));
        }
        if self.fed_fee < 0.0 {
            return Err(Error::invalid("fed_fee", "must be non-negative"));
        }
        Ok(())
    }

    /// P₀ = p₀·N
    pub fn spot_value(&self) -> f64 {
        self.note_spot * self.note_count as f64
    }

    /// Q₀ = P₀(1 - h_p), received from the client.
    pub fn client_cash(&self) -> f64 {
        self.spot_value() * (1.0 - self.special_haircut)
    }

    /// Q_g0 = P₀(1 - h_c), lent in the general repo.
    pub fn general_lend(&self) -> f64 {
        self.spot_value() * (1.0 - self.general_haircut)
    }

    /// P = p·N
    pub fn repurchase_cost(&self) -> f64 {
        self.intermediate_price * self.note_count as f64
    }

    /// Q₁ = Q₀(1 + r_sR), repaid to the client.
    pub fn closing_payment(&self) -> f64 {
        self.client_cash() * (1.0 + self.special_rate)
    }

    /// Q_g1 = Q_g0(1 + r_R), received from the general repo.
    pub fn general_repayment(&self) -> f64 {
        self.general_lend() * (1.0 + self.general_rate)
    }

    fn notes(&self) -> i64 {
        self.note_count as i64
    }
}

/// One booked step with the balances after it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerEntry {
    pub step: u8,
    pub label: String,
    pub cash_delta: f64,
    pub note_delta: i64,
    pub collateral_delta: f64,
    pub cash: f64,
    pub notes: i64,
    pub collateral: f64,
}

/// Dealer positions: signed cash, specific notes held, and general
/// collateral held (in currency).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LedgerState {
    pub cash: f64,
    pub specific_notes: i64,
    pub general_collateral: f64,
    pub step_log: Vec<LedgerEntry>,
}

impl LedgerState {
    fn book(&mut self, step: u8, label: &str, cash_delta: f64, note_delta: i64, collateral_delta: f64) {
        self.cash += cash_delta;
        self.specific_notes += note_delta;
        self.general_collateral += collateral_delta;
        self.step_log.push(LedgerEntry {
            step,
            label: label.to_owned(),
            cash_delta,
            note_delta,
            collateral_delta,
            cash: self.cash,
            notes: self.specific_notes,
            collateral: self.general_collateral,
        });
    }

    /// Rebuilds a ledger from its log, checking that every recorded running
    /// balance is reproduced exactly.
    pub fn replay(entries: &[LedgerEntry]) -> Result<Self> {
        let mut state = Self::default();
        for e in entries {
            state.book(e.step, &e.label, e.cash_delta, e.note_delta, e.collateral_delta);
            let last = state.step_log.last().expect("just booked");
            if last != e {
                return Err(Error::invalid(
                    "step_log",
                    format!("running balances diverge at step {}", e.step),
                ));
            }
        }
        Ok(state)
    }

    pub fn is_flat(&self) -> bool {
        self.specific_notes == 0 && self.general_collateral == 0.0
    }
}

/// Net cash of the dealer over the period split into carry and short-sale
/// parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CashflowReport {
    /// C_if = Q_g0·r_R - Q₀·r_sR - F₀
    pub interest_carry: f64,
    /// C_r = P₀ - P
    pub short_sale: f64,
    /// C_B = C_if + C_r
    pub net: f64,
    /// Cash left in the ledger after the final step.
    pub ledger_cash: f64,
}

impl CashflowReport {
    pub fn from_formulas(s: &DealerScenario) -> Self {
        let interest_carry =
            s.general_lend() * s.general_rate - s.client_cash() * s.special_rate - s.fed_fee;
        let short_sale = s.spot_value() - s.repurchase_cost();
        Self {
            interest_carry,
            short_sale,
            net: interest_carry + short_sale,
            ledger_cash: f64::NAN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionCheck {
    pub condition: LiquidityCondition,
    pub slack: f64,
    /// Whether the chosen mode enforces this condition.
    pub required: bool,
    pub satisfied: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiquidityMode {
    /// Carry alone must fund the close; the notes must not be bought back
    /// above their sale price.
    #[default]
    Strict,
    /// The short-sale gain may be counted towards the close.
    Relaxed,
}

/// Step at which each condition is enforced during a run.
fn enforcement_step(c: LiquidityCondition) -> u8 {
    match c {
        LiquidityCondition::AuctionFunding => 3,
        LiquidityCondition::NoteRepurchase | LiquidityCondition::RepurchaseFunding => 5,
        LiquidityCondition::ClosingWithoutSpeculation | LiquidityCondition::ClosingWithSpeculation => 7,
    }
}

pub fn check_liquidity(s: &DealerScenario, mode: LiquidityMode) -> Result<Vec<ConditionCheck>> {
    s.validate()?;
    let strict = mode == LiquidityMode::Strict;
    let tol = LIQUIDITY_TOL * s.spot_value();
    let funding = s.client_cash() - s.general_lend() - s.fed_fee;
    let short_sale = s.spot_value() - s.repurchase_cost();
    let carry = s.general_lend() * s.general_rate - s.client_cash() * s.special_rate - s.fed_fee;
    let checks = [
        (LiquidityCondition::AuctionFunding, funding, true),
        (
            LiquidityCondition::NoteRepurchase,
            (s.note_spot - s.intermediate_price) * s.note_count as f64,
            strict,
        ),
        (LiquidityCondition::RepurchaseFunding, funding + short_sale, true),
        (LiquidityCondition::ClosingWithoutSpeculation, carry, strict),
        (LiquidityCondition::ClosingWithSpeculation, short_sale + carry, !strict),
    ];
    Ok(checks
        .into_iter()
        .map(|(condition, slack, required)| ConditionCheck {
            condition,
            slack,
            required,
            satisfied: slack >= -tol,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DealerRun {
    pub ledger: LedgerState,
    pub cashflows: CashflowReport,
    pub liquidity: Vec<ConditionCheck>,
}

/// Books the nine dealer steps and returns the ledger with the cash-flow
/// decomposition. Fails with [`Error::Liquidity`] at the first step where a
/// condition enforced by `mode` is breached.
pub fn run_dealer_scenario(s: &DealerScenario, mode: LiquidityMode) -> Result<DealerRun> {
    let liquidity = check_liquidity(s, mode)?;
    let gate = |step: u8| -> Result<()> {
        match liquidity
            .iter()
            .find(|c| c.required && !c.satisfied && enforcement_step(c.condition) == step)
        {
            Some(c) => Err(Error::Liquidity {
                step,
                condition: c.condition,
                slack: c.slack,
            }),
            None => Ok(()),
        }
    };

    let p0 = s.spot_value();
    let n = s.notes();
    let mut ledger = LedgerState::default();
    ledger.book(1, "receive client cash against specific notes", s.client_cash(), 0, 0.0);
    ledger.book(2, "lend in general repo, take general collateral", -s.general_lend(), 0, p0);
    ledger.book(3, "borrow notes at auction, pay fee, pledge general collateral", -s.fed_fee, n, -p0);
    gate(3)?;
    ledger.book(4, "sell borrowed notes at spot", p0, -n, 0.0);
    ledger.book(5, "buy notes back at intermediate price", -s.repurchase_cost(), n, 0.0);
    gate(5)?;
    ledger.book(6, "deliver notes to client", 0.0, -n, 0.0);
    gate(7)?;
    ledger.book(7, "take notes from client, repay client with special interest", -s.closing_payment(), n, 0.0);
    ledger.book(8, "return notes to auction lender, recover general collateral", 0.0, -n, p0);
    ledger.book(9, "receive general repo repayment, release general collateral", s.general_repayment(), 0, -p0);

    let mut cashflows = CashflowReport::from_formulas(s);
    cashflows.ledger_cash = ledger.cash;
    Ok(DealerRun {
        ledger,
        cashflows,
        liquidity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_fee_scenario(p: f64) -> DealerScenario {
        let rel = SpecialRepoRelations::from_special_rate(1_000_000.0, 0.0002, 0.02, 0.00005).unwrap();
        DealerScenario::at_max_fee(&rel, 1000, p).unwrap()
    }

    #[test]
    fn max_fee_scenario_is_flat_and_binding() {
        let s = max_fee_scenario(1000.0);
        let run = run_dealer_scenario(&s, LiquidityMode::Strict).unwrap();
        assert!(run.ledger.is_flat());
        assert_eq!(run.ledger.step_log.len(), 9);
        let tol = 1e-9 * s.spot_value();
        assert_eq!(run.cashflows.short_sale, 0.0);
        assert!((run.cashflows.net - run.cashflows.interest_carry).abs() <= tol);
        assert!(run.cashflows.interest_carry >= -tol);
        assert!((run.cashflows.ledger_cash - run.cashflows.net).abs() <= tol);
        for c in &run.liquidity {
            match c.condition {
                LiquidityCondition::AuctionFunding | LiquidityCondition::ClosingWithoutSpeculation => {
                    assert!(c.slack.abs() <= tol, "{:?}", c)
                }
                _ => assert!(c.satisfied),
            }
        }
    }

    #[test]
    fn special_structure_switched_off() {
        let s = DealerScenario {
            note_count: 50,
            note_spot: 98.5,
            intermediate_price: 98.5,
            special_rate: 0.0001,
            general_rate: 0.0001,
            special_haircut: 0.02,
            general_haircut: 0.02,
            fed_fee: 0.0,
        };
        let run = run_dealer_scenario(&s, LiquidityMode::Strict).unwrap();
        let want = s.general_rate * (s.general_lend() - s.client_cash());
        assert!((run.cashflows.net - want).abs() < 1e-12);
        assert!(run.cashflows.ledger_cash.abs() < 1e-9 * s.spot_value());
    }

    #[test]
    fn auction_funding_breach_fails_at_step_three() {
        let mut s = max_fee_scenario(1000.0);
        s.fed_fee = s.client_cash() - s.general_lend() + 1.0;
        for mode in [LiquidityMode::Strict, LiquidityMode::Relaxed] {
            match run_dealer_scenario(&s, mode) {
                Err(Error::Liquidity { step, condition, slack }) => {
                    assert_eq!(step, 3);
                    assert_eq!(condition, LiquidityCondition::AuctionFunding);
                    assert!(slack < 0.0);
                }
                other => panic!("expected liquidity error, got {other:?}"),
            }
        }
    }

    #[test]
    fn buy_back_above_sale_price() {
        let s = max_fee_scenario(1000.5);
        let checks = check_liquidity(&s, LiquidityMode::Strict).unwrap();
        let second = checks
            .iter()
            .find(|c| c.condition == LiquidityCondition::NoteRepurchase)
            .unwrap();
        assert!((second.slack - (-0.5 * 1000.0)).abs() < 1e-9);
        assert!(!second.satisfied);
        let err = run_dealer_scenario(&s, LiquidityMode::Strict).unwrap_err();
        assert!(matches!(err, Error::Liquidity { step: 5, .. }));
        // with the relaxed rule the loss is absorbed only if the close is still funded
        let err = run_dealer_scenario(&s, LiquidityMode::Relaxed).unwrap_err();
        assert!(matches!(
            err,
            Error::Liquidity { step: 5, condition: LiquidityCondition::RepurchaseFunding, .. }
                | Error::Liquidity { step: 7, .. }
        ));
    }

    #[test]
    fn relaxed_mode_counts_short_sale_gain() {
        let rel = SpecialRepoRelations::from_special_rate(1_000_000.0, 0.0002, 0.02, 0.00005).unwrap();
        let mut s = DealerScenario::at_max_fee(&rel, 1000, 990.0).unwrap();
        s.fed_fee *= 1.0 - 1e-3;
        s.special_rate += 1e-5;
        assert!(run_dealer_scenario(&s, LiquidityMode::Strict).is_err());
        let run = run_dealer_scenario(&s, LiquidityMode::Relaxed).unwrap();
        assert!((run.cashflows.short_sale - 10.0 * 1000.0).abs() < 1e-6);
        assert!(run.cashflows.net > 0.0);
    }

    #[test]
    fn zero_fee_zero_special_rate_slack() {
        let s = DealerScenario {
            note_count: 10,
            note_spot: 100.0,
            intermediate_price: 100.0,
            special_rate: 0.0,
            general_rate: 0.0003,
            special_haircut: 0.01,
            general_haircut: 0.02,
            fed_fee: 0.0,
        };
        let checks = check_liquidity(&s, LiquidityMode::Strict).unwrap();
        let eq = checks
            .iter()
            .find(|c| c.condition == LiquidityCondition::ClosingWithoutSpeculation)
            .unwrap();
        assert!((eq.slack - s.general_lend() * 0.0003).abs() < 1e-15);
        assert!(eq.satisfied);
    }

    #[test]
    fn log_conservation_and_replay() {
        let s = max_fee_scenario(995.0);
        let run = run_dealer_scenario(&s, LiquidityMode::Strict).unwrap();
        let mut cash = 0.0;
        for e in &run.ledger.step_log {
            cash += e.cash_delta;
        }
        assert_eq!(cash, run.ledger.cash);
        let json = serde_json::to_string(&run.ledger.step_log).unwrap();
        let entries: Vec<LedgerEntry> = serde_json::from_str(&json).unwrap();
        let replayed = LedgerState::replay(&entries).unwrap();
        assert_eq!(replayed, run.ledger);

        let mut tampered = entries.clone();
        tampered[4].cash += 1.0;
        assert!(LedgerState::replay(&tampered).is_err());
    }

    #[test]
    fn rejects_invalid_scenarios() {
        let mut s = max_fee_scenario(1000.0);
        s.note_count = 0;
        assert!(run_dealer_scenario(&s, LiquidityMode::Strict).is_err());
        let mut s = max_fee_scenario(1000.0);
        s.fed_fee = -1.0;
        assert!(check_liquidity(&s, LiquidityMode::Strict).is_err());
    }
}

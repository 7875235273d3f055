use std::ffi::c_char;

use repo_options::{DealerRun, DealerScenario, LedgerEntry, LedgerState, LiquidityMode};

use crate::{c_str, guard, input, out, relations, to_c_string, Failure, RoRelations, RoStatus};

/// Dealer scenario terms. Rates per period, amounts in currency.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RoDealerScenario {
    pub note_count: u64,
    pub note_spot: f64,
    pub intermediate_price: f64,
    pub special_rate: f64,
    pub general_rate: f64,
    pub special_haircut: f64,
    pub general_haircut: f64,
    pub fed_fee: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RoCashflows {
    pub interest_carry: f64,
    pub short_sale: f64,
    pub net: f64,
    pub ledger_cash: f64,
}

/// One booked step with the running balances after it.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RoLedgerStep {
    pub step: u8,
    pub cash_delta: f64,
    pub note_delta: i64,
    pub collateral_delta: f64,
    pub cash: f64,
    pub notes: i64,
    pub collateral: f64,
}

/// Opaque completed dealer run.
pub struct RoLedger(DealerRun);

/// Scenario paying the maximum affordable fee, with the spot price split
/// into `note_count` notes.
#[no_mangle]
pub extern "C" fn ro_dealer_at_max_fee(
    rel: *const RoRelations,
    note_count: u64,
    intermediate_price: f64,
    scenario: *mut RoDealerScenario,
) -> RoStatus {
    guard(|| {
        let out = out(scenario, "scenario")?;
        let s = DealerScenario::at_max_fee(&relations(rel)?, note_count, intermediate_price)?;
        *out = RoDealerScenario {
            note_count: s.note_count,
            note_spot: s.note_spot,
            intermediate_price: s.intermediate_price,
            special_rate: s.special_rate,
            general_rate: s.general_rate,
            special_haircut: s.special_haircut,
            general_haircut: s.general_haircut,
            fed_fee: s.fed_fee,
        };
        Ok(())
    })
}

/// Runs the nine dealer steps. Fails with `RO_STATUS_LIQUIDITY` at the first
/// breached condition; strict mode also forbids speculative closing.
#[no_mangle]
pub extern "C" fn ro_dealer_run(scenario: *const RoDealerScenario, strict: bool, ledger: *mut *mut RoLedger) -> RoStatus {
    guard(|| {
        let slot = out(ledger, "ledger")?;
        let s = input(scenario, "scenario")?;
        let mode = if strict { LiquidityMode::Strict } else { LiquidityMode::Relaxed };
        let run = repo_options::run_dealer_scenario(&DealerScenario::from(*s), mode)?;
        *slot = Box::into_raw(Box::new(RoLedger(run)));
        Ok(())
    })
}

/// # Safety
/// `ledger` must come from [`ro_dealer_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ro_ledger_free(ledger: *mut RoLedger) {
    if !ledger.is_null() {
        drop(Box::from_raw(ledger));
    }
}

#[no_mangle]
pub extern "C" fn ro_ledger_cashflows(ledger: *const RoLedger, result: *mut RoCashflows) -> RoStatus {
    guard(|| {
        let out = out(result, "result")?;
        let c = input(ledger, "ledger")?.0.cashflows;
        *out = RoCashflows {
            interest_carry: c.interest_carry,
            short_sale: c.short_sale,
            net: c.net,
            ledger_cash: c.ledger_cash,
        };
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ro_ledger_step_count(ledger: *const RoLedger, count: *mut usize) -> RoStatus {
    guard(|| {
        *out(count, "count")? = input(ledger, "ledger")?.0.ledger.step_log.len();
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ro_ledger_step(ledger: *const RoLedger, index: usize, step: *mut RoLedgerStep) -> RoStatus {
    guard(|| {
        let out = out(step, "step")?;
        let log = &input(ledger, "ledger")?.0.ledger.step_log;
        let e = log
            .get(index)
            .ok_or_else(|| Failure::new(RoStatus::Validation, format!("step index {index} out of range")))?;
        *out = step_to_c(e);
        Ok(())
    })
}

/// Step log as a JSON array. Free the string with `ro_string_free`.
#[no_mangle]
pub extern "C" fn ro_ledger_to_json(ledger: *const RoLedger, json: *mut *mut c_char) -> RoStatus {
    guard(|| {
        let slot = out(json, "json")?;
        let text = serde_json::to_string(&input(ledger, "ledger")?.0.ledger.step_log)
            .map_err(|e| Failure::new(RoStatus::Parse, e.to_string()))?;
        *slot = to_c_string(text)?;
        Ok(())
    })
}

/// Replays a JSON step log and writes its last step. Fails with
/// `RO_STATUS_VALIDATION` if any recorded balance is not reproduced exactly.
#[no_mangle]
pub extern "C" fn ro_ledger_replay_json(json: *const c_char, last: *mut RoLedgerStep) -> RoStatus {
    guard(|| {
        let out = out(last, "last")?;
        let entries: Vec<LedgerEntry> = serde_json::from_str(c_str(json, "json")?)
            .map_err(|e| Failure::new(RoStatus::Parse, e.to_string()))?;
        let state = LedgerState::replay(&entries)?;
        *out = state.step_log.last().map(step_to_c).unwrap_or_default();
        Ok(())
    })
}

impl From<RoDealerScenario> for DealerScenario {
    fn from(s: RoDealerScenario) -> Self {
        Self {
            note_count: s.note_count,
            note_spot: s.note_spot,
            intermediate_price: s.intermediate_price,
            special_rate: s.special_rate,
            general_rate: s.general_rate,
            special_haircut: s.special_haircut,
            general_haircut: s.general_haircut,
            fed_fee: s.fed_fee,
        }
    }
}

fn step_to_c(e: &LedgerEntry) -> RoLedgerStep {
    RoLedgerStep {
        step: e.step,
        cash_delta: e.cash_delta,
        note_delta: e.note_delta,
        collateral_delta: e.collateral_delta,
        cash: e.cash,
        notes: e.notes,
        collateral: e.collateral,
    }
}

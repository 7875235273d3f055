//! C ABI over `repo_options`.
//!
//! Every fallible function returns an [`RoStatus`] and writes its result
//! through an out-pointer. On failure the out-pointer is left untouched and
//! [`ro_last_error_message`] describes the error. Market inputs and dealer
//! runs are opaque handles released with their `_free` function; everything
//! else is plain data.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use repo_options::special::{self, SpecialRepoRelations};
use repo_options::stochastic::{self as st, GaussianParams};
use repo_options::{general, DayCount, Error, ErrorKind, MarketParams, PayoffMode, Regime};

mod ledger;
pub use ledger::*;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoStatus {
    Ok = 0,
    NullPointer = 1,
    Parse = 2,
    Validation = 3,
    /// A pricing identity failed its tolerance.
    Identity = 4,
    Liquidity = 5,
    Pricing = 6,
    Panic = 7,
}

/// Which censored moment of `X ~ N(mean, sd²)` to evaluate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoMoment {
    /// E[min(K, X)]
    MinMean,
    MinSd,
    /// E[max(K, X)]
    MaxMean,
    MaxSd,
    /// E[max(X - K, 0)]
    CallMean,
    /// E[max(K - X, 0)]
    PutMean,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoPayoffMode {
    Min,
    Max,
    PutPayoff,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoRegime {
    GuaranteedDelivery,
    Stressed,
    NoDemand,
    Normal,
}

/// Opaque market parameters.
pub struct RoMarket(MarketParams);

/// General repo quote. Rates ending in `_pa` are per annum.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RoGeneralQuote {
    pub repurchase_price: f64,
    pub lent_amount: f64,
    pub haircut: f64,
    pub haircut_rate: f64,
    pub repo_rate_pa: f64,
    pub lender_rate_pa: f64,
    pub revenue_mean: f64,
    /// Fraction of the spot price.
    pub revenue_sd_rel: f64,
    pub revenue_sd: f64,
    pub option_value_mean: f64,
    pub option_yield_period: f64,
    pub forward_mean: f64,
    pub identity_residual: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RoSpecialLenderQuote {
    pub premium: f64,
    pub premium_rate: f64,
    pub lent_amount: f64,
    pub repurchase_price: f64,
    pub special_rate_pa: f64,
    pub put_value_mean: f64,
    /// NaN when `has_trader_return` is false.
    pub trader_return_period: f64,
    pub has_trader_return: bool,
}

/// Dealer-fail relations; rates are per period.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RoRelations {
    pub spot: f64,
    pub general_rate: f64,
    pub special_rate: f64,
    pub general_haircut: f64,
    pub special_haircut: f64,
    pub fed_fee_rate: f64,
    pub max_fee: f64,
    pub general_lend: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RoMcEstimate {
    pub mean: f64,
    pub sd: f64,
    pub se_mean: f64,
    pub se_sd: f64,
    pub n_samples: u64,
    pub seed: u64,
}

pub(crate) struct Failure {
    status: RoStatus,
    message: String,
}

impl Failure {
    pub(crate) fn new(status: RoStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.kind() {
            ErrorKind::Validation => RoStatus::Validation,
            ErrorKind::Pricing => RoStatus::Pricing,
            ErrorKind::Liquidity => RoStatus::Liquidity,
        };
        Self::new(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, converting errors and panics into a status code.
pub(crate) fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RoStatus::Ok,
        Ok(Err(fail)) => {
            set_last_error(&fail.message);
            fail.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_owned());
            set_last_error(&format!("panic: {msg}"));
            RoStatus::Panic
        }
    }
}

pub(crate) fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: the caller passes either NULL or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or_else(|| Failure::new(RoStatus::NullPointer, format!("{name} is NULL")))
}

pub(crate) fn input<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller passes either NULL or a valid pointer.
    unsafe { p.as_ref() }.ok_or_else(|| Failure::new(RoStatus::NullPointer, format!("{name} is NULL")))
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ro_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ro_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ro_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn ro_std_normal_pdf(x: f64) -> f64 {
    st::std_normal_pdf(x)
}

#[no_mangle]
pub extern "C" fn ro_std_normal_cdf(x: f64) -> f64 {
    st::std_normal_cdf(x)
}

fn gaussian(mean: f64, sd: f64) -> Result<GaussianParams, Failure> {
    Ok(GaussianParams::new(mean, sd)?)
}

#[no_mangle]
pub extern "C" fn ro_censored_moment(moment: RoMoment, strike: f64, mean: f64, sd: f64, result: *mut f64) -> RoStatus {
    guard(|| {
        let out = out(result, "result")?;
        if !strike.is_finite() {
            return Err(Failure::new(RoStatus::Validation, "strike must be finite"));
        }
        let g = gaussian(mean, sd)?;
        *out = match moment {
            RoMoment::MinMean => st::censored_min_mean(strike, g),
            RoMoment::MinSd => st::censored_min_sd(strike, g),
            RoMoment::MaxMean => st::censored_max_mean(strike, g),
            RoMoment::MaxSd => st::censored_max_sd(strike, g),
            RoMoment::CallMean => st::call_payoff_mean(strike, g),
            RoMoment::PutMean => st::put_payoff_mean(strike, g),
        };
        Ok(())
    })
}

fn bs(call: bool, spot: f64, strike: f64, rate: f64, vol: f64, tenor: f64, result: *mut f64) -> RoStatus {
    guard(|| {
        let out = out(result, "result")?;
        let inputs = repo_options::BsInputs {
            spot,
            strike,
            rate,
            vol,
            tenor,
        };
        *out = if call {
            repo_options::bs_call(&inputs)?
        } else {
            repo_options::bs_put(&inputs)?
        };
        Ok(())
    })
}

/// Black-Scholes call; `tenor` in years.
#[no_mangle]
pub extern "C" fn ro_bs_call(spot: f64, strike: f64, rate: f64, vol: f64, tenor: f64, result: *mut f64) -> RoStatus {
    bs(true, spot, strike, rate, vol, tenor, result)
}

#[no_mangle]
pub extern "C" fn ro_bs_put(spot: f64, strike: f64, rate: f64, vol: f64, tenor: f64, result: *mut f64) -> RoStatus {
    bs(false, spot, strike, rate, vol, tenor, result)
}

/// Creates market parameters. Rates are per annum; `day_count` is 360 or 365.
#[no_mangle]
pub extern "C" fn ro_market_new(
    spot_price: f64,
    intrinsic_yield: f64,
    volatility: f64,
    tenor_days: u32,
    risk_free_rate: f64,
    day_count: u32,
    market: *mut *mut RoMarket,
) -> RoStatus {
    guard(|| {
        let slot = out(market, "market")?;
        let day_count = DayCount::try_from(day_count).map_err(|e| Failure::new(RoStatus::Validation, e))?;
        let m = MarketParams {
            spot_price,
            intrinsic_yield,
            volatility,
            tenor_days,
            risk_free_rate,
            day_count,
        };
        m.validate()?;
        *slot = Box::into_raw(Box::new(RoMarket(m)));
        Ok(())
    })
}

/// # Safety
/// `market` must come from [`ro_market_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ro_market_free(market: *mut RoMarket) {
    if !market.is_null() {
        drop(Box::from_raw(market));
    }
}

fn market<'a>(m: *const RoMarket) -> Result<&'a MarketParams, Failure> {
    input(m, "market").map(|m| &m.0)
}

/// Mean and standard deviation of the forward price.
#[no_mangle]
pub extern "C" fn ro_market_forward(m: *const RoMarket, mean: *mut f64, sd: *mut f64) -> RoStatus {
    guard(|| {
        let g = repo_options::forward_gaussian(market(m)?)?;
        *out(mean, "mean")? = g.mean;
        *out(sd, "sd")? = g.sd;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ro_strike_from_sigma_multiple(m: *const RoMarket, k: f64, result: *mut f64) -> RoStatus {
    guard(|| {
        let out = out(result, "result")?;
        *out = repo_options::strike_from_sigma_multiple(market(m)?, k)?;
        Ok(())
    })
}

/// Prices a general repo. Returns `RO_STATUS_IDENTITY` if the haircut/rate
/// identity residual exceeds 1e-9; the quote is still written in that case.
#[no_mangle]
pub extern "C" fn ro_price_general(m: *const RoMarket, repurchase_price: f64, quote: *mut RoGeneralQuote) -> RoStatus {
    guard(|| {
        let out = out(quote, "quote")?;
        let m = market(m)?;
        let q = general::price_general_repo(m, repurchase_price)?;
        let residual = general::identity_residual(&q, m);
        *out = RoGeneralQuote {
            repurchase_price: q.repurchase_price,
            lent_amount: q.lent_amount,
            haircut: q.haircut,
            haircut_rate: q.haircut_rate,
            repo_rate_pa: q.repo_rate_pa,
            lender_rate_pa: q.lender_rate_pa,
            revenue_mean: q.revenue_mean,
            revenue_sd_rel: q.revenue_sd_rel,
            revenue_sd: q.revenue_sd,
            option_value_mean: q.option_value_mean,
            option_yield_period: q.option_yield_period,
            forward_mean: q.forward_mean,
            identity_residual: residual,
        };
        if residual.abs() > 1e-9 {
            return Err(Failure::new(
                RoStatus::Identity,
                format!("haircut/rate identity residual {residual:e}"),
            ));
        }
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ro_bs_haircut(m: *const RoMarket, repurchase_price: f64, result: *mut f64) -> RoStatus {
    guard(|| {
        let out = out(result, "result")?;
        *out = general::bs_haircut(market(m)?, repurchase_price)?;
        Ok(())
    })
}

/// Lender rate per annum implied by the Black-Scholes haircut.
#[no_mangle]
pub extern "C" fn ro_lender_rate_from_bs(m: *const RoMarket, repurchase_price: f64, result: *mut f64) -> RoStatus {
    guard(|| {
        let out = out(result, "result")?;
        *out = general::lender_rate_from_bs(market(m)?, repurchase_price)?;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ro_price_lender_fail(
    m: *const RoMarket,
    repurchase_price: f64,
    quote: *mut RoSpecialLenderQuote,
) -> RoStatus {
    guard(|| {
        let out = out(quote, "quote")?;
        let q = special::price_lender_fail(market(m)?, repurchase_price)?;
        *out = RoSpecialLenderQuote {
            premium: q.premium,
            premium_rate: q.premium_rate,
            lent_amount: q.lent_amount,
            repurchase_price: q.repurchase_price,
            special_rate_pa: q.special_rate_pa,
            put_value_mean: q.put_value_mean,
            trader_return_period: q.trader_return_period.unwrap_or(f64::NAN),
            has_trader_return: q.trader_return_period.is_some(),
        };
        Ok(())
    })
}

impl From<SpecialRepoRelations> for RoRelations {
    fn from(r: SpecialRepoRelations) -> Self {
        Self {
            spot: r.spot,
            general_rate: r.general_rate,
            special_rate: r.special_rate,
            general_haircut: r.general_haircut,
            special_haircut: r.special_haircut,
            fed_fee_rate: r.fed_fee_rate,
            max_fee: r.max_fee,
            general_lend: r.general_lend,
        }
    }
}

/// Rebuilds the relations from their defining terms and checks consistency.
pub(crate) fn relations(r: *const RoRelations) -> Result<SpecialRepoRelations, Failure> {
    let r = input(r, "relations")?;
    Ok(SpecialRepoRelations::from_both(
        r.spot,
        r.general_rate,
        r.general_haircut,
        r.special_rate,
        r.special_haircut,
    )?)
}

/// Relations implied by a special rate. All rates per period.
#[no_mangle]
pub extern "C" fn ro_relations_from_special_rate(
    spot: f64,
    general_rate: f64,
    general_haircut: f64,
    special_rate: f64,
    result: *mut RoRelations,
) -> RoStatus {
    guard(|| {
        let out = out(result, "result")?;
        *out = SpecialRepoRelations::from_special_rate(spot, general_rate, general_haircut, special_rate)?.into();
        Ok(())
    })
}

/// Relations implied by a special haircut. All rates per period.
#[no_mangle]
pub extern "C" fn ro_relations_from_special_haircut(
    spot: f64,
    general_rate: f64,
    general_haircut: f64,
    special_haircut: f64,
    result: *mut RoRelations,
) -> RoStatus {
    guard(|| {
        let out = out(result, "result")?;
        *out = SpecialRepoRelations::from_special_haircut(spot, general_rate, general_haircut, special_haircut)?.into();
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ro_classify_regime(rel: *const RoRelations, regime: *mut RoRegime) -> RoStatus {
    guard(|| {
        let out = out(regime, "regime")?;
        *out = match special::classify_regime(&relations(rel)?)? {
            Regime::GuaranteedDelivery => RoRegime::GuaranteedDelivery,
            Regime::Stressed => RoRegime::Stressed,
            Regime::NoDemand => RoRegime::NoDemand,
            Regime::Normal => RoRegime::Normal,
        };
        Ok(())
    })
}

/// Seeded Monte Carlo statistics of a censored payoff. Identical inputs give
/// bit-identical results on any thread count.
#[no_mangle]
pub extern "C" fn ro_mc_sample_stats(
    strike: f64,
    mean: f64,
    sd: f64,
    n: u64,
    seed: u64,
    mode: RoPayoffMode,
    result: *mut RoMcEstimate,
) -> RoStatus {
    guard(|| {
        let out = out(result, "result")?;
        let mode = match mode {
            RoPayoffMode::Min => PayoffMode::Min,
            RoPayoffMode::Max => PayoffMode::Max,
            RoPayoffMode::PutPayoff => PayoffMode::PutPayoff,
        };
        let e = st::mc_sample_stats(strike, gaussian(mean, sd)?, n, seed, mode)?;
        *out = RoMcEstimate {
            mean: e.mean,
            sd: e.sd,
            se_mean: e.se_mean,
            se_sd: e.se_sd,
            n_samples: e.n_samples,
            seed: e.seed,
        };
        Ok(())
    })
}

pub(crate) fn c_str<'a>(s: *const c_char, name: &str) -> Result<&'a str, Failure> {
    let s = input(s, name)?;
    // SAFETY: non-null and NUL-terminated per the caller's contract.
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|e| Failure::new(RoStatus::Parse, format!("{name} is not UTF-8: {e}")))
}

pub(crate) fn to_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| Failure::new(RoStatus::Parse, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_a_status() {
        assert_eq!(guard(|| panic!("boom")), RoStatus::Panic);
        let msg = unsafe { CStr::from_ptr(ro_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "panic: boom");
    }

    #[test]
    fn core_error_kinds_map_to_statuses() {
        assert_eq!(Failure::from(Error::ZeroVolatility).status, RoStatus::Validation);
        assert_eq!(
            Failure::from(Error::NonPositiveHaircut { haircut: -1.0 }).status,
            RoStatus::Pricing
        );
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = unsafe { CStr::from_ptr(ro_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}

#ifndef REPO_OPTIONS_H
#define REPO_OPTIONS_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RoStatus {
  RO_STATUS_OK = 0,
  RO_STATUS_NULL_POINTER = 1,
  RO_STATUS_PARSE = 2,
  RO_STATUS_VALIDATION = 3,
  /**
   * A pricing identity failed its tolerance.
   */
  RO_STATUS_IDENTITY = 4,
  RO_STATUS_LIQUIDITY = 5,
  RO_STATUS_PRICING = 6,
  RO_STATUS_PANIC = 7,
} RoStatus;

/**
 * Which censored moment of `X ~ N(mean, sd²)` to evaluate.
 */
typedef enum RoMoment {
  /**
   * E[min(K, X)]
   */
  RO_MOMENT_MIN_MEAN,
  RO_MOMENT_MIN_SD,
  /**
   * E[max(K, X)]
   */
  RO_MOMENT_MAX_MEAN,
  RO_MOMENT_MAX_SD,
  /**
   * E[max(X - K, 0)]
   */
  RO_MOMENT_CALL_MEAN,
  /**
   * E[max(K - X, 0)]
   */
  RO_MOMENT_PUT_MEAN,
} RoMoment;

typedef enum RoRegime {
  RO_REGIME_GUARANTEED_DELIVERY,
  RO_REGIME_STRESSED,
  RO_REGIME_NO_DEMAND,
  RO_REGIME_NORMAL,
} RoRegime;

typedef enum RoPayoffMode {
  RO_PAYOFF_MODE_MIN,
  RO_PAYOFF_MODE_MAX,
  RO_PAYOFF_MODE_PUT_PAYOFF,
} RoPayoffMode;

/**
 * Opaque completed dealer run.
 */
typedef struct RoLedger RoLedger;

/**
 * Opaque market parameters.
 */
typedef struct RoMarket RoMarket;

/**
 * General repo quote. Rates ending in `_pa` are per annum.
 */
typedef struct RoGeneralQuote {
  double repurchase_price;
  double lent_amount;
  double haircut;
  double haircut_rate;
  double repo_rate_pa;
  double lender_rate_pa;
  double revenue_mean;
  /**
   * Fraction of the spot price.
   */
  double revenue_sd_rel;
  double revenue_sd;
  double option_value_mean;
  double option_yield_period;
  double forward_mean;
  double identity_residual;
} RoGeneralQuote;

typedef struct RoSpecialLenderQuote {
  double premium;
  double premium_rate;
  double lent_amount;
  double repurchase_price;
  double special_rate_pa;
  double put_value_mean;
  /**
   * NaN when `has_trader_return` is false.
   */
  double trader_return_period;
  bool has_trader_return;
} RoSpecialLenderQuote;

/**
 * Dealer-fail relations; rates are per period.
 */
typedef struct RoRelations {
  double spot;
  double general_rate;
  double special_rate;
  double general_haircut;
  double special_haircut;
  double fed_fee_rate;
  double max_fee;
  double general_lend;
} RoRelations;

typedef struct RoMcEstimate {
  double mean;
  double sd;
  double se_mean;
  double se_sd;
  uint64_t n_samples;
  uint64_t seed;
} RoMcEstimate;

/**
 * Dealer scenario terms. Rates per period, amounts in currency.
 */
typedef struct RoDealerScenario {
  uint64_t note_count;
  double note_spot;
  double intermediate_price;
  double special_rate;
  double general_rate;
  double special_haircut;
  double general_haircut;
  double fed_fee;
} RoDealerScenario;

typedef struct RoCashflows {
  double interest_carry;
  double short_sale;
  double net;
  double ledger_cash;
} RoCashflows;

/**
 * One booked step with the running balances after it.
 */
typedef struct RoLedgerStep {
  uint8_t step;
  double cash_delta;
  int64_t note_delta;
  double collateral_delta;
  double cash;
  int64_t notes;
  double collateral;
} RoLedgerStep;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ro_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ro_version(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void ro_string_free(char *s);

double ro_std_normal_pdf(double x);

double ro_std_normal_cdf(double x);

enum RoStatus ro_censored_moment(enum RoMoment moment,
                                 double strike,
                                 double mean,
                                 double sd,
                                 double *result);

/**
 * Black-Scholes call; `tenor` in years.
 */
enum RoStatus ro_bs_call(double spot,
                         double strike,
                         double rate,
                         double vol,
                         double tenor,
                         double *result);

enum RoStatus ro_bs_put(double spot,
                        double strike,
                        double rate,
                        double vol,
                        double tenor,
                        double *result);

/**
 * Creates market parameters. Rates are per annum; `day_count` is 360 or 365.
 */
enum RoStatus ro_market_new(double spot_price,
                            double intrinsic_yield,
                            double volatility,
                            uint32_t tenor_days,
                            double risk_free_rate,
                            uint32_t day_count,
                            struct RoMarket **market);

/**
 * # Safety
 * `market` must come from [`ro_market_new`] and not be used afterwards.
 */
void ro_market_free(struct RoMarket *market);

/**
 * Mean and standard deviation of the forward price.
 */
enum RoStatus ro_market_forward(const struct RoMarket *m, double *mean, double *sd);

enum RoStatus ro_strike_from_sigma_multiple(const struct RoMarket *m, double k, double *result);

/**
 * Prices a general repo. Returns `RO_STATUS_IDENTITY` if the haircut/rate
 * identity residual exceeds 1e-9; the quote is still written in that case.
 */
enum RoStatus ro_price_general(const struct RoMarket *m,
                               double repurchase_price,
                               struct RoGeneralQuote *quote);

enum RoStatus ro_bs_haircut(const struct RoMarket *m, double repurchase_price, double *result);

/**
 * Lender rate per annum implied by the Black-Scholes haircut.
 */
enum RoStatus ro_lender_rate_from_bs(const struct RoMarket *m,
                                     double repurchase_price,
                                     double *result);

enum RoStatus ro_price_lender_fail(const struct RoMarket *m,
                                   double repurchase_price,
                                   struct RoSpecialLenderQuote *quote);

/**
 * Relations implied by a special rate. All rates per period.
 */
enum RoStatus ro_relations_from_special_rate(double spot,
                                             double general_rate,
                                             double general_haircut,
                                             double special_rate,
                                             struct RoRelations *result);

/**
 * Relations implied by a special haircut. All rates per period.
 */
enum RoStatus ro_relations_from_special_haircut(double spot,
                                                double general_rate,
                                                double general_haircut,
                                                double special_haircut,
                                                struct RoRelations *result);

enum RoStatus ro_classify_regime(const struct RoRelations *rel, enum RoRegime *regime);

/**
 * Seeded Monte Carlo statistics of a censored payoff. Identical inputs give
 * bit-identical results on any thread count.
 */
enum RoStatus ro_mc_sample_stats(double strike,
                                 double mean,
                                 double sd,
                                 uint64_t n,
                                 uint64_t seed,
                                 enum RoPayoffMode mode,
                                 struct RoMcEstimate *result);

/**
 * Scenario paying the maximum affordable fee, with the spot price split
 * into `note_count` notes.
 */
enum RoStatus ro_dealer_at_max_fee(const struct RoRelations *rel,
                                   uint64_t note_count,
                                   double intermediate_price,
                                   struct RoDealerScenario *scenario);

/**
 * Runs the nine dealer steps. Fails with `RO_STATUS_LIQUIDITY` at the first
 * breached condition; strict mode also forbids speculative closing.
 */
enum RoStatus ro_dealer_run(const struct RoDealerScenario *scenario,
                            bool strict,
                            struct RoLedger **ledger);

/**
 * # Safety
 * `ledger` must come from [`ro_dealer_run`] and not be used afterwards.
 */
void ro_ledger_free(struct RoLedger *ledger);

enum RoStatus ro_ledger_cashflows(const struct RoLedger *ledger, struct RoCashflows *result);

enum RoStatus ro_ledger_step_count(const struct RoLedger *ledger, size_t *count);

enum RoStatus ro_ledger_step(const struct RoLedger *ledger,
                             size_t index,
                             struct RoLedgerStep *step);

/**
 * Step log as a JSON array. Free the string with `ro_string_free`.
 */
enum RoStatus ro_ledger_to_json(const struct RoLedger *ledger, char **json);

/**
 * Replays a JSON step log and writes its last step. Fails with
 * `RO_STATUS_VALIDATION` if any recorded balance is not reproduced exactly.
 */
enum RoStatus ro_ledger_replay_json(const char *json, struct RoLedgerStep *last);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REPO_OPTIONS_H */

#ifndef COOPEQ_H
#define COOPEQ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CoopeqStatus {
  COOPEQ_STATUS_OK = 0,
  COOPEQ_STATUS_NULL_POINTER = 1,
  COOPEQ_STATUS_PARAMETER_OUT_OF_RANGE = 2,
  COOPEQ_STATUS_UNSUPPORTED = 3,
  COOPEQ_STATUS_INVALID_INPUT = 4,
  COOPEQ_STATUS_PANIC = 5,
} CoopeqStatus;

typedef enum CoopeqStructure {
  COOPEQ_STRUCTURE_SELFISH = 0,
  COOPEQ_STRUCTURE_FULLY_COOPERATIVE = 1,
} CoopeqStructure;

/**
 * Opaque game handle.
 */
typedef struct CoopeqGame CoopeqGame;

typedef struct CoopeqForecast {
  enum CoopeqStructure structure;
  double reference_action;
  double incentive;
  double disincentive;
  double tau_pair;
  double tau_nobody;
  double e_nobody;
  double e_deviation;
  double forecast;
} CoopeqForecast;

typedef struct CoopeqPrediction {
  enum CoopeqStructure winning_structure;
  /**
   * Contribution fraction, cooperation probability or price.
   */
  double equilibrium;
  double equilibrium_payoff;
  struct CoopeqForecast selfish;
  struct CoopeqForecast cooperative;
} CoopeqPrediction;

typedef struct CoopeqRankSum {
  double u;
  double u_other;
  double p_value;
  /**
   * True when the p-value comes from exact enumeration.
   */
  bool exact;
} CoopeqRankSum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a linear public goods game with marginal return `gamma`.
 *
 * # Safety
 * `out` must be null or valid for a pointer write.
 */
enum CoopeqStatus coopeq_game_pgg(size_t n,
                                  double gamma,
                                  double endowment,
                                  struct CoopeqGame **out);

/**
 * Creates an N-person prisoner's dilemma with benefit `b` and cost `c`.
 *
 * # Safety
 * `out` must be null or valid for a pointer write.
 */
enum CoopeqStatus coopeq_game_npd(size_t n, double b, double c, struct CoopeqGame **out);

/**
 * Creates a Bertrand competition with prices in `[low, high]`.
 *
 * # Safety
 * `out` must be null or valid for a pointer write.
 */
enum CoopeqStatus coopeq_game_bertrand(size_t n, double low, double high, struct CoopeqGame **out);

/**
 * Creates a public goods game whose total benefit is `b_n`.
 *
 * # Safety
 * `out` must be null or valid for a pointer write.
 */
enum CoopeqStatus coopeq_game_general_pgg(size_t n, double b_n, struct CoopeqGame **out);

/**
 * Releases a game. Null is ignored.
 *
 * # Safety
 * `game` must be null or a handle from a `coopeq_game_*` constructor that
 * has not been freed.
 */
void coopeq_game_free(struct CoopeqGame *game);

/**
 * # Safety
 * `game` must be a live handle; `out` must be valid for a write.
 */
enum CoopeqStatus coopeq_game_players(const struct CoopeqGame *game, size_t *out);

/**
 * Payoffs of every player for a full action profile of length N.
 *
 * # Safety
 * `profile` and `out` must each hold `len` doubles.
 */
enum CoopeqStatus coopeq_payoffs(const struct CoopeqGame *game,
                                 const double *profile,
                                 size_t len,
                                 double *out);

/**
 * Cooperative equilibrium of a game.
 *
 * # Safety
 * `game` must be a live handle; `out` must be valid for a write.
 */
enum CoopeqStatus coopeq_solve(const struct CoopeqGame *game, struct CoopeqPrediction *out);

/**
 * Forecast associated with one coalition structure.
 *
 * # Safety
 * `game` must be a live handle; `out` must be valid for a write.
 */
enum CoopeqStatus coopeq_forecast(const struct CoopeqGame *game,
                                  enum CoopeqStructure structure,
                                  struct CoopeqForecast *out);

/**
 * Expected payoff when every player independently uses `action`.
 *
 * # Safety
 * `game` must be a live handle; `out` must be valid for a write.
 */
enum CoopeqStatus coopeq_expected_symmetric_payoff(const struct CoopeqGame *game,
                                                   double action,
                                                   double *out);

/**
 * Cooperative forecast of the public goods game, per unit of endowment.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum CoopeqStatus coopeq_v_pgg(double gamma, size_t n, double *out);

/**
 * Cooperative forecast of the prisoner's dilemma.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum CoopeqStatus coopeq_v_npd(double b, double c, size_t n, double *out);

/**
 * Fehr-Schmidt utility of player `focal`.
 *
 * # Safety
 * `payoffs` must hold `len` doubles; `out` must be valid for a write.
 */
enum CoopeqStatus coopeq_fs_utility(double alpha,
                                    double beta,
                                    const double *payoffs,
                                    size_t len,
                                    size_t focal,
                                    double *out);

/**
 * Charness-Rabin utility of player `focal`. A NaN `delta` selects the
 * one-parameter form.
 *
 * # Safety
 * `payoffs` must hold `len` doubles; `out` must be valid for a write.
 */
enum CoopeqStatus coopeq_cr_utility(double alpha,
                                    double delta,
                                    const double *payoffs,
                                    size_t len,
                                    size_t focal,
                                    double *out);

/**
 * Two-sided Mann-Whitney rank-sum test.
 *
 * # Safety
 * `a` must hold `a_len` doubles, `b` must hold `b_len` doubles and `out`
 * must be valid for a write.
 */
enum CoopeqStatus coopeq_rank_sum(const double *a,
                                  size_t a_len,
                                  const double *b,
                                  size_t b_len,
                                  struct CoopeqRankSum *out);

/**
 * Static description of a status code.
 */
const char *coopeq_status_message(enum CoopeqStatus status);

/**
 * Message for the most recent failure on this thread, or "" after a
 * success. Valid until the next coopeq call on the same thread.
 */
const char *coopeq_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COOPEQ_H */

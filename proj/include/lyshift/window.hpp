#pragma once

// Window-product analysis: restricted operator norms, divergence certificates,
// prefix-decay certificates. log||B_w^n|| restricted to end indices in
// [k_lo, k_hi] equals the max over admissible k of sum_{j=k-n+1..k} log|w_j|.
//
// Scans run either serially or on the OpenMP kernel; both produce bitwise
// identical results (each window sum is the same prefix difference, and ties
// break to the smallest end index either way).

#include <optional>

#include "lyshift/weights.hpp"

namespace lyshift {

enum class Exec { Serial, Parallel };

struct WindowResult {
  index_t k_star;  // maximizing end index, ties to the smallest
  double value;    // the window log-product
};

struct DivergenceCert {
  index_t k;  // window end index: factors j in [k-n+1, k]
  index_t n;  // window length
  double log_product;
  double threshold_used;
};

struct DecayEntry {
  index_t n_m;         // prefix length: factors j in [-n_m+1, 0]
  double log_product;  // <= -theta * m
};

struct DecayCert {
  double theta;
  std::vector<DecayEntry> entries;  // strictly increasing n_m, one per level m = 1..
};

struct DivergenceScan {
  std::optional<DivergenceCert> cert;  // first hit in (n asc, k asc) order
  // max window log-product seen over the whole scan (reported when no cert)
  double max_log_product = kNegInf;
  index_t max_n = 0;
  index_t max_k = 0;
};

struct DecayScan {
  std::optional<DecayCert> cert;
  int levels_reached = 0;  // levels satisfied before the horizon ran out
  double min_prefix = 0.0;
  index_t min_prefix_n = 0;
};

// Max window log-product of length n over end indices in [k_lo, k_hi] — the
// columns of the truncated matrix of B^n on the range. Factors reach below
// k_lo when the weight domain allows; unilateral ends k <= n are annihilated
// columns and carry no norm. Throws EmptyRange when no column survives.
WindowResult max_window_log_product(const WeightSeq& w, index_t n, index_t k_lo, index_t k_hi,
                                    Exec exec = Exec::Parallel);

inline double op_log_norm(const WeightSeq& w, index_t n, index_t k_lo, index_t k_hi,
                          Exec exec = Exec::Parallel) {
  return max_window_log_product(w, n, k_lo, k_hi, exec).value;
}

// Exact global operator log-norm: evaluates a canonical range guaranteed to
// contain a maximizing window for explicit / periodic / piecewise specs.
double op_log_norm_global(const WeightSeq& w, index_t n, Exec exec = Exec::Parallel);

// First window with log-product >= theta, scanning n = 1..horizon ascending
// and end index ascending. Throws EmptyRange when not even n = 1 fits.
DivergenceScan detect_divergence(const WeightSeq& w, index_t horizon, index_t k_lo, index_t k_hi,
                                 double theta, Exec exec = Exec::Parallel);

// Greedy smallest prefix lengths n_1 < n_2 < ... with prefix log-product over
// [-n_m+1, 0] <= -theta * m, up to m_max levels. Bilateral only.
DecayScan detect_prefix_decay(const WeightSeq& w, index_t horizon, double theta, int m_max);

// Replay helpers: recompute the certified quantities from the weights alone.
bool replay_divergence(const WeightSeq& w, const DivergenceCert& cert, double tol = 1e-12);
bool replay_decay(const WeightSeq& w, const DecayCert& cert, double tol = 1e-12);

}  // namespace lyshift

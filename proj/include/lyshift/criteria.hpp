#pragma once

// Finite-horizon chaos deciders. A verdict is always horizon-relative:
// Established means a replayable certificate was found; NotObservedWithinHorizon
// never claims the property fails, only that the scan ran out of horizon.
//
// Unilateral: one divergence window certifies the whole equivalence chain
// (dense uniform Li-Yorke chaos, Li-Yorke chaos, sensitivity).
// Bilateral: needs both a prefix-decay certificate and a divergence window.

#include <optional>
#include <string>
#include <vector>

#include "lyshift/shiftops.hpp"
#include "lyshift/window.hpp"

namespace lyshift {

enum class Property { LiYorke, DenseUniformLiYorke, Sensitive, DenseNullOrbits };
enum class Status { Established, NotObservedWithinHorizon };

struct AnalysisParams {
  index_t horizon = 10000;
  double theta_div = 40.0;
  double theta_dec = 40.0;
  index_t k_lo = -10000;
  index_t k_hi = 10000;
  Norm norm = Norm::L1;
  int decay_levels = 8;       // prefix-decay certificate depth
  index_t support_bound = 5;  // basis band checked by the null-orbit verdict
  Exec exec = Exec::Parallel;
};

// one verified statement about a basis vector's orbit at a schedule time
struct NullOrbitCheck {
  index_t time;
  index_t basis_index;
  bool exact_zero;
  double log_value;  // -inf when exactly zero
  double log_bound;  // certified upper bound; -inf when exact
  bool ok;
};

struct ChaosVerdict {
  Property property;
  Status status;
  Side side;
  AnalysisParams params;

  std::optional<DivergenceCert> divergence;
  std::optional<DecayCert> decay;
  std::vector<std::string> failed_conjuncts;  // among "divergence", "prefix_decay"

  // scan context for NotObserved reports
  double max_window_log_product = kNegInf;
  index_t max_window_n = 0;
  index_t max_window_k = 0;
  int decay_levels_reached = 0;
  double min_prefix = 0.0;
  index_t min_prefix_n = 0;

  // null-orbit payload
  std::vector<index_t> null_times;
  std::vector<NullOrbitCheck> null_checks;
};

// throws WrongSide when the weights live on the other side
ChaosVerdict unilateral_verdict(const WeightSeq& w, const AnalysisParams& params);
ChaosVerdict bilateral_verdict(const WeightSeq& w, const AnalysisParams& params);

ChaosVerdict sensitivity_verdict(const WeightSeq& w, const AnalysisParams& params);
ChaosVerdict dense_null_orbit_verdict(const WeightSeq& w, const AnalysisParams& params);

// replays every certificate carried by the verdict against the weights
bool replay_certificates(const WeightSeq& w, const ChaosVerdict& v, double tol = 1e-12);

struct Analysis {
  ChaosVerdict chaos;        // side-appropriate main verdict
  ChaosVerdict sensitivity;
  ChaosVerdict null_orbits;
};

Analysis analyze_weights(const WeightSeq& w, const AnalysisParams& params);

}  // namespace lyshift

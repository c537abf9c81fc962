#include "lyshift/criteria.hpp"

#include <algorithm>
#include <cmath>

namespace lyshift {

namespace {

ChaosVerdict base_verdict(Property prop, const WeightSeq& w, const AnalysisParams& params) {
  ChaosVerdict v;
  v.property = prop;
  v.status = Status::NotObservedWithinHorizon;
  v.side = w.side();
  v.params = params;
  return v;
}

void run_divergence(const WeightSeq& w, const AnalysisParams& params, ChaosVerdict& v) {
  DivergenceScan scan =
      detect_divergence(w, params.horizon, params.k_lo, params.k_hi, params.theta_div, params.exec);
  if (scan.cert) {
    v.divergence = scan.cert;
  } else {
    v.failed_conjuncts.push_back("divergence");
    v.max_window_log_product = scan.max_log_product;
    v.max_window_n = scan.max_n;
    v.max_window_k = scan.max_k;
  }
}

void run_decay(const WeightSeq& w, const AnalysisParams& params, ChaosVerdict& v) {
  DecayScan scan = detect_prefix_decay(w, params.horizon, params.theta_dec, params.decay_levels);
  v.decay_levels_reached = scan.levels_reached;
  v.min_prefix = scan.min_prefix;
  v.min_prefix_n = scan.min_prefix_n;
  if (scan.cert) {
    v.decay = scan.cert;
  } else {
    v.failed_conjuncts.push_back("prefix_decay");
  }
}

}  // namespace

ChaosVerdict unilateral_verdict(const WeightSeq& w, const AnalysisParams& params) {
  if (w.side() != Side::Unilateral)
    throw WrongSide("unilateral_verdict requires unilateral weights");
  ChaosVerdict v = base_verdict(Property::DenseUniformLiYorke, w, params);
  run_divergence(w, params, v);
  if (v.divergence) v.status = Status::Established;
  return v;
}

ChaosVerdict bilateral_verdict(const WeightSeq& w, const AnalysisParams& params) {
  if (w.side() != Side::Bilateral) throw WrongSide("bilateral_verdict requires bilateral weights");
  ChaosVerdict v = base_verdict(Property::DenseUniformLiYorke, w, params);
  run_decay(w, params, v);
  run_divergence(w, params, v);
  std::sort(v.failed_conjuncts.begin(), v.failed_conjuncts.end());
  if (v.decay && v.divergence) v.status = Status::Established;
  return v;
}

ChaosVerdict sensitivity_verdict(const WeightSeq& w, const AnalysisParams& params) {
  ChaosVerdict v = base_verdict(Property::Sensitive, w, params);
  run_divergence(w, params, v);
  if (v.divergence) v.status = Status::Established;
  return v;
}

ChaosVerdict dense_null_orbit_verdict(const WeightSeq& w, const AnalysisParams& params) {
  ChaosVerdict v = base_verdict(Property::DenseNullOrbits, w, params);
  index_t s = std::max<index_t>(params.support_bound, 1);

  if (w.side() == Side::Unilateral) {
    // every finite-support vector is annihilated once the power passes its
    // support: the schedule p_n = n works unconditionally
    v.status = Status::Established;
    for (int n = 1; n <= params.decay_levels; ++n) v.null_times.push_back(n);
    for (index_t j = 1; j <= s; ++j) {
      SparseVector orbit = apply_power(w, SparseVector::basis(Side::Unilateral, j), j);
      bool zero = orbit.is_zero();
      v.null_checks.push_back(NullOrbitCheck{j, j, zero, kNegInf, kNegInf, zero});
      if (!zero) v.status = Status::NotObservedWithinHorizon;  // unreachable by construction
    }
    return v;
  }

  run_decay(w, params, v);
  if (!v.decay) return v;

  // schedule: decay times shifted by the band half-width; each basis orbit in
  // the band is bounded by s extra factors around the certified prefix
  double log_bound_extra = static_cast<double>(s) * std::log(w.bound());
  v.status = Status::Established;
  for (std::size_t m = 0; m < v.decay->entries.size(); ++m) {
    index_t t = v.decay->entries[m].n_m + s;
    v.null_times.push_back(t);
    double worst = kNegInf;
    index_t worst_j = -s;
    for (index_t j = -s; j <= s; ++j) {
      SparseVector orbit = apply_power(w, SparseVector::basis(Side::Bilateral, j), t);
      double ln = log_norm(orbit, params.norm);
      if (ln > worst) {
        worst = ln;
        worst_j = j;
      }
    }
    double bound = log_bound_extra + v.decay->entries[m].log_product;
    bool ok = worst <= bound + 1e-9;
    v.null_checks.push_back(NullOrbitCheck{t, worst_j, is_log_zero(worst), worst, bound, ok});
    if (!ok) v.status = Status::NotObservedWithinHorizon;
  }
  return v;
}

bool replay_certificates(const WeightSeq& w, const ChaosVerdict& v, double tol) {
  if (v.divergence && !replay_divergence(w, *v.divergence, tol)) return false;
  if (v.decay && !replay_decay(w, *v.decay, tol)) return false;
  return true;
}

Analysis analyze_weights(const WeightSeq& w, const AnalysisParams& params) {
  Analysis a{
      w.side() == Side::Unilateral ? unilateral_verdict(w, params) : bilateral_verdict(w, params),
      sensitivity_verdict(w, params),
      dense_null_orbit_verdict(w, params),
  };
  return a;
}

}  // namespace lyshift

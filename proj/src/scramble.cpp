#include "lyshift/scramble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lyshift/errors.hpp"
#include "lyshift/logscale.hpp"
#include "lyshift/shiftops.hpp"
#include "lyshift/window.hpp"

namespace lyshift {
namespace {

constexpr double kLn2 = 0.6931471805599453;

// Verifiers recompute orbits; a corrupt witness must not request an orbit so
// long that the window table allocation becomes the failure mode.
constexpr index_t kMaxWitnessTime = 1000000;

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf);
}

index_t abs_index(index_t v) { return v < 0 ? -v : v; }

index_t support_abs_bound(const SparseVector& v) {
  if (v.is_zero()) return 0;
  return std::max(abs_index(v.support_min()), abs_index(v.support_max()));
}

double linear_norm(const SparseVector& v, Norm p) { return std::exp(log_norm(v, p)); }

std::vector<SparseVector> images_at(const WeightSeq& w, const std::vector<SparseVector>& xs,
                                    index_t t) {
  std::vector<SparseVector> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(apply_power(w, x, t));
  return out;
}

// Smallest t in [t_from, horizon] with log||B^t e_j|| <= thr_log for every
// |j| <= s; the table must cover [-s - horizon + 1, s].
std::optional<index_t> band_time(const LogWindowTable& table, index_t s, index_t t_from,
                                 index_t horizon, double thr_log) {
  for (index_t t = std::max<index_t>(t_from, 1); t <= horizon; ++t) {
    double worst = kNegInf;
    for (index_t j = -s; j <= s; ++j) worst = std::max(worst, table.window_sum(j - t + 1, j));
    if (worst <= thr_log) return t;
  }
  return std::nullopt;
}

std::string conjunct_suffix(const ChaosVerdict& v) {
  if (v.failed_conjuncts.empty()) return "";
  std::string s = " (missing: ";
  for (std::size_t i = 0; i < v.failed_conjuncts.size(); ++i) {
    if (i) s += ", ";
    s += v.failed_conjuncts[i];
  }
  s += ")";
  return s;
}

}  // namespace

std::vector<index_t> proximal_times(const WeightSeq& w, int levels, index_t support_bound, Norm p,
                                    double log_budget, index_t horizon) {
  (void)p;  // per-basis window bounds certify l1, l2 and sup at once
  if (levels < 1) throw MalformedSpec("proximal schedule needs levels >= 1");
  if (horizon < 1) throw MalformedSpec("horizon must be >= 1");
  std::vector<index_t> out;
  out.reserve(static_cast<std::size_t>(levels));
  if (w.side() == Side::Unilateral) {
    if (support_bound < 1) throw MalformedSpec("unilateral support bound must be >= 1");
    // B^{s+n} annihilates every e_j with j <= s, so the band is sent to zero
    // exactly, no budget needed.
    for (int n = 1; n <= levels; ++n) out.push_back(support_bound + n);
    return out;
  }
  if (support_bound < 0) throw MalformedSpec("support bound must be >= 0");
  if (!std::isfinite(log_budget)) throw MalformedSpec("proximal budget must be finite");
  LogWindowTable table(w, -support_bound - horizon + 1, support_bound);
  index_t t_from = 1;
  for (int n = 1; n <= levels; ++n) {
    const double thr = -std::log(3.0 * n) - log_budget;
    auto t = band_time(table, support_bound, t_from, horizon, thr);
    if (!t)
      throw DecayNotEstablished("proximal level " + std::to_string(n) +
                                " not reached within horizon " + std::to_string(horizon));
    out.push_back(*t);
    t_from = *t + 1;
  }
  return out;
}

DistalWindow find_distal_window(const WeightSeq& w, double theta, index_t min_q, index_t min_end,
                                index_t prev_abs_m, index_t k_lo, index_t k_hi, index_t horizon) {
  if (!std::isfinite(theta)) throw MalformedSpec("divergence threshold must be finite");
  if (horizon < 1) throw MalformedSpec("horizon must be >= 1");
  const index_t lo = std::max(k_lo, w.domain_lo());
  if (k_hi < lo) throw EmptyRange("window end range is empty after clamping to the domain");
  const LogWindowTable table = build_table(w, lo, k_hi);
  const index_t max_q = std::min<index_t>(horizon, k_hi - lo + 1);
  for (index_t q = std::max<index_t>(min_q, 1); q <= max_q; ++q) {
    index_t k_first = lo + q - 1;  // the whole window must sit inside the table
    if (w.side() == Side::Unilateral) k_first = std::max(k_first, q + 1);  // landing index >= 1
    k_first = std::max(k_first, min_end);
    for (index_t k = k_first; k <= k_hi; ++k) {
      const index_t m = k - q;
      if (abs_index(m) <= prev_abs_m) continue;  // landing index must move strictly outward
      const double sum = table.window_sum(k - q + 1, k);
      if (sum >= theta) return DistalWindow{q, k, m, sum};
    }
  }
  throw DivergenceNotEstablished("no admissible window reached log-product " + fmt_g(theta) +
                                 " within horizon " + std::to_string(horizon));
}

DistalData distal_data(const WeightSeq& w, int levels, const DistalParams& params) {
  if (levels < 1) throw MalformedSpec("distal schedule needs levels >= 1");
  if (params.family_size < 1) throw MalformedSpec("family size must be >= 1");
  if (!std::isfinite(params.log_eps)) throw MalformedSpec("perturbation scale must be positive");
  DistalData out;
  index_t q_prev = 0;
  index_t abs_prev = -1;  // level 1 carries no landing-index constraint
  for (int n = 1; n <= levels; ++n) {
    const double theta =
        std::log((params.family_size + 1.0) * n) + params.margin - params.log_eps;
    const DistalWindow dwin = find_distal_window(w, theta, q_prev + 1, params.min_end, abs_prev,
                                                 params.k_lo, params.k_hi, params.horizon);
    out.q_times.push_back(dwin.q);
    out.m_indices.push_back(dwin.m);
    out.log_products.push_back(dwin.log_product);
    out.thresholds.push_back(theta);
    q_prev = dwin.q;
    abs_prev = abs_index(dwin.m);
  }
  return out;
}

ScrambleWitness build_scrambled_family(const WeightSeq& w, const std::vector<Ball>& targets,
                                       const std::vector<index_t>& p_times,
                                       const DistalData& distal, Norm p) {
  const int k = static_cast<int>(targets.size());
  if (k < 1) throw MalformedSpec("at least one target ball is required");
  const int levels = static_cast<int>(p_times.size());
  if (levels < 1) throw MalformedSpec("schedules must have at least one level");
  if (static_cast<int>(distal.q_times.size()) != levels ||
      static_cast<int>(distal.m_indices.size()) != levels)
    throw MalformedSpec("proximal and distal schedules must have the same number of levels");
  for (int n = 1; n < levels; ++n)
    if (p_times[n] <= p_times[n - 1] || distal.q_times[n] <= distal.q_times[n - 1])
      throw MalformedSpec("schedules must be strictly increasing");
  double min_r = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    if (targets[i].center.side() != w.side())
      throw SideMismatch("target " + std::to_string(i + 1) +
                         " is indexed over the wrong side for these weights");
    if (!(std::isfinite(targets[i].radius) && targets[i].radius > 0))
      throw MalformedSpec("target " + std::to_string(i + 1) + " has a non-positive radius");
    min_r = std::min(min_r, targets[i].radius);
  }
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      const double d = linear_norm(subtract(targets[i].center, targets[j].center), p);
      if (!(d > targets[i].radius + targets[j].radius + 1e-12))
        throw TargetsOverlap("target balls " + std::to_string(i + 1) + " and " +
                             std::to_string(j + 1) + " overlap or touch");
    }
  const double eps = min_r / 2;
  const index_t pert = distal.m_indices.back() + distal.q_times.back();
  if (w.side() == Side::Unilateral && pert < 1)
    throw MalformedSpec("perturbation index must be >= 1 on the unilateral side");
  for (int i = 0; i < k; ++i) {
    const auto& c = targets[i].center;
    if (!c.is_zero() && c.support_max() >= pert)
      throw MalformedSpec("distal window end " + std::to_string(pert) +
                          " does not clear the support of target " + std::to_string(i + 1));
  }

  ScrambleWitness wit;
  wit.side = w.side();
  wit.norm = p;
  wit.epsilon = eps;
  wit.perturbation_index = pert;
  wit.p_times = p_times;
  wit.q_times = distal.q_times;
  wit.m_indices = distal.m_indices;
  for (int i = 1; i <= k; ++i) {
    SparseVector z = targets[i - 1].center;
    z.add_entry(pert, static_cast<double>(i) / (k + 1.0) * eps);
    wit.family.push_back(std::move(z));
  }
  for (int i = 0; i < k; ++i) {
    const double d = linear_norm(subtract(wit.family[i], targets[i].center), p);
    if (!(d < targets[i].radius))
      throw VerificationFailed("vector " + std::to_string(i + 1) + " left its target ball");
  }
  VerifyOutcome vo = verify_scramble(w, wit);
  if (!vo.pass) throw VerificationFailed(vo.first_failure);
  wit.checks = std::move(vo.checks);
  return wit;
}

VerifyOutcome verify_scramble(const WeightSeq& w, const ScrambleWitness& witness) {
  VerifyOutcome out;
  const auto note = [&out](const std::string& msg) {
    if (out.first_failure.empty()) out.first_failure = msg;
  };
  const int k = static_cast<int>(witness.family.size());
  if (k < 1) {
    out.first_failure = "witness family is empty";
    return out;
  }
  for (int i = 0; i < k; ++i)
    if (witness.family[i].side() != w.side()) {
      out.first_failure =
          "family vector " + std::to_string(i + 1) + " is indexed over the wrong side";
      return out;
    }
  const int levels = static_cast<int>(witness.p_times.size());
  if (levels < 1 || static_cast<int>(witness.q_times.size()) != levels) {
    out.first_failure = "schedule lengths are inconsistent";
    return out;
  }
  for (int n = 0; n < levels; ++n) {
    if (witness.p_times[n] < 1 || witness.q_times[n] < 1) {
      out.first_failure = "iteration times must be >= 1";
      return out;
    }
    if (witness.p_times[n] > kMaxWitnessTime || witness.q_times[n] > kMaxWitnessTime) {
      out.first_failure = "iteration times exceed the supported range";
      return out;
    }
    if (n > 0 && (witness.p_times[n] <= witness.p_times[n - 1] ||
                  witness.q_times[n] <= witness.q_times[n - 1])) {
      out.first_failure = "schedules must be strictly increasing";
      return out;
    }
  }
  for (int n = 1; n <= levels; ++n) {
    LevelCheck lc;
    lc.level = n;
    lc.p_time = witness.p_times[n - 1];
    lc.q_time = witness.q_times[n - 1];
    const auto img_p = images_at(w, witness.family, lc.p_time);
    const auto img_q = images_at(w, witness.family, lc.q_time);
    lc.prox_max = 0.0;
    lc.distal_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        const double dp = linear_norm(subtract(img_p[i], img_p[j]), witness.norm);
        const double dq = linear_norm(subtract(img_q[i], img_q[j]), witness.norm);
        if (dp > lc.prox_max) {
          lc.prox_max = dp;
          lc.prox_pair_i = i + 1;
          lc.prox_pair_j = j + 1;
        }
        if (dq < lc.distal_min) {
          lc.distal_min = dq;
          lc.distal_pair_i = i + 1;
          lc.distal_pair_j = j + 1;
        }
      }
    lc.prox_ok = lc.prox_max <= 1.0 / n + 1e-9;
    lc.distal_ok = lc.distal_min >= static_cast<double>(n) - 1e-9;
    if (!lc.prox_ok)
      note("level " + std::to_string(n) + ": pair (" + std::to_string(lc.prox_pair_i) + "," +
           std::to_string(lc.prox_pair_j) + ") has distance " + fmt_g(lc.prox_max) + " at time " +
           std::to_string(lc.p_time) + ", above 1/" + std::to_string(n));
    if (!lc.distal_ok)
      note("level " + std::to_string(n) + ": pair (" + std::to_string(lc.distal_pair_i) + "," +
           std::to_string(lc.distal_pair_j) + ") has distance " + fmt_g(lc.distal_min) +
           " at time " + std::to_string(lc.q_time) + ", below " + std::to_string(n));
    out.checks.push_back(lc);
  }
  out.pass = out.first_failure.empty();
  return out;
}

ScrambleWitness construct_witness(const WeightSeq& w, const std::vector<Ball>& targets, int levels,
                                  const AnalysisParams& params) {
  if (targets.empty()) throw MalformedSpec("at least one target ball is required");
  if (levels < 1) throw MalformedSpec("levels must be >= 1");
  const ChaosVerdict verdict =
      w.side() == Side::Unilateral ? unilateral_verdict(w, params) : bilateral_verdict(w, params);
  if (verdict.status != Status::Established)
    throw DeciderNotEstablished("chaos deciders not established within the horizon" +
                                conjunct_suffix(verdict));
  double min_r = std::numeric_limits<double>::infinity();
  index_t s_y = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i].center.side() != w.side())
      throw SideMismatch("target " + std::to_string(i + 1) +
                         " is indexed over the wrong side for these weights");
    if (!(std::isfinite(targets[i].radius) && targets[i].radius > 0))
      throw MalformedSpec("target " + std::to_string(i + 1) + " has a non-positive radius");
    min_r = std::min(min_r, targets[i].radius);
    s_y = std::max(s_y, support_abs_bound(targets[i].center));
  }
  const double eps = min_r / 2;

  DistalParams dp;
  dp.family_size = static_cast<int>(targets.size());
  dp.log_eps = std::log(eps);
  dp.horizon = params.horizon;
  dp.k_lo = params.k_lo;
  dp.k_hi = params.k_hi;
  dp.min_end = s_y + 1;
  dp.exec = params.exec;
  const DistalData dd = distal_data(w, levels, dp);

  const index_t pert = dd.m_indices.back() + dd.q_times.back();
  const index_t s = std::max(s_y, abs_index(pert));
  double budget = eps;  // covers the perturbation part of every pairwise difference
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (std::size_t j = i + 1; j < targets.size(); ++j)
      budget = std::max(
          budget, linear_norm(subtract(targets[i].center, targets[j].center), Norm::L1) + eps);
  const auto pt = proximal_times(w, levels, s, params.norm, std::log(budget), params.horizon);
  return build_scrambled_family(w, targets, pt, dd, params.norm);
}

std::vector<index_t> shifted_decay_times(const WeightSeq& w, index_t k_lo, index_t k_hi,
                                         int levels, index_t horizon) {
  if (w.side() != Side::Bilateral)
    throw NotBilateral("band-uniform decay schedules require a bilateral weight sequence");
  if (k_lo > k_hi) throw EmptyRange("band is empty");
  if (levels < 1) throw MalformedSpec("levels must be >= 1");
  if (horizon < 1) throw MalformedSpec("horizon must be >= 1");
  const LogWindowTable table(w, k_lo - horizon + 1, k_hi);
  std::vector<index_t> out;
  out.reserve(static_cast<std::size_t>(levels));
  index_t t = 1;
  for (int n = 1; n <= levels; ++n) {
    const double thr = -static_cast<double>(n) * kLn2;
    bool found = false;
    for (; t <= horizon; ++t) {
      double worst = kNegInf;
      for (index_t k = k_lo; k <= k_hi; ++k)
        worst = std::max(worst, table.window_sum(k - t + 1, k));
      if (worst <= thr) {
        out.push_back(t);
        ++t;
        found = true;
        break;
      }
    }
    if (!found)
      throw DecayNotEstablished("band-uniform decay level " + std::to_string(n) +
                                " not reached within horizon " + std::to_string(horizon));
  }
  return out;
}

NestedTree build_nested_tree(const WeightSeq& w, const std::vector<Ball>& basis_sets, int depth,
                             Norm p, const AnalysisParams& params) {
  if (depth < 1) throw MalformedSpec("depth must be >= 1");
  if (static_cast<int>(basis_sets.size()) < depth)
    throw MalformedSpec("depth " + std::to_string(depth) + " needs at least " +
                        std::to_string(depth) + " basis balls");
  for (std::size_t i = 0; i < basis_sets.size(); ++i) {
    if (basis_sets[i].center.side() != w.side())
      throw SideMismatch("basis ball " + std::to_string(i + 1) +
                         " is indexed over the wrong side for these weights");
    if (!(std::isfinite(basis_sets[i].radius) && basis_sets[i].radius > 0))
      throw MalformedSpec("basis ball " + std::to_string(i + 1) + " has a non-positive radius");
  }
  const ChaosVerdict verdict =
      w.side() == Side::Unilateral ? unilateral_verdict(w, params) : bilateral_verdict(w, params);
  if (verdict.status != Status::Established)
    throw DeciderNotEstablished("chaos deciders not established within the horizon" +
                                conjunct_suffix(verdict));

  NestedTree tree;
  tree.side = w.side();
  tree.norm = p;
  tree.basis_sets = basis_sets;

  // Fresh perturbation indices must clear every center support that can ever
  // appear, including basis balls opened at deeper levels.
  index_t band_hi = 0;
  for (int i = 0; i < depth; ++i)
    if (!basis_sets[i].center.is_zero())
      band_hi = std::max(band_hi, basis_sets[i].center.support_max());

  index_t q_prev = 0;
  index_t abs_m_prev = -1;
  index_t p_prev = 0;
  std::vector<TreeBall> prev;

  for (int n = 1; n <= depth; ++n) {
    const index_t a_prev = static_cast<index_t>(prev.size());
    const index_t a_n = 2 * a_prev + 2;

    double enc_min = basis_sets[n - 1].radius;
    for (const auto& b : prev) enc_min = std::min(enc_min, b.radius);
    const double eps = enc_min / 2;

    const double theta = std::log((a_n + 1.0) * (n + 2 * kLn2)) - std::log(eps);
    DistalWindow dwin;
    try {
      dwin = find_distal_window(w, theta, q_prev + 1, band_hi + 1, abs_m_prev, params.k_lo,
                                params.k_hi, params.horizon);
    } catch (const DivergenceNotEstablished& e) {
      throw DepthInfeasible("level " + std::to_string(n) + ": " + e.what(), n - 1);
    }

    std::vector<TreeBall> cur;
    cur.reserve(static_cast<std::size_t>(a_n));
    std::vector<SparseVector> centers;
    centers.reserve(static_cast<std::size_t>(a_n));
    for (index_t j = 1; j <= a_n; ++j) {
      TreeBall b{SparseVector::zero(w.side()), 0.0, -1, 0};
      const SparseVector* base = nullptr;
      if (j <= a_prev) {
        b.parent = static_cast<int>(j);
        base = &prev[static_cast<std::size_t>(j - 1)].center;
      } else if (j <= 2 * a_prev) {
        b.parent = static_cast<int>(j - a_prev);
        base = &prev[static_cast<std::size_t>(j - a_prev - 1)].center;
      } else {
        b.parent = -1;
        b.basis_origin = n;
        base = &basis_sets[static_cast<std::size_t>(n - 1)].center;
      }
      b.center = *base;
      b.center.add_entry(dwin.end, static_cast<double>(j) / (a_n + 1.0) * eps);
      centers.push_back(b.center);
      cur.push_back(std::move(b));
    }

    index_t s_n = 0;
    for (const auto& c : centers) s_n = std::max(s_n, support_abs_bound(c));
    index_t p_n;
    if (w.side() == Side::Unilateral) {
      p_n = s_n + n;                          // exact annihilation of every center
      if (p_n <= p_prev) p_n = p_prev + 1;    // larger times still annihilate
    } else {
      double budget = 0.0;
      for (std::size_t u = 0; u < centers.size(); ++u)
        for (std::size_t v = u + 1; v < centers.size(); ++v)
          budget = std::max(budget, linear_norm(subtract(centers[u], centers[v]), Norm::L1));
      const double thr = -std::log(3.0 * n) - std::log(budget);
      const LogWindowTable table(w, -s_n - params.horizon + 1, s_n);
      const auto t = band_time(table, s_n, p_prev + 1, params.horizon, thr);
      if (!t)
        throw DepthInfeasible(
            "level " + std::to_string(n) + ": proximal time not reached within horizon", n - 1);
      p_n = *t;
    }

    const auto img_p = images_at(w, centers, p_n);
    const auto img_q = images_at(w, centers, dwin.q);
    double prox_meas = 0.0;
    double dist_meas = std::numeric_limits<double>::infinity();
    double min_d0 = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < centers.size(); ++u)
      for (std::size_t v = u + 1; v < centers.size(); ++v) {
        prox_meas = std::max(prox_meas, linear_norm(subtract(img_p[u], img_p[v]), p));
        dist_meas = std::min(dist_meas, linear_norm(subtract(img_q[u], img_q[v]), p));
        min_d0 = std::min(min_d0, linear_norm(subtract(centers[u], centers[v]), p));
      }
    if (!(prox_meas < 1.0 / (2.0 * n)))
      throw VerificationFailed("level " + std::to_string(n) + ": proximal measure " +
                               fmt_g(prox_meas) + " exceeded its budget " + fmt_g(1.0 / (2.0 * n)));
    if (!(dist_meas > n + kLn2))
      throw VerificationFailed("level " + std::to_string(n) + ": distal measure " +
                               fmt_g(dist_meas) + " fell short of " + fmt_g(n + kLn2));

    // Radii are capped so that the measured center margins survive for
    // arbitrary points of the balls (Lipschitz factor exp(op log-norm)),
    // while keeping diameters < 1/n, pairwise disjointness and strict
    // nesting inside the enclosing balls.
    const double lip_p = op_log_norm_global(w, p_n, params.exec);
    const double lip_q = op_log_norm_global(w, dwin.q, params.exec);
    const double slack_p = 1.0 / (2.0 * n) - prox_meas;
    const double slack_q = dist_meas - (n + kLn2);
    double log_r = std::log(0.45 / n);
    log_r = std::min(log_r, std::log(0.45 * min_d0));
    log_r = std::min(log_r, std::log(slack_p / 4) - lip_p);
    log_r = std::min(log_r, std::log(slack_q / 4) - lip_q);
    for (index_t j = 1; j <= a_n; ++j) {
      const auto& b = cur[static_cast<std::size_t>(j - 1)];
      const double enc_r = b.parent > 0 ? prev[static_cast<std::size_t>(b.parent - 1)].radius
                                        : basis_sets[static_cast<std::size_t>(n - 1)].radius;
      const double off = static_cast<double>(j) / (a_n + 1.0) * eps;
      log_r = std::min(log_r, std::log(0.45 * (enc_r - off)));
    }
    if (!(log_r >= std::log(1e-300)))
      throw DepthInfeasible(
          "level " + std::to_string(n) + ": certified radii underflow below 1e-300", n - 1);
    const double r = std::exp(log_r);
    for (auto& b : cur) b.radius = r;

    tree.levels.push_back(cur);
    tree.p_times.push_back(p_n);
    tree.q_times.push_back(dwin.q);
    tree.m_indices.push_back(dwin.m);
    tree.perturb_indices.push_back(dwin.end);

    prev = std::move(cur);
    q_prev = dwin.q;
    abs_m_prev = abs_index(dwin.m);
    p_prev = p_n;
    band_hi = std::max(band_hi, dwin.end);
  }

  const TreeVerifyOutcome check = verify_tree(w, tree);
  if (!check.pass) throw VerificationFailed(check.first_failure);
  return tree;
}

TreeVerifyOutcome verify_tree(const WeightSeq& w, const NestedTree& tree) {
  TreeVerifyOutcome out;
  const auto note = [&out](const std::string& msg) {
    if (out.first_failure.empty()) out.first_failure = msg;
  };
  const int depth = static_cast<int>(tree.levels.size());
  if (depth < 1) {
    out.first_failure = "tree has no levels";
    return out;
  }
  if (static_cast<int>(tree.basis_sets.size()) < depth) {
    out.first_failure = "fewer basis balls than levels";
    return out;
  }
  for (const auto& b : tree.basis_sets) {
    if (b.center.side() != w.side() || !(std::isfinite(b.radius) && b.radius > 0)) {
      out.first_failure = "basis balls are malformed";
      return out;
    }
  }
  if (static_cast<int>(tree.p_times.size()) != depth ||
      static_cast<int>(tree.q_times.size()) != depth ||
      static_cast<int>(tree.m_indices.size()) != depth ||
      static_cast<int>(tree.perturb_indices.size()) != depth) {
    out.first_failure = "schedule lengths do not match the depth";
    return out;
  }
  for (int n = 0; n < depth; ++n) {
    if (tree.p_times[n] < 1 || tree.q_times[n] < 1) {
      out.first_failure = "iteration times must be >= 1";
      return out;
    }
    if (tree.p_times[n] > kMaxWitnessTime || tree.q_times[n] > kMaxWitnessTime) {
      out.first_failure = "iteration times exceed the supported range";
      return out;
    }
    if (n > 0 && (tree.p_times[n] <= tree.p_times[n - 1] ||
                  tree.q_times[n] <= tree.q_times[n - 1])) {
      out.first_failure = "schedules must be strictly increasing";
      return out;
    }
    if (tree.perturb_indices[n] != tree.m_indices[n] + tree.q_times[n]) {
      out.first_failure = "perturbation indices do not match landing index + window length";
      return out;
    }
  }

  bool all_structured = true;
  index_t a_prev = 0;
  for (int n = 1; n <= depth; ++n) {
    const auto& level = tree.levels[static_cast<std::size_t>(n - 1)];
    const index_t a_n = 2 * a_prev + 2;
    TreeLevelCheck lc;
    lc.level = n;
    lc.ball_count = level.size();

    bool st = static_cast<index_t>(level.size()) == a_n;
    if (st) {
      for (index_t j = 1; j <= a_n && st; ++j) {
        const auto& b = level[static_cast<std::size_t>(j - 1)];
        const int want_parent =
            j <= a_prev ? static_cast<int>(j)
                        : (j <= 2 * a_prev ? static_cast<int>(j - a_prev) : -1);
        const int want_origin = j > 2 * a_prev ? n : 0;
        if (b.parent != want_parent || b.basis_origin != want_origin) st = false;
        if (!(std::isfinite(b.radius) && b.radius > 0)) st = false;
        if (b.center.side() != w.side()) st = false;
      }
    }
    lc.structure_ok = st;
    if (!st) {
      note("level " + std::to_string(n) + ": structural layout is broken");
      all_structured = false;
      lc.geometry_ok = false;
      lc.prox_ok = lc.distal_ok = lc.leaf_ok = false;
      out.checks.push_back(lc);
      a_prev = a_n;
      continue;
    }

    bool geo = true;
    std::string geo_msg;
    for (index_t j = 1; j <= a_n && geo; ++j) {
      const auto& b = level[static_cast<std::size_t>(j - 1)];
      if (!(2 * b.radius < 1.0 / n)) {
        geo = false;
        geo_msg = "ball " + std::to_string(j) + " has diameter >= 1/" + std::to_string(n);
      }
    }
    for (index_t u = 1; u <= a_n && geo; ++u)
      for (index_t v = u + 1; v <= a_n && geo; ++v) {
        const auto& bu = level[static_cast<std::size_t>(u - 1)];
        const auto& bv = level[static_cast<std::size_t>(v - 1)];
        const double d = linear_norm(subtract(bu.center, bv.center), tree.norm);
        if (!(d > bu.radius + bv.radius)) {
          geo = false;
          geo_msg = "balls " + std::to_string(u) + " and " + std::to_string(v) +
                    " are not pairwise disjoint";
        }
      }
    for (index_t j = 1; j <= a_n && geo; ++j) {
      const auto& b = level[static_cast<std::size_t>(j - 1)];
      const Ball* enc = nullptr;
      Ball parent_ball{SparseVector::zero(tree.side), 0.0};
      if (b.parent > 0) {
        const auto& pb =
            tree.levels[static_cast<std::size_t>(n - 2)][static_cast<std::size_t>(b.parent - 1)];
        parent_ball = Ball{pb.center, pb.radius};
        enc = &parent_ball;
      } else {
        enc = &tree.basis_sets[static_cast<std::size_t>(n - 1)];
      }
      const double d = linear_norm(subtract(b.center, enc->center), tree.norm);
      if (!(d + b.radius < enc->radius)) {
        geo = false;
        geo_msg = "ball " + std::to_string(j) + " is not strictly inside its enclosing ball";
      }
    }
    lc.geometry_ok = geo;
    if (!geo) note("level " + std::to_string(n) + ": " + geo_msg);

    const index_t pn = tree.p_times[static_cast<std::size_t>(n - 1)];
    const index_t qn = tree.q_times[static_cast<std::size_t>(n - 1)];
    const double lip_p = op_log_norm_global(w, pn, Exec::Serial);
    const double lip_q = op_log_norm_global(w, qn, Exec::Serial);
    std::vector<SparseVector> centers;
    centers.reserve(level.size());
    for (const auto& b : level) centers.push_back(b.center);
    const auto img_p = images_at(w, centers, pn);
    const auto img_q = images_at(w, centers, qn);
    lc.prox_ballwise = 0.0;
    lc.distal_ballwise = std::numeric_limits<double>::infinity();
    for (index_t u = 1; u <= a_n; ++u)
      for (index_t v = u + 1; v <= a_n; ++v) {
        const double ru = level[static_cast<std::size_t>(u - 1)].radius;
        const double rv = level[static_cast<std::size_t>(v - 1)].radius;
        const double dp =
            linear_norm(subtract(img_p[static_cast<std::size_t>(u - 1)],
                                 img_p[static_cast<std::size_t>(v - 1)]),
                        tree.norm);
        const double dq =
            linear_norm(subtract(img_q[static_cast<std::size_t>(u - 1)],
                                 img_q[static_cast<std::size_t>(v - 1)]),
                        tree.norm);
        const double stretch_p = std::exp(std::log(ru + rv) + lip_p);
        const double stretch_q = std::exp(std::log(ru + rv) + lip_q);
        lc.prox_ballwise = std::max(lc.prox_ballwise, dp + stretch_p);
        lc.distal_ballwise = std::min(lc.distal_ballwise, dq - stretch_q);
      }
    lc.prox_ok = lc.prox_ballwise < 1.0 / n;
    lc.distal_ok = lc.distal_ballwise > static_cast<double>(n);
    if (!lc.prox_ok)
      note("level " + std::to_string(n) + ": ball-wise distance bound " + fmt_g(lc.prox_ballwise) +
           " at time " + std::to_string(pn) + " is not below 1/" + std::to_string(n));
    if (!lc.distal_ok)
      note("level " + std::to_string(n) + ": ball-wise distance bound " +
           fmt_g(lc.distal_ballwise) + " at time " + std::to_string(qn) + " is not above " +
           std::to_string(n));
    out.checks.push_back(lc);
    a_prev = a_n;
  }

  if (all_structured) {
    const auto& leaves = tree.levels[static_cast<std::size_t>(depth - 1)];
    const std::size_t nleaves = leaves.size();
    // ancestor index of each leaf at each level; 0 when the lineage starts deeper
    std::vector<std::vector<int>> anc(static_cast<std::size_t>(depth),
                                      std::vector<int>(nleaves, 0));
    for (std::size_t i = 0; i < nleaves; ++i) {
      anc[static_cast<std::size_t>(depth - 1)][i] = static_cast<int>(i) + 1;
      int cur_idx = static_cast<int>(i) + 1;
      for (int lvl = depth; lvl >= 2; --lvl) {
        const int par = tree.levels[static_cast<std::size_t>(lvl - 1)]
                            [static_cast<std::size_t>(cur_idx - 1)]
                                .parent;
        if (par < 0) break;
        anc[static_cast<std::size_t>(lvl - 2)][i] = par;
        cur_idx = par;
      }
    }
    std::vector<SparseVector> leaf_centers;
    leaf_centers.reserve(nleaves);
    for (const auto& b : leaves) leaf_centers.push_back(b.center);
    for (int n = 1; n <= depth; ++n) {
      const auto img_p = images_at(w, leaf_centers, tree.p_times[static_cast<std::size_t>(n - 1)]);
      const auto img_q = images_at(w, leaf_centers, tree.q_times[static_cast<std::size_t>(n - 1)]);
      double pmax = 0.0;
      double qmin = std::numeric_limits<double>::infinity();
      for (std::size_t u = 0; u < nleaves; ++u)
        for (std::size_t v = u + 1; v < nleaves; ++v) {
          const int au = anc[static_cast<std::size_t>(n - 1)][u];
          const int av = anc[static_cast<std::size_t>(n - 1)][v];
          if (au == 0 || av == 0 || au == av) continue;
          pmax = std::max(pmax, linear_norm(subtract(img_p[u], img_p[v]), tree.norm));
          qmin = std::min(qmin, linear_norm(subtract(img_q[u], img_q[v]), tree.norm));
        }
      auto& lc = out.checks[static_cast<std::size_t>(n - 1)];
      lc.leaf_prox_max = pmax;
      lc.leaf_distal_min = qmin;
      lc.leaf_ok = pmax < 1.0 / n && qmin > static_cast<double>(n);
      if (!lc.leaf_ok)
        note("level " + std::to_string(n) +
             ": a sampled leaf pair with distinct ancestors violates its distance bound");
    }
  }

  out.pass = out.first_failure.empty();
  return out;
}

}  // namespace lyshift

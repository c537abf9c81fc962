#pragma once

// Witness constructions: proximal/distal time schedules, uniformly scrambled
// vector families inside prescribed target balls, band-uniform decay
// schedules, and nested ball trees whose levels branch 2 -> 6 -> 14 -> 30
// (a_1 = 2, a_{n+1} = 2 a_n + 2).
//
// Everything here is constructive and re-verifiable: builders measure real
// orbit distances with apply_power and refuse to return witnesses that fail
// their own margins; verifiers recompute from scratch and trust no stored
// numbers.

#include <string>
#include <vector>

#include "lyshift/criteria.hpp"

namespace lyshift {

struct Ball {
  SparseVector center;
  double radius;
};

// Iteration times t_1 < ... < t_levels with log||B^{t_n} e_j|| <= -log(3n) - log_budget
// for every basis index |j| <= support_bound. Unilateral weights annihilate the
// band exactly at t_n = support_bound + n. Bilateral search requires an
// established prefix-decay certificate to exist; throws DecayNotEstablished
// when the horizon runs out.
std::vector<index_t> proximal_times(const WeightSeq& w, int levels, index_t support_bound, Norm p,
                                    double log_budget = 0.0, index_t horizon = 10000);

struct DistalParams {
  int family_size = 1;
  double margin = 0.6931471805599453;  // ln 2
  double log_eps = 0.0;                // log of the perturbation scale
  index_t horizon = 10000;
  index_t k_lo = -10000;
  index_t k_hi = 10000;
  index_t min_end = kIndexMin;  // freshness: window end must exceed known supports
  Exec exec = Exec::Parallel;
};

struct DistalData {
  std::vector<index_t> q_times;      // strictly increasing window lengths
  std::vector<index_t> m_indices;    // landing indices, m_n = end_n - q_n
  std::vector<double> log_products;  // certified window log-products
  std::vector<double> thresholds;    // per-level thresholds the products meet
};

// Level thresholds theta_n = log((family_size + 1) * n) + margin - log_eps;
// each level scans lengths q > q_{n-1} and end indices with |m| >= |m_{n-1}| + 1.
// Throws DivergenceNotEstablished when a level cannot be met within the horizon.
DistalData distal_data(const WeightSeq& w, int levels, const DistalParams& params);

// One constrained divergence search: smallest q >= min_q, then smallest end
// index >= min_end with |end - q| > prev_abs_m (unilateral also end - q >= 1)
// whose window log-product reaches theta.
struct DistalWindow {
  index_t q;
  index_t end;
  index_t m;  // end - q
  double log_product;
};
DistalWindow find_distal_window(const WeightSeq& w, double theta, index_t min_q, index_t min_end,
                                index_t prev_abs_m, index_t k_lo, index_t k_hi, index_t horizon);

struct LevelCheck {
  int level = 0;
  index_t p_time = 0;
  index_t q_time = 0;
  double prox_max = 0.0;  // linear max over pairs of ||B^p (z_i - z_j)||
  double distal_min = 0.0;
  int prox_pair_i = 0, prox_pair_j = 0;
  int distal_pair_i = 0, distal_pair_j = 0;
  bool prox_ok = true;
  bool distal_ok = true;
};

struct ScrambleWitness {
  Side side = Side::Unilateral;
  Norm norm = Norm::L1;
  double epsilon = 0.0;
  index_t perturbation_index = 0;
  std::vector<index_t> p_times;
  std::vector<index_t> q_times;
  std::vector<index_t> m_indices;
  std::vector<SparseVector> family;
  std::vector<LevelCheck> checks;
};

// z_i = target_center_i + (i / (k+1)) * epsilon * e_{m_N + q_N} with epsilon =
// half the smallest target radius; verifies every level before returning.
// Throws TargetsOverlap / VerificationFailed / MalformedSpec.
ScrambleWitness build_scrambled_family(const WeightSeq& w, const std::vector<Ball>& targets,
                                       const std::vector<index_t>& p_times,
                                       const DistalData& distal, Norm p);

struct VerifyOutcome {
  bool pass = false;
  std::vector<LevelCheck> checks;
  std::string first_failure;  // empty when pass
};

// Recomputes every pairwise distance at every scheduled time; thresholds are
// distance <= 1/n at p_n and >= n at q_n (tolerance 1e-9).
VerifyOutcome verify_scramble(const WeightSeq& w, const ScrambleWitness& witness);

// Decider gate + distal/proximal schedules + family build, in one call.
ScrambleWitness construct_witness(const WeightSeq& w, const std::vector<Ball>& targets, int levels,
                                  const AnalysisParams& params);

// One time schedule p_1 < ... < p_levels with window log-product over
// [k - p_n + 1, k] <= -n ln 2 simultaneously for every k in [k_lo, k_hi].
std::vector<index_t> shifted_decay_times(const WeightSeq& w, index_t k_lo, index_t k_hi, int levels,
                                         index_t horizon = 10000);

struct TreeBall {
  SparseVector center;
  double radius = 0.0;
  int parent = -1;       // 1-based index into the previous level; -1 for fresh balls
  int basis_origin = 0;  // 1-based basis ball a fresh ball sits in; 0 otherwise
};

struct NestedTree {
  Side side = Side::Unilateral;
  Norm norm = Norm::L1;
  std::vector<Ball> basis_sets;
  std::vector<std::vector<TreeBall>> levels;
  std::vector<index_t> p_times;
  std::vector<index_t> q_times;
  std::vector<index_t> m_indices;
  std::vector<index_t> perturb_indices;  // m_n + q_n per level
};

// Level sizes 2, 6, 14, 30, ...; children i and a_n + i sit inside parent i,
// the last two balls of each level sit inside basis_sets[n-1]. Ball-wise
// proximal/distal margins are certified with the Lipschitz factor
// exp(op_log_norm_global), so they hold for arbitrary points of the balls.
// Throws DeciderNotEstablished / DepthInfeasible / DivergenceNotEstablished.
NestedTree build_nested_tree(const WeightSeq& w, const std::vector<Ball>& basis_sets, int depth,
                             Norm p, const AnalysisParams& params);

struct TreeLevelCheck {
  int level = 0;
  std::size_t ball_count = 0;
  bool structure_ok = true;
  bool geometry_ok = true;  // disjointness, diameters, nesting
  double prox_ballwise = 0.0;
  double distal_ballwise = 0.0;
  bool prox_ok = true;
  bool distal_ok = true;
  double leaf_prox_max = 0.0;
  double leaf_distal_min = 0.0;
  bool leaf_ok = true;
};

struct TreeVerifyOutcome {
  bool pass = false;
  std::vector<TreeLevelCheck> checks;
  std::string first_failure;
};

// Structural invariants, ball-wise proximal/distal margins via the global Lipschitz
// bound, and the leaf-center family checks (pairs with distinct level-n
// ancestors compared at p_n / q_n).
TreeVerifyOutcome verify_tree(const WeightSeq& w, const NestedTree& tree);

inline std::vector<index_t> tree_level_sizes(int depth) {
  std::vector<index_t> sizes;
  index_t a = 0;
  for (int n = 1; n <= depth; ++n) {
    a = 2 * a + 2;
    sizes.push_back(a);
  }
  return sizes;
}

}  // namespace lyshift

// End-to-end acceptance suite: seven checks, one [PASS]/[FAIL] line each,
// exit 0 only when all pass. Oracles are brute-force recomputations; every
// tolerance and runtime budget is pinned here, not configurable.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lyshift/cli.hpp"
#include "lyshift/errors.hpp"
#include "lyshift/io.hpp"
#include "lyshift/scramble.hpp"
#include "oracles.hpp"

using namespace lyshift;

namespace {

constexpr double kLn2 = 0.6931471805599453;

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& msg) {
    ok = false;
    if (detail.empty()) detail = msg;
  }
  void expect(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
  }
};

WeightSeq const_weight(Side side, double v) {
  PeriodicSpec p;
  p.pattern = {v};
  return WeightSeq::make(side, p, std::max(std::abs(v), 1.0));
}

WeightSeq two_segment() {
  PiecewiseGeometricSpec spec;
  GeoSegment left;
  left.lo_unbounded = true;
  left.hi = 0;
  left.value = 0.5;
  GeoSegment right;
  right.lo = 1;
  right.hi_unbounded = true;
  right.value = 2.0;
  spec.segments = {left, right};
  return WeightSeq::make(Side::Bilateral, spec, 2.0);
}

std::vector<Ball> basis_targets(Side side, index_t lo, index_t hi, double radius) {
  std::vector<Ball> out;
  for (index_t j = lo; j <= hi; ++j) out.push_back(Ball{SparseVector::basis(side, j), radius});
  return out;
}

std::string fmt1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. operator norm against the truncated-matrix oracle

Outcome criterion_norm_oracle() {
  Outcome out;
  const double tol = 1e-9;
  oracle::SpecGen gen(20260819u);
  for (int t = 0; t < 50 && out.ok; ++t) {
    const Side side = (t % 2 == 0) ? Side::Unilateral : Side::Bilateral;
    const WeightSeq w = gen.explicit_spec(side, 200, 0.1, 3.0);
    const index_t lo = side == Side::Unilateral ? 1 : -100;
    const index_t hi = lo + 199;
    for (index_t n = 1; n <= 16; ++n) {
      const double lin = oracle::matrix_op_norm(w, n, lo, hi);
      const double lg = op_log_norm(w, n, lo, hi);
      if (lin == 0.0) {
        out.expect(lg == kNegInf, "spec " + std::to_string(t) + " n " + std::to_string(n) +
                                      ": oracle annihilated but norm is finite");
      } else {
        const double diff = std::abs(lg - std::log(lin));
        out.expect(diff <= tol, "spec " + std::to_string(t) + " n " + std::to_string(n) +
                                    ": |log norm - log oracle| = " + fmt1(diff));
      }
    }
  }
  if (out.ok) out.detail = "50 random specs x 16 powers within 1e-9 of the matrix oracle";
  return out;
}

// ---------------------------------------------------------------------------
// 2. unilateral chain: certificate arithmetic, honest non-observation,
//    five-vector scrambled family at levels 1..8

Outcome criterion_unilateral_chain() {
  Outcome out;
  const WeightSeq w2 = const_weight(Side::Unilateral, 2.0);
  for (double theta : {40.0, 5.0, 12.0}) {
    AnalysisParams params;
    params.theta_div = theta;
    const ChaosVerdict v = unilateral_verdict(w2, params);
    const auto want = static_cast<index_t>(std::ceil(theta / kLn2));
    out.expect(v.status == Status::Established, "doubling weights not established");
    out.expect(v.divergence && v.divergence->n == want,
               "theta " + fmt1(theta) + ": certificate length != ceil(theta/ln 2)");
  }
  const WeightSeq w1 = const_weight(Side::Unilateral, 1.0);
  for (index_t horizon : {10, 100, 1000, 5000}) {
    AnalysisParams params;
    params.horizon = horizon;
    out.expect(unilateral_verdict(w1, params).status == Status::NotObservedWithinHorizon,
               "unit weights mis-certified at horizon " + std::to_string(horizon));
  }
  const ScrambleWitness wit =
      construct_witness(w2, basis_targets(Side::Unilateral, 1, 5, 0.25), 8, AnalysisParams{});
  out.expect(wit.family.size() == 5, "family size != 5");
  const VerifyOutcome vo = verify_scramble(w2, wit);
  out.expect(vo.pass && vo.checks.size() == 8, "scramble verification failed: " + vo.first_failure);
  for (const auto& lc : vo.checks) {
    out.expect(lc.prox_max <= 1.0 / lc.level + 1e-9,
               "level " + std::to_string(lc.level) + ": proximal distance above 1/n");
    out.expect(lc.distal_min >= lc.level - 1e-9,
               "level " + std::to_string(lc.level) + ": distal distance below n");
  }
  if (out.ok)
    out.detail = "certificates n = ceil(theta/ln 2), unit shift never certified, "
                 "5-vector family verified at levels 1..8";
  return out;
}

// ---------------------------------------------------------------------------
// 3. bilateral conjunction: two-segment passes both conjuncts with a verified
//    witness; each degenerate spec fails exactly the right conjunct

Outcome criterion_bilateral_conjunction() {
  Outcome out;
  const AnalysisParams params;
  const WeightSeq w = two_segment();
  const ChaosVerdict v = bilateral_verdict(w, params);
  out.expect(v.status == Status::Established, "two-segment spec not established");
  out.expect(v.divergence.has_value(), "missing divergence certificate");
  out.expect(v.decay.has_value() && v.decay->entries.size() == 8, "missing decay certificate");
  out.expect(replay_certificates(w, v), "stored certificates failed replay");

  const ScrambleWitness wit =
      construct_witness(w, basis_targets(Side::Bilateral, -2, 2, 0.25), 8, params);
  out.expect(wit.family.size() == 5 && verify_scramble(w, wit).pass,
             "bilateral 5-vector witness failed verification");

  const ChaosVerdict ex = bilateral_verdict(const_weight(Side::Bilateral, 2.0), params);
  out.expect(ex.status != Status::Established &&
                 ex.failed_conjuncts == std::vector<std::string>{"prefix_decay"},
             "expanding weights should fail exactly the decay conjunct");
  const ChaosVerdict con = bilateral_verdict(const_weight(Side::Bilateral, 0.5), params);
  out.expect(con.status != Status::Established &&
                 con.failed_conjuncts == std::vector<std::string>{"divergence"},
             "contracting weights should fail exactly the divergence conjunct");
  if (out.ok)
    out.detail = "two-segment: both certificates + verified witness; "
                 "degenerate specs fail the expected single conjunct";
  return out;
}

// ---------------------------------------------------------------------------
// 4. nested tree shadow: exact level sizes, recomputed structural invariants,
//    leaf sampling checks

Outcome criterion_tree_shadow() {
  Outcome out;
  const WeightSeq w = const_weight(Side::Unilateral, 2.0);
  const std::vector<Ball> basis = basis_targets(Side::Unilateral, 1, 4, 1.0);
  const NestedTree tree = build_nested_tree(w, basis, 4, Norm::L1, AnalysisParams{});

  const index_t sizes[4] = {2, 6, 14, 30};
  out.expect(tree.levels.size() == 4, "tree depth != 4");
  for (std::size_t L = 0; L < 4 && out.ok; ++L)
    out.expect(tree.levels[L].size() == static_cast<std::size_t>(sizes[L]),
               "level " + std::to_string(L + 1) + " size != 2*a + 2 recurrence");

  for (std::size_t L = 0; L < 4 && out.ok; ++L) {
    const auto& level = tree.levels[L];
    const int n = static_cast<int>(L) + 1;
    const std::size_t a_prev = L == 0 ? 0 : tree.levels[L - 1].size();
    for (std::size_t i = 0; i < level.size(); ++i) {
      const auto& b = level[i];
      out.expect(2.0 * b.radius < 1.0 / n, "level " + std::to_string(n) + ": diameter >= 1/n");
      // nesting is checked against the enclosure each ball declares
      const bool nested = i < 2 * a_prev;
      out.expect(nested ? b.parent == static_cast<int>(i < a_prev ? i : i - a_prev) + 1
                        : (b.parent == -1 && b.basis_origin == n),
                 "level " + std::to_string(n) + ": enclosure wiring is wrong");
      if (!out.ok) break;
      const SparseVector& enc_center =
          nested ? tree.levels[L - 1][static_cast<std::size_t>(b.parent - 1)].center
                 : basis[static_cast<std::size_t>(b.basis_origin - 1)].center;
      const double enc_radius =
          nested ? tree.levels[L - 1][static_cast<std::size_t>(b.parent - 1)].radius
                 : basis[static_cast<std::size_t>(b.basis_origin - 1)].radius;
      const double d = std::exp(log_norm(subtract(b.center, enc_center), Norm::L1));
      out.expect(d + b.radius < enc_radius, "level " + std::to_string(n) + ": nesting violated");
      for (std::size_t j = i + 1; j < level.size(); ++j) {
        const double dd = std::exp(log_norm(subtract(b.center, level[j].center), Norm::L1));
        out.expect(dd > b.radius + level[j].radius,
                   "level " + std::to_string(n) + ": balls overlap");
      }
    }
  }

  const TreeVerifyOutcome vo = verify_tree(w, tree);
  out.expect(vo.pass, "tree verification failed: " + vo.first_failure);
  for (const auto& lc : vo.checks) {
    out.expect(lc.leaf_ok && lc.leaf_prox_max <= 1.0 / lc.level + 1e-9 &&
                   lc.leaf_distal_min >= lc.level - 1e-9,
               "level " + std::to_string(lc.level) + ": leaf-center sampling checks failed");
    out.expect(lc.prox_ok && lc.distal_ok,
               "level " + std::to_string(lc.level) + ": ball-wise margins failed");
  }
  if (out.ok)
    out.detail = "depth-4 tree sizes [2, 6, 14, 30]; disjointness, nesting, diameter and "
                 "leaf sampling checks all hold";
  return out;
}

// ---------------------------------------------------------------------------
// 5. one decay schedule covering every window position in the band

Outcome criterion_band_schedule() {
  Outcome out;
  const WeightSeq w = two_segment();
  const auto ps = shifted_decay_times(w, -10, 10, 8);
  out.expect(ps.size() == 8, "schedule does not have 8 levels");
  const LogWindowTable table(w, -10 - (ps.empty() ? 1 : ps.back()), 10);
  for (int n = 1; n <= 8 && out.ok; ++n) {
    const index_t p = ps[static_cast<std::size_t>(n - 1)];
    if (n > 1)
      out.expect(p > ps[static_cast<std::size_t>(n - 2)], "schedule not strictly increasing");
    for (index_t k = -10; k <= 10; ++k)
      out.expect(table.window_sum(k - p + 1, k) <= -n * kLn2 + 1e-12,
                 "level " + std::to_string(n) + ", position " + std::to_string(k) +
                     ": window log-product above -n ln 2");
  }
  if (out.ok)
    out.detail = "one schedule p_1..p_8 beats -n ln 2 at all 21 band positions simultaneously";
  return out;
}

// ---------------------------------------------------------------------------
// 6. semigroup law and exact annihilation

Outcome criterion_semigroup() {
  Outcome out;
  const double tol = 1e-9;
  oracle::SpecGen gen(97531u);
  for (int t = 0; t < 200 && out.ok; ++t) {
    const Side side = (t % 2 == 0) ? Side::Unilateral : Side::Bilateral;
    const WeightSeq w = (t % 3 == 0)
                            ? gen.periodic_spec(side, 1 + t % 7, 0.1, 3.0)
                            : gen.explicit_spec(side, 60, 0.1, 3.0);
    const SparseVector x =
        gen.random_vector(side, 6, side == Side::Unilateral ? 1 : -20, 25);
    const index_t n1 = gen.pick_index(0, 12);
    const index_t n2 = gen.pick_index(0, 12);
    const SparseVector once = apply_power(w, x, n1 + n2);
    const SparseVector twice = apply_power(w, apply_power(w, x, n1), n2);
    out.expect(once.support_size() == twice.support_size(),
               "case " + std::to_string(t) + ": composition changed the support");
    for (const auto& [i, c] : once.entries()) {
      const double a = coeff_value(c);
      const double b = coeff_value(twice.at(i));
      out.expect(std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)}),
                 "case " + std::to_string(t) + ": coefficient mismatch at index " +
                     std::to_string(i));
    }
  }
  for (int t = 0; t < 50 && out.ok; ++t) {
    const WeightSeq w = gen.explicit_spec(Side::Unilateral, 60, 0.1, 3.0);
    const SparseVector x = gen.random_vector(Side::Unilateral, 6, 1, 30);
    const index_t smax = x.support_max();
    out.expect(apply_power(w, x, smax).is_zero(), "case " + std::to_string(t) +
                                                      ": not annihilated at n = max support");
    out.expect(apply_power(w, x, smax + 5).is_zero(),
               "case " + std::to_string(t) + ": not annihilated past max support");
    out.expect(!apply_power(w, x, smax - 1).is_zero(),
               "case " + std::to_string(t) + ": annihilated one step early");
  }
  if (out.ok)
    out.detail = "200 composition cases within 1e-9 per coefficient; "
                 "annihilation exact at n >= max support index";
  return out;
}

// ---------------------------------------------------------------------------
// 7. byte-identical reruns of every pipeline on the three canonical specs

std::string cli_path() {
  const char* p = std::getenv("LYSHIFT_CLI");
  return p ? p : LYSHIFT_DEFAULT_CLI;
}

std::string data_path(const std::string& name) {
  const char* p = std::getenv("LYSHIFT_DATA");
  return std::string(p ? p : LYSHIFT_DEFAULT_DATA) + "/" + name;
}

int exit_code(const std::string& cmd) {
  const int st = std::system(cmd.c_str());
  if (st == -1) return -1;
  return WIFEXITED(st) ? WEXITSTATUS(st) : -2;
}

Outcome criterion_determinism() {
  Outcome out;
  const std::string cli = cli_path();
  const std::string tmp = "/tmp/lyshift_acc_";

  // one command, run twice; outputs must match byte for byte
  const auto rerun = [&](const std::string& tag, const std::string& args, int want_exit) {
    const std::string f1 = tmp + tag + "_1.txt";
    const std::string f2 = tmp + tag + "_2.txt";
    const int e1 = exit_code(cli + " " + args + " --out " + f1 + " 2>/dev/null");
    const int e2 = exit_code(cli + " " + args + " --out " + f2 + " 2>/dev/null");
    out.expect(e1 == want_exit,
               tag + ": exit " + std::to_string(e1) + " != " + std::to_string(want_exit));
    out.expect(e1 == e2, tag + ": reruns exited differently");
    if (want_exit != 1)
      out.expect(read_text_file(f1) == read_text_file(f2), tag + ": reruns differ byte-wise");
    return f1;
  };

  const std::string w2 = data_path("const2_unilateral.weights");
  const std::string w1 = data_path("const1_unilateral.weights");
  const std::string wb = data_path("twoseg_bilateral.weights");

  rerun("an_const2", "analyze --weights " + w2, 0);
  rerun("an_const1", "analyze --weights " + w1 + " --horizon 2000", 2);
  rerun("an_twoseg", "analyze --weights " + wb, 0);

  const std::string wit_u = rerun(
      "sc_const2", "scramble --weights " + w2 + " --targets " + data_path("targets_unilateral.balls"), 0);
  const std::string wit_b = rerun(
      "sc_twoseg", "scramble --weights " + wb + " --targets " + data_path("targets_bilateral.balls"), 0);
  rerun("sc_const1",
        "scramble --weights " + w1 + " --horizon 2000 --targets " +
            data_path("targets_unilateral.balls"),
        1);  // decider gate refuses: error, no artifact

  const std::string tree_u = rerun(
      "tr_const2", "tree --weights " + w2 + " --basis " + data_path("basis_unilateral.balls") +
                       " --depth 4", 0);
  const std::string tree_b = rerun(
      "tr_twoseg", "tree --weights " + wb + " --basis " + data_path("basis_bilateral.balls") +
                       " --depth 3", 0);

  rerun("ve_wit_u", "verify --weights " + w2 + " " + wit_u, 0);
  rerun("ve_wit_b", "verify --weights " + wb + " " + wit_b, 0);
  rerun("ve_tree_u", "verify --weights " + w2 + " " + tree_u, 0);
  rerun("ve_tree_b", "verify --weights " + wb + " " + tree_b, 0);

  if (out.ok)
    out.detail = "analyze/scramble/tree/verify reruns byte-identical on all canonical specs";
  return out;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    double limit_s;  // 0 = no pinned budget
    std::function<Outcome()> run;
  };
  const Entry entries[] = {
      {"norm oracle equivalence", 10.0, criterion_norm_oracle},
      {"unilateral equivalence chain", 5.0, criterion_unilateral_chain},
      {"bilateral conjunction", 5.0, criterion_bilateral_conjunction},
      {"nested tree construction shadow", 30.0, criterion_tree_shadow},
      {"band-uniform decay schedule", 2.0, criterion_band_schedule},
      {"semigroup and annihilation", 0.0, criterion_semigroup},
      {"determinism goldens", 0.0, criterion_determinism},
  };

  bool all = true;
  int idx = 0;
  for (const auto& e : entries) {
    ++idx;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = e.run();
    } catch (const std::exception& ex) {
      out.ok = false;
      out.detail = std::string("unexpected exception: ") + ex.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (e.limit_s > 0 && secs >= e.limit_s) {
      out.ok = false;
      out.detail = "runtime " + fmt1(secs) + " s exceeded the " + fmt1(e.limit_s) + " s budget";
    }
    std::printf("[%s] %d. %s — %s (%.2f s)\n", out.ok ? "PASS" : "FAIL", idx, e.name,
                out.detail.c_str(), secs);
    all = all && out.ok;
  }
  return all ? 0 : 1;
}

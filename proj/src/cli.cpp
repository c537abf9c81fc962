#include "lyshift/cli.hpp"

#include <charconv>
#include <cmath>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lyshift/errors.hpp"
#include "lyshift/io.hpp"
#include "lyshift/scramble.hpp"
#include "lyshift/version.hpp"

namespace lyshift {
namespace {

constexpr index_t kMaxOrbitTime = 1000000;

std::string property_name(Property p) {
  switch (p) {
    case Property::LiYorke: return "li-yorke";
    case Property::DenseUniformLiYorke: return "dense-uniform-li-yorke";
    case Property::Sensitive: return "sensitive";
    default: return "dense-null-orbits";
  }
}

std::string status_name(Status s) {
  return s == Status::Established ? "established" : "not-observed-within-horizon";
}

std::string yesno(bool b) { return b ? "yes" : "no"; }

void emit(const RunConfig& cfg, const std::string& content) {
  if (cfg.out_path.empty()) {
    std::cout << content;
    std::cout.flush();
  } else {
    write_text_file(cfg.out_path, content);
  }
}

void report_head(std::ostream& out, const char* command) {
  out << "lyshift-report/1\n";
  out << "tool " << kToolName << ' ' << kToolVersion << '\n';
  out << "command " << command << '\n';
}

void echo_params(std::ostream& out, const RunConfig& cfg, const WeightSeq& w) {
  out << "weights " << weights_summary(w) << '\n';
  out << "param horizon " << cfg.params.horizon << '\n';
  out << "param theta-div " << fmt_display(cfg.params.theta_div) << '\n';
  out << "param theta-dec " << fmt_display(cfg.params.theta_dec) << '\n';
  out << "param range " << cfg.params.k_lo << ' ' << cfg.params.k_hi << '\n';
  out << "param norm " << norm_name(cfg.params.norm) << '\n';
  out << "param decay-levels " << cfg.params.decay_levels << '\n';
  out << "param support-bound " << cfg.params.support_bound << '\n';
  out << "param exec " << (cfg.params.exec == Exec::Parallel ? "parallel" : "serial") << '\n';
  out << "param seed " << cfg.seed << '\n';
}

void write_verdict(std::ostream& out, const char* section, const ChaosVerdict& v) {
  out << "section " << section << '\n';
  out << "property " << property_name(v.property) << '\n';
  out << "status " << status_name(v.status) << '\n';
  out << "side " << side_name(v.side) << '\n';
  out << "conjuncts-failed";
  if (v.failed_conjuncts.empty()) {
    out << " none";
  } else {
    for (const auto& c : v.failed_conjuncts) out << ' ' << c;
  }
  out << '\n';
  if (v.divergence) {
    out << "divergence-cert n " << v.divergence->n << " k " << v.divergence->k
        << " log-product " << fmt_display(v.divergence->log_product) << " threshold "
        << fmt_display(v.divergence->threshold_used) << '\n';
  } else if (v.max_window_n > 0) {
    out << "max-window n " << v.max_window_n << " k " << v.max_window_k << " log-product "
        << fmt_display(v.max_window_log_product) << '\n';
  }
  if (v.decay) {
    out << "decay-cert theta " << fmt_display(v.decay->theta) << " levels "
        << v.decay->entries.size() << '\n';
    for (std::size_t m = 0; m < v.decay->entries.size(); ++m)
      out << "decay-entry m " << m + 1 << " n " << v.decay->entries[m].n_m << " log-product "
          << fmt_display(v.decay->entries[m].log_product) << '\n';
  } else if (v.min_prefix_n > 0) {
    out << "decay-progress levels " << v.decay_levels_reached << " min-prefix "
        << fmt_display(v.min_prefix) << " at " << v.min_prefix_n << '\n';
  }
  if (!v.null_times.empty()) {
    out << "null-times";
    for (index_t t : v.null_times) out << ' ' << t;
    out << '\n';
  }
  for (const auto& c : v.null_checks) {
    out << "null-check time " << c.time << " index " << c.basis_index << " exact-zero "
        << yesno(c.exact_zero) << " log-value " << fmt_display(c.log_value) << " log-bound "
        << fmt_display(c.log_bound) << " ok " << yesno(c.ok) << '\n';
  }
}

int run_error(const std::exception& e) {
  std::cerr << "error: " << e.what() << '\n';
  return 1;
}

double unit_from(std::mt19937& rng) {
  // raw 32-bit draw scaled to [0,1); avoids distribution objects so the byte
  // stream is identical across standard library implementations
  return static_cast<double>(rng()) * 0x1p-32;
}

}  // namespace

SparseVector parse_vector_literal(Side side, const std::string& literal) {
  SparseVector v = SparseVector::zero(side);
  std::size_t pos = 0;
  while (pos < literal.size()) {
    std::size_t comma = literal.find(',', pos);
    if (comma == std::string::npos) comma = literal.size();
    const std::string item = literal.substr(pos, comma - pos);
    pos = comma + 1;
    if (item.empty()) continue;
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw MalformedSpec("vector entry '" + item + "' is not index:value");
    index_t idx = 0;
    double val = 0.0;
    {
      const char* b = item.data();
      const char* e = b + colon;
      auto [p, ec] = std::from_chars(b, e, idx);
      if (ec != std::errc() || p != e)
        throw MalformedSpec("bad index in vector entry '" + item + "'");
    }
    {
      const char* b = item.data() + colon + 1;
      const char* e = item.data() + item.size();
      auto [p, ec] = std::from_chars(b, e, val);
      if (ec != std::errc() || p != e)
        throw MalformedSpec("bad value in vector entry '" + item + "'");
    }
    v.add_entry(idx, val);
  }
  return v;
}

std::vector<index_t> parse_times_literal(const std::string& literal) {
  std::vector<index_t> times;
  const auto parse_one = [&](const std::string& item) {
    index_t t = 0;
    const char* b = item.data();
    const char* e = b + item.size();
    auto [p, ec] = std::from_chars(b, e, t);
    if (ec != std::errc() || p != e) throw MalformedSpec("bad time '" + item + "'");
    if (t < 0 || t > kMaxOrbitTime)
      throw MalformedSpec("time " + item + " is outside [0, " + std::to_string(kMaxOrbitTime) +
                          "]");
    return t;
  };
  const std::size_t dots = literal.find("..");
  if (dots != std::string::npos) {
    const index_t a = parse_one(literal.substr(0, dots));
    const index_t b = parse_one(literal.substr(dots + 2));
    if (b < a) throw MalformedSpec("time range is reversed");
    if (b - a > 100000) throw MalformedSpec("time range is too long");
    for (index_t t = a; t <= b; ++t) times.push_back(t);
    return times;
  }
  std::size_t pos = 0;
  while (pos <= literal.size()) {
    std::size_t comma = literal.find(',', pos);
    if (comma == std::string::npos) comma = literal.size();
    const std::string item = literal.substr(pos, comma - pos);
    if (!item.empty()) times.push_back(parse_one(item));
    if (comma == literal.size()) break;
    pos = comma + 1;
  }
  if (times.empty()) throw MalformedSpec("no times given");
  return times;
}

int run_analyze(const RunConfig& cfg) {
  try {
    const WeightSeq w = read_weights_file(cfg.weights_path);
    const Analysis a = analyze_weights(w, cfg.params);
    std::ostringstream out;
    report_head(out, "analyze");
    echo_params(out, cfg, w);
    write_verdict(out, "chaos", a.chaos);
    write_verdict(out, "sensitivity", a.sensitivity);
    write_verdict(out, "null-orbits", a.null_orbits);
    out << "result " << status_name(a.chaos.status) << '\n';
    emit(cfg, out.str());
    return a.chaos.status == Status::Established ? 0 : 2;
  } catch (const Error& e) {
    return run_error(e);
  } catch (const std::exception& e) {
    return run_error(e);
  }
}

int run_orbit(const RunConfig& cfg, const std::string& vector_literal,
              const std::string& second_vector_literal, const std::string& times_literal) {
  try {
    const WeightSeq w = read_weights_file(cfg.weights_path);
    const SparseVector x = parse_vector_literal(w.side(), vector_literal);
    const bool paired = !second_vector_literal.empty();
    const SparseVector y = paired ? parse_vector_literal(w.side(), second_vector_literal)
                                  : SparseVector::zero(w.side());
    const std::vector<index_t> times = parse_times_literal(times_literal);

    std::ostringstream out;
    report_head(out, "orbit");
    echo_params(out, cfg, w);
    out << "vector " << x.support_size();
    for (const auto& [i, c] : x.entries()) out << ' ' << i << ' ' << fmt_exact(coeff_value(c));
    out << '\n';
    if (paired) {
      out << "vector2 " << y.support_size();
      for (const auto& [i, c] : y.entries()) out << ' ' << i << ' ' << fmt_exact(coeff_value(c));
      out << '\n';
    }
    for (index_t t : times) {
      const SparseVector xt = apply_power(w, x, t);
      const double ln = log_norm(xt, cfg.params.norm);
      out << "row time " << t << " log-norm " << fmt_display(ln) << " zero "
          << yesno(xt.is_zero());
      if (paired) {
        const SparseVector yt = apply_power(w, y, t);
        const double ld = log_norm(subtract(xt, yt), cfg.params.norm);
        out << " log-distance " << fmt_display(ld);
      }
      out << '\n';
    }
    out << "result ok\n";
    emit(cfg, out.str());
    return 0;
  } catch (const Error& e) {
    return run_error(e);
  } catch (const std::exception& e) {
    return run_error(e);
  }
}

int run_scramble(const RunConfig& cfg, const std::string& targets_path) {
  try {
    const WeightSeq w = read_weights_file(cfg.weights_path);
    const std::vector<Ball> targets = read_balls_file(targets_path);
    const ScrambleWitness wit = construct_witness(w, targets, cfg.levels, cfg.params);
    std::ostringstream out;
    write_witness(out, wit);
    emit(cfg, out.str());
    return 0;
  } catch (const Error& e) {
    return run_error(e);
  } catch (const std::exception& e) {
    return run_error(e);
  }
}

int run_tree(const RunConfig& cfg, const std::string& basis_path) {
  try {
    const WeightSeq w = read_weights_file(cfg.weights_path);
    const std::vector<Ball> basis = read_balls_file(basis_path);
    try {
      const NestedTree tree = build_nested_tree(w, basis, cfg.depth, cfg.params.norm, cfg.params);
      std::ostringstream out;
      write_tree(out, tree);
      emit(cfg, out.str());
      return 0;
    } catch (const DepthInfeasible& e) {
      std::ostringstream out;
      report_head(out, "tree");
      echo_params(out, cfg, w);
      out << "status depth-infeasible\n";
      out << "requested-depth " << cfg.depth << '\n';
      out << "feasible-depth " << e.feasible_depth << '\n';
      out << "reason " << e.what() << '\n';
      out << "result fail\n";
      emit(cfg, out.str());
      return 2;
    }
  } catch (const Error& e) {
    return run_error(e);
  } catch (const std::exception& e) {
    return run_error(e);
  }
}

namespace {

int verify_witness_file(const RunConfig& cfg, const std::string& artifact_path) {
  std::istringstream in(read_text_file(artifact_path));
  const ScrambleWitness wit = read_witness(in);
  const WeightSeq w = read_weights_file(cfg.weights_path);
  const VerifyOutcome vo = verify_scramble(w, wit);
  std::ostringstream out;
  report_head(out, "verify");
  echo_params(out, cfg, w);
  out << "artifact witness\n";
  out << "artifact-side " << side_name(wit.side) << '\n';
  out << "artifact-norm " << norm_name(wit.norm) << '\n';
  out << "family " << wit.family.size() << '\n';
  out << "levels " << wit.p_times.size() << '\n';
  for (const auto& c : vo.checks) {
    out << "check level " << c.level << " p " << c.p_time << " q " << c.q_time << " prox "
        << fmt_display(c.prox_max) << " pair " << c.prox_pair_i << ' ' << c.prox_pair_j
        << " distal " << fmt_display(c.distal_min) << " pair " << c.distal_pair_i << ' '
        << c.distal_pair_j << " ok " << yesno(c.prox_ok && c.distal_ok) << '\n';
  }
  out << "result " << (vo.pass ? "pass" : "fail") << '\n';
  if (!vo.pass) out << "first-failure " << vo.first_failure << '\n';
  emit(cfg, out.str());
  return vo.pass ? 0 : 2;
}

int verify_tree_file(const RunConfig& cfg, const std::string& artifact_path) {
  std::istringstream in(read_text_file(artifact_path));
  const NestedTree tree = read_tree(in);
  const WeightSeq w = read_weights_file(cfg.weights_path);
  const TreeVerifyOutcome vo = verify_tree(w, tree);
  std::ostringstream out;
  report_head(out, "verify");
  echo_params(out, cfg, w);
  out << "artifact tree\n";
  out << "artifact-side " << side_name(tree.side) << '\n';
  out << "artifact-norm " << norm_name(tree.norm) << '\n';
  out << "depth " << tree.levels.size() << '\n';
  for (const auto& c : vo.checks) {
    out << "level " << c.level << " count " << c.ball_count << " structure "
        << yesno(c.structure_ok) << " geometry " << yesno(c.geometry_ok) << " ballwise-prox "
        << fmt_display(c.prox_ballwise) << " ballwise-distal " << fmt_display(c.distal_ballwise)
        << " leaf-prox " << fmt_display(c.leaf_prox_max) << " leaf-distal "
        << fmt_display(c.leaf_distal_min) << " ok "
        << yesno(c.structure_ok && c.geometry_ok && c.prox_ok && c.distal_ok && c.leaf_ok)
        << '\n';
  }

  bool spot_ok = true;
  if (vo.pass && !tree.levels.empty()) {
    // one sampled point per leaf ball: center plus a seeded offset on a fresh
    // coordinate, so each point stays strictly inside its ball and the
    // certified ball-wise margins must cover it
    const auto& leaves = tree.levels.back();
    const int depth = static_cast<int>(tree.levels.size());
    const index_t fresh = tree.perturb_indices.back() + 1;
    std::mt19937 rng(static_cast<std::uint32_t>(cfg.seed));
    std::vector<SparseVector> points;
    points.reserve(leaves.size());
    for (const auto& b : leaves) {
      SparseVector x = b.center;
      x.add_entry(fresh, (unit_from(rng) - 0.5) * b.radius);
      points.push_back(std::move(x));
    }
    double pmax = 0.0;
    double qmin = std::numeric_limits<double>::infinity();
    std::vector<SparseVector> img_p, img_q;
    img_p.reserve(points.size());
    img_q.reserve(points.size());
    for (const auto& x : points) {
      img_p.push_back(apply_power(w, x, tree.p_times.back()));
      img_q.push_back(apply_power(w, x, tree.q_times.back()));
    }
    for (std::size_t u = 0; u < points.size(); ++u)
      for (std::size_t v = u + 1; v < points.size(); ++v) {
        pmax = std::max(pmax, std::exp(log_norm(subtract(img_p[u], img_p[v]), tree.norm)));
        qmin = std::min(qmin, std::exp(log_norm(subtract(img_q[u], img_q[v]), tree.norm)));
      }
    spot_ok = pmax < 1.0 / depth && qmin > static_cast<double>(depth);
    out << "spot-check seed " << cfg.seed << " points " << points.size() << " prox "
        << fmt_display(pmax) << " distal " << fmt_display(qmin) << " ok " << yesno(spot_ok)
        << '\n';
  }

  const bool pass = vo.pass && spot_ok;
  out << "result " << (pass ? "pass" : "fail") << '\n';
  if (!pass)
    out << "first-failure "
        << (vo.first_failure.empty() ? "sampled leaf points violate the leaf-level bounds"
                                     : vo.first_failure)
        << '\n';
  emit(cfg, out.str());
  return pass ? 0 : 2;
}

}  // namespace

int run_verify(const RunConfig& cfg, const std::string& artifact_path) {
  try {
    const ArtifactKind kind = detect_artifact_file(artifact_path);
    if (kind == ArtifactKind::Witness) return verify_witness_file(cfg, artifact_path);
    return verify_tree_file(cfg, artifact_path);
  } catch (const Error& e) {
    return run_error(e);
  } catch (const std::exception& e) {
    return run_error(e);
  }
}

}  // namespace lyshift

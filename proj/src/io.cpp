#include "lyshift/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <utility>

#include "lyshift/errors.hpp"

namespace lyshift {
namespace {

constexpr const char* kWeightsHeader = "lyshift-weights/1";
constexpr const char* kBallsHeader = "lyshift-balls/1";
constexpr const char* kWitnessHeader = "lyshift-witness/1";
constexpr const char* kTreeHeader = "lyshift-tree/1";

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::string cur;
  for (char c : line) {
    if (c == '#') break;  // comment to end of line
    if (c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) toks.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) toks.push_back(std::move(cur));
  return toks;
}

struct Parser {
  std::istream& in;
  int lineno = 0;

  bool next(std::vector<std::string>& toks) {
    std::string line;
    while (std::getline(in, line)) {
      ++lineno;
      auto t = tokenize(line);
      if (!t.empty()) {
        toks = std::move(t);
        return true;
      }
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw MalformedSpec("line " + std::to_string(lineno) + ": " + msg);
  }

  double want_double(const std::string& tok) const {
    double v = 0.0;
    const char* b = tok.data();
    const char* e = b + tok.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) fail("expected a number, got '" + tok + "'");
    return v;
  }

  index_t want_index(const std::string& tok) const {
    index_t v = 0;
    const char* b = tok.data();
    const char* e = b + tok.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) fail("expected an integer, got '" + tok + "'");
    return v;
  }

  int want_int(const std::string& tok) const {
    const index_t v = want_index(tok);
    if (v < -2000000000 || v > 2000000000) fail("integer out of range: '" + tok + "'");
    return static_cast<int>(v);
  }

  void want_count(const std::vector<std::string>& toks, std::size_t n) const {
    if (toks.size() != n)
      fail("expected " + std::to_string(n) + " tokens, got " + std::to_string(toks.size()));
  }

  void want_header(const char* header) {
    std::vector<std::string> toks;
    if (!next(toks)) fail(std::string("missing header line '") + header + "'");
    if (toks.size() != 1 || toks[0] != header)
      fail(std::string("expected header '") + header + "', got '" + toks[0] + "'");
  }
};

std::string join_indices(const std::vector<index_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<index_t> parse_index_list(Parser& p, const std::vector<std::string>& toks,
                                      std::size_t from) {
  std::vector<index_t> out;
  for (std::size_t i = from; i < toks.size(); ++i) out.push_back(p.want_index(toks[i]));
  return out;
}

// "entries <m> <i1> <v1> ... <im> <vm>" starting at toks[at]
SparseVector parse_entries(Parser& p, Side side, const std::vector<std::string>& toks,
                           std::size_t at) {
  if (at >= toks.size() || toks[at] != "entries") p.fail("expected 'entries'");
  if (at + 1 >= toks.size()) p.fail("missing entry count");
  const index_t m = p.want_index(toks[at + 1]);
  if (m < 0 || toks.size() != at + 2 + 2 * static_cast<std::size_t>(m))
    p.fail("entry list does not match its declared count");
  std::vector<std::pair<index_t, double>> pairs;
  pairs.reserve(static_cast<std::size_t>(m));
  for (index_t i = 0; i < m; ++i) {
    const std::size_t base = at + 2 + 2 * static_cast<std::size_t>(i);
    pairs.emplace_back(p.want_index(toks[base]), p.want_double(toks[base + 1]));
  }
  return SparseVector::from_pairs(side, pairs);
}

std::string entries_string(const SparseVector& v) {
  std::string s = "entries " + std::to_string(v.support_size());
  for (const auto& [i, c] : v.entries()) {
    s += ' ';
    s += std::to_string(i);
    s += ' ';
    s += fmt_exact(coeff_value(c));
  }
  return s;
}

std::string segment_bound_string(bool unbounded, index_t v, bool is_lo) {
  if (unbounded) return is_lo ? "-inf" : "inf";
  return std::to_string(v);
}

std::string spec_data_lines(const WeightSeq& w, const std::string& sep) {
  std::string s;
  if (const auto* e = std::get_if<ExplicitSpec>(&w.data())) {
    s += "kind explicit";
    s += sep + "first " + std::to_string(e->first_index);
    s += sep + "default " + fmt_exact(e->default_value);
    s += sep + "values";
    for (double v : e->values) s += ' ' + fmt_exact(v);
  } else if (const auto* pp = std::get_if<PeriodicSpec>(&w.data())) {
    s += "kind periodic";
    s += sep + "anchor " + std::to_string(pp->anchor);
    s += sep + "pattern";
    for (double v : pp->pattern) s += ' ' + fmt_exact(v);
  } else {
    const auto& pw = std::get<PiecewiseGeometricSpec>(w.data());
    s += "kind piecewise_geometric";
    for (const auto& seg : pw.segments) {
      s += sep + "segment " + segment_bound_string(seg.lo_unbounded, seg.lo, true) + ' ' +
           segment_bound_string(seg.hi_unbounded, seg.hi, false) + ' ' + fmt_exact(seg.value);
    }
  }
  return s;
}

}  // namespace

std::string fmt_exact(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw IOFailure("number formatting failed");
  return std::string(buf, p);
}

std::string fmt_display(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf);
}

std::string side_name(Side s) { return s == Side::Unilateral ? "unilateral" : "bilateral"; }

std::string norm_name(Norm p) {
  switch (p) {
    case Norm::L1: return "l1";
    case Norm::L2: return "l2";
    default: return "sup";
  }
}

Side parse_side(const std::string& tok) {
  if (tok == "unilateral") return Side::Unilateral;
  if (tok == "bilateral") return Side::Bilateral;
  throw MalformedSpec("unknown side '" + tok + "' (expected unilateral or bilateral)");
}

Norm parse_norm(const std::string& tok) {
  if (tok == "l1" || tok == "1") return Norm::L1;
  if (tok == "l2" || tok == "2") return Norm::L2;
  if (tok == "sup" || tok == "inf") return Norm::Sup;
  throw MalformedSpec("unknown norm '" + tok + "' (expected 1, 2 or inf)");
}

std::string weights_summary(const WeightSeq& w) {
  return "side " + side_name(w.side()) + " " + spec_data_lines(w, " ") + " bound " +
         fmt_exact(w.bound());
}

WeightSeq read_weights(std::istream& in) {
  Parser p{in};
  p.want_header(kWeightsHeader);

  bool have_side = false, have_kind = false, have_bound = false;
  Side side = Side::Unilateral;
  std::string kind;
  double bound = 0.0;
  ExplicitSpec ex;
  PeriodicSpec pe;
  PiecewiseGeometricSpec pw;

  std::vector<std::string> toks;
  while (p.next(toks)) {
    const std::string& key = toks[0];
    if (key == "side") {
      p.want_count(toks, 2);
      side = parse_side(toks[1]);
      have_side = true;
    } else if (key == "kind") {
      p.want_count(toks, 2);
      kind = toks[1];
      if (kind != "explicit" && kind != "periodic" && kind != "piecewise_geometric")
        p.fail("unknown kind '" + kind + "'");
      have_kind = true;
    } else if (key == "bound") {
      p.want_count(toks, 2);
      bound = p.want_double(toks[1]);
      have_bound = true;
    } else if (key == "first") {
      p.want_count(toks, 2);
      ex.first_index = p.want_index(toks[1]);
    } else if (key == "default") {
      p.want_count(toks, 2);
      ex.default_value = p.want_double(toks[1]);
    } else if (key == "values") {
      for (std::size_t i = 1; i < toks.size(); ++i) ex.values.push_back(p.want_double(toks[i]));
    } else if (key == "anchor") {
      p.want_count(toks, 2);
      pe.anchor = p.want_index(toks[1]);
    } else if (key == "pattern") {
      for (std::size_t i = 1; i < toks.size(); ++i) pe.pattern.push_back(p.want_double(toks[i]));
    } else if (key == "segment") {
      p.want_count(toks, 4);
      GeoSegment seg;
      if (toks[1] == "-inf") {
        seg.lo_unbounded = true;
      } else {
        seg.lo = p.want_index(toks[1]);
      }
      if (toks[2] == "inf" || toks[2] == "+inf") {
        seg.hi_unbounded = true;
      } else {
        seg.hi = p.want_index(toks[2]);
      }
      seg.value = p.want_double(toks[3]);
      pw.segments.push_back(seg);
    } else {
      p.fail("unknown key '" + key + "' in weight spec");
    }
  }
  if (!have_side) throw MalformedSpec("weight spec is missing its side");
  if (!have_kind) throw MalformedSpec("weight spec is missing its kind");
  if (!have_bound) throw MalformedSpec("weight spec is missing its bound");

  SpecData data;
  if (kind == "explicit") {
    data = std::move(ex);
  } else if (kind == "periodic") {
    data = std::move(pe);
  } else {
    data = std::move(pw);
  }
  return WeightSeq::make(side, std::move(data), bound);
}

WeightSeq read_weights_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOFailure("cannot open weight spec '" + path + "'");
  return read_weights(in);
}

void write_weights(std::ostream& out, const WeightSeq& w) {
  out << kWeightsHeader << '\n';
  out << "side " << side_name(w.side()) << '\n';
  out << spec_data_lines(w, "\n") << '\n';
  out << "bound " << fmt_exact(w.bound()) << '\n';
}

std::vector<Ball> read_balls(std::istream& in) {
  Parser p{in};
  p.want_header(kBallsHeader);
  std::vector<std::string> toks;
  if (!p.next(toks) || toks.size() != 2 || toks[0] != "side")
    p.fail("expected 'side <unilateral|bilateral>'");
  const Side side = parse_side(toks[1]);
  if (!p.next(toks) || toks.size() != 2 || toks[0] != "count") p.fail("expected 'count <n>'");
  const index_t count = p.want_index(toks[1]);
  if (count < 0) p.fail("count must be >= 0");
  std::vector<Ball> balls;
  balls.reserve(static_cast<std::size_t>(count));
  for (index_t i = 0; i < count; ++i) {
    if (!p.next(toks)) p.fail("missing ball " + std::to_string(i + 1));
    if (toks.size() < 3 || toks[0] != "ball" || toks[1] != "radius")
      p.fail("expected 'ball radius <r> entries ...'");
    Ball b{SparseVector::zero(side), p.want_double(toks[2])};
    b.center = parse_entries(p, side, toks, 3);
    balls.push_back(std::move(b));
  }
  if (p.next(toks)) p.fail("unexpected content after the declared balls");
  return balls;
}

std::vector<Ball> read_balls_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOFailure("cannot open ball list '" + path + "'");
  return read_balls(in);
}

void write_balls(std::ostream& out, Side side, const std::vector<Ball>& balls) {
  out << kBallsHeader << '\n';
  out << "side " << side_name(side) << '\n';
  out << "count " << balls.size() << '\n';
  for (const auto& b : balls)
    out << "ball radius " << fmt_exact(b.radius) << ' ' << entries_string(b.center) << '\n';
}

void write_witness(std::ostream& out, const ScrambleWitness& wit) {
  out << kWitnessHeader << '\n';
  out << "side " << side_name(wit.side) << '\n';
  out << "norm " << norm_name(wit.norm) << '\n';
  out << "epsilon " << fmt_exact(wit.epsilon) << '\n';
  out << "perturbation-index " << wit.perturbation_index << '\n';
  out << "levels " << wit.p_times.size() << '\n';
  out << "p-times " << join_indices(wit.p_times) << '\n';
  out << "q-times " << join_indices(wit.q_times) << '\n';
  out << "m-indices " << join_indices(wit.m_indices) << '\n';
  out << "family " << wit.family.size() << '\n';
  for (const auto& z : wit.family) out << "vector " << entries_string(z) << '\n';
  for (const auto& c : wit.checks) {
    out << "check level " << c.level << " p " << c.p_time << " q " << c.q_time << " prox "
        << fmt_display(c.prox_max) << " pair " << c.prox_pair_i << ' ' << c.prox_pair_j
        << " distal " << fmt_display(c.distal_min) << " pair " << c.distal_pair_i << ' '
        << c.distal_pair_j << '\n';
  }
}

ScrambleWitness read_witness(std::istream& in) {
  Parser p{in};
  p.want_header(kWitnessHeader);
  ScrambleWitness wit;
  bool have_side = false;
  index_t declared_levels = -1;
  index_t declared_family = -1;
  std::vector<std::string> toks;
  while (p.next(toks)) {
    const std::string& key = toks[0];
    if (key == "side") {
      p.want_count(toks, 2);
      wit.side = parse_side(toks[1]);
      have_side = true;
    } else if (key == "norm") {
      p.want_count(toks, 2);
      wit.norm = parse_norm(toks[1]);
    } else if (key == "epsilon") {
      p.want_count(toks, 2);
      wit.epsilon = p.want_double(toks[1]);
    } else if (key == "perturbation-index") {
      p.want_count(toks, 2);
      wit.perturbation_index = p.want_index(toks[1]);
    } else if (key == "levels") {
      p.want_count(toks, 2);
      declared_levels = p.want_index(toks[1]);
    } else if (key == "p-times") {
      wit.p_times = parse_index_list(p, toks, 1);
    } else if (key == "q-times") {
      wit.q_times = parse_index_list(p, toks, 1);
    } else if (key == "m-indices") {
      wit.m_indices = parse_index_list(p, toks, 1);
    } else if (key == "family") {
      p.want_count(toks, 2);
      declared_family = p.want_index(toks[1]);
    } else if (key == "vector") {
      if (!have_side) p.fail("vector lines must come after the side declaration");
      wit.family.push_back(parse_entries(p, wit.side, toks, 1));
    } else if (key == "check") {
      // informational only; verification recomputes everything
    } else {
      p.fail("unknown key '" + key + "' in witness file");
    }
  }
  if (!have_side) throw MalformedSpec("witness file is missing its side");
  if (declared_levels >= 0 && declared_levels != static_cast<index_t>(wit.p_times.size()))
    throw MalformedSpec("witness declares " + std::to_string(declared_levels) +
                        " levels but carries " + std::to_string(wit.p_times.size()));
  if (declared_family >= 0 && declared_family != static_cast<index_t>(wit.family.size()))
    throw MalformedSpec("witness declares " + std::to_string(declared_family) +
                        " family vectors but carries " + std::to_string(wit.family.size()));
  return wit;
}

void write_tree(std::ostream& out, const NestedTree& tree) {
  out << kTreeHeader << '\n';
  out << "side " << side_name(tree.side) << '\n';
  out << "norm " << norm_name(tree.norm) << '\n';
  out << "depth " << tree.levels.size() << '\n';
  out << "p-times " << join_indices(tree.p_times) << '\n';
  out << "q-times " << join_indices(tree.q_times) << '\n';
  out << "m-indices " << join_indices(tree.m_indices) << '\n';
  out << "perturb-indices " << join_indices(tree.perturb_indices) << '\n';
  out << "basis " << tree.basis_sets.size() << '\n';
  for (const auto& b : tree.basis_sets)
    out << "ball radius " << fmt_exact(b.radius) << ' ' << entries_string(b.center) << '\n';
  for (std::size_t n = 1; n <= tree.levels.size(); ++n) {
    const auto& level = tree.levels[n - 1];
    out << "level " << n << " count " << level.size() << '\n';
    for (const auto& b : level)
      out << "tree-ball parent " << b.parent << " origin " << b.basis_origin << " radius "
          << fmt_exact(b.radius) << ' ' << entries_string(b.center) << '\n';
  }
}

NestedTree read_tree(std::istream& in) {
  Parser p{in};
  p.want_header(kTreeHeader);
  NestedTree tree;
  std::vector<std::string> toks;

  auto want_kv = [&](const char* key) -> std::vector<std::string> {
    if (!p.next(toks) || toks.empty() || toks[0] != key)
      p.fail(std::string("expected '") + key + "' line");
    return toks;
  };

  auto side_line = want_kv("side");
  p.want_count(side_line, 2);
  tree.side = parse_side(side_line[1]);
  auto norm_line = want_kv("norm");
  p.want_count(norm_line, 2);
  tree.norm = parse_norm(norm_line[1]);
  auto depth_line = want_kv("depth");
  p.want_count(depth_line, 2);
  const index_t depth = p.want_index(depth_line[1]);
  if (depth < 1 || depth > 64) p.fail("depth out of range");
  tree.p_times = parse_index_list(p, want_kv("p-times"), 1);
  tree.q_times = parse_index_list(p, want_kv("q-times"), 1);
  tree.m_indices = parse_index_list(p, want_kv("m-indices"), 1);
  tree.perturb_indices = parse_index_list(p, want_kv("perturb-indices"), 1);
  auto basis_line = want_kv("basis");
  p.want_count(basis_line, 2);
  const index_t basis_count = p.want_index(basis_line[1]);
  if (basis_count < 0 || basis_count > 4096) p.fail("basis count out of range");
  for (index_t i = 0; i < basis_count; ++i) {
    if (!p.next(toks)) p.fail("missing basis ball " + std::to_string(i + 1));
    if (toks.size() < 3 || toks[0] != "ball" || toks[1] != "radius")
      p.fail("expected 'ball radius <r> entries ...'");
    Ball b{SparseVector::zero(tree.side), p.want_double(toks[2])};
    b.center = parse_entries(p, tree.side, toks, 3);
    tree.basis_sets.push_back(std::move(b));
  }
  for (index_t n = 1; n <= depth; ++n) {
    auto level_line = want_kv("level");
    p.want_count(level_line, 4);
    if (p.want_index(level_line[1]) != n) p.fail("levels must appear in order");
    if (level_line[2] != "count") p.fail("expected 'level <n> count <c>'");
    const index_t count = p.want_index(level_line[3]);
    if (count < 0 || count > 1000000) p.fail("level count out of range");
    std::vector<TreeBall> level;
    level.reserve(static_cast<std::size_t>(count));
    for (index_t i = 0; i < count; ++i) {
      if (!p.next(toks)) p.fail("missing tree ball " + std::to_string(i + 1));
      if (toks.size() < 7 || toks[0] != "tree-ball" || toks[1] != "parent" ||
          toks[3] != "origin" || toks[5] != "radius")
        p.fail("expected 'tree-ball parent <i> origin <m> radius <r> entries ...'");
      TreeBall b{SparseVector::zero(tree.side), 0.0, -1, 0};
      b.parent = p.want_int(toks[2]);
      b.basis_origin = p.want_int(toks[4]);
      b.radius = p.want_double(toks[6]);
      b.center = parse_entries(p, tree.side, toks, 7);
      level.push_back(std::move(b));
    }
    tree.levels.push_back(std::move(level));
  }
  if (p.next(toks)) p.fail("unexpected content after the declared levels");
  return tree;
}

ArtifactKind detect_artifact(std::istream& in) {
  Parser p{in};
  std::vector<std::string> toks;
  if (!p.next(toks)) throw MalformedSpec("artifact file is empty");
  if (toks.size() == 1 && toks[0] == kWitnessHeader) return ArtifactKind::Witness;
  if (toks.size() == 1 && toks[0] == kTreeHeader) return ArtifactKind::Tree;
  throw MalformedSpec("unrecognized artifact header '" + toks[0] + "'");
}

ArtifactKind detect_artifact_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOFailure("cannot open artifact '" + path + "'");
  return detect_artifact(in);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOFailure("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IOFailure("read error on '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOFailure("cannot create '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw IOFailure("write error on '" + path + "'");
}

}  // namespace lyshift

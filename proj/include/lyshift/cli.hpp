#pragma once

// Command runners shared by the CLI binary and the end-to-end tests. Each
// runner writes exactly one deterministic report or artifact to --out (or
// stdout) and returns the exit code: 0 established/pass, 2 not-observed/fail,
// 1 error. Error text goes to stderr only.

#include <cstdint>
#include <string>
#include <vector>

#include "lyshift/criteria.hpp"

namespace lyshift {

struct RunConfig {
  std::string weights_path;
  AnalysisParams params;
  int levels = 8;          // scramble schedule depth
  int depth = 4;           // tree depth
  std::string out_path;    // empty writes to stdout
  std::uint64_t seed = 0;  // drives sampled spot checks in verify
};

int run_analyze(const RunConfig& cfg);
int run_orbit(const RunConfig& cfg, const std::string& vector_literal,
              const std::string& second_vector_literal, const std::string& times_literal);
int run_scramble(const RunConfig& cfg, const std::string& targets_path);
int run_tree(const RunConfig& cfg, const std::string& basis_path);
int run_verify(const RunConfig& cfg, const std::string& artifact_path);

// "1:1,5:-0.25" -> finite-support vector (orbit command input)
SparseVector parse_vector_literal(Side side, const std::string& literal);
// "1,2,5" or "1..8" -> orbit sampling times in [0, 1e6]
std::vector<index_t> parse_times_literal(const std::string& literal);

}  // namespace lyshift

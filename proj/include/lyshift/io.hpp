#pragma once

// Deterministic text serialization for weight specs, ball lists, scramble
// witnesses and nested trees. Every file starts with a versioned header line.
// Machine-replayed numbers (vector entries, radii, epsilon) use the shortest
// decimal that parses back exactly; display-only numbers use 12 significant
// digits. No timestamps, no locale dependence, fixed key order.

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "lyshift/scramble.hpp"

namespace lyshift {

// shortest decimal string that parses back to exactly v; "-0" is normalized
std::string fmt_exact(double v);
// 12 significant digits for display; "-0" is normalized
std::string fmt_display(double v);

std::string side_name(Side s);
std::string norm_name(Norm p);
Side parse_side(const std::string& tok);          // "unilateral" | "bilateral"
Norm parse_norm(const std::string& tok);          // "l1"|"l2"|"sup" or "1"|"2"|"inf"

// one-line canonical echo of a weight spec (side, kind, bound, data)
std::string weights_summary(const WeightSeq& w);

WeightSeq read_weights(std::istream& in);
WeightSeq read_weights_file(const std::string& path);
void write_weights(std::ostream& out, const WeightSeq& w);

// ball lists serve both scramble targets and tree basis sets
std::vector<Ball> read_balls(std::istream& in);
std::vector<Ball> read_balls_file(const std::string& path);
void write_balls(std::ostream& out, Side side, const std::vector<Ball>& balls);

void write_witness(std::ostream& out, const ScrambleWitness& wit);
ScrambleWitness read_witness(std::istream& in);

void write_tree(std::ostream& out, const NestedTree& tree);
NestedTree read_tree(std::istream& in);

enum class ArtifactKind { Witness, Tree };
// classifies a serialized artifact by its header line
ArtifactKind detect_artifact(std::istream& in);
ArtifactKind detect_artifact_file(const std::string& path);

// whole-file helpers; throw IOFailure
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace lyshift

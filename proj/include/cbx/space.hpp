#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cbx/common.hpp"

namespace cbx {

/// Finite metric space: ordered point labels plus a full distance matrix.
struct MetricSpace {
  std::vector<std::string> points;
  Matrix dist;

  int size() const { return static_cast<int>(points.size()); }
};

enum class MetricAxiom { None, Dimension, ZeroDiagonal, Symmetry, Positivity, Triangle };

std::string to_string(MetricAxiom axiom);

/// Validation verdict: OK, or the first violated axiom with its witnessing
/// triple (unused slots are -1).
struct MetricCheck {
  bool ok = true;
  MetricAxiom violated = MetricAxiom::None;
  std::array<int, 3> witness{-1, -1, -1};
  std::string message;
};

/// Checks the four metric axioms. Throws std::invalid_argument when the
/// matrix shape does not match the point count (malformed input, not a
/// failed axiom). The triangle inequality is checked with a small relative
/// slack so that distances assembled in floating point do not self-report.
MetricCheck validate_metric(const MetricSpace& space);

/// min over l in L of dist(k, l). L must be nonempty.
double dist_to_set(const MetricSpace& space, int k, const IndexSet& L);

/// Compact model K = X ∪ boundary, with the boundary split into explicit
/// index sets L_1..L_r whose union is K∖X.
struct Compactification {
  MetricSpace space;                    // over all of K
  IndexSet interior;                    // X
  std::vector<IndexSet> boundary_sets;  // L_1..L_r

  int size() const { return space.size(); }
  int interior_size() const { return static_cast<int>(interior.size()); }
  IndexSet boundary() const;
};

/// Structural invariants: nonempty interior, boundary sets within K∖X and
/// covering it. Throws on violation.
void validate_compactification(const Compactification& comp);

/// phi_n(k) = max(1 - dist(k, L_n), 0): one on L_n, below one elsewhere
/// (strictly below one on X).
Vector cutoff_phi(const Compactification& comp, int n);

enum class TruncationRule {
  HarmonicPoints,
  GeometricWeights,
  TailIndicator,
  SinglePointIndicator,
  PowerCutoff,
  DivergingLinear,
};

TruncationRule truncation_rule_from_string(const std::string& name);
std::string to_string(TruncationRule rule);

/// Deterministic generator family emulating the countable model
/// X = {1/k : k >= 1}, K = X ∪ {0}. Every rule shares the harmonic
/// geometry; the rule selects which funcs/measures the family generates.
struct TruncationFamily {
  TruncationRule rule = TruncationRule::HarmonicPoints;
  int level = 1;
  double ratio = 0.5;  // geometric-weights only
};

/// Level-N instantiation: interior points 1, 1/2, ..., 1/N, boundary {0},
/// distances |u - v|. Restricting a level-M instance to the first
/// min(N,M) interior points reproduces the smaller instance.
Compactification instantiate(const TruncationFamily& family, int level);
Compactification instantiate(const TruncationFamily& family);

/// An instantiated family: the compactification plus the rule that knows
/// how to generate funcs/measures on it.
struct FamilyInstance {
  TruncationFamily family;
  Compactification comp;

  int level() const { return family.level; }
};

FamilyInstance make_instance(const TruncationFamily& family, int level);

/// Normalized geometric log-weights log(p_k), p_k ∝ ratio^k, over n points.
/// Kept in log space: the interesting ratios underflow double weights.
Vector geometric_log_weights(int n, double ratio);

}  // namespace cbx

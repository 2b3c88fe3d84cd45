#pragma once

#include <string>
#include <vector>

#include "cbx/common.hpp"
#include "cbx/space.hpp"

namespace cbx {

/// Functions and measures over a finite point set are plain real vectors
/// aligned to the space's point order.
using Func = Vector;
using Measure = Vector;

/// Sup norm ‖f‖ = max |f(k)|.
inline double sup_norm(const Eigen::Ref<const Vector>& f) {
  return f.size() == 0 ? 0.0 : f.cwiseAbs().maxCoeff();
}

/// Pointwise order f <= g. Throws on index-set mismatch.
inline bool leq(const Vector& f, const Vector& g) {
  detail::require(f.size() == g.size(), "leq: index sets differ");
  return (f.array() <= g.array()).all();
}

double total_mass(const Vector& mu);
IndexSet support(const Vector& mu);

enum class SeqKind {
  BoundaryPower,
  CutoffProduct,
  TailIndicator,
  SinglePointIndicator,
  EnvelopeSequence,
  UserList,
};

enum class SeqDirection { Up, Down, None };

std::string to_string(SeqKind kind);
std::string to_string(SeqDirection dir);

/// A finite list of funcs with a declared monotonicity direction and uniform
/// sup-norm bound. Up/Down are validated pointwise on construction; None is
/// for convergent-but-not-monotone inputs (fatou/lebesgue probes).
struct FuncSequence {
  SeqKind kind = SeqKind::UserList;
  SeqDirection direction = SeqDirection::None;
  std::vector<Vector> terms;
  double bound = 0.0;
};

/// Validates the declared direction (over the given indices, or all
/// coordinates when `on` is empty) and the uniform bound; throws otherwise.
FuncSequence make_sequence(SeqKind kind, SeqDirection direction,
                           std::vector<Vector> terms, double bound,
                           const IndexSet& on = {});

/// Terms base - k*phi_n^m for m = 1..M: nondecreasing on X, constant
/// (= base - k) on L_n. The paper's device for sequences that converge
/// upward on X while pinned down on a boundary set.
FuncSequence boundary_power_sequence(const Compactification& comp, int n,
                                     const Vector& base_on_K, double k, int M);

/// Term n is the pointwise product of the first min(n, #cutoffs) cutoffs,
/// each raised to the n-th power; nonincreasing, and null on every point
/// some cutoff kills.
FuncSequence cutoff_product_sequence(const std::vector<Vector>& cutoffs, int N);

/// Indicator of the tail {1/k : k >= n} on the interior of a harmonic
/// instance; the canonical h_n ↓ 0 on X.
Vector tail_indicator(const FamilyInstance& inst, int n);

/// All tail indicators n = 1..level as a Down sequence.
FuncSequence tail_indicator_sequence(const FamilyInstance& inst);

/// Indicator of the single point 1/n on the interior: pointwise null but
/// not monotone.
Vector single_point_indicator(const FamilyInstance& inst, int n);

/// Terms n = 1..level, direction None.
FuncSequence single_point_indicator_sequence(const FamilyInstance& inst);

/// f(1/k) = k on the interior: the unbounded test direction for the
/// compact-support probe.
Vector diverging_linear(const FamilyInstance& inst);

/// Powers phi^m of the boundary cutoff restricted to the interior,
/// m = 1..M: strictly below one on X, hence a Down null sequence.
FuncSequence power_cutoff_sequence(const FamilyInstance& inst, int M);

/// Restriction of a Func on K to the interior coordinates.
Vector restrict_to(const Vector& f_on_K, const IndexSet& indices);

}  // namespace cbx

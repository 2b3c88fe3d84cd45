#pragma once

#include <vector>

#include "cbx/funcspace.hpp"
#include "cbx/space.hpp"

namespace cbx {

/// Result of the metric inf-convolution g(x) = min_{y in X} f(y) + n d(x,y).
struct EnvelopeResult {
  Vector g;                       // on all of K
  double n = 0.0;                 // Lipschitz parameter
  double lipschitz_certificate = 0.0;  // max over pairs of |Δg|/d
};

/// Largest n-Lipschitz function below f on X, evaluated on all of K as an
/// exact min-plus matrix-vector product. g <= f on X, g >= -‖f‖ on K, and
/// g == f once n dominates the pairwise Lipschitz constant of f.
EnvelopeResult lipschitz_envelope(const Compactification& comp, const Vector& f_on_X,
                                  double n);

/// Envelopes for a strictly increasing list of parameters: pointwise
/// nondecreasing, each below f on X; gaps_on_X[i] = f - g_{n_i} on X.
struct EnvelopeSweep {
  FuncSequence seq;  // direction Up, terms on K
  std::vector<double> n_values;
  std::vector<Vector> gaps_on_X;
};

EnvelopeSweep envelope_sequence(const Compactification& comp, const Vector& f_on_X,
                                const std::vector<double>& n_list);

/// Brute-force pairwise Lipschitz constant max |f(x)-f(y)|/d(x,y); f is
/// aligned with `indices` (f[i] is the value at point indices[i]). Returns
/// 0 for a single point.
double lipschitz_constant(const MetricSpace& space, const Vector& f,
                          const IndexSet& indices);

}  // namespace cbx

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cbx/functionals.hpp"

namespace cbx {

enum class ConjugateMethod { ClosedForm, Enumeration, Ascent };

std::string to_string(ConjugateMethod method);

/// F*(mu) = sup_f mu(f) - F(f), with the sup probed over escalating boxes
/// when no closed form exists. Always nonnegative for admissible mu; +inf
/// comes with a replayable divergence witness.
struct ConjugateValue {
  double value = 0.0;  // +inf when divergent
  std::optional<Vector> maximizer;
  ConjugateMethod method = ConjugateMethod::Ascent;
  std::vector<std::pair<Vector, double>> certificate;  // lower-bound witnesses
  std::optional<DivergenceWitness> divergence;

  bool infinite() const { return value == kInf; }
};

struct ConjugateOptions {
  std::vector<double> boxes{1.0, 10.0, 100.0, 1000.0};
  int iters = 250;
  double divergence_threshold = 1e6;
  std::vector<Vector> hints;  // extra candidate maximizers (always evaluated)
  std::uint64_t seed = 1;
};

ConjugateValue conjugate(const Functional& F, const Vector& mu,
                         const ConjugateOptions& opts = {});

/// Replays a divergence witness: value of mu(scale * g) - F(scale * g).
double replay_divergence(const Functional& F, const Vector& mu,
                         const DivergenceWitness& witness);

struct DualSearchOptions {
  IndexSet support;  // empty = all coordinates of the domain
  int multistarts = 10;
  int outer_iters = 80;
  std::uint64_t seed = 1;
  double tol = 1e-9;
};

/// Verification record for F(f) = sup mu(f) - F*(mu) at one f.
struct DualityReport {
  Vector f;
  double primal = 0.0;
  double dual = -kInf;
  double gap = kInf;  // primal - dual; nonnegative up to noise (weak duality)
  Vector best_measure;
  double conjugate_at_best = 0.0;
  double epsilon_certified = kInf;  // smallest eps making best_measure eps-supporting
  double psi_bound = 0.0;           // F(‖f‖+1) - F(-‖f‖) + 1
  bool psi_ok = false;
  ConjugateMethod method = ConjugateMethod::Ascent;
};

/// Mass cap for dual optimizers supporting F at sup-norm level r.
double psi_bound(const Functional& F, double fnorm);

/// Projected supergradient ascent of mu -> mu(f) - F*(mu) over the
/// nonnegative orthant with the psi mass cap, seeded with kind-specific
/// closed-form candidates plus random multistarts; the queried f always
/// enters the conjugate's certificate, so weak duality holds by
/// construction.
DualityReport biconjugate(const Functional& F, const Vector& f,
                          const DualSearchOptions& opts = {});

/// Sampled verification that mu is eps-supporting at f:
/// F(f+g) >= F(f) - eps + mu(g) for sampled g, plus the psi-bound and the
/// dual eps-optimality condition.
struct SupportRecord {
  double requested_eps = 0.0;
  double certified_eps = 0.0;  // achieved eps' (gap of the dual search)
  bool certified = false;      // certified_eps <= requested_eps
  int samples = 0;
  double worst_subgradient_margin = 0.0;  // min over samples of lhs-rhs
  bool subgradient_ok = false;
  bool mass_ok = false;
  bool conjugate_ok = false;
  double psi = 0.0;
};

struct SupportingMeasure {
  Vector mu;
  SupportRecord record;
};

SupportingMeasure supporting_measure(const Functional& F, const Vector& f, double eps,
                                     const DualSearchOptions& opts = {},
                                     int verify_samples = 200);

/// Checks an arbitrary candidate measure against the eps-supporting
/// inequalities (used by tests and the CLI to audit returned measures).
SupportRecord verify_supporting(const Functional& F, const Vector& f, const Vector& mu,
                                double eps, int samples, std::uint64_t seed,
                                double tol = 1e-8);

/// Duality gaps over a seeded sample of functions.
struct RepresentationReport {
  int samples = 0;
  double range = 0.0;
  double max_gap = 0.0;
  double mean_gap = 0.0;
  std::vector<double> gaps;
  bool pass = false;
  double tol = 0.0;
};

RepresentationReport verify_representation(const Functional& F, int samples,
                                           double range, std::uint64_t seed,
                                           double tol = 1e-6,
                                           const DualSearchOptions& opts = {});

}  // namespace cbx

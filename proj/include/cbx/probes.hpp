#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cbx/duality.hpp"
#include "cbx/envelope.hpp"

namespace cbx {

/// Shared result shape for the continuity probes: a monitored trajectory
/// plus a verdict. For truncation sweeps `index` holds the levels and
/// `level_series` the within-level trajectories; for single sequences
/// `index` holds term indices.
struct ProbeReport {
  std::string probe;
  std::string inputs_digest;
  std::string verdict;
  bool pass = false;
  double tolerance = 0.0;
  std::vector<double> index;
  std::vector<double> observed;
  std::vector<std::vector<double>> level_series;
  std::vector<std::pair<std::string, std::vector<double>>> extra_series;
  std::vector<Vector> witness;  // re-evaluates to a genuine violation
  std::string detail;
};

// ---------------------------------------------------------------------------
// Single-sequence probes

/// Monitors the gaps F(limit) - F(term) along an Up sequence; passes when F
/// ascends monotonically and the gap decays below tolerance.
ProbeReport upward_probe(const Functional& F, const FuncSequence& seq,
                         const Vector& limit, double tol);

/// Monitors F(h_n) along a Down null sequence; additionally checks the
/// sandwich 0 <= F(f) - F(f - h_n) <= F(f + h_n) - F(f) for the supplied f.
ProbeReport downward_probe(const Functional& F, const FuncSequence& seq, double tol,
                           const std::vector<Vector>& sandwich_f = {});

/// Uniformly bounded pointwise-convergent sequences: asserts the liminf
/// inequality F(limit) <= min of the trailing window + tol. Throws when a
/// term violates the declared bound.
ProbeReport fatou_probe(const Functional& F, const std::vector<Vector>& terms,
                        const Vector& limit, double bound, double tol);

/// Bounded pointwise-null but not necessarily monotone input; verdict
/// has-lebesgue iff the trajectory decays below tolerance.
ProbeReport lebesgue_probe(const Functional& F, const std::vector<Vector>& terms,
                           double tol);

// ---------------------------------------------------------------------------
// Truncation sweeps

struct SweepOptions {
  std::vector<int> levels{4, 8, 16, 32, 64};
  double tol = 1e-6;
  std::uint64_t seed = 1;
};

/// Functional built per level of a truncation family.
struct SweepFunctional {
  std::string label;
  std::function<std::unique_ptr<Functional>(const FamilyInstance&)> make;
};

/// Function built per level (on X, or on K for compactification kinds).
struct SweepFunc {
  std::string label;
  bool on_K = false;
  std::function<Vector(const FamilyInstance&)> make;
};

enum class DownRule { TailIndicator, PowerCutoff };

/// Downward continuity across levels: within each level runs the full down
/// sequence; monitored value is F at the deepest term.
ProbeReport downward_sweep(const SweepFunctional& subject, DownRule rule,
                           const SweepOptions& opts,
                           int sandwich_samples = 2);

/// Envelope convergence as an upward sweep: per level, envelopes of f for
/// doubling parameters; monitored value is the final gap F(f) - F(g_n).
ProbeReport upward_envelope_sweep(const SweepFunctional& subject, const SweepFunc& f_rule,
                                  const SweepOptions& opts);

/// Lebesgue property along single-point indicators.
ProbeReport lebesgue_sweep(const SweepFunctional& subject, const SweepOptions& opts);

/// Fatou along seeded uniformly bounded pointwise-convergent sequences;
/// monitored value is the worst violation margin per level (0 when clean).
ProbeReport fatou_sweep(const SweepFunctional& subject, const SweepOptions& opts,
                        int sequences_per_level = 5);

// ---------------------------------------------------------------------------
// Tightness of sublevel sets

struct TightnessSubject {
  enum class Kind { EntropicGeometric, Sup, ExplicitList };
  Kind kind = Kind::EntropicGeometric;
  std::string label;
  double ratio = 0.5;            // EntropicGeometric reference decay
  std::vector<Vector> measures;  // ExplicitList (single-level probes)
};

struct TightnessReport {
  std::string family;        // description of Gamma
  std::string sequence;      // description of h_n
  double m = 0.0;            // sublevel height
  std::vector<int> levels;
  std::vector<std::vector<double>> per_term_sup;  // per level, over n
  std::vector<double> final_per_level;            // deepest-cut value per level
  std::vector<double> escape_mass;                // maximizer tail mass per level
  std::string verdict;  // tight | not-tight | inconclusive
  bool tight = false;
  double tolerance = 0.0;
};

/// sup { mu(h_n) : F*(mu) <= m } along tail indicators, swept over levels.
/// Entropic sublevel sets are maximized exactly by a one-dimensional tilt
/// bisection in log space; sup-kind sublevel sets contain every probability,
/// so the sup is max h_n; explicit lists are enumerated.
TightnessReport tightness_probe(const TightnessSubject& subject, double m,
                                const SweepOptions& opts);

/// Exact maximizer of mu(h) over probabilities with KL(mu || p) <= m:
/// exponential tilt with bisection on the one-dimensional dual.
struct TiltResult {
  double value = 0.0;
  double kl = 0.0;
  double beta = 0.0;
  Vector maximizer;
};
TiltResult max_linear_under_kl(const Vector& log_p, const Vector& h, double m);

// ---------------------------------------------------------------------------
// Attainment and escape

struct AttainmentLevel {
  int level = 0;
  double gap = 0.0;
  double escape_distance = 0.0;  // mass-weighted distance of the optimizer to the boundary
  std::string top_point;         // label of the optimizer's heaviest point
  Vector best_measure;
};

struct AttainmentReport {
  std::string functional;
  std::string func;
  std::vector<AttainmentLevel> per_level;
  std::string verdict;  // attained | escaping | inconclusive
  double tolerance = 0.0;
};

/// Per level: biconjugate with the dual search restricted to the interior;
/// attained iff gaps stay below tolerance with a stable optimizer location,
/// escaping iff gaps shrink while the optimizer slides to the boundary.
AttainmentReport attainment_probe(const SweepFunctional& subject, const SweepFunc& f_rule,
                                  const SweepOptions& opts);

struct EscapeSummary {
  std::vector<int> levels;
  std::vector<double> deltas;
  // boundary_mass[l][d]: optimizer mass within deltas[d] of the boundary.
  std::vector<std::vector<double>> boundary_mass;
  std::vector<double> escape_distance;
  double slope = 0.0;  // log-log fit of escape distance against level
};

EscapeSummary mass_escape(const std::vector<Vector>& optimizers,
                          const std::vector<FamilyInstance>& instances,
                          const std::vector<double>& deltas);

// ---------------------------------------------------------------------------
// Compact support / factorization (functionals on all continuous functions)

enum class TableRule { Prefix, Escaping, EmptyEffective };

std::string to_string(TableRule rule);

/// Builds the rule's penalty table on the interior of the instance.
PenaltyTableFunctional make_rule_table(TableRule rule, const FamilyInstance& inst,
                                       int prefix = 3);

/// Prefix-supported tables must be invariant under off-support perturbations
/// (exactly); escaping tables admit the max(a_n psi_n) construction whose
/// value exceeds every level.
ProbeReport compact_support_probe(TableRule rule, const SweepOptions& opts,
                                  int trials = 100, int prefix = 3);

}  // namespace cbx

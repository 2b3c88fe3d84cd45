#include "cbx/space.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace cbx {

std::string to_string(MetricAxiom axiom) {
  switch (axiom) {
    case MetricAxiom::None: return "none";
    case MetricAxiom::Dimension: return "dimension";
    case MetricAxiom::ZeroDiagonal: return "zero-diagonal";
    case MetricAxiom::Symmetry: return "symmetry";
    case MetricAxiom::Positivity: return "positivity";
    case MetricAxiom::Triangle: return "triangle";
  }
  return "none";
}

MetricCheck validate_metric(const MetricSpace& space) {
  const int n = space.size();
  detail::require(space.dist.rows() == n && space.dist.cols() == n,
                  "metric: distance matrix shape does not match point count");

  MetricCheck check;
  auto fail = [&](MetricAxiom axiom, int i, int j, int k, const std::string& msg) {
    check.ok = false;
    check.violated = axiom;
    check.witness = {i, j, k};
    check.message = msg;
  };

  for (int i = 0; i < n; ++i) {
    if (space.dist(i, i) != 0.0) {
      std::ostringstream os;
      os << "dist(" << i << "," << i << ") = " << space.dist(i, i) << " != 0";
      fail(MetricAxiom::ZeroDiagonal, i, -1, -1, os.str());
      return check;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (space.dist(i, j) != space.dist(j, i)) {
        fail(MetricAxiom::Symmetry, i, j, -1, "dist not symmetric");
        return check;
      }
      if (!(space.dist(i, j) > 0.0)) {
        std::ostringstream os;
        os << "dist(" << i << "," << j << ") = " << space.dist(i, j)
           << " not positive for distinct points";
        fail(MetricAxiom::Positivity, i, j, -1, os.str());
        return check;
      }
    }
  }
  // Slack absorbs the rounding of distances that satisfy the inequality
  // exactly in the reals (e.g. collinear |u-v| differences).
  const double scale = space.dist.size() > 0 ? space.dist.maxCoeff() : 0.0;
  const double slack = 1e-12 * std::max(1.0, scale);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (space.dist(i, k) > space.dist(i, j) + space.dist(j, k) + slack) {
          std::ostringstream os;
          os << "dist(" << i << "," << k << ") > dist(" << i << "," << j
             << ") + dist(" << j << "," << k << ")";
          fail(MetricAxiom::Triangle, i, j, k, os.str());
          return check;
        }
      }
    }
  }
  return check;
}

double dist_to_set(const MetricSpace& space, int k, const IndexSet& L) {
  detail::require(!L.empty(), "dist_to_set: empty target set");
  detail::require(k >= 0 && k < space.size(), "dist_to_set: point index out of range");
  double best = kInf;
  for (int l : L) {
    detail::require(l >= 0 && l < space.size(), "dist_to_set: set index out of range");
    best = std::min(best, space.dist(k, l));
  }
  return best;
}

IndexSet Compactification::boundary() const {
  std::set<int> in(interior.begin(), interior.end());
  IndexSet out;
  for (int i = 0; i < size(); ++i) {
    if (!in.count(i)) out.push_back(i);
  }
  return out;
}

void validate_compactification(const Compactification& comp) {
  detail::require(!comp.interior.empty(), "compactification: empty interior");
  const int n = comp.size();
  std::set<int> in;
  for (int i : comp.interior) {
    detail::require(i >= 0 && i < n, "compactification: interior index out of range");
    in.insert(i);
  }
  std::set<int> covered;
  for (const auto& L : comp.boundary_sets) {
    for (int l : L) {
      detail::require(l >= 0 && l < n, "compactification: boundary index out of range");
      detail::require(!in.count(l), "compactification: boundary set meets interior");
      covered.insert(l);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!in.count(i)) {
      detail::require(covered.count(i) > 0,
                      "compactification: boundary sets do not cover K minus X");
    }
  }
}

Vector cutoff_phi(const Compactification& comp, int n) {
  detail::require(n >= 0 && n < static_cast<int>(comp.boundary_sets.size()),
                  "cutoff_phi: boundary set index out of range");
  const IndexSet& L = comp.boundary_sets[static_cast<std::size_t>(n)];
  detail::require(!L.empty(), "cutoff_phi: empty boundary set");
  Vector phi(comp.size());
  for (int k = 0; k < comp.size(); ++k) {
    phi[k] = std::max(1.0 - dist_to_set(comp.space, k, L), 0.0);
  }
  return phi;
}

TruncationRule truncation_rule_from_string(const std::string& name) {
  if (name == "harmonic-points") return TruncationRule::HarmonicPoints;
  if (name == "geometric-weights") return TruncationRule::GeometricWeights;
  if (name == "tail-indicator") return TruncationRule::TailIndicator;
  if (name == "single-point-indicator") return TruncationRule::SinglePointIndicator;
  if (name == "power-cutoff") return TruncationRule::PowerCutoff;
  if (name == "diverging-linear") return TruncationRule::DivergingLinear;
  throw std::invalid_argument("unknown truncation rule: " + name);
}

std::string to_string(TruncationRule rule) {
  switch (rule) {
    case TruncationRule::HarmonicPoints: return "harmonic-points";
    case TruncationRule::GeometricWeights: return "geometric-weights";
    case TruncationRule::TailIndicator: return "tail-indicator";
    case TruncationRule::SinglePointIndicator: return "single-point-indicator";
    case TruncationRule::PowerCutoff: return "power-cutoff";
    case TruncationRule::DivergingLinear: return "diverging-linear";
  }
  throw std::invalid_argument("unknown truncation rule");
}

Compactification instantiate(const TruncationFamily&, int level) {
  detail::require(level >= 1, "instantiate: level must be >= 1");
  // All rules share the harmonic geometry; the rule only selects generators.
  Compactification comp;
  const int n = level + 1;  // interior points plus the boundary point 0
  comp.space.points.reserve(static_cast<std::size_t>(n));
  std::vector<double> coords(static_cast<std::size_t>(n));
  for (int k = 1; k <= level; ++k) {
    coords[static_cast<std::size_t>(k - 1)] = 1.0 / k;
    comp.space.points.push_back(k == 1 ? "1" : "1/" + std::to_string(k));
  }
  coords[static_cast<std::size_t>(level)] = 0.0;
  comp.space.points.push_back("0");

  comp.space.dist = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      comp.space.dist(i, j) = std::abs(coords[static_cast<std::size_t>(i)] -
                                       coords[static_cast<std::size_t>(j)]);
    }
  }
  comp.interior.resize(static_cast<std::size_t>(level));
  for (int k = 0; k < level; ++k) comp.interior[static_cast<std::size_t>(k)] = k;
  comp.boundary_sets = {{level}};
  return comp;
}

Compactification instantiate(const TruncationFamily& family) {
  return instantiate(family, family.level);
}

FamilyInstance make_instance(const TruncationFamily& family, int level) {
  FamilyInstance inst;
  inst.family = family;
  inst.family.level = level;
  inst.comp = instantiate(family, level);
  return inst;
}

Vector geometric_log_weights(int n, double ratio) {
  detail::require(n >= 1, "geometric_log_weights: need at least one point");
  detail::require(ratio > 0.0 && ratio < 1.0, "geometric_log_weights: ratio in (0,1)");
  Vector lw(n);
  const double lr = std::log(ratio);
  for (int k = 0; k < n; ++k) lw[k] = lr * (k + 1);
  lw.array() -= log_sum_exp(lw);
  return lw;
}

}  // namespace cbx

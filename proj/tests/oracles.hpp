// Test-only oracles: independent brute-force routes for the quantities the
// library computes by smarter means. Everything here is plain loops on
// purpose; do not fold these into the implementation.
#pragma once

#include <cmath>
#include <vector>

#include "cbx/common.hpp"
#include "cbx/space.hpp"

namespace cbx::oracle {

// Four metric axioms by full triple enumeration, no slack.
inline bool metric_axioms_hold(const Matrix& d) {
  const int n = static_cast<int>(d.rows());
  if (d.cols() != n) return false;
  for (int i = 0; i < n; ++i) {
    if (d(i, i) != 0.0) return false;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (d(i, j) != d(j, i)) return false;
      if (i != j && !(d(i, j) > 0.0)) return false;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        if (d(i, k) > d(i, j) + d(j, k) + 1e-12) return false;
      }
    }
  }
  return true;
}

// Direct min over the interior of f(y) + n d(x, y).
inline double brute_envelope_at(const Compactification& comp, const Vector& f_on_X,
                                double n, int x) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < comp.interior.size(); ++j) {
    const int y = comp.interior[j];
    const double v = f_on_X[static_cast<Eigen::Index>(j)] + n * comp.space.dist(x, y);
    if (v < best) best = v;
  }
  return best;
}

// Pairwise Lipschitz constant of f over the interior by enumeration.
inline double brute_interior_lipschitz(const Compactification& comp,
                                       const Vector& f_on_X) {
  double lip = 0.0;
  for (std::size_t a = 0; a < comp.interior.size(); ++a) {
    for (std::size_t b = 0; b < comp.interior.size(); ++b) {
      if (a == b) continue;
      const double d = comp.space.dist(comp.interior[a], comp.interior[b]);
      if (d > 0.0) {
        lip = std::max(lip, std::abs(f_on_X[static_cast<Eigen::Index>(a)] -
                                     f_on_X[static_cast<Eigen::Index>(b)]) / d);
      }
    }
  }
  return lip;
}

// Relative entropy by direct summation over positive coordinates.
inline double brute_kl(const Vector& mu, const Vector& p) {
  double kl = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu[i] > 0.0) kl += mu[i] * (std::log(mu[i]) - std::log(p[i]));
  }
  return kl;
}

// Max of t = mu(tail) subject to the binary relative-entropy bound; exact
// for indicator tails because conditional shapes follow the reference. Works
// from log(q) so extreme tails stay representable.
inline double brute_max_tail_mass(double log_q, double m) {
  auto kl = [&](double t) {
    double a = t > 0.0 ? t * (std::log(t) - log_q) : 0.0;
    double b = t < 1.0 ? (1.0 - t) * (std::log1p(-t) - std::log1p(-std::exp(log_q)))
                       : 0.0;
    return a + b;
  };
  double lo = std::exp(log_q) < 1.0 ? std::exp(log_q) : 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kl(mid) <= m ? lo : hi) = mid;
  }
  return lo;
}

// Random metric space from points embedded in the plane: the triangle
// inequality holds by construction; a minimum separation keeps Lipschitz
// constants of bounded functions tame.
inline MetricSpace random_planar_space(Rng& rng, int n, double min_sep = 0.5) {
  std::vector<double> xs, ys;
  while (static_cast<int>(xs.size()) < n) {
    const double x = rng.uniform(0.0, 4.0);
    const double y = rng.uniform(0.0, 4.0);
    bool ok = true;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double dx = xs[i] - x;
      const double dy = ys[i] - y;
      if (std::sqrt(dx * dx + dy * dy) < min_sep) ok = false;
    }
    if (ok) {
      xs.push_back(x);
      ys.push_back(y);
    }
  }
  MetricSpace sp;
  sp.dist = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    sp.points.push_back("p" + std::to_string(i));
    for (int j = 0; j < n; ++j) {
      const double dx = xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)];
      const double dy = ys[static_cast<std::size_t>(i)] - ys[static_cast<std::size_t>(j)];
      sp.dist(i, j) = std::sqrt(dx * dx + dy * dy);
    }
  }
  return sp;
}

// Random compactification: planar space with the last `nb` points declared
// boundary, split into singleton boundary sets.
inline Compactification random_planar_compactification(Rng& rng, int n, int nb) {
  Compactification comp;
  comp.space = random_planar_space(rng, n);
  for (int i = 0; i < n - nb; ++i) comp.interior.push_back(i);
  for (int i = n - nb; i < n; ++i) comp.boundary_sets.push_back({i});
  return comp;
}

}  // namespace cbx::oracle

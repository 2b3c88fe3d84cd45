#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbx {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexSet = std::vector<int>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace detail

/// Overflow-safe log(sum exp(a_k)). Entries equal to -inf are ignored;
/// returns -inf when all entries are.
inline double log_sum_exp(const Eigen::Ref<const Vector>& a) {
  const double m = a.maxCoeff();
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != -kInf) s += std::exp(a[i] - m);
  }
  return m + std::log(s);
}

/// exp(a_i) / sum_j exp(a_j), a probability vector even for badly scaled a.
/// Normalizes by the computed sum rather than exp(a - lse): at large shifts
/// the lse's absolute rounding would leak into every coordinate.
inline Vector softmax(const Eigen::Ref<const Vector>& a) {
  const double m = a.maxCoeff();
  Vector out = Vector::Zero(a.size());
  if (m == -kInf) return out;
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != -kInf) {
      out[i] = std::exp(a[i] - m);
      s += out[i];
    }
  }
  out /= s;
  return out;
}

// Deterministic splitmix64 stream; identical output on every platform for a
// given seed, unlike the std:: distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  Vector uniform_vector(Eigen::Index n, double a, double b) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(a, b);
    return v;
  }

 private:
  std::uint64_t state_;
};

/// Sweep verdict rule: the final value is at most tol and the trajectory is
/// nonincreasing over its last three points (within noise slack).
inline bool decays_below(const std::vector<double>& traj, double tol,
                         double slack = 1e-12) {
  if (traj.empty()) return false;
  if (traj.back() > tol) return false;
  const std::size_t n = traj.size();
  const std::size_t from = n >= 3 ? n - 3 : 0;
  for (std::size_t i = from; i + 1 < n; ++i) {
    if (traj[i + 1] > traj[i] + slack) return false;
  }
  return true;
}

/// Nonincreasing within slack over the whole trajectory.
inline bool nonincreasing(const std::vector<double>& traj, double slack = 1e-12) {
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    if (traj[i + 1] > traj[i] + slack) return false;
  }
  return true;
}

}  // namespace cbx

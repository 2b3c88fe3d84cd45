#include "cbx/envelope.hpp"

#include <algorithm>
#include <cmath>

namespace cbx {

EnvelopeResult lipschitz_envelope(const Compactification& comp, const Vector& f_on_X,
                                  double n) {
  detail::require(!comp.interior.empty(), "lipschitz_envelope: empty interior");
  detail::require(n > 0.0, "lipschitz_envelope: parameter must be positive");
  detail::require(f_on_X.size() == comp.interior_size(),
                  "lipschitz_envelope: f must live on the interior");

  const int K = comp.size();
  EnvelopeResult res;
  res.n = n;
  res.g.resize(K);
  for (int x = 0; x < K; ++x) {
    double best = kInf;
    for (int j = 0; j < comp.interior_size(); ++j) {
      const int y = comp.interior[static_cast<std::size_t>(j)];
      best = std::min(best, f_on_X[j] + n * comp.space.dist(x, y));
    }
    res.g[x] = best;
  }

  double lip = 0.0;
  for (int a = 0; a < K; ++a) {
    for (int b = a + 1; b < K; ++b) {
      const double d = comp.space.dist(a, b);
      if (d > 0.0) lip = std::max(lip, std::abs(res.g[a] - res.g[b]) / d);
    }
  }
  res.lipschitz_certificate = lip;
  return res;
}

EnvelopeSweep envelope_sequence(const Compactification& comp, const Vector& f_on_X,
                                const std::vector<double>& n_list) {
  detail::require(!n_list.empty(), "envelope_sequence: empty parameter list");
  for (std::size_t i = 0; i + 1 < n_list.size(); ++i) {
    detail::require(n_list[i] < n_list[i + 1],
                    "envelope_sequence: parameters must be strictly increasing");
  }
  EnvelopeSweep sweep;
  sweep.n_values = n_list;
  std::vector<Vector> terms;
  terms.reserve(n_list.size());
  for (double n : n_list) {
    EnvelopeResult r = lipschitz_envelope(comp, f_on_X, n);
    sweep.gaps_on_X.push_back(f_on_X - restrict_to(r.g, comp.interior));
    terms.push_back(std::move(r.g));
  }
  // Monotone up, so extreme values live in the first and last terms.
  const double bound = std::max(sup_norm(terms.front()), sup_norm(terms.back()));
  sweep.seq = make_sequence(SeqKind::EnvelopeSequence, SeqDirection::Up,
                            std::move(terms), bound);
  return sweep;
}

double lipschitz_constant(const MetricSpace& space, const Vector& f,
                          const IndexSet& indices) {
  double lip = 0.0;
  for (std::size_t a = 0; a < indices.size(); ++a) {
    for (std::size_t b = a + 1; b < indices.size(); ++b) {
      const int i = indices[a];
      const int j = indices[b];
      const double d = space.dist(i, j);
      if (d > 0.0) {
        lip = std::max(lip, std::abs(f[static_cast<Eigen::Index>(a)] -
                                     f[static_cast<Eigen::Index>(b)]) / d);
      }
    }
  }
  return lip;
}

}  // namespace cbx

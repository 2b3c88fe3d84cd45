#include "cbx/funcspace.hpp"

#include <cmath>

namespace cbx {

double total_mass(const Vector& mu) { return mu.sum(); }

IndexSet support(const Vector& mu) {
  IndexSet s;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu[i] != 0.0) s.push_back(static_cast<int>(i));
  }
  return s;
}

std::string to_string(SeqKind kind) {
  switch (kind) {
    case SeqKind::BoundaryPower: return "boundary-power";
    case SeqKind::CutoffProduct: return "cutoff-product";
    case SeqKind::TailIndicator: return "tail-indicator";
    case SeqKind::SinglePointIndicator: return "single-point-indicator";
    case SeqKind::EnvelopeSequence: return "envelope-sequence";
    case SeqKind::UserList: return "user-list";
  }
  return "user-list";
}

std::string to_string(SeqDirection dir) {
  switch (dir) {
    case SeqDirection::Up: return "up";
    case SeqDirection::Down: return "down";
    case SeqDirection::None: return "none";
  }
  return "none";
}

FuncSequence make_sequence(SeqKind kind, SeqDirection direction,
                           std::vector<Vector> terms, double bound,
                           const IndexSet& on) {
  detail::require(!terms.empty(), "sequence: no terms");
  const Eigen::Index dim = terms.front().size();
  for (const Vector& t : terms) {
    detail::require(t.size() == dim, "sequence: term sizes differ");
    detail::require(sup_norm(t) <= bound + 1e-12, "sequence: declared bound violated");
  }
  auto coord_ok = [&](const Vector& a, const Vector& b, Eigen::Index i) {
    return direction == SeqDirection::Up ? a[i] <= b[i] + 1e-12
                                         : b[i] <= a[i] + 1e-12;
  };
  if (direction != SeqDirection::None) {
    for (std::size_t t = 0; t + 1 < terms.size(); ++t) {
      if (on.empty()) {
        for (Eigen::Index i = 0; i < dim; ++i) {
          detail::require(coord_ok(terms[t], terms[t + 1], i),
                          "sequence: declared direction violated");
        }
      } else {
        for (int i : on) {
          detail::require(i >= 0 && i < dim, "sequence: check index out of range");
          detail::require(coord_ok(terms[t], terms[t + 1], i),
                          "sequence: declared direction violated");
        }
      }
    }
  }
  FuncSequence seq;
  seq.kind = kind;
  seq.direction = direction;
  seq.terms = std::move(terms);
  seq.bound = bound;
  return seq;
}

FuncSequence boundary_power_sequence(const Compactification& comp, int n,
                                     const Vector& base_on_K, double k, int M) {
  detail::require(base_on_K.size() == comp.size(),
                  "boundary_power_sequence: base must live on K");
  detail::require(M >= 1, "boundary_power_sequence: need at least one term");
  const Vector phi = cutoff_phi(comp, n);
  std::vector<Vector> terms;
  terms.reserve(static_cast<std::size_t>(M));
  Vector pow_m = phi;
  for (int m = 1; m <= M; ++m) {
    terms.push_back(base_on_K - k * pow_m);
    pow_m.array() *= phi.array();
  }
  const double bound = sup_norm(base_on_K) + std::abs(k);
  // Nondecreasing on all of K: phi^m is nonincreasing in m everywhere.
  return make_sequence(SeqKind::BoundaryPower, SeqDirection::Up, std::move(terms),
                       bound);
}

FuncSequence cutoff_product_sequence(const std::vector<Vector>& cutoffs, int N) {
  detail::require(!cutoffs.empty(), "cutoff_product_sequence: no cutoffs");
  detail::require(N >= 1, "cutoff_product_sequence: need at least one term");
  const Eigen::Index dim = cutoffs.front().size();
  for (const Vector& phi : cutoffs) {
    detail::require(phi.size() == dim, "cutoff_product_sequence: cutoff sizes differ");
    detail::require((phi.array() >= 0.0).all() && (phi.array() <= 1.0).all(),
                    "cutoff_product_sequence: cutoffs must lie in [0,1]");
  }
  std::vector<Vector> terms;
  terms.reserve(static_cast<std::size_t>(N));
  for (int n = 1; n <= N; ++n) {
    Vector prod = Vector::Ones(dim);
    const int used = std::min<int>(n, static_cast<int>(cutoffs.size()));
    for (int j = 0; j < used; ++j) {
      prod.array() *= cutoffs[static_cast<std::size_t>(j)].array().pow(double(n));
    }
    terms.push_back(std::move(prod));
  }
  return make_sequence(SeqKind::CutoffProduct, SeqDirection::Down, std::move(terms),
                       1.0);
}

namespace {

void require_harmonic(const FamilyInstance& inst, const char* who) {
  detail::require(inst.level() >= 1 && inst.comp.interior_size() == inst.level(),
                  std::string(who) + ": malformed family instance");
}

}  // namespace

Vector tail_indicator(const FamilyInstance& inst, int n) {
  require_harmonic(inst, "tail_indicator");
  detail::require(n >= 1 && n <= inst.level(), "tail_indicator: cut index out of range");
  Vector h = Vector::Zero(inst.level());
  for (int k = n; k <= inst.level(); ++k) h[k - 1] = 1.0;
  return h;
}

FuncSequence tail_indicator_sequence(const FamilyInstance& inst) {
  std::vector<Vector> terms;
  terms.reserve(static_cast<std::size_t>(inst.level()));
  for (int n = 1; n <= inst.level(); ++n) terms.push_back(tail_indicator(inst, n));
  return make_sequence(SeqKind::TailIndicator, SeqDirection::Down, std::move(terms),
                       1.0);
}

Vector single_point_indicator(const FamilyInstance& inst, int n) {
  require_harmonic(inst, "single_point_indicator");
  detail::require(n >= 1 && n <= inst.level(),
                  "single_point_indicator: point index out of range");
  Vector h = Vector::Zero(inst.level());
  h[n - 1] = 1.0;
  return h;
}

FuncSequence single_point_indicator_sequence(const FamilyInstance& inst) {
  std::vector<Vector> terms;
  terms.reserve(static_cast<std::size_t>(inst.level()));
  for (int n = 1; n <= inst.level(); ++n) {
    terms.push_back(single_point_indicator(inst, n));
  }
  return make_sequence(SeqKind::SinglePointIndicator, SeqDirection::None,
                       std::move(terms), 1.0);
}

Vector diverging_linear(const FamilyInstance& inst) {
  require_harmonic(inst, "diverging_linear");
  Vector f(inst.level());
  for (int k = 1; k <= inst.level(); ++k) f[k - 1] = static_cast<double>(k);
  return f;
}

FuncSequence power_cutoff_sequence(const FamilyInstance& inst, int M) {
  require_harmonic(inst, "power_cutoff_sequence");
  detail::require(M >= 1, "power_cutoff_sequence: need at least one term");
  const Vector phi_on_K = cutoff_phi(inst.comp, 0);
  const Vector phi = restrict_to(phi_on_K, inst.comp.interior);
  std::vector<Vector> terms;
  terms.reserve(static_cast<std::size_t>(M));
  Vector pow_m = phi;
  for (int m = 1; m <= M; ++m) {
    terms.push_back(pow_m);
    pow_m.array() *= phi.array();
  }
  return make_sequence(SeqKind::CutoffProduct, SeqDirection::Down, std::move(terms),
                       1.0);
}

Vector restrict_to(const Vector& f_on_K, const IndexSet& indices) {
  Vector out(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int idx = indices[i];
    detail::require(idx >= 0 && idx < f_on_K.size(), "restrict_to: index out of range");
    out[static_cast<Eigen::Index>(i)] = f_on_K[idx];
  }
  return out;
}

}  // namespace cbx

#include "cbx/functionals.hpp"

#include <cmath>
#include <sstream>

namespace cbx {

namespace {

constexpr double kMassTol = 1e-9;

}  // namespace

// ---------------------------------------------------------------------------
// SupFunctional

SupFunctional::SupFunctional(Eigen::Index dim, std::string kind)
    : dim_(dim), kind_(std::move(kind)) {
  detail::require(dim >= 1, "sup functional: empty domain");
}

int SupFunctional::argmax_index(const Vector& f) {
  int best = 0;
  for (Eigen::Index i = 1; i < f.size(); ++i) {
    if (f[i] > f[best]) best = static_cast<int>(i);
  }
  return best;
}

int SupFunctional::argmax_index(const Vector& f, const IndexSet& subset) {
  detail::require(!subset.empty(), "argmax: empty subset");
  int best = subset.front();
  for (int i : subset) {
    if (f[i] > f[best]) best = i;
  }
  return best;
}

Vector SupFunctional::subgradient(const Vector& f) const {
  Vector g = Vector::Zero(dim_);
  g[argmax_index(f)] = 1.0;
  return g;
}

std::optional<ClosedFormConjugate> SupFunctional::conjugate_closed_form(
    const Vector& mu) const {
  ClosedFormConjugate out;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu[i] < 0.0) {
      DivergenceWitness w;
      w.direction = Vector::Zero(mu.size());
      w.direction[i] = -1.0;
      out.divergence = w;
      return out;
    }
  }
  const double mass = mu.sum();
  if (std::abs(mass - 1.0) <= kMassTol) {
    out.value = 0.0;
    out.maximizer = Vector::Zero(mu.size());
    return out;
  }
  DivergenceWitness w;
  w.direction = Vector::Constant(mu.size(), mass > 1.0 ? 1.0 : -1.0);
  out.divergence = w;
  return out;
}

std::vector<Vector> SupFunctional::dual_candidates(const Vector& f,
                                                   const IndexSet& support) const {
  IndexSet sup = support;
  if (sup.empty()) {
    sup.resize(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i) sup[static_cast<std::size_t>(i)] = i;
  }
  Vector dirac = Vector::Zero(dim_);
  dirac[argmax_index(f, sup)] = 1.0;
  return {dirac};
}

// ---------------------------------------------------------------------------
// EntropicFunctional

EntropicFunctional EntropicFunctional::from_weights(const Vector& p) {
  detail::require(p.size() >= 1, "entropic: empty reference");
  detail::require((p.array() >= 0.0).all(), "entropic: negative reference weight");
  detail::require(std::abs(p.sum() - 1.0) <= 1e-9, "entropic: weights must sum to 1");
  Vector lp(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    lp[i] = p[i] > 0.0 ? std::log(p[i]) : -kInf;
  }
  lp.array() -= log_sum_exp(lp);
  return EntropicFunctional(std::move(lp));
}

EntropicFunctional EntropicFunctional::from_log_weights(const Vector& log_p) {
  detail::require(log_p.size() >= 1, "entropic: empty reference");
  Vector lp = log_p;
  const double lse = log_sum_exp(lp);
  detail::require(lse != -kInf, "entropic: all reference weights vanish");
  lp.array() -= lse;
  return EntropicFunctional(std::move(lp));
}

Vector EntropicFunctional::subgradient(const Vector& f) const {
  return softmax(log_p_ + f);
}

Vector EntropicFunctional::gibbs_measure(const Vector& f) const {
  return softmax(log_p_ + f);
}

double EntropicFunctional::relative_entropy(const Vector& mu) const {
  double kl = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu[i] == 0.0) continue;  // 0 log 0 = 0
    if (log_p_[i] == -kInf) return kInf;
    kl += mu[i] * (std::log(mu[i]) - log_p_[i]);
  }
  return kl;
}

std::optional<ClosedFormConjugate> EntropicFunctional::conjugate_closed_form(
    const Vector& mu) const {
  ClosedFormConjugate out;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu[i] < 0.0) {
      DivergenceWitness w;
      w.direction = Vector::Zero(mu.size());
      w.direction[i] = -1.0;
      out.divergence = w;
      return out;
    }
  }
  const double mass = mu.sum();
  if (std::abs(mass - 1.0) > kMassTol) {
    DivergenceWitness w;
    w.direction = Vector::Constant(mu.size(), mass > 1.0 ? 1.0 : -1.0);
    out.divergence = w;
    return out;
  }
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu[i] > 0.0 && log_p_[i] == -kInf) {
      DivergenceWitness w;
      w.direction = Vector::Zero(mu.size());
      w.direction[i] = 1.0;
      out.divergence = w;
      return out;
    }
  }
  out.value = relative_entropy(mu);
  // The sup is attained at log(mu/p) exactly when the supports agree.
  bool attained = true;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if ((mu[i] == 0.0) != (log_p_[i] == -kInf)) attained = false;
  }
  if (attained) {
    Vector fmax(mu.size());
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      fmax[i] = mu[i] > 0.0 ? std::log(mu[i]) - log_p_[i] : 0.0;
    }
    out.maximizer = fmax;
  }
  return out;
}

std::vector<Vector> EntropicFunctional::dual_candidates(
    const Vector& f, const IndexSet& support) const {
  Vector gibbs = gibbs_measure(f);
  if (!support.empty() &&
      static_cast<Eigen::Index>(support.size()) != gibbs.size()) {
    // Restrict and renormalize; only meaningful when some mass survives.
    Vector masked = Vector::Zero(gibbs.size());
    double mass = 0.0;
    for (int i : support) {
      masked[i] = gibbs[i];
      mass += gibbs[i];
    }
    if (mass <= 0.0) return {};
    masked /= mass;
    return {masked};
  }
  return {gibbs};
}

// ---------------------------------------------------------------------------
// PenaltyTableFunctional

PenaltyTableFunctional::PenaltyTableFunctional(std::vector<PenaltyEntry> entries)
    : entries_(std::move(entries)) {
  detail::require(!entries_.empty(), "penalty table: no entries");
  const Eigen::Index dim = entries_.front().mu.size();
  double min_alpha = kInf;
  for (const PenaltyEntry& e : entries_) {
    detail::require(e.mu.size() == dim, "penalty table: entry dimensions differ");
    detail::require((e.mu.array() >= 0.0).all(), "penalty table: negative measure");
    detail::require(e.alpha >= 0.0, "penalty table: negative penalty");
    min_alpha = std::min(min_alpha, e.alpha);
  }
  detail::require(min_alpha == 0.0,
                  "penalty table: some penalty must be zero so that F(0)=0");
}

double PenaltyTableFunctional::eval_impl(const Vector& f) const {
  double best = -kInf;
  for (const PenaltyEntry& e : entries_) {
    best = std::max(best, e.mu.dot(f) - e.alpha);
  }
  return best;
}

int PenaltyTableFunctional::active_entry(const Vector& f) const {
  int best = 0;
  double best_val = entries_.front().mu.dot(f) - entries_.front().alpha;
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    const double v = entries_[i].mu.dot(f) - entries_[i].alpha;
    if (v > best_val) {
      best_val = v;
      best = static_cast<int>(i);
    }
  }
  return best;
}

Vector PenaltyTableFunctional::subgradient(const Vector& f) const {
  return entries_[static_cast<std::size_t>(active_entry(f))].mu;
}

std::vector<Vector> PenaltyTableFunctional::dual_candidates(
    const Vector& f, const IndexSet& support) const {
  (void)f;
  std::vector<Vector> out;
  out.reserve(entries_.size());
  for (const PenaltyEntry& e : entries_) {
    if (!support.empty() &&
        static_cast<Eigen::Index>(support.size()) != e.mu.size()) {
      bool inside = true;
      std::vector<bool> allowed(static_cast<std::size_t>(e.mu.size()), false);
      for (int i : support) allowed[static_cast<std::size_t>(i)] = true;
      for (Eigen::Index i = 0; i < e.mu.size(); ++i) {
        if (e.mu[i] != 0.0 && !allowed[static_cast<std::size_t>(i)]) inside = false;
      }
      if (!inside) continue;
    }
    out.push_back(e.mu);
  }
  return out;
}

// ---------------------------------------------------------------------------
// LinearExpectationFunctional

LinearExpectationFunctional::LinearExpectationFunctional(Vector mu)
    : mu_(std::move(mu)) {
  detail::require(mu_.size() >= 1, "linear expectation: empty measure");
  detail::require((mu_.array() >= 0.0).all(),
                  "linear expectation: measure must be nonnegative");
}

std::optional<ClosedFormConjugate> LinearExpectationFunctional::conjugate_closed_form(
    const Vector& mu) const {
  ClosedFormConjugate out;
  if ((mu - mu_).cwiseAbs().maxCoeff() <= kMassTol) {
    out.value = 0.0;
    out.maximizer = Vector::Zero(mu.size());
    return out;
  }
  DivergenceWitness w;
  w.direction = mu - mu_;
  out.divergence = w;
  return out;
}

std::vector<Vector> LinearExpectationFunctional::dual_candidates(
    const Vector& f, const IndexSet& support) const {
  (void)f;
  (void)support;
  return {mu_};
}

// ---------------------------------------------------------------------------
// Property checks

PropertyReport check_properties(const Functional& F, int trials, std::uint64_t seed,
                                double tol) {
  detail::require(trials >= 1, "check_properties: need at least one trial");
  PropertyReport report;
  report.trials = trials;
  report.seed = seed;
  Rng rng(seed);
  const Eigen::Index dim = F.dim();

  {
    const double f0 = F(Vector::Zero(dim));
    report.normalized.pass = std::abs(f0) <= tol;
    if (!report.normalized.pass) {
      std::ostringstream os;
      os << "F(0) = " << f0;
      report.normalized.detail = os.str();
    }
  }

  double worst_nc = -kInf;
  for (int t = 0; t < trials; ++t) {
    const Vector f = rng.uniform_vector(dim, -2.0, 2.0);
    const Vector bump = rng.uniform_vector(dim, 0.0, 1.0);
    const Vector g = f + bump;
    if (report.monotone.pass && F(f) > F(g) + tol) {
      report.monotone.pass = false;
      report.monotone.detail = "F(f) > F(g) for f <= g";
      report.monotone.witness = {f, g};
    }

    const Vector h = rng.uniform_vector(dim, -2.0, 2.0);
    const double lambda = rng.uniform();
    const Vector mix = lambda * f + (1.0 - lambda) * h;
    if (report.convex.pass &&
        F(mix) > lambda * F(f) + (1.0 - lambda) * F(h) + tol) {
      report.convex.pass = false;
      report.convex.detail = "convexity inequality violated";
      report.convex.witness = {f, h, Vector::Constant(1, lambda)};
    }

    const double eps = rng.uniform(1e-3, 1.0);
    Vector delta = rng.uniform_vector(dim, -eps, eps);
    const Vector g2 = f + delta;
    const Vector f_plus = (f.array() + eps).matrix();
    const Vector f_minus = (f.array() - eps).matrix();
    const double lhs = std::abs(F(f) - F(g2));
    const double rhs = F(f_plus) - F(f_minus);
    worst_nc = std::max(worst_nc, lhs - rhs);
    if (report.norm_continuity.pass && lhs > rhs + tol) {
      report.norm_continuity.pass = false;
      report.norm_continuity.detail = "norm-continuity chain violated";
      report.norm_continuity.witness = {f, g2, Vector::Constant(1, eps)};
    }
  }
  report.norm_continuity_certificate = worst_nc;
  return report;
}

}  // namespace cbx

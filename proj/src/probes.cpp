#include "cbx/probes.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace cbx {

namespace {

std::vector<double> to_index(const std::vector<int>& levels) {
  std::vector<double> out;
  out.reserve(levels.size());
  for (int l : levels) out.push_back(static_cast<double>(l));
  return out;
}

std::vector<double> term_index(std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(i + 1);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Single-sequence probes

ProbeReport upward_probe(const Functional& F, const FuncSequence& seq,
                         const Vector& limit, double tol) {
  detail::require(seq.direction == SeqDirection::Up, "upward_probe: direction mismatch");
  ProbeReport rep;
  rep.probe = "upward";
  rep.tolerance = tol;
  rep.index = term_index(seq.terms.size());

  const double Flimit = F(limit);
  std::vector<double> values;
  bool monotone = true;
  for (const Vector& t : seq.terms) {
    values.push_back(F(t));
    rep.observed.push_back(Flimit - values.back());
    if (values.size() >= 2 && values[values.size() - 2] > values.back() + 1e-9) {
      monotone = false;
    }
  }
  rep.extra_series.emplace_back("F", values);
  rep.pass = monotone && decays_below(rep.observed, tol);
  rep.verdict = rep.pass ? "upward-continuous" : "not-upward-continuous";
  if (!monotone) rep.detail = "F values not nondecreasing along the up sequence";
  return rep;
}

ProbeReport downward_probe(const Functional& F, const FuncSequence& seq, double tol,
                           const std::vector<Vector>& sandwich_f) {
  detail::require(seq.direction == SeqDirection::Down,
                  "downward_probe: direction mismatch");
  ProbeReport rep;
  rep.probe = "downward";
  rep.tolerance = tol;
  rep.index = term_index(seq.terms.size());
  for (const Vector& h : seq.terms) rep.observed.push_back(F(h));

  // The inequality 0 <= F(f) - F(f-h) <= F(f+h) - F(f) links downward and
  // upward continuity; it is a theorem for monotone convex F, so any
  // violation is recorded as a witness.
  double worst = 0.0;
  bool sandwich_ok = true;
  for (const Vector& f : sandwich_f) {
    const double Ff = F(f);
    for (const Vector& h : seq.terms) {
      const double lo = Ff - F(f - h);
      const double hi = F(f + h) - Ff;
      worst = std::max({worst, -lo, lo - hi});
      if (lo < -1e-9 || lo > hi + 1e-9) {
        sandwich_ok = false;
        if (rep.witness.empty()) rep.witness = {f, h};
      }
    }
  }
  if (!sandwich_f.empty()) {
    rep.extra_series.emplace_back("sandwich_worst", std::vector<double>{worst});
  }
  const bool decays = decays_below(rep.observed, tol);
  rep.pass = decays && sandwich_ok;
  rep.verdict = decays ? "downward-continuous" : "not-downward-continuous";
  if (!sandwich_ok) {
    rep.verdict = "sandwich-violated";
    rep.detail = "the downward/upward sandwich inequality failed";
  }
  return rep;
}

ProbeReport fatou_probe(const Functional& F, const std::vector<Vector>& terms,
                        const Vector& limit, double bound, double tol) {
  detail::require(!terms.empty(), "fatou_probe: empty sequence");
  for (const Vector& t : terms) {
    detail::require(sup_norm(t) <= bound + 1e-12, "fatou_probe: declared bound violated");
  }
  ProbeReport rep;
  rep.probe = "fatou";
  rep.tolerance = tol;
  rep.index = term_index(terms.size());
  for (const Vector& t : terms) rep.observed.push_back(F(t));

  const double Flimit = F(limit);
  const std::size_t n = terms.size();
  const std::size_t from = n >= 3 ? n - 3 : 0;
  double trailing_min = kInf;
  for (std::size_t i = from; i < n; ++i) trailing_min = std::min(trailing_min, rep.observed[i]);
  rep.extra_series.emplace_back("F_limit", std::vector<double>{Flimit});
  rep.extra_series.emplace_back("margin", std::vector<double>{Flimit - trailing_min});
  rep.pass = Flimit <= trailing_min + tol;
  rep.verdict = rep.pass ? "fatou-holds" : "fatou-violated";
  return rep;
}

ProbeReport lebesgue_probe(const Functional& F, const std::vector<Vector>& terms,
                           double tol) {
  detail::require(!terms.empty(), "lebesgue_probe: empty sequence");
  ProbeReport rep;
  rep.probe = "lebesgue";
  rep.tolerance = tol;
  rep.index = term_index(terms.size());
  for (const Vector& t : terms) rep.observed.push_back(F(t));
  rep.pass = decays_below(rep.observed, tol);
  rep.verdict = rep.pass ? "has-lebesgue" : "fails-lebesgue";
  return rep;
}

// ---------------------------------------------------------------------------
// Truncation sweeps

ProbeReport downward_sweep(const SweepFunctional& subject, DownRule rule,
                           const SweepOptions& opts, int sandwich_samples) {
  ProbeReport rep;
  rep.probe = "downward";
  rep.inputs_digest = subject.label + " / " +
                      (rule == DownRule::TailIndicator ? "tail-indicator" : "power-cutoff");
  rep.tolerance = opts.tol;
  rep.index = to_index(opts.levels);

  bool sandwich_ok = true;
  Rng rng(opts.seed);
  for (int level : opts.levels) {
    const FamilyInstance inst = make_instance({}, level);
    const auto F = subject.make(inst);
    const FuncSequence seq = rule == DownRule::TailIndicator
                                 ? tail_indicator_sequence(inst)
                                 : power_cutoff_sequence(inst, level);
    std::vector<Vector> sandwich;
    for (int s = 0; s < sandwich_samples; ++s) {
      sandwich.push_back(rng.uniform_vector(F->dim(), -1.0, 1.0));
    }
    const ProbeReport level_rep = downward_probe(*F, seq, opts.tol, sandwich);
    rep.level_series.push_back(level_rep.observed);
    rep.observed.push_back(level_rep.observed.back());
    if (level_rep.verdict == "sandwich-violated") {
      sandwich_ok = false;
      rep.witness = level_rep.witness;
    }
  }
  const bool decays = decays_below(rep.observed, opts.tol);
  rep.pass = decays && sandwich_ok;
  rep.verdict = !sandwich_ok ? "sandwich-violated"
                             : (decays ? "downward-continuous" : "not-downward-continuous");
  return rep;
}

ProbeReport upward_envelope_sweep(const SweepFunctional& subject, const SweepFunc& f_rule,
                                  const SweepOptions& opts) {
  ProbeReport rep;
  rep.probe = "upward";
  rep.inputs_digest = subject.label + " / envelope of " + f_rule.label;
  rep.tolerance = opts.tol;
  rep.index = to_index(opts.levels);

  bool all_pass = true;
  for (int level : opts.levels) {
    const FamilyInstance inst = make_instance({}, level);
    const auto F = subject.make(inst);
    const Vector f = f_rule.make(inst);
    detail::require(!f_rule.on_K, "upward_envelope_sweep: f must live on X");
    const EnvelopeSweep env =
        envelope_sequence(inst.comp, f, {1.0, 2.0, 4.0, 8.0, 16.0, 32.0});
    std::vector<Vector> on_X;
    for (const Vector& g : env.seq.terms) {
      on_X.push_back(restrict_to(g, inst.comp.interior));
    }
    const FuncSequence seq = make_sequence(SeqKind::EnvelopeSequence, SeqDirection::Up,
                                           std::move(on_X), env.seq.bound);
    const ProbeReport level_rep = upward_probe(*F, seq, f, opts.tol);
    rep.level_series.push_back(level_rep.observed);
    rep.observed.push_back(level_rep.observed.back());
    all_pass = all_pass && level_rep.pass;
  }
  rep.pass = all_pass && decays_below(rep.observed, opts.tol);
  rep.verdict = rep.pass ? "upward-continuous" : "not-upward-continuous";
  return rep;
}

ProbeReport lebesgue_sweep(const SweepFunctional& subject, const SweepOptions& opts) {
  ProbeReport rep;
  rep.probe = "lebesgue";
  rep.inputs_digest = subject.label + " / single-point-indicator";
  rep.tolerance = opts.tol;
  rep.index = to_index(opts.levels);
  for (int level : opts.levels) {
    const FamilyInstance inst = make_instance({}, level);
    const auto F = subject.make(inst);
    const FuncSequence seq = single_point_indicator_sequence(inst);
    const ProbeReport level_rep = lebesgue_probe(*F, seq.terms, opts.tol);
    rep.level_series.push_back(level_rep.observed);
    rep.observed.push_back(level_rep.observed.back());
  }
  rep.pass = decays_below(rep.observed, opts.tol);
  rep.verdict = rep.pass ? "has-lebesgue" : "fails-lebesgue";
  return rep;
}

ProbeReport fatou_sweep(const SweepFunctional& subject, const SweepOptions& opts,
                        int sequences_per_level) {
  ProbeReport rep;
  rep.probe = "fatou";
  rep.inputs_digest = subject.label + " / decaying random perturbations";
  rep.tolerance = opts.tol;
  rep.index = to_index(opts.levels);
  Rng rng(opts.seed);
  bool all_pass = true;
  for (int level : opts.levels) {
    const FamilyInstance inst = make_instance({}, level);
    const auto F = subject.make(inst);
    double worst = -kInf;
    for (int s = 0; s < sequences_per_level; ++s) {
      const Vector limit = rng.uniform_vector(F->dim(), -1.5, 1.5);
      std::vector<Vector> terms;
      double scale = 2.0;
      for (int n = 0; n < 10; ++n) {
        scale *= 0.1;
        terms.push_back(limit + rng.uniform_vector(F->dim(), -scale, scale));
      }
      const ProbeReport pr =
          fatou_probe(*F, terms, limit, sup_norm(limit) + 2.0, opts.tol);
      all_pass = all_pass && pr.pass;
      for (const auto& [name, vals] : pr.extra_series) {
        if (name == "margin") worst = std::max(worst, vals.front());
      }
    }
    rep.observed.push_back(std::max(worst, 0.0));
  }
  rep.pass = all_pass;
  rep.verdict = all_pass ? "fatou-holds" : "fatou-violated";
  return rep;
}

// ---------------------------------------------------------------------------
// Tightness

TiltResult max_linear_under_kl(const Vector& log_p, const Vector& h, double m) {
  detail::require(m >= 0.0, "max_linear_under_kl: nonnegative sublevel height");
  detail::require(log_p.size() == h.size(), "max_linear_under_kl: size mismatch");

  auto eval = [&](double beta) {
    TiltResult r;
    r.beta = beta;
    const Vector lw = log_p + beta * h;
    r.maximizer = softmax(lw);
    r.value = r.maximizer.dot(h);
    r.kl = beta * r.value - log_sum_exp(lw);  // KL(mu_beta || p) along the tilt
    return r;
  };

  // KL is nondecreasing in beta; find a bracket, then bisect on KL = m.
  double hi = 1.0;
  TiltResult at_hi = eval(hi);
  while (at_hi.kl <= m && hi < 1e7) {
    hi *= 2.0;
    at_hi = eval(hi);
  }
  if (at_hi.kl <= m) return at_hi;  // constraint slack even at saturation
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (eval(mid).kl <= m ? lo : hi) = mid;
  }
  return eval(lo);
}

TightnessReport tightness_probe(const TightnessSubject& subject, double m,
                                const SweepOptions& opts) {
  TightnessReport rep;
  rep.m = m;
  rep.tolerance = opts.tol;
  rep.sequence = "tail-indicator";
  switch (subject.kind) {
    case TightnessSubject::Kind::EntropicGeometric:
      rep.family = "S_m of entropic, geometric reference (ratio " +
                   std::to_string(subject.ratio) + ")";
      break;
    case TightnessSubject::Kind::Sup:
      rep.family = "S_m of sup (all probability measures)";
      break;
    case TightnessSubject::Kind::ExplicitList:
      rep.family = "explicit list of " + std::to_string(subject.measures.size()) +
                   " measures";
      break;
  }
  if (m < 0.0) {
    rep.verdict = "inconclusive";
    rep.tight = false;
    rep.family += " (empty sublevel set)";
    return rep;
  }

  for (int level : opts.levels) {
    const FamilyInstance inst = make_instance({}, level);
    std::vector<double> sups;
    double tail_escape = 0.0;
    bool level_used = true;
    for (int n = 1; n <= level; ++n) {
      const Vector h = tail_indicator(inst, n);
      double sup_val = 0.0;
      switch (subject.kind) {
        case TightnessSubject::Kind::EntropicGeometric: {
          const Vector log_p = geometric_log_weights(level, subject.ratio);
          const TiltResult tilt = max_linear_under_kl(log_p, h, m);
          sup_val = tilt.value;
          if (n == level) tail_escape = tilt.maximizer.dot(h);
          break;
        }
        case TightnessSubject::Kind::Sup: {
          sup_val = h.maxCoeff();  // Dirac on any tail point
          if (n == level) tail_escape = sup_val;
          break;
        }
        case TightnessSubject::Kind::ExplicitList: {
          if (subject.measures.empty() ||
              subject.measures.front().size() != h.size()) {
            level_used = false;
            break;
          }
          double best = 0.0;
          for (const Vector& mu : subject.measures) {
            best = std::max(best, mu.dot(h));
          }
          sup_val = best;
          if (n == level) tail_escape = best;
          break;
        }
      }
      if (!level_used) break;
      sups.push_back(sup_val);
    }
    if (!level_used) continue;
    rep.levels.push_back(level);
    rep.final_per_level.push_back(sups.back());
    rep.per_term_sup.push_back(std::move(sups));
    rep.escape_mass.push_back(tail_escape);
  }

  if (rep.levels.empty()) {
    rep.verdict = "inconclusive";
    rep.tight = false;
    return rep;
  }
  bool per_level_decay = true;
  for (const auto& sups : rep.per_term_sup) {
    if (!nonincreasing(sups, 1e-9)) per_level_decay = false;
  }
  rep.tight = per_level_decay && decays_below(rep.final_per_level, opts.tol, 1e-9);
  rep.verdict = rep.tight ? "tight" : "not-tight";
  return rep;
}

// ---------------------------------------------------------------------------
// Attainment and escape

namespace {

double boundary_distance(const FamilyInstance& inst, int point_index) {
  return dist_to_set(inst.comp.space, point_index, inst.comp.boundary());
}

double escape_distance_of(const FamilyInstance& inst, const Vector& mu,
                          const IndexSet& coords) {
  const double mass = mu.sum();
  if (mass <= 0.0) return kInf;
  double acc = 0.0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    acc += mu[coords[i]] * boundary_distance(inst, coords[i]);
  }
  return acc / mass;
}

}  // namespace

AttainmentReport attainment_probe(const SweepFunctional& subject, const SweepFunc& f_rule,
                                  const SweepOptions& opts) {
  AttainmentReport rep;
  rep.functional = subject.label;
  rep.func = f_rule.label;
  rep.tolerance = opts.tol;

  for (int level : opts.levels) {
    const FamilyInstance inst = make_instance({}, level);
    const auto F = subject.make(inst);
    const Vector f = f_rule.make(inst);
    DualSearchOptions dopts;
    dopts.seed = opts.seed;
    dopts.multistarts = 6;
    dopts.outer_iters = 60;
    IndexSet coords;
    if (F->dim() == inst.comp.size() && inst.comp.interior_size() < inst.comp.size()) {
      dopts.support = inst.comp.interior;   // measures live on X only
      coords = inst.comp.interior;
    } else {
      coords.resize(static_cast<std::size_t>(F->dim()));
      for (int i = 0; i < F->dim(); ++i) coords[static_cast<std::size_t>(i)] = i;
    }
    const DualityReport dual = biconjugate(*F, f, dopts);

    AttainmentLevel lvl;
    lvl.level = level;
    lvl.gap = dual.gap;
    lvl.best_measure = dual.best_measure;
    lvl.escape_distance = escape_distance_of(inst, dual.best_measure, coords);
    int heaviest = coords.front();
    for (int i : coords) {
      if (dual.best_measure[i] > dual.best_measure[heaviest]) heaviest = i;
    }
    lvl.top_point = inst.comp.space.points[static_cast<std::size_t>(heaviest)];
    rep.per_level.push_back(std::move(lvl));
  }

  std::vector<double> gaps, escapes;
  for (const auto& l : rep.per_level) {
    gaps.push_back(std::abs(l.gap));
    escapes.push_back(l.escape_distance);
  }
  bool gaps_small = true;
  for (double g : gaps) gaps_small = gaps_small && g <= opts.tol;
  bool stable = true;
  const std::size_t n = rep.per_level.size();
  for (std::size_t i = n >= 3 ? n - 3 : 0; i + 1 < n; ++i) {
    if (rep.per_level[i].top_point != rep.per_level[i + 1].top_point) stable = false;
  }
  if (gaps_small && stable) {
    rep.verdict = "attained";
  } else if (nonincreasing(gaps, 1e-12) && nonincreasing(escapes, 1e-12) &&
             escapes.back() <= 0.5 * escapes.front() + 1e-12) {
    rep.verdict = "escaping";
  } else {
    rep.verdict = "inconclusive";
  }
  return rep;
}

EscapeSummary mass_escape(const std::vector<Vector>& optimizers,
                          const std::vector<FamilyInstance>& instances,
                          const std::vector<double>& deltas) {
  detail::require(optimizers.size() == instances.size(),
                  "mass_escape: one optimizer per instance");
  EscapeSummary out;
  out.deltas = deltas;
  for (std::size_t l = 0; l < optimizers.size(); ++l) {
    const FamilyInstance& inst = instances[l];
    const Vector& mu = optimizers[l];
    out.levels.push_back(inst.level());
    const bool on_K = mu.size() == inst.comp.size();
    IndexSet coords = on_K ? [&] {
      IndexSet all(static_cast<std::size_t>(inst.comp.size()));
      for (int i = 0; i < inst.comp.size(); ++i) all[static_cast<std::size_t>(i)] = i;
      return all;
    }()
                           : inst.comp.interior;
    const double mass = mu.sum();
    std::vector<double> row;
    for (double delta : deltas) {
      double near = 0.0;
      for (std::size_t i = 0; i < coords.size(); ++i) {
        if (boundary_distance(inst, coords[i]) <= delta) {
          near += mu[static_cast<Eigen::Index>(i)];
        }
      }
      row.push_back(mass > 0.0 ? near / mass : 0.0);
    }
    out.boundary_mass.push_back(std::move(row));
    out.escape_distance.push_back(escape_distance_of(inst, mu, coords));
  }
  // log-log least squares of escape distance against level
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t l = 0; l < out.levels.size(); ++l) {
    if (out.escape_distance[l] <= 0.0 || !std::isfinite(out.escape_distance[l])) continue;
    const double x = std::log(static_cast<double>(out.levels[l]));
    const double y = std::log(out.escape_distance[l]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2 && sxx * cnt - sx * sx > 0) {
    out.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Compact support / factorization

std::string to_string(TableRule rule) {
  switch (rule) {
    case TableRule::Prefix: return "prefix";
    case TableRule::Escaping: return "escaping";
    case TableRule::EmptyEffective: return "empty-effective";
  }
  return "prefix";
}

PenaltyTableFunctional make_rule_table(TableRule rule, const FamilyInstance& inst,
                                       int prefix) {
  const int n = inst.comp.interior_size();
  switch (rule) {
    case TableRule::Prefix: {
      const int p = std::min(prefix, n);
      Vector m1 = Vector::Zero(n), m2 = Vector::Zero(n), m3 = Vector::Zero(n);
      for (int k = 0; k < p; ++k) {
        m1[k] = std::pow(0.5, k);
        m3[k] = 0.2 + 0.1 * k;
      }
      m2[0] = 1.0;
      return PenaltyTableFunctional({{m1, 0.0}, {m2, 0.3}, {m3, 1.0}});
    }
    case TableRule::Escaping: {
      std::vector<PenaltyEntry> entries;
      for (int k = 0; k < n; ++k) {
        Vector dirac = Vector::Zero(n);
        dirac[k] = 1.0;
        entries.push_back({dirac, 0.0});
      }
      return PenaltyTableFunctional(std::move(entries));
    }
    case TableRule::EmptyEffective: {
      // Only the zero measure has finite penalty: F is identically zero.
      return PenaltyTableFunctional({{Vector::Zero(n), 0.0}});
    }
  }
  throw std::invalid_argument("unknown table rule");
}

ProbeReport compact_support_probe(TableRule rule, const SweepOptions& opts, int trials,
                                  int prefix) {
  ProbeReport rep;
  rep.probe = "factorization";
  rep.inputs_digest = "penalty-table rule " + to_string(rule);
  rep.tolerance = opts.tol;
  rep.index = to_index(opts.levels);

  // First pass: union of supports of finite-penalty measures per level.
  bool contained_everywhere = true;
  for (int level : opts.levels) {
    const FamilyInstance inst = make_instance({}, level);
    const PenaltyTableFunctional F = make_rule_table(rule, inst, prefix);
    std::set<int> union_support;
    for (const PenaltyEntry& e : F.entries()) {
      for (int i : support(e.mu)) union_support.insert(i);
    }
    for (int i : union_support) {
      if (i >= prefix) contained_everywhere = false;
    }
  }

  Rng rng(opts.seed);
  if (contained_everywhere) {
    // Factorization: F must not see anything off the prefix, exactly.
    for (int level : opts.levels) {
      const FamilyInstance inst = make_instance({}, level);
      const PenaltyTableFunctional F = make_rule_table(rule, inst, prefix);
      double worst = 0.0;
      for (int t = 0; t < trials; ++t) {
        const Vector f = rng.uniform_vector(F.dim(), -2.0, 2.0);
        Vector g = f;
        for (Eigen::Index i = prefix; i < g.size(); ++i) {
          g[i] = rng.uniform(-100.0, 100.0);
        }
        worst = std::max(worst, std::abs(F(f) - F(g)));
      }
      rep.observed.push_back(worst);
    }
    bool exact = true;
    for (double w : rep.observed) exact = exact && w == 0.0;
    rep.pass = exact;
    rep.verdict = exact ? "factorized" : "not-factorized";
    rep.detail = "union of finite-penalty supports lies in the first " +
                 std::to_string(prefix) + " points";
    return rep;
  }

  // Escaping supports: build h = max_n a_n psi_n with
  // a_n mu_n(psi_n) - alpha_n = n; F(h) then exceeds every n.
  bool divergent = true;
  for (int level : opts.levels) {
    const FamilyInstance inst = make_instance({}, level);
    const PenaltyTableFunctional F = make_rule_table(rule, inst, prefix);
    const int n = inst.comp.interior_size();
    Vector h = Vector::Zero(n);
    for (int k = 0; k < n; ++k) {
      // psi_k = dist(., K ∖ B(x_k, eta_k)); with eta_k below the nearest
      // neighbor the ball is {x_k}, so psi_k is supported there alone.
      // Boundary points count as outside, which keeps level 1 nondegenerate.
      IndexSet outside;
      for (int j = 0; j < inst.comp.size(); ++j) {
        if (j != inst.comp.interior[static_cast<std::size_t>(k)]) outside.push_back(j);
      }
      Vector psi = Vector::Zero(n);
      for (int j = 0; j < n; ++j) {
        psi[j] = dist_to_set(inst.comp.space,
                             inst.comp.interior[static_cast<std::size_t>(j)], outside);
      }
      const PenaltyEntry& entry = F.entries()[static_cast<std::size_t>(k)];
      const double mu_psi = entry.mu.dot(psi);
      detail::require(mu_psi > 0.0, "compact_support_probe: psi misses the support");
      const double a = (static_cast<double>(k + 1) + entry.alpha) / mu_psi;
      h = h.cwiseMax(a * psi);
    }
    const double Fh = F(h);
    rep.observed.push_back(Fh);
    if (Fh < static_cast<double>(level) - 1e-9) divergent = false;
  }
  rep.pass = divergent;
  rep.verdict = divergent ? "divergent" : "not-divergent";
  rep.detail = "supports escape every prefix; F(h) grows past each level";
  return rep;
}

}  // namespace cbx

#include "cbx/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace cbx {

json num(double x) {
  if (std::isnan(x)) return "nan";
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  return x;
}

json to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(num(v[i]));
  return arr;
}

Vector vector_from_json(const json& j, const char* what) {
  detail::require(j.is_array(), std::string(what) + ": expected a JSON array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& x : j) {
    detail::require(x.is_number(), std::string(what) + ": expected numeric entries");
    v[i++] = x.get<double>();
  }
  return v;
}

Compactification compactification_from_json(const json& j) {
  detail::require(j.is_object(), "space: expected a JSON object");
  if (j.contains("family")) {
    TruncationFamily family;
    family.rule = truncation_rule_from_string(j.at("family").get<std::string>());
    family.level = j.value("level", 1);
    family.ratio = j.value("ratio", 0.5);
    return instantiate(family, family.level);
  }
  detail::require(j.contains("points") && j.contains("dist"),
                  "space: need \"points\" and \"dist\" (or a \"family\")");
  Compactification comp;
  for (const auto& p : j.at("points")) {
    comp.space.points.push_back(p.is_string() ? p.get<std::string>() : p.dump());
  }
  const auto& dist = j.at("dist");
  const int n = static_cast<int>(comp.space.points.size());
  detail::require(dist.is_array() && static_cast<int>(dist.size()) == n,
                  "space: dist must be an n-by-n array");
  comp.space.dist = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& row = dist.at(static_cast<std::size_t>(i));
    detail::require(row.is_array() && static_cast<int>(row.size()) == n,
                    "space: dist must be an n-by-n array");
    for (int k = 0; k < n; ++k) {
      comp.space.dist(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
  }
  if (j.contains("interior")) {
    for (const auto& i : j.at("interior")) comp.interior.push_back(i.get<int>());
  } else {
    for (int i = 0; i < n; ++i) comp.interior.push_back(i);
  }
  if (j.contains("boundary_sets")) {
    for (const auto& set : j.at("boundary_sets")) {
      IndexSet L;
      for (const auto& i : set) L.push_back(i.get<int>());
      comp.boundary_sets.push_back(std::move(L));
    }
  }
  const MetricCheck check = validate_metric(comp.space);
  detail::require(check.ok, "space: metric axioms violated: " + check.message);
  validate_compactification(comp);
  return comp;
}

json to_json(const Compactification& comp) {
  json j;
  j["points"] = comp.space.points;
  json dist = json::array();
  for (int i = 0; i < comp.size(); ++i) {
    json row = json::array();
    for (int k = 0; k < comp.size(); ++k) row.push_back(num(comp.space.dist(i, k)));
    dist.push_back(std::move(row));
  }
  j["dist"] = std::move(dist);
  j["interior"] = comp.interior;
  j["boundary_sets"] = comp.boundary_sets;
  return j;
}

std::unique_ptr<Functional> functional_from_json(const json& j,
                                                 const FamilyInstance& inst) {
  detail::require(j.is_object() && j.contains("kind"),
                  "functional: expected an object with a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  const int nx = inst.comp.interior_size();

  if (kind == "sup") {
    return std::make_unique<SupFunctional>(nx, "sup");
  }
  if (kind == "max-over-compactification") {
    return std::make_unique<SupFunctional>(inst.comp.size(), "max-over-compactification");
  }
  if (kind == "entropic") {
    if (j.contains("p")) {
      return std::make_unique<EntropicFunctional>(
          EntropicFunctional::from_weights(vector_from_json(j.at("p"), "entropic p")));
    }
    if (j.contains("log_p")) {
      return std::make_unique<EntropicFunctional>(EntropicFunctional::from_log_weights(
          vector_from_json(j.at("log_p"), "entropic log_p")));
    }
    const std::string rule = j.value("rule", "uniform");
    if (rule == "uniform") {
      return std::make_unique<EntropicFunctional>(
          EntropicFunctional::from_weights(Vector::Constant(nx, 1.0 / nx)));
    }
    if (rule == "geometric") {
      const double ratio = j.value("ratio", 0.5);
      return std::make_unique<EntropicFunctional>(
          EntropicFunctional::from_log_weights(geometric_log_weights(nx, ratio)));
    }
    throw std::invalid_argument("functional: unknown entropic rule: " + rule);
  }
  if (kind == "penalty-table") {
    if (j.contains("entries")) {
      std::vector<PenaltyEntry> entries;
      for (const auto& e : j.at("entries")) {
        entries.push_back({vector_from_json(e.at("mu"), "penalty-table mu"),
                           e.at("alpha").get<double>()});
      }
      return std::make_unique<PenaltyTableFunctional>(std::move(entries));
    }
    const std::string rule = j.value("rule", "");
    const int prefix = j.value("prefix", 3);
    if (rule == "prefix") {
      return std::make_unique<PenaltyTableFunctional>(
          make_rule_table(TableRule::Prefix, inst, prefix));
    }
    if (rule == "escaping") {
      return std::make_unique<PenaltyTableFunctional>(
          make_rule_table(TableRule::Escaping, inst, prefix));
    }
    if (rule == "empty-effective") {
      return std::make_unique<PenaltyTableFunctional>(
          make_rule_table(TableRule::EmptyEffective, inst, prefix));
    }
    throw std::invalid_argument("functional: penalty-table needs entries or a rule");
  }
  if (kind == "linear-expectation") {
    if (j.contains("mu")) {
      return std::make_unique<LinearExpectationFunctional>(
          vector_from_json(j.at("mu"), "linear-expectation mu"));
    }
    return std::make_unique<LinearExpectationFunctional>(Vector::Constant(nx, 1.0 / nx));
  }
  throw std::invalid_argument("functional: unknown kind: " + kind);
}

json to_json(const MetricCheck& check) {
  json j;
  j["ok"] = check.ok;
  j["violated"] = to_string(check.violated);
  j["witness"] = check.witness;
  j["message"] = check.message;
  return j;
}

json to_json(const ConjugateValue& cv) {
  json j;
  j["value"] = num(cv.value);
  j["infinite"] = cv.infinite();
  j["method"] = to_string(cv.method);
  if (cv.maximizer) j["maximizer_f"] = to_json(*cv.maximizer);
  json cert = json::array();
  for (const auto& [f, val] : cv.certificate) {
    cert.push_back({{"f", to_json(f)}, {"value", num(val)}});
  }
  j["certificate"] = std::move(cert);
  if (cv.divergence) {
    j["divergence_witness"] = {{"direction", to_json(cv.divergence->direction)},
                               {"scale", num(cv.divergence->scale)},
                               {"value", num(cv.divergence->value)}};
  }
  return j;
}

json to_json(const DualityReport& rep) {
  json j;
  j["f"] = to_json(rep.f);
  j["primal"] = num(rep.primal);
  j["dual"] = num(rep.dual);
  j["gap"] = num(rep.gap);
  j["best_measure"] = to_json(rep.best_measure);
  j["conjugate_at_best"] = num(rep.conjugate_at_best);
  j["epsilon_certified"] = num(rep.epsilon_certified);
  j["psi_bound"] = num(rep.psi_bound);
  j["psi_ok"] = rep.psi_ok;
  j["method"] = to_string(rep.method);
  return j;
}

json to_json(const SupportRecord& rec) {
  json j;
  j["requested_eps"] = num(rec.requested_eps);
  j["certified_eps"] = num(rec.certified_eps);
  j["certified"] = rec.certified;
  j["samples"] = rec.samples;
  j["worst_subgradient_margin"] = num(rec.worst_subgradient_margin);
  j["subgradient_ok"] = rec.subgradient_ok;
  j["mass_ok"] = rec.mass_ok;
  j["conjugate_ok"] = rec.conjugate_ok;
  j["psi_bound"] = num(rec.psi);
  return j;
}

json to_json(const SupportingMeasure& sm) {
  json j;
  j["mu"] = to_json(sm.mu);
  j["record"] = to_json(sm.record);
  return j;
}

json to_json(const RepresentationReport& rep) {
  json j;
  j["samples"] = rep.samples;
  j["range"] = num(rep.range);
  j["max_gap"] = num(rep.max_gap);
  j["mean_gap"] = num(rep.mean_gap);
  j["tolerance"] = num(rep.tol);
  j["pass"] = rep.pass;
  return j;
}

json to_json(const PropertyReport& rep) {
  auto check = [](const PropertyReport::Check& c) {
    json j;
    j["pass"] = c.pass;
    if (!c.detail.empty()) j["detail"] = c.detail;
    if (!c.witness.empty()) {
      json w = json::array();
      for (const Vector& v : c.witness) w.push_back(to_json(v));
      j["witness"] = std::move(w);
    }
    return j;
  };
  json j;
  j["monotone"] = check(rep.monotone);
  j["convex"] = check(rep.convex);
  j["normalized"] = check(rep.normalized);
  j["norm_continuity"] = check(rep.norm_continuity);
  j["norm_continuity_certificate"] = num(rep.norm_continuity_certificate);
  j["trials"] = rep.trials;
  j["seed"] = rep.seed;
  return j;
}

json to_json(const EnvelopeResult& res) {
  json j;
  j["g"] = to_json(res.g);
  j["n"] = num(res.n);
  j["lipschitz_certificate"] = num(res.lipschitz_certificate);
  return j;
}

json to_json(const ProbeReport& rep) {
  json j;
  j["probe"] = rep.probe;
  j["inputs"] = rep.inputs_digest;
  j["verdict"] = rep.verdict;
  j["pass"] = rep.pass;
  j["tolerance"] = num(rep.tolerance);
  json idx = json::array();
  for (double x : rep.index) idx.push_back(num(x));
  j["index"] = std::move(idx);
  json obs = json::array();
  for (double x : rep.observed) obs.push_back(num(x));
  j["observed"] = std::move(obs);
  if (!rep.level_series.empty()) {
    json ls = json::array();
    for (const auto& series : rep.level_series) {
      json s = json::array();
      for (double x : series) s.push_back(num(x));
      ls.push_back(std::move(s));
    }
    j["level_series"] = std::move(ls);
  }
  for (const auto& [name, series] : rep.extra_series) {
    json s = json::array();
    for (double x : series) s.push_back(num(x));
    j[name] = std::move(s);
  }
  if (!rep.witness.empty()) {
    json w = json::array();
    for (const Vector& v : rep.witness) w.push_back(to_json(v));
    j["witness"] = std::move(w);
  }
  if (!rep.detail.empty()) j["detail"] = rep.detail;
  return j;
}

json to_json(const TightnessReport& rep) {
  json j;
  j["family"] = rep.family;
  j["sequence"] = rep.sequence;
  j["m"] = num(rep.m);
  j["levels"] = rep.levels;
  json pts = json::array();
  for (const auto& sups : rep.per_term_sup) {
    json s = json::array();
    for (double x : sups) s.push_back(num(x));
    pts.push_back(std::move(s));
  }
  j["per_term_sup"] = std::move(pts);
  json fin = json::array();
  for (double x : rep.final_per_level) fin.push_back(num(x));
  j["final_per_level"] = std::move(fin);
  json esc = json::array();
  for (double x : rep.escape_mass) esc.push_back(num(x));
  j["escape_mass"] = std::move(esc);
  j["verdict"] = rep.verdict;
  j["tolerance"] = num(rep.tolerance);
  return j;
}

json to_json(const AttainmentReport& rep) {
  json j;
  j["functional"] = rep.functional;
  j["f"] = rep.func;
  json levels = json::array();
  for (const auto& l : rep.per_level) {
    levels.push_back({{"level", l.level},
                      {"gap", num(l.gap)},
                      {"escape_distance", num(l.escape_distance)},
                      {"top_point", l.top_point},
                      {"best_measure", to_json(l.best_measure)}});
  }
  j["per_level"] = std::move(levels);
  j["verdict"] = rep.verdict;
  j["tolerance"] = num(rep.tolerance);
  return j;
}

json to_json(const EscapeSummary& sum) {
  json j;
  j["levels"] = sum.levels;
  json deltas = json::array();
  for (double d : sum.deltas) deltas.push_back(num(d));
  j["deltas"] = std::move(deltas);
  json bm = json::array();
  for (const auto& row : sum.boundary_mass) {
    json r = json::array();
    for (double x : row) r.push_back(num(x));
    bm.push_back(std::move(r));
  }
  j["boundary_mass"] = std::move(bm);
  json esc = json::array();
  for (double x : sum.escape_distance) esc.push_back(num(x));
  j["escape_distance"] = std::move(esc);
  j["slope"] = num(sum.slope);
  return j;
}

namespace {

std::string format_value(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::string csv_from_series(const std::vector<double>& levels,
                            const std::vector<std::vector<double>>& per_level) {
  std::ostringstream os;
  os << "level,n,value\n";
  for (std::size_t l = 0; l < per_level.size(); ++l) {
    for (std::size_t n = 0; n < per_level[l].size(); ++n) {
      os << format_value(levels[l]) << "," << (n + 1) << ","
         << format_value(per_level[l][n]) << "\n";
    }
  }
  return os.str();
}

std::string csv_from_values(const std::vector<double>& levels,
                            const std::vector<double>& values) {
  std::ostringstream os;
  os << "level,n,value\n";
  for (std::size_t l = 0; l < values.size(); ++l) {
    os << format_value(levels[l]) << ",0," << format_value(values[l]) << "\n";
  }
  return os.str();
}

}  // namespace cbx

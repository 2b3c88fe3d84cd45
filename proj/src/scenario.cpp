#include "cbx/scenario.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

namespace cbx {

namespace {

const std::set<std::string> kProbeKinds = {
    "downward", "upward", "tightness", "attainment",
    "escape",   "lebesgue", "fatou",   "factorization"};

SweepFunctional sweep_functional(const json& spec) {
  SweepFunctional out;
  out.label = spec.value("name", spec.value("kind", "functional"));
  out.make = [spec](const FamilyInstance& inst) {
    return functional_from_json(spec, inst);
  };
  return out;
}

SweepFunc sweep_func(const std::string& rule, std::uint64_t seed) {
  SweepFunc out;
  out.label = rule;
  if (rule == "one-minus-inverse") {
    out.make = [](const FamilyInstance& inst) {
      Vector f(inst.level());
      for (int k = 1; k <= inst.level(); ++k) f[k - 1] = 1.0 - 1.0 / k;
      return f;
    };
    return out;
  }
  if (rule == "one-minus-inverse-K") {
    out.on_K = true;
    out.make = [](const FamilyInstance& inst) {
      Vector f(inst.comp.size());
      for (int k = 1; k <= inst.level(); ++k) f[k - 1] = 1.0 - 1.0 / k;
      f[inst.level()] = 1.0;  // continuous extension at the boundary point 0
      return f;
    };
    return out;
  }
  if (rule == "cosine") {
    out.make = [](const FamilyInstance& inst) {
      Vector f(inst.level());
      for (int k = 1; k <= inst.level(); ++k) f[k - 1] = std::cos(3.0 / k);
      return f;
    };
    return out;
  }
  if (rule == "random") {
    out.make = [seed](const FamilyInstance& inst) {
      Rng rng(seed + static_cast<std::uint64_t>(inst.level()));
      return rng.uniform_vector(inst.level(), -2.0, 2.0);
    };
    return out;
  }
  if (rule == "zero") {
    out.make = [](const FamilyInstance& inst) { return Vector::Zero(inst.level()); };
    return out;
  }
  throw std::invalid_argument("scenario: unknown f rule: " + rule);
}

TableRule table_rule_from_string(const std::string& name) {
  if (name == "prefix") return TableRule::Prefix;
  if (name == "escaping") return TableRule::Escaping;
  if (name == "empty-effective") return TableRule::EmptyEffective;
  throw std::invalid_argument("scenario: unknown table rule: " + name);
}

}  // namespace

ScenarioConfig scenario_from_json(const json& j) {
  detail::require(j.is_object(), "scenario: expected a JSON object");
  ScenarioConfig cfg;
  cfg.name = j.value("name", "scenario");
  detail::require(j.contains("seed") && j.at("seed").is_number(),
                  "scenario: a numeric \"seed\" is mandatory");
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.tolerance = j.value("tolerance", 1e-6);
  if (j.contains("levels")) {
    cfg.levels.clear();
    for (const auto& l : j.at("levels")) {
      const int level = l.get<int>();
      detail::require(level >= 1, "scenario: levels must be positive");
      cfg.levels.push_back(level);
    }
    detail::require(!cfg.levels.empty(), "scenario: empty level list");
  }
  if (j.contains("space")) {
    const auto& sp = j.at("space");
    detail::require(sp.is_object() && sp.contains("family") &&
                        sp.at("family").get<std::string>() == "harmonic-points",
                    "scenario: sweeps run on the harmonic-points family; "
                    "explicit spaces belong to the single-shot subcommands");
  }

  std::set<std::string> names;
  if (j.contains("functionals")) {
    for (const auto& spec : j.at("functionals")) {
      detail::require(spec.is_object() && spec.contains("kind"),
                      "scenario: functional entries need a \"kind\"");
      const std::string name = spec.value("name", spec.at("kind").get<std::string>());
      detail::require(!names.count(name),
                      "scenario: duplicate functional name: " + name);
      names.insert(name);
      // Validate the spec eagerly so schema errors surface before the run.
      const FamilyInstance probe_inst = make_instance({}, 2);
      functional_from_json(spec, probe_inst);
      cfg.functionals.push_back(spec);
    }
  }

  if (j.contains("probes")) {
    for (const auto& p : j.at("probes")) {
      detail::require(p.is_object() && p.contains("kind"),
                      "scenario: probe entries need a \"kind\"");
      ProbeSpec spec;
      spec.kind = p.at("kind").get<std::string>();
      detail::require(kProbeKinds.count(spec.kind) > 0,
                      "scenario: unknown probe kind: " + spec.kind);
      spec.functional = p.value("functional", "");
      spec.expect = p.value("expect", "");
      spec.params = p;
      if (spec.kind != "factorization") {
        detail::require(names.count(spec.functional) > 0,
                        "scenario: probe references unknown functional: " +
                            spec.functional);
      }
      cfg.probes.push_back(std::move(spec));
    }
  }
  return cfg;
}

std::vector<std::string> canned_scenario_names() {
  return {"entropic-vs-sup", "envelope-convergence", "escape", "factorization",
          "lebesgue"};
}

json canned_scenario(const std::string& name) {
  if (name == "entropic-vs-sup") {
    return json{
        {"name", "entropic-vs-sup"},
        {"seed", 1},
        {"tolerance", 1e-6},
        {"levels", {4, 8, 16, 32, 64}},
        {"functionals",
         {{{"name", "entropic-geo"}, {"kind", "entropic"}, {"rule", "geometric"}, {"ratio", 1e-8}},
          {{"name", "sup"}, {"kind", "sup"}},
          {{"name", "max-over-K"}, {"kind", "max-over-compactification"}}}},
        {"probes",
         {{{"kind", "downward"}, {"functional", "entropic-geo"}, {"sequence", "tail-indicator"}, {"expect", "downward-continuous"}},
          {{"kind", "downward"}, {"functional", "sup"}, {"sequence", "tail-indicator"}, {"expect", "not-downward-continuous"}},
          {{"kind", "tightness"}, {"functional", "entropic-geo"}, {"m", {0.1, 0.5, 1.0}}, {"tolerance", 1e-3}, {"expect", "tight"}},
          {{"kind", "tightness"}, {"functional", "sup"}, {"m", {0.0, 0.5}}, {"tolerance", 1e-3}, {"expect", "not-tight"}},
          {{"kind", "attainment"}, {"functional", "entropic-geo"}, {"f", "one-minus-inverse"}, {"expect", "attained"}},
          {{"kind", "attainment"}, {"functional", "max-over-K"}, {"f", "one-minus-inverse-K"}, {"expect", "escaping"}}}}};
  }
  if (name == "envelope-convergence") {
    return json{
        {"name", "envelope-convergence"},
        {"seed", 3},
        {"tolerance", 1e-6},
        {"levels", {4, 8, 16}},
        {"functionals",
         {{{"name", "entropic-uniform"}, {"kind", "entropic"}, {"rule", "uniform"}},
          {{"name", "sup"}, {"kind", "sup"}}}},
        {"probes",
         {{{"kind", "upward"}, {"functional", "entropic-uniform"}, {"f", "cosine"}, {"expect", "upward-continuous"}},
          {{"kind", "upward"}, {"functional", "sup"}, {"f", "cosine"}, {"expect", "upward-continuous"}},
          {{"kind", "fatou"}, {"functional", "entropic-uniform"}, {"tolerance", 1e-8}, {"expect", "fatou-holds"}},
          {{"kind", "fatou"}, {"functional", "sup"}, {"tolerance", 1e-8}, {"expect", "fatou-holds"}}}}};
  }
  if (name == "escape") {
    return json{
        {"name", "escape"},
        {"seed", 5},
        {"tolerance", 1e-6},
        {"levels", {4, 8, 16, 32, 64}},
        {"functionals",
         {{{"name", "max-over-K"}, {"kind", "max-over-compactification"}},
          {{"name", "entropic-geo"}, {"kind", "entropic"}, {"rule", "geometric"}, {"ratio", 1e-8}}}},
        {"probes",
         {{{"kind", "escape"}, {"functional", "max-over-K"}, {"f", "one-minus-inverse-K"}, {"expect", "escaping"}},
          {{"kind", "escape"}, {"functional", "entropic-geo"}, {"f", "one-minus-inverse"}, {"expect", "attained"}}}}};
  }
  if (name == "factorization") {
    return json{
        {"name", "factorization"},
        {"seed", 7},
        {"tolerance", 1e-6},
        {"levels", {4, 8, 16}},
        {"functionals", json::array()},
        {"probes",
         {{{"kind", "factorization"}, {"table", "prefix"}, {"expect", "factorized"}},
          {{"kind", "factorization"}, {"table", "escaping"}, {"expect", "divergent"}},
          {{"kind", "factorization"}, {"table", "empty-effective"}, {"expect", "factorized"}}}}};
  }
  if (name == "lebesgue") {
    return json{
        {"name", "lebesgue"},
        {"seed", 9},
        {"tolerance", 1e-3},
        {"levels", {4, 8, 16, 32, 64}},
        {"functionals",
         {{{"name", "sup"}, {"kind", "sup"}},
          {{"name", "entropic-geo-half"}, {"kind", "entropic"}, {"rule", "geometric"}, {"ratio", 0.5}}}},
        {"probes",
         {{{"kind", "lebesgue"}, {"functional", "sup"}, {"expect", "fails-lebesgue"}},
          {{"kind", "lebesgue"}, {"functional", "entropic-geo-half"}, {"expect", "has-lebesgue"}}}}};
  }
  throw std::invalid_argument("unknown canned scenario: " + name);
}

namespace {

const json* find_functional(const ScenarioConfig& cfg, const std::string& name) {
  for (const json& spec : cfg.functionals) {
    if (spec.value("name", spec.value("kind", "")) == name) return &spec;
  }
  return nullptr;
}

std::string safe_name(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return s;
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& cfg) {
  ScenarioOutcome outcome;
  json results = json::array();

  for (const ProbeSpec& probe : cfg.probes) {
    SweepOptions opts;
    opts.levels = cfg.levels;
    opts.tol = probe.params.value("tolerance", cfg.tolerance);
    opts.seed = cfg.seed;

    const json* fspec = nullptr;
    if (probe.kind != "factorization") {
      fspec = find_functional(cfg, probe.functional);
      detail::require(fspec != nullptr,
                      "scenario: probe references unknown functional: " +
                          probe.functional);
    }

    json entry;
    entry["probe"] = probe.kind;
    entry["functional"] = probe.functional;
    std::vector<std::string> verdicts;
    const std::string file_base =
        safe_name(probe.kind + "_" + (probe.functional.empty()
                                          ? probe.params.value("table", "table")
                                          : probe.functional));

    if (probe.kind == "downward") {
      const std::string seq = probe.params.value("sequence", "tail-indicator");
      const DownRule rule = seq == "power-cutoff" ? DownRule::PowerCutoff
                                                  : DownRule::TailIndicator;
      const ProbeReport rep = downward_sweep(sweep_functional(*fspec), rule, opts);
      entry["report"] = to_json(rep);
      verdicts.push_back(rep.verdict);
      outcome.csv_files.emplace_back(file_base + ".csv",
                                     csv_from_series(rep.index, rep.level_series));
    } else if (probe.kind == "upward") {
      const SweepFunc f = sweep_func(probe.params.value("f", "cosine"), cfg.seed);
      const ProbeReport rep = upward_envelope_sweep(sweep_functional(*fspec), f, opts);
      entry["report"] = to_json(rep);
      verdicts.push_back(rep.verdict);
      outcome.csv_files.emplace_back(file_base + ".csv",
                                     csv_from_series(rep.index, rep.level_series));
    } else if (probe.kind == "lebesgue") {
      const ProbeReport rep = lebesgue_sweep(sweep_functional(*fspec), opts);
      entry["report"] = to_json(rep);
      verdicts.push_back(rep.verdict);
      outcome.csv_files.emplace_back(file_base + ".csv",
                                     csv_from_series(rep.index, rep.level_series));
    } else if (probe.kind == "fatou") {
      const ProbeReport rep = fatou_sweep(sweep_functional(*fspec), opts);
      entry["report"] = to_json(rep);
      verdicts.push_back(rep.verdict);
      outcome.csv_files.emplace_back(file_base + ".csv",
                                     csv_from_values(rep.index, rep.observed));
    } else if (probe.kind == "tightness") {
      TightnessSubject subject;
      subject.label = probe.functional;
      const std::string kind = fspec->at("kind").get<std::string>();
      if (kind == "entropic") {
        subject.kind = TightnessSubject::Kind::EntropicGeometric;
        subject.ratio = fspec->value("ratio", 0.5);
      } else if (kind == "sup" || kind == "max-over-compactification") {
        subject.kind = TightnessSubject::Kind::Sup;
      } else {
        throw std::invalid_argument(
            "scenario: tightness probes support entropic and sup functionals");
      }
      std::vector<double> ms;
      if (probe.params.contains("m")) {
        if (probe.params.at("m").is_array()) {
          for (const auto& m : probe.params.at("m")) ms.push_back(m.get<double>());
        } else {
          ms.push_back(probe.params.at("m").get<double>());
        }
      } else {
        ms.push_back(0.5);
      }
      json reports = json::array();
      for (double m : ms) {
        const TightnessReport rep = tightness_probe(subject, m, opts);
        reports.push_back(to_json(rep));
        verdicts.push_back(rep.verdict);
        std::vector<double> levels;
        for (int l : rep.levels) levels.push_back(l);
        outcome.csv_files.emplace_back(
            file_base + "_m" + safe_name(std::to_string(m)) + ".csv",
            csv_from_series(levels, rep.per_term_sup));
      }
      entry["report"] = std::move(reports);
    } else if (probe.kind == "attainment" || probe.kind == "escape") {
      const SweepFunc f =
          sweep_func(probe.params.value("f", "one-minus-inverse"), cfg.seed);
      const AttainmentReport rep =
          attainment_probe(sweep_functional(*fspec), f, opts);
      entry["report"] = to_json(rep);
      verdicts.push_back(rep.verdict);
      std::vector<double> levels, gaps, escapes;
      std::vector<Vector> optimizers;
      std::vector<FamilyInstance> instances;
      for (const auto& l : rep.per_level) {
        levels.push_back(l.level);
        gaps.push_back(l.gap);
        escapes.push_back(l.escape_distance);
        optimizers.push_back(l.best_measure);
        instances.push_back(make_instance({}, l.level));
      }
      outcome.csv_files.emplace_back(file_base + "_gap.csv",
                                     csv_from_values(levels, gaps));
      outcome.csv_files.emplace_back(file_base + "_escape.csv",
                                     csv_from_values(levels, escapes));
      if (probe.kind == "escape") {
        const EscapeSummary sum =
            mass_escape(optimizers, instances, {0.5, 0.25, 0.1, 0.05, 0.02});
        entry["escape_summary"] = to_json(sum);
      }
    } else if (probe.kind == "factorization") {
      const TableRule rule =
          table_rule_from_string(probe.params.value("table", "prefix"));
      const int prefix = probe.params.value("prefix", 3);
      const int trials = probe.params.value("trials", 100);
      const ProbeReport rep = compact_support_probe(rule, opts, trials, prefix);
      entry["report"] = to_json(rep);
      verdicts.push_back(rep.verdict);
      outcome.csv_files.emplace_back(file_base + ".csv",
                                     csv_from_values(rep.index, rep.observed));
    }

    entry["verdicts"] = verdicts;
    if (!probe.expect.empty()) {
      bool match = !verdicts.empty();
      for (const std::string& v : verdicts) match = match && v == probe.expect;
      entry["expected"] = probe.expect;
      entry["match"] = match;
      if (!match) {
        outcome.all_match = false;
        std::string got;
        for (const std::string& v : verdicts) got += (got.empty() ? "" : ", ") + v;
        outcome.mismatches.push_back(probe.kind + "/" + probe.functional +
                                     ": expected " + probe.expect + ", got " + got);
      }
    }
    results.push_back(std::move(entry));
  }

  json verdicts_doc;
  verdicts_doc["scenario"] = cfg.name;
  verdicts_doc["seed"] = cfg.seed;
  verdicts_doc["tolerance"] = num(cfg.tolerance);
  verdicts_doc["levels"] = cfg.levels;
  verdicts_doc["results"] = std::move(results);
  verdicts_doc["all_match"] = outcome.all_match;
  outcome.verdicts = std::move(verdicts_doc);
  outcome.exit_code = outcome.all_match ? 0 : 2;
  return outcome;
}

void write_scenario_outputs(const ScenarioOutcome& outcome, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream f(fs::path(out_dir) / "verdicts.json", std::ios::binary);
    detail::require(f.good(), "cannot write verdicts.json in " + out_dir);
    f << outcome.verdicts.dump(2) << "\n";
  }
  for (const auto& [name, content] : outcome.csv_files) {
    std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
    detail::require(f.good(), "cannot write " + name + " in " + out_dir);
    f << content;
  }
  {
    // Timestamps live here and only here so verdicts stay byte-identical.
    const auto now = std::chrono::system_clock::now();
    const auto secs =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch());
    json meta;
    meta["scenario"] = outcome.verdicts.value("scenario", "");
    meta["written_at_unix"] = secs.count();
    std::ofstream f(fs::path(out_dir) / "metadata.json", std::ios::binary);
    detail::require(f.good(), "cannot write metadata.json in " + out_dir);
    f << meta.dump(2) << "\n";
  }
}

}  // namespace cbx

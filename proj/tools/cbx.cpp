// cbx: convex-duality workbench on finite metric models.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cbx/json_io.hpp"
#include "cbx/scenario.hpp"

namespace {

using cbx::json;

json parse_json_arg(const std::string& arg, const char* what) {
  // Inline JSON or a file path.
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) {
    return json::parse(arg);
  }
  std::ifstream f(arg);
  if (!f.good()) {
    throw std::invalid_argument(std::string(what) + ": cannot open " + arg);
  }
  json j;
  f >> j;
  return j;
}

cbx::FamilyInstance instance_from_space_arg(const std::string& arg) {
  const json j = parse_json_arg(arg, "space");
  cbx::FamilyInstance inst;
  if (j.is_object() && j.contains("family")) {
    cbx::TruncationFamily family;
    family.rule = cbx::truncation_rule_from_string(j.at("family").get<std::string>());
    family.level = j.value("level", 1);
    family.ratio = j.value("ratio", 0.5);
    return cbx::make_instance(family, family.level);
  }
  inst.comp = cbx::compactification_from_json(j);
  inst.family.level = inst.comp.interior_size();
  return inst;
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f.good()) throw std::invalid_argument("cannot write " + out_path);
  f << j.dump(2) << "\n";
}

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f.good()) throw std::invalid_argument("cannot write " + out_path);
  f << text;
}

std::string format_cell(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convex duality workbench on finite metric models"};
  app.require_subcommand(1);

  // --- run ---------------------------------------------------------------
  std::string run_config, run_out = "cbx-out";
  std::uint64_t run_seed = 0;
  bool run_seed_set = false;
  auto* run = app.add_subcommand("run", "run a scenario config with expectations");
  run->add_option("config", run_config, "scenario JSON file")->required();
  run->add_option("--out", run_out, "output directory");
  run->add_option("--seed", run_seed, "override the config seed")
      ->each([&](const std::string&) { run_seed_set = true; });

  // --- envelope ------------------------------------------------------------
  std::string env_space, env_f, env_out;
  std::vector<double> env_n{1, 2, 4, 8, 16};
  auto* env = app.add_subcommand("envelope", "Lipschitz envelopes of f on a space");
  env->add_option("--space", env_space, "space config (file or inline JSON)")->required();
  env->add_option("--f", env_f, "function on the interior (array, file or rule name)")
      ->required();
  env->add_option("--n", env_n, "envelope parameters")->delimiter(',');
  env->add_option("--out", env_out, "CSV output path (default stdout)");

  // --- conjugate -----------------------------------------------------------
  std::string cj_space, cj_functional, cj_mu, cj_out;
  auto* cj = app.add_subcommand("conjugate", "F*(mu) with certificate or witness");
  cj->add_option("--space", cj_space, "space config")->required();
  cj->add_option("--functional", cj_functional, "functional config")->required();
  cj->add_option("--mu", cj_mu, "measure weights (array or file)")->required();
  cj->add_option("--out", cj_out, "JSON output path");

  // --- biconjugate -----------------------------------------------------------
  std::string bi_space, bi_functional, bi_f, bi_out, bi_support = "auto";
  std::uint64_t bi_seed = 1;
  auto* bi = app.add_subcommand("biconjugate",
                                "dual search sup_mu mu(f) - F*(mu) and the gap");
  bi->add_option("--space", bi_space, "space config")->required();
  bi->add_option("--functional", bi_functional, "functional config")->required();
  bi->add_option("--f", bi_f, "function (array or file)")->required();
  bi->add_option("--support", bi_support, "dual support: auto | interior | all");
  bi->add_option("--seed", bi_seed, "search seed");
  bi->add_option("--out", bi_out, "JSON output path");

  // --- verify-representation -------------------------------------------------
  std::string vr_space, vr_functional, vr_out, vr_csv;
  int vr_samples = 100;
  double vr_range = 2.0, vr_tol = 1e-6;
  std::uint64_t vr_seed = 1;
  auto* vr = app.add_subcommand("verify-representation",
                                "duality gaps over a seeded function sample");
  vr->add_option("--space", vr_space, "space config")->required();
  vr->add_option("--functional", vr_functional, "functional config")->required();
  vr->add_option("--samples", vr_samples, "sample count");
  vr->add_option("--range", vr_range, "coordinate range of sampled f");
  vr->add_option("--tolerance", vr_tol, "max-gap tolerance");
  vr->add_option("--seed", vr_seed, "sample seed");
  vr->add_option("--out", vr_out, "JSON output path");
  vr->add_option("--gaps-csv", vr_csv, "per-sample gap table (CSV)");

  // --- support ---------------------------------------------------------------
  std::string sp_space, sp_functional, sp_f, sp_out;
  double sp_eps = 0.1;
  int sp_samples = 200;
  std::uint64_t sp_seed = 1;
  auto* sp = app.add_subcommand("support", "eps-supporting measure with verification");
  sp->add_option("--space", sp_space, "space config")->required();
  sp->add_option("--functional", sp_functional, "functional config")->required();
  sp->add_option("--f", sp_f, "function (array or file)")->required();
  sp->add_option("--epsilon", sp_eps, "eps in (0, 1]")->required();
  sp->add_option("--samples", sp_samples, "verification sample count");
  sp->add_option("--seed", sp_seed, "search seed");
  sp->add_option("--out", sp_out, "JSON output path");

  // --- properties -------------------------------------------------------------
  std::string pr_space, pr_functional, pr_out;
  int pr_trials = 200;
  std::uint64_t pr_seed = 1;
  auto* pr = app.add_subcommand("properties",
                                "randomized monotonicity/convexity/continuity checks");
  pr->add_option("--space", pr_space, "space config")->required();
  pr->add_option("--functional", pr_functional, "functional config")->required();
  pr->add_option("--trials", pr_trials, "trial count");
  pr->add_option("--seed", pr_seed, "trial seed");
  pr->add_option("--out", pr_out, "JSON output path");

  // --- probe ---------------------------------------------------------------
  std::string probe_kind, probe_scenario = "entropic-vs-sup", probe_out = "cbx-out";
  std::vector<int> probe_levels;
  double probe_tol = -1.0;
  std::uint64_t probe_seed = 0;
  bool probe_seed_set = false;
  auto* probe = app.add_subcommand("probe", "run canned scenario probes of one kind");
  probe->add_option("kind", probe_kind,
                    "downward | upward | tightness | attainment | escape | "
                    "factorization | lebesgue | fatou | all")
      ->required();
  probe->add_option("--scenario", probe_scenario, "canned scenario name");
  probe->add_option("--levels", probe_levels, "truncation levels")->delimiter(',');
  probe->add_option("--tolerance", probe_tol, "override scenario tolerance");
  probe->add_option("--seed", probe_seed, "override scenario seed")
      ->each([&](const std::string&) { probe_seed_set = true; });
  probe->add_option("--out", probe_out, "output directory");

  auto* scenarios = app.add_subcommand("scenarios", "list canned scenario names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      json cfg = parse_json_arg(run_config, "scenario config");
      if (run_seed_set) cfg["seed"] = run_seed;
      const cbx::ScenarioOutcome outcome =
          cbx::run_scenario(cbx::scenario_from_json(cfg));
      cbx::write_scenario_outputs(outcome, run_out);
      for (const auto& m : outcome.mismatches) {
        std::cerr << "expectation failed: " << m << "\n";
      }
      std::cout << (outcome.all_match ? "all expectations matched"
                                      : "expectation mismatches")
                << "; reports in " << run_out << "\n";
      return outcome.exit_code;
    }

    if (*env) {
      const cbx::FamilyInstance inst = instance_from_space_arg(env_space);
      const cbx::Vector f =
          cbx::vector_from_json(parse_json_arg(env_f, "f"), "envelope f");
      std::vector<double> ns = env_n;
      std::sort(ns.begin(), ns.end());
      const cbx::EnvelopeSweep sweep = cbx::envelope_sequence(inst.comp, f, ns);
      std::ostringstream os;
      os << "point,f";
      for (double n : ns) os << ",g_" << n;
      os << ",gap\n";
      for (int x = 0; x < inst.comp.size(); ++x) {
        os << inst.comp.space.points[static_cast<std::size_t>(x)];
        int interior_pos = -1;
        for (std::size_t i = 0; i < inst.comp.interior.size(); ++i) {
          if (inst.comp.interior[i] == x) interior_pos = static_cast<int>(i);
        }
        os << "," << (interior_pos >= 0 ? format_cell(f[interior_pos]) : "");
        for (const cbx::Vector& g : sweep.seq.terms) os << "," << format_cell(g[x]);
        os << ","
           << (interior_pos >= 0
                   ? format_cell(sweep.gaps_on_X.back()[interior_pos])
                   : "")
           << "\n";
      }
      emit_text(os.str(), env_out);
      return 0;
    }

    if (*cj) {
      const cbx::FamilyInstance inst = instance_from_space_arg(cj_space);
      const auto F = cbx::functional_from_json(
          parse_json_arg(cj_functional, "functional"), inst);
      const cbx::Vector mu =
          cbx::vector_from_json(parse_json_arg(cj_mu, "mu"), "conjugate mu");
      emit(cbx::to_json(cbx::conjugate(*F, mu)), cj_out);
      return 0;
    }

    if (*bi) {
      const cbx::FamilyInstance inst = instance_from_space_arg(bi_space);
      const auto F = cbx::functional_from_json(
          parse_json_arg(bi_functional, "functional"), inst);
      const cbx::Vector f =
          cbx::vector_from_json(parse_json_arg(bi_f, "f"), "biconjugate f");
      cbx::DualSearchOptions opts;
      opts.seed = bi_seed;
      const bool on_K = F->dim() == inst.comp.size() &&
                        inst.comp.interior_size() < inst.comp.size();
      if (bi_support == "interior" || (bi_support == "auto" && on_K)) {
        opts.support = inst.comp.interior;
      } else if (bi_support != "all" && bi_support != "auto") {
        throw std::invalid_argument("--support must be auto, interior or all");
      }
      emit(cbx::to_json(cbx::biconjugate(*F, f, opts)), bi_out);
      return 0;
    }

    if (*vr) {
      const cbx::FamilyInstance inst = instance_from_space_arg(vr_space);
      const auto F = cbx::functional_from_json(
          parse_json_arg(vr_functional, "functional"), inst);
      const cbx::RepresentationReport rep =
          cbx::verify_representation(*F, vr_samples, vr_range, vr_seed, vr_tol);
      emit(cbx::to_json(rep), vr_out);
      if (!vr_csv.empty()) {
        std::vector<double> idx(rep.gaps.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i);
        emit_text(cbx::csv_from_values(idx, rep.gaps), vr_csv);
      }
      return rep.pass ? 0 : 2;
    }

    if (*sp) {
      const cbx::FamilyInstance inst = instance_from_space_arg(sp_space);
      const auto F = cbx::functional_from_json(
          parse_json_arg(sp_functional, "functional"), inst);
      const cbx::Vector f =
          cbx::vector_from_json(parse_json_arg(sp_f, "f"), "support f");
      cbx::DualSearchOptions opts;
      opts.seed = sp_seed;
      if (F->dim() == inst.comp.size() &&
          inst.comp.interior_size() < inst.comp.size()) {
        opts.support = inst.comp.interior;
      }
      const cbx::SupportingMeasure sm =
          cbx::supporting_measure(*F, f, sp_eps, opts, sp_samples);
      emit(cbx::to_json(sm), sp_out);
      return sm.record.certified ? 0 : 2;
    }

    if (*pr) {
      const cbx::FamilyInstance inst = instance_from_space_arg(pr_space);
      const auto F = cbx::functional_from_json(
          parse_json_arg(pr_functional, "functional"), inst);
      const cbx::PropertyReport rep = cbx::check_properties(*F, pr_trials, pr_seed);
      emit(cbx::to_json(rep), pr_out);
      return rep.all_pass() ? 0 : 2;
    }

    if (*probe) {
      json cfg = cbx::canned_scenario(probe_scenario);
      if (!probe_levels.empty()) cfg["levels"] = probe_levels;
      if (probe_tol >= 0.0) cfg["tolerance"] = probe_tol;
      if (probe_seed_set) cfg["seed"] = probe_seed;
      if (probe_kind != "all") {
        json filtered = json::array();
        for (const auto& p : cfg.at("probes")) {
          std::string kind = p.at("kind").get<std::string>();
          if (kind == probe_kind ||
              (probe_kind == "escape" && kind == "attainment") ||
              (probe_kind == "attainment" && kind == "escape")) {
            filtered.push_back(p);
          }
        }
        if (filtered.empty()) {
          throw std::invalid_argument("scenario " + probe_scenario +
                                      " has no probes of kind " + probe_kind);
        }
        cfg["probes"] = std::move(filtered);
      }
      const cbx::ScenarioOutcome outcome =
          cbx::run_scenario(cbx::scenario_from_json(cfg));
      cbx::write_scenario_outputs(outcome, probe_out);
      for (const auto& m : outcome.mismatches) {
        std::cerr << "expectation failed: " << m << "\n";
      }
      std::cout << outcome.verdicts.dump(2) << "\n";
      return outcome.exit_code;
    }

    if (*scenarios) {
      for (const std::string& name : cbx::canned_scenario_names()) {
        std::cout << name << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

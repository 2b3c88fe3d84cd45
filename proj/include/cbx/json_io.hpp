#pragma once

#include <json.hpp>

#include <memory>
#include <string>

#include "cbx/duality.hpp"
#include "cbx/envelope.hpp"
#include "cbx/probes.hpp"

namespace cbx {

// Ordered JSON keeps report bytes stable across identical runs.
using json = nlohmann::ordered_json;

/// Doubles for reports: infinities and NaN become tagged strings instead of
/// nlohmann's silent null.
json num(double x);

json to_json(const Vector& v);
Vector vector_from_json(const json& j, const char* what);

/// Space config: either the explicit form
///   {"points": [...], "dist": [[...]], "interior": [...], "boundary_sets": [[...]]}
/// or a family form {"family": "harmonic-points", "level": N}.
Compactification compactification_from_json(const json& j);
json to_json(const Compactification& comp);

/// Functional config:
///   {"kind": "sup"} | {"kind": "max-over-compactification"}
///   {"kind": "entropic", "p": [...]} (or "log_p", or "rule": "uniform"/"geometric" with "ratio")
///   {"kind": "penalty-table", "entries": [{"mu": [...], "alpha": a}, ...]}
///     (or "rule": "prefix"/"escaping"/"empty-effective" with "prefix")
///   {"kind": "linear-expectation", "mu": [...]} (or "rule": "uniform")
/// The instance supplies dimensions for rule-generated parameters.
std::unique_ptr<Functional> functional_from_json(const json& j, const FamilyInstance& inst);

json to_json(const MetricCheck& check);
json to_json(const ConjugateValue& cv);
json to_json(const DualityReport& rep);
json to_json(const SupportRecord& rec);
json to_json(const SupportingMeasure& sm);
json to_json(const RepresentationReport& rep);
json to_json(const PropertyReport& rep);
json to_json(const EnvelopeResult& res);
json to_json(const ProbeReport& rep);
json to_json(const TightnessReport& rep);
json to_json(const AttainmentReport& rep);
json to_json(const EscapeSummary& sum);

/// One line per (level, n, value) triple.
std::string csv_from_series(const std::vector<double>& levels,
                            const std::vector<std::vector<double>>& per_level);
std::string csv_from_values(const std::vector<double>& levels,
                            const std::vector<double>& values);

}  // namespace cbx

#pragma once

#include <string>

#include <json.hpp>

#include "rksat/classify.hpp"
#include "rksat/config.hpp"
#include "rksat/coupling.hpp"
#include "rksat/counter.hpp"
#include "rksat/errors.hpp"
#include "rksat/lp.hpp"
#include "rksat/marking.hpp"

namespace rksat {

inline constexpr const char* kReportSchema = "rksat.report/1";

/// Envelope shared by every report: schema, command, config and its hash.
nlohmann::json report_envelope(const std::string& command, const RunConfig& config);

/// Exact "a/b" plus a decimal rendering.
nlohmann::json rational_json(const Rational& value);
nlohmann::json assignment_json(const PartialAssignment& assignment);

nlohmann::json formula_json(const Formula& formula);
nlohmann::json constants_json(const ResolvedConstants& constants);
nlohmann::json classification_json(const Classification& cls);
nlohmann::json marking_json(const Marking& marking);
nlohmann::json lambda_star_json(const LambdaStar& lambda);
nlohmann::json tree_stats_json(const TreeStats& stats);
/// Per-node dump: id, parent, kind, V_I, V_set, A_1, A_2, F with reasons, r at leaves.
nlohmann::json tree_json(const CouplingTree& tree);
nlohmann::json estimate_json(const RatioEstimate& estimate);
nlohmann::json exact_count_json(const ExactCount& count);
nlohmann::json approx_count_json(const ApproxCount& count);
nlohmann::json bound_json(const BoundLine& line);
nlohmann::json audit_json(const AuditReport& report);
nlohmann::json error_json(const Error& error);

/// |V_set(rho)| <= 3 k^3 alpha L + 1 next to the largest measured |V_set|.
BoundLine set_size_bound(const Formula& formula, const TreeStats& stats, Depth L);

}  // namespace rksat

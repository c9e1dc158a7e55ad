#include "rksat/report.hpp"

#include <cmath>
#include <limits>

namespace rksat {

using nlohmann::json;

json report_envelope(const std::string& command, const RunConfig& config) {
  return {{"schema", kReportSchema},
          {"command", command},
          {"config", to_json(config)},
          {"config_hash", config_hash(config)}};
}

json rational_json(const Rational& value) {
  return {{"exact", to_string(value)}, {"decimal", to_decimal(value)}};
}

json assignment_json(const PartialAssignment& assignment) {
  json out = json::object();
  for (Var v : assignment.domain()) out[std::to_string(v)] = *assignment.get(v);
  return out;
}

json formula_json(const Formula& formula) {
  return {{"k", formula.k}, {"n", formula.n}, {"m", formula.m()}};
}

json constants_json(const ResolvedConstants& c) {
  return {{"delta", c.delta},
          {"paper_delta", c.paper_delta},
          {"L", c.L ? json(*c.L) : json("infinite")},
          {"paper_L", c.paper_L ? json(*c.paper_L) : json()},
          {"s", rational_json(c.s)},
          {"paper_s", c.paper_s},
          {"notes", c.notes}};
}

json classification_json(const Classification& cls) {
  return {{"delta", cls.delta},
          {"bad_fraction", to_string(cls.bad_fraction)},
          {"threshold", to_string(cls.threshold)},
          {"rounds", cls.rounds},
          {"high_degree", cls.high_degree},
          {"bad_vars", cls.bad_vars},
          {"good_vars", cls.good_vars},
          {"bad_clauses", cls.bad_clauses},
          {"good_clauses", cls.good_clauses}};
}

json marking_json(const Marking& marking) {
  return {{"marked", marking.marked}, {"resamples", marking.resamples}};
}

json lambda_star_json(const LambdaStar& lambda) {
  json truncated = json::array();
  for (std::size_t i = 0; i < lambda.clauses.size(); ++i) {
    json lits = json::array();
    for (const auto& lit : lambda.truncated[i]) lits.push_back(lit.dimacs());
    truncated.push_back({{"clause", lambda.clauses[i]}, {"literals", lits}});
  }
  return {{"order", lambda.order}, {"assignment", assignment_json(lambda.assignment)}, {"truncated", truncated}};
}

json tree_stats_json(const TreeStats& s) {
  return {{"nodes", s.nodes},         {"internal", s.internal},         {"leaves", s.leaves},
          {"truncating", s.truncating}, {"max_depth", s.max_depth}, {"max_interior", s.max_interior},
          {"max_set", s.max_set}};
}

json tree_json(const CouplingTree& tree) {
  const auto& ctx = tree.ctx;
  json nodes = json::array();
  for (const auto& node : tree.nodes) {
    json failed = json::array();
    for (std::uint32_t c = 0; c < ctx.clause_count(); ++c) {
      if (!node.failed(c)) continue;
      json reasons = json::array();
      const auto r = node.reasons(c);
      if (r & clause_flag::bad) reasons.push_back("bad");
      if (r & clause_flag::disagree) reasons.push_back("disagree");
      if (r & clause_flag::one) reasons.push_back("one");
      if (r & clause_flag::two) reasons.push_back("two");
      failed.push_back({{"clause", ctx.clause(c).id}, {"reasons", reasons}});
    }
    json entry = {{"id", node.id},
                  {"parent", node.parent},
                  {"kind", std::string(to_string(node.kind))},
                  {"depth", node.depth},
                  {"V_I", node.interior_vars()},
                  {"V_set", node.set_vars()},
                  {"A1", assignment_json(node.assignment(1))},
                  {"A2", assignment_json(node.assignment(2))},
                  {"F", failed}};
    if (node.kind == NodeKind::Internal) {
      entry["first_clause"] = ctx.clause(*node.first_clause).id;
      entry["first_var"] = *node.first_var;
      entry["children"] = node.children;
    }
    if (node.ratio)
      entry["r"] = {{"n1", node.ratio->n1.str()}, {"n2", node.ratio->n2.str()}, {"r", rational_json(node.ratio->r)}};
    nodes.push_back(std::move(entry));
  }
  return {{"pivot", ctx.pivot},
          {"lambda", assignment_json(ctx.lambda)},
          {"truncation_depth", tree.truncation_depth ? json(*tree.truncation_depth) : json("infinite")},
          {"stats", tree_stats_json(tree.stats)},
          {"nodes", nodes}};
}

json estimate_json(const RatioEstimate& e) {
  json trace = json::array();
  for (const auto& q : e.trace)
    trace.push_back({{"r_lower", to_string(q.r_lower)}, {"r_upper", to_string(q.r_upper)}, {"feasible", q.feasible}});
  return {{"p", rational_json(e.p)},
          {"p_lower", rational_json(e.p_lower)},
          {"p_upper", rational_json(e.p_upper)},
          {"iterations", e.iterations},
          {"s", rational_json(e.s)},
          {"tree", tree_stats_json(e.tree)},
          {"trace", trace}};
}

json exact_count_json(const ExactCount& count) {
  json components = json::array();
  for (const auto& c : count.components) components.push_back({{"vars", c.vars}, {"count", c.count.str()}});
  return {{"count", count.count.str()},
          {"method", std::string(to_string(count.method))},
          {"unconstrained", count.unconstrained},
          {"components", components}};
}

json approx_count_json(const ApproxCount& a) {
  json steps = json::array();
  for (const auto& s : a.steps)
    steps.push_back({{"var", s.var},
                     {"value", s.value},
                     {"p", rational_json(s.p)},
                     {"q", rational_json(s.q)},
                     {"iterations", s.iterations},
                     {"lp_calls", s.lp_calls},
                     {"tree", tree_stats_json(s.tree)}});
  return {{"Z", rational_json(a.Z)},
          {"eps", to_string(a.eps)},
          {"delta", a.delta},
          {"s", rational_json(a.s)},
          {"bad_vars", a.bad_vars},
          {"bad_clauses", a.bad_clauses},
          {"marked", a.marked},
          {"marking_seed", a.marking_seed},
          {"steps", steps},
          {"residual", exact_count_json(a.residual)}};
}

json bound_json(const BoundLine& line) {
  auto number = [](double x) { return std::isfinite(x) ? json(x) : json("infinite"); };
  return {{"name", line.name}, {"formula", line.formula}, {"bound", number(line.bound)}, {"measured", number(line.measured)}};
}

json audit_json(const AuditReport& r) {
  json components = json::array();
  for (const auto& c : r.components)
    components.push_back({{"vars", c.vars}, {"high_degree", c.high_degree}, {"size_over_high_degree", c.size_over_high_degree}});
  json overlaps = json::array();
  for (const auto& o : r.overlaps)
    overlaps.push_back({{"vars", o.vars}, {"at_least", o.at_least}, {"clauses", o.clauses}, {"bound", o.bound}});
  json expansion = json::array();
  for (const auto& e : r.expansion)
    expansion.push_back({{"size", e.size},
                         {"sets", e.sets},
                         {"min_vars", e.min_vars},
                         {"min_ratio", e.min_ratio},
                         {"truncated", e.truncated}});
  json neighborhoods = json::array();
  for (const auto& s : r.neighborhoods)
    neighborhoods.push_back({{"vars", s.vars}, {"closed_neighborhood", s.closed_neighborhood}, {"bound", s.bound}});
  json bounds = json::array();
  for (const auto& b : r.bounds) bounds.push_back(bound_json(b));
  return {{"high_degree", r.high_degree},
          {"bad_vars", r.bad_vars},
          {"bad_clauses", r.bad_clauses},
          {"good_graph_max_degree", r.good_graph_max_degree},
          {"components", components},
          {"overlaps", overlaps},
          {"expansion", expansion},
          {"expansion_truncated", r.expansion_truncated},
          {"neighborhoods", neighborhoods},
          {"bounds", bounds}};
}

json error_json(const Error& error) {
  return {{"kind", std::string(to_string(error.kind()))},
          {"category", std::string(to_string(error.category()))},
          {"stage", error.stage()},
          {"message", error.what()}};
}

BoundLine set_size_bound(const Formula& formula, const TreeStats& stats, Depth L) {
  const double k = formula.k;
  const double bound = L ? 3.0 * k * k * k * formula.density() * static_cast<double>(*L) + 1.0
                         : std::numeric_limits<double>::infinity();
  return {"set_size", "|V_set| <= 3 k^3 alpha L + 1", bound, static_cast<double>(stats.max_set)};
}

}  // namespace rksat

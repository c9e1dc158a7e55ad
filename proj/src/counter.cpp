#include "rksat/counter.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "rksat/errors.hpp"

namespace rksat {

std::string_view to_string(CountMethod method) {
  return method == CountMethod::Enumeration ? "enumeration" : "component-product";
}

namespace {

struct MaskClause {
  std::uint64_t positive = 0;
  std::uint64_t negative = 0;
};

std::uint64_t count_masks(std::size_t width, const std::vector<MaskClause>& clauses) {
  std::uint64_t count = 0;
  const std::uint64_t total = std::uint64_t{1} << width;
  for (std::uint64_t x = 0; x < total; ++x) {
    bool ok = true;
    for (const auto& c : clauses)
      if (((x & c.positive) | (~x & c.negative)) == 0) {
        ok = false;
        break;
      }
    count += ok ? 1 : 0;
  }
  return count;
}

template <typename Lits>
MaskClause to_mask(const Lits& literals, const std::vector<Var>& vars) {
  MaskClause mask;
  for (const auto& lit : literals) {
    const auto i = std::lower_bound(vars.begin(), vars.end(), lit.var) - vars.begin();
    (lit.positive ? mask.positive : mask.negative) |= std::uint64_t{1} << i;
  }
  return mask;
}

}  // namespace

ExactCount exact_count(const SimplifiedFormula& formula, std::size_t cap) {
  ExactCount out;
  out.method = CountMethod::ComponentProduct;
  if (formula.unsatisfiable()) {
    out.count = 0;
    return out;
  }
  AdjacencyList graph(formula.n + 1);
  std::vector<char> constrained(formula.n + 1, 0);
  for (const auto& clause : formula.clauses) {
    for (Var v : clause.vars) constrained[v] = 1;
    for (std::size_t i = 1; i < clause.vars.size(); ++i) {
      graph[clause.vars[0]].push_back(clause.vars[i]);
      graph[clause.vars[i]].push_back(clause.vars[0]);
    }
  }
  std::vector<Var> involved;
  for (Var v : formula.free_vars) (constrained[v] ? involved.push_back(v) : void(++out.unconstrained));
  out.count = Integer(1) << out.unconstrained;
  const auto components = connected_components(graph, involved);
  std::vector<std::vector<MaskClause>> masks(components.size());
  std::vector<std::size_t> owner(formula.n + 1, 0);
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].size() > cap || components[i].size() >= 63)
      throw Error(ErrorKind::ComponentTooLarge,
                  "component of " + std::to_string(components[i].size()) +
                      " variables exceeds the cap " + std::to_string(cap));
    for (Var v : components[i]) owner[v] = i;
  }
  for (const auto& clause : formula.clauses) {
    const std::size_t i = owner[clause.vars.front()];
    masks[i].push_back(to_mask(clause.literals, components[i]));
  }
  for (std::size_t i = 0; i < components.size(); ++i) {
    ComponentCount cc{components[i], Integer(count_masks(components[i].size(), masks[i]))};
    out.count *= cc.count;
    out.components.push_back(std::move(cc));
  }
  return out;
}

ExactCount exact_count(const Formula& formula, std::size_t cap) {
  return exact_count(simplify_under(formula, PartialAssignment(formula.n)), cap);
}

ExactCount enumerate_count(const Formula& formula, std::size_t cap) {
  if (formula.n > cap || formula.n >= 63)
    throw Error(ErrorKind::ComponentTooLarge,
                std::to_string(formula.n) + " variables exceed the enumeration cap");
  std::vector<Var> all(formula.n);
  for (Var v = 1; v <= formula.n; ++v) all[v - 1] = v;
  std::vector<MaskClause> masks;
  for (const auto& clause : formula.clauses) masks.push_back(to_mask(clause.literals, all));
  ExactCount out;
  out.method = CountMethod::Enumeration;
  out.count = Integer(count_masks(formula.n, masks));
  return out;
}

ExactCount count_residual(const Formula& formula, const LambdaStar& lambda,
                          const Classification& cls, std::size_t cap) {
  const auto reduced = simplify_under(formula, lambda.assignment);
  for (const auto& clause : reduced.clauses)
    if (!cls.is_bad_clause(clause.id))
      throw Error(ErrorKind::NotFullyGoodSatisfied,
                  "good clause " + std::to_string(clause.id) + " survives Lambda*");
  for (ClauseId id : reduced.emptied)
    if (!cls.is_bad_clause(id))
      throw Error(ErrorKind::NotFullyGoodSatisfied,
                  "good clause " + std::to_string(id) + " falsified by Lambda*");
  return exact_count(reduced, cap);
}

Rational step_factor(const Rational& p, bool value) {
  return value ? p / (p + 1) : Rational(1) / (p + 1);
}

namespace {

template <typename Body>
auto staged(const char* stage, Body&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw e.with_stage(stage);
  }
}

}  // namespace

Preparation prepare(const Formula& formula, const ApproxConfig& config) {
  const std::uint32_t delta = config.delta ? *config.delta : default_delta(formula.k);
  auto cls = staged("classify", [&] { return classify(formula, delta, config.bad_fraction); });
  SearchOptions search = config.search;
  search.seed = config.seed;
  auto bad = staged("bad_sat", [&] { return find_bad_sat_assignment(formula, cls, search); });

  // A marking whose truncated formula is unsatisfiable is replaced by a fresh one.
  for (std::size_t attempt = 0;; ++attempt) {
    const std::uint64_t seed = config.seed + attempt;
    try {
      auto marking = staged("mark", [&] { return find_marking(formula, cls, {seed, config.marking_attempts}); });
      auto lambda = staged("lambda_star", [&] { return find_lambda_star(formula, cls, marking, search); });
      return {std::move(cls), std::move(bad), std::move(marking), std::move(lambda), seed};
    } catch (const Error& e) {
      const bool structural = e.kind() == ErrorKind::MarkingNotFound &&
                              std::string(e.what()).find("distinct good variables") != std::string::npos;
      if (structural || attempt + 1 >= std::max<std::size_t>(1, config.marking_retries)) throw;
    }
  }
}

ApproxCount approx_count(const Formula& formula, const ApproxConfig& config) {
  if (config.eps <= 0) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  const auto prep = prepare(formula, config);
  const auto& cls = prep.cls;
  const Marking* marking = &prep.marking;
  const LambdaStar* lambda = &prep.lambda;

  ApproxCount out;
  out.eps = config.eps;
  out.delta = cls.delta;
  out.bad_vars = cls.bad_vars.size();
  out.bad_clauses = cls.bad_clauses.size();
  out.marking_seed = prep.marking_seed;
  out.marked = marking->marked;

  EstimateOptions estimate = config.estimate;
  estimate.eps = config.eps;
  const std::size_t j = lambda->order.size();
  std::vector<std::optional<RatioEstimate>> results(j);
  std::vector<std::exception_ptr> failures(j);
  auto run_step = [&](std::size_t i) {
    try {
      results[i] = staged("estimate", [&] {
        return estimate_ratio(formula, cls, *marking, lambda->prefix(i), lambda->order[i], estimate);
      });
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(config.threads, 1, std::max<std::size_t>(j, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < j; ++i) {
      run_step(i);
      if (failures[i]) break;
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next++) < j;) run_step(i);
      });
    for (auto& t : pool) t.join();
  }
  // The first failing step wins, whatever the schedule.
  for (const auto& failure : failures)
    if (failure) std::rethrow_exception(failure);

  Rational product(1);
  for (std::size_t i = 0; i < j; ++i) {
    const auto& result = *results[i];
    StepRecord step;
    step.var = lambda->order[i];
    step.value = *lambda->assignment.get(step.var);
    step.p = result.p;
    step.q = step_factor(result.p, step.value);
    step.iterations = result.iterations;
    step.lp_calls = result.trace.size();
    step.tree = result.tree;
    out.s = result.s;
    product *= step.q;
    out.steps.push_back(std::move(step));
  }
  out.residual = staged("residual", [&] { return count_residual(formula, *lambda, cls, config.component_cap); });
  if (out.residual.count == 0)
    throw Error(ErrorKind::Unsatisfiable, "no assignment extends Lambda*", "residual");
  if (product == 0) throw Error(ErrorKind::InvariantViolation, "zero step factor", "estimate");
  // product estimates |Omega^{Lambda*}| / |Omega|.
  out.Z = Rational(out.residual.count) / product;
  return out;
}

}  // namespace rksat

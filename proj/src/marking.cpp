#include "rksat/marking.hpp"

#include <algorithm>
#include <optional>
#include <random>

#include "rksat/errors.hpp"

namespace rksat {

namespace {

std::mt19937_64 sub_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

struct GoodCounts {
  std::size_t marked = 0;
  std::size_t unmarked = 0;
};

GoodCounts good_counts(const Clause& clause, const Classification& cls, const std::vector<char>& marked) {
  GoodCounts out;
  for (Var v : clause.vars()) {
    if (cls.is_bad(v)) continue;
    (marked[v] ? out.marked : out.unmarked) += 1;
  }
  return out;
}

// Clauses over `vars` (local indices by position) as bit masks.
struct MaskClause {
  std::uint64_t positive = 0;
  std::uint64_t negative = 0;
};

// First satisfying assignment (as local bits) by enumeration, or Moser-Tardos
// beyond the cap. Returns nullopt if none exists (enumeration) or the
// resample budget ran out (MT); `exhausted` tells the two apart.
std::optional<std::vector<bool>> solve_component(const std::vector<Var>& vars,
                                                 const std::vector<std::vector<Literal>>& clauses,
                                                 const SearchOptions& options, std::uint64_t index,
                                                 bool& exhausted) {
  exhausted = false;
  auto local = [&](Var v) {
    return static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
  };
  if (vars.size() <= options.exhaustive_cap && vars.size() < 64) {
    std::vector<MaskClause> masks;
    for (const auto& clause : clauses) {
      MaskClause mask;
      for (const auto& lit : clause)
        (lit.positive ? mask.positive : mask.negative) |= std::uint64_t{1} << local(lit.var);
      masks.push_back(mask);
    }
    const std::uint64_t total = std::uint64_t{1} << vars.size();
    for (std::uint64_t x = 0; x < total; ++x) {
      bool ok = true;
      for (const auto& mask : masks)
        if (((x & mask.positive) | (~x & mask.negative)) == 0) {
          ok = false;
          break;
        }
      if (ok) {
        std::vector<bool> out(vars.size());
        for (std::size_t i = 0; i < vars.size(); ++i) out[i] = (x >> i) & 1;
        return out;
      }
    }
    exhausted = true;
    return std::nullopt;
  }
  auto rng = sub_rng(options.seed, index);
  std::bernoulli_distribution coin(0.5);
  std::vector<bool> value(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) value[i] = coin(rng);
  for (std::size_t round = 0;; ++round) {
    const std::vector<Literal>* violated = nullptr;
    for (const auto& clause : clauses) {
      const bool sat = std::any_of(clause.begin(), clause.end(), [&](const Literal& lit) {
        return value[local(lit.var)] == lit.positive;
      });
      if (!sat) {
        violated = &clause;
        break;
      }
    }
    if (violated == nullptr) return value;
    if (round == options.max_resamples) return std::nullopt;
    for (const auto& lit : *violated) value[local(lit.var)] = coin(rng);
  }
}

std::vector<std::vector<Var>> literal_components(const std::vector<std::vector<Literal>>& clauses,
                                                 Var n) {
  AdjacencyList graph(n + 1);
  std::vector<Var> involved;
  for (const auto& clause : clauses)
    for (std::size_t i = 0; i < clause.size(); ++i) {
      involved.push_back(clause[i].var);
      for (std::size_t j = i + 1; j < clause.size(); ++j) {
        graph[clause[i].var].push_back(clause[j].var);
        graph[clause[j].var].push_back(clause[i].var);
      }
    }
  std::sort(involved.begin(), involved.end());
  involved.erase(std::unique(involved.begin(), involved.end()), involved.end());
  return connected_components(graph, involved);
}

}  // namespace

Marking find_marking(const Formula& formula, const Classification& cls, const MarkingOptions& options) {
  const Rational need_marked = make_rational(3 * formula.k, 10);
  const Rational need_unmarked = make_rational(formula.k, 4);
  const std::size_t min_good = static_cast<std::size_t>(ceil(need_marked) + ceil(need_unmarked));
  for (ClauseId c : cls.good_clauses) {
    std::size_t good = 0;
    for (Var v : formula.clauses[c].vars()) good += cls.is_bad(v) ? 0 : 1;
    if (good < min_good)
      throw Error(ErrorKind::MarkingNotFound,
                  "good clause " + std::to_string(c) + " has " + std::to_string(good) +
                      " distinct good variables, needs " + std::to_string(min_good));
  }

  std::mt19937_64 rng(options.seed);
  std::bernoulli_distribution coin(0.5);
  Marking marking;
  marking.is_marked.assign(formula.n + 1, 0);
  for (Var v : cls.good_vars) marking.is_marked[v] = coin(rng) ? 1 : 0;

  auto violates = [&](ClauseId c) {
    const GoodCounts counts = good_counts(formula.clauses[c], cls, marking.is_marked);
    return !at_least(counts.marked, need_marked) || !at_least(counts.unmarked, need_unmarked);
  };
  for (;;) {
    auto it = std::find_if(cls.good_clauses.begin(), cls.good_clauses.end(), violates);
    if (it == cls.good_clauses.end()) break;
    if (marking.resamples == options.max_attempts)
      throw Error(ErrorKind::MarkingNotFound,
                  "good clause " + std::to_string(*it) + " still violated after " +
                      std::to_string(options.max_attempts) + " resamples");
    for (Var v : formula.clauses[*it].vars())
      if (!cls.is_bad(v)) marking.is_marked[v] = coin(rng) ? 1 : 0;
    ++marking.resamples;
  }
  for (Var v = 1; v <= formula.n; ++v)
    if (marking.is_marked[v]) marking.marked.push_back(v);
  return marking;
}

std::vector<std::string> verify_marking(const Formula& formula, const Classification& cls,
                                        const Marking& marking) {
  std::vector<std::string> out;
  if (marking.is_marked.size() != formula.n + 1) {
    out.push_back("marking has wrong size");
    return out;
  }
  for (Var v = 1; v <= formula.n; ++v)
    if (marking.is_marked[v] && cls.is_bad(v)) out.push_back("bad variable " + std::to_string(v) + " marked");
  for (ClauseId c : cls.good_clauses) {
    std::size_t marked = 0, unmarked = 0;
    for (Var v : formula.clauses[c].vars()) {
      if (cls.is_bad(v)) continue;
      if (marking.is_marked[v]) ++marked;
      else ++unmarked;
    }
    if (Rational(Integer(marked)) * 10 < Rational(Integer(3 * formula.k)))
      out.push_back("clause " + std::to_string(c) + ": " + std::to_string(marked) + " marked");
    if (Rational(Integer(unmarked)) * 4 < Rational(Integer(formula.k)))
      out.push_back("clause " + std::to_string(c) + ": " + std::to_string(unmarked) +
                    " unmarked good");
  }
  return out;
}

BadSatAssignment find_bad_sat_assignment(const Formula& formula, const Classification& cls,
                                         const SearchOptions& options) {
  BadSatAssignment out{PartialAssignment(formula.n)};
  const auto components = bad_components(formula, cls);
  for (std::size_t index = 0; index < components.size(); ++index) {
    const auto& vars = components[index];
    std::vector<std::vector<Literal>> clauses;
    for (ClauseId c : cls.bad_clauses)
      if (std::binary_search(vars.begin(), vars.end(), formula.clauses[c].literals.front().var))
        clauses.push_back(formula.clauses[c].literals);
    bool exhausted = false;
    const auto solution = solve_component(vars, clauses, options, index, exhausted);
    if (!solution) {
      if (exhausted)
        throw Error(ErrorKind::BadComponentUnsat,
                    "bad component containing variable " + std::to_string(vars.front()) +
                        " is unsatisfiable");
      throw Error(ErrorKind::ComponentTooLarge,
                  "bad component of " + std::to_string(vars.size()) +
                      " variables exceeds the enumeration cap and resampling failed");
    }
    for (std::size_t i = 0; i < vars.size(); ++i) out.assignment.assign(vars[i], (*solution)[i]);
  }
  return out;
}

std::vector<std::string> verify_bad_sat_assignment(const Formula& formula,
                                                   const Classification& cls,
                                                   const BadSatAssignment& bad) {
  std::vector<std::string> out;
  for (Var v : bad.assignment.domain())
    if (!cls.is_bad(v)) out.push_back("good variable " + std::to_string(v) + " assigned");
  for (ClauseId c : cls.bad_clauses)
    if (!bad.assignment.satisfies(formula.clauses[c]))
      out.push_back("bad clause " + std::to_string(c) + " unsatisfied");
  return out;
}

std::size_t prefix_width(int k) {
  return std::max<std::size_t>(1, static_cast<std::size_t>((k + 19) / 20));
}

std::vector<Literal> truncated_clause(const Clause& clause, const Marking& marking, int k) {
  std::vector<Literal> out;
  const std::size_t width = prefix_width(k);
  for (const auto& lit : clause.ordered_literals()) {
    if (out.size() == width) break;
    if (marking.contains(lit.var)) out.push_back(lit);
  }
  return out;
}

PartialAssignment LambdaStar::prefix(std::size_t length) const {
  PartialAssignment out(assignment.n());
  for (std::size_t i = 0; i < length && i < order.size(); ++i)
    out.assign(order[i], *assignment.get(order[i]));
  return out;
}

LambdaStar find_lambda_star(const Formula& formula, const Classification& cls,
                            const Marking& marking, const SearchOptions& options) {
  LambdaStar out;
  out.assignment = PartialAssignment(formula.n);
  for (ClauseId c : cls.good_clauses) {
    auto truncated = truncated_clause(formula.clauses[c], marking, formula.k);
    if (truncated.empty())
      throw Error(ErrorKind::LambdaStarNotFound,
                  "good clause " + std::to_string(c) + " has no marked literal");
    out.clauses.push_back(c);
    out.truncated.push_back(std::move(truncated));
  }
  const auto components = literal_components(out.truncated, formula.n);
  for (std::size_t index = 0; index < components.size(); ++index) {
    const auto& vars = components[index];
    std::vector<std::vector<Literal>> clauses;
    for (const auto& clause : out.truncated)
      if (std::binary_search(vars.begin(), vars.end(), clause.front().var)) clauses.push_back(clause);
    bool exhausted = false;
    const auto solution = solve_component(vars, clauses, options, index, exhausted);
    if (!solution)
      throw Error(ErrorKind::LambdaStarNotFound,
                  exhausted ? "truncated formula unsatisfiable on the component of variable " +
                                  std::to_string(vars.front())
                            : "resampling budget exhausted on a component of " +
                                  std::to_string(vars.size()) + " variables");
    for (std::size_t i = 0; i < vars.size(); ++i) out.assignment.assign(vars[i], (*solution)[i]);
  }
  out.order = out.assignment.domain();
  return out;
}

std::vector<std::string> verify_lambda_star(const Formula& formula, const Classification& cls,
                                            const Marking& marking, const LambdaStar& lambda) {
  std::vector<std::string> out;
  const auto domain = lambda.assignment.domain();
  if (domain != lambda.order) out.push_back("order is not the ascending domain");
  for (Var v : domain)
    if (!marking.contains(v)) out.push_back("unmarked variable " + std::to_string(v) + " assigned");
  const std::size_t width = prefix_width(formula.k);
  for (ClauseId c : cls.good_clauses) {
    // Recompute the prefix directly from the raw literal list.
    std::vector<std::pair<Var, std::size_t>> keyed;
    const auto& lits = formula.clauses[c].literals;
    for (std::size_t i = 0; i < lits.size(); ++i)
      if (marking.contains(lits[i].var)) keyed.emplace_back(lits[i].var, i);
    std::sort(keyed.begin(), keyed.end());
    bool satisfied = false;
    for (std::size_t j = 0; j < keyed.size() && j < width; ++j)
      satisfied = satisfied || lambda.assignment.satisfies_literal(lits[keyed[j].second]);
    if (!satisfied)
      out.push_back("good clause " + std::to_string(c) + " not satisfied by its marked prefix");
  }
  return out;
}

std::vector<std::string> verify_prefix_property(const Formula& formula, const Classification& cls,
                                                const Marking& marking,
                                                const PartialAssignment& prefix) {
  std::vector<std::string> out;
  for (ClauseId c : cls.good_clauses) {
    const Clause& clause = formula.clauses[c];
    if (prefix.satisfies(clause)) continue;
    std::size_t free_marked = 0;
    for (Var v : clause.vars())
      if (marking.contains(v) && !prefix.bound(v)) ++free_marked;
    if (Rational(Integer(free_marked)) * 4 < Rational(Integer(formula.k)))
      out.push_back("good clause " + std::to_string(c) + " keeps only " +
                    std::to_string(free_marked) + " unassigned marked variables");
  }
  return out;
}

}  // namespace rksat

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rksat/classify.hpp"
#include "rksat/formula.hpp"

namespace rksat {

struct Marking {
  std::vector<char> is_marked;  // indexed by Var, size n + 1
  std::vector<Var> marked;      // ascending
  std::size_t resamples = 0;

  bool contains(Var v) const { return v < is_marked.size() && is_marked[v] != 0; }
};

struct MarkingOptions {
  std::uint64_t seed = 0;
  std::size_t max_attempts = 10000;
};

/// Marks good variables so every good clause keeps >= 3k/10 marked and
/// >= k/4 unmarked good variables. Throws MarkingNotFound naming a clause.
Marking find_marking(const Formula& formula, const Classification& cls,
                     const MarkingOptions& options = {});

/// Violations of the marking conditions; empty when valid.
std::vector<std::string> verify_marking(const Formula& formula, const Classification& cls,
                                        const Marking& marking);

struct SearchOptions {
  std::uint64_t seed = 0;
  std::size_t exhaustive_cap = 25;   // largest component searched by enumeration
  std::size_t max_resamples = 10000;  // per component, beyond the cap
};

/// Assignment of the bad variables satisfying every bad clause.
struct BadSatAssignment {
  PartialAssignment assignment;
};

BadSatAssignment find_bad_sat_assignment(const Formula& formula, const Classification& cls,
                                         const SearchOptions& options = {});
std::vector<std::string> verify_bad_sat_assignment(const Formula& formula,
                                                   const Classification& cls,
                                                   const BadSatAssignment& bad);

/// max(1, ceil(k/20)).
std::size_t prefix_width(int k);

/// The first prefix_width(k) marked literals of a good clause, consumption order.
std::vector<Literal> truncated_clause(const Clause& clause, const Marking& marking, int k);

struct LambdaStar {
  PartialAssignment assignment;
  std::vector<Var> order;                      // ascending variable index
  std::vector<ClauseId> clauses;               // good clauses, ascending
  std::vector<std::vector<Literal>> truncated;  // parallel to `clauses`

  /// The first `length` bindings of `order`.
  PartialAssignment prefix(std::size_t length) const;
};

LambdaStar find_lambda_star(const Formula& formula, const Classification& cls,
                            const Marking& marking, const SearchOptions& options = {});

std::vector<std::string> verify_lambda_star(const Formula& formula, const Classification& cls,
                                            const Marking& marking, const LambdaStar& lambda);

/// Surviving good clauses under `prefix` must keep >= k/4 unassigned marked variables.
std::vector<std::string> verify_prefix_property(const Formula& formula, const Classification& cls,
                                                const Marking& marking,
                                                const PartialAssignment& prefix);

}  // namespace rksat

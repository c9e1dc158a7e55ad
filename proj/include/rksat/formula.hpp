#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rksat {

using Var = std::uint32_t;        // 1-based variable index
using ClauseId = std::uint32_t;   // 0-based position in Formula::clauses

struct Literal {
  Var var = 0;
  bool positive = true;

  // DIMACS integer form: +v or -v.
  int dimacs() const { return positive ? static_cast<int>(var) : -static_cast<int>(var); }
  friend bool operator==(const Literal&, const Literal&) = default;
};

/// A clause of exactly k literals. Repeated literals, repeated variables and
/// complementary pairs are all permitted; satisfaction ignores multiplicity.
struct Clause {
  std::vector<Literal> literals;  // as generated / parsed

  /// Distinct variables, ascending.
  std::vector<Var> vars() const;
  /// Literals in consumption order: ascending variable index, original
  /// position breaking ties for a repeated variable.
  std::vector<Literal> ordered_literals() const;
  bool has_var(Var v) const;
  /// True iff some literal is a complementary pair (x and not x).
  bool tautological() const;

  friend bool operator==(const Clause&, const Clause&) = default;
};

struct Formula {
  int k = 0;
  Var n = 0;
  std::vector<Clause> clauses;

  std::size_t m() const { return clauses.size(); }
  double density() const { return n == 0 ? 0.0 : static_cast<double>(m()) / n; }

  friend bool operator==(const Formula&, const Formula&) = default;
};

/// Truth values for some variables of a formula over 1..n.
class PartialAssignment {
 public:
  PartialAssignment() = default;
  explicit PartialAssignment(Var n) : values_(n + 1, kUnset) {}

  Var n() const { return values_.empty() ? 0 : static_cast<Var>(values_.size() - 1); }
  bool bound(Var v) const { return v < values_.size() && values_[v] != kUnset; }
  std::optional<bool> get(Var v) const;
  /// Binds v. Throws InvalidArgument if v is out of range or already bound.
  void assign(Var v, bool value);
  /// Binds v, overwriting any existing binding.
  void set(Var v, bool value);
  void unset(Var v);
  std::vector<Var> domain() const;
  std::size_t size() const;

  bool satisfies_literal(const Literal& lit) const {
    return bound(lit.var) && (values_[lit.var] == 1) == lit.positive;
  }
  bool satisfies(const Clause& clause) const;

  friend bool operator==(const PartialAssignment&, const PartialAssignment&) = default;

 private:
  static constexpr std::int8_t kUnset = -1;
  std::vector<std::int8_t> values_;
};

/// One surviving clause of a simplified formula.
struct ReducedClause {
  ClauseId id = 0;                 // index into the original formula
  std::vector<Literal> literals;   // unassigned literals, consumption order
  std::vector<Var> vars;           // distinct, ascending
};

/// Phi^Lambda: satisfied clauses dropped, false literals removed.
struct SimplifiedFormula {
  Var n = 0;
  std::vector<ReducedClause> clauses;
  std::vector<Var> free_vars;         // V^Lambda: all variables Lambda leaves unbound
  std::vector<ClauseId> satisfied;    // removed because Lambda satisfies them
  std::vector<ClauseId> emptied;      // every literal false: Phi^Lambda is unsatisfiable

  bool unsatisfiable() const { return !emptied.empty(); }
};

Formula generate_random_formula(int k, Var n, std::size_t m, std::uint64_t seed);

SimplifiedFormula simplify_under(const Formula& formula, const PartialAssignment& assignment);

Formula parse_dimacs(std::string_view text);
std::string write_dimacs(const Formula& formula);

using AdjacencyList = std::vector<std::vector<std::uint32_t>>;

/// G_Phi (clauses adjacent iff they share a variable) and H_Phi (variables
/// adjacent iff they co-occur in a clause). H_Phi is indexed 0..n with row 0 unused.
struct DependencyGraphs {
  AdjacencyList clause_adjacency;
  AdjacencyList variable_adjacency;
  std::vector<std::vector<ClauseId>> occurrences;  // variable -> clauses containing it
};

DependencyGraphs build_dependency_graphs(const Formula& formula);

/// Maximal connected pieces of the subgraph induced by `subset`. Components
/// are listed by smallest member; members ascending.
std::vector<std::vector<std::uint32_t>> connected_components(
    const AdjacencyList& graph, const std::vector<std::uint32_t>& subset);

}  // namespace rksat

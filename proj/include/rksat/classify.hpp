#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rksat/formula.hpp"
#include "rksat/rational.hpp"

namespace rksat {

/// max(2, ceil(2^{k/300})). The asymptotic value ceil(2^{k/300}) is 1 for
/// every k < 300, which would make every variable high-degree.
std::uint32_t default_delta(int k);
/// ceil(2^{k/300}), unfloored.
std::uint32_t asymptotic_delta(int k);

/// Variables with at least `delta` literal occurrences, counted with multiplicity.
std::vector<Var> high_degree_vars(const Formula& formula, std::uint32_t delta);

/// The good/bad partition of variables and clauses.
struct Classification {
  std::uint32_t delta = 0;
  Rational bad_fraction;      // default 1/10
  Rational threshold;         // k * bad_fraction; a clause is over threshold iff |var(c) & V| >= threshold
  std::vector<Var> high_degree;
  std::vector<Var> bad_vars;
  std::vector<Var> good_vars;
  std::vector<ClauseId> bad_clauses;
  std::vector<ClauseId> good_clauses;
  std::size_t rounds = 0;     // loop iterations that enlarged the bad set

  std::vector<char> var_bad;     // indexed by Var, size n + 1
  std::vector<char> clause_bad;  // indexed by ClauseId

  bool is_bad(Var v) const { return var_bad[v] != 0; }
  bool is_bad_clause(ClauseId c) const { return clause_bad[c] != 0; }
};

Classification classify(const Formula& formula, std::uint32_t delta,
                        const Rational& bad_fraction = make_rational(1, 10));

/// One extra round of the propagation loop applied to `cls`; true iff nothing changes.
bool is_fixed_point(const Formula& formula, const Classification& cls);

/// Violations of the good/bad separation (good clauses under threshold, bad
/// clauses free of good variables). Empty when the classification is sound.
std::vector<std::string> check_separation(const Formula& formula, const Classification& cls);

/// G_{Phi,good}: good clauses adjacent iff they share a good variable.
/// Indexed by ClauseId; rows of bad clauses are empty.
AdjacencyList good_clause_graph(const Formula& formula, const Classification& cls);
/// H_{Phi,bad}: bad variables adjacent iff they co-occur in a bad clause.
AdjacencyList bad_variable_graph(const Formula& formula, const Classification& cls);

std::size_t max_degree(const AdjacencyList& graph);

/// Connected components of H_{Phi,bad}; their union is V_bad.
std::vector<std::vector<Var>> bad_components(const Formula& formula, const Classification& cls);

/// Closure of `seed` under "absorb var(c) whenever |var(c) & BC| >= k*bad_fraction
/// and c contributes a new variable", lowest clause index first.
std::vector<Var> bc_closure(const Formula& formula, const std::vector<Var>& seed,
                            const Rational& bad_fraction = make_rational(1, 10));

// ---------------------------------------------------------------------------
// Structure audit

struct OverlapQuery {
  std::vector<Var> vars;
  int at_least = 2;
};

struct AuditOptions {
  std::vector<OverlapQuery> overlap_queries;
  std::size_t expansion_max_size = 3;       // largest connected clause set enumerated
  std::size_t expansion_max_sets = 200000;  // enumeration budget across all sizes
  std::size_t neighborhood_samples = 32;
  std::size_t neighborhood_max_size = 6;
  std::uint64_t seed = 0;
};

struct ComponentAudit {
  std::vector<Var> vars;
  std::size_t high_degree = 0;
  double size_over_high_degree = 0.0;  // |S| / |HD(S)|, 0 when HD(S) is empty
};

struct OverlapResult {
  std::vector<Var> vars;
  int at_least = 0;
  std::size_t clauses = 0;  // clauses with >= at_least variables from vars
  double bound = 0.0;       // 2/(b-1) * |Y|
};

struct ExpansionResult {
  std::size_t size = 0;          // |Y|
  std::size_t sets = 0;          // connected clause sets of this size enumerated
  std::size_t min_vars = 0;      // min |var(Y)|
  double min_ratio = 0.0;        // min |var(Y)| / (k |Y|)
  bool truncated = false;
};

struct NeighborhoodSample {
  std::vector<Var> vars;
  std::size_t closed_neighborhood = 0;  // |Gamma^+(V)| in H_Phi
  double bound = 0.0;                   // 3 k^3 alpha max(|V|, k ln n)
};

struct BoundLine {
  std::string name;
  std::string formula;
  double bound = 0.0;
  double measured = 0.0;
};

struct AuditReport {
  std::size_t high_degree = 0;
  std::size_t bad_vars = 0;
  std::size_t bad_clauses = 0;
  std::size_t good_graph_max_degree = 0;
  std::vector<ComponentAudit> components;
  std::vector<OverlapResult> overlaps;
  std::vector<ExpansionResult> expansion;
  bool expansion_truncated = false;
  std::vector<NeighborhoodSample> neighborhoods;
  std::vector<BoundLine> bounds;
};

std::size_t count_overlap(const Formula& formula, const std::vector<Var>& vars, int at_least);
std::vector<Var> closed_neighborhood(const DependencyGraphs& graphs, const std::vector<Var>& vars);

AuditReport audit(const Formula& formula, const Classification& cls, const AuditOptions& options = {});

}  // namespace rksat

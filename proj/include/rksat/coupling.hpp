#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rksat/classify.hpp"
#include "rksat/formula.hpp"
#include "rksat/marking.hpp"
#include "rksat/rational.hpp"

namespace rksat {

/// Everything a coupling tree for pivot v* under prefix Lambda depends on.
/// Clauses are the surviving clauses of Phi^Lambda, indexed 0..size-1 in
/// ascending original id.
struct TreeContext {
  const Formula* formula = nullptr;
  const Classification* cls = nullptr;
  const Marking* marking = nullptr;
  PartialAssignment lambda;
  Var pivot = 0;

  SimplifiedFormula reduced;
  std::vector<std::vector<Var>> marked;          // per clause: unassigned marked vars, literal order
  std::vector<char> clause_bad;                  // per clause
  std::vector<std::vector<std::uint32_t>> clauses_of;  // var -> clauses containing it
  std::vector<char> free_var;                    // V^Lambda membership, indexed by Var
  AdjacencyList variable_graph;                  // H of Phi^Lambda

  std::size_t clause_count() const { return reduced.clauses.size(); }
  const ReducedClause& clause(std::uint32_t c) const { return reduced.clauses[c]; }
};

/// Throws PivotAssigned / PivotNotMarked.
TreeContext make_context(const Formula& formula, const Classification& cls,
                         const Marking& marking, const PartialAssignment& lambda, Var pivot);

enum class NodeKind { Internal, Leaf, Truncating };
std::string_view to_string(NodeKind kind);

namespace var_flag {
inline constexpr std::uint8_t interior = 1;  // in V_I
inline constexpr std::uint8_t set = 2;       // in V_set
inline constexpr std::uint8_t a1 = 4;        // A_1 value (meaningful when set)
inline constexpr std::uint8_t a2 = 8;        // A_2 value
}  // namespace var_flag

namespace clause_flag {
inline constexpr std::uint8_t remaining = 1;  // in C_rem
inline constexpr std::uint8_t failed = 2;     // in F
inline constexpr std::uint8_t bad = 4;        // reasons
inline constexpr std::uint8_t disagree = 8;
inline constexpr std::uint8_t one = 16;
inline constexpr std::uint8_t two = 32;
inline constexpr std::uint8_t reasons = bad | disagree | one | two;
}  // namespace clause_flag

struct LeafRatio {
  Integer n1;
  Integer n2;
  Rational r;
};

struct CouplingNode {
  int id = -1;
  int parent = -1;
  int slot = -1;                         // position among the parent's children
  std::array<int, 4> children{-1, -1, -1, -1};  // index (tau1 ? 0 : 2) + (tau2 ? 0 : 1)
  NodeKind kind = NodeKind::Leaf;
  std::size_t depth = 0;
  std::vector<std::uint8_t> vars;        // var_flag bits, indexed by Var
  std::vector<std::uint8_t> clauses;     // clause_flag bits, indexed by context clause
  std::optional<std::uint32_t> first_clause;
  std::optional<Var> first_var;
  std::optional<LeafRatio> ratio;

  bool interior(Var v) const { return vars[v] & var_flag::interior; }
  bool in_set(Var v) const { return vars[v] & var_flag::set; }
  bool a1(Var v) const { return vars[v] & var_flag::a1; }
  bool a2(Var v) const { return vars[v] & var_flag::a2; }
  bool remaining(std::uint32_t c) const { return clauses[c] & clause_flag::remaining; }
  bool failed(std::uint32_t c) const { return clauses[c] & clause_flag::failed; }
  std::uint8_t reasons(std::uint32_t c) const { return clauses[c] & clause_flag::reasons; }

  std::vector<Var> interior_vars() const;
  std::vector<Var> set_vars() const;
  /// A_i as a partial assignment over V_set (i in {1, 2}).
  PartialAssignment assignment(int i) const;
};

inline constexpr int child_index(bool tau1, bool tau2) { return (tau1 ? 0 : 2) + (tau2 ? 0 : 1); }

/// Truncation depth L; nullopt means never truncate.
using Depth = std::optional<std::size_t>;

CouplingNode make_root(const TreeContext& ctx);

/// Leaf iff |V_I| <= L and every remaining clause lies inside V_I u V_set or
/// misses V_I; truncating iff |V_I| > L. Sets first_clause / first_var for
/// internal nodes.
NodeKind classify_node(const TreeContext& ctx, CouplingNode& node, Depth L);

/// The four children of an internal node, in child_index order.
std::array<CouplingNode, 4> make_children(const TreeContext& ctx, const CouplingNode& node);

/// N_1, N_2 over assignments of V_I \ V_set without throwing on zero.
std::pair<Integer, Integer> interior_counts(const TreeContext& ctx, const CouplingNode& node,
                                            std::size_t enumeration_cap = 24);
/// r = N_1 / N_2. Throws EnumerationCapExceeded or ZeroCount.
LeafRatio compute_r(const TreeContext& ctx, const CouplingNode& node,
                    std::size_t enumeration_cap = 24);

struct TreeOptions {
  Depth truncation_depth;  // nullopt: infinite
  std::size_t node_cap = 200000;
  std::size_t enumeration_cap = 24;
};

struct TreeStats {
  std::size_t nodes = 0;
  std::size_t internal = 0;
  std::size_t leaves = 0;
  std::size_t truncating = 0;
  std::size_t max_depth = 0;
  std::size_t max_interior = 0;
  std::size_t max_set = 0;  // max |V_set| over nodes
};

struct CouplingTree {
  TreeContext ctx;
  Depth truncation_depth;
  std::vector<CouplingNode> nodes;  // DFS preorder; nodes[0] is the root
  TreeStats stats;

  const CouplingNode& root() const { return nodes.front(); }
};

/// Expands the whole tree and computes r at every leaf.
/// Throws NodeCapExceeded (message carries partial statistics).
CouplingTree build_tree(const Formula& formula, const Classification& cls, const Marking& marking,
                        const PartialAssignment& lambda, Var pivot, const TreeOptions& options = {});

/// Violations of the node properties (and of the tree shape); empty when all hold.
std::vector<std::string> check_node(const TreeContext& ctx, const CouplingNode& node);
std::vector<std::string> check_tree(const CouplingTree& tree);

/// The paper's default truncation depth C0 (3 k^2 Delta) ceil(ln(n / eps)).
std::size_t paper_truncation_depth(int k, std::uint32_t delta, Var n, const Rational& eps,
                                   std::size_t c0 = 1);

}  // namespace rksat

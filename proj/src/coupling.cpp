#include "rksat/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rksat/errors.hpp"

namespace rksat {

TreeContext make_context(const Formula& formula, const Classification& cls,
                         const Marking& marking, const PartialAssignment& lambda, Var pivot) {
  if (pivot == 0 || pivot > formula.n)
    throw Error(ErrorKind::InvalidArgument, "pivot " + std::to_string(pivot) + " out of range");
  if (lambda.bound(pivot))
    throw Error(ErrorKind::PivotAssigned, "pivot " + std::to_string(pivot) + " already assigned");
  if (!marking.contains(pivot) || cls.is_bad(pivot))
    throw Error(ErrorKind::PivotNotMarked, "pivot " + std::to_string(pivot) + " is not marked");

  TreeContext ctx;
  ctx.formula = &formula;
  ctx.cls = &cls;
  ctx.marking = &marking;
  ctx.lambda = lambda;
  ctx.pivot = pivot;
  ctx.reduced = simplify_under(formula, lambda);
  ctx.free_var.assign(formula.n + 1, 0);
  for (Var v : ctx.reduced.free_vars) ctx.free_var[v] = 1;
  ctx.clauses_of.assign(formula.n + 1, {});
  ctx.variable_graph.assign(formula.n + 1, {});
  for (std::uint32_t c = 0; c < ctx.reduced.clauses.size(); ++c) {
    const ReducedClause& clause = ctx.reduced.clauses[c];
    std::vector<Var> marked;
    for (const auto& lit : clause.literals)
      if (marking.contains(lit.var) &&
          std::find(marked.begin(), marked.end(), lit.var) == marked.end())
        marked.push_back(lit.var);
    ctx.marked.push_back(std::move(marked));
    ctx.clause_bad.push_back(cls.is_bad_clause(clause.id) ? 1 : 0);
    for (Var v : clause.vars) ctx.clauses_of[v].push_back(c);
    for (std::size_t i = 0; i < clause.vars.size(); ++i)
      for (std::size_t j = i + 1; j < clause.vars.size(); ++j) {
        ctx.variable_graph[clause.vars[i]].push_back(clause.vars[j]);
        ctx.variable_graph[clause.vars[j]].push_back(clause.vars[i]);
      }
  }
  for (auto& row : ctx.variable_graph) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return ctx;
}

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Internal:
      return "internal";
    case NodeKind::Leaf:
      return "leaf";
    case NodeKind::Truncating:
      return "truncating";
  }
  return "?";
}

std::vector<Var> CouplingNode::interior_vars() const {
  std::vector<Var> out;
  for (Var v = 1; v < vars.size(); ++v)
    if (interior(v)) out.push_back(v);
  return out;
}

std::vector<Var> CouplingNode::set_vars() const {
  std::vector<Var> out;
  for (Var v = 1; v < vars.size(); ++v)
    if (in_set(v)) out.push_back(v);
  return out;
}

PartialAssignment CouplingNode::assignment(int i) const {
  PartialAssignment out(vars.empty() ? 0 : static_cast<Var>(vars.size() - 1));
  for (Var v = 1; v < vars.size(); ++v)
    if (in_set(v)) out.assign(v, i == 1 ? a1(v) : a2(v));
  return out;
}

namespace {

bool satisfied_by(const ReducedClause& clause, const CouplingNode& node, int i) {
  for (const auto& lit : clause.literals)
    if (node.in_set(lit.var) && (i == 1 ? node.a1(lit.var) : node.a2(lit.var)) == lit.positive)
      return true;
  return false;
}

bool meets_interior(const ReducedClause& clause, const CouplingNode& node) {
  return std::any_of(clause.vars.begin(), clause.vars.end(),
                     [&](Var v) { return node.interior(v); });
}

bool leaves_interior(const ReducedClause& clause, const CouplingNode& node) {
  return std::any_of(clause.vars.begin(), clause.vars.end(),
                     [&](Var v) { return !node.interior(v); });
}

bool inside_closed(const ReducedClause& clause, const CouplingNode& node) {
  return std::all_of(clause.vars.begin(), clause.vars.end(),
                     [&](Var v) { return node.interior(v) || node.in_set(v); });
}

bool marked_all_set(const TreeContext& ctx, std::uint32_t c, const CouplingNode& node) {
  return std::all_of(ctx.marked[c].begin(), ctx.marked[c].end(),
                     [&](Var v) { return node.in_set(v); });
}

void absorb(const ReducedClause& clause, CouplingNode& node) {
  for (Var v : clause.vars)
    if (!node.in_set(v)) node.vars[v] |= var_flag::interior;
}

// Drops remaining clauses satisfied by both A_1 and A_2.
void sweep(const TreeContext& ctx, CouplingNode& node) {
  for (std::uint32_t c = 0; c < ctx.clause_count(); ++c)
    if (node.remaining(c) && satisfied_by(ctx.clause(c), node, 1) &&
        satisfied_by(ctx.clause(c), node, 2))
      node.clauses[c] &= static_cast<std::uint8_t>(~clause_flag::remaining);
}

// The failed-clause and bad-clause loops of child creation, alternated until
// neither fires.
void close(const TreeContext& ctx, CouplingNode& node) {
  const std::uint32_t m = static_cast<std::uint32_t>(ctx.clause_count());
  for (bool changed = true; changed;) {
    changed = false;
    for (std::uint32_t c = 0; c < m; ++c) {
      if (!node.remaining(c) || ctx.clause_bad[c]) continue;
      const ReducedClause& clause = ctx.clause(c);
      if (!meets_interior(clause, node) || !leaves_interior(clause, node)) continue;
      if (!marked_all_set(ctx, c, node)) continue;
      std::uint8_t reasons = 0;
      if (!satisfied_by(clause, node, 1)) reasons |= clause_flag::one;
      if (!satisfied_by(clause, node, 2)) reasons |= clause_flag::two;
      if (reasons == 0)
        throw Error(ErrorKind::InvariantViolation,
                    "failed clause " + std::to_string(clause.id) + " satisfied by both sides");
      node.clauses[c] = static_cast<std::uint8_t>((node.clauses[c] | clause_flag::failed | reasons) &
                                                  ~clause_flag::remaining);
      absorb(clause, node);
      changed = true;
      c = static_cast<std::uint32_t>(-1);  // rescan from the lowest index
    }
    for (std::uint32_t c = 0; c < m; ++c) {
      if (!node.remaining(c) || !ctx.clause_bad[c]) continue;
      const ReducedClause& clause = ctx.clause(c);
      if (!meets_interior(clause, node)) continue;
      node.clauses[c] = static_cast<std::uint8_t>(
          (node.clauses[c] | clause_flag::failed | clause_flag::bad) & ~clause_flag::remaining);
      absorb(clause, node);
      changed = true;
      c = static_cast<std::uint32_t>(-1);
    }
  }
}

std::string describe(const TreeStats& stats) {
  std::ostringstream out;
  out << "nodes=" << stats.nodes << " internal=" << stats.internal << " leaves=" << stats.leaves
      << " truncating=" << stats.truncating << " max_depth=" << stats.max_depth;
  return out.str();
}

}  // namespace

CouplingNode make_root(const TreeContext& ctx) {
  CouplingNode root;
  root.vars.assign(ctx.formula->n + 1, 0);
  root.clauses.assign(ctx.clause_count(), clause_flag::remaining);
  root.vars[ctx.pivot] = var_flag::interior | var_flag::set | var_flag::a1;
  for (auto c : ctx.clauses_of[ctx.pivot]) root.clauses[c] |= clause_flag::failed | clause_flag::disagree;
  sweep(ctx, root);
  close(ctx, root);
  return root;
}

NodeKind classify_node(const TreeContext& ctx, CouplingNode& node, Depth L) {
  node.first_clause.reset();
  node.first_var.reset();
  std::size_t interior = 0;
  for (Var v = 1; v < node.vars.size(); ++v) interior += node.interior(v) ? 1 : 0;
  if (L && interior > *L) return node.kind = NodeKind::Truncating;
  bool leaf = true;
  for (std::uint32_t c = 0; c < ctx.clause_count() && leaf; ++c) {
    if (!node.remaining(c)) continue;
    const ReducedClause& clause = ctx.clause(c);
    leaf = inside_closed(clause, node) || !meets_interior(clause, node);
  }
  if (leaf) return node.kind = NodeKind::Leaf;
  for (std::uint32_t c = 0; c < ctx.clause_count(); ++c) {
    if (!node.remaining(c)) continue;
    const ReducedClause& clause = ctx.clause(c);
    if (!meets_interior(clause, node) || !leaves_interior(clause, node)) continue;
    for (Var v : ctx.marked[c])
      if (!node.in_set(v)) {
        node.first_clause = c;
        node.first_var = v;
        return node.kind = NodeKind::Internal;
      }
    throw Error(ErrorKind::InvariantViolation,
                "first clause " + std::to_string(clause.id) + " has no unset marked variable");
  }
  throw Error(ErrorKind::InvariantViolation, "node is neither a leaf nor has a first clause");
}

std::array<CouplingNode, 4> make_children(const TreeContext& ctx, const CouplingNode& node) {
  if (node.kind != NodeKind::Internal || !node.first_var)
    throw Error(ErrorKind::InvariantViolation, "make_children on a node that is not internal");
  const Var u = *node.first_var;
  std::array<CouplingNode, 4> out;
  for (int t1 = 1; t1 >= 0; --t1)
    for (int t2 = 1; t2 >= 0; --t2) {
      CouplingNode child;
      child.vars = node.vars;
      child.clauses = node.clauses;
      child.depth = node.depth + 1;
      child.vars[u] |= var_flag::set;
      if (t1) child.vars[u] |= var_flag::a1;
      if (t2) child.vars[u] |= var_flag::a2;
      if (t1 != t2) {
        child.vars[u] |= var_flag::interior;
        for (auto c : ctx.clauses_of[u]) child.clauses[c] |= clause_flag::failed | clause_flag::disagree;
      }
      sweep(ctx, child);
      close(ctx, child);
      out[child_index(t1 == 1, t2 == 1)] = std::move(child);
    }
  return out;
}

std::pair<Integer, Integer> interior_counts(const TreeContext& ctx, const CouplingNode& node,
                                            std::size_t enumeration_cap) {
  std::vector<Var> free;
  for (Var v = 1; v < node.vars.size(); ++v)
    if (node.interior(v) && !node.in_set(v)) free.push_back(v);
  if (free.size() > enumeration_cap || free.size() >= 63)
    throw Error(ErrorKind::EnumerationCapExceeded,
                std::to_string(free.size()) + " interior variables exceed the enumeration cap");
  auto local = [&](Var v) {
    return static_cast<std::size_t>(std::lower_bound(free.begin(), free.end(), v) - free.begin());
  };
  std::array<Integer, 2> counts;
  for (int i = 1; i <= 2; ++i) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> masks;
    bool impossible = false;
    for (std::uint32_t c = 0; c < ctx.clause_count(); ++c) {
      const ReducedClause& clause = ctx.clause(c);
      if (!inside_closed(clause, node) || satisfied_by(clause, node, i)) continue;
      std::uint64_t pos = 0, neg = 0;
      for (const auto& lit : clause.literals)
        if (!node.in_set(lit.var)) (lit.positive ? pos : neg) |= std::uint64_t{1} << local(lit.var);
      if (pos == 0 && neg == 0) impossible = true;
      masks.emplace_back(pos, neg);
    }
    std::uint64_t count = 0;
    if (!impossible) {
      const std::uint64_t total = std::uint64_t{1} << free.size();
      for (std::uint64_t x = 0; x < total; ++x) {
        bool ok = true;
        for (const auto& [pos, neg] : masks)
          if (((x & pos) | (~x & neg)) == 0) {
            ok = false;
            break;
          }
        count += ok ? 1 : 0;
      }
    }
    counts[i - 1] = Integer(count);
  }
  return {counts[0], counts[1]};
}

LeafRatio compute_r(const TreeContext& ctx, const CouplingNode& node, std::size_t enumeration_cap) {
  auto [n1, n2] = interior_counts(ctx, node, enumeration_cap);
  if (n1 == 0 || n2 == 0)
    throw Error(ErrorKind::ZeroCount, "node " + std::to_string(node.id) + " has N1=" +
                                          n1.str() + " N2=" + n2.str());
  LeafRatio out{n1, n2, Rational(n1, n2)};
  return out;
}

CouplingTree build_tree(const Formula& formula, const Classification& cls, const Marking& marking,
                        const PartialAssignment& lambda, Var pivot, const TreeOptions& options) {
  CouplingTree tree;
  tree.ctx = make_context(formula, cls, marking, lambda, pivot);
  tree.truncation_depth = options.truncation_depth;
  const TreeContext& ctx = tree.ctx;

  struct Pending {
    CouplingNode node;
    int parent;
    int slot;
  };
  std::vector<Pending> stack;
  stack.push_back({make_root(ctx), -1, -1});
  while (!stack.empty()) {
    Pending item = std::move(stack.back());
    stack.pop_back();
    if (tree.nodes.size() == options.node_cap)
      throw Error(ErrorKind::NodeCapExceeded,
                  "node cap " + std::to_string(options.node_cap) + " reached (" +
                      describe(tree.stats) + ")");
    CouplingNode node = std::move(item.node);
    node.id = static_cast<int>(tree.nodes.size());
    node.parent = item.parent;
    node.slot = item.slot;
    if (item.parent >= 0) tree.nodes[item.parent].children[item.slot] = node.id;
    classify_node(ctx, node, options.truncation_depth);

    auto& stats = tree.stats;
    ++stats.nodes;
    stats.max_depth = std::max(stats.max_depth, node.depth);
    stats.max_interior = std::max(stats.max_interior, node.interior_vars().size());
    stats.max_set = std::max(stats.max_set, node.set_vars().size());
    switch (node.kind) {
      case NodeKind::Internal: {
        ++stats.internal;
        auto children = make_children(ctx, node);
        for (int slot = 3; slot >= 0; --slot) stack.push_back({std::move(children[slot]), node.id, slot});
        break;
      }
      case NodeKind::Leaf:
        ++stats.leaves;
        node.ratio = compute_r(ctx, node, options.enumeration_cap);
        break;
      case NodeKind::Truncating:
        ++stats.truncating;
        break;
    }
    tree.nodes.push_back(std::move(node));
  }
  return tree;
}

std::vector<std::string> check_node(const TreeContext& ctx, const CouplingNode& node) {
  std::vector<std::string> out;
  const std::string where = "node " + std::to_string(node.id) + ": ";
  auto fail = [&](const std::string& what) { out.push_back(where + what); };
  const Var n = ctx.formula->n;
  if (node.vars.size() != n + 1 || node.clauses.size() != ctx.clause_count()) {
    fail("malformed storage");
    return out;
  }
  const Var pivot = ctx.pivot;

  // P1
  if (!node.interior(pivot) || !node.in_set(pivot)) fail("P1: pivot not in V_set and V_I");
  for (Var v = 1; v <= n; ++v) {
    if ((node.interior(v) || node.in_set(v)) && !ctx.free_var[v])
      fail("variable " + std::to_string(v) + " bound by Lambda appears in the node");
    if (node.in_set(v) && !ctx.marking->contains(v))
      fail("V_set variable " + std::to_string(v) + " is not marked");
    if (!node.in_set(v) && (node.a1(v) || node.a2(v)))
      fail("assignment outside V_set at " + std::to_string(v));
    // P7
    if (node.in_set(v) && !node.interior(v) && node.a1(v) != node.a2(v))
      fail("P7: disagreement at " + std::to_string(v) + " outside V_I");
  }

  for (std::uint32_t c = 0; c < ctx.clause_count(); ++c) {
    const ReducedClause& clause = ctx.clause(c);
    const std::string name = "clause " + std::to_string(clause.id);
    const bool in_interior = std::all_of(clause.vars.begin(), clause.vars.end(),
                                         [&](Var v) { return node.interior(v); });
    const bool outside = !meets_interior(clause, node);
    const bool marked_left = !marked_all_set(ctx, c, node);
    const bool good = !ctx.clause_bad[c];
    const bool sat1 = satisfied_by(clause, node, 1);
    const bool sat2 = satisfied_by(clause, node, 2);
    const bool closed = inside_closed(clause, node);
    if (node.remaining(c)) {
      // P2, P3
      if (!in_interior && !outside && !marked_left) fail("P2: " + name);
      if (!good && !outside) fail("P3: bad " + name + " meets V_I");
    } else if (!(sat1 && sat2) && !closed) {
      fail("P4: removed " + name + " neither satisfied by both nor inside V_I u V_set");
    }
    // P8
    if (node.failed(c) != (node.reasons(c) != 0)) fail("P8: " + name);
    if (!node.failed(c)) continue;
    const auto reasons = node.reasons(c);
    // P9.1
    if (((reasons & clause_flag::bad) != 0) != !good) fail("P9.1: " + name);
    // P9.2
    bool disagrees = false;
    for (Var v : clause.vars)
      disagrees = disagrees || (node.interior(v) && node.in_set(v) && node.a1(v) != node.a2(v));
    if (((reasons & clause_flag::disagree) != 0) != disagrees) fail("P9.2: " + name);
    // P9.3, checked forward against V_I u V_set and backward on removed good clauses
    for (int i = 1; i <= 2; ++i) {
      const auto flag = i == 1 ? clause_flag::one : clause_flag::two;
      const bool sat = i == 1 ? sat1 : sat2;
      const bool conditions = closed && !marked_left && !sat;
      if ((reasons & flag) && !conditions) fail("P9.3: " + name + " reason " + std::to_string(i));
      if (!(reasons & flag) && conditions && good && !node.remaining(c))
        fail("P9.3: " + name + " missing reason " + std::to_string(i));
    }
  }

  // P5 on the variable graph of Phi^Lambda
  const auto interior = node.interior_vars();
  if (!interior.empty() && connected_components(ctx.variable_graph, interior).size() != 1)
    fail("P5: V_I not connected");
  // P6
  for (Var v : interior) {
    if (v == pivot && ctx.clauses_of[v].empty()) continue;
    bool covered = false;
    for (auto c : ctx.clauses_of[v]) covered = covered || node.failed(c);
    if (!covered) fail("P6: V_I variable " + std::to_string(v) + " in no failed clause");
  }
  return out;
}

std::vector<std::string> check_tree(const CouplingTree& tree) {
  std::vector<std::string> out;
  const TreeContext& ctx = tree.ctx;
  if (tree.nodes.empty()) return {"empty tree"};
  const CouplingNode& root = tree.root();
  if (!root.a1(ctx.pivot) || root.a2(ctx.pivot)) out.push_back("root does not split the pivot T/F");
  if (root.set_vars() != std::vector<Var>{ctx.pivot}) out.push_back("root V_set is not {pivot}");
  for (auto c : ctx.clauses_of[ctx.pivot])
    if (!(root.reasons(c) & clause_flag::disagree))
      out.push_back("root: pivot clause " + std::to_string(ctx.clause(c).id) + " lacks disagree");

  for (const auto& node : tree.nodes) {
    for (auto& line : check_node(ctx, node)) out.push_back(std::move(line));
    CouplingNode copy = node;
    std::optional<NodeKind> kind;
    try {
      kind = classify_node(ctx, copy, tree.truncation_depth);
    } catch (const Error& e) {
      out.push_back("node " + std::to_string(node.id) + ": " + e.what());
    }
    if (kind && *kind != node.kind) out.push_back("node " + std::to_string(node.id) + ": kind mismatch");
    if (node.kind == NodeKind::Leaf && !node.ratio)
      out.push_back("leaf " + std::to_string(node.id) + " without ratio");
    if (node.kind != NodeKind::Internal) {
      if (node.children != std::array<int, 4>{-1, -1, -1, -1})
        out.push_back("non-internal node " + std::to_string(node.id) + " has children");
      continue;
    }
    const Var u = *node.first_var;
    for (int slot = 0; slot < 4; ++slot) {
      const int id = node.children[slot];
      if (id < 0 || id >= static_cast<int>(tree.nodes.size())) {
        out.push_back("node " + std::to_string(node.id) + " missing child");
        continue;
      }
      const CouplingNode& child = tree.nodes[id];
      const bool t1 = slot < 2, t2 = slot % 2 == 0;
      std::string where = "child " + std::to_string(id) + ": ";
      if (child.parent != node.id) out.push_back(where + "wrong parent");
      if (!child.in_set(u) || child.a1(u) != t1 || child.a2(u) != t2)
        out.push_back(where + "first variable not set per slot");
      for (Var v = 1; v < node.vars.size(); ++v) {
        if (node.in_set(v) && (!child.in_set(v) || child.a1(v) != node.a1(v) || child.a2(v) != node.a2(v)))
          out.push_back(where + "V_set or assignments not inherited");
        if (node.interior(v) && !child.interior(v)) out.push_back(where + "V_I shrank");
        if (v != u && !node.in_set(v) && child.in_set(v)) out.push_back(where + "V_set grew beyond u");
      }
      for (std::uint32_t c = 0; c < ctx.clause_count(); ++c) {
        if (node.failed(c) && !child.failed(c)) out.push_back(where + "F shrank");
        if (!node.remaining(c) && child.remaining(c)) out.push_back(where + "C_rem grew");
      }
    }
    // Siblings share A_1 when tau1 agrees and A_2 when tau2 agrees.
    auto same = [&](int a, int b, int i) {
      const auto& x = tree.nodes[node.children[a]];
      const auto& y = tree.nodes[node.children[b]];
      return x.assignment(i) == y.assignment(i);
    };
    if (std::all_of(node.children.begin(), node.children.end(), [](int id) { return id >= 0; }) &&
        (!same(0, 1, 1) || !same(2, 3, 1) || !same(0, 2, 2) || !same(1, 3, 2)))
      out.push_back("node " + std::to_string(node.id) + ": sibling assignments differ");
  }
  return out;
}

std::size_t paper_truncation_depth(int k, std::uint32_t delta, Var n, const Rational& eps,
                                   std::size_t c0) {
  const double ratio = static_cast<double>(n) / to_double(eps);
  const auto log_term = static_cast<std::size_t>(std::ceil(std::log(std::max(ratio, 1.0))));
  return c0 * 3 * static_cast<std::size_t>(k) * static_cast<std::size_t>(k) * delta *
         std::max<std::size_t>(log_term, 1);
}

}  // namespace rksat

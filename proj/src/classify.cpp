#include "rksat/classify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rksat/errors.hpp"

namespace rksat {

std::uint32_t asymptotic_delta(int k) {
  return static_cast<std::uint32_t>(std::ceil(std::exp2(static_cast<double>(k) / 300.0)));
}

std::uint32_t default_delta(int k) { return std::max<std::uint32_t>(2, asymptotic_delta(k)); }

std::vector<Var> high_degree_vars(const Formula& formula, std::uint32_t delta) {
  if (delta < 1) throw Error(ErrorKind::InvalidArgument, "delta must be >= 1");
  std::vector<std::size_t> occurrences(formula.n + 1, 0);
  for (const auto& clause : formula.clauses)
    for (const auto& lit : clause.literals) ++occurrences[lit.var];
  std::vector<Var> out;
  for (Var v = 1; v <= formula.n; ++v)
    if (occurrences[v] >= delta) out.push_back(v);
  return out;
}

namespace {

std::vector<std::vector<Var>> clause_vars(const Formula& formula) {
  std::vector<std::vector<Var>> out;
  out.reserve(formula.clauses.size());
  for (const auto& clause : formula.clauses) out.push_back(clause.vars());
  return out;
}

std::vector<char> over_threshold(const std::vector<std::vector<Var>>& vars_of,
                                 const std::vector<char>& in_set, const Rational& threshold) {
  std::vector<char> out(vars_of.size(), 0);
  for (std::size_t c = 0; c < vars_of.size(); ++c) {
    std::size_t hits = 0;
    for (Var v : vars_of[c]) hits += in_set[v] ? 1 : 0;
    out[c] = at_least(hits, threshold) ? 1 : 0;
  }
  return out;
}

}  // namespace

Classification classify(const Formula& formula, std::uint32_t delta, const Rational& bad_fraction) {
  if (bad_fraction <= 0 || bad_fraction > 1)
    throw Error(ErrorKind::InvalidArgument, "bad_fraction must lie in (0, 1]");
  Classification cls;
  cls.delta = delta;
  cls.bad_fraction = bad_fraction;
  cls.threshold = Rational(formula.k) * bad_fraction;
  cls.high_degree = high_degree_vars(formula, delta);

  const auto vars_of = clause_vars(formula);
  std::vector<char> bad(formula.n + 1, 0);
  for (Var v : cls.high_degree) bad[v] = 1;
  std::vector<char> bad_clause = over_threshold(vars_of, bad, cls.threshold);

  // V_i <- V_{i-1} u var(C_{i-1}); C_i <- clauses over threshold in V_i; until V_i = V_{i-1}.
  for (;;) {
    std::vector<char> next = bad;
    for (std::size_t c = 0; c < vars_of.size(); ++c)
      if (bad_clause[c])
        for (Var v : vars_of[c]) next[v] = 1;
    const bool grew = next != bad;
    bad = std::move(next);
    bad_clause = over_threshold(vars_of, bad, cls.threshold);
    if (!grew) break;
    ++cls.rounds;
  }

  cls.var_bad = bad;
  cls.clause_bad = bad_clause;
  for (Var v = 1; v <= formula.n; ++v) (bad[v] ? cls.bad_vars : cls.good_vars).push_back(v);
  for (ClauseId c = 0; c < formula.clauses.size(); ++c)
    (bad_clause[c] ? cls.bad_clauses : cls.good_clauses).push_back(c);
  return cls;
}

bool is_fixed_point(const Formula& formula, const Classification& cls) {
  const auto vars_of = clause_vars(formula);
  std::vector<char> next = cls.var_bad;
  for (ClauseId c : cls.bad_clauses)
    for (Var v : vars_of[c]) next[v] = 1;
  if (next != cls.var_bad) return false;
  return over_threshold(vars_of, next, cls.threshold) == cls.clause_bad;
}

std::vector<std::string> check_separation(const Formula& formula, const Classification& cls) {
  std::vector<std::string> out;
  for (ClauseId c = 0; c < formula.clauses.size(); ++c) {
    std::size_t bad = 0, good = 0;
    for (Var v : formula.clauses[c].vars()) (cls.is_bad(v) ? bad : good) += 1;
    if (cls.is_bad_clause(c) && good > 0)
      out.push_back("bad clause " + std::to_string(c) + " has " + std::to_string(good) +
                    " good variables");
    if (!cls.is_bad_clause(c) && at_least(bad, cls.threshold))
      out.push_back("good clause " + std::to_string(c) + " has " + std::to_string(bad) +
                    " bad variables");
  }
  return out;
}

AdjacencyList good_clause_graph(const Formula& formula, const Classification& cls) {
  AdjacencyList graph(formula.clauses.size());
  std::vector<std::vector<ClauseId>> occurrences(formula.n + 1);
  for (ClauseId c : cls.good_clauses)
    for (Var v : formula.clauses[c].vars())
      if (!cls.is_bad(v)) occurrences[v].push_back(c);
  for (const auto& occ : occurrences)
    for (std::size_t i = 0; i < occ.size(); ++i)
      for (std::size_t j = i + 1; j < occ.size(); ++j) {
        graph[occ[i]].push_back(occ[j]);
        graph[occ[j]].push_back(occ[i]);
      }
  for (auto& row : graph) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return graph;
}

AdjacencyList bad_variable_graph(const Formula& formula, const Classification& cls) {
  AdjacencyList graph(formula.n + 1);
  for (ClauseId c : cls.bad_clauses) {
    const auto vs = formula.clauses[c].vars();
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j) {
        graph[vs[i]].push_back(vs[j]);
        graph[vs[j]].push_back(vs[i]);
      }
  }
  for (auto& row : graph) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return graph;
}

std::size_t max_degree(const AdjacencyList& graph) {
  std::size_t out = 0;
  for (const auto& row : graph) out = std::max(out, row.size());
  return out;
}

std::vector<std::vector<Var>> bad_components(const Formula& formula, const Classification& cls) {
  return connected_components(bad_variable_graph(formula, cls), cls.bad_vars);
}

std::vector<Var> bc_closure(const Formula& formula, const std::vector<Var>& seed,
                            const Rational& bad_fraction) {
  const Rational threshold = Rational(formula.k) * bad_fraction;
  const auto vars_of = clause_vars(formula);
  std::vector<char> in(formula.n + 1, 0);
  for (Var v : seed) {
    if (v == 0 || v > formula.n)
      throw Error(ErrorKind::InvalidArgument, "bc_closure: variable out of range");
    in[v] = 1;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t c = 0; c < vars_of.size() && !changed; ++c) {
      std::size_t hits = 0;
      for (Var v : vars_of[c]) hits += in[v] ? 1 : 0;
      if (hits == vars_of[c].size() || !at_least(hits, threshold)) continue;
      for (Var v : vars_of[c]) in[v] = 1;
      changed = true;  // restart from the lowest index
    }
  }
  std::vector<Var> out;
  for (Var v = 1; v <= formula.n; ++v)
    if (in[v]) out.push_back(v);
  return out;
}

std::size_t count_overlap(const Formula& formula, const std::vector<Var>& vars, int at_least_count) {
  std::vector<char> in(formula.n + 1, 0);
  for (Var v : vars) in[v] = 1;
  std::size_t out = 0;
  for (const auto& clause : formula.clauses) {
    int hits = 0;
    for (Var v : clause.vars()) hits += in[v] ? 1 : 0;
    if (hits >= at_least_count) ++out;
  }
  return out;
}

std::vector<Var> closed_neighborhood(const DependencyGraphs& graphs, const std::vector<Var>& vars) {
  std::vector<Var> out = vars;
  for (Var v : vars)
    for (auto w : graphs.variable_adjacency[v]) out.push_back(w);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// Enumerates each connected vertex set of size <= max_size exactly once
// (extension-set enumeration rooted at the minimum vertex).
class ConnectedSetEnumerator {
 public:
  ConnectedSetEnumerator(const AdjacencyList& graph, std::size_t max_size, std::size_t budget)
      : graph_(graph), max_size_(max_size), budget_(budget) {}

  template <typename Visit>
  bool run(Visit&& visit) {
    for (std::uint32_t v = 0; v < graph_.size(); ++v) {
      std::vector<std::uint32_t> current{v};
      std::vector<std::uint32_t> extension;
      for (auto w : graph_[v])
        if (w > v) extension.push_back(w);
      if (!extend(v, current, extension, visit)) return false;
    }
    return true;
  }

 private:
  template <typename Visit>
  bool extend(std::uint32_t root, std::vector<std::uint32_t>& current,
              std::vector<std::uint32_t> extension, Visit& visit) {
    if (used_ == budget_) return false;
    ++used_;
    visit(current);
    if (current.size() == max_size_) return true;
    while (!extension.empty()) {
      const auto w = extension.back();
      extension.pop_back();
      std::vector<std::uint32_t> next_extension = extension;
      for (auto x : graph_[w]) {
        if (x <= root) continue;
        if (std::find(current.begin(), current.end(), x) != current.end()) continue;
        if (std::find(next_extension.begin(), next_extension.end(), x) != next_extension.end())
          continue;
        if (x == w) continue;
        // exclusive neighbourhood: not adjacent to anything already chosen
        bool adjacent_to_current = false;
        for (auto y : current)
          if (std::binary_search(graph_[y].begin(), graph_[y].end(), x)) {
            adjacent_to_current = true;
            break;
          }
        if (!adjacent_to_current) next_extension.push_back(x);
      }
      current.push_back(w);
      const bool ok = extend(root, current, next_extension, visit);
      current.pop_back();
      if (!ok) return false;
    }
    return true;
  }

  const AdjacencyList& graph_;
  std::size_t max_size_;
  std::size_t budget_;
  std::size_t used_ = 0;
};

}  // namespace

AuditReport audit(const Formula& formula, const Classification& cls, const AuditOptions& options) {
  AuditReport report;
  report.high_degree = cls.high_degree.size();
  report.bad_vars = cls.bad_vars.size();
  report.bad_clauses = cls.bad_clauses.size();
  report.good_graph_max_degree = max_degree(good_clause_graph(formula, cls));

  std::vector<char> high(formula.n + 1, 0);
  for (Var v : cls.high_degree) high[v] = 1;
  std::size_t largest_component = 0;
  double worst_ratio = 0.0;
  for (auto& component : bad_components(formula, cls)) {
    ComponentAudit entry;
    for (Var v : component) entry.high_degree += high[v] ? 1 : 0;
    entry.size_over_high_degree =
        entry.high_degree == 0 ? 0.0 : static_cast<double>(component.size()) / entry.high_degree;
    largest_component = std::max(largest_component, component.size());
    worst_ratio = std::max(worst_ratio, entry.size_over_high_degree);
    entry.vars = std::move(component);
    report.components.push_back(std::move(entry));
  }

  for (const auto& query : options.overlap_queries) {
    if (query.at_least < 2)
      throw Error(ErrorKind::InvalidArgument, "overlap query needs at_least >= 2");
    OverlapResult result;
    result.vars = query.vars;
    result.at_least = query.at_least;
    result.clauses = count_overlap(formula, query.vars, query.at_least);
    result.bound = 2.0 / (query.at_least - 1) * static_cast<double>(query.vars.size());
    report.overlaps.push_back(std::move(result));
  }

  const DependencyGraphs graphs = build_dependency_graphs(formula);
  const auto k = static_cast<std::size_t>(formula.k);
  if (options.expansion_max_size > 0 && !formula.clauses.empty()) {
    report.expansion.resize(options.expansion_max_size);
    for (std::size_t s = 0; s < options.expansion_max_size; ++s) report.expansion[s].size = s + 1;
    std::vector<char> mark(formula.n + 1, 0);
    ConnectedSetEnumerator enumerator(graphs.clause_adjacency, options.expansion_max_size,
                                      options.expansion_max_sets);
    const bool complete = enumerator.run([&](const std::vector<std::uint32_t>& clauses) {
      std::size_t distinct = 0;
      std::vector<Var> touched;
      for (auto c : clauses)
        for (Var v : formula.clauses[c].vars())
          if (!mark[v]) {
            mark[v] = 1;
            touched.push_back(v);
            ++distinct;
          }
      for (Var v : touched) mark[v] = 0;
      auto& slot = report.expansion[clauses.size() - 1];
      const double ratio = static_cast<double>(distinct) / static_cast<double>(k * clauses.size());
      if (slot.sets == 0 || distinct < slot.min_vars) slot.min_vars = distinct;
      if (slot.sets == 0 || ratio < slot.min_ratio) slot.min_ratio = ratio;
      ++slot.sets;
    });
    if (!complete) {
      report.expansion_truncated = true;
      for (auto& slot : report.expansion) slot.truncated = true;
    }
  }

  const double n = formula.n;
  const double alpha = formula.density();
  const double klogn = static_cast<double>(k) * std::log(std::max(n, 2.0));
  std::mt19937_64 rng(options.seed);
  double worst_neighborhood = 0.0;
  for (std::size_t i = 0; i < options.neighborhood_samples && formula.n > 0; ++i) {
    std::uniform_int_distribution<Var> pick_var(1, formula.n);
    std::uniform_int_distribution<std::size_t> pick_size(1, std::max<std::size_t>(1, options.neighborhood_max_size));
    const std::size_t target = pick_size(rng);
    std::vector<Var> set{pick_var(rng)};
    // Grow a connected set by random frontier steps.
    while (set.size() < target) {
      std::vector<Var> frontier;
      for (Var v : set)
        for (auto w : graphs.variable_adjacency[v])
          if (std::find(set.begin(), set.end(), w) == set.end()) frontier.push_back(w);
      std::sort(frontier.begin(), frontier.end());
      frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
      if (frontier.empty()) break;
      std::uniform_int_distribution<std::size_t> pick(0, frontier.size() - 1);
      set.push_back(frontier[pick(rng)]);
    }
    std::sort(set.begin(), set.end());
    NeighborhoodSample sample;
    sample.closed_neighborhood = closed_neighborhood(graphs, set).size();
    sample.bound = 3.0 * k * k * k * alpha * std::max(static_cast<double>(set.size()), klogn);
    worst_neighborhood = std::max(worst_neighborhood, static_cast<double>(sample.closed_neighborhood));
    sample.vars = std::move(set);
    report.neighborhoods.push_back(std::move(sample));
  }

  const double k10 = std::pow(static_cast<double>(k), 10.0);
  report.bounds.push_back({"high_degree_count", "n / 2^(k^10)", n * std::exp2(-k10),
                           static_cast<double>(report.high_degree)});
  report.bounds.push_back({"bad_variable_count", "4 k n / 2^(k^10)",
                           4.0 * k * n * std::exp2(-k10), static_cast<double>(report.bad_vars)});
  report.bounds.push_back({"bad_component_size", "21600 k ln n", 21600.0 * klogn,
                           static_cast<double>(largest_component)});
  report.bounds.push_back({"bad_component_over_high_degree", "|S| <= 60 |HD(S)|", 60.0, worst_ratio});
  report.bounds.push_back({"good_graph_max_degree", "k (Delta - 1)",
                           static_cast<double>(k) * (static_cast<double>(cls.delta) - 1.0),
                           static_cast<double>(report.good_graph_max_degree)});
  report.bounds.push_back({"closed_neighborhood", "3 k^3 alpha max(|V|, k ln n)",
                           3.0 * k * k * k * alpha * klogn, worst_neighborhood});
  return report;
}

}  // namespace rksat

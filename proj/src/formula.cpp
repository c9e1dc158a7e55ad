#include "rksat/formula.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>
#include <random>
#include <sstream>

#include "rksat/errors.hpp"

namespace rksat {

std::vector<Var> Clause::vars() const {
  std::vector<Var> out;
  out.reserve(literals.size());
  for (const auto& lit : literals) out.push_back(lit.var);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Literal> Clause::ordered_literals() const {
  std::vector<Literal> out = literals;
  std::stable_sort(out.begin(), out.end(),
                   [](const Literal& a, const Literal& b) { return a.var < b.var; });
  return out;
}

bool Clause::has_var(Var v) const {
  return std::any_of(literals.begin(), literals.end(),
                     [v](const Literal& lit) { return lit.var == v; });
}

bool Clause::tautological() const {
  for (std::size_t i = 0; i < literals.size(); ++i)
    for (std::size_t j = i + 1; j < literals.size(); ++j)
      if (literals[i].var == literals[j].var && literals[i].positive != literals[j].positive)
        return true;
  return false;
}

std::optional<bool> PartialAssignment::get(Var v) const {
  if (!bound(v)) return std::nullopt;
  return values_[v] == 1;
}

void PartialAssignment::assign(Var v, bool value) {
  if (v == 0 || v >= values_.size())
    throw Error(ErrorKind::InvalidArgument, "variable " + std::to_string(v) + " out of range");
  if (values_[v] != kUnset)
    throw Error(ErrorKind::InvalidArgument, "variable " + std::to_string(v) + " bound twice");
  values_[v] = value ? 1 : 0;
}

void PartialAssignment::set(Var v, bool value) {
  if (v == 0 || v >= values_.size())
    throw Error(ErrorKind::InvalidArgument, "variable " + std::to_string(v) + " out of range");
  values_[v] = value ? 1 : 0;
}

void PartialAssignment::unset(Var v) {
  if (v < values_.size()) values_[v] = kUnset;
}

std::vector<Var> PartialAssignment::domain() const {
  std::vector<Var> out;
  for (Var v = 1; v < values_.size(); ++v)
    if (values_[v] != kUnset) out.push_back(v);
  return out;
}

std::size_t PartialAssignment::size() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](std::int8_t x) { return x != kUnset; }));
}

bool PartialAssignment::satisfies(const Clause& clause) const {
  return std::any_of(clause.literals.begin(), clause.literals.end(),
                     [this](const Literal& lit) { return satisfies_literal(lit); });
}

Formula generate_random_formula(int k, Var n, std::size_t m, std::uint64_t seed) {
  if (k < 1 || n < 1)
    throw Error(ErrorKind::InvalidArgument, "generate_random_formula needs k >= 1 and n >= 1");
  std::mt19937_64 rng(seed);
  // Each literal is uniform over the 2n literals.
  std::uniform_int_distribution<std::uint64_t> pick(0, 2 * static_cast<std::uint64_t>(n) - 1);
  Formula formula;
  formula.k = k;
  formula.n = n;
  formula.clauses.resize(m);
  for (auto& clause : formula.clauses) {
    clause.literals.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
      const std::uint64_t x = pick(rng);
      clause.literals.push_back(Literal{static_cast<Var>(x / 2 + 1), x % 2 == 0});
    }
  }
  return formula;
}

SimplifiedFormula simplify_under(const Formula& formula, const PartialAssignment& assignment) {
  SimplifiedFormula out;
  out.n = formula.n;
  for (Var v = 1; v <= formula.n; ++v)
    if (!assignment.bound(v)) out.free_vars.push_back(v);
  for (ClauseId id = 0; id < formula.clauses.size(); ++id) {
    const Clause& clause = formula.clauses[id];
    if (assignment.satisfies(clause)) {
      out.satisfied.push_back(id);
      continue;
    }
    ReducedClause reduced;
    reduced.id = id;
    for (const auto& lit : clause.ordered_literals())
      if (!assignment.bound(lit.var)) reduced.literals.push_back(lit);
    if (reduced.literals.empty()) {
      out.emptied.push_back(id);
      continue;
    }
    for (const auto& lit : reduced.literals) reduced.vars.push_back(lit.var);
    reduced.vars.erase(std::unique(reduced.vars.begin(), reduced.vars.end()), reduced.vars.end());
    out.clauses.push_back(std::move(reduced));
  }
  return out;
}

namespace {

std::vector<std::string_view> tokens_of(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

long long to_integer(std::string_view token, ErrorKind kind) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw Error(kind, "not an integer: '" + std::string(token) + "'");
  return value;
}

}  // namespace

Formula parse_dimacs(std::string_view text) {
  Formula formula;
  bool have_header = false;
  long long declared_m = 0;
  int width_hint = 0;
  std::vector<Literal> current;
  std::size_t line_no = 0;

  auto finish_clause = [&] {
    if (formula.k == 0) formula.k = width_hint > 0 ? width_hint : static_cast<int>(current.size());
    if (static_cast<int>(current.size()) != formula.k)
      throw Error(ErrorKind::NonUniformWidth,
                  "clause " + std::to_string(formula.clauses.size() + 1) + " has width " +
                      std::to_string(current.size()) + ", expected " + std::to_string(formula.k));
    formula.clauses.push_back(Clause{current});
    current.clear();
  };

  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    const auto toks = tokens_of(line);
    if (toks.size() == 2 && toks[0] == "c" && toks[1].substr(0, 2) == "k=") {
      // Width hint written by write_dimacs; lets a clause-free file round-trip.
      width_hint = static_cast<int>(to_integer(toks[1].substr(2), ErrorKind::MalformedHeader));
      continue;
    }
    if (toks.empty() || toks[0][0] == 'c' || toks[0][0] == '%') continue;
    if (toks[0] == "p") {
      if (have_header || toks.size() != 4 || toks[1] != "cnf")
        throw Error(ErrorKind::MalformedHeader, "bad header on line " + std::to_string(line_no));
      const long long n = to_integer(toks[2], ErrorKind::MalformedHeader);
      declared_m = to_integer(toks[3], ErrorKind::MalformedHeader);
      if (n < 1 || declared_m < 0)
        throw Error(ErrorKind::MalformedHeader, "header counts out of range");
      formula.n = static_cast<Var>(n);
      have_header = true;
      continue;
    }
    if (!have_header)
      throw Error(ErrorKind::MalformedHeader, "clause before 'p cnf' header");
    for (auto tok : toks) {
      const long long lit = to_integer(tok, ErrorKind::MalformedClause);
      if (lit == 0) {
        if (current.empty()) throw Error(ErrorKind::MalformedClause, "empty clause");
        finish_clause();
        continue;
      }
      const long long var = lit < 0 ? -lit : lit;
      if (var > static_cast<long long>(formula.n))
        throw Error(ErrorKind::VariableOutOfRange,
                    "variable " + std::to_string(var) + " exceeds n = " + std::to_string(formula.n));
      current.push_back(Literal{static_cast<Var>(var), lit > 0});
    }
  }
  if (!have_header) throw Error(ErrorKind::MalformedHeader, "missing 'p cnf' header");
  if (!current.empty()) throw Error(ErrorKind::MalformedClause, "last clause not 0-terminated");
  if (static_cast<long long>(formula.clauses.size()) != declared_m)
    throw Error(ErrorKind::MalformedHeader, "header declares " + std::to_string(declared_m) +
                                                " clauses, found " +
                                                std::to_string(formula.clauses.size()));
  if (formula.clauses.empty()) formula.k = width_hint;
  return formula;
}

std::string write_dimacs(const Formula& formula) {
  std::ostringstream out;
  out << "c k=" << formula.k << '\n';
  out << "p cnf " << formula.n << ' ' << formula.clauses.size() << '\n';
  for (const auto& clause : formula.clauses) {
    for (const auto& lit : clause.literals) out << lit.dimacs() << ' ';
    out << "0\n";
  }
  return out.str();
}

DependencyGraphs build_dependency_graphs(const Formula& formula) {
  DependencyGraphs graphs;
  const std::size_t m = formula.clauses.size();
  graphs.occurrences.assign(formula.n + 1, {});
  std::vector<std::vector<Var>> clause_vars(m);
  for (ClauseId c = 0; c < m; ++c) {
    clause_vars[c] = formula.clauses[c].vars();
    for (Var v : clause_vars[c]) graphs.occurrences[v].push_back(c);
  }
  graphs.clause_adjacency.assign(m, {});
  graphs.variable_adjacency.assign(formula.n + 1, {});
  for (Var v = 1; v <= formula.n; ++v) {
    const auto& occ = graphs.occurrences[v];
    for (std::size_t i = 0; i < occ.size(); ++i)
      for (std::size_t j = i + 1; j < occ.size(); ++j) {
        graphs.clause_adjacency[occ[i]].push_back(occ[j]);
        graphs.clause_adjacency[occ[j]].push_back(occ[i]);
      }
  }
  for (ClauseId c = 0; c < m; ++c) {
    const auto& vs = clause_vars[c];
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j) {
        graphs.variable_adjacency[vs[i]].push_back(vs[j]);
        graphs.variable_adjacency[vs[j]].push_back(vs[i]);
      }
  }
  auto dedup = [](AdjacencyList& adj) {
    for (auto& row : adj) {
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
    }
  };
  dedup(graphs.clause_adjacency);
  dedup(graphs.variable_adjacency);
  return graphs;
}

std::vector<std::vector<std::uint32_t>> connected_components(
    const AdjacencyList& graph, const std::vector<std::uint32_t>& subset) {
  std::vector<char> in_subset(graph.size(), 0), seen(graph.size(), 0);
  for (auto v : subset) {
    if (v >= graph.size())
      throw Error(ErrorKind::InvalidArgument, "vertex " + std::to_string(v) + " not in graph");
    in_subset[v] = 1;
  }
  std::vector<std::uint32_t> order = subset;
  std::sort(order.begin(), order.end());
  std::vector<std::vector<std::uint32_t>> components;
  std::vector<std::uint32_t> stack;
  for (auto start : order) {
    if (seen[start]) continue;
    std::vector<std::uint32_t> component;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      component.push_back(v);
      for (auto w : graph[v])
        if (in_subset[w] && !seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    std::sort(component.begin(), component.end());
    components.push_back(std::move(component));
  }
  return components;
}

}  // namespace rksat

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rksat/counter.hpp"
#include "rksat/coupling.hpp"
#include "rksat/errors.hpp"
#include "rksat/formula.hpp"

namespace fixtures {

using namespace rksat;

inline Formula from_lists(int k, Var n, const std::vector<std::vector<int>>& clauses) {
  Formula f;
  f.k = k;
  f.n = n;
  for (const auto& c : clauses) {
    Clause clause;
    for (int lit : c) clause.literals.push_back({static_cast<Var>(lit < 0 ? -lit : lit), lit > 0});
    f.clauses.push_back(clause);
  }
  return f;
}

inline bool regime_or_resource(const Error& e) {
  return e.category() == ErrorCategory::Regime || e.category() == ErrorCategory::Resource;
}

// Every clause holds x and not-x for some x.
inline Formula tautologies(int k, Var n, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Var> var(1, n);
  std::bernoulli_distribution sign(0.5);
  Formula f{k, n, {}};
  for (std::size_t i = 0; i < m; ++i) {
    Clause c;
    const Var x = var(rng);
    c.literals = {{x, true}, {x, false}};
    while (static_cast<int>(c.literals.size()) < k) c.literals.push_back({var(rng), sign(rng)});
    f.clauses.push_back(c);
  }
  return f;
}

// Clauses built from two or three repeated literals.
inline Formula repeated_literals(int k, Var n, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Var> var(1, n);
  std::bernoulli_distribution sign(0.5);
  Formula f{k, n, {}};
  for (std::size_t i = 0; i < m; ++i) {
    Clause c;
    const Literal a{var(rng), sign(rng)}, b{var(rng), sign(rng)};
    for (int j = 0; j < k; ++j) c.literals.push_back(j % 3 == 2 ? Literal{var(rng), sign(rng)} : (j % 2 ? b : a));
    f.clauses.push_back(c);
  }
  return f;
}

// Variables of clause i drawn from a window of width w starting near i.
inline Formula clustered(int k, Var n, std::size_t m, Var w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution sign(0.5);
  Formula f{k, n, {}};
  for (std::size_t i = 0; i < m; ++i) {
    const Var start = 1 + static_cast<Var>(i % (n - w + 1));
    std::uniform_int_distribution<Var> var(start, start + w - 1);
    Clause c;
    for (int j = 0; j < k; ++j) c.literals.push_back({var(rng), sign(rng)});
    f.clauses.push_back(c);
  }
  return f;
}

// Clause i covers variables i..i+k-1.
inline Formula chain(int k, Var n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution sign(0.5);
  Formula f{k, n, {}};
  for (Var i = 1; i + k - 1 <= n; ++i) {
    Clause c;
    for (int j = 0; j < k; ++j) c.literals.push_back({i + j, sign(rng)});
    f.clauses.push_back(c);
  }
  return f;
}

// Every good variable marked.
inline Marking mark_all_good(const Formula& f, const Classification& cls) {
  Marking m;
  m.is_marked.assign(f.n + 1, 0);
  for (Var v : cls.good_vars) {
    m.is_marked[v] = 1;
    m.marked.push_back(v);
  }
  return m;
}

struct Context {
  std::string label;
  Formula formula;
  Classification cls;
  Marking marking;
  std::vector<std::pair<PartialAssignment, Var>> pivots;  // (Lambda, v*)
};

// Trees along Lambda* when the pipeline prepares the instance; otherwise a
// handful of pivots under an empty prefix, with a found marking if one exists
// and an all-good marking if not.
inline Context make_context(std::string label, const Formula& f, std::uint32_t delta, std::uint64_t seed) {
  Context ctx{std::move(label), f, {}, {}, {}};
  try {
    ApproxConfig config;
    config.delta = delta;
    config.seed = seed;
    auto prep = prepare(f, config);
    ctx.cls = std::move(prep.cls);
    ctx.marking = std::move(prep.marking);
    for (std::size_t j = 0; j < prep.lambda.order.size(); ++j)
      ctx.pivots.emplace_back(prep.lambda.prefix(j), prep.lambda.order[j]);
    return ctx;
  } catch (const Error& e) {
    if (!regime_or_resource(e)) throw;
  }
  ctx.cls = classify(f, delta);
  try {
    ctx.marking = find_marking(f, ctx.cls, {seed});
  } catch (const Error& e) {
    if (!regime_or_resource(e)) throw;
    ctx.marking = mark_all_good(f, ctx.cls);
  }
  for (std::size_t j = 0; j < ctx.marking.marked.size() && j < 4; ++j)
    ctx.pivots.emplace_back(PartialAssignment(f.n), ctx.marking.marked[j]);
  return ctx;
}

// The fixture corpus: random instances plus the crafted families above.
inline std::vector<Context> corpus(std::size_t random_count = 60) {
  std::vector<Context> out;
  std::size_t made = 0;
  for (std::uint64_t seed = 0; made < random_count; ++seed) {
    const int k = 3 + static_cast<int>(seed % 3);
    const Var n = 8 + static_cast<Var>(2 * (seed % 4));
    const std::size_t m = n / 2 + seed % n;
    const std::uint32_t delta = seed % 5 == 4 ? 4 : 100;
    out.push_back(make_context("random/" + std::to_string(seed), generate_random_formula(k, n, m, seed), delta, seed));
    ++made;
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int k = 3 + static_cast<int>(seed % 3);
    out.push_back(make_context("tautology/" + std::to_string(seed), tautologies(k, 10, 8, seed), 100, seed));
    out.push_back(make_context("repeated/" + std::to_string(seed), repeated_literals(k, 10, 9, seed), 100, seed));
    out.push_back(make_context("clustered/" + std::to_string(seed), clustered(k, 12, 12, 5, seed), 100, seed));
    out.push_back(make_context("chain/" + std::to_string(seed), chain(k, 12, seed), 100, seed));
    out.push_back(make_context("clustered-bad/" + std::to_string(seed), clustered(k, 12, 14, 4, seed), 4, seed));
  }
  return out;
}

// Builds every tree of every context; regime and resource failures are counted, not hidden.
struct TreeWalk {
  std::size_t trees = 0;
  std::size_t skipped = 0;
  std::vector<std::string> skip_reasons;
};

inline TreeWalk for_each_tree(const std::vector<Context>& contexts,
                              const std::function<void(const Context&, const CouplingTree&)>& visit,
                              std::size_t node_cap = 2000) {
  TreeWalk walk;
  TreeOptions options;
  options.node_cap = node_cap;
  for (const auto& ctx : contexts)
    for (const auto& [lambda, pivot] : ctx.pivots) {
      CouplingTree tree;
      try {
        tree = build_tree(ctx.formula, ctx.cls, ctx.marking, lambda, pivot, options);
      } catch (const Error& e) {
        if (!regime_or_resource(e)) throw;
        ++walk.skipped;
        walk.skip_reasons.push_back(ctx.label + ": " + std::string(to_string(e.kind())));
        continue;
      }
      ++walk.trees;
      visit(ctx, tree);
    }
  return walk;
}

}  // namespace fixtures

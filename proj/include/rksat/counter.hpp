#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rksat/classify.hpp"
#include "rksat/formula.hpp"
#include "rksat/lp.hpp"
#include "rksat/marking.hpp"
#include "rksat/rational.hpp"

namespace rksat {

enum class CountMethod { Enumeration, ComponentProduct };
std::string_view to_string(CountMethod method);

struct ComponentCount {
  std::vector<Var> vars;
  Integer count;
};

struct ExactCount {
  Integer count;
  CountMethod method = CountMethod::ComponentProduct;
  std::vector<ComponentCount> components;
  std::size_t unconstrained = 0;  // free variables in no clause
};

/// Product over connected components of H of the satisfying counts, times
/// 2^(free variables in no clause). Throws ComponentTooLarge beyond `cap`.
ExactCount exact_count(const SimplifiedFormula& formula, std::size_t cap = 25);
ExactCount exact_count(const Formula& formula, std::size_t cap = 25);

/// Monolithic enumeration of all 2^n assignments (n <= cap).
ExactCount enumerate_count(const Formula& formula, std::size_t cap = 25);

/// |Omega^{Lambda*}|. Throws NotFullyGoodSatisfied if a good clause survives Lambda*.
ExactCount count_residual(const Formula& formula, const LambdaStar& lambda,
                          const Classification& cls, std::size_t cap = 25);

struct ApproxConfig {
  Rational eps = make_rational(1, 5);
  std::optional<std::uint32_t> delta;  // default_delta(k) when unset
  Rational bad_fraction = make_rational(1, 10);
  std::uint64_t seed = 0;
  std::size_t marking_attempts = 10000;
  std::size_t marking_retries = 16;  // fresh marking seeds tried when Lambda* fails
  SearchOptions search;
  EstimateOptions estimate;  // eps is taken from this config
  std::size_t component_cap = 25;
  std::size_t threads = 1;  // concurrent estimation steps; output does not depend on it
};

struct StepRecord {
  Var var = 0;
  bool value = false;
  Rational p;
  Rational q;
  std::size_t iterations = 0;
  std::size_t lp_calls = 0;
  TreeStats tree;
};

struct ApproxCount {
  Rational Z;  // residual / prod(q)
  Rational eps;
  std::uint32_t delta = 0;
  Rational s;
  std::size_t bad_vars = 0;
  std::size_t bad_clauses = 0;
  std::vector<Var> marked;
  std::uint64_t marking_seed = 0;
  std::vector<StepRecord> steps;
  ExactCount residual;
};

/// Classification, a bad-clause assignment, a marking and Lambda*. Marking
/// seeds seed, seed + 1, ... are tried until Lambda* exists (marking_retries).
struct Preparation {
  Classification cls;
  BadSatAssignment bad;
  Marking marking;
  LambdaStar lambda;
  std::uint64_t marking_seed = 0;
};
Preparation prepare(const Formula& formula, const ApproxConfig& config = {});

/// The end-to-end counter: classification, marking, Lambda*, one ratio
/// estimate per Lambda* variable, residual count. Errors carry their stage.
ApproxCount approx_count(const Formula& formula, const ApproxConfig& config = {});

/// q = p/(1+p) when the variable is set true, 1/(1+p) otherwise.
Rational step_factor(const Rational& p, bool value);

}  // namespace rksat

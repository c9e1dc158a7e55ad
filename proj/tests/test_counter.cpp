#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "rksat/counter.hpp"

using namespace rksat;

TEST_CASE("exact count examples") {
  CHECK(exact_count(Formula{3, 5, {}}).count == 32);
  CHECK(exact_count(fixtures::from_lists(3, 3, {{1, 2, 3}})).count == 7);
  const auto f = generate_random_formula(3, 8, 6, 42);
  CHECK(exact_count(f).count == enumerate_count(f).count);
  CHECK(exact_count(f).count == oracle::Solutions(f).total());
}

TEST_CASE("component product against enumeration") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto f = generate_random_formula(3 + seed % 3, 12, 4 + seed % 16, seed);
    const auto exact = exact_count(f);
    CHECK(exact.count == oracle::Solutions(f).total());
    Integer product = Integer(1) << exact.unconstrained;
    for (const auto& c : exact.components) product *= c.count;
    CHECK(product == exact.count);
  }
}

TEST_CASE("caps") {
  const auto f = generate_random_formula(3, 14, 30, 1);
  CHECK_THROWS_AS(exact_count(f, 5), Error);
  CHECK_THROWS_AS(enumerate_count(f, 10), Error);
}

TEST_CASE("step factor") {
  CHECK(step_factor(make_rational(1, 3), true) == make_rational(1, 4));
  CHECK(step_factor(make_rational(1, 3), false) == make_rational(3, 4));
}

TEST_CASE("residual count and the telescoping product") {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 60 && checked < 15; ++seed) {
    const auto f = generate_random_formula(3 + seed % 2, 12, 6 + seed % 10, seed);
    ApproxConfig config;
    config.delta = seed % 3 ? 100 : 4;
    config.seed = seed;
    Preparation prep;
    try {
      prep = prepare(f, config);
    } catch (const Error& e) {
      CHECK(fixtures::regime_or_resource(e));
      continue;
    }
    const oracle::Solutions sols(f);
    const auto residual = count_residual(f, prep.lambda, prep.cls);
    CHECK(residual.count == sols.count(prep.lambda.assignment));
    CHECK(residual.count == exact_count(simplify_under(f, prep.lambda.assignment)).count);
    Rational product(1);
    for (std::size_t j = 0; j < prep.lambda.order.size(); ++j) {
      const Var v = prep.lambda.order[j];
      const Rational r = oracle::pivot_ratio(sols, prep.lambda.prefix(j), v);
      product *= step_factor(r, *prep.lambda.assignment.get(v));
    }
    CHECK(product * Rational(sols.total()) == Rational(residual.count));
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("no good clauses: Z is the exact count") {
  const auto f = generate_random_formula(3, 10, 8, 3);
  ApproxConfig config;
  config.delta = 1;
  const auto z = approx_count(f, config);
  CHECK(z.steps.empty());
  CHECK(z.Z == Rational(exact_count(f).count));
}

TEST_CASE("residual refuses a prefix that leaves a good clause") {
  const auto f = fixtures::from_lists(3, 6, {{1, 2, 3}, {4, 5, 6}});
  const auto cls = classify(f, 100);
  LambdaStar empty;
  empty.assignment = PartialAssignment(6);
  CHECK_THROWS_AS(count_residual(f, empty, cls), Error);
}

TEST_CASE("approximate count: accuracy and thread independence") {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 300 && checked < 4; ++seed) {
    const auto f = generate_random_formula(3 + seed % 2, 12, 6 + seed % 5, seed);
    ApproxConfig config;
    config.delta = 100;
    config.seed = seed;
    ApproxCount one;
    try {
      one = approx_count(f, config);
    } catch (const Error& e) {
      CHECK(fixtures::regime_or_resource(e));
      continue;
    }
    if (one.steps.empty()) continue;
    config.threads = 3;
    const auto three = approx_count(f, config);
    CHECK(three.Z == one.Z);
    CHECK(three.steps.size() == one.steps.size());
    const double ratio = to_double(one.Z / Rational(exact_count(f).count));
    CHECK(std::abs(std::log(ratio)) <= 0.2);
    ++checked;
  }
  CHECK(checked >= 2);
}

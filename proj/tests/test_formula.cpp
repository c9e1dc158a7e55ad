#include <doctest.h>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "rksat/errors.hpp"
#include "rksat/formula.hpp"

using namespace rksat;

namespace {

ErrorKind parse_error(const std::string& text) {
  try {
    parse_dimacs(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("parse succeeded");
  return ErrorKind::InvariantViolation;
}

}  // namespace

TEST_CASE("generator is deterministic and uniform-width") {
  const auto a = generate_random_formula(4, 12, 18, 7);
  const auto b = generate_random_formula(4, 12, 18, 7);
  CHECK(a == b);
  CHECK(a.m() == 18);
  for (const auto& c : a.clauses) {
    CHECK(c.literals.size() == 4);
    for (const auto& lit : c.literals) CHECK((lit.var >= 1 && lit.var <= 12));
  }
  CHECK_FALSE(a == generate_random_formula(4, 12, 18, 8));
}

TEST_CASE("dimacs round trip") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = generate_random_formula(3 + seed % 3, 9, seed, seed);
    CHECK(parse_dimacs(write_dimacs(f)) == f);
  }
  // width survives a clause-free file
  const Formula empty{5, 4, {}};
  CHECK(parse_dimacs(write_dimacs(empty)) == empty);
}

TEST_CASE("dimacs errors") {
  CHECK(parse_error("1 2 0\n") == ErrorKind::MalformedHeader);
  CHECK(parse_error("p cnf 3 1\n1 2 4 0\n") == ErrorKind::VariableOutOfRange);
  CHECK(parse_error("p cnf 3 2\n1 2 0\n1 2 3 0\n") == ErrorKind::NonUniformWidth);
  CHECK(parse_error("p cnf 3 2\n1 2 0\n") == ErrorKind::MalformedHeader);
  CHECK(parse_error("p cnf 3 1\n1 2") == ErrorKind::MalformedClause);
  CHECK(parse_error("p cnf 3 1\n0\n") == ErrorKind::MalformedClause);
  CHECK(parse_error("p cnf 3 1\n1 x 0\n") == ErrorKind::MalformedClause);
  CHECK(parse_error("p dnf 3 1\n1 2 0\n") == ErrorKind::MalformedHeader);
}

TEST_CASE("clause helpers") {
  const auto f = fixtures::from_lists(4, 5, {{3, -1, 3, 1}});
  const auto& c = f.clauses[0];
  CHECK(c.vars() == std::vector<Var>{1, 3});
  CHECK(c.tautological());
  const auto ordered = c.ordered_literals();
  REQUIRE(ordered.size() == 4);
  CHECK(ordered[0] == Literal{1, false});
  CHECK(ordered[1] == Literal{1, true});
  CHECK(ordered[2] == Literal{3, true});
  CHECK_FALSE(fixtures::from_lists(2, 3, {{1, 2}}).clauses[0].tautological());
}

TEST_CASE("partial assignment") {
  PartialAssignment a(4);
  a.assign(2, true);
  CHECK(a.bound(2));
  CHECK_FALSE(a.bound(3));
  CHECK_THROWS_AS(a.assign(2, false), Error);
  CHECK_THROWS_AS(a.assign(5, false), Error);
  a.set(2, false);
  CHECK(*a.get(2) == false);
  a.unset(2);
  CHECK(a.size() == 0);
}

TEST_CASE("simplify drops satisfied clauses and false literals") {
  const auto f = fixtures::from_lists(3, 4, {{1, 2, 3}, {-1, 2, 4}, {-1, -2, -2}});
  PartialAssignment a(4);
  a.assign(1, true);
  a.assign(2, false);
  const auto s = simplify_under(f, a);
  CHECK(s.satisfied == std::vector<ClauseId>{0, 2});
  REQUIRE(s.clauses.size() == 1);
  CHECK(s.clauses[0].id == 1);
  CHECK(s.clauses[0].vars == std::vector<Var>{4});
  CHECK(s.free_vars == std::vector<Var>{3, 4});
  CHECK_FALSE(s.unsatisfiable());

  PartialAssignment b(4);
  b.assign(1, true);
  b.assign(2, true);
  b.assign(4, false);
  CHECK(simplify_under(f, b).emptied == std::vector<ClauseId>{2});
}

TEST_CASE("simplified count matches conditioned enumeration") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto f = generate_random_formula(3, 10, 12, seed);
    PartialAssignment a(10);
    for (Var v = 1; v <= 10; v += 3) a.assign(v, (seed >> v) & 1);
    const auto s = simplify_under(f, a);
    const auto expected = oracle::count(f, a);
    if (s.unsatisfiable())
      CHECK(expected == 0);
    else
      CHECK(exact_count(s).count == expected);
  }
}

TEST_CASE("dependency graphs and components") {
  const auto f = fixtures::from_lists(2, 6, {{1, 2}, {2, 3}, {4, 5}, {5, 5}});
  const auto g = build_dependency_graphs(f);
  CHECK(g.clause_adjacency[0] == std::vector<std::uint32_t>{1});
  CHECK(g.clause_adjacency[2] == std::vector<std::uint32_t>{3});
  CHECK(g.variable_adjacency[2] == std::vector<std::uint32_t>{1, 3});
  CHECK(g.variable_adjacency[6].empty());
  CHECK(g.occurrences[5] == std::vector<ClauseId>{2, 3});
  const auto comps = connected_components(g.variable_adjacency, {1, 2, 3, 4, 5, 6});
  REQUIRE(comps.size() == 3);
  CHECK(comps[0] == std::vector<std::uint32_t>{1, 2, 3});
  CHECK(comps[1] == std::vector<std::uint32_t>{4, 5});
  CHECK(comps[2] == std::vector<std::uint32_t>{6});
  CHECK(connected_components(g.variable_adjacency, {1, 3}).size() == 2);
}

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rksat/coupling.hpp"
#include "rksat/rational.hpp"

namespace rksat {

enum class ConstraintFamily { Bounds, LeafRatio, Root, Flow, Damping };
std::string_view to_string(ConstraintFamily family);

enum class Relation { LessEq, Equal };

struct LinearTerm {
  std::size_t var = 0;
  Rational coef;
};

/// sum(coef * x) (<= or =) rhs.
struct Constraint {
  std::vector<LinearTerm> terms;
  Relation relation = Relation::LessEq;
  Rational rhs;
  ConstraintFamily family = ConstraintFamily::Bounds;
  int node = -1;
};

/// Variable of P_{i, node}: 2 * node + (i - 1).
inline constexpr std::size_t lp_var(int node, int i) { return 2 * static_cast<std::size_t>(node) + (i - 1); }

struct LPInstance {
  std::size_t num_vars = 0;
  std::vector<Constraint> constraints;
  Rational r_lower;
  Rational r_upper;
  Rational s;

  // Tree shape, for the decomposition solver.
  std::vector<NodeKind> kinds;
  std::vector<std::array<int, 4>> children;
  std::vector<Rational> leaf_ratio;  // r at leaves, 0 elsewhere

  std::size_t count(ConstraintFamily family) const;
};

/// Throws MissingLeafRatio, InvalidArgument (r_lower > r_upper or s <= 0).
LPInstance build_lp(const CouplingTree& tree, const Rational& r_lower, const Rational& r_upper,
                    const Rational& s);

enum class LpMode { Exact, Float };
enum class LpMethod { Auto, Decomposition, Simplex };

struct SolveOptions {
  LpMode mode = LpMode::Exact;
  LpMethod method = LpMethod::Auto;
  std::size_t size_cap = 400;  // largest variable count handed to the dense simplex
};

struct Feasibility {
  bool feasible = false;
  std::vector<Rational> witness;  // empty when infeasible
  LpMethod method = LpMethod::Decomposition;
};

/// Decides feasibility; a feasible answer carries a witness that satisfies
/// every constraint (exactly in Exact mode, within 1e-9 in Float mode).
/// Throws SizeCapExceeded when the dense simplex is requested beyond size_cap.
Feasibility solve_feasibility(const LPInstance& lp, const SolveOptions& options = {});

/// Constraint violations of `x`, exact when tolerance is 0.
std::vector<std::string> validate_witness(const LPInstance& lp, const std::vector<Rational>& x,
                                          const Rational& tolerance = Rational(0));

enum class BisectMode { Geometric, Paper };

struct EstimateOptions {
  Rational eps = make_rational(1, 10);
  std::optional<Rational> s;  // default: min(2^{k/4} / (e k Delta), 1)
  BisectMode bisect = BisectMode::Geometric;
  SolveOptions solve;
  TreeOptions tree;
  std::size_t max_iterations = 10000;
};

struct FeasibilityQuery {
  Rational r_lower;
  Rational r_upper;
  bool feasible = false;
};

struct RatioEstimate {
  Rational p;
  Rational p_lower;
  Rational p_upper;
  std::size_t iterations = 0;
  std::vector<FeasibilityQuery> trace;
  TreeStats tree;
  Rational s;
};

/// The s default: min(2^{k/4} / (e k Delta), 1), as a rational.
Rational default_s(int k, std::uint32_t delta);
/// Uncapped 2^{k/4} / (e k Delta).
double paper_s(int k, std::uint32_t delta);

/// Bisection for |Omega_1| / |Omega_2| over the LP of the pivot's coupling tree.
RatioEstimate estimate_ratio(const Formula& formula, const Classification& cls,
                             const Marking& marking, const PartialAssignment& lambda, Var pivot,
                             const EstimateOptions& options = {});

/// Same bisection over an already built tree.
RatioEstimate estimate_ratio(const CouplingTree& tree, const EstimateOptions& options);

}  // namespace rksat

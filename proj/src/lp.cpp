#include "rksat/lp.hpp"

#include <algorithm>
#include <cmath>

#include "rksat/errors.hpp"
#include "rksat/simplex.hpp"

namespace rksat {

std::string_view to_string(ConstraintFamily family) {
  switch (family) {
    case ConstraintFamily::Bounds:
      return "bounds";
    case ConstraintFamily::LeafRatio:
      return "leaf_ratio";
    case ConstraintFamily::Root:
      return "root";
    case ConstraintFamily::Flow:
      return "flow";
    case ConstraintFamily::Damping:
      return "damping";
  }
  return "?";
}

std::size_t LPInstance::count(ConstraintFamily family) const {
  std::size_t out = 0;
  for (const auto& c : constraints) out += c.family == family ? 1 : 0;
  return out;
}

LPInstance build_lp(const CouplingTree& tree, const Rational& r_lower, const Rational& r_upper,
                    const Rational& s) {
  if (r_lower > r_upper) throw Error(ErrorKind::InvalidArgument, "r_lower exceeds r_upper");
  if (s <= 0) throw Error(ErrorKind::InvalidArgument, "s must be positive");
  LPInstance lp;
  lp.r_lower = r_lower;
  lp.r_upper = r_upper;
  lp.s = s;
  lp.num_vars = 2 * tree.nodes.size();
  const Rational one(1), zero(0), inv_s = one / s;
  auto add = [&](std::vector<LinearTerm> terms, Relation rel, Rational rhs, ConstraintFamily fam,
                 int node) {
    lp.constraints.push_back({std::move(terms), rel, std::move(rhs), fam, node});
  };
  for (const auto& node : tree.nodes) {
    lp.kinds.push_back(node.kind);
    lp.children.push_back(node.children);
    lp.leaf_ratio.push_back(node.ratio ? node.ratio->r : zero);
    for (int i = 1; i <= 2; ++i) {
      add({{lp_var(node.id, i), Rational(-1)}}, Relation::LessEq, zero, ConstraintFamily::Bounds, node.id);
      add({{lp_var(node.id, i), one}}, Relation::LessEq, one, ConstraintFamily::Bounds, node.id);
    }
    if (node.kind == NodeKind::Leaf) {
      if (!node.ratio)
        throw Error(ErrorKind::MissingLeafRatio, "leaf " + std::to_string(node.id) + " has no ratio");
      const Rational& r = node.ratio->r;
      add({{lp_var(node.id, 2), r_lower}, {lp_var(node.id, 1), -r}}, Relation::LessEq, zero,
          ConstraintFamily::LeafRatio, node.id);
      add({{lp_var(node.id, 1), r}, {lp_var(node.id, 2), -r_upper}}, Relation::LessEq, zero,
          ConstraintFamily::LeafRatio, node.id);
    }
  }
  add({{lp_var(0, 1), one}}, Relation::Equal, one, ConstraintFamily::Root, 0);
  add({{lp_var(0, 2), one}}, Relation::Equal, one, ConstraintFamily::Root, 0);
  for (const auto& node : tree.nodes) {
    if (node.kind != NodeKind::Internal) continue;
    const auto& ch = node.children;
    for (bool x : {true, false}) {
      // P_1 splits over tau_2 with tau_1 = X; P_2 splits over tau_1 with tau_2 = X.
      add({{lp_var(ch[child_index(x, true)], 1), one},
           {lp_var(ch[child_index(x, false)], 1), one},
           {lp_var(node.id, 1), Rational(-1)}},
          Relation::Equal, zero, ConstraintFamily::Flow, node.id);
      add({{lp_var(ch[child_index(true, x)], 2), one},
           {lp_var(ch[child_index(false, x)], 2), one},
           {lp_var(node.id, 2), Rational(-1)}},
          Relation::Equal, zero, ConstraintFamily::Flow, node.id);
    }
    for (bool x : {true, false})
      for (int i = 1; i <= 2; ++i)
        add({{lp_var(ch[child_index(x, !x)], i), one}, {lp_var(node.id, i), -inv_s}},
            Relation::LessEq, zero, ConstraintFamily::Damping, node.id);
  }
  return lp;
}

std::vector<std::string> validate_witness(const LPInstance& lp, const std::vector<Rational>& x,
                                          const Rational& tolerance) {
  std::vector<std::string> out;
  if (x.size() != lp.num_vars) return {"witness has wrong length"};
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    const auto& c = lp.constraints[i];
    Rational lhs(0);
    for (const auto& t : c.terms) lhs += t.coef * x[t.var];
    const Rational gap = lhs - c.rhs;
    const bool ok = c.relation == Relation::Equal ? abs(gap) <= tolerance : gap <= tolerance;
    if (!ok)
      out.push_back("constraint " + std::to_string(i) + " (" + std::string(to_string(c.family)) +
                    ", node " + std::to_string(c.node) + ") violated by " + to_decimal(gap));
  }
  return out;
}

namespace {

template <typename S>
S convert(const Rational& x) {
  if constexpr (std::is_same_v<S, double>) return to_double(x);
  else return x;
}

template <typename S>
Rational to_rational(const S& x) {
  if constexpr (std::is_same_v<S, double>) return Rational(x);
  else return x;
}

template <typename S>
Feasibility solve_dense(const LPInstance& lp, const SolveOptions& options) {
  if (lp.num_vars > options.size_cap)
    throw Error(ErrorKind::SizeCapExceeded, "LP with " + std::to_string(lp.num_vars) +
                                                " variables exceeds the dense size cap " +
                                                std::to_string(options.size_cap));
  LpProblem<S> problem;
  const auto rows = static_cast<Eigen::Index>(lp.constraints.size());
  problem.A = LpProblem<S>::Matrix::Zero(rows, static_cast<Eigen::Index>(lp.num_vars));
  problem.b = LpProblem<S>::Vector::Zero(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& c = lp.constraints[r];
    for (const auto& t : c.terms) problem.A(r, static_cast<Eigen::Index>(t.var)) += convert<S>(t.coef);
    problem.b(r) = convert<S>(c.rhs);
    problem.types.push_back(c.relation == Relation::Equal ? RowType::Equal : RowType::LessEq);
  }
  const auto result = Simplex<S>::solve(problem);
  Feasibility out;
  out.method = LpMethod::Simplex;
  out.feasible = result.status != LpStatus::Infeasible;
  if (out.feasible)
    for (std::size_t j = 0; j < lp.num_vars; ++j) out.witness.push_back(to_rational(result.x(j)));
  return out;
}

// Homogeneous cone {(a, b) >= 0 : alpha a + beta b <= 0 for every row}.
template <typename S>
struct Cone {
  std::vector<std::pair<S, S>> rows;
  // Set when the cone is {l b <= a <= u b} with b free: the fast path applies.
  std::optional<std::pair<S, S>> slopes;
};

// Without damping, put b_0 = y0, b_1 = y1, b_2 = 1 - y0, b_3 = 1 - y1 (B = 1).
// The A-range of each flow pair is linear in y, so the extremes of A sit at
// vertices of the arrangement below. Returns nullopt when no vertex is feasible.
template <typename S>
std::optional<std::pair<S, S>> project_slopes(const std::array<const Cone<S>*, 4>& cones) {
  using Ops = ScalarOps<S>;
  const auto& [l0, u0] = *cones[0]->slopes;
  const auto& [l1, u1] = *cones[1]->slopes;
  const auto& [l2, u2] = *cones[2]->slopes;
  const auto& [l3, u3] = *cones[3]->slopes;
  struct Line {
    S p, q, r;  // p y0 + q y1 = r
  };
  const std::array<Line, 8> lines{{{S(1), S(0), S(0)},
                                   {S(1), S(0), S(1)},
                                   {S(0), S(1), S(0)},
                                   {S(0), S(1), S(1)},
                                   {l0 + u2, l1 + u3, u2 + u3},
                                   {l2 + u0, l3 + u1, l2 + l3},
                                   {u0 + u2, u1 + u3, u2 + u3},
                                   {l0 + l2, l1 + l3, l2 + l3}}};
  std::optional<S> lo, hi;
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const auto& a = lines[i];
      const auto& b = lines[j];
      const S det = a.p * b.q - a.q * b.p;
      if (Ops::zero(det)) continue;
      const S y0 = (a.r * b.q - a.q * b.r) / det;
      const S y1 = (a.p * b.r - a.r * b.p) / det;
      if (Ops::negative(y0) || Ops::negative(y1) || Ops::positive(y0 - 1) || Ops::positive(y1 - 1)) continue;
      const S L1 = l0 * y0 + l1 * y1, U1 = u0 * y0 + u1 * y1;
      const S L2 = l2 * (1 - y0) + l3 * (1 - y1), U2 = u2 * (1 - y0) + u3 * (1 - y1);
      if (Ops::positive(L1 - U2) || Ops::positive(L2 - U1)) continue;
      const S top = U1 < U2 ? U1 : U2;
      const S bottom = L1 > L2 ? L1 : L2;
      if (!hi || top > *hi) hi = top;
      if (!lo || bottom < *lo) lo = bottom;
    }
  if (!hi) return std::nullopt;
  return std::pair<S, S>{*lo, *hi};
}

// Small LP over the children of one internal node. Columns: a_0..a_3,
// b_0..b_3, A, B. `fix` pins (A, B) or B alone.
template <typename S>
LpProblem<S> node_problem(const std::array<const Cone<S>*, 4>& cones, const S& s, bool damping,
                          std::optional<S> fix_a, std::optional<S> fix_b) {
  using Row = std::pair<std::vector<std::pair<int, S>>, std::pair<RowType, S>>;
  std::vector<Row> rows;
  for (int c = 0; c < 4; ++c)
    for (const auto& [alpha, beta] : cones[c]->rows)
      rows.push_back({{{c, alpha}, {4 + c, beta}}, {RowType::LessEq, S(0)}});
  const int A = 8, B = 9;
  auto slot = [](bool t1, bool t2) { return child_index(t1, t2); };
  for (bool x : {true, false}) {
    rows.push_back({{{slot(x, true), S(1)}, {slot(x, false), S(1)}, {A, S(-1)}}, {RowType::Equal, S(0)}});
    rows.push_back({{{4 + slot(true, x), S(1)}, {4 + slot(false, x), S(1)}, {B, S(-1)}},
                    {RowType::Equal, S(0)}});
  }
  if (damping)
    for (bool x : {true, false}) {
      rows.push_back({{{slot(x, !x), s}, {A, S(-1)}}, {RowType::LessEq, S(0)}});
      rows.push_back({{{4 + slot(x, !x), s}, {B, S(-1)}}, {RowType::LessEq, S(0)}});
    }
  if (fix_a) rows.push_back({{{A, S(1)}}, {RowType::Equal, *fix_a}});
  if (fix_b) rows.push_back({{{B, S(1)}}, {RowType::Equal, *fix_b}});
  LpProblem<S> p;
  p.A = LpProblem<S>::Matrix::Zero(static_cast<Eigen::Index>(rows.size()), 10);
  p.b = LpProblem<S>::Vector::Zero(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [col, coef] : rows[r].first) p.A(static_cast<Eigen::Index>(r), col) += coef;
    p.types.push_back(rows[r].second.first);
    p.b(static_cast<Eigen::Index>(r)) = rows[r].second.second;
  }
  return p;
}

template <typename S>
Cone<S> project(const std::array<const Cone<S>*, 4>& cones, const S& s, bool damping) {
  using Ops = ScalarOps<S>;
  if (!damping && std::all_of(cones.begin(), cones.end(), [](const Cone<S>* c) { return c->slopes.has_value(); }))
    if (const auto slopes = project_slopes<S>(cones)) {
      Cone<S> out;
      out.slopes = slopes;
      if (Ops::positive(slopes->first)) out.rows.push_back({S(-1), slopes->first});
      out.rows.push_back({S(1), -slopes->second});
      return out;
    }
  auto problem = node_problem<S>(cones, s, damping, std::nullopt, S(1));
  problem.c = LpProblem<S>::Vector::Zero(10);
  problem.c(8) = 1;
  const auto hi = Simplex<S>::solve(problem);
  Cone<S> out;
  if (hi.status == LpStatus::Infeasible) {
    auto ray = node_problem<S>(cones, s, damping, S(1), S(0));
    if (Simplex<S>::solve(ray).status == LpStatus::Infeasible) out.rows.push_back({S(1), S(0)});
    out.rows.push_back({S(0), S(1)});
    return out;
  }
  problem.c(8) = -1;
  const auto lo = Simplex<S>::solve(problem);
  const S lower = -lo.value;
  if (Ops::positive(lower)) out.rows.push_back({S(-1), lower});
  if (hi.status == LpStatus::Optimal) {
    out.rows.push_back({S(1), -hi.value});
    out.slopes = std::pair<S, S>{Ops::positive(lower) ? lower : S(0), hi.value};
  }
  return out;
}

// Splits (A, B) over four children with slope cones; children in slot order.
template <typename S>
std::optional<std::array<std::pair<S, S>, 4>> split_slopes(const std::array<const Cone<S>*, 4>& cones,
                                                          const S& A, const S& B) {
  using Ops = ScalarOps<S>;
  std::array<std::pair<S, S>, 4> out{};
  if (Ops::zero(B)) {
    if (!Ops::zero(A)) return std::nullopt;
    return out;
  }
  const S t = A / B;
  const auto& [l0, u0] = *cones[0]->slopes;
  const auto& [l1, u1] = *cones[1]->slopes;
  const auto& [l2, u2] = *cones[2]->slopes;
  const auto& [l3, u3] = *cones[3]->slopes;
  struct Line {
    S p, q, r;
  };
  const std::array<Line, 8> lines{{{S(1), S(0), S(0)},
                                   {S(1), S(0), S(1)},
                                   {S(0), S(1), S(0)},
                                   {S(0), S(1), S(1)},
                                   {l0, l1, t},
                                   {u0, u1, t},
                                   {l2, l3, l2 + l3 - t},
                                   {u2, u3, u2 + u3 - t}}};
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const auto& a = lines[i];
      const auto& b = lines[j];
      const S det = a.p * b.q - a.q * b.p;
      if (Ops::zero(det)) continue;
      S y0 = (a.r * b.q - a.q * b.r) / det;
      S y1 = (a.p * b.r - a.r * b.p) / det;
      if (Ops::negative(y0) || Ops::negative(y1) || Ops::positive(y0 - 1) || Ops::positive(y1 - 1)) continue;
      if constexpr (std::is_same_v<S, double>) {
        y0 = std::clamp(y0, 0.0, 1.0);
        y1 = std::clamp(y1, 0.0, 1.0);
      }
      const S z0 = 1 - y0, z1 = 1 - y1;
      if (Ops::positive(l0 * y0 + l1 * y1 - t) || Ops::negative(u0 * y0 + u1 * y1 - t) ||
          Ops::positive(l2 * z0 + l3 * z1 - t) || Ops::negative(u2 * z0 + u3 * z1 - t))
        continue;
      S a0 = l0 * y0, a2 = l2 * z0;
      if (t - u1 * y1 > a0) a0 = t - u1 * y1;
      if (t - u3 * z1 > a2) a2 = t - u3 * z1;
      out[0] = {a0 * B, y0 * B};
      out[1] = {(t - a0) * B, y1 * B};
      out[2] = {a2 * B, z0 * B};
      out[3] = {(t - a2) * B, z1 * B};
      return out;
    }
  return std::nullopt;
}

template <typename S>
bool contains(const Cone<S>& cone, const S& a, const S& b) {
  for (const auto& [alpha, beta] : cone.rows)
    if (ScalarOps<S>::positive(alpha * a + beta * b)) return false;
  return true;
}

template <typename S>
Feasibility solve_decomposed(const LPInstance& lp) {
  const std::size_t nodes = lp.kinds.size();
  const S s = convert<S>(lp.s);
  const bool damping = lp.s > 1;
  const S r_lower = convert<S>(lp.r_lower), r_upper = convert<S>(lp.r_upper);
  std::vector<Cone<S>> cones(nodes);
  // Children carry larger ids than their parent (preorder).
  for (std::size_t id = nodes; id-- > 0;) {
    switch (lp.kinds[id]) {
      case NodeKind::Leaf: {
        const S r = convert<S>(lp.leaf_ratio[id]);
        cones[id].rows = {{-r, r_lower}, {r, -r_upper}};
        if (ScalarOps<S>::positive(r)) cones[id].slopes = std::pair<S, S>{r_lower / r, r_upper / r};
        break;
      }
      case NodeKind::Truncating:
        break;
      case NodeKind::Internal: {
        std::array<const Cone<S>*, 4> ch{};
        for (int c = 0; c < 4; ++c) ch[c] = &cones[lp.children[id][c]];
        cones[id] = project<S>(ch, s, damping);
        break;
      }
    }
  }
  Feasibility out;
  out.method = LpMethod::Decomposition;
  out.feasible = nodes > 0 && contains<S>(cones[0], S(1), S(1));
  if (!out.feasible) return out;

  std::vector<S> value(2 * nodes, S(0));
  value[0] = value[1] = S(1);
  for (std::size_t id = 0; id < nodes; ++id) {
    if (lp.kinds[id] != NodeKind::Internal) continue;
    std::array<const Cone<S>*, 4> ch{};
    for (int c = 0; c < 4; ++c) ch[c] = &cones[lp.children[id][c]];
    if (!damping && std::all_of(ch.begin(), ch.end(), [](const Cone<S>* c) { return c->slopes.has_value(); }))
      if (const auto fast = split_slopes<S>(ch, value[2 * id], value[2 * id + 1])) {
        for (int c = 0; c < 4; ++c) {
          const auto child = static_cast<std::size_t>(lp.children[id][c]);
          value[2 * child] = (*fast)[c].first;
          value[2 * child + 1] = (*fast)[c].second;
        }
        continue;
      }
    const auto split = Simplex<S>::solve(node_problem<S>(ch, s, damping, value[2 * id], value[2 * id + 1]));
    if (split.status == LpStatus::Infeasible)
      throw Error(ErrorKind::InvariantViolation, "decomposition lost feasibility at node " + std::to_string(id));
    for (int c = 0; c < 4; ++c) {
      const auto child = static_cast<std::size_t>(lp.children[id][c]);
      value[2 * child] = split.x(c);
      value[2 * child + 1] = split.x(4 + c);
    }
  }
  for (const auto& v : value) out.witness.push_back(to_rational(v));
  return out;
}

}  // namespace

Feasibility solve_feasibility(const LPInstance& lp, const SolveOptions& options) {
  const bool has_tree = !lp.kinds.empty() && 2 * lp.kinds.size() == lp.num_vars;
  LpMethod method = options.method;
  if (method == LpMethod::Auto) method = has_tree ? LpMethod::Decomposition : LpMethod::Simplex;
  if (method == LpMethod::Decomposition && !has_tree)
    throw Error(ErrorKind::InvalidArgument, "decomposition needs an LP built from a coupling tree");
  if (lp.num_vars == 0 && lp.constraints.empty()) return {true, {}, LpMethod::Simplex};
  if (options.mode == LpMode::Exact)
    return method == LpMethod::Decomposition ? solve_decomposed<Rational>(lp)
                                             : solve_dense<Rational>(lp, options);
  return method == LpMethod::Decomposition ? solve_decomposed<double>(lp)
                                           : solve_dense<double>(lp, options);
}

double paper_s(int k, std::uint32_t delta) {
  return std::exp2(k / 4.0) / (std::exp(1.0) * k * static_cast<double>(delta));
}

Rational default_s(int k, std::uint32_t delta) {
  const double s = paper_s(k, delta);
  return s >= 1.0 ? Rational(1) : Rational(s);
}

RatioEstimate estimate_ratio(const CouplingTree& tree, const EstimateOptions& options) {
  const Formula& formula = *tree.ctx.formula;
  const Var n = formula.n;
  if (options.eps <= 0) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  RatioEstimate out;
  out.tree = tree.stats;
  out.s = options.s ? *options.s : default_s(formula.k, tree.ctx.cls->delta);
  if (out.s <= 0) throw Error(ErrorKind::InvalidArgument, "s must be positive");

  const Rational x = options.eps / Rational(Integer(3 * static_cast<std::uint64_t>(n)));
  const Rational slack = exp_bounds(x > 1 ? Rational(1) : x).lower;

  auto query = [&](const Rational& lo, const Rational& hi) {
    const auto lp = build_lp(tree, lo, hi, out.s);
    const bool feasible = solve_feasibility(lp, options.solve).feasible;
    out.trace.push_back({lo, hi, feasible});
    return feasible;
  };

  Rational lo, hi;
  if (options.bisect == BisectMode::Paper) {
    if (out.s * 3 <= 1)
      throw Error(ErrorKind::InvalidArgument, "paper bisection needs s > 1/3, got s = " + to_decimal(out.s));
    lo = (out.s * 3 - 1) / (out.s * 3 + 1);
    hi = (out.s * 3 + 1) / (out.s * 3 - 1);
    if (!query(lo, hi))
      throw Error(ErrorKind::BisectionStalled, "LP infeasible on [" + to_decimal(lo) + ", " + to_decimal(hi) + "]");
    while (hi > slack * lo) {
      if (++out.iterations > options.max_iterations)
        throw Error(ErrorKind::BisectionStalled, "iteration limit reached");
      const Rational mid = (lo + hi) / 2;
      if (query(lo, mid)) hi = mid;
      else lo = mid;
    }
  } else {
    lo = Rational(Integer(1), Integer(1) << n);
    hi = Rational(Integer(1) << n);
    if (!query(lo, hi))
      throw Error(ErrorKind::BisectionStalled, "LP infeasible on the initial interval");
    while (hi > slack * lo) {
      if (++out.iterations > options.max_iterations)
        throw Error(ErrorKind::BisectionStalled, "iteration limit reached");
      // A short rational near the geometric mean keeps the exact LPs small.
      const Rational width = (hi - lo) / 16;
      Rational mid(std::sqrt(to_double(lo) * to_double(hi)));
      if (!(lo < mid && mid < hi)) mid = (lo + hi) / 2;
      mid = simplest_between(std::max(lo + width, mid - width), std::min(hi - width, mid + width));
      if (query(lo, mid)) {
        hi = mid;
      } else if (query(mid, hi)) {
        lo = mid;
      } else {
        throw Error(ErrorKind::BisectionStalled,
                    "both halves of [" + to_decimal(lo) + ", " + to_decimal(hi) + "] infeasible");
      }
    }
  }
  out.p_lower = lo;
  out.p_upper = hi;
  out.p = (lo + hi) / 2;
  return out;
}

RatioEstimate estimate_ratio(const Formula& formula, const Classification& cls,
                             const Marking& marking, const PartialAssignment& lambda, Var pivot,
                             const EstimateOptions& options) {
  const auto tree = build_tree(formula, cls, marking, lambda, pivot, options.tree);
  return estimate_ratio(tree, options);
}

}  // namespace rksat

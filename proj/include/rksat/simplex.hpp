#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>

#include "rksat/rational.hpp"

namespace rksat {

/// Sign tests for a scalar type: exact for Rational, tolerance-based for double.
template <typename Scalar>
struct ScalarOps {
  static bool zero(const Scalar& x) { return x == 0; }
  static bool positive(const Scalar& x) { return x > 0; }
  static bool negative(const Scalar& x) { return x < 0; }
};

template <>
struct ScalarOps<double> {
  static constexpr double tolerance = 1e-9;
  static bool zero(double x) { return std::abs(x) <= tolerance; }
  static bool positive(double x) { return x > tolerance; }
  static bool negative(double x) { return x < -tolerance; }
};

enum class RowType { LessEq, Equal, GreaterEq };
enum class LpStatus { Optimal, Infeasible, Unbounded };

/// maximize c.x subject to A x (rel) b, x >= 0.
template <typename Scalar>
struct LpProblem {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Matrix A;
  Vector b;
  std::vector<RowType> types;
  Vector c;  // empty: pure feasibility
};

template <typename Scalar>
struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  Scalar value = Scalar(0);
  std::size_t pivots = 0;
};

/// Two-phase dense tableau simplex with Bland's rule.
template <typename Scalar>
class Simplex {
 public:
  using Ops = ScalarOps<Scalar>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  static LpResult<Scalar> solve(const LpProblem<Scalar>& problem) {
    Simplex s(problem);
    return s.run(problem);
  }

 private:
  explicit Simplex(const LpProblem<Scalar>& p) : rows_(p.A.rows()), vars_(p.A.cols()) {}

  LpResult<Scalar> run(const LpProblem<Scalar>& p) {
    // Column layout: original | slack/surplus | artificial | rhs.
    std::size_t slacks = 0, artificials = 0;
    std::vector<RowType> types = p.types;
    std::vector<bool> flip(rows_, false);
    for (std::size_t r = 0; r < rows_; ++r) {
      if (Ops::negative(p.b(r))) {
        flip[r] = true;
        if (types[r] == RowType::LessEq) types[r] = RowType::GreaterEq;
        else if (types[r] == RowType::GreaterEq) types[r] = RowType::LessEq;
      }
      if (types[r] != RowType::Equal) ++slacks;
      if (types[r] != RowType::LessEq) ++artificials;
    }
    first_slack_ = vars_;
    first_artificial_ = vars_ + slacks;
    cols_ = first_artificial_ + artificials;
    T_ = Matrix::Zero(rows_ + 1, cols_ + 1);
    basis_.assign(rows_, 0);
    std::size_t next_slack = first_slack_, next_art = first_artificial_;
    for (std::size_t r = 0; r < rows_; ++r) {
      const Scalar sign = flip[r] ? Scalar(-1) : Scalar(1);
      for (std::size_t j = 0; j < vars_; ++j) T_(r, j) = sign * p.A(r, j);
      T_(r, cols_) = sign * p.b(r);
      if (types[r] == RowType::LessEq) {
        T_(r, next_slack) = 1;
        basis_[r] = next_slack++;
      } else {
        if (types[r] == RowType::GreaterEq) T_(r, next_slack++) = -1;
        T_(r, next_art) = 1;
        basis_[r] = next_art++;
      }
    }
    LpResult<Scalar> result;

    // Phase 1: maximize -sum(artificials), i.e. objective row holds reduced costs.
    if (artificials > 0) {
      T_.row(rows_).setZero();
      for (std::size_t j = first_artificial_; j < cols_; ++j) T_(rows_, j) = 1;
      for (std::size_t r = 0; r < rows_; ++r)
        if (basis_[r] >= first_artificial_) T_.row(rows_) -= T_.row(r);
      iterate(cols_, result.pivots);
      if (Ops::negative(T_(rows_, cols_))) {
        result.status = LpStatus::Infeasible;
        return result;
      }
      // Drive remaining artificials out of the basis.
      for (std::size_t r = 0; r < rows_; ++r) {
        if (basis_[r] < first_artificial_) continue;
        for (std::size_t j = 0; j < first_artificial_; ++j)
          if (!Ops::zero(T_(r, j))) {
            pivot(r, j);
            ++result.pivots;
            break;
          }
      }
    }

    // Phase 2.
    T_.row(rows_).setZero();
    if (p.c.size() > 0) {
      for (std::size_t j = 0; j < vars_; ++j) T_(rows_, j) = -p.c(j);
      for (std::size_t r = 0; r < rows_; ++r) {
        const std::size_t b = basis_[r];
        if (b < vars_ && !Ops::zero(T_(rows_, b))) T_.row(rows_) -= T_(rows_, b) * T_.row(r);
      }
      if (!iterate(first_artificial_, result.pivots)) {
        result.status = LpStatus::Unbounded;
        return result;
      }
    }
    result.status = LpStatus::Optimal;
    result.x = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(vars_);
    for (std::size_t r = 0; r < rows_; ++r)
      if (basis_[r] < vars_) result.x(basis_[r]) = T_(r, cols_);
    result.value = T_(rows_, cols_);
    return result;
  }

  // Bland's rule over columns [0, limit). Returns false if unbounded.
  bool iterate(std::size_t limit, std::size_t& pivots) {
    for (;;) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < limit; ++j)
        if (Ops::negative(T_(rows_, j))) {
          enter = j;
          break;
        }
      if (!enter) return true;
      std::optional<std::size_t> leave;
      Scalar best{};
      for (std::size_t r = 0; r < rows_; ++r) {
        if (!Ops::positive(T_(r, *enter))) continue;
        const Scalar ratio = T_(r, cols_) / T_(r, *enter);
        if (!leave || ratio < best || (ratio == best && basis_[r] < basis_[*leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (!leave) return false;
      pivot(*leave, *enter);
      ++pivots;
    }
  }

  void pivot(std::size_t r, std::size_t j) {
    const Scalar inv = Scalar(1) / T_(r, j);
    T_.row(r) *= inv;
    for (Eigen::Index i = 0; i < T_.rows(); ++i) {
      if (static_cast<std::size_t>(i) == r || Ops::zero(T_(i, j))) continue;
      const Scalar factor = T_(i, j);
      T_.row(i) -= factor * T_.row(r);
    }
    basis_[r] = j;
  }

  std::size_t rows_;
  std::size_t vars_;
  std::size_t cols_ = 0;
  std::size_t first_slack_ = 0;
  std::size_t first_artificial_ = 0;
  Matrix T_;
  std::vector<std::size_t> basis_;
};

}  // namespace rksat

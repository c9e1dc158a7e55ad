#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rksat {

/// Every failure the library can report. Grouped by category so callers can
/// tell a bad input from an instance outside the algorithm's regime.
enum class ErrorKind {
  // usage / configuration
  InvalidArgument,
  // input parsing
  UnreadableInput,
  MalformedHeader,
  MalformedClause,
  NonUniformWidth,
  VariableOutOfRange,
  // regime failures: the instance is outside what the algorithm can handle
  MarkingNotFound,
  BadComponentUnsat,
  LambdaStarNotFound,
  ZeroCount,
  EmptyAssignmentSet,
  BisectionStalled,
  NotFullyGoodSatisfied,
  Unsatisfiable,
  // resource caps
  ComponentTooLarge,
  NodeCapExceeded,
  EnumerationCapExceeded,
  SizeCapExceeded,
  // caller contract / internal consistency
  PivotNotMarked,
  PivotAssigned,
  MissingLeafRatio,
  InvariantViolation,
};

enum class ErrorCategory { Usage, Input, Regime, Resource, Internal };

constexpr ErrorCategory category_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
      return ErrorCategory::Usage;
    case ErrorKind::UnreadableInput:
    case ErrorKind::MalformedHeader:
    case ErrorKind::MalformedClause:
    case ErrorKind::NonUniformWidth:
    case ErrorKind::VariableOutOfRange:
      return ErrorCategory::Input;
    case ErrorKind::MarkingNotFound:
    case ErrorKind::BadComponentUnsat:
    case ErrorKind::LambdaStarNotFound:
    case ErrorKind::ZeroCount:
    case ErrorKind::EmptyAssignmentSet:
    case ErrorKind::BisectionStalled:
    case ErrorKind::NotFullyGoodSatisfied:
    case ErrorKind::Unsatisfiable:
      return ErrorCategory::Regime;
    case ErrorKind::ComponentTooLarge:
    case ErrorKind::NodeCapExceeded:
    case ErrorKind::EnumerationCapExceeded:
    case ErrorKind::SizeCapExceeded:
      return ErrorCategory::Resource;
    case ErrorKind::PivotNotMarked:
    case ErrorKind::PivotAssigned:
    case ErrorKind::MissingLeafRatio:
    case ErrorKind::InvariantViolation:
      return ErrorCategory::Internal;
  }
  return ErrorCategory::Internal;
}

std::string_view to_string(ErrorKind kind);
std::string_view to_string(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string stage = {})
      : std::runtime_error(message), kind_(kind), stage_(std::move(stage)) {}

  ErrorKind kind() const { return kind_; }
  ErrorCategory category() const { return category_of(kind_); }
  // Pipeline stage that raised the error ("classify", "mark", ...), if known.
  const std::string& stage() const { return stage_; }

  Error with_stage(std::string stage) const {
    if (!stage_.empty()) return *this;
    return Error(kind_, what(), std::move(stage));
  }

 private:
  ErrorKind kind_;
  std::string stage_;
};

}  // namespace rksat

#include "rksat/errors.hpp"

namespace rksat {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnreadableInput: return "UnreadableInput";
    case ErrorKind::MalformedHeader: return "MalformedHeader";
    case ErrorKind::MalformedClause: return "MalformedClause";
    case ErrorKind::NonUniformWidth: return "NonUniformWidth";
    case ErrorKind::VariableOutOfRange: return "VariableOutOfRange";
    case ErrorKind::MarkingNotFound: return "MarkingNotFound";
    case ErrorKind::BadComponentUnsat: return "BadComponentUnsat";
    case ErrorKind::LambdaStarNotFound: return "LambdaStarNotFound";
    case ErrorKind::ZeroCount: return "ZeroCount";
    case ErrorKind::EmptyAssignmentSet: return "EmptyAssignmentSet";
    case ErrorKind::BisectionStalled: return "BisectionStalled";
    case ErrorKind::NotFullyGoodSatisfied: return "NotFullyGoodSatisfied";
    case ErrorKind::Unsatisfiable: return "Unsatisfiable";
    case ErrorKind::ComponentTooLarge: return "ComponentTooLarge";
    case ErrorKind::NodeCapExceeded: return "NodeCapExceeded";
    case ErrorKind::EnumerationCapExceeded: return "EnumerationCapExceeded";
    case ErrorKind::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorKind::PivotNotMarked: return "PivotNotMarked";
    case ErrorKind::PivotAssigned: return "PivotAssigned";
    case ErrorKind::MissingLeafRatio: return "MissingLeafRatio";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Usage: return "usage";
    case ErrorCategory::Input: return "input";
    case ErrorCategory::Regime: return "regime";
    case ErrorCategory::Resource: return "resource";
    case ErrorCategory::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace rksat

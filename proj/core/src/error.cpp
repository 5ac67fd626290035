#include "pta/error.hpp"

namespace pta {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::syntax: return "SyntaxError";
    case Errc::schema: return "SchemaError";
    case Errc::invariant: return "InvariantError";
    case Errc::io: return "IoError";
    case Errc::unknown_node: return "UnknownNode";
    case Errc::unbound_task: return "UnboundTask";
    case Errc::missing_decision: return "MissingDecision";
    case Errc::invalid_decision: return "InvalidDecision";
    case Errc::step_limit_exceeded: return "StepLimitExceeded";
    case Errc::non_finite_input: return "NonFiniteInput";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::unknown_leaf: return "UnknownLeaf";
    case Errc::non_leaf_clamp: return "NonLeafClamp";
    case Errc::taxonomy_violation: return "TaxonomyViolation";
    case Errc::clock_regression: return "ClockRegression";
    case Errc::unknown_map: return "UnknownMap";
    case Errc::unknown_blank: return "UnknownBlank";
    case Errc::unknown_label: return "UnknownLabel";
    case Errc::precondition_violation: return "PreconditionViolation";
    case Errc::empty_batch: return "EmptyBatch";
    case Errc::no_active_teaching_opportunity: return "NoActiveTeachingOpportunity";
    case Errc::no_learnt_knowledge: return "NoLearntKnowledge";
    case Errc::trace_input_mismatch: return "TraceInputMismatch";
    case Errc::protocol: return "ProtocolError";
    case Errc::bind: return "BindError";
  }
  return "Error";
}

namespace {

std::string compose(Errc code, const std::string& message, const std::string& where) {
  std::string out(to_string(code));
  if (!where.empty()) out += " at " + where;
  out += ": " + message;
  return out;
}

}  // namespace

Error::Error(Errc code, std::string message, std::string where)
    : std::runtime_error(compose(code, message, where)), code_(code), where_(std::move(where)) {}

}  // namespace pta

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pta {

enum class Errc {
  syntax,
  schema,
  invariant,
  io,
  unknown_node,
  unbound_task,
  missing_decision,
  invalid_decision,
  step_limit_exceeded,
  non_finite_input,
  dimension_mismatch,
  unknown_leaf,
  non_leaf_clamp,
  taxonomy_violation,
  clock_regression,
  unknown_map,
  unknown_blank,
  unknown_label,
  precondition_violation,
  empty_batch,
  no_active_teaching_opportunity,
  no_learnt_knowledge,
  trace_input_mismatch,
  protocol,
  bind,
};

std::string_view to_string(Errc code);

// Every failure raised by the library. `where` carries the locating detail
// (JSON pointer, node id, task name, "line:col") when one exists.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message, std::string where = {});

  Errc code() const noexcept { return code_; }
  const std::string& where() const noexcept { return where_; }

 private:
  Errc code_;
  std::string where_;
};

}  // namespace pta

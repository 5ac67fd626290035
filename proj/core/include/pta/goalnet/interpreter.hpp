#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "pta/goalnet/model.hpp"

namespace pta::goalnet {

enum class LogEvent {
  entered_state,
  fired_transition,
  invoked_task,
  decision_resolved,
  entered_composite,
  exited_composite,
};

std::string_view to_string(LogEvent event);

struct LogEntry {
  std::uint64_t step = 0;
  std::string node;
  LogEvent event = LogEvent::entered_state;
  // Task name for invoked_task, chosen state id for decision_resolved.
  std::string detail;

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

// Append-only record of one traversal; step indices strictly increase.
class TraversalLog {
 public:
  void append(std::string node, LogEvent event, std::string detail = {});

  const std::vector<LogEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // JSON Lines, one entry per line. `cycle` is added to every line when >= 0.
  std::string to_jsonl(std::int64_t cycle = -1) const;

  friend bool operator==(const TraversalLog&, const TraversalLog&) = default;

 private:
  std::vector<LogEntry> entries_;
};

// Decision node id -> chosen next state id.
class DecisionTable {
 public:
  void set(std::string decision_node, std::string state) { entries_[std::move(decision_node)] = std::move(state); }
  void clear() { entries_.clear(); }
  const std::string* find(std::string_view decision_node) const;
  const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

struct InterpreterState;

// What a task function sees when the interpreter invokes it.
struct InterpreterContext {
  const InterpreterState& state;
  const GoalNet& level;
  const TransitionNode& transition;
  std::string_view task;
};

using TaskFn = std::function<void(InterpreterContext&)>;

class TaskRegistry {
 public:
  // Throws Errc::invariant on a duplicate name.
  void add(std::string name, TaskFn fn);
  const TaskFn* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::vector<std::string> names() const;

 private:
  std::map<std::string, TaskFn, std::less<>> entries_;
};

struct Frame {
  const GoalNet* level = nullptr;
  std::string composite;
};

struct InterpreterState {
  const GoalNet* net = nullptr;
  const TaskRegistry* registry = nullptr;
  const GoalNet* level = nullptr;  // net level that owns `current`
  std::string current;
  std::vector<Frame> stack;  // enclosing levels, innermost last
  std::uint64_t rng_seed = 0;
  std::mt19937_64 rng;
  TraversalLog log;
  std::size_t steps = 0;
};

enum class StepOutcome { advanced, reached_goal };

// Supplies the decision table at the moment a decision node is resolved, i.e.
// after that transition's tasks ran.
using DecisionTableProvider = std::function<const DecisionTable&()>;

// Loads the top-level start state. Throws Errc::unbound_task (where = the
// transition id) if any task name in the net has no registry entry.
InterpreterState start(const GoalNet& net, const TaskRegistry& registry, std::uint64_t seed);

StepOutcome step(InterpreterState& state, const DecisionTable& table);
StepOutcome step(InterpreterState& state, const DecisionTableProvider& table_provider);

inline constexpr std::size_t kDefaultStepLimit = 10'000;

// Steps until the top-level end state is reached and returns the full log.
const TraversalLog& run_to_goal(InterpreterState& state, const DecisionTableProvider& table_provider,
                                std::size_t step_limit = kDefaultStepLimit);

bool at_goal(const InterpreterState& state);

}  // namespace pta::goalnet

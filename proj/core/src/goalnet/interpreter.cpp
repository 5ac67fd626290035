#include "pta/goalnet/interpreter.hpp"

#include <algorithm>
#include "pta/error.hpp"
#include "pta/json_util.hpp"

namespace pta::goalnet {

std::string_view to_string(LogEvent event) {
  switch (event) {
    case LogEvent::entered_state: return "entered_state";
    case LogEvent::fired_transition: return "fired_transition";
    case LogEvent::invoked_task: return "invoked_task";
    case LogEvent::decision_resolved: return "decision_resolved";
    case LogEvent::entered_composite: return "entered_composite";
    case LogEvent::exited_composite: return "exited_composite";
  }
  return "entered_state";
}

void TraversalLog::append(std::string node, LogEvent event, std::string detail) {
  const std::uint64_t step = entries_.empty() ? 0 : entries_.back().step + 1;
  entries_.push_back({step, std::move(node), event, std::move(detail)});
}

std::string TraversalLog::to_jsonl(std::int64_t cycle) const {
  std::string out;
  for (const auto& e : entries_) {
    json_util::OrderedJson line;
    if (cycle >= 0) line["cycle"] = cycle;
    line["step"] = e.step;
    line["event"] = to_string(e.event);
    line["node"] = e.node;
    if (e.event == LogEvent::invoked_task) line["task"] = e.detail;
    if (e.event == LogEvent::decision_resolved) line["state"] = e.detail;
    out += json_util::to_line(line);
  }
  return out;
}

const std::string* DecisionTable::find(std::string_view decision_node) const {
  auto it = entries_.find(decision_node);
  return it == entries_.end() ? nullptr : &it->second;
}

void TaskRegistry::add(std::string name, TaskFn fn) {
  if (name.empty()) throw Error(Errc::invariant, "task name must be nonempty");
  if (entries_.count(name)) throw Error(Errc::invariant, "task registered twice", name);
  entries_.emplace(std::move(name), std::move(fn));
}

const TaskFn* TaskRegistry::find(std::string_view name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> TaskRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

namespace {

void check_bound(const GoalNet& net, const TaskRegistry& registry) {
  for (const auto& t : net.transitions)
    for (const auto& task : t.tasks)
      if (!registry.contains(task)) throw Error(Errc::unbound_task, "no registry entry for task " + task, t.id);
  for (const auto& sub : net.subnets) check_bound(sub, registry);
}

void enter_state(InterpreterState& state, const GoalNet& level, const std::string& id) {
  state.log.append(id, LogEvent::entered_state);
  state.current = id;
  const auto* s = level.find_state(id);
  if (s == nullptr || s->kind != StateKind::composite) return;
  const auto* sub = level.find_subnet(id);
  if (sub == nullptr || sub->start_state() == nullptr)
    throw Error(Errc::invariant, "composite state has no sub-net start", id);
  state.stack.push_back({&level, id});
  state.log.append(id, LogEvent::entered_composite);
  state.level = sub;
  enter_state(state, *sub, sub->start_state()->id);
}

std::string draw_weighted(InterpreterState& state, const TransitionNode& t, const std::vector<std::string>& succ) {
  double total = 0;
  std::vector<double> w(succ.size(), 0.0);
  for (std::size_t i = 0; i < succ.size(); ++i) {
    auto it = t.weights->find(succ[i]);
    if (it != t.weights->end()) w[i] = it->second;
    total += w[i];
  }
  if (!(total > 0)) throw Error(Errc::invariant, "probabilistic weights sum to zero", t.id);
  // 53 random mantissa bits; mt19937_64 output is fixed by the standard, so the
  // draw is reproducible across standard libraries.
  const double u = static_cast<double>(state.rng() >> 11) * 0x1.0p-53;
  const double target = u * total;
  double cumulative = 0;
  for (std::size_t i = 0; i < succ.size(); ++i) {
    cumulative += w[i];
    if (w[i] > 0 && target < cumulative) return succ[i];
  }
  for (std::size_t i = succ.size(); i-- > 0;)
    if (w[i] > 0) return succ[i];
  return succ.back();
}

}  // namespace

InterpreterState start(const GoalNet& net, const TaskRegistry& registry, std::uint64_t seed) {
  check_bound(net, registry);
  const auto* s = net.start_state();
  if (s == nullptr) throw Error(Errc::invariant, "net has no start state", net.name);
  InterpreterState state;
  state.net = &net;
  state.registry = &registry;
  state.level = &net;
  state.rng_seed = seed;
  state.rng.seed(seed);
  enter_state(state, net, s->id);
  return state;
}

bool at_goal(const InterpreterState& state) {
  if (!state.stack.empty() || state.level != state.net) return false;
  const auto* end = state.net->end_state();
  return end != nullptr && end->id == state.current;
}

StepOutcome step(InterpreterState& state, const DecisionTable& table) {
  return step(state, DecisionTableProvider([&table]() -> const DecisionTable& { return table; }));
}

StepOutcome step(InterpreterState& state, const DecisionTableProvider& table_provider) {
  if (at_goal(state)) return StepOutcome::reached_goal;
  ++state.steps;
  const GoalNet& level = *state.level;

  if (const auto* s = level.find_state(state.current)) {
    if (s->is_end) {
      // Sub-net finished: continue with the node after the composite state.
      const Frame frame = state.stack.back();
      state.stack.pop_back();
      state.level = frame.level;
      state.log.append(frame.composite, LogEvent::exited_composite);
      const auto next = successors(*frame.level, frame.composite);
      if (next.size() != 1) throw Error(Errc::invariant, "composite state needs one following transition", frame.composite);
      state.current = next.front();
      return StepOutcome::advanced;
    }
    const auto next = successors(level, s->id);
    if (next.size() != 1) throw Error(Errc::invariant, "state needs one following transition", s->id);
    state.current = next.front();
    return StepOutcome::advanced;
  }

  const auto* t = level.find_transition(state.current);
  if (t == nullptr) throw Error(Errc::unknown_node, "current node not in active net level", state.current);

  state.log.append(t->id, LogEvent::fired_transition);
  for (const auto& task : t->tasks) {
    const auto* fn = state.registry->find(task);
    if (fn == nullptr) throw Error(Errc::unbound_task, "no registry entry for task " + task, t->id);
    state.log.append(t->id, LogEvent::invoked_task, task);
    InterpreterContext ctx{state, level, *t, task};
    (*fn)(ctx);
  }

  const auto succ = successors(level, t->id);
  if (succ.empty()) throw Error(Errc::invariant, "transition has no output state", t->id);
  std::string next;
  if (succ.size() == 1) {
    next = succ.front();
  } else {
    if (t->kind == TransitionKind::probabilistic && t->weights) {
      next = draw_weighted(state, *t, succ);
    } else {
      const DecisionTable& table = table_provider();
      const auto* chosen = table.find(t->id);
      if (chosen == nullptr) throw Error(Errc::missing_decision, "decision table has no entry", t->id);
      if (std::find(succ.begin(), succ.end(), *chosen) == succ.end())
        throw Error(Errc::invalid_decision, "decision " + *chosen + " is not a successor", t->id);
      next = *chosen;
    }
    state.log.append(t->id, LogEvent::decision_resolved, next);
  }
  enter_state(state, level, next);
  return at_goal(state) ? StepOutcome::reached_goal : StepOutcome::advanced;
}

const TraversalLog& run_to_goal(InterpreterState& state, const DecisionTableProvider& table_provider,
                                std::size_t step_limit) {
  std::size_t taken = 0;
  while (!at_goal(state)) {
    if (taken >= step_limit)
      throw Error(Errc::step_limit_exceeded, "no goal after " + std::to_string(step_limit) + " steps", state.current);
    step(state, table_provider);
    ++taken;
  }
  return state.log;
}

}  // namespace pta::goalnet

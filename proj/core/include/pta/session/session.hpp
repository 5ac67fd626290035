#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pta/events/event_control.hpp"
#include "pta/fcm/model.hpp"
#include "pta/goalnet/interpreter.hpp"
#include "pta/goalnet/model.hpp"
#include "pta/json_util.hpp"
#include "pta/kb/knowledge_base.hpp"
#include "pta/reasoning/agent.hpp"
#include "pta/session/config.hpp"
#include "pta/session/scenario.hpp"

namespace pta::session {

// Immutable inputs shared by every session started from one config.
struct Models {
  goalnet::GoalNet net;
  fcm::FcmModel fcm;
  kb::KnowledgeBase kb;  // domain parts only; sessions copy it
  Scenario scenario;
};

// Loads and cross-validates every model named by `config`.
std::shared_ptr<const Models> load_models(const SessionConfig& config);

struct TraceStep {
  enum class Kind { choice, teach, idle };

  std::int64_t at_ms = 0;
  Kind kind = Kind::idle;
  std::string choice_id;
  kb::Assignment assignment;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct Trace {
  std::vector<TraceStep> steps;

  friend bool operator==(const Trace&, const Trace&) = default;
};

// {"steps":[{"at_ms":n,"input":{"choice":"id"} | {"teach":{blank:label|null}} | "idle"}]}.
// Throws Errc::syntax, Errc::schema and Errc::invariant (decreasing at_ms).
Trace parse_trace(std::string_view document);
Trace load_trace(const std::filesystem::path& path);
std::string serialize_trace(const Trace& trace);

struct ChoiceView {
  std::string id;
  std::string text;
};

struct ConceptMapView {
  std::string map_id;
  kb::Assignment assignment;
  std::set<std::string> error_blanks;
};

struct Meters {
  double motivation = 0;
  double ability = 0;
};

struct CueView {
  std::string cue_id;
  std::string text;
  kb::Expression expression = kb::Expression::neutral;
};

struct PracticeView {
  bool success = false;
  std::set<std::string> error_blanks;
};

// What the student currently perceives.
struct SessionState {
  std::string scene;
  std::string speaker;
  std::string text;
  std::vector<ChoiceView> pending_choices;
  // A concept map is open for the student to teach; choices are empty then.
  bool awaiting_teach = false;
  std::optional<Meters> meters;
  std::optional<CueView> ta_panel;
  std::optional<ConceptMapView> concept_map_view;
  std::optional<PracticeView> practice_result;
  std::size_t cycle_index = 0;
  std::int64_t time_ms = 0;

  json_util::OrderedJson to_json(const kb::KnowledgeBase& kb) const;
};

// Runs the main routine once per non-empty poll batch over a virtual clock.
// Not thread-safe; callers serialize access per session.
class Session {
 public:
  using CycleListener = std::function<void(const reasoning::CycleRecord&, const SessionState&)>;

  explicit Session(const SessionConfig& config);
  Session(const SessionConfig& config, std::shared_ptr<const Models> models);

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  // Runs every checking period up to and including `now_ms`, then moves the
  // clock to `now_ms`. Throws Errc::clock_regression.
  void advance_to(std::int64_t now_ms);

  // Advances to step.at_ms and applies the input. Throws
  // Errc::trace_input_mismatch when the input is not currently expected.
  void apply(const TraceStep& step);

  // Keeps checking until no event is pending, for at most `max_periods`.
  void settle(std::size_t max_periods = 64);

  void set_listener(CycleListener listener) { listener_ = std::move(listener); }

  const SessionState& state() const { return state_; }
  const std::vector<reasoning::CycleRecord>& cycles() const { return cycles_; }
  const events::EventControl& events() const { return events_; }
  const kb::KnowledgeBase& kb() const { return kb_; }
  const Trace& recorded() const { return recorded_; }
  std::int64_t now() const { return events_.now(); }
  const SessionConfig& config() const { return config_; }

  std::string events_jsonl() const { return events_.to_jsonl(); }
  const std::string& traversal_jsonl() const { return traversal_; }
  std::string report_json() const;

  // Writes events.jsonl, traversal.jsonl, report.json, learnt.json and
  // trace.json into config.out_dir (no-op when it is empty).
  void write_outputs() const;

 private:
  void check(std::int64_t at_ms);
  void run_cycle(std::vector<events::Event> batch);
  void enter_scene(const std::string& id);
  void apply_directive(const reasoning::ActionDirective& d);

  SessionConfig config_;
  std::shared_ptr<const Models> models_;
  kb::KnowledgeBase kb_;
  events::EventControl events_;
  reasoning::Agent agent_;
  goalnet::TaskRegistry registry_;
  SessionState state_;
  std::vector<reasoning::CycleRecord> cycles_;
  std::string traversal_;
  Trace recorded_;
  std::int64_t next_check_ms_;
  CycleListener listener_;
};

// Per-cycle interpreter seed derived from the session seed.
std::uint64_t cycle_seed(std::uint64_t session_seed, std::size_t cycle);

struct SessionReport {
  SessionState final_state;
  std::vector<reasoning::CycleRecord> cycles;
  std::string events_jsonl;
  std::string traversal_jsonl;
  std::string report_json;
};

// Replays `trace` headlessly, settles, and writes the outputs when the config
// names an out_dir.
SessionReport run_trace(const SessionConfig& config, const Trace& trace);
SessionReport run_trace(const SessionConfig& config, std::shared_ptr<const Models> models, const Trace& trace);

}  // namespace pta::session

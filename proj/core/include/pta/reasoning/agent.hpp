#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pta/events/event_control.hpp"
#include "pta/fcm/model.hpp"
#include "pta/goalnet/interpreter.hpp"
#include "pta/json_util.hpp"
#include "pta/kb/knowledge_base.hpp"
#include "pta/reasoning/reasoning.hpp"

namespace pta::reasoning {

// Ids of the decision transitions in the bundled nets and the states each
// outcome leads to.
struct NetBinding {
  std::string dispatch_decision = "dispatch_reasoning";
  std::string learn_state = "to_learn_knowledge";
  std::string practice_state = "to_practice_knowledge";
  std::string persuade_state = "to_persuade";

  std::string response_decision = "check_response";
  std::string accepted_state = "teaching_accepted";
  std::string refused_state = "teaching_refused";

  std::string solution_decision = "reasoning";
  std::string correct_state = "solution_correct";
  std::string wrong_state = "solution_wrong";

  std::string mot_abi_decision = "check_mot_abi";
  std::string cue_required_state = "cue_required";
  std::string no_cue_state = "no_cue_required";
};

// The student's answer at a teaching point, carried by the teaching-point
// event as attributes: response=accepted|refused, map, assignment (JSON text).
struct TeachingResponse {
  bool accepted = false;
  std::string map_id;
  kb::Assignment assignment;

  events::Attributes to_attributes() const;
  // nullopt when `event` is not a teaching-point event. Throws Errc::schema on
  // malformed attributes.
  static std::optional<TeachingResponse> from_event(const events::Event& event);
};

struct AgentConfig {
  Baselines baselines;
  NetBinding binding;
  std::string rejection_event = std::string(kDefaultRejectionEvent);
};

struct EmittedEvent {
  std::uint64_t id = 0;
  std::string name;
};

// What one main-routine cycle perceived, decided and did.
struct CycleRecord {
  std::size_t cycle = 0;
  std::int64_t at_ms = 0;
  std::vector<events::Event> batch;
  std::map<std::string, double> leaves;
  std::optional<ReasoningKind> kind;
  std::optional<ElmAssessment> assessment;
  ActionDirective directive;
  std::vector<EmittedEvent> emitted;
  bool finished = false;

  json_util::OrderedJson to_json() const;
};

// PTA Control: owns the per-cycle working memory and implements every task
// function the bundled Goal Nets name. One instance per session.
class Agent {
 public:
  Agent(const fcm::FcmModel& model, kb::KnowledgeBase& kb, events::EventControl& events, AgentConfig config = {});

  Agent(const Agent&) = delete;
  Agent& operator=(const Agent&) = delete;

  void begin_cycle(std::size_t cycle, std::vector<events::Event> batch);
  CycleRecord end_cycle();

  const CycleRecord& current() const { return record_; }
  const goalnet::DecisionTable& decisions() const { return decisions_; }
  const std::optional<ElmAssessment>& last_assessment() const { return last_assessment_; }
  const AgentConfig& config() const { return config_; }

  // Registry entries capture `this`; the agent must outlive the registry.
  goalnet::TaskRegistry make_registry();

  // Main routine.
  void detect_event();
  void interpret_event();
  void select_reasoning_task();
  void finish(bool top_level);

  // To Learn Knowledge.
  void require_teaching();
  void check_response();
  void initialize_teaching();
  void acquire_knowledge();
  void save_knowledge();
  void generate_rejection_event();

  // To Practice Knowledge Learnt.
  void query_kb();
  void reasoning();
  void carry_out_sol();
  void generate_wrong_sol_event();

  // To Persuade.
  void fcm_calculation();
  void check_mot_abi();
  void select_cue();
  void execute_cue();

  // Whole sub-net bodies without an interpreter, running the same task
  // functions in sub-net order.
  ActionDirective persuasion_cycle();
  // Throws Errc::no_active_teaching_opportunity when neither the response nor
  // the batch names a concept map.
  ActionDirective teachability_cycle(const TeachingResponse& response);
  // Throws Errc::no_learnt_knowledge.
  ActionDirective practicability_cycle();

 private:
  const events::Event& emit(std::string name, events::EventType type, events::EventCategory category,
                            events::Attributes attributes = {});

  const fcm::FcmModel& model_;
  kb::KnowledgeBase& kb_;
  events::EventControl& events_;
  AgentConfig config_;

  CycleRecord record_;
  goalnet::DecisionTable decisions_;
  std::optional<ElmAssessment> last_assessment_;
  std::optional<std::string> last_taught_map_;

  // Teachability working memory.
  std::optional<TeachingResponse> response_;
  std::set<std::string> prior_errors_;
  // Practicability working memory.
  std::optional<kb::LearntKnowledge> retrieved_;
  std::set<std::string> solution_errors_;
  // Persuasion working memory.
  bool cue_needed_ = false;
  const kb::PersuasionCue* chosen_cue_ = nullptr;
};

}  // namespace pta::reasoning

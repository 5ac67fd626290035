#include "pta/reasoning/agent.hpp"

#include "pta/error.hpp"

namespace pta::reasoning {

using events::EventCategory;
using events::EventType;

events::Attributes TeachingResponse::to_attributes() const {
  events::Attributes a;
  a["response"] = accepted ? "accepted" : "refused";
  a["map"] = map_id;
  a["assignment"] = kb::assignment_to_json(assignment).dump();
  return a;
}

std::optional<TeachingResponse> TeachingResponse::from_event(const events::Event& event) {
  if (event.name != kTeachingPointEvent) return std::nullopt;
  const auto where = "event " + std::to_string(event.id);
  TeachingResponse r;
  const auto response = event.attributes.find("response");
  if (response == event.attributes.end() || (response->second != "accepted" && response->second != "refused"))
    throw Error(Errc::schema, "teaching-point event needs response=accepted|refused", where);
  r.accepted = response->second == "accepted";
  if (auto it = event.attributes.find("map"); it != event.attributes.end()) r.map_id = it->second;
  if (auto it = event.attributes.find("assignment"); it != event.attributes.end() && !it->second.empty())
    r.assignment = kb::assignment_from_json(json_util::parse_document(it->second), where + "/assignment");
  return r;
}

json_util::OrderedJson CycleRecord::to_json() const {
  json_util::OrderedJson j;
  j["cycle"] = cycle;
  j["at_ms"] = at_ms;
  j["batch"] = json_util::OrderedJson::array();
  for (const auto& e : batch) j["batch"].push_back({{"id", e.id}, {"name", e.name}});
  j["reasoning"] = kind ? json_util::OrderedJson(to_string(*kind)) : json_util::OrderedJson(nullptr);
  j["leaves"] = json_util::OrderedJson::object();
  for (const auto& [leaf, value] : leaves) j["leaves"][leaf] = value;
  j["assessment"] = assessment ? reasoning::to_json(*assessment) : json_util::OrderedJson(nullptr);
  j["directive"] = directive.to_json();
  j["emitted"] = json_util::OrderedJson::array();
  for (const auto& e : emitted) j["emitted"].push_back({{"id", e.id}, {"name", e.name}});
  j["finished"] = finished;
  return j;
}

Agent::Agent(const fcm::FcmModel& model, kb::KnowledgeBase& kb, events::EventControl& events, AgentConfig config)
    : model_(model), kb_(kb), events_(events), config_(std::move(config)) {}

void Agent::begin_cycle(std::size_t cycle, std::vector<events::Event> batch) {
  record_ = CycleRecord{};
  record_.cycle = cycle;
  record_.at_ms = events_.now();
  record_.batch = std::move(batch);
  decisions_.clear();
  response_.reset();
  prior_errors_.clear();
  retrieved_.reset();
  solution_errors_.clear();
  cue_needed_ = false;
  chosen_cue_ = nullptr;
}

CycleRecord Agent::end_cycle() { return std::move(record_); }

goalnet::TaskRegistry Agent::make_registry() {
  goalnet::TaskRegistry r;
  auto bind = [&](const char* name, void (Agent::*fn)()) {
    r.add(name, [this, fn](goalnet::InterpreterContext&) { (this->*fn)(); });
  };
  bind("DetectEvent", &Agent::detect_event);
  bind("InterpretEvent", &Agent::interpret_event);
  bind("SelectReasoning", &Agent::select_reasoning_task);
  r.add("Finish", [this](goalnet::InterpreterContext& ctx) { finish(ctx.level.composite.empty()); });
  bind("RequireTeaching", &Agent::require_teaching);
  bind("CheckResponse", &Agent::check_response);
  bind("InitializeTeaching", &Agent::initialize_teaching);
  bind("AcquireKnowledge", &Agent::acquire_knowledge);
  bind("SaveKnowledge", &Agent::save_knowledge);
  bind("GenerateRejectionEvent", &Agent::generate_rejection_event);
  bind("QueryKB", &Agent::query_kb);
  bind("Reasoning", &Agent::reasoning);
  bind("CarryOutSol", &Agent::carry_out_sol);
  bind("GenerateWrongSolEvent", &Agent::generate_wrong_sol_event);
  bind("FCMCalculation", &Agent::fcm_calculation);
  bind("CheckMotAbi", &Agent::check_mot_abi);
  bind("SelectCue", &Agent::select_cue);
  bind("ExecuteCue", &Agent::execute_cue);
  return r;
}

const events::Event& Agent::emit(std::string name, EventType type, EventCategory category,
                                 events::Attributes attributes) {
  const auto& e = events_.create_event(std::move(name), type, category, std::move(attributes));
  record_.emitted.push_back({e.id, e.name});
  return e;
}

// Main routine.

void Agent::detect_event() {
  if (record_.batch.empty()) throw Error(Errc::empty_batch, "no events detected", "DetectEvent");
}

void Agent::interpret_event() { record_.leaves = leaf_activations(kb_, record_.batch); }

void Agent::select_reasoning_task() {
  const auto kind = select_reasoning(record_.batch);
  record_.kind = kind;
  const auto& b = config_.binding;
  switch (kind) {
    case ReasoningKind::teachability: decisions_.set(b.dispatch_decision, b.learn_state); break;
    case ReasoningKind::practicability: decisions_.set(b.dispatch_decision, b.practice_state); break;
    case ReasoningKind::persuasion: decisions_.set(b.dispatch_decision, b.persuade_state); break;
  }
}

void Agent::finish(bool top_level) {
  if (top_level) record_.finished = true;
}

// To Learn Knowledge.

void Agent::require_teaching() {
  if (!response_ && !record_.batch.empty()) response_ = TeachingResponse::from_event(record_.batch.front());
  if (!response_)
    throw Error(Errc::no_active_teaching_opportunity, "no teaching response in this cycle", "RequireTeaching");
}

void Agent::check_response() {
  if (!response_) throw Error(Errc::no_active_teaching_opportunity, "teaching was not requested", "CheckResponse");
  const auto& b = config_.binding;
  decisions_.set(b.response_decision, response_->accepted ? b.accepted_state : b.refused_state);
}

void Agent::initialize_teaching() {
  if (!response_ || response_->map_id.empty())
    throw Error(Errc::no_active_teaching_opportunity, "no concept map to teach", "InitializeTeaching");
  if (kb_.find_map(response_->map_id) == nullptr)
    throw Error(Errc::unknown_map, "unknown concept map", response_->map_id);
  const auto it = kb_.learnt.find(response_->map_id);
  prior_errors_ = it == kb_.learnt.end() ? std::set<std::string>{} : it->second.error_blanks;
}

void Agent::acquire_knowledge() {
  if (!response_ || !response_->accepted)
    throw Error(Errc::no_active_teaching_opportunity, "no accepted teaching to acquire", "AcquireKnowledge");
  const auto* map = kb_.find_map(response_->map_id);
  // Blanks the student left untouched are stored as empty entries.
  for (const auto& blank : map->blanks) response_->assignment.try_emplace(blank.id, std::nullopt);
}

void Agent::save_knowledge() {
  if (!response_ || !response_->accepted)
    throw Error(Errc::no_active_teaching_opportunity, "no accepted teaching to save", "SaveKnowledge");
  const auto learnt = kb::save_learnt(kb_, response_->map_id, response_->assignment);
  last_taught_map_ = response_->map_id;
  emit(std::string(kTeachabilityEvent), EventType::administrative, EventCategory::administrative,
       {{"map", response_->map_id}});
  record_.directive = ActionDirective::show_concept_map(learnt.map_id, learnt.assignment, prior_errors_);
}

void Agent::generate_rejection_event() {
  events::Attributes attrs;
  if (response_ && !response_->map_id.empty()) attrs["map"] = response_->map_id;
  emit(config_.rejection_event, EventType::dialogue, EventCategory::learning_behavior, std::move(attrs));
  record_.directive = ActionDirective::none();
}

// To Practice Knowledge Learnt.

void Agent::query_kb() {
  std::optional<std::string> map_id = last_taught_map_;
  if (!record_.batch.empty() && record_.batch.front().name == kTeachabilityEvent) {
    const auto& attrs = record_.batch.front().attributes;
    if (auto it = attrs.find("map"); it != attrs.end()) map_id = it->second;
  }
  if (!map_id) throw Error(Errc::no_learnt_knowledge, "nothing has been taught yet", "QueryKB");
  const auto it = kb_.learnt.find(*map_id);
  if (it == kb_.learnt.end()) throw Error(Errc::no_learnt_knowledge, "no learnt knowledge for map", *map_id);
  retrieved_ = it->second;
}

void Agent::reasoning() {
  if (!retrieved_) throw Error(Errc::no_learnt_knowledge, "knowledge was not retrieved", "Reasoning");
  const auto* map = kb_.find_map(retrieved_->map_id);
  if (map == nullptr) throw Error(Errc::unknown_map, "unknown concept map", retrieved_->map_id);
  solution_errors_ = kb::grade(*map, retrieved_->assignment);
  const auto& b = config_.binding;
  decisions_.set(b.solution_decision, solution_errors_.empty() ? b.correct_state : b.wrong_state);
}

void Agent::carry_out_sol() {
  if (!retrieved_) throw Error(Errc::no_learnt_knowledge, "knowledge was not retrieved", "CarryOutSol");
  kb::record_errors(kb_, retrieved_->map_id, {});
  emit(std::string(kTeachSuccessEvent), EventType::teaching_feedback, EventCategory::knowledge_data,
       {{"map", retrieved_->map_id}});
  record_.directive = ActionDirective::practice_success(retrieved_->map_id);
}

void Agent::generate_wrong_sol_event() {
  if (!retrieved_) throw Error(Errc::no_learnt_knowledge, "knowledge was not retrieved", "GenerateWrongSolEvent");
  kb::record_errors(kb_, retrieved_->map_id, solution_errors_);
  emit(std::string(kTeachFailureEvent), EventType::teaching_feedback, EventCategory::knowledge_data,
       {{"map", retrieved_->map_id}});
  emit(std::string(kWrongSolutionEvent), EventType::administrative, EventCategory::administrative,
       {{"map", retrieved_->map_id}});
  record_.directive = ActionDirective::practice_failure(retrieved_->map_id, solution_errors_);
}

// To Persuade.

void Agent::fcm_calculation() {
  const auto a = assess(model_, kb_, record_.batch, config_.baselines);
  record_.assessment = a;
  last_assessment_ = a;
}

void Agent::check_mot_abi() {
  if (!record_.assessment)
    throw Error(Errc::precondition_violation, "motivation and ability were not assessed", "CheckMotAbi");
  if (record_.assessment->route == Route::peripheral)
    cue_needed_ = true;
  else
    cue_needed_ = feedback_cue_for_batch(kb_, record_.batch) != nullptr;
  const auto& b = config_.binding;
  decisions_.set(b.mot_abi_decision, cue_needed_ ? b.cue_required_state : b.no_cue_state);
}

void Agent::select_cue() {
  if (!record_.assessment)
    throw Error(Errc::precondition_violation, "motivation and ability were not assessed", "SelectCue");
  const auto& a = *record_.assessment;
  if (a.route == Route::peripheral)
    chosen_cue_ = &select_cue_for_batch(kb_, record_.batch, a.low_motivation(), a.low_ability());
  else
    chosen_cue_ = feedback_cue_for_batch(kb_, record_.batch);
  if (chosen_cue_ == nullptr) throw Error(Errc::precondition_violation, "no cue applies", "SelectCue");
}

void Agent::execute_cue() {
  if (chosen_cue_ == nullptr) throw Error(Errc::precondition_violation, "no cue selected", "ExecuteCue");
  record_.directive = ActionDirective::display_cue(*chosen_cue_);
}

// Whole sub-net bodies.

ActionDirective Agent::persuasion_cycle() {
  record_.directive = ActionDirective::none();
  fcm_calculation();
  check_mot_abi();
  if (cue_needed_) {
    select_cue();
    execute_cue();
  }
  return record_.directive;
}

ActionDirective Agent::teachability_cycle(const TeachingResponse& response) {
  response_ = response;
  if (response_->map_id.empty())
    throw Error(Errc::no_active_teaching_opportunity, "no concept map to teach", "teachability");
  record_.directive = ActionDirective::none();
  require_teaching();
  check_response();
  if (response_->accepted) {
    initialize_teaching();
    acquire_knowledge();
    save_knowledge();
  } else {
    generate_rejection_event();
  }
  return record_.directive;
}

ActionDirective Agent::practicability_cycle() {
  record_.directive = ActionDirective::none();
  query_kb();
  reasoning();
  if (solution_errors_.empty())
    carry_out_sol();
  else
    generate_wrong_sol_event();
  return record_.directive;
}

}  // namespace pta::reasoning

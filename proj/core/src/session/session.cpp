#include "pta/session/session.hpp"

#include "pta/error.hpp"

namespace pta::session {

using json_util::OrderedJson;

std::shared_ptr<const Models> load_models(const SessionConfig& config) {
  auto m = std::make_shared<Models>(Models{goalnet::load_goalnet(config.goalnet_path), fcm::load_fcm(config.fcm_path),
                                           kb::load_kb_file(config.kb_path), load_scenario(config.scenario_path)});
  const auto report = goalnet::validate_goalnet(m->net);
  if (!report.empty())
    throw Error(Errc::invariant, report.front().rule + ": " + report.front().message, report.front().node);
  kb::cross_validate(m->kb, m->fcm);
  cross_validate(m->scenario, m->kb);
  return m;
}

// Trace files.

Trace parse_trace(std::string_view document) {
  const auto doc = json_util::parse_document(document);
  json_util::Fields top(doc, "");
  const auto& steps = json_util::as_array(top.required("steps"), top.path_of("steps"));
  top.finish();
  Trace t;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto path = "/steps/" + std::to_string(i);
    json_util::Fields f(steps[i], path);
    TraceStep s;
    s.at_ms = json_util::as_integer(f.required("at_ms"), f.path_of("at_ms"));
    const auto& input = f.required("input");
    const auto input_path = f.path_of("input");
    f.finish();
    if (input.is_string()) {
      if (input.get<std::string>() != "idle") throw Error(Errc::schema, "unknown input '" + input.get<std::string>() + "'", input_path);
      s.kind = TraceStep::Kind::idle;
    } else {
      json_util::Fields in(input, input_path);
      if (const auto* c = in.optional("choice")) {
        s.kind = TraceStep::Kind::choice;
        s.choice_id = json_util::as_string(*c, in.path_of("choice"));
      } else if (const auto* a = in.optional("teach")) {
        s.kind = TraceStep::Kind::teach;
        s.assignment = kb::assignment_from_json(*a, in.path_of("teach"));
      } else {
        throw Error(Errc::schema, "input needs 'choice' or 'teach'", input_path);
      }
      in.finish();
    }
    if (s.at_ms < 0) throw Error(Errc::invariant, "at_ms must be non-negative", path);
    if (!t.steps.empty() && s.at_ms < t.steps.back().at_ms)
      throw Error(Errc::invariant, "at_ms must be non-decreasing", path);
    t.steps.push_back(std::move(s));
  }
  return t;
}

Trace load_trace(const std::filesystem::path& path) { return parse_trace(json_util::read_file(path)); }

std::string serialize_trace(const Trace& trace) {
  OrderedJson doc;
  doc["steps"] = OrderedJson::array();
  for (const auto& s : trace.steps) {
    OrderedJson step;
    step["at_ms"] = s.at_ms;
    switch (s.kind) {
      case TraceStep::Kind::idle: step["input"] = "idle"; break;
      case TraceStep::Kind::choice: step["input"] = {{"choice", s.choice_id}}; break;
      case TraceStep::Kind::teach: step["input"] = {{"teach", kb::assignment_to_json(s.assignment)}}; break;
    }
    doc["steps"].push_back(std::move(step));
  }
  return doc.dump(2) + "\n";
}

// Session state.

OrderedJson SessionState::to_json(const kb::KnowledgeBase& kb) const {
  OrderedJson j;
  j["type"] = "session_state";
  j["scene"] = scene;
  j["speaker"] = speaker;
  j["text"] = text;
  j["pending_choices"] = OrderedJson::array();
  for (const auto& c : pending_choices) j["pending_choices"].push_back({{"id", c.id}, {"text", c.text}});
  j["awaiting_teach"] = awaiting_teach;
  j["meters"] = meters ? OrderedJson{{"motivation", meters->motivation}, {"ability", meters->ability}} : OrderedJson(nullptr);
  j["ta_panel"] = ta_panel ? OrderedJson{{"cue_id", ta_panel->cue_id},
                                         {"text", ta_panel->text},
                                         {"expression", kb::to_string(ta_panel->expression)}}
                           : OrderedJson(nullptr);
  if (concept_map_view) {
    OrderedJson v;
    v["map_id"] = concept_map_view->map_id;
    v["blanks"] = OrderedJson::array();
    v["labels"] = OrderedJson::array();
    if (const auto* map = kb.find_map(concept_map_view->map_id)) {
      for (const auto& b : map->blanks) v["blanks"].push_back({{"id", b.id}, {"prompt", b.prompt}});
      v["labels"] = map->labels;
    }
    v["assignment"] = kb::assignment_to_json(concept_map_view->assignment);
    v["error_blanks"] = concept_map_view->error_blanks;
    j["concept_map_view"] = std::move(v);
  } else {
    j["concept_map_view"] = nullptr;
  }
  j["practice_result"] = practice_result
                             ? OrderedJson{{"success", practice_result->success},
                                           {"error_blanks", practice_result->error_blanks}}
                             : OrderedJson(nullptr);
  j["cycle_index"] = cycle_index;
  j["time_ms"] = time_ms;
  return j;
}

// Session.

std::uint64_t cycle_seed(std::uint64_t session_seed, std::size_t cycle) {
  // splitmix64 finalizer
  std::uint64_t z = (session_seed ^ static_cast<std::uint64_t>(cycle)) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

reasoning::AgentConfig agent_config(const SessionConfig& c) {
  reasoning::AgentConfig a;
  a.baselines = c.baselines;
  a.rejection_event = c.rejection_event;
  return a;
}

}  // namespace

Session::Session(const SessionConfig& config) : Session(config, load_models(config)) {}

Session::Session(const SessionConfig& config, std::shared_ptr<const Models> models)
    : config_(config),
      models_(std::move(models)),
      kb_(models_->kb),
      events_(config.inactivity_timeout_ms, 0),
      agent_(models_->fcm, kb_, events_, agent_config(config)),
      registry_(agent_.make_registry()),
      next_check_ms_(config.checking_period_ms) {
  if (config_.checking_period_ms <= 0) throw Error(Errc::invariant, "checking period must be positive");
  kb_.learnt.clear();
  if (!config_.out_dir.empty()) kb_.session_dir = config_.out_dir;
  enter_scene(models_->scenario.start);
}

void Session::advance_to(std::int64_t now_ms) {
  if (now_ms < events_.now())
    throw Error(Errc::clock_regression,
                "clock moved back from " + std::to_string(events_.now()) + " to " + std::to_string(now_ms));
  while (next_check_ms_ <= now_ms) {
    check(next_check_ms_);
    next_check_ms_ += config_.checking_period_ms;
  }
  events_.tick(now_ms);
  state_.time_ms = now_ms;
}

void Session::check(std::int64_t at_ms) {
  events_.tick(at_ms);
  state_.time_ms = at_ms;
  auto batch = events_.poll(cycles_.size() + 1);
  if (!batch.empty()) run_cycle(std::move(batch));
}

void Session::settle(std::size_t max_periods) {
  for (std::size_t i = 0; i < max_periods && !events_.log().pending.empty(); ++i) {
    check(next_check_ms_);
    next_check_ms_ += config_.checking_period_ms;
  }
}

void Session::run_cycle(std::vector<events::Event> batch) {
  const std::size_t n = cycles_.size() + 1;
  agent_.begin_cycle(n, std::move(batch));
  auto interp = goalnet::start(models_->net, registry_, cycle_seed(config_.seed, n));
  goalnet::run_to_goal(interp, [this]() -> const goalnet::DecisionTable& { return agent_.decisions(); });
  traversal_ += interp.log.to_jsonl(static_cast<std::int64_t>(n));
  auto record = agent_.end_cycle();
  if (record.assessment) state_.meters = Meters{record.assessment->motivation, record.assessment->ability};
  apply_directive(record.directive);
  state_.cycle_index = n;
  cycles_.push_back(std::move(record));
  if (listener_) listener_(cycles_.back(), state_);
}

void Session::enter_scene(const std::string& id) {
  const auto* node = models_->scenario.find(id);
  if (node == nullptr) throw Error(Errc::invariant, "unknown scene", id);
  state_.scene = node->id;
  state_.speaker = node->speaker;
  state_.text = node->text;
  state_.pending_choices.clear();
  for (const auto& c : node->choices) state_.pending_choices.push_back({c.id, c.text});
  state_.awaiting_teach = node->teach.has_value();
  state_.concept_map_view.reset();
  if (node->teach) {
    ConceptMapView view{*node->teach, {}, {}};
    if (auto it = kb_.learnt.find(*node->teach); it != kb_.learnt.end()) {
      view.assignment = it->second.assignment;
      view.error_blanks = it->second.error_blanks;
    }
    state_.concept_map_view = std::move(view);
  }
}

void Session::apply_directive(const reasoning::ActionDirective& d) {
  using Kind = reasoning::ActionDirective::Kind;
  switch (d.kind) {
    case Kind::none:
      break;
    case Kind::display_cue:
      state_.ta_panel = CueView{d.cue_id, d.text, d.expression};
      break;
    case Kind::show_concept_map:
      if (!state_.awaiting_teach) state_.concept_map_view = ConceptMapView{d.map_id, d.assignment, d.error_blanks};
      break;
    case Kind::practice_success_feedback:
    case Kind::practice_failure_feedback: {
      const bool success = d.kind == Kind::practice_success_feedback;
      state_.practice_result = PracticeView{success, d.error_blanks};
      const auto& next = success ? models_->scenario.practice_success : models_->scenario.practice_failure;
      if (!next.empty()) enter_scene(next);
      break;
    }
  }
}

void Session::apply(const TraceStep& step) {
  advance_to(step.at_ms);
  const auto* node = models_->scenario.find(state_.scene);
  switch (step.kind) {
    case TraceStep::Kind::idle:
      break;
    case TraceStep::Kind::choice: {
      const Choice* choice = node->find_choice(step.choice_id);
      if (choice == nullptr)
        throw Error(Errc::trace_input_mismatch, "choice '" + step.choice_id + "' is not pending", state_.scene);
      for (const auto& e : choice->events) events_.create_event(e.name, e.type, e.category);
      if (choice->refuse_teaching) {
        reasoning::TeachingResponse r{false, *choice->refuse_teaching, {}};
        events_.create_event(std::string(reasoning::kTeachingPointEvent), events::EventType::administrative,
                             events::EventCategory::administrative, r.to_attributes());
      }
      if (!choice->next.empty()) enter_scene(choice->next);
      break;
    }
    case TraceStep::Kind::teach: {
      if (!state_.awaiting_teach || !node->teach)
        throw Error(Errc::trace_input_mismatch, "no concept map is open for teaching", state_.scene);
      const auto* map = kb_.find_map(*node->teach);
      for (const auto& [blank, label] : step.assignment) {
        if (!map->has_blank(blank)) throw Error(Errc::unknown_blank, "unknown blank '" + blank + "'", map->id);
        if (label && !label->empty() && !map->has_label(*label))
          throw Error(Errc::unknown_label, "unknown label '" + *label + "'", map->id);
      }
      reasoning::TeachingResponse r{true, *node->teach, step.assignment};
      events_.create_event(std::string(reasoning::kTeachingPointEvent), events::EventType::administrative,
                           events::EventCategory::administrative, r.to_attributes());
      if (!node->next.empty())
        enter_scene(node->next);
      else
        state_.awaiting_teach = false;
      break;
    }
  }
  recorded_.steps.push_back(step);
}

std::string Session::report_json() const {
  OrderedJson doc;
  doc["seed"] = config_.seed;
  doc["checking_period_ms"] = config_.checking_period_ms;
  doc["inactivity_timeout_ms"] = config_.inactivity_timeout_ms;
  doc["baselines"] = {{"motivation", config_.baselines.motivation}, {"ability", config_.baselines.ability}};
  doc["time_ms"] = events_.now();
  doc["events_created"] = events_.created();
  doc["events_pending"] = events_.log().pending.size();
  doc["cycles"] = OrderedJson::array();
  for (const auto& c : cycles_) doc["cycles"].push_back(c.to_json());
  doc["final_state"] = state_.to_json(kb_);
  doc["learnt"] = OrderedJson::parse(kb::learnt_to_json(kb_))["learnt"];
  return doc.dump(2) + "\n";
}

void Session::write_outputs() const {
  if (config_.out_dir.empty()) return;
  const auto& dir = config_.out_dir;
  json_util::write_file(dir / "events.jsonl", events_jsonl());
  json_util::write_file(dir / "traversal.jsonl", traversal_);
  json_util::write_file(dir / "report.json", report_json());
  json_util::write_file(dir / "learnt.json", kb::learnt_to_json(kb_));
  json_util::write_file(dir / "trace.json", serialize_trace(recorded_));
}

SessionReport run_trace(const SessionConfig& config, const Trace& trace) {
  return run_trace(config, load_models(config), trace);
}

SessionReport run_trace(const SessionConfig& config, std::shared_ptr<const Models> models, const Trace& trace) {
  Session s(config, std::move(models));
  for (const auto& step : trace.steps) s.apply(step);
  s.settle();
  s.write_outputs();
  return SessionReport{s.state(), s.cycles(), s.events_jsonl(), s.traversal_jsonl(), s.report_json()};
}

}  // namespace pta::session

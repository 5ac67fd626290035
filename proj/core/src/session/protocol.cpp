#include "pta/session/protocol.hpp"

#include "pta/error.hpp"

namespace pta::session::protocol {

using json_util::OrderedJson;

ClientFrame parse_client_frame(std::string_view text) {
  json_util::Json doc;
  try {
    doc = json_util::parse_document(text);
  } catch (const Error& e) {
    throw Error(Errc::protocol, "frame is not JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw Error(Errc::protocol, "frame must be a JSON object");
  const auto type = doc.find("type");
  if (type == doc.end() || !type->is_string()) throw Error(Errc::protocol, "frame needs a string 'type'");
  const auto t = type->get<std::string>();
  ClientFrame f;
  try {
    if (t == "start") {
      f.type = ClientFrame::Type::start;
    } else if (t == "idle_ack") {
      f.type = ClientFrame::Type::idle_ack;
    } else if (t == "choice") {
      f.type = ClientFrame::Type::choice;
      const auto id = doc.find("id");
      if (id == doc.end()) throw Error(Errc::protocol, "choice frame needs 'id'");
      f.choice_id = json_util::as_string(*id, "/id");
    } else if (t == "teach") {
      f.type = ClientFrame::Type::teach;
      const auto a = doc.find("assignment");
      if (a == doc.end()) throw Error(Errc::protocol, "teach frame needs 'assignment'");
      f.assignment = kb::assignment_from_json(*a, "/assignment");
    } else {
      throw Error(Errc::protocol, "unknown frame type '" + t + "'", "/type");
    }
  } catch (const Error& e) {
    if (e.code() == Errc::protocol) throw;
    throw Error(Errc::protocol, e.what());
  }
  const std::string_view extra = t == "choice" ? "id" : t == "teach" ? "assignment" : "";
  for (const auto& [key, value] : doc.items())
    if (key != "type" && key != extra) throw Error(Errc::protocol, "unexpected field '" + key + "'", "/" + key);
  return f;
}

std::optional<TraceStep> to_step(const ClientFrame& frame, std::int64_t at_ms) {
  TraceStep s;
  s.at_ms = at_ms;
  switch (frame.type) {
    case ClientFrame::Type::start: return std::nullopt;
    case ClientFrame::Type::idle_ack: s.kind = TraceStep::Kind::idle; break;
    case ClientFrame::Type::choice:
      s.kind = TraceStep::Kind::choice;
      s.choice_id = frame.choice_id;
      break;
    case ClientFrame::Type::teach:
      s.kind = TraceStep::Kind::teach;
      s.assignment = frame.assignment;
      break;
  }
  return s;
}

OrderedJson session_state_frame(const SessionState& state, const kb::KnowledgeBase& kb) { return state.to_json(kb); }

OrderedJson cue_frame(const reasoning::ActionDirective& d) {
  return {{"type", "cue"}, {"cue_id", d.cue_id}, {"text", d.text}, {"expression", kb::to_string(d.expression)}};
}

OrderedJson concept_map_frame(const ConceptMapView& view, const kb::KnowledgeBase& kb) {
  OrderedJson j;
  j["type"] = "concept_map";
  j["map_id"] = view.map_id;
  j["blanks"] = OrderedJson::array();
  j["labels"] = OrderedJson::array();
  if (const auto* map = kb.find_map(view.map_id)) {
    for (const auto& b : map->blanks) j["blanks"].push_back({{"id", b.id}, {"prompt", b.prompt}});
    j["labels"] = map->labels;
  }
  j["assignment"] = kb::assignment_to_json(view.assignment);
  j["error_blanks"] = view.error_blanks;
  return j;
}

OrderedJson practice_result_frame(const reasoning::ActionDirective& d) {
  return {{"type", "practice_result"},
          {"success", d.kind == reasoning::ActionDirective::Kind::practice_success_feedback},
          {"map_id", d.map_id},
          {"error_blanks", d.error_blanks}};
}

OrderedJson meters_frame(const reasoning::ElmAssessment& a) {
  return {{"type", "meters"}, {"motivation", a.motivation}, {"ability", a.ability}, {"route", reasoning::to_string(a.route)}};
}

OrderedJson error_frame(std::string_view code, std::string_view message) {
  return {{"type", "error"}, {"code", code}, {"message", message}};
}

std::vector<OrderedJson> frames_for_cycle(const reasoning::CycleRecord& record, const SessionState& state,
                                          const kb::KnowledgeBase& kb) {
  using Kind = reasoning::ActionDirective::Kind;
  std::vector<OrderedJson> out;
  const auto& d = record.directive;
  switch (d.kind) {
    case Kind::none: break;
    case Kind::display_cue: out.push_back(cue_frame(d)); break;
    case Kind::show_concept_map:
      out.push_back(concept_map_frame(ConceptMapView{d.map_id, d.assignment, d.error_blanks}, kb));
      break;
    case Kind::practice_success_feedback:
    case Kind::practice_failure_feedback: out.push_back(practice_result_frame(d)); break;
  }
  if (record.assessment) out.push_back(meters_frame(*record.assessment));
  out.push_back(session_state_frame(state, kb));
  return out;
}

std::vector<OrderedJson> frames_for_state(const SessionState& state, const kb::KnowledgeBase& kb) {
  std::vector<OrderedJson> out;
  out.push_back(session_state_frame(state, kb));
  if (state.awaiting_teach && state.concept_map_view) out.push_back(concept_map_frame(*state.concept_map_view, kb));
  return out;
}

}  // namespace pta::session::protocol

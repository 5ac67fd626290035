#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pta/json_util.hpp"
#include "pta/reasoning/agent.hpp"
#include "pta/session/session.hpp"

namespace pta::session::protocol {

// Client to server: {"type":"start"}, {"type":"choice","id":...},
// {"type":"teach","assignment":{...}}, {"type":"idle_ack"}.
struct ClientFrame {
  enum class Type { start, choice, teach, idle_ack };

  Type type = Type::start;
  std::string choice_id;
  kb::Assignment assignment;
};

// Throws Errc::protocol for anything that is not a well-formed client frame.
ClientFrame parse_client_frame(std::string_view text);

// The session input a frame stands for; nullopt for start.
std::optional<TraceStep> to_step(const ClientFrame& frame, std::int64_t at_ms);

// Server to client frames.
json_util::OrderedJson session_state_frame(const SessionState& state, const kb::KnowledgeBase& kb);
json_util::OrderedJson cue_frame(const reasoning::ActionDirective& directive);
json_util::OrderedJson concept_map_frame(const ConceptMapView& view, const kb::KnowledgeBase& kb);
json_util::OrderedJson practice_result_frame(const reasoning::ActionDirective& directive);
json_util::OrderedJson meters_frame(const reasoning::ElmAssessment& assessment);
json_util::OrderedJson error_frame(std::string_view code, std::string_view message);

// Frames pushed after a cycle: the directive's frame (if any), meters (if the
// cycle assessed the student), then the session state.
std::vector<json_util::OrderedJson> frames_for_cycle(const reasoning::CycleRecord& record, const SessionState& state,
                                                     const kb::KnowledgeBase& kb);

// Frames answering an accepted client frame: the session state, plus the
// concept map when one is open for teaching.
std::vector<json_util::OrderedJson> frames_for_state(const SessionState& state, const kb::KnowledgeBase& kb);

}  // namespace pta::session::protocol

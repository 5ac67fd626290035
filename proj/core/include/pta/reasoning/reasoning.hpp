#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "pta/events/event_control.hpp"
#include "pta/fcm/engine.hpp"
#include "pta/json_util.hpp"
#include "pta/kb/knowledge_base.hpp"

namespace pta::reasoning {

enum class ReasoningKind { persuasion, teachability, practicability };
enum class Route { central, peripheral };

std::string_view to_string(ReasoningKind kind);
std::string_view to_string(Route route);

// Administrative and feedback events the agent itself relies on.
inline constexpr std::string_view kTeachingPointEvent = "Teaching Point Reached";
inline constexpr std::string_view kTeachabilityEvent = "Teachability Event";
inline constexpr std::string_view kWrongSolutionEvent = "Wrong Solution";
inline constexpr std::string_view kTeachSuccessEvent = "Teach Success";
inline constexpr std::string_view kTeachFailureEvent = "Teach Failure";
inline constexpr std::string_view kDefaultRejectionEvent = "Not Teach Water Molecule";

struct Baselines {
  double motivation = 1.0;
  double ability = 1.0;
};

// central iff motivation >= its baseline and ability >= its baseline.
Route classify(double motivation, double ability, const Baselines& baselines);

struct ElmAssessment {
  double motivation = 0;
  double ability = 0;
  double peripheral_cue = 0;  // diagnostic only
  Route route = Route::peripheral;
  Baselines baselines;
  std::size_t fcm_rounds = 0;
  bool converged = false;

  bool low_motivation() const { return motivation < baselines.motivation; }
  bool low_ability() const { return ability < baselines.ability; }
};

struct ActionDirective {
  enum class Kind { none, display_cue, show_concept_map, practice_success_feedback, practice_failure_feedback };

  Kind kind = Kind::none;
  // display_cue
  std::string cue_id;
  std::string text;
  kb::Expression expression = kb::Expression::neutral;
  // show_concept_map and practice feedback
  std::string map_id;
  std::set<std::string> error_blanks;
  kb::Assignment assignment;

  static ActionDirective none() { return {}; }
  static ActionDirective display_cue(const kb::PersuasionCue& cue);
  static ActionDirective show_concept_map(std::string map_id, kb::Assignment assignment,
                                          std::set<std::string> error_blanks);
  static ActionDirective practice_success(std::string map_id);
  static ActionDirective practice_failure(std::string map_id, std::set<std::string> error_blanks);

  json_util::OrderedJson to_json() const;
};

std::string_view to_string(ActionDirective::Kind kind);

// Head event decides: the teaching-point event selects teachability, a
// completed teaching (Teachability Event) selects practicability, anything else
// persuasion. Throws Errc::empty_batch.
ReasoningKind select_reasoning(std::span<const events::Event> batch);

// Union of factor_map entries of the batch. When several events drive one
// leaf, the larger magnitude wins and ties go to the more negative value.
std::map<std::string, double> leaf_activations(const kb::KnowledgeBase& kb, std::span<const events::Event> batch);

ElmAssessment assess(const fcm::FcmModel& model, const kb::KnowledgeBase& kb, std::span<const events::Event> batch,
                     const Baselines& baselines);

// Cue for a peripheral-route batch: each event is matched in batch order and
// the most specific result wins, earlier events breaking ties.
const kb::PersuasionCue& select_cue_for_batch(const kb::KnowledgeBase& kb, std::span<const events::Event> batch,
                                              bool low_motivation, bool low_ability);

// Feedback cue for a central-route batch, if the KB defines one for any event.
const kb::PersuasionCue* feedback_cue_for_batch(const kb::KnowledgeBase& kb, std::span<const events::Event> batch);

json_util::OrderedJson to_json(const ElmAssessment& assessment);

}  // namespace pta::reasoning

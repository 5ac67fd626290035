#include "pta/reasoning/reasoning.hpp"

#include <cmath>

#include "pta/error.hpp"

namespace pta::reasoning {

std::string_view to_string(ReasoningKind kind) {
  switch (kind) {
    case ReasoningKind::persuasion: return "persuasion";
    case ReasoningKind::teachability: return "teachability";
    case ReasoningKind::practicability: return "practicability";
  }
  return "persuasion";
}

std::string_view to_string(Route route) { return route == Route::central ? "central" : "peripheral"; }

std::string_view to_string(ActionDirective::Kind kind) {
  switch (kind) {
    case ActionDirective::Kind::none: return "none";
    case ActionDirective::Kind::display_cue: return "display_cue";
    case ActionDirective::Kind::show_concept_map: return "show_concept_map";
    case ActionDirective::Kind::practice_success_feedback: return "practice_success_feedback";
    case ActionDirective::Kind::practice_failure_feedback: return "practice_failure_feedback";
  }
  return "none";
}

Route classify(double motivation, double ability, const Baselines& baselines) {
  return motivation >= baselines.motivation && ability >= baselines.ability ? Route::central : Route::peripheral;
}

ActionDirective ActionDirective::display_cue(const kb::PersuasionCue& cue) {
  ActionDirective d;
  d.kind = Kind::display_cue;
  d.cue_id = cue.id;
  d.text = cue.text;
  d.expression = cue.expression;
  return d;
}

ActionDirective ActionDirective::show_concept_map(std::string map_id, kb::Assignment assignment,
                                                  std::set<std::string> error_blanks) {
  ActionDirective d;
  d.kind = Kind::show_concept_map;
  d.map_id = std::move(map_id);
  d.assignment = std::move(assignment);
  d.error_blanks = std::move(error_blanks);
  return d;
}

ActionDirective ActionDirective::practice_success(std::string map_id) {
  ActionDirective d;
  d.kind = Kind::practice_success_feedback;
  d.map_id = std::move(map_id);
  return d;
}

ActionDirective ActionDirective::practice_failure(std::string map_id, std::set<std::string> error_blanks) {
  ActionDirective d;
  d.kind = Kind::practice_failure_feedback;
  d.map_id = std::move(map_id);
  d.error_blanks = std::move(error_blanks);
  return d;
}

json_util::OrderedJson ActionDirective::to_json() const {
  json_util::OrderedJson j;
  j["kind"] = to_string(kind);
  switch (kind) {
    case Kind::none:
      break;
    case Kind::display_cue:
      j["cue_id"] = cue_id;
      j["text"] = text;
      j["expression"] = kb::to_string(expression);
      break;
    case Kind::show_concept_map:
      j["map_id"] = map_id;
      j["assignment"] = kb::assignment_to_json(assignment);
      j["error_blanks"] = error_blanks;
      break;
    case Kind::practice_success_feedback:
    case Kind::practice_failure_feedback:
      j["map_id"] = map_id;
      j["error_blanks"] = error_blanks;
      break;
  }
  return j;
}

ReasoningKind select_reasoning(std::span<const events::Event> batch) {
  if (batch.empty()) throw Error(Errc::empty_batch, "no events to reason about");
  const auto& head = batch.front().name;
  if (head == kTeachingPointEvent) return ReasoningKind::teachability;
  if (head == kTeachabilityEvent) return ReasoningKind::practicability;
  return ReasoningKind::persuasion;
}

std::map<std::string, double> leaf_activations(const kb::KnowledgeBase& kb, std::span<const events::Event> batch) {
  std::map<std::string, double> out;
  for (const auto& e : batch) {
    const auto* entry = kb.find_factors(e.name);
    if (entry == nullptr) continue;
    for (const auto& a : entry->activations) {
      auto [it, inserted] = out.emplace(a.leaf, a.value);
      if (inserted) continue;
      const double cur = it->second;
      const double mc = std::fabs(cur);
      const double mn = std::fabs(a.value);
      if (mn > mc || (mn == mc && a.value < cur)) it->second = a.value;
    }
  }
  return out;
}

ElmAssessment assess(const fcm::FcmModel& model, const kb::KnowledgeBase& kb, std::span<const events::Event> batch,
                     const Baselines& baselines) {
  const auto leaves = leaf_activations(kb, batch);
  const auto result = fcm::evaluate(model, leaves);
  ElmAssessment a;
  a.baselines = baselines;
  if (auto i = model.stem(fcm::StemKind::motivation)) a.motivation = result.final.values[*i];
  if (auto i = model.stem(fcm::StemKind::ability)) a.ability = result.final.values[*i];
  if (auto i = model.stem(fcm::StemKind::peripheral_cue)) a.peripheral_cue = result.final.values[*i];
  a.route = classify(a.motivation, a.ability, baselines);
  a.fcm_rounds = result.rounds;
  a.converged = result.converged;
  return a;
}

const kb::PersuasionCue& select_cue_for_batch(const kb::KnowledgeBase& kb, std::span<const events::Event> batch,
                                              bool low_motivation, bool low_ability) {
  if (batch.empty()) return kb::select_cue(kb, {"", low_motivation, low_ability});
  const kb::PersuasionCue* best = nullptr;
  int best_score = -1;
  for (const auto& e : batch) {
    const kb::CueContext ctx{e.name, low_motivation, low_ability};
    const auto& cue = kb::select_cue(kb, ctx);
    const int score = cue.id == kb::kDefaultCueId ? 0 : kb::match_specificity(cue, ctx).value_or(0);
    if (score > best_score) {
      best = &cue;
      best_score = score;
    }
  }
  return *best;
}

const kb::PersuasionCue* feedback_cue_for_batch(const kb::KnowledgeBase& kb, std::span<const events::Event> batch) {
  for (const auto& e : batch)
    if (const auto* cue = kb::select_feedback_cue(kb, e.name)) return cue;
  return nullptr;
}

json_util::OrderedJson to_json(const ElmAssessment& a) {
  return json_util::OrderedJson{{"motivation", a.motivation},
                                {"ability", a.ability},
                                {"peripheral_cue", a.peripheral_cue},
                                {"route", to_string(a.route)},
                                {"baselines", {{"motivation", a.baselines.motivation}, {"ability", a.baselines.ability}}},
                                {"fcm_rounds", a.fcm_rounds},
                                {"converged", a.converged}};
}

}  // namespace pta::reasoning

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pta/events/event_control.hpp"
#include "pta/kb/knowledge_base.hpp"

namespace pta::session {

struct ScenarioEvent {
  std::string name;
  events::EventType type = events::EventType::dialogue;
  events::EventCategory category = events::EventCategory::learning_behavior;
};

struct Choice {
  std::string id;
  std::string text;
  std::vector<ScenarioEvent> events;
  // Scene shown after the choice; empty keeps the current scene.
  std::string next;
  // Concept map whose teaching request this choice declines.
  std::optional<std::string> refuse_teaching;
};

// A scene either offers dialogue choices or, when `teach` names a concept map,
// waits for the student to submit that map and then moves to `next`.
struct SceneNode {
  std::string id;
  std::string speaker;
  std::string text;
  std::vector<Choice> choices;
  std::optional<std::string> teach;
  std::string next;

  const Choice* find_choice(std::string_view id) const;
};

struct Scenario {
  std::string name;
  std::string start;
  std::vector<SceneNode> nodes;
  // Scenes entered after a practice run succeeds or fails; empty keeps the scene.
  std::string practice_success;
  std::string practice_failure;

  const SceneNode* find(std::string_view id) const;
};

// Throws Errc::syntax, Errc::schema, Errc::taxonomy_violation and
// Errc::invariant (duplicate ids, dangling scene references).
Scenario parse_scenario(std::string_view document);
Scenario load_scenario(const std::filesystem::path& path);

// Every teach or refuse_teaching map must exist in `kb`. Throws Errc::unknown_map.
void cross_validate(const Scenario& scenario, const kb::KnowledgeBase& kb);

}  // namespace pta::session

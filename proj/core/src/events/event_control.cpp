#include "pta/events/event_control.hpp"

#include <algorithm>
#include <array>

#include "pta/error.hpp"
#include "pta/json_util.hpp"

namespace pta::events {

namespace {

constexpr std::array kTypes = {EventType::dialogue,           EventType::location,
                               EventType::time,               EventType::item_collection,
                               EventType::mission_fulfillment, EventType::error_commitment,
                               EventType::teaching_feedback,  EventType::administrative};
constexpr std::array kCategories = {EventCategory::learning_behavior, EventCategory::learning_achievement,
                                    EventCategory::knowledge_data, EventCategory::administrative};

}  // namespace

std::string_view to_string(EventType type) {
  switch (type) {
    case EventType::dialogue: return "dialogue";
    case EventType::location: return "location";
    case EventType::time: return "time";
    case EventType::item_collection: return "item_collection";
    case EventType::mission_fulfillment: return "mission_fulfillment";
    case EventType::error_commitment: return "error_commitment";
    case EventType::teaching_feedback: return "teaching_feedback";
    case EventType::administrative: return "administrative";
  }
  return "administrative";
}

std::string_view to_string(EventCategory category) {
  switch (category) {
    case EventCategory::learning_behavior: return "learning_behavior";
    case EventCategory::learning_achievement: return "learning_achievement";
    case EventCategory::knowledge_data: return "knowledge_data";
    case EventCategory::administrative: return "administrative";
  }
  return "administrative";
}

std::optional<EventType> parse_event_type(std::string_view text) {
  for (auto t : kTypes)
    if (to_string(t) == text) return t;
  return std::nullopt;
}

std::optional<EventCategory> parse_event_category(std::string_view text) {
  for (auto c : kCategories)
    if (to_string(c) == text) return c;
  return std::nullopt;
}

bool in_taxonomy(EventType type, EventCategory category) {
  switch (type) {
    case EventType::dialogue:
    case EventType::location:
    case EventType::time:
      return category == EventCategory::learning_behavior;
    case EventType::item_collection:
    case EventType::mission_fulfillment:
      return category == EventCategory::learning_achievement;
    case EventType::error_commitment:
    case EventType::teaching_feedback:
      return category == EventCategory::knowledge_data;
    case EventType::administrative:
      return category == EventCategory::administrative;
  }
  return false;
}

int priority_rank(EventType type) {
  switch (type) {
    case EventType::administrative: return 0;
    case EventType::teaching_feedback: return 1;
    case EventType::error_commitment: return 2;
    case EventType::dialogue: return 3;
    case EventType::mission_fulfillment: return 4;
    case EventType::item_collection: return 5;
    case EventType::location: return 6;
    case EventType::time: return 7;
  }
  return 8;
}

bool poll_before(const Event& a, const Event& b) {
  const int ra = priority_rank(a.type);
  const int rb = priority_rank(b.type);
  if (ra != rb) return ra < rb;
  return a.id < b.id;
}

EventControl::EventControl(std::int64_t inactivity_timeout_ms, std::int64_t start_ms) : now_ms_(start_ms) {
  if (inactivity_timeout_ms <= 0) throw Error(Errc::invariant, "inactivity timeout must be positive");
  timer_.timeout_ms = inactivity_timeout_ms;
  timer_.reset(start_ms);
}

const Event& EventControl::create_event(std::string name, EventType type, EventCategory category,
                                        Attributes attributes) {
  if (!in_taxonomy(type, category))
    throw Error(Errc::taxonomy_violation,
                "event type " + std::string(to_string(type)) + " does not belong to " + std::string(to_string(category)),
                name);
  Event e{next_id_++, std::move(name), type, category, now_ms_, std::move(attributes)};
  if (type == EventType::dialogue) timer_.reset(now_ms_);
  log_.pending.push_back(std::move(e));
  return log_.pending.back();
}

std::optional<Event> EventControl::tick(std::int64_t now_ms) {
  if (now_ms < now_ms_)
    throw Error(Errc::clock_regression,
                "clock moved back from " + std::to_string(now_ms_) + " to " + std::to_string(now_ms));
  now_ms_ = now_ms;
  if (now_ms_ < timer_.deadline) return std::nullopt;
  Event e{next_id_++, std::string(kTimeOutEventName), EventType::time, EventCategory::learning_behavior, now_ms_, {}};
  timer_.reset(now_ms_);
  log_.pending.push_back(e);
  return e;
}

std::vector<Event> EventControl::poll(std::size_t cycle) {
  std::vector<Event> batch = std::move(log_.pending);
  log_.pending.clear();
  std::sort(batch.begin(), batch.end(), poll_before);
  for (const auto& e : batch) log_.processed.push_back({e, cycle});
  return batch;
}

std::string EventControl::to_jsonl() const {
  std::vector<std::pair<const Event*, std::optional<std::size_t>>> all;
  for (const auto& p : log_.processed) all.emplace_back(&p.event, p.cycle);
  for (const auto& e : log_.pending) all.emplace_back(&e, std::nullopt);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first->id < b.first->id; });
  std::string out;
  for (const auto& [e, cycle] : all) {
    json_util::OrderedJson line;
    line["id"] = e->id;
    line["name"] = e->name;
    line["type"] = to_string(e->type);
    line["category"] = to_string(e->category);
    line["timestamp_ms"] = e->timestamp_ms;
    line["attributes"] = e->attributes;
    if (cycle)
      line["cycle"] = *cycle;
    else
      line["cycle"] = nullptr;
    out += json_util::to_line(line);
  }
  return out;
}

}  // namespace pta::events

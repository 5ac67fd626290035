#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pta::events {

enum class EventType {
  dialogue,
  location,
  time,
  item_collection,
  mission_fulfillment,
  error_commitment,
  teaching_feedback,
  administrative,
};

enum class EventCategory { learning_behavior, learning_achievement, knowledge_data, administrative };

std::string_view to_string(EventType type);
std::string_view to_string(EventCategory category);
std::optional<EventType> parse_event_type(std::string_view text);
std::optional<EventCategory> parse_event_category(std::string_view text);

// Allowed (type, category) pairs: the tracked-event taxonomy plus the
// administrative pair.
bool in_taxonomy(EventType type, EventCategory category);

// Poll order rank; lower is polled first.
int priority_rank(EventType type);

using Attributes = std::map<std::string, std::string>;

struct Event {
  std::uint64_t id = 0;
  std::string name;
  EventType type = EventType::dialogue;
  EventCategory category = EventCategory::learning_behavior;
  std::int64_t timestamp_ms = 0;
  Attributes attributes;

  friend bool operator==(const Event&, const Event&) = default;
};

// Strict weak order used by poll(): priority class, then ascending id.
bool poll_before(const Event& a, const Event& b);

inline constexpr std::int64_t kDefaultInactivityTimeoutMs = 300'000;
inline constexpr std::string_view kTimeOutEventName = "Doing Nothing";

struct InactivityTimer {
  std::int64_t timeout_ms = kDefaultInactivityTimeoutMs;
  std::int64_t deadline = kDefaultInactivityTimeoutMs;

  void reset(std::int64_t last_activity) { deadline = last_activity + timeout_ms; }
};

struct ProcessedEvent {
  Event event;
  std::size_t cycle = 0;
};

struct EventLog {
  std::vector<Event> pending;
  std::vector<ProcessedEvent> processed;
};

// Event tracker for one session: owns the virtual clock, the log and the
// inactivity timer. Not thread-safe; callers serialize per session.
class EventControl {
 public:
  explicit EventControl(std::int64_t inactivity_timeout_ms = kDefaultInactivityTimeoutMs, std::int64_t start_ms = 0);

  // Appends to pending with the next id and the current clock time. Dialogue
  // events restart the inactivity timer. Throws Errc::taxonomy_violation.
  const Event& create_event(std::string name, EventType type, EventCategory category, Attributes attributes = {});

  // Moves the clock to `now_ms` and emits one time-out event when the
  // inactivity deadline has passed. Throws Errc::clock_regression.
  std::optional<Event> tick(std::int64_t now_ms);

  // Drains pending into a batch ordered by poll_before; the batch is recorded
  // as processed by `cycle`.
  std::vector<Event> poll(std::size_t cycle);

  std::int64_t now() const { return now_ms_; }
  const EventLog& log() const { return log_; }
  const InactivityTimer& timer() const { return timer_; }
  std::uint64_t created() const { return next_id_ - 1; }

  // Every event in id order, each with its processing cycle if any.
  std::string to_jsonl() const;

 private:
  std::int64_t now_ms_ = 0;
  std::uint64_t next_id_ = 1;
  EventLog log_;
  InactivityTimer timer_;
};

}  // namespace pta::events

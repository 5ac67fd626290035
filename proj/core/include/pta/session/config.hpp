#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "pta/reasoning/reasoning.hpp"

namespace pta::session {

inline constexpr std::int64_t kDefaultCheckingPeriodMs = 5'000;

struct SessionConfig {
  std::filesystem::path goalnet_path;
  std::filesystem::path fcm_path;
  std::filesystem::path kb_path;
  std::filesystem::path scenario_path;
  std::uint64_t seed = 0;
  std::int64_t checking_period_ms = kDefaultCheckingPeriodMs;
  std::int64_t inactivity_timeout_ms = events::kDefaultInactivityTimeoutMs;
  reasoning::Baselines baselines;
  // Empty: nothing is written.
  std::filesystem::path out_dir;
  std::string rejection_event = std::string(reasoning::kDefaultRejectionEvent);
};

// Relative paths are resolved against `base_dir`. Throws Errc::syntax,
// Errc::schema, Errc::invariant (non-positive durations) and Errc::io
// (unreadable model files).
SessionConfig parse_config(std::string_view document, const std::filesystem::path& base_dir);
SessionConfig load_config(const std::filesystem::path& path);

}  // namespace pta::session

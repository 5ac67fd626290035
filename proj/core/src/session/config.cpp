#include "pta/session/config.hpp"

#include <fstream>

#include "pta/error.hpp"
#include "pta/json_util.hpp"

namespace pta::session {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

void require_readable(const std::filesystem::path& path, const std::string& field) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot read " + path.string(), field);
}

}  // namespace

SessionConfig parse_config(std::string_view document, const std::filesystem::path& base_dir) {
  const auto doc = json_util::parse_document(document);
  json_util::Fields top(doc, "");
  SessionConfig c;
  auto path_field = [&](std::string_view key) {
    const auto p = resolve(base_dir, json_util::as_string(top.required(key), top.path_of(key)));
    require_readable(p, top.path_of(key));
    return p;
  };
  c.goalnet_path = path_field("goalnet_path");
  c.fcm_path = path_field("fcm_path");
  c.kb_path = path_field("kb_path");
  c.scenario_path = path_field("scenario_path");
  if (const auto* v = top.optional("seed")) {
    const auto seed = json_util::as_integer(*v, top.path_of("seed"));
    if (seed < 0) throw Error(Errc::schema, "seed must be non-negative", top.path_of("seed"));
    c.seed = static_cast<std::uint64_t>(seed);
  }
  if (const auto* v = top.optional("checking_period_ms"))
    c.checking_period_ms = json_util::as_integer(*v, top.path_of("checking_period_ms"));
  if (const auto* v = top.optional("inactivity_timeout_ms"))
    c.inactivity_timeout_ms = json_util::as_integer(*v, top.path_of("inactivity_timeout_ms"));
  if (c.checking_period_ms <= 0)
    throw Error(Errc::invariant, "checking period must be positive", top.path_of("checking_period_ms"));
  if (c.inactivity_timeout_ms <= 0)
    throw Error(Errc::invariant, "inactivity timeout must be positive", top.path_of("inactivity_timeout_ms"));
  if (const auto* v = top.optional("baselines")) {
    json_util::Fields b(*v, top.path_of("baselines"));
    if (const auto* m = b.optional("motivation")) c.baselines.motivation = json_util::as_number(*m, b.path_of("motivation"));
    if (const auto* a = b.optional("ability")) c.baselines.ability = json_util::as_number(*a, b.path_of("ability"));
    b.finish();
  }
  if (const auto* v = top.optional("out_dir")) c.out_dir = resolve(base_dir, json_util::as_string(*v, top.path_of("out_dir")));
  if (const auto* v = top.optional("rejection_event"))
    c.rejection_event = json_util::as_string(*v, top.path_of("rejection_event"));
  top.finish();
  return c;
}

SessionConfig load_config(const std::filesystem::path& path) {
  return parse_config(json_util::read_file(path), path.parent_path());
}

}  // namespace pta::session

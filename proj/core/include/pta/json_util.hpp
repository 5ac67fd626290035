#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

// Shared helpers for the JSON document formats (goalnet, fcm, kb, scenario,
// config, trace). Schema checks report JSON-pointer paths.
namespace pta::json_util {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// Parses UTF-8 text; malformed input raises Errc::syntax with "line:col".
Json parse_document(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Tracks which keys of an object were consumed so that unexpected keys can be
// reported as schema errors.
class Fields {
 public:
  Fields(const Json& object, std::string path);

  const Json& required(std::string_view key);
  const Json* optional(std::string_view key);
  void finish() const;

  std::string path_of(std::string_view key) const;
  const std::string& path() const { return path_; }

 private:
  const Json& object_;
  std::string path_;
  std::vector<std::string> seen_;
};

std::string as_string(const Json& value, const std::string& path);
bool as_bool(const Json& value, const std::string& path);
double as_number(const Json& value, const std::string& path);
std::int64_t as_integer(const Json& value, const std::string& path);
const Json& as_array(const Json& value, const std::string& path);
const Json& as_object(const Json& value, const std::string& path);

// One canonical JSON text per line, LF terminated.
std::string to_line(const OrderedJson& value);

}  // namespace pta::json_util

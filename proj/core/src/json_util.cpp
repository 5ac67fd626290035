#include "pta/json_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pta/error.hpp"

namespace pta::json_util {

namespace {

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  const std::size_t end = std::min(byte, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  // nlohmann reports the position one past the offending byte.
  if (col > 1) --col;
  return std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

Json parse_document(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::syntax, e.what(), line_col(text, e.byte));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open file", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write file", path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

Fields::Fields(const Json& object, std::string path) : object_(object), path_(std::move(path)) {
  if (!object_.is_object()) throw Error(Errc::schema, "expected an object", path_.empty() ? "/" : path_);
}

const Json& Fields::required(std::string_view key) {
  auto it = object_.find(std::string(key));
  if (it == object_.end()) throw Error(Errc::schema, "missing field", path_of(key));
  seen_.emplace_back(key);
  return *it;
}

const Json* Fields::optional(std::string_view key) {
  auto it = object_.find(std::string(key));
  if (it == object_.end()) return nullptr;
  seen_.emplace_back(key);
  return &*it;
}

void Fields::finish() const {
  for (const auto& [key, _] : object_.items()) {
    if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
      throw Error(Errc::schema, "unexpected field", path_of(key));
  }
}

std::string Fields::path_of(std::string_view key) const {
  return path_ + "/" + std::string(key);
}

std::string as_string(const Json& value, const std::string& path) {
  if (!value.is_string()) throw Error(Errc::schema, "expected a string", path);
  return value.get<std::string>();
}

bool as_bool(const Json& value, const std::string& path) {
  if (!value.is_boolean()) throw Error(Errc::schema, "expected a boolean", path);
  return value.get<bool>();
}

double as_number(const Json& value, const std::string& path) {
  if (!value.is_number()) throw Error(Errc::schema, "expected a number", path);
  return value.get<double>();
}

std::int64_t as_integer(const Json& value, const std::string& path) {
  if (value.is_number_integer()) return value.get<std::int64_t>();
  if (value.is_number_float()) {
    const double d = value.get<double>();
    if (std::floor(d) == d) return static_cast<std::int64_t>(d);
  }
  throw Error(Errc::schema, "expected an integer", path);
}

const Json& as_array(const Json& value, const std::string& path) {
  if (!value.is_array()) throw Error(Errc::schema, "expected an array", path);
  return value;
}

const Json& as_object(const Json& value, const std::string& path) {
  if (!value.is_object()) throw Error(Errc::schema, "expected an object", path);
  return value;
}

std::string to_line(const OrderedJson& value) {
  return value.dump() + "\n";
}

}  // namespace pta::json_util

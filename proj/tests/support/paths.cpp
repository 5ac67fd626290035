#include "paths.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pta::test {

std::filesystem::path models_dir() { return PTA_MODELS_DIR; }
std::filesystem::path fixtures_dir() { return PTA_FIXTURES_DIR; }
std::filesystem::path golden_dir() { return PTA_GOLDEN_DIR; }

std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::path(PTA_SCRATCH_DIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool update_golden() {
  const char* v = std::getenv("PTA_UPDATE_GOLDEN");
  return v != nullptr && *v != '\0' && std::string(v) != "0";
}

}  // namespace pta::test

#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "paths.hpp"

#ifdef PTA_CLI_PATH

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const auto dir = pta::test::scratch_dir("cli");
  const auto out = dir / "stdout.txt";
  const std::string cmd = std::string("\"") + PTA_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = pta::test::read_text(out);
  return r;
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("validate the bundled models") {
    const auto m = pta::test::models_dir();
    CHECK(run("validate goalnet " + q(m / "main_routine.json")).code == 0);
    CHECK(run("validate fcm " + q(m / "pta_fcm.json")).code == 0);
    CHECK(run("validate kb " + q(m / "vs_saga_kb.json") + " --fcm " + q(m / "pta_fcm.json")).code == 0);
  }

  TEST_CASE("invalid documents exit 1") {
    const auto dir = pta::test::scratch_dir("cli_invalid");
    const auto bad = dir / "bad.json";
    {
      std::FILE* f = std::fopen(bad.string().c_str(), "w");
      std::fputs(R"({"name":"x","states":[],"transitions":[],"arcs":[]})", f);
      std::fclose(f);
    }
    const auto r = run("validate goalnet " + q(bad));
    CHECK(r.code == 1);
    CHECK(r.out.find("start") != std::string::npos);
  }

  TEST_CASE("usage errors exit 2") {
    CHECK(run("").code == 2);
    CHECK(run("validate").code == 2);
    CHECK(run("frobnicate").code == 2);
  }

  TEST_CASE("runtime errors exit 3") {
    const auto dir = pta::test::scratch_dir("cli_runtime");
    const auto trace = dir / "trace.json";
    {
      std::FILE* f = std::fopen(trace.string().c_str(), "w");
      std::fputs(R"({"steps":[{"at_ms":10,"input":{"choice":"nope"}}]})", f);
      std::fclose(f);
    }
    CHECK(run("run --config " + q(pta::test::models_dir() / "session.json") + " --trace " + q(trace)).code == 3);
  }

  TEST_CASE("fcm-eval on the chain map") {
    const auto r = run("fcm-eval --fcm " + q(pta::test::fixtures_dir() / "fcm" / "chain_fcm.json") +
                       " --activations '{\"L\":1}'");
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["motivation"] == 1);
    CHECK(doc["converged"] == true);
  }

  TEST_CASE("run case 1 writes a report with the expected cue") {
    const auto out = pta::test::scratch_dir("cli_run");
    const auto r = run("run --config " + q(pta::test::models_dir() / "session.json") + " --trace " +
                       q(pta::test::fixtures_dir() / "traces" / "case1_not_learning.json") + " --out " + q(out));
    CHECK(r.code == 0);
    const auto report = nlohmann::json::parse(pta::test::read_text(out / "report.json"));
    CHECK(report["cycles"][0]["directive"]["cue_id"] == "not_learning_diffusion");
  }
}

#endif

#include <algorithm>
#include <random>
#include <string>

#include <doctest.h>

#include "oracles.hpp"
#include "paths.hpp"
#include "pta/goalnet/model.hpp"
#include "test_util.hpp"

using namespace pta;
using namespace pta::goalnet;
using pta::test::errc_of;

namespace {

const char* kMinimal = R"({
  "name": "minimal",
  "states": [
    {"id": "Start", "name": "Start", "kind": "atomic", "is_start": true},
    {"id": "End", "name": "End", "kind": "atomic", "is_end": true}
  ],
  "transitions": [{"id": "T1", "name": "T1", "kind": "direct", "tasks": ["Finish"]}],
  "arcs": [{"from": "Start", "to": "T1"}, {"from": "T1", "to": "End"}]
})";

bool has_rule(const ValidationReport& report, const std::string& rule) {
  return std::any_of(report.begin(), report.end(), [&](const Violation& v) { return v.rule == rule; });
}

}  // namespace

TEST_SUITE("goalnet") {
  TEST_CASE("minimal net parses into two states and one transition") {
    const auto net = parse_goalnet(kMinimal);
    CHECK(net.states.size() == 2);
    CHECK(net.transitions.size() == 1);
    CHECK(net.start_state()->id == "Start");
    CHECK(net.end_state()->id == "End");
    CHECK(net.transitions[0].tasks == std::vector<std::string>{"Finish"});
    CHECK(validate_goalnet(net).empty());
  }

  TEST_CASE("missing arcs is a schema error at /arcs") {
    auto doc = nlohmann::json::parse(kMinimal);
    doc.erase("arcs");
    const auto text = doc.dump();
    CHECK(errc_of([&] { parse_goalnet(text); }) == Errc::schema);
    CHECK(test::where_of([&] { parse_goalnet(text); }) == "/arcs");
  }

  TEST_CASE("malformed text is a syntax error") {
    CHECK(errc_of([] { parse_goalnet("{\"name\": "); }) == Errc::syntax);
  }

  TEST_CASE("unknown fields are rejected") {
    auto doc = nlohmann::json::parse(kMinimal);
    doc["states"][0]["colour"] = "red";
    CHECK(errc_of([&] { parse_goalnet(doc.dump()); }) == Errc::schema);
  }

  TEST_CASE("bundled main routine names the routine states and composites") {
    const auto net = load_goalnet(test::models_dir() / "main_routine.json");
    CHECK(validate_goalnet(net).empty());
    auto named = [&](const std::string& name) {
      return std::find_if(net.states.begin(), net.states.end(), [&](const StateNode& s) { return s.name == name; });
    };
    CHECK(named("Event Detected") != net.states.end());
    CHECK(named("Selected Reasoning") != net.states.end());
    for (const char* c : {"To Learn Knowledge", "To Practice Knowledge Learnt", "To Persuade"}) {
      const auto it = named(c);
      REQUIRE(it != net.states.end());
      CHECK(it->kind == StateKind::composite);
      CHECK(net.find_subnet(it->id) != nullptr);
    }
  }

  TEST_CASE("arc between two states is reported as non-bipartite") {
    auto doc = nlohmann::json::parse(kMinimal);
    doc["arcs"].push_back({{"from", "Start"}, {"to", "End"}});
    const auto report = validate_goalnet(parse_goalnet(doc.dump()));
    CHECK(has_rule(report, "non-bipartite arc"));
  }

  TEST_CASE("composite state without a branch is reported") {
    auto doc = nlohmann::json::parse(kMinimal);
    doc["states"].push_back({{"id", "C"}, {"name", "C"}, {"kind", "composite"}});
    doc["transitions"].push_back({{"id", "T2"}, {"name", "T2"}, {"kind", "direct"}, {"tasks", nlohmann::json::array()}});
    doc["arcs"] = {{{"from", "Start"}, {"to", "T1"}}, {{"from", "T1"}, {"to", "C"}}, {{"from", "C"}, {"to", "T2"}},
                   {{"from", "T2"}, {"to", "End"}}};
    const auto report = validate_goalnet(parse_goalnet(doc.dump()));
    CHECK(has_rule(report, "missing branch"));
  }

  TEST_CASE("successors follow document order") {
    const auto net = parse_goalnet(kMinimal);
    CHECK(successors(net, "Start") == std::vector<std::string>{"T1"});
    CHECK(successors(net, "End").empty());
    CHECK(errc_of([&] { successors(net, "Nope"); }) == Errc::unknown_node);

    const auto main = load_goalnet(test::models_dir() / "main_routine.json");
    const std::vector<std::string> expected{"to_learn_knowledge", "to_practice_knowledge", "to_persuade"};
    CHECK(successors(main, "dispatch_reasoning") == expected);
    CHECK(successors(main, "dispatch_reasoning") == successors(main, "dispatch_reasoning"));
  }

  TEST_CASE("serialize then parse reproduces random nested nets") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
      const auto doc = test::random_nested_goalnet(rng, 2);
      const auto net = parse_goalnet(doc.dump());
      REQUIRE(validate_goalnet(net).empty());
      const auto text = serialize_goalnet(net);
      CHECK(parse_goalnet(text) == net);
      CHECK(serialize_goalnet(parse_goalnet(text)) == text);
    }
  }

  TEST_CASE("bundled main routine round-trips with sub-nets inlined") {
    const auto net = load_goalnet(test::models_dir() / "main_routine.json");
    CHECK(parse_goalnet(serialize_goalnet(net)) == net);
  }

  TEST_CASE("validator agrees with the invariant oracle on mutated nets") {
    std::mt19937_64 rng(11);
    int valid = 0;
    int invalid = 0;
    for (int i = 0; i < 2000; ++i) {
      auto doc = test::random_flat_goalnet(rng, 4);
      const int mutations = std::uniform_int_distribution<int>(0, 2)(rng);
      for (int k = 0; k < mutations; ++k) doc = test::mutate_goalnet(rng, doc);
      bool library_valid = false;
      try {
        library_valid = validate_goalnet(parse_goalnet(doc.dump())).empty();
      } catch (const Error&) {
        library_valid = false;
      }
      const bool oracle_valid = test::oracle_flat_goalnet_valid(doc);
      CHECK_MESSAGE(library_valid == oracle_valid, doc.dump());
      (oracle_valid ? valid : invalid)++;
    }
    CHECK(valid > 100);
    CHECK(invalid > 100);
  }
}

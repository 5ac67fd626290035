#include <filesystem>
#include <string>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "paths.hpp"
#include "pta/fcm/model.hpp"
#include "pta/kb/knowledge_base.hpp"
#include "test_util.hpp"

using namespace pta;
using namespace pta::kb;
using pta::test::errc_of;
using nlohmann::json;

namespace {

json small_kb() {
  return json::parse(R"({
    "concept_maps": [{
      "id": "m",
      "blanks": [{"id": "b1", "prompt": "p1"}, {"id": "b2", "prompt": "p2"}, {"id": "b3", "prompt": "p3"}],
      "labels": ["diffusion", "high", "low", "osmosis"],
      "answer_key": {"b1": "diffusion", "b2": "high", "b3": "low"}
    }],
    "cues": [
      {"id": "default", "trigger": {}, "text": "Keep going", "expression": "neutral"},
      {"id": "urge", "trigger": {"event_name": "Not Teach Water Molecule", "low_motivation": true},
       "text": "Please teach me", "expression": "sad"},
      {"id": "zz_motivation", "trigger": {"low_motivation": true}, "text": "z", "expression": "encouraging"},
      {"id": "aa_motivation", "trigger": {"low_motivation": true}, "text": "a", "expression": "encouraging"},
      {"id": "thanks", "trigger": {"event_name": "Teach Success", "low_motivation": false, "low_ability": false},
       "text": "Thanks", "expression": "happy"}
    ],
    "factor_map": [{"event": "Chat with Animal", "activations": [{"leaf": "l_chat_animal", "value": 1}]}]
  })");
}

KnowledgeBase bundled() { return load_kb_file(test::models_dir() / "vs_saga_kb.json"); }

}  // namespace

TEST_SUITE("kb") {
  TEST_CASE("bundled knowledge base") {
    const auto kb = bundled();
    CHECK(kb.concept_maps.size() == 1);
    CHECK(kb.cues.size() >= 6);
    CHECK(kb.find_cue("default") != nullptr);
    for (const char* e : {"Not Learning", "Visit Lab", "Learn Diffusion", "Learn Osmosis", "Apply Diffusion",
                          "Apply Osmosis", "Not Conducting Experiments", "Willing to Conduct Experiments",
                          "Help Mayor", "Not Teach Water Molecule", "Teach Water Molecule", "Chat with Animal",
                          "Chat with Village Girl", "Teachability Event", "Doing Nothing", "Teach Success",
                          "Teach Failure", "Practicability Event"})
      CHECK_MESSAGE(kb.find_factors(e) != nullptr, e);
    cross_validate(kb, fcm::load_fcm(test::models_dir() / "pta_fcm.json"));
  }

  TEST_CASE("load errors") {
    {
      auto doc = small_kb();
      doc["cues"].push_back(doc["cues"][1]);
      CHECK(errc_of([&] { load_kb(doc.dump()); }) == Errc::invariant);
    }
    {
      auto doc = small_kb();
      doc["cues"].erase(0);
      CHECK(errc_of([&] { load_kb(doc.dump()); }) == Errc::invariant);
    }
    {
      auto doc = small_kb();
      doc["concept_maps"][0]["answer_key"]["b3"] = "nowhere";
      CHECK(errc_of([&] { load_kb(doc.dump()); }) == Errc::invariant);
    }
    {
      auto doc = small_kb();
      doc["concept_maps"][0]["answer_key"].erase("b3");
      CHECK(errc_of([&] { load_kb(doc.dump()); }) == Errc::invariant);
    }
    {
      auto doc = small_kb();
      doc["cues"][1]["expression"] = "angry";
      CHECK(errc_of([&] { load_kb(doc.dump()); }) == Errc::schema);
    }
    CHECK(errc_of([] { load_kb("{"); }) == Errc::syntax);
  }

  TEST_CASE("factor_map leaves are checked against the map") {
    auto doc = small_kb();
    doc["factor_map"][0]["activations"][0]["leaf"] = "l_unknown";
    const auto kb = load_kb(doc.dump());
    const auto fcm = fcm::load_fcm(test::models_dir() / "pta_fcm.json");
    CHECK(errc_of([&] { cross_validate(kb, fcm); }) == Errc::invariant);
    doc["factor_map"][0]["activations"][0]["leaf"] = "motivation";
    CHECK(errc_of([&] { cross_validate(load_kb(doc.dump()), fcm); }) == Errc::invariant);
  }

  TEST_CASE("save_learnt stores assignments verbatim") {
    auto kb = load_kb(small_kb().dump());
    const Assignment full{{"b1", "diffusion"}, {"b2", "high"}, {"b3", "low"}};
    CHECK(save_learnt(kb, "m", full).assignment == full);
    CHECK(kb.learnt.at("m").assignment == full);

    const Assignment partial{{"b1", "diffusion"}, {"b2", std::nullopt}};
    CHECK(save_learnt(kb, "m", partial).assignment == partial);
    CHECK(kb.learnt.at("m").assignment.count("b3") == 0);
    CHECK(kb.learnt.at("m").assignment.at("b2") == std::nullopt);
  }

  TEST_CASE("save_learnt errors") {
    auto kb = load_kb(small_kb().dump());
    CHECK(errc_of([&] { save_learnt(kb, "nope", {}); }) == Errc::unknown_map);
    CHECK(errc_of([&] { save_learnt(kb, "m", {{"b9", "high"}}); }) == Errc::unknown_blank);
    CHECK(errc_of([&] { save_learnt(kb, "m", {{"b1", "photosynthesis"}}); }) == Errc::unknown_label);
    CHECK(kb.learnt.empty());
  }

  TEST_CASE("grading compares against the answer key") {
    const auto kb = load_kb(small_kb().dump());
    const auto& m = *kb.find_map("m");
    CHECK(grade(m, {{"b1", "diffusion"}, {"b2", "high"}, {"b3", "low"}}).empty());
    CHECK(grade(m, {{"b1", "diffusion"}, {"b2", "low"}, {"b3", "low"}}) == std::set<std::string>{"b2"});
    const auto unfilled = grade(m, {{"b1", "diffusion"}, {"b2", "high"}, {"b3", std::nullopt}});
    CHECK(unfilled.count("b3") == 1);
    CHECK(grade(m, {{"b1", "diffusion"}}) == std::set<std::string>{"b2", "b3"});
    CHECK(grade(m, {{"b1", "osmosis"}}) == grade(m, {{"b1", "osmosis"}}));
  }

  TEST_CASE("learnt knowledge survives a save and reload") {
    const auto dir = test::scratch_dir("kb_persist");
    auto kb = load_kb(small_kb().dump());
    kb.session_dir = dir;
    save_learnt(kb, "m", {{"b1", "diffusion"}, {"b2", std::nullopt}, {"b3", "high"}});
    record_errors(kb, "m", {"b2", "b3"});
    persist_learnt(kb);
    REQUIRE(std::filesystem::exists(dir / "learnt.json"));
    const auto back = load_learnt(dir);
    CHECK(back == kb.learnt);
    CHECK(learnt_from_json(learnt_to_json(kb)) == kb.learnt);
  }

  TEST_CASE("cue selection") {
    const auto kb = load_kb(small_kb().dump());
    CHECK(select_cue(kb, {"Not Teach Water Molecule", true, false}).id == "urge");
    CHECK(select_cue(kb, {"Not Teach Water Molecule", true, true}).id == "urge");
    // Two equally specific cues: the smaller id wins.
    CHECK(select_cue(kb, {"Something", true, false}).id == "aa_motivation");
    CHECK(select_cue(kb, {"Something", false, true}).id == "default");
    CHECK(errc_of([&] { select_cue(kb, {"Something", false, false}); }) == Errc::precondition_violation);
    CHECK(match_specificity(*kb.find_cue("urge"), {"Not Teach Water Molecule", true, false}) == 2);
    CHECK_FALSE(match_specificity(*kb.find_cue("urge"), {"Other", true, false}).has_value());
    CHECK(select_feedback_cue(kb, "Teach Success")->id == "thanks");
    CHECK(select_feedback_cue(kb, "Teach Failure") == nullptr);
  }

  TEST_CASE("bundled cue for a failed teaching attempt is sad and asks again") {
    const auto kb = bundled();
    const auto& cue = select_cue(kb, {"Teach Failure", true, false});
    CHECK(cue.expression == Expression::sad);
    CHECK(cue.text.find("teach me again") != std::string::npos);
  }

  TEST_CASE("cue selection is total and deterministic") {
    const auto kb = bundled();
    for (const auto& entry : kb.factor_map)
      for (int flags = 1; flags < 4; ++flags) {
        const CueContext ctx{entry.event, (flags & 1) != 0, (flags & 2) != 0};
        const auto& a = select_cue(kb, ctx);
        const auto& b = select_cue(kb, ctx);
        CHECK(&a == &b);
        CHECK(match_specificity(a, ctx).has_value());
        for (const auto& other : kb.cues) {
          const auto s = match_specificity(other, ctx);
          if (s) CHECK(*s <= *match_specificity(a, ctx));
        }
      }
  }
}

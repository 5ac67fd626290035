#include <map>
#include <string>
#include <vector>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "paths.hpp"
#include "pta/reasoning/agent.hpp"
#include "pta/reasoning/reasoning.hpp"
#include "test_util.hpp"

using namespace pta;
using namespace pta::reasoning;
using pta::events::EventCategory;
using pta::events::EventType;
using pta::test::errc_of;

namespace {

struct Fixture {
  fcm::FcmModel model = fcm::load_fcm(test::models_dir() / "pta_fcm.json");
  kb::KnowledgeBase kb = kb::load_kb_file(test::models_dir() / "vs_saga_kb.json");
  events::EventControl events;
  Agent agent{model, kb, events};

  // Creates the named dialogue events and starts a cycle on the polled batch.
  void begin(const std::vector<std::string>& dialogue, std::size_t cycle = 1) {
    for (const auto& n : dialogue) events.create_event(n, EventType::dialogue, EventCategory::learning_behavior);
    agent.begin_cycle(cycle, events.poll(cycle));
  }

  std::vector<std::string> pending_names() const {
    std::vector<std::string> out;
    for (const auto& e : events.log().pending) out.push_back(e.name);
    return out;
  }
};

events::Event event(std::string name, EventType type = EventType::dialogue,
                    EventCategory category = EventCategory::learning_behavior) {
  events::Event e;
  e.name = std::move(name);
  e.type = type;
  e.category = category;
  return e;
}

const kb::Assignment kCorrect{{"b1", "diffusion"}, {"b2", "high"}, {"b3", "low"}, {"b4", "osmosis"}};
const kb::Assignment kWrong{{"b1", "diffusion"}, {"b2", "low"}, {"b3", "low"}, {"b4", std::nullopt}};

// Motivation and ability of the bundled map computed by the dense oracle.
std::pair<double, double> oracle_mot_abi(const std::map<std::string, double>& leaves) {
  const auto doc = nlohmann::json::parse(test::read_text(test::models_dir() / "pta_fcm.json"));
  const auto d = test::dense_from_json(doc);
  const auto r = test::oracle_iterate(d, leaves, {}, d.max_rounds);
  return {r.final[d.index("motivation")], r.final[d.index("ability")]};
}

}  // namespace

TEST_SUITE("reasoning") {
  TEST_CASE("reasoning selection by head event") {
    std::vector<events::Event> batch{event("Not Teach Water Molecule")};
    CHECK(select_reasoning(batch) == ReasoningKind::persuasion);
    batch = {event("Teachability Event", EventType::administrative, EventCategory::administrative)};
    CHECK(select_reasoning(batch) == ReasoningKind::practicability);
    batch = {event("Teaching Point Reached", EventType::administrative, EventCategory::administrative)};
    CHECK(select_reasoning(batch) == ReasoningKind::teachability);
    batch = {event("Teach Success", EventType::teaching_feedback, EventCategory::knowledge_data)};
    CHECK(select_reasoning(batch) == ReasoningKind::persuasion);
    batch = {event("Wrong Solution", EventType::administrative, EventCategory::administrative)};
    CHECK(select_reasoning(batch) == ReasoningKind::persuasion);
    batch.clear();
    CHECK(errc_of([&] { select_reasoning(batch); }) == Errc::empty_batch);
  }

  TEST_CASE("route is exactly the baseline predicate") {
    const std::vector<double> tri{-1, 0, 1};
    for (double bm : tri)
      for (double ba : tri)
        for (double m : tri)
          for (double a : tri)
            CHECK((classify(m, a, {bm, ba}) == Route::central) == (m >= bm && a >= ba));
  }

  TEST_CASE("colliding leaf activations keep the strongest, ties negative") {
    auto kb = kb::load_kb(R"({"concept_maps":[],"cues":[{"id":"default","trigger":{},"text":"t","expression":"neutral"}],
      "factor_map":[
        {"event":"a","activations":[{"leaf":"x","value":1},{"leaf":"y","value":0.5}]},
        {"event":"b","activations":[{"leaf":"x","value":-1},{"leaf":"y","value":-1}]},
        {"event":"c","activations":[{"leaf":"z","value":0.5}]},
        {"event":"d","activations":[{"leaf":"z","value":-0.25}]}]})");
    const std::vector<events::Event> batch{event("a"), event("b"), event("c"), event("d"), event("unmapped")};
    const auto leaves = leaf_activations(kb, batch);
    CHECK(leaves == std::map<std::string, double>{{"x", -1}, {"y", -1}, {"z", 0.5}});
    const std::vector<events::Event> reversed{event("d"), event("c"), event("b"), event("a")};
    CHECK(leaf_activations(kb, reversed) == leaves);
  }

  TEST_CASE("chatting with the animal lowers ability") {
    Fixture f;
    const std::vector<events::Event> batch{event("Chat with Animal")};
    const auto a = assess(f.model, f.kb, batch, {});
    const auto [m, ab] = oracle_mot_abi(leaf_activations(f.kb, batch));
    CHECK(a.ability == -1);
    CHECK(a.ability == ab);
    CHECK(a.motivation == m);
    CHECK(a.route == Route::peripheral);
    CHECK(a.converged);
  }

  TEST_CASE("empty contributions give zero meters on the peripheral route") {
    Fixture f;
    const std::vector<events::Event> batch{event("Something Unmapped")};
    const auto a = assess(f.model, f.kb, batch, {});
    CHECK(a.motivation == 0);
    CHECK(a.ability == 0);
    CHECK(a.route == Route::peripheral);
  }

  TEST_CASE("learning and applying diffusion reaches the central route") {
    Fixture f;
    const std::vector<events::Event> batch{event("Learn Diffusion"), event("Apply Diffusion")};
    const auto a = assess(f.model, f.kb, batch, {});
    const auto [m, ab] = oracle_mot_abi(leaf_activations(f.kb, batch));
    CHECK(a.motivation == 1);
    CHECK(a.ability == 1);
    CHECK(a.motivation == m);
    CHECK(a.ability == ab);
    CHECK(a.route == Route::central);
  }

  TEST_CASE("persuasion cycle") {
    SUBCASE("rejection asks for teaching") {
      Fixture f;
      f.begin({"Not Teach Water Molecule"});
      const auto d = f.agent.persuasion_cycle();
      CHECK(d.kind == ActionDirective::Kind::display_cue);
      CHECK(d.cue_id == "urge_teaching");
      CHECK(d.text.find("teach me") != std::string::npos);
    }
    SUBCASE("teaching failure gets a sad cue") {
      Fixture f;
      f.events.create_event("Teach Failure", EventType::teaching_feedback, EventCategory::knowledge_data);
      f.agent.begin_cycle(1, f.events.poll(1));
      const auto d = f.agent.persuasion_cycle();
      CHECK(d.kind == ActionDirective::Kind::display_cue);
      CHECK(d.expression == kb::Expression::sad);
    }
    SUBCASE("central route needs no action") {
      Fixture f;
      f.begin({"Learn Diffusion", "Apply Diffusion"});
      const auto d = f.agent.persuasion_cycle();
      CHECK(d.kind == ActionDirective::Kind::none);
      CHECK(f.agent.last_assessment()->route == Route::central);
    }
    SUBCASE("distraction gets a focus cue") {
      Fixture f;
      f.begin({"Chat with Animal"});
      CHECK(f.agent.persuasion_cycle().cue_id == "focus_animal");
    }
  }

  TEST_CASE("teachability cycle") {
    SUBCASE("refusal defers a rejection event to the next cycle") {
      Fixture f;
      f.begin({"Start"});
      const auto d = f.agent.teachability_cycle({false, "diffusion_osmosis", {}});
      CHECK(d.kind == ActionDirective::Kind::none);
      CHECK(f.pending_names() == std::vector<std::string>{"Not Teach Water Molecule"});
      CHECK(f.agent.decisions().find("check_response") != nullptr);
      CHECK(*f.agent.decisions().find("check_response") == "teaching_refused");
    }
    SUBCASE("accepted teaching is saved and announced") {
      Fixture f;
      f.begin({"Start"});
      const auto d = f.agent.teachability_cycle({true, "diffusion_osmosis", kCorrect});
      CHECK(d.kind == ActionDirective::Kind::show_concept_map);
      CHECK(d.error_blanks.empty());
      CHECK(f.kb.learnt.at("diffusion_osmosis").assignment == kCorrect);
      CHECK(f.pending_names() == std::vector<std::string>{"Teachability Event"});
    }
    SUBCASE("no concept map means no teaching opportunity") {
      Fixture f;
      f.begin({"Start"});
      CHECK(errc_of([&] { f.agent.teachability_cycle({true, "", kCorrect}); }) ==
            Errc::no_active_teaching_opportunity);
    }
  }

  TEST_CASE("practicability cycle") {
    SUBCASE("nothing learnt") {
      Fixture f;
      f.begin({"Start"});
      CHECK(errc_of([&] { f.agent.practicability_cycle(); }) == Errc::no_learnt_knowledge);
    }
    SUBCASE("wrong teaching then corrected teaching") {
      Fixture f;
      f.begin({"Start"}, 1);
      f.agent.teachability_cycle({true, "diffusion_osmosis", kWrong});
      f.agent.begin_cycle(2, f.events.poll(2));
      auto d = f.agent.practicability_cycle();
      CHECK(d.kind == ActionDirective::Kind::practice_failure_feedback);
      CHECK(d.error_blanks == std::set<std::string>{"b2", "b4"});
      CHECK(f.pending_names() == std::vector<std::string>{"Teach Failure", "Wrong Solution"});
      CHECK(f.kb.learnt.at("diffusion_osmosis").error_blanks == std::set<std::string>{"b2", "b4"});

      f.agent.begin_cycle(3, f.events.poll(3));
      d = f.agent.teachability_cycle({true, "diffusion_osmosis", kCorrect});
      CHECK(d.kind == ActionDirective::Kind::show_concept_map);
      CHECK(d.error_blanks == std::set<std::string>{"b2", "b4"});

      f.agent.begin_cycle(4, f.events.poll(4));
      d = f.agent.practicability_cycle();
      CHECK(d.kind == ActionDirective::Kind::practice_success_feedback);
      CHECK(d.error_blanks.empty());
      CHECK(f.pending_names() == std::vector<std::string>{"Teach Success"});
    }
  }

  TEST_CASE("teaching responses travel as event attributes") {
    const TeachingResponse r{true, "diffusion_osmosis", kWrong};
    events::Event e = event("Teaching Point Reached", EventType::administrative, EventCategory::administrative);
    e.attributes = r.to_attributes();
    const auto back = TeachingResponse::from_event(e);
    REQUIRE(back.has_value());
    CHECK(back->accepted);
    CHECK(back->map_id == "diffusion_osmosis");
    CHECK(back->assignment == kWrong);
    CHECK_FALSE(TeachingResponse::from_event(event("Chat with Animal")).has_value());
    e.attributes["assignment"] = "{";
    CHECK(errc_of([&] { TeachingResponse::from_event(e); }) == Errc::syntax);
  }
}

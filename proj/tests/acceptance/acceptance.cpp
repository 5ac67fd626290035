// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cases.hpp"
#include "oracles.hpp"
#include "paths.hpp"
#include "pta/error.hpp"
#include "pta/events/event_control.hpp"
#include "pta/fcm/engine.hpp"
#include "pta/goalnet/interpreter.hpp"
#include "pta/session/session.hpp"

namespace {

using namespace pta;
using nlohmann::json;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

std::string first_of(const std::vector<std::string>& v) { return v.empty() ? "" : v.front(); }

Outcome threshold() {
  Outcome o;
  const std::vector<std::pair<double, double>> table{{-1, -1}, {-0.5, -1}, {-0.4999, 0}, {0, 0},
                                                     {0.4999, 0}, {0.5, 1},  {1, 1}};
  for (const auto& [x, y] : table)
    if (fcm::threshold_trivalent(x) != y) o.fail("f(" + std::to_string(x) + ") != " + std::to_string(y));
  if (o.pass) o.detail = "7/7 boundary points exact";
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  const int maps = 400;
  int steps = 0;
  for (int i = 0; i < maps; ++i) {
    const auto doc = test::random_fcm(rng, 12, i % 4 != 0);
    const auto model = fcm::parse_fcm(doc.dump());
    const auto dense = test::dense_from_json(doc);
    std::uniform_int_distribution<int> tri(-1, 1);

    for (int k = 0; k < 4; ++k, ++steps) {
      auto v = fcm::ActivationVector::zeros(model);
      for (std::size_t c = 0; c < model.size(); ++c) {
        v.values[c] = tri(rng);
        v.clamped[c] = model.is_leaf(c) && (rng() & 1);
      }
      if (fcm::fcm_step(model, v) != fcm::dense_oracle_step(model, v)) {
        o.fail("map " + std::to_string(i) + ": sparse and dense step differ");
        break;
      }
    }

    std::map<std::string, double> leaves;
    for (const auto& c : model.concepts())
      if (c.role == fcm::Role::leaf) leaves[c.id] = tri(rng);
    const auto r = fcm::evaluate(model, leaves);
    const auto n = test::oracle_iterate(dense, leaves, {}, dense.max_rounds);
    std::vector<double> mapped(model.size());
    for (std::size_t c = 0; c < model.size(); ++c) mapped[c] = n.final[dense.index(model.concept_at(c).id)];
    if (r.final.values != mapped || r.converged != n.converged || r.cycle_detected != n.cycle_detected ||
        r.rounds != n.rounds)
      o.fail("map " + std::to_string(i) + ": evaluate differs from naive iteration");
  }
  if (o.pass)
    o.detail = std::to_string(maps) + " random maps, " + std::to_string(steps) + " steps, exact equality";
  return o;
}

Outcome textbook_map() {
  Outcome o;
  const auto m = fcm::load_fcm(test::fixtures_dir() / "fcm" / "textbook_fcm.json");
  if (m.weight("C2", "C4") != -1.0) o.fail("weight(C2,C4) is not -1");
  auto e2 = fcm::ActivationVector::zeros(m);
  e2.values[*m.index_of("C2")] = 1;
  const auto next = fcm::dense_oracle_step(m, e2);
  if (next.values[*m.index_of("C4")] != -1) o.fail("C4 after one step from e2 is not -1");
  if (o.pass) o.detail = "weight(C2,C4) = -1, step(e2)[C4] = -1";
  return o;
}

Outcome decomposition() {
  Outcome o;
  const auto m = fcm::load_fcm(test::models_dir() / "pta_fcm.json");
  if (m.stems().size() != 9 || m.leaves().size() != 20) o.fail("bundled map is not 9 stems / 20 leaves");
  if (!m.decomposable()) o.fail("bundled map is not decomposable");
  std::size_t leaf_edges = 0;
  for (auto l : m.leaves()) leaf_edges += m.edges().out(l).size();

  std::mt19937_64 rng(5);
  int multi_round = 0;
  std::size_t dec_later = 0;
  std::size_t full_later = 0;
  for (int i = 0; i < 200 && o.pass; ++i) {
    std::map<std::string, double> leaves;
    for (auto l : m.leaves())
      if (rng() % 3 == 0) leaves[m.concept_at(l).id] = (rng() & 1) ? 1.0 : -1.0;
    fcm::EvalStats dec;
    fcm::EvalStats full;
    fcm::EvalOptions od;
    od.stats = &dec;
    fcm::EvalOptions of;
    of.stats = &full;
    of.force_full_iteration = true;
    const auto a = fcm::evaluate(m, leaves, od);
    const auto b = fcm::evaluate(m, leaves, of);
    if (a.final != b.final || a.rounds != b.rounds) o.fail("decomposed and full results differ");
    if (a.rounds < 2) continue;
    ++multi_round;
    if (dec.later_leaf_edge_visits != 0) o.fail("leaf edges visited after round 1");
    if (full.later_leaf_edge_visits != leaf_edges * (b.rounds - 1)) o.fail("full iteration counter off");
    if (dec.later_edge_visits >= full.later_edge_visits) o.fail("no fewer edge visits after round 1");
    dec_later += dec.later_edge_visits;
    full_later += full.later_edge_visits;
  }
  if (multi_round == 0) o.fail("no pattern needed more than one round");
  if (o.pass)
    o.detail = std::to_string(multi_round) + " patterns; later-round edge visits " + std::to_string(dec_later) +
               " vs " + std::to_string(full_later) + " (0 leaf edges)";
  return o;
}

Outcome convergence() {
  Outcome o;
  const auto m = fcm::load_fcm(test::models_dir() / "pta_fcm.json");
  const auto leaves = m.leaves();
  const std::size_t patterns = std::size_t{1} << leaves.size();
  std::size_t max_rounds = 0;
  std::map<std::string, double> act;
  for (auto l : leaves) act[m.concept_at(l).id] = 0;
  std::vector<std::map<std::string, double>::iterator> slots;
  for (auto l : leaves) slots.push_back(act.find(m.concept_at(l).id));
  for (std::size_t p = 0; p < patterns; ++p) {
    for (std::size_t b = 0; b < slots.size(); ++b) slots[b]->second = (p >> b) & 1 ? 1.0 : 0.0;
    const auto r = fcm::evaluate(m, act);
    if (!r.converged) {
      o.fail("pattern " + std::to_string(p) + (r.cycle_detected ? " cycles" : " hit the round cap"));
      break;
    }
    max_rounds = std::max(max_rounds, r.rounds);
  }

  const auto adv = fcm::load_fcm(test::fixtures_dir() / "fcm" / "mutual_negative_fcm.json");
  fcm::EvalOptions opts;
  opts.initial_state = {{"X", 1}, {"Y", 1}};
  const auto r = fcm::evaluate(adv, {}, opts);
  if (!r.cycle_detected || r.converged) o.fail("mutual-negative pair not flagged as a cycle");
  if (o.pass)
    o.detail = std::to_string(patterns) + " binary patterns converge (max " + std::to_string(max_rounds) +
               " rounds); mutual-negative pair flags cycle_detected";
  return o;
}

Outcome case_studies() {
  Outcome o;
  const auto config = test::bundled_config();
  const auto models = session::load_models(config);
  for (const char* name : {"case1_not_learning", "case3_distraction", "case4_teach_failure", "case5_teach_success"}) {
    const auto report = session::run_trace(config, models, test::case_trace(name));
    auto problems = test::check_cycles(test::case_spec(name), report);
    const auto golden = test::check_golden(name, report);
    problems.insert(problems.end(), golden.begin(), golden.end());
    if (!problems.empty()) o.fail(first_of(problems));
  }
  if (o.pass) o.detail = "cases 1, 3, 4, 5 match expected cycles and golden traversal/report files";
  return o;
}

Outcome cycle_closure() {
  Outcome o;
  const auto config = test::bundled_config();
  const auto models = session::load_models(config);
  std::set<reasoning::ReasoningKind> kinds;
  std::size_t cycles = 0;
  for (const char* name : {"case5_teach_success", "refuse_teaching"}) {
    const auto report = session::run_trace(config, models, test::case_trace(name));
    const auto problems = test::check_cycle_closure(report);
    if (!problems.empty()) o.fail(std::string(name) + ": " + first_of(problems));
    for (const auto& c : report.cycles)
      if (c.kind) kinds.insert(*c.kind);
    cycles += report.cycles.size();
  }
  if (kinds.size() != 3) o.fail("not every reasoning kind was exercised");
  if (o.pass) o.detail = std::to_string(cycles) + " cycles across all three reasoning kinds close at main_end";
  return o;
}

Outcome event_determinism() {
  Outcome o;
  using events::EventCategory;
  using events::EventType;
  struct Spec {
    const char* name;
    EventType type;
    EventCategory category;
  };
  const std::vector<Spec> specs{
      {"Doing Nothing", EventType::time, EventCategory::learning_behavior},
      {"Visit Lab", EventType::location, EventCategory::learning_behavior},
      {"Pick Banana", EventType::item_collection, EventCategory::learning_achievement},
      {"Help Mayor", EventType::mission_fulfillment, EventCategory::learning_achievement},
      {"Chat with Animal", EventType::dialogue, EventCategory::learning_behavior},
      {"Wrong Label", EventType::error_commitment, EventCategory::knowledge_data},
      {"Teach Failure", EventType::teaching_feedback, EventCategory::knowledge_data},
      {"Wrong Solution", EventType::administrative, EventCategory::administrative},
  };
  std::mt19937_64 rng(8);
  std::vector<std::string> first;
  for (int i = 0; i < 100; ++i) {
    auto order = specs;
    std::shuffle(order.begin(), order.end(), rng);
    events::EventControl ec;
    for (const auto& s : order) ec.create_event(s.name, s.type, s.category);
    std::vector<std::string> names;
    for (const auto& e : ec.poll(1)) names.push_back(e.name);
    if (i == 0) first = names;
    if (names != first) {
      o.fail("shuffle " + std::to_string(i) + " changed the poll order");
      break;
    }
  }
  if (first.empty() || first.front() != "Wrong Solution" || first.back() != "Doing Nothing")
    o.fail("poll order does not follow the priority classes");

  const auto report = session::run_trace(test::bundled_config(), test::case_trace("idle_six_minutes"));
  int timeouts = 0;
  std::istringstream in(report.events_jsonl);
  for (std::string line; std::getline(in, line);)
    if (json::parse(line).at("name") == "Doing Nothing") ++timeouts;
  if (timeouts != 1) o.fail("idle trace produced " + std::to_string(timeouts) + " time-out events");
  if (report.cycles.size() != 1) o.fail("idle trace produced " + std::to_string(report.cycles.size()) + " cycles");
  if (o.pass) o.detail = "100 shuffles give one poll order; 6 idle minutes give 1 time-out";
  return o;
}

Outcome interpreter_determinism() {
  Outcome o;
  const auto net = goalnet::load_goalnet(test::models_dir() / "main_routine.json");
  std::set<std::string> names;
  std::function<void(const goalnet::GoalNet&)> collect = [&](const goalnet::GoalNet& n) {
    for (const auto& t : n.transitions) names.insert(t.tasks.begin(), t.tasks.end());
    for (const auto& s : n.subnets) collect(s);
  };
  collect(net);
  goalnet::TaskRegistry registry;
  for (const auto& n : names) registry.add(n, [](goalnet::InterpreterContext&) {});
  goalnet::DecisionTable table;
  table.set("dispatch_reasoning", "to_persuade");
  table.set("check_mot_abi", "cue_required");
  const goalnet::DecisionTableProvider provider = [&table]() -> const goalnet::DecisionTable& { return table; };
  std::string first;
  for (int i = 0; i < 10; ++i) {
    auto state = goalnet::start(net, registry, 1234);
    const auto text = goalnet::run_to_goal(state, provider).to_jsonl(1);
    if (i == 0) first = text;
    if (text != first) o.fail("run " + std::to_string(i) + " serialized differently");
  }

  const auto coin = goalnet::parse_goalnet(R"({
    "name": "coin",
    "states": [
      {"id": "S", "name": "S", "kind": "atomic", "is_start": true},
      {"id": "A", "name": "A", "kind": "atomic"},
      {"id": "B", "name": "B", "kind": "atomic"},
      {"id": "E", "name": "E", "kind": "atomic", "is_end": true}
    ],
    "transitions": [
      {"id": "P", "name": "P", "kind": "probabilistic", "tasks": [], "weights": {"A": 3, "B": 1}},
      {"id": "TA", "name": "TA", "kind": "direct", "tasks": []},
      {"id": "TB", "name": "TB", "kind": "direct", "tasks": []}
    ],
    "arcs": [
      {"from": "S", "to": "P"}, {"from": "P", "to": "A"}, {"from": "P", "to": "B"},
      {"from": "A", "to": "TA"}, {"from": "B", "to": "TB"}, {"from": "TA", "to": "E"}, {"from": "TB", "to": "E"}
    ]
  })");
  if (!goalnet::validate_goalnet(coin).empty()) o.fail("probabilistic fixture net is invalid");
  goalnet::TaskRegistry none;
  int hits = 0;
  const int draws = 10'000;
  for (int seed = 0; seed < draws; ++seed) {
    auto state = goalnet::start(coin, none, static_cast<std::uint64_t>(seed));
    for (const auto& e : goalnet::run_to_goal(state, provider).entries())
      if (e.event == goalnet::LogEvent::entered_state && e.node == "A") ++hits;
  }
  const double freq = static_cast<double>(hits) / draws;
  if (std::fabs(freq - 0.75) > 0.02) o.fail("frequency of A is " + std::to_string(freq));
  if (o.pass) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", freq);
    o.detail = std::string("10 identical logs; P(A) = ") + buf + " over 10000 seeded draws";
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"trivalent-threshold", threshold},
      {"fcm-oracle-equivalence", oracle_equivalence},
      {"textbook-fcm-fixture", textbook_map},
      {"decomposition-efficiency", decomposition},
      {"fcm-convergence", convergence},
      {"case-studies", case_studies},
      {"cycle-closure", cycle_closure},
      {"event-determinism", event_determinism},
      {"interpreter-determinism", interpreter_determinism},
  };
  const auto t0 = std::chrono::steady_clock::now();
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d/%zu criteria passed in %lld ms\n", static_cast<int>(criteria.size()) - failed, criteria.size(),
              static_cast<long long>(ms));
  return failed == 0 ? 0 : 1;
}

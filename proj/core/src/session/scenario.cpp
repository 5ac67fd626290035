#include "pta/session/scenario.hpp"

#include <algorithm>
#include <set>

#include "pta/error.hpp"
#include "pta/json_util.hpp"

namespace pta::session {

using json_util::Fields;
using json_util::Json;

const Choice* SceneNode::find_choice(std::string_view choice_id) const {
  auto it = std::find_if(choices.begin(), choices.end(), [&](const Choice& c) { return c.id == choice_id; });
  return it == choices.end() ? nullptr : &*it;
}

const SceneNode* Scenario::find(std::string_view node_id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const SceneNode& n) { return n.id == node_id; });
  return it == nodes.end() ? nullptr : &*it;
}

namespace {

ScenarioEvent parse_event(const Json& j, const std::string& path) {
  Fields f(j, path);
  ScenarioEvent e;
  e.name = json_util::as_string(f.required("name"), f.path_of("name"));
  const auto type = json_util::as_string(f.required("type"), f.path_of("type"));
  const auto category = json_util::as_string(f.required("category"), f.path_of("category"));
  f.finish();
  const auto t = events::parse_event_type(type);
  if (!t) throw Error(Errc::schema, "unknown event type '" + type + "'", f.path_of("type"));
  const auto c = events::parse_event_category(category);
  if (!c) throw Error(Errc::schema, "unknown event category '" + category + "'", f.path_of("category"));
  if (!events::in_taxonomy(*t, *c))
    throw Error(Errc::taxonomy_violation, "type " + type + " does not belong to " + category, path);
  e.type = *t;
  e.category = *c;
  return e;
}

Choice parse_choice(const Json& j, const std::string& path) {
  Fields f(j, path);
  Choice c;
  c.id = json_util::as_string(f.required("id"), f.path_of("id"));
  c.text = json_util::as_string(f.required("text"), f.path_of("text"));
  if (const auto* v = f.optional("events")) {
    const auto& list = json_util::as_array(*v, f.path_of("events"));
    for (std::size_t i = 0; i < list.size(); ++i)
      c.events.push_back(parse_event(list[i], f.path_of("events") + "/" + std::to_string(i)));
  }
  if (const auto* v = f.optional("next")) c.next = json_util::as_string(*v, f.path_of("next"));
  if (const auto* v = f.optional("refuse_teaching"))
    c.refuse_teaching = json_util::as_string(*v, f.path_of("refuse_teaching"));
  f.finish();
  return c;
}

SceneNode parse_node(const Json& j, const std::string& path) {
  Fields f(j, path);
  SceneNode n;
  n.id = json_util::as_string(f.required("id"), f.path_of("id"));
  if (const auto* v = f.optional("speaker")) n.speaker = json_util::as_string(*v, f.path_of("speaker"));
  if (const auto* v = f.optional("text")) n.text = json_util::as_string(*v, f.path_of("text"));
  if (const auto* v = f.optional("choices")) {
    const auto& list = json_util::as_array(*v, f.path_of("choices"));
    std::set<std::string> ids;
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto c = parse_choice(list[i], f.path_of("choices") + "/" + std::to_string(i));
      if (!ids.insert(c.id).second) throw Error(Errc::invariant, "duplicate choice id '" + c.id + "'", n.id);
      n.choices.push_back(std::move(c));
    }
  }
  if (const auto* v = f.optional("teach")) n.teach = json_util::as_string(*v, f.path_of("teach"));
  if (const auto* v = f.optional("next")) n.next = json_util::as_string(*v, f.path_of("next"));
  f.finish();
  if (n.teach && !n.choices.empty()) throw Error(Errc::invariant, "a teach scene cannot offer choices", n.id);
  return n;
}

}  // namespace

Scenario parse_scenario(std::string_view document) {
  const Json doc = json_util::parse_document(document);
  Fields top(doc, "");
  Scenario s;
  if (const auto* v = top.optional("name")) s.name = json_util::as_string(*v, top.path_of("name"));
  s.start = json_util::as_string(top.required("start"), top.path_of("start"));
  const auto& nodes = json_util::as_array(top.required("nodes"), top.path_of("nodes"));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    s.nodes.push_back(parse_node(nodes[i], top.path_of("nodes") + "/" + std::to_string(i)));
  if (const auto* v = top.optional("practice")) {
    Fields p(*v, top.path_of("practice"));
    if (const auto* x = p.optional("success")) s.practice_success = json_util::as_string(*x, p.path_of("success"));
    if (const auto* x = p.optional("failure")) s.practice_failure = json_util::as_string(*x, p.path_of("failure"));
    p.finish();
  }
  top.finish();

  std::set<std::string> ids;
  for (const auto& n : s.nodes)
    if (!ids.insert(n.id).second) throw Error(Errc::invariant, "duplicate scene id '" + n.id + "'", n.id);
  auto check_ref = [&](const std::string& ref, const std::string& where) {
    if (!ref.empty() && !ids.count(ref)) throw Error(Errc::invariant, "unknown scene '" + ref + "'", where);
  };
  if (!ids.count(s.start)) throw Error(Errc::invariant, "unknown start scene '" + s.start + "'", "/start");
  for (const auto& n : s.nodes) {
    check_ref(n.next, n.id);
    for (const auto& c : n.choices) check_ref(c.next, n.id + "/" + c.id);
  }
  check_ref(s.practice_success, "/practice/success");
  check_ref(s.practice_failure, "/practice/failure");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(json_util::read_file(path)); }

void cross_validate(const Scenario& scenario, const kb::KnowledgeBase& kb) {
  for (const auto& n : scenario.nodes) {
    if (n.teach && kb.find_map(*n.teach) == nullptr) throw Error(Errc::unknown_map, "unknown concept map", *n.teach);
    for (const auto& c : n.choices)
      if (c.refuse_teaching && kb.find_map(*c.refuse_teaching) == nullptr)
        throw Error(Errc::unknown_map, "unknown concept map", *c.refuse_teaching);
  }
}

}  // namespace pta::session

#include "pta/goalnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "pta/error.hpp"
#include "pta/json_util.hpp"

namespace pta::goalnet {

using json_util::Fields;
using json_util::Json;
using json_util::OrderedJson;

std::string_view to_string(StateKind kind) {
  return kind == StateKind::atomic ? "atomic" : "composite";
}

std::string_view to_string(TransitionKind kind) {
  switch (kind) {
    case TransitionKind::direct: return "direct";
    case TransitionKind::conditional: return "conditional";
    case TransitionKind::probabilistic: return "probabilistic";
  }
  return "direct";
}

const StateNode* GoalNet::find_state(std::string_view id) const {
  for (const auto& s : states)
    if (s.id == id) return &s;
  return nullptr;
}

const TransitionNode* GoalNet::find_transition(std::string_view id) const {
  for (const auto& t : transitions)
    if (t.id == id) return &t;
  return nullptr;
}

const GoalNet* GoalNet::find_subnet(std::string_view composite_id) const {
  for (const auto& n : subnets)
    if (n.composite == composite_id) return &n;
  return nullptr;
}

bool GoalNet::contains(std::string_view id) const {
  return find_state(id) != nullptr || find_transition(id) != nullptr;
}

const StateNode* GoalNet::start_state() const {
  for (const auto& s : states)
    if (s.is_start) return &s;
  return nullptr;
}

const StateNode* GoalNet::end_state() const {
  for (const auto& s : states)
    if (s.is_end) return &s;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

StateKind parse_state_kind(const Json& v, const std::string& path) {
  const auto s = json_util::as_string(v, path);
  if (s == "atomic") return StateKind::atomic;
  if (s == "composite") return StateKind::composite;
  throw Error(Errc::schema, "state kind must be atomic or composite", path);
}

TransitionKind parse_transition_kind(const Json& v, const std::string& path) {
  const auto s = json_util::as_string(v, path);
  if (s == "direct") return TransitionKind::direct;
  if (s == "conditional") return TransitionKind::conditional;
  if (s == "probabilistic") return TransitionKind::probabilistic;
  throw Error(Errc::schema, "transition kind must be direct, conditional or probabilistic", path);
}

GoalNet parse_level(const Json& doc, const std::string& path, const SubnetResolver& resolve, int depth);

GoalNet parse_subnet_value(const Json& value, const std::string& path, const SubnetResolver& resolve,
                           int depth) {
  if (depth > 32) throw Error(Errc::schema, "subnet nesting too deep", path);
  if (value.is_object()) return parse_level(value, path, resolve, depth + 1);
  if (value.is_string()) {
    if (!resolve) throw Error(Errc::schema, "subnet reference without a resolver", path);
    const auto text = resolve(value.get<std::string>());
    return parse_level(json_util::parse_document(text), path, resolve, depth + 1);
  }
  throw Error(Errc::schema, "subnet must be an object or a reference string", path);
}

GoalNet parse_level(const Json& doc, const std::string& path, const SubnetResolver& resolve, int depth) {
  Fields top(doc, path);
  GoalNet net;
  if (const auto* v = top.optional("version")) json_util::as_integer(*v, top.path_of("version"));
  net.name = json_util::as_string(top.required("name"), top.path_of("name"));

  const auto& states = json_util::as_array(top.required("states"), top.path_of("states"));
  const auto& transitions = json_util::as_array(top.required("transitions"), top.path_of("transitions"));
  const auto& arcs = json_util::as_array(top.required("arcs"), top.path_of("arcs"));
  const Json* branches = top.optional("branches");
  const Json* subnets = top.optional("subnets");
  top.finish();

  for (std::size_t i = 0; i < states.size(); ++i) {
    Fields f(states[i], top.path_of("states") + "/" + std::to_string(i));
    StateNode s;
    s.id = json_util::as_string(f.required("id"), f.path_of("id"));
    s.name = json_util::as_string(f.required("name"), f.path_of("name"));
    s.kind = parse_state_kind(f.required("kind"), f.path_of("kind"));
    if (const auto* v = f.optional("is_start")) s.is_start = json_util::as_bool(*v, f.path_of("is_start"));
    if (const auto* v = f.optional("is_end")) s.is_end = json_util::as_bool(*v, f.path_of("is_end"));
    f.finish();
    net.states.push_back(std::move(s));
  }

  for (std::size_t i = 0; i < transitions.size(); ++i) {
    Fields f(transitions[i], top.path_of("transitions") + "/" + std::to_string(i));
    TransitionNode t;
    t.id = json_util::as_string(f.required("id"), f.path_of("id"));
    t.name = json_util::as_string(f.required("name"), f.path_of("name"));
    t.kind = parse_transition_kind(f.required("kind"), f.path_of("kind"));
    const auto& tasks = json_util::as_array(f.required("tasks"), f.path_of("tasks"));
    for (std::size_t k = 0; k < tasks.size(); ++k)
      t.tasks.push_back(json_util::as_string(tasks[k], f.path_of("tasks") + "/" + std::to_string(k)));
    if (const auto* w = f.optional("weights")) {
      const auto& obj = json_util::as_object(*w, f.path_of("weights"));
      std::map<std::string, double> weights;
      for (const auto& [key, val] : obj.items())
        weights[key] = json_util::as_number(val, f.path_of("weights") + "/" + key);
      t.weights = std::move(weights);
    }
    f.finish();
    net.transitions.push_back(std::move(t));
  }

  for (std::size_t i = 0; i < arcs.size(); ++i) {
    Fields f(arcs[i], top.path_of("arcs") + "/" + std::to_string(i));
    Arc a;
    a.from = json_util::as_string(f.required("from"), f.path_of("from"));
    a.to = json_util::as_string(f.required("to"), f.path_of("to"));
    if (const auto* v = f.optional("style")) a.style = json_util::as_string(*v, f.path_of("style"));
    f.finish();
    net.arcs.push_back(std::move(a));
  }

  if (branches) {
    json_util::as_array(*branches, top.path_of("branches"));
    for (std::size_t i = 0; i < branches->size(); ++i) {
      Fields f((*branches)[i], top.path_of("branches") + "/" + std::to_string(i));
      Branch b;
      b.composite = json_util::as_string(f.required("composite"), f.path_of("composite"));
      b.first = json_util::as_string(f.required("first"), f.path_of("first"));
      b.last = json_util::as_string(f.required("last"), f.path_of("last"));
      f.finish();
      net.branches.push_back(std::move(b));
    }
  }

  if (subnets) {
    json_util::as_object(*subnets, top.path_of("subnets"));
    // Keep the document's order for composites: follow state declaration order
    // first, then any remaining keys (which validation reports as orphans).
    std::vector<std::string> keys;
    for (const auto& s : net.states)
      if (subnets->contains(s.id)) keys.push_back(s.id);
    for (const auto& [key, _] : subnets->items())
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    for (const auto& key : keys) {
      GoalNet sub = parse_subnet_value(subnets->at(key), top.path_of("subnets") + "/" + key, resolve, depth);
      sub.composite = key;
      net.subnets.push_back(std::move(sub));
    }
  }
  return net;
}

}  // namespace

GoalNet parse_goalnet(std::string_view document, const SubnetResolver& resolve) {
  return parse_level(json_util::parse_document(document), "", resolve, 0);
}

GoalNet load_goalnet(const std::filesystem::path& path) {
  const auto base = path.parent_path();
  SubnetResolver resolve = [base](const std::string& ref) { return json_util::read_file(base / ref); };
  return parse_goalnet(json_util::read_file(path), resolve);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

OrderedJson to_json(const GoalNet& net) {
  OrderedJson doc;
  doc["name"] = net.name;
  doc["states"] = OrderedJson::array();
  for (const auto& s : net.states) {
    doc["states"].push_back(OrderedJson{{"id", s.id},
                                        {"name", s.name},
                                        {"kind", to_string(s.kind)},
                                        {"is_start", s.is_start},
                                        {"is_end", s.is_end}});
  }
  doc["transitions"] = OrderedJson::array();
  for (const auto& t : net.transitions) {
    OrderedJson j{{"id", t.id}, {"name", t.name}, {"kind", to_string(t.kind)}, {"tasks", t.tasks}};
    if (t.weights) {
      OrderedJson w = OrderedJson::object();
      for (const auto& [k, v] : *t.weights) w[k] = v;
      j["weights"] = std::move(w);
    }
    doc["transitions"].push_back(std::move(j));
  }
  doc["arcs"] = OrderedJson::array();
  for (const auto& a : net.arcs) {
    OrderedJson j{{"from", a.from}, {"to", a.to}};
    if (a.style) j["style"] = *a.style;
    doc["arcs"].push_back(std::move(j));
  }
  doc["branches"] = OrderedJson::array();
  for (const auto& b : net.branches)
    doc["branches"].push_back(OrderedJson{{"composite", b.composite}, {"first", b.first}, {"last", b.last}});
  doc["subnets"] = OrderedJson::object();
  for (const auto& sub : net.subnets) doc["subnets"][sub.composite] = to_json(sub);
  return doc;
}

}  // namespace

std::string serialize_goalnet(const GoalNet& net) {
  return to_json(net).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void collect_ids(const GoalNet& net, std::unordered_map<std::string, int>& counts) {
  for (const auto& s : net.states) ++counts[s.id];
  for (const auto& t : net.transitions) ++counts[t.id];
  for (const auto& sub : net.subnets) collect_ids(sub, counts);
}

void validate_level(const GoalNet& net, ValidationReport& out) {
  auto add = [&out](std::string rule, std::string node, std::string message) {
    out.push_back({std::move(rule), std::move(node), std::move(message)});
  };
  const std::string level = net.composite.empty() ? std::string("top level") : "sub-net of " + net.composite;

  std::size_t starts = 0;
  std::size_t ends = 0;
  for (const auto& s : net.states) {
    if (s.kind == StateKind::composite && (s.is_start || s.is_end))
      add("composite start/end", s.id, "composite state cannot be a start or end state");
    if (s.is_start) ++starts;
    if (s.is_end) ++ends;
  }
  if (starts != 1) add("start count", net.composite, level + " has " + std::to_string(starts) + " start states");
  if (ends != 1) add("end count", net.composite, level + " has " + std::to_string(ends) + " end states");

  // Arcs: endpoints, bipartite, duplicates.
  std::map<std::string, std::size_t> out_degree;
  std::map<std::string, std::size_t> in_degree;
  std::set<std::pair<std::string, std::string>> seen_arcs;
  for (const auto& a : net.arcs) {
    const bool from_state = net.find_state(a.from) != nullptr;
    const bool from_trans = net.find_transition(a.from) != nullptr;
    const bool to_state = net.find_state(a.to) != nullptr;
    const bool to_trans = net.find_transition(a.to) != nullptr;
    if (!(from_state || from_trans) || !(to_state || to_trans)) {
      add("dangling arc", from_state || from_trans ? a.to : a.from,
          "arc " + a.from + " -> " + a.to + " references an undeclared node");
      continue;
    }
    if (from_state == to_state) add("non-bipartite arc", a.from, "arc " + a.from + " -> " + a.to + " is non-bipartite");
    if (!seen_arcs.emplace(a.from, a.to).second)
      add("duplicate arc", a.from, "arc " + a.from + " -> " + a.to + " declared twice");
    ++out_degree[a.from];
    ++in_degree[a.to];
  }

  for (const auto& s : net.states) {
    const auto deg = out_degree[s.id];
    if (s.is_end && deg != 0) add("state out-degree", s.id, "end state has outgoing arcs");
    if (!s.is_end && deg != 1)
      add("state out-degree", s.id, "state must have exactly one following transition, has " + std::to_string(deg));
  }

  for (const auto& t : net.transitions) {
    for (const auto& task : t.tasks)
      if (task.empty()) add("empty task name", t.id, "task names must be nonempty");
    const auto deg = out_degree[t.id];
    if (t.kind == TransitionKind::direct && deg != 1)
      add("decision arity", t.id, "direct transition must have exactly one outgoing arc");
    if (t.kind != TransitionKind::direct && deg <= 1)
      add("decision arity", t.id, "conditional/probabilistic transition must have more than one outgoing arc");
    if (t.kind == TransitionKind::probabilistic) {
      if (!t.weights) {
        add("weights", t.id, "probabilistic transition needs weights");
      } else {
        double sum = 0;
        bool ok = true;
        std::vector<std::string> succ;
        for (const auto& a : net.arcs)
          if (a.from == t.id) succ.push_back(a.to);
        for (const auto& [target, w] : *t.weights) {
          if (!std::isfinite(w) || w < 0) ok = false;
          sum += w;
          if (std::find(succ.begin(), succ.end(), target) == succ.end())
            add("weights", t.id, "weight target " + target + " is not a successor");
        }
        if (!ok || !(sum > 0)) add("weights", t.id, "weights must be nonnegative with a positive sum");
      }
    } else if (t.weights) {
      add("weights", t.id, "weights are only allowed on probabilistic transitions");
    }
  }

  // Composite states, branches, subnets.
  std::map<std::string, int> branch_count;
  for (const auto& b : net.branches) {
    const auto* c = net.find_state(b.composite);
    if (c == nullptr || c->kind != StateKind::composite) {
      add("branch target", b.composite, "branch does not refer to a composite state");
      continue;
    }
    ++branch_count[b.composite];
    const auto* sub = net.find_subnet(b.composite);
    if (sub != nullptr) {
      const auto* first = sub->find_state(b.first);
      const auto* last = sub->find_state(b.last);
      if (first == nullptr || !first->is_start)
        add("branch endpoints", b.composite, "branch first must be the start state of the sub-net");
      if (last == nullptr || !last->is_end)
        add("branch endpoints", b.composite, "branch last must be the end state of the sub-net");
    }
  }
  for (const auto& s : net.states) {
    if (s.kind != StateKind::composite) continue;
    const int n = branch_count[s.id];
    if (n == 0) add("missing branch", s.id, "composite state has no branch");
    if (n > 1) add("duplicate branch", s.id, "composite state has more than one branch");
    if (net.find_subnet(s.id) == nullptr) add("missing subnet", s.id, "composite state has no sub-net");
  }
  for (const auto& sub : net.subnets) {
    const auto* c = net.find_state(sub.composite);
    if (c == nullptr || c->kind != StateKind::composite)
      add("orphan subnet", sub.composite, "sub-net does not expand a composite state at this level");
  }

  // Every node must lie on some start -> end path.
  const auto* start = net.start_state();
  const auto* end = net.end_state();
  if (starts == 1 && ends == 1) {
    std::unordered_map<std::string, std::vector<std::string>> fwd;
    std::unordered_map<std::string, std::vector<std::string>> bwd;
    for (const auto& a : net.arcs) {
      if (!net.contains(a.from) || !net.contains(a.to)) continue;
      fwd[a.from].push_back(a.to);
      bwd[a.to].push_back(a.from);
    }
    auto reach = [](const std::string& root, auto& adj) {
      std::unordered_set<std::string> seen{root};
      std::deque<std::string> queue{root};
      while (!queue.empty()) {
        auto n = queue.front();
        queue.pop_front();
        for (const auto& m : adj[n])
          if (seen.insert(m).second) queue.push_back(m);
      }
      return seen;
    };
    const auto from_start = reach(start->id, fwd);
    const auto to_end = reach(end->id, bwd);
    auto check = [&](const std::string& id) {
      if (!from_start.count(id) || !to_end.count(id))
        add("unreachable", id, "node does not lie on a start-to-end path");
    };
    for (const auto& s : net.states) check(s.id);
    for (const auto& t : net.transitions) check(t.id);
  }

  for (const auto& sub : net.subnets) validate_level(sub, out);
}

}  // namespace

ValidationReport validate_goalnet(const GoalNet& net) {
  ValidationReport report;
  std::unordered_map<std::string, int> counts;
  collect_ids(net, counts);
  std::vector<std::string> dups;
  for (const auto& [id, n] : counts)
    if (n > 1) dups.push_back(id);
  std::sort(dups.begin(), dups.end());
  for (const auto& id : dups) report.push_back({"duplicate id", id, "node id declared more than once"});
  validate_level(net, report);
  return report;
}

std::vector<std::string> successors(const GoalNet& net, std::string_view node) {
  if (!net.contains(node)) throw Error(Errc::unknown_node, "node not declared in this net", std::string(node));
  std::vector<std::string> out;
  for (const auto& a : net.arcs)
    if (a.from == node) out.push_back(a.to);
  return out;
}

}  // namespace pta::goalnet

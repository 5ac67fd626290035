#include "pta/kb/knowledge_base.hpp"

#include <algorithm>
#include <cmath>

#include "pta/error.hpp"
#include "pta/json_util.hpp"

namespace pta::kb {

using json_util::Fields;
using json_util::Json;
using json_util::OrderedJson;

bool ConceptMapSpec::has_blank(std::string_view blank) const {
  return std::any_of(blanks.begin(), blanks.end(), [&](const Blank& b) { return b.id == blank; });
}

bool ConceptMapSpec::has_label(std::string_view label) const {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

std::string_view to_string(Expression expression) {
  switch (expression) {
    case Expression::happy: return "happy";
    case Expression::sad: return "sad";
    case Expression::neutral: return "neutral";
    case Expression::encouraging: return "encouraging";
  }
  return "neutral";
}

std::optional<Expression> parse_expression(std::string_view text) {
  for (auto e : {Expression::happy, Expression::sad, Expression::neutral, Expression::encouraging})
    if (to_string(e) == text) return e;
  return std::nullopt;
}

int CueTrigger::field_count() const {
  return static_cast<int>(event_name.has_value()) + static_cast<int>(low_motivation.has_value()) +
         static_cast<int>(low_ability.has_value());
}

const ConceptMapSpec* KnowledgeBase::find_map(std::string_view id) const {
  for (const auto& m : concept_maps)
    if (m.id == id) return &m;
  return nullptr;
}

const PersuasionCue* KnowledgeBase::find_cue(std::string_view id) const {
  for (const auto& c : cues)
    if (c.id == id) return &c;
  return nullptr;
}

const FactorMapEntry* KnowledgeBase::find_factors(std::string_view event) const {
  for (const auto& f : factor_map)
    if (f.event == event) return &f;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

ConceptMapSpec parse_map(const Json& j, const std::string& path) {
  Fields f(j, path);
  ConceptMapSpec m;
  m.id = json_util::as_string(f.required("id"), f.path_of("id"));
  if (const auto* v = f.optional("title")) json_util::as_string(*v, f.path_of("title"));
  const auto& blanks = json_util::as_array(f.required("blanks"), f.path_of("blanks"));
  for (std::size_t i = 0; i < blanks.size(); ++i) {
    Fields b(blanks[i], f.path_of("blanks") + "/" + std::to_string(i));
    Blank blank;
    blank.id = json_util::as_string(b.required("id"), b.path_of("id"));
    blank.prompt = json_util::as_string(b.required("prompt"), b.path_of("prompt"));
    b.finish();
    if (m.has_blank(blank.id)) throw Error(Errc::invariant, "duplicate blank id " + blank.id, b.path());
    m.blanks.push_back(std::move(blank));
  }
  const auto& labels = json_util::as_array(f.required("labels"), f.path_of("labels"));
  for (std::size_t i = 0; i < labels.size(); ++i)
    m.labels.push_back(json_util::as_string(labels[i], f.path_of("labels") + "/" + std::to_string(i)));
  const auto& key = json_util::as_object(f.required("answer_key"), f.path_of("answer_key"));
  for (const auto& [blank, label] : key.items())
    m.answer_key[blank] = json_util::as_string(label, f.path_of("answer_key") + "/" + blank);
  f.finish();

  for (const auto& b : m.blanks)
    if (!m.answer_key.count(b.id)) throw Error(Errc::invariant, "answer key misses blank " + b.id, path);
  for (const auto& [blank, label] : m.answer_key) {
    if (!m.has_blank(blank)) throw Error(Errc::invariant, "answer key names unknown blank " + blank, path);
    if (!m.has_label(label)) throw Error(Errc::invariant, "answer " + label + " is not a label", path);
  }
  return m;
}

PersuasionCue parse_cue(const Json& j, const std::string& path) {
  Fields f(j, path);
  PersuasionCue c;
  c.id = json_util::as_string(f.required("id"), f.path_of("id"));
  Fields t(f.required("trigger"), f.path_of("trigger"));
  if (const auto* v = t.optional("event_name")) c.trigger.event_name = json_util::as_string(*v, t.path_of("event_name"));
  if (const auto* v = t.optional("low_motivation"))
    c.trigger.low_motivation = json_util::as_bool(*v, t.path_of("low_motivation"));
  if (const auto* v = t.optional("low_ability"))
    c.trigger.low_ability = json_util::as_bool(*v, t.path_of("low_ability"));
  t.finish();
  c.text = json_util::as_string(f.required("text"), f.path_of("text"));
  const auto expr = json_util::as_string(f.required("expression"), f.path_of("expression"));
  const auto parsed = parse_expression(expr);
  if (!parsed) throw Error(Errc::schema, "unknown expression " + expr, f.path_of("expression"));
  c.expression = *parsed;
  f.finish();
  if (c.id != kDefaultCueId && c.trigger.field_count() == 0)
    throw Error(Errc::invariant, "cue trigger needs at least one field", c.id);
  return c;
}

}  // namespace

Assignment assignment_from_json(const Json& j, const std::string& path) {
  Assignment a;
  for (const auto& [blank, label] : json_util::as_object(j, path).items()) {
    if (label.is_null())
      a[blank] = std::nullopt;
    else
      a[blank] = json_util::as_string(label, path + "/" + blank);
  }
  return a;
}

json_util::OrderedJson assignment_to_json(const Assignment& assignment) {
  OrderedJson out = OrderedJson::object();
  for (const auto& [blank, label] : assignment) {
    if (label)
      out[blank] = *label;
    else
      out[blank] = nullptr;
  }
  return out;
}

KnowledgeBase load_kb(std::string_view document) {
  const Json doc = json_util::parse_document(document);
  Fields top(doc, "");
  if (const auto* v = top.optional("name")) json_util::as_string(*v, top.path_of("name"));
  if (const auto* v = top.optional("description")) json_util::as_string(*v, top.path_of("description"));
  const auto& maps = json_util::as_array(top.required("concept_maps"), top.path_of("concept_maps"));
  const auto& cues = json_util::as_array(top.required("cues"), top.path_of("cues"));
  const auto& factors = json_util::as_array(top.required("factor_map"), top.path_of("factor_map"));
  top.finish();

  KnowledgeBase kb;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    auto m = parse_map(maps[i], "/concept_maps/" + std::to_string(i));
    if (kb.find_map(m.id) != nullptr) throw Error(Errc::invariant, "duplicate concept map id", m.id);
    kb.concept_maps.push_back(std::move(m));
  }
  for (std::size_t i = 0; i < cues.size(); ++i) {
    auto c = parse_cue(cues[i], "/cues/" + std::to_string(i));
    if (kb.find_cue(c.id) != nullptr) throw Error(Errc::invariant, "duplicate cue id", c.id);
    kb.cues.push_back(std::move(c));
  }
  if (kb.find_cue(kDefaultCueId) == nullptr)
    throw Error(Errc::invariant, "knowledge base lacks the \"default\" cue", "/cues");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const std::string path = "/factor_map/" + std::to_string(i);
    Fields f(factors[i], path);
    FactorMapEntry entry;
    entry.event = json_util::as_string(f.required("event"), f.path_of("event"));
    const auto& acts = json_util::as_array(f.required("activations"), f.path_of("activations"));
    for (std::size_t k = 0; k < acts.size(); ++k) {
      Fields a(acts[k], f.path_of("activations") + "/" + std::to_string(k));
      LeafActivation la;
      la.leaf = json_util::as_string(a.required("leaf"), a.path_of("leaf"));
      la.value = json_util::as_number(a.required("value"), a.path_of("value"));
      a.finish();
      if (!std::isfinite(la.value) || la.value < -1 || la.value > 1)
        throw Error(Errc::invariant, "activation outside [-1, 1]", a.path());
      entry.activations.push_back(std::move(la));
    }
    f.finish();
    if (kb.find_factors(entry.event) != nullptr)
      throw Error(Errc::invariant, "event listed twice in factor_map", entry.event);
    kb.factor_map.push_back(std::move(entry));
  }
  return kb;
}

KnowledgeBase load_kb_file(const std::filesystem::path& path) { return load_kb(json_util::read_file(path)); }

void cross_validate(const KnowledgeBase& kb, const fcm::FcmModel& model) {
  for (const auto& entry : kb.factor_map) {
    for (const auto& a : entry.activations) {
      const auto i = model.index_of(a.leaf);
      if (!i) throw Error(Errc::invariant, "factor_map for \"" + entry.event + "\" names unknown leaf", a.leaf);
      if (!model.is_leaf(*i))
        throw Error(Errc::invariant, "factor_map for \"" + entry.event + "\" names a non-leaf concept", a.leaf);
    }
  }
}

// ---------------------------------------------------------------------------
// Learnt knowledge

LearntKnowledge save_learnt(KnowledgeBase& kb, const std::string& map_id, Assignment assignment) {
  const auto* map = kb.find_map(map_id);
  if (map == nullptr) throw Error(Errc::unknown_map, "no concept map with this id", map_id);
  for (const auto& [blank, label] : assignment) {
    if (!map->has_blank(blank)) throw Error(Errc::unknown_blank, "map " + map_id + " has no blank " + blank, blank);
    if (label && !map->has_label(*label))
      throw Error(Errc::unknown_label, "map " + map_id + " has no label " + *label, *label);
  }
  LearntKnowledge learnt{map_id, std::move(assignment), {}};
  kb.learnt[map_id] = learnt;
  if (kb.session_dir) persist_learnt(kb);
  return learnt;
}

std::set<std::string> grade(const ConceptMapSpec& map, const Assignment& assignment) {
  std::set<std::string> errors;
  for (const auto& blank : map.blanks) {
    auto it = assignment.find(blank.id);
    if (it == assignment.end() || !it->second || it->second->empty() || *it->second != map.answer_key.at(blank.id))
      errors.insert(blank.id);
  }
  return errors;
}

void record_errors(KnowledgeBase& kb, const std::string& map_id, std::set<std::string> errors) {
  auto it = kb.learnt.find(map_id);
  if (it == kb.learnt.end()) throw Error(Errc::unknown_map, "nothing learnt for this map", map_id);
  it->second.error_blanks = std::move(errors);
  if (kb.session_dir) persist_learnt(kb);
}

std::string learnt_to_json(const KnowledgeBase& kb) {
  OrderedJson doc;
  doc["learnt"] = OrderedJson::array();
  for (const auto& [id, l] : kb.learnt) {
    doc["learnt"].push_back(OrderedJson{{"map", id},
                                        {"assignment", assignment_to_json(l.assignment)},
                                        {"error_blanks", l.error_blanks}});
  }
  return doc.dump(2) + "\n";
}

std::map<std::string, LearntKnowledge> learnt_from_json(std::string_view document) {
  const Json doc = json_util::parse_document(document);
  Fields top(doc, "");
  const auto& list = json_util::as_array(top.required("learnt"), "/learnt");
  top.finish();
  std::map<std::string, LearntKnowledge> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    Fields f(list[i], "/learnt/" + std::to_string(i));
    LearntKnowledge l;
    l.map_id = json_util::as_string(f.required("map"), f.path_of("map"));
    l.assignment = assignment_from_json(f.required("assignment"), f.path_of("assignment"));
    const auto& errs = json_util::as_array(f.required("error_blanks"), f.path_of("error_blanks"));
    for (std::size_t k = 0; k < errs.size(); ++k)
      l.error_blanks.insert(json_util::as_string(errs[k], f.path_of("error_blanks") + "/" + std::to_string(k)));
    f.finish();
    out[l.map_id] = std::move(l);
  }
  return out;
}

void persist_learnt(const KnowledgeBase& kb) {
  if (!kb.session_dir) return;
  json_util::write_file(*kb.session_dir / "learnt.json", learnt_to_json(kb));
}

std::map<std::string, LearntKnowledge> load_learnt(const std::filesystem::path& session_dir) {
  return learnt_from_json(json_util::read_file(session_dir / "learnt.json"));
}

// ---------------------------------------------------------------------------
// Cue selection

std::optional<int> match_specificity(const PersuasionCue& cue, const CueContext& ctx) {
  const auto& t = cue.trigger;
  if (t.event_name && *t.event_name != ctx.event_name) return std::nullopt;
  if (t.low_motivation && *t.low_motivation != ctx.low_motivation) return std::nullopt;
  if (t.low_ability && *t.low_ability != ctx.low_ability) return std::nullopt;
  return t.field_count();
}

const PersuasionCue& select_cue(const KnowledgeBase& kb, const CueContext& ctx) {
  if (!ctx.low_motivation && !ctx.low_ability)
    throw Error(Errc::precondition_violation, "cue selection requires low motivation or low ability", ctx.event_name);
  const PersuasionCue* best = nullptr;
  int best_score = -1;
  for (const auto& cue : kb.cues) {
    if (cue.id == kDefaultCueId) continue;
    const auto score = match_specificity(cue, ctx);
    if (!score) continue;
    if (*score > best_score || (*score == best_score && cue.id < best->id)) {
      best = &cue;
      best_score = *score;
    }
  }
  if (best != nullptr) return *best;
  const auto* fallback = kb.find_cue(kDefaultCueId);
  if (fallback == nullptr) throw Error(Errc::invariant, "knowledge base lacks the \"default\" cue");
  return *fallback;
}

const PersuasionCue* select_feedback_cue(const KnowledgeBase& kb, std::string_view event_name) {
  const PersuasionCue* best = nullptr;
  for (const auto& cue : kb.cues) {
    const auto& t = cue.trigger;
    if (t.event_name != event_name) continue;
    if (t.low_motivation != false || t.low_ability != false) continue;
    if (best == nullptr || cue.id < best->id) best = &cue;
  }
  return best;
}

}  // namespace pta::kb

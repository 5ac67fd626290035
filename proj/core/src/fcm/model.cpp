#include "pta/fcm/model.hpp"

#include <array>
#include <cmath>

#include "pta/error.hpp"
#include "pta/json_util.hpp"

namespace pta::fcm {

namespace {

constexpr std::array<Factor, kFactorCount> kAllFactors = {
    Factor::personal_relevance, Factor::personal_responsibility, Factor::need_for_cognition,
    Factor::prior_knowledge,    Factor::distraction,             Factor::repetition,
};

}  // namespace

std::string_view to_string(Role role) { return role == Role::stem ? "stem" : "leaf"; }

std::string_view to_string(StemKind kind) {
  switch (kind) {
    case StemKind::motivation: return "motivation";
    case StemKind::ability: return "ability";
    case StemKind::peripheral_cue: return "peripheral_cue";
    case StemKind::factor: return "factor";
  }
  return "factor";
}

std::string_view to_string(Factor factor) {
  switch (factor) {
    case Factor::personal_relevance: return "personal_relevance";
    case Factor::personal_responsibility: return "personal_responsibility";
    case Factor::need_for_cognition: return "need_for_cognition";
    case Factor::prior_knowledge: return "prior_knowledge";
    case Factor::distraction: return "distraction";
    case Factor::repetition: return "repetition";
  }
  return "personal_relevance";
}

std::string_view to_string(Mode mode) { return mode == Mode::pta ? "pta" : "generic"; }

void AdjacencyList::add(std::size_t source, std::size_t target, double weight) {
  if (!std::isfinite(weight) || weight < -1.0 || weight > 1.0)
    throw Error(Errc::invariant, "edge weight outside [-1, 1]");
  for (const auto& e : out_[source])
    if (e.target == target) throw Error(Errc::invariant, "duplicate edge");
  out_[source].push_back({target, weight});
  ++in_degree_[target];
  ++edges_;
}

std::optional<double> AdjacencyList::weight(std::size_t source, std::size_t target) const {
  for (const auto& e : out_[source])
    if (e.target == target) return e.weight;
  return std::nullopt;
}

FcmModel FcmModel::build(Mode mode, std::vector<CausalConcept> concepts, const std::vector<EdgeSpec>& edges,
                         std::size_t max_rounds, Threshold threshold) {
  FcmModel m;
  m.mode_ = mode;
  m.threshold_ = threshold;
  if (max_rounds == 0) throw Error(Errc::invariant, "max_rounds must be positive");
  m.max_rounds_ = max_rounds;

  for (std::size_t i = 0; i < concepts.size(); ++i) {
    const auto& c = concepts[i];
    if (c.id.empty()) throw Error(Errc::invariant, "concept id must be nonempty", std::to_string(i));
    if (!m.index_.emplace(c.id, i).second) throw Error(Errc::invariant, "duplicate concept id", c.id);
    if (c.role == Role::leaf && (c.stem_kind || c.factor))
      throw Error(Errc::invariant, "leaf concepts carry no stem kind or factor", c.id);
    if (c.role == Role::stem && mode == Mode::pta && !c.stem_kind)
      throw Error(Errc::invariant, "stem concept needs a stem_kind", c.id);
    if (c.factor.has_value() != (c.stem_kind == StemKind::factor))
      throw Error(Errc::invariant, "factor_name is required exactly for factor stems", c.id);
  }
  m.concepts_ = std::move(concepts);

  if (mode == Mode::pta) {
    auto count_kind = [&m](StemKind kind) {
      std::size_t n = 0;
      for (const auto& c : m.concepts_)
        if (c.stem_kind == kind) ++n;
      return n;
    };
    for (auto kind : {StemKind::motivation, StemKind::ability, StemKind::peripheral_cue}) {
      const auto n = count_kind(kind);
      if (n != 1)
        throw Error(Errc::invariant, "PTA map needs exactly one " + std::string(to_string(kind)) + " stem, found " +
                                         std::to_string(n));
    }
    for (auto f : kAllFactors) {
      std::size_t n = 0;
      for (const auto& c : m.concepts_)
        if (c.factor == f) ++n;
      if (n != 1)
        throw Error(Errc::invariant, "PTA map needs exactly one " + std::string(to_string(f)) + " factor, found " +
                                         std::to_string(n));
    }
  }

  m.edges_ = AdjacencyList(m.concepts_.size());
  for (const auto& e : edges) {
    const auto from = m.index_of(e.from);
    const auto to = m.index_of(e.to);
    if (!from) throw Error(Errc::invariant, "edge source is not a concept", e.from);
    if (!to) throw Error(Errc::invariant, "edge target is not a concept", e.to);
    if (e.weight == 0) throw Error(Errc::invariant, "zero-weight edge " + e.from + " -> " + e.to, e.from);
    if (m.concepts_[*to].role == Role::leaf)
      throw Error(Errc::invariant, "leaf concept has an incoming edge from " + e.from, e.to);
    try {
      m.edges_.add(*from, *to, e.weight);
    } catch (const Error& err) {
      throw Error(Errc::invariant, err.what(), e.from + "->" + e.to);
    }
  }

  bool decomposable = true;
  for (std::size_t i = 0; i < m.concepts_.size(); ++i) {
    const auto& c = m.concepts_[i];
    if (c.role != Role::leaf) continue;
    bool feeds_factor = false;
    for (const auto& e : m.edges_.out(i)) {
      if (m.concepts_[e.target].stem_kind == StemKind::factor)
        feeds_factor = true;
      else
        decomposable = false;
    }
    if (mode == Mode::pta && !feeds_factor)
      throw Error(Errc::invariant, "leaf concept has no edge into a factor", c.id);
  }
  for (std::size_t i = 0; i < m.concepts_.size(); ++i) {
    if (m.concepts_[i].role == Role::leaf) continue;
    for (const auto& e : m.edges_.out(i))
      if (m.concepts_[e.target].stem_kind == StemKind::factor) decomposable = false;
  }
  m.decomposable_ = decomposable;
  return m;
}

std::optional<std::size_t> FcmModel::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> FcmModel::weight(std::string_view from, std::string_view to) const {
  const auto a = index_of(from);
  const auto b = index_of(to);
  if (!a || !b) return std::nullopt;
  return edges_.weight(*a, *b);
}

std::vector<std::size_t> FcmModel::stems() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < concepts_.size(); ++i)
    if (concepts_[i].role == Role::stem) out.push_back(i);
  return out;
}

std::vector<std::size_t> FcmModel::leaves() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < concepts_.size(); ++i)
    if (concepts_[i].role == Role::leaf) out.push_back(i);
  return out;
}

std::optional<std::size_t> FcmModel::stem(StemKind kind) const {
  for (std::size_t i = 0; i < concepts_.size(); ++i)
    if (concepts_[i].stem_kind == kind) return i;
  return std::nullopt;
}

std::optional<std::size_t> FcmModel::factor(Factor f) const {
  for (std::size_t i = 0; i < concepts_.size(); ++i)
    if (concepts_[i].factor == f) return i;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

using json_util::Fields;
using json_util::Json;

template <typename Enum, std::size_t N>
Enum parse_enum(const Json& v, const std::string& path, const std::array<Enum, N>& values) {
  const auto s = json_util::as_string(v, path);
  for (auto e : values)
    if (to_string(e) == s) return e;
  throw Error(Errc::schema, "unknown value \"" + s + "\"", path);
}

}  // namespace

FcmModel parse_fcm(std::string_view document) {
  const Json doc = json_util::parse_document(document);
  Fields top(doc, "");
  Mode mode = Mode::pta;
  if (const auto* v = top.optional("mode"))
    mode = parse_enum(*v, top.path_of("mode"), std::array{Mode::pta, Mode::generic});
  std::size_t max_rounds = 100;
  if (const auto* v = top.optional("max_rounds")) {
    const auto n = json_util::as_integer(*v, top.path_of("max_rounds"));
    if (n <= 0) throw Error(Errc::schema, "max_rounds must be positive", top.path_of("max_rounds"));
    max_rounds = static_cast<std::size_t>(n);
  }
  if (const auto* v = top.optional("threshold")) {
    if (json_util::as_string(*v, top.path_of("threshold")) != "trivalent")
      throw Error(Errc::schema, "only the trivalent threshold is supported", top.path_of("threshold"));
  }
  if (const auto* v = top.optional("name")) json_util::as_string(*v, top.path_of("name"));
  if (const auto* v = top.optional("description")) json_util::as_string(*v, top.path_of("description"));
  const auto& concepts = json_util::as_array(top.required("concepts"), top.path_of("concepts"));
  const auto& edges = json_util::as_array(top.required("edges"), top.path_of("edges"));
  top.finish();

  std::vector<CausalConcept> cs;
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    Fields f(concepts[i], "/concepts/" + std::to_string(i));
    CausalConcept c;
    c.id = json_util::as_string(f.required("id"), f.path_of("id"));
    c.name = json_util::as_string(f.required("name"), f.path_of("name"));
    c.role = parse_enum(f.required("role"), f.path_of("role"), std::array{Role::stem, Role::leaf});
    if (const auto* v = f.optional("stem_kind"))
      c.stem_kind = parse_enum(*v, f.path_of("stem_kind"),
                               std::array{StemKind::motivation, StemKind::ability, StemKind::peripheral_cue,
                                          StemKind::factor});
    if (const auto* v = f.optional("factor_name")) c.factor = parse_enum(*v, f.path_of("factor_name"), kAllFactors);
    f.finish();
    cs.push_back(std::move(c));
  }
  std::vector<EdgeSpec> es;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    Fields f(edges[i], "/edges/" + std::to_string(i));
    EdgeSpec e;
    e.from = json_util::as_string(f.required("from"), f.path_of("from"));
    e.to = json_util::as_string(f.required("to"), f.path_of("to"));
    e.weight = json_util::as_number(f.required("weight"), f.path_of("weight"));
    f.finish();
    es.push_back(std::move(e));
  }
  return FcmModel::build(mode, std::move(cs), es, max_rounds);
}

FcmModel load_fcm(const std::filesystem::path& path) { return parse_fcm(json_util::read_file(path)); }

}  // namespace pta::fcm

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pta::fcm {

enum class Role { stem, leaf };
enum class StemKind { motivation, ability, peripheral_cue, factor };
enum class Factor {
  personal_relevance,
  personal_responsibility,
  need_for_cognition,
  prior_knowledge,
  distraction,
  repetition,
};
// pta: the fixed PTA stem set is enforced. generic: any signed digraph, used for
// textbook maps and property tests.
enum class Mode { pta, generic };
enum class Threshold { trivalent };

inline constexpr std::size_t kFactorCount = 6;

std::string_view to_string(Role role);
std::string_view to_string(StemKind kind);
std::string_view to_string(Factor factor);
std::string_view to_string(Mode mode);

struct CausalConcept {
  std::string id;
  std::string name;
  Role role = Role::stem;
  std::optional<StemKind> stem_kind;
  std::optional<Factor> factor;
};

struct Edge {
  std::size_t target = 0;
  double weight = 0;
};

struct EdgeSpec {
  std::string from;
  std::string to;
  double weight = 0;
};

// Out-edges per concept index; targets kept in insertion order.
class AdjacencyList {
 public:
  explicit AdjacencyList(std::size_t concepts = 0) : out_(concepts), in_degree_(concepts, 0) {}

  // Throws Errc::invariant on a duplicate (source, target) pair or a weight
  // outside [-1, 1].
  void add(std::size_t source, std::size_t target, double weight);

  const std::vector<Edge>& out(std::size_t source) const { return out_[source]; }
  std::size_t in_degree(std::size_t target) const { return in_degree_[target]; }
  std::size_t size() const { return out_.size(); }
  std::size_t edge_count() const { return edges_; }
  std::optional<double> weight(std::size_t source, std::size_t target) const;

 private:
  std::vector<std::vector<Edge>> out_;
  std::vector<std::size_t> in_degree_;
  std::size_t edges_ = 0;
};

// Immutable after construction; build() validates every structural invariant.
class FcmModel {
 public:
  static FcmModel build(Mode mode, std::vector<CausalConcept> concepts, const std::vector<EdgeSpec>& edges,
                        std::size_t max_rounds = 100, Threshold threshold = Threshold::trivalent);

  Mode mode() const { return mode_; }
  Threshold threshold() const { return threshold_; }
  std::size_t max_rounds() const { return max_rounds_; }
  std::size_t size() const { return concepts_.size(); }
  const std::vector<CausalConcept>& concepts() const { return concepts_; }
  const CausalConcept& concept_at(std::size_t i) const { return concepts_[i]; }
  const AdjacencyList& edges() const { return edges_; }

  std::optional<std::size_t> index_of(std::string_view id) const;
  std::optional<double> weight(std::string_view from, std::string_view to) const;
  bool is_leaf(std::size_t i) const { return concepts_[i].role == Role::leaf; }

  std::vector<std::size_t> stems() const;
  std::vector<std::size_t> leaves() const;
  std::optional<std::size_t> stem(StemKind kind) const;
  std::optional<std::size_t> factor(Factor factor) const;

  // True when every factor's in-edges come only from leaves and every leaf
  // edge ends in a factor. Only then may evaluation skip the sub FCMs after the
  // first round without changing the result.
  bool decomposable() const { return decomposable_; }

 private:
  Mode mode_ = Mode::pta;
  Threshold threshold_ = Threshold::trivalent;
  std::size_t max_rounds_ = 100;
  std::vector<CausalConcept> concepts_;
  std::unordered_map<std::string, std::size_t> index_;
  AdjacencyList edges_;
  bool decomposable_ = false;
};

// fcm JSON schema: {"mode", "concepts":[{id,name,role,stem_kind?,factor_name?}],
// "edges":[{from,to,weight}], "threshold", "max_rounds"}.
FcmModel parse_fcm(std::string_view document);
FcmModel load_fcm(const std::filesystem::path& path);

}  // namespace pta::fcm

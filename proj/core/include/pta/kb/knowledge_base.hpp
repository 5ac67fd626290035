#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pta/fcm/model.hpp"
#include "pta/json_util.hpp"

namespace pta::kb {

struct Blank {
  std::string id;
  std::string prompt;

  friend bool operator==(const Blank&, const Blank&) = default;
};

// Domain knowledge: a concept map whose blanks the student fills with labels.
struct ConceptMapSpec {
  std::string id;
  std::vector<Blank> blanks;
  std::vector<std::string> labels;  // may include distractors
  std::map<std::string, std::string> answer_key;

  bool has_blank(std::string_view blank) const;
  bool has_label(std::string_view label) const;
};

// blank id -> label; a null label is a blank left empty.
using Assignment = std::map<std::string, std::optional<std::string>>;

// {"blank": "label" | null}. Throws Errc::schema.
Assignment assignment_from_json(const json_util::Json& value, const std::string& path);
json_util::OrderedJson assignment_to_json(const Assignment& assignment);

struct LearntKnowledge {
  std::string map_id;
  Assignment assignment;
  std::set<std::string> error_blanks;

  friend bool operator==(const LearntKnowledge&, const LearntKnowledge&) = default;
};

enum class Expression { happy, sad, neutral, encouraging };

std::string_view to_string(Expression expression);
std::optional<Expression> parse_expression(std::string_view text);

struct CueTrigger {
  std::optional<std::string> event_name;
  std::optional<bool> low_motivation;
  std::optional<bool> low_ability;

  int field_count() const;
};

struct PersuasionCue {
  std::string id;
  CueTrigger trigger;
  std::string text;
  Expression expression = Expression::neutral;
};

struct LeafActivation {
  std::string leaf;
  double value = 0;
};

struct FactorMapEntry {
  std::string event;
  std::vector<LeafActivation> activations;
};

inline constexpr std::string_view kDefaultCueId = "default";

struct KnowledgeBase {
  std::vector<ConceptMapSpec> concept_maps;
  std::vector<PersuasionCue> cues;
  std::vector<FactorMapEntry> factor_map;
  std::map<std::string, LearntKnowledge> learnt;
  // When set, save_learnt() rewrites <session_dir>/learnt.json.
  std::optional<std::filesystem::path> session_dir;

  const ConceptMapSpec* find_map(std::string_view id) const;
  const PersuasionCue* find_cue(std::string_view id) const;
  const FactorMapEntry* find_factors(std::string_view event) const;
};

// kb JSON schema: {"concept_maps":[...], "cues":[{id,trigger,text,expression}],
// "factor_map":[{"event", "activations":[{leaf,value}]}]}.
KnowledgeBase load_kb(std::string_view document);
KnowledgeBase load_kb_file(const std::filesystem::path& path);

// Checks that every factor_map leaf is a leaf concept of `model`.
void cross_validate(const KnowledgeBase& kb, const fcm::FcmModel& model);

// Replaces learnt[map_id] (clearing its error set) and persists when the KB has
// a session directory. Throws Errc::unknown_map / unknown_blank / unknown_label.
LearntKnowledge save_learnt(KnowledgeBase& kb, const std::string& map_id, Assignment assignment);

// Blanks whose assignment is missing, empty or different from the key.
std::set<std::string> grade(const ConceptMapSpec& map, const Assignment& assignment);

// Stores the error set of the latest practice run.
void record_errors(KnowledgeBase& kb, const std::string& map_id, std::set<std::string> errors);

std::string learnt_to_json(const KnowledgeBase& kb);
std::map<std::string, LearntKnowledge> learnt_from_json(std::string_view document);
void persist_learnt(const KnowledgeBase& kb);
std::map<std::string, LearntKnowledge> load_learnt(const std::filesystem::path& session_dir);

struct CueContext {
  std::string event_name;
  bool low_motivation = false;
  bool low_ability = false;
};

// Most specific matching cue (most trigger fields set, all matching); ties go
// to the lexicographically smallest id; the "default" cue matches everything
// at specificity 0. Throws Errc::precondition_violation when neither flag is set.
const PersuasionCue& select_cue(const KnowledgeBase& kb, const CueContext& ctx);

// Specificity of `cue` against `ctx`, or nullopt when it does not match.
std::optional<int> match_specificity(const PersuasionCue& cue, const CueContext& ctx);

// Positive feedback cue for `event_name`: a cue triggered on that event with
// both flags explicitly false.
const PersuasionCue* select_feedback_cue(const KnowledgeBase& kb, std::string_view event_name);

}  // namespace pta::kb

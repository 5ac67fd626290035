#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pta::goalnet {

enum class StateKind { atomic, composite };
enum class TransitionKind { direct, conditional, probabilistic };

struct StateNode {
  std::string id;
  std::string name;
  StateKind kind = StateKind::atomic;
  bool is_start = false;
  bool is_end = false;

  friend bool operator==(const StateNode&, const StateNode&) = default;
};

struct TransitionNode {
  std::string id;
  std::string name;
  TransitionKind kind = TransitionKind::direct;
  std::vector<std::string> tasks;
  // Present iff kind == probabilistic.
  std::optional<std::map<std::string, double>> weights;

  friend bool operator==(const TransitionNode&, const TransitionNode&) = default;
};

struct Arc {
  std::string from;
  std::string to;
  // Arrow subtype as drawn in the designer; carried through, never interpreted.
  std::optional<std::string> style;

  friend bool operator==(const Arc&, const Arc&) = default;
};

struct Branch {
  std::string composite;
  std::string first;
  std::string last;

  friend bool operator==(const Branch&, const Branch&) = default;
};

// One level of a Goal Net. Composite states are expanded by the nested nets in
// `subnets`, each tagged with the composite state id it expands.
struct GoalNet {
  std::string name;
  std::string composite;  // empty at the top level
  std::vector<StateNode> states;
  std::vector<TransitionNode> transitions;
  std::vector<Arc> arcs;
  std::vector<Branch> branches;
  std::vector<GoalNet> subnets;

  const StateNode* find_state(std::string_view id) const;
  const TransitionNode* find_transition(std::string_view id) const;
  const GoalNet* find_subnet(std::string_view composite_id) const;
  bool contains(std::string_view id) const;
  const StateNode* start_state() const;
  const StateNode* end_state() const;

  friend bool operator==(const GoalNet&, const GoalNet&) = default;
};

// Resolves a subnet given by reference (a string instead of an inline object)
// to the referenced document text.
using SubnetResolver = std::function<std::string(const std::string& reference)>;

GoalNet parse_goalnet(std::string_view document, const SubnetResolver& resolve = {});

// Reads a goalnet file; string subnet references resolve relative to it.
GoalNet load_goalnet(const std::filesystem::path& path);

// Canonical form: subnets inlined, two-space indent, LF line endings.
std::string serialize_goalnet(const GoalNet& net);

struct Violation {
  std::string rule;
  std::string node;
  std::string message;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate_goalnet(const GoalNet& net);

// Arc targets of `node` in document order. Throws Errc::unknown_node when the
// node is not declared at this level.
std::vector<std::string> successors(const GoalNet& net, std::string_view node);

std::string_view to_string(StateKind kind);
std::string_view to_string(TransitionKind kind);

}  // namespace pta::goalnet

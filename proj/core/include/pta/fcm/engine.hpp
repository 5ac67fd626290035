#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pta/fcm/model.hpp"

namespace pta::fcm {

// One value per concept (indexed like FcmModel::concepts()); clamped entries
// are held fixed by every update.
struct ActivationVector {
  std::vector<double> values;
  std::vector<bool> clamped;

  static ActivationVector zeros(const FcmModel& model);

  friend bool operator==(const ActivationVector&, const ActivationVector&) = default;
};

// -1 for x <= -0.5, 1 for x >= 0.5, 0 in between. Throws Errc::non_finite_input.
double threshold_trivalent(double x);

// Edge-visit instrumentation for evaluate().
struct EvalStats {
  std::size_t first_round_edge_visits = 0;
  std::size_t later_edge_visits = 0;
  // Visits of leaf -> factor edges after round 1.
  std::size_t later_leaf_edge_visits = 0;
  std::size_t total() const { return first_round_edge_visits + later_edge_visits; }
};

// One synchronous update of every non-clamped concept with in-degree > 0;
// other concepts keep their value. `edge_visits` is incremented per edge read.
ActivationVector fcm_step(const FcmModel& model, const ActivationVector& v, std::size_t* edge_visits = nullptr);

// Same contract as fcm_step, computed from a dense weight matrix.
ActivationVector dense_oracle_step(const FcmModel& model, const ActivationVector& v);

// Dense weight matrix E with E[i][j] = weight of the edge from concept i to j.
std::vector<std::vector<double>> dense_matrix(const FcmModel& model);

struct FcmResult {
  ActivationVector final;
  std::size_t rounds = 0;
  bool converged = false;
  bool cycle_detected = false;

  double value(const FcmModel& model, std::string_view id) const;
};

struct EvalOptions {
  std::optional<std::size_t> max_rounds;
  // Starting values for non-leaf concepts (default 0). Test hook for
  // exercising cyclic main FCMs.
  std::map<std::string, double> initial_state;
  // Iterate the whole graph every round instead of main FCM only.
  bool force_full_iteration = false;
  EvalStats* stats = nullptr;
};

// Clamps the given leaves, fixes the factors with a single sub-FCM pass, then
// iterates the main FCM until its stem vector repeats the previous round
// (converged), repeats an earlier round (cycle_detected), or max_rounds.
FcmResult evaluate(const FcmModel& model, const std::map<std::string, double>& leaf_activations,
                   const EvalOptions& options = {});

}  // namespace pta::fcm

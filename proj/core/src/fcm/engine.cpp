#include "pta/fcm/engine.hpp"

#include <cmath>

#include "pta/error.hpp"

namespace pta::fcm {

ActivationVector ActivationVector::zeros(const FcmModel& model) {
  return {std::vector<double>(model.size(), 0.0), std::vector<bool>(model.size(), false)};
}

double threshold_trivalent(double x) {
  if (!std::isfinite(x)) throw Error(Errc::non_finite_input, "threshold input is not finite");
  if (x <= -0.5) return -1.0;
  if (x >= 0.5) return 1.0;
  return 0.0;
}

double FcmResult::value(const FcmModel& model, std::string_view id) const {
  const auto i = model.index_of(id);
  if (!i) throw Error(Errc::unknown_node, "no such concept", std::string(id));
  return final.values[*i];
}

namespace {

void check_dimensions(const FcmModel& model, const ActivationVector& v) {
  if (v.values.size() != model.size() || v.clamped.size() != model.size())
    throw Error(Errc::dimension_mismatch, "activation vector has " + std::to_string(v.values.size()) +
                                              " entries, model has " + std::to_string(model.size()));
}

}  // namespace

ActivationVector fcm_step(const FcmModel& model, const ActivationVector& v, std::size_t* edge_visits) {
  check_dimensions(model, v);
  const auto n = model.size();
  const auto& adj = model.edges();
  // Scatter in ascending source order so every target's sum is accumulated in
  // the same order as a dense column product.
  std::vector<double> sums(n, 0.0);
  std::size_t visits = 0;
  for (std::size_t src = 0; src < n; ++src) {
    for (const auto& e : adj.out(src)) {
      sums[e.target] += e.weight * v.values[src];
      ++visits;
    }
  }
  if (edge_visits != nullptr) *edge_visits += visits;

  ActivationVector next = v;
  for (std::size_t i = 0; i < n; ++i) {
    if (v.clamped[i] || adj.in_degree(i) == 0) continue;
    next.values[i] = threshold_trivalent(sums[i]);
  }
  return next;
}

namespace {

struct Decomposition {
  std::vector<std::size_t> leaves;
  std::vector<std::size_t> stems;
  std::vector<std::size_t> main_in_degree;  // in-edges from stems only
  std::vector<bool> is_factor;
  std::size_t leaf_edges = 0;
};

Decomposition decompose(const FcmModel& model) {
  Decomposition d;
  const auto n = model.size();
  d.main_in_degree.assign(n, 0);
  d.is_factor.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (model.is_leaf(i)) {
      d.leaves.push_back(i);
      d.leaf_edges += model.edges().out(i).size();
      continue;
    }
    d.stems.push_back(i);
    d.is_factor[i] = model.concept_at(i).stem_kind == StemKind::factor;
    for (const auto& e : model.edges().out(i)) ++d.main_in_degree[e.target];
  }
  return d;
}

// Sub FCMs: each factor takes the thresholded sum of its leaf in-neighbours.
// Leaves never change, so this pass runs once per evaluation.
void sub_fcm_pass(const FcmModel& model, const Decomposition& d, const ActivationVector& v, ActivationVector& next,
                  std::size_t& visits) {
  std::vector<double> sums(model.size(), 0.0);
  std::vector<bool> touched(model.size(), false);
  for (auto leaf : d.leaves) {
    for (const auto& e : model.edges().out(leaf)) {
      sums[e.target] += e.weight * v.values[leaf];
      touched[e.target] = true;
      ++visits;
    }
  }
  for (std::size_t i = 0; i < model.size(); ++i)
    if (touched[i] && !v.clamped[i]) next.values[i] = threshold_trivalent(sums[i]);
}

// Main FCM: stems updated from stem in-neighbours only. Stems without stem
// in-edges (the factors) hold their value.
void main_fcm_step(const FcmModel& model, const Decomposition& d, const ActivationVector& v, ActivationVector& next,
                   std::size_t& visits) {
  std::vector<double> sums(model.size(), 0.0);
  for (auto src : d.stems) {
    for (const auto& e : model.edges().out(src)) {
      sums[e.target] += e.weight * v.values[src];
      ++visits;
    }
  }
  for (auto i : d.stems)
    if (d.main_in_degree[i] > 0 && !v.clamped[i]) next.values[i] = threshold_trivalent(sums[i]);
}

}  // namespace

FcmResult evaluate(const FcmModel& model, const std::map<std::string, double>& leaf_activations,
                   const EvalOptions& options) {
  ActivationVector v = ActivationVector::zeros(model);
  for (const auto& [id, value] : options.initial_state) {
    const auto i = model.index_of(id);
    if (!i) throw Error(Errc::unknown_node, "initial state names an unknown concept", id);
    if (model.is_leaf(*i)) throw Error(Errc::non_leaf_clamp, "initial state applies to non-leaf concepts", id);
    if (!std::isfinite(value) || value < -1 || value > 1)
      throw Error(Errc::invariant, "activation outside [-1, 1]", id);
    v.values[*i] = value;
  }
  for (const auto& [id, value] : leaf_activations) {
    const auto i = model.index_of(id);
    if (!i) throw Error(Errc::unknown_leaf, "no such leaf concept", id);
    if (!model.is_leaf(*i)) throw Error(Errc::non_leaf_clamp, "only leaf concepts can be clamped", id);
    if (!std::isfinite(value) || value < -1 || value > 1)
      throw Error(Errc::invariant, "activation outside [-1, 1]", id);
    v.values[*i] = value;
    v.clamped[*i] = true;
  }

  const std::size_t max_rounds = options.max_rounds.value_or(model.max_rounds());
  const bool decomposed = model.decomposable() && !options.force_full_iteration;
  const Decomposition d = decompose(model);

  FcmResult result;
  std::vector<std::vector<double>> history;
  ActivationVector cur = std::move(v);
  for (std::size_t round = 1; round <= max_rounds; ++round) {
    std::size_t visits = 0;
    std::size_t leaf_visits = 0;
    ActivationVector next = cur;
    if (!decomposed) {
      next = fcm_step(model, cur, &visits);
      leaf_visits = d.leaf_edges;
    } else if (round == 1) {
      main_fcm_step(model, d, cur, next, visits);
      sub_fcm_pass(model, d, cur, next, visits);
    } else {
      main_fcm_step(model, d, cur, next, visits);
    }
    if (options.stats != nullptr) {
      if (round == 1) {
        options.stats->first_round_edge_visits += visits;
      } else {
        options.stats->later_edge_visits += visits;
        options.stats->later_leaf_edge_visits += leaf_visits;
      }
    }

    result.rounds = round;
    if (next.values == cur.values) {
      result.converged = true;
      cur = std::move(next);
      break;
    }
    for (const auto& past : history) {
      if (past == next.values) {
        result.cycle_detected = true;
        break;
      }
    }
    history.push_back(std::move(cur.values));
    cur = std::move(next);
    if (result.cycle_detected) break;
  }
  result.final = std::move(cur);
  return result;
}

}  // namespace pta::fcm

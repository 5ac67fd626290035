// Dense matrix form of the FCM update. Shares nothing with the sparse path in
// engine.cpp except the threshold, so it can serve as its oracle.
#include "pta/error.hpp"
#include "pta/fcm/engine.hpp"

namespace pta::fcm {

std::vector<std::vector<double>> dense_matrix(const FcmModel& model) {
  const auto n = model.size();
  std::vector<std::vector<double>> e(n, std::vector<double>(n, 0.0));
  for (const auto& from : model.concepts()) {
    for (const auto& to : model.concepts()) {
      if (auto w = model.weight(from.id, to.id)) e[*model.index_of(from.id)][*model.index_of(to.id)] = *w;
    }
  }
  return e;
}

ActivationVector dense_oracle_step(const FcmModel& model, const ActivationVector& v) {
  const auto n = model.size();
  if (v.values.size() != n || v.clamped.size() != n)
    throw Error(Errc::dimension_mismatch, "activation vector does not match the model");
  const auto e = dense_matrix(model);
  ActivationVector next = v;
  for (std::size_t j = 0; j < n; ++j) {
    if (v.clamped[j]) continue;
    bool has_input = false;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (e[i][j] != 0.0) has_input = true;
      sum += e[i][j] * v.values[i];
    }
    if (has_input) next.values[j] = threshold_trivalent(sum);
  }
  return next;
}

}  // namespace pta::fcm

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "peakmdp/mdp.hpp"

namespace peakmdp {

struct ViConfig {
  /// Stop once the Bellman residual drops below this.
  double epsilon = 1e-8;
  std::size_t max_iterations = 1'000'000;
  /// Keep every residual in ViResult::residuals.
  bool record_residuals = false;
};

struct BackupResult {
  ValueFunction values;
  double residual = 0.0;
};

struct ViResult {
  ValueFunction values;
  std::size_t iterations = 0;
  double residual = 0.0;
  std::vector<double> residuals;
};

class ViDidNotConverge : public std::runtime_error {
 public:
  ViDidNotConverge(std::size_t iterations, double last_residual);
  std::size_t iterations() const noexcept { return iterations_; }
  double last_residual() const noexcept { return last_residual_; }

 private:
  std::size_t iterations_;
  double last_residual_;
};

/// v'[s] = R(s) + gamma * max_a v[T(s, a)]; residual = max_s |v'[s] - v[s]|.
BackupResult bellman_backup(std::span<const double> v, const Scenario& scenario);

/// Same backup written into `out` (which must not alias `v`). Returns the residual.
double bellman_backup_into(std::span<const double> v, std::span<double> out,
                           const Scenario& scenario);

/// Synchronous value iteration from the zero function (or `initial`).
/// Throws InvalidScenario for a bad scenario, ViDidNotConverge when the
/// residual stays above epsilon for max_iterations sweeps.
ViResult value_iteration(const Scenario& scenario, const ViConfig& config = {});
ViResult value_iteration(const Scenario& scenario, const ViConfig& config,
                         std::span<const double> initial);

/// Sup-norm distance to V* guaranteed when VI stops at residual < epsilon.
inline double vi_error_bound(double epsilon, double gamma) {
  return epsilon * gamma / (1.0 - gamma);
}

/// Greedy policy; ties go to the lowest action index (Up < Down < Left < Right on grids).
Policy extract_policy(std::span<const double> v, const Scenario& scenario);

/// Discounted return sum_{t < horizon} gamma^t R(s_t) of the deterministic
/// rollout from `start`.
double evaluate_policy(const Scenario& scenario, const Policy& policy, StateId start,
                       std::size_t horizon);

}  // namespace peakmdp

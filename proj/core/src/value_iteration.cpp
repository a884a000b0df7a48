#include "peakmdp/value_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace peakmdp {

ViDidNotConverge::ViDidNotConverge(std::size_t iterations, double last_residual)
    : std::runtime_error("value iteration did not converge after " + std::to_string(iterations) +
                         " iterations (last residual " + std::to_string(last_residual) + ")"),
      iterations_(iterations),
      last_residual_(last_residual) {}

double bellman_backup_into(std::span<const double> v, std::span<double> out,
                           const Scenario& scenario) {
  const World& world = scenario.world();
  const std::size_t n = world.state_count();
  if (v.size() != n || out.size() != n) {
    throw std::invalid_argument("value function length does not match state count");
  }
  const double gamma = scenario.gamma();
  const auto rewards = scenario.reward_table();
  double residual = 0.0;
  for (StateId s = 0; s < n; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (StateId t : world.successors(s)) {
      if (t != kUnavailable) best = std::max(best, v[t]);
    }
    out[s] = rewards[s] + gamma * best;
    residual = std::max(residual, std::abs(out[s] - v[s]));
  }
  return residual;
}

BackupResult bellman_backup(std::span<const double> v, const Scenario& scenario) {
  BackupResult result{ValueFunction(v.size()), 0.0};
  result.residual = bellman_backup_into(v, result.values, scenario);
  return result;
}

ViResult value_iteration(const Scenario& scenario, const ViConfig& config,
                         std::span<const double> initial) {
  require_valid(scenario);
  if (!(config.epsilon > 0.0) || config.max_iterations == 0) {
    throw std::invalid_argument("value iteration needs epsilon > 0 and max_iterations >= 1");
  }
  ValueFunction current(initial.begin(), initial.end());
  ValueFunction next(current.size());
  ViResult result;
  while (result.iterations < config.max_iterations) {
    result.residual = bellman_backup_into(current, next, scenario);
    ++result.iterations;
    if (config.record_residuals) result.residuals.push_back(result.residual);
    current.swap(next);
    if (result.residual < config.epsilon) {
      result.values = std::move(current);
      return result;
    }
  }
  throw ViDidNotConverge(result.iterations, result.residual);
}

ViResult value_iteration(const Scenario& scenario, const ViConfig& config) {
  const ValueFunction zero(scenario.state_count(), 0.0);
  return value_iteration(scenario, config, zero);
}

Policy extract_policy(std::span<const double> v, const Scenario& scenario) {
  const World& world = scenario.world();
  if (v.size() != world.state_count()) {
    throw std::invalid_argument("value function length does not match state count");
  }
  Policy policy(world.state_count(), 0);
  for (StateId s = 0; s < world.state_count(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    const auto next = world.successors(s);
    for (ActionId a = 0; a < next.size(); ++a) {
      if (next[a] != kUnavailable && v[next[a]] > best) {
        best = v[next[a]];
        policy[s] = a;
      }
    }
  }
  return policy;
}

double evaluate_policy(const Scenario& scenario, const Policy& policy, StateId start,
                       std::size_t horizon) {
  const World& world = scenario.world();
  if (policy.size() != world.state_count()) {
    throw std::invalid_argument("policy length does not match state count");
  }
  double total = 0.0;
  double discount = 1.0;
  StateId s = start;
  for (std::size_t t = 0; t < horizon; ++t) {
    total += discount * scenario.reward_at(s);
    discount *= scenario.gamma();
    s = world.transition(s, policy[s]);
  }
  return total;
}

}  // namespace peakmdp

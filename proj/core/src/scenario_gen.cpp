#include "peakmdp/scenario_gen.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace peakmdp {

std::vector<std::string> genspec_violations(const GenSpec& spec) {
  std::vector<std::string> errors;
  if (spec.width == 0 || spec.height == 0) errors.emplace_back("grid dimensions must be positive");
  else if (spec.width * spec.height < 2) errors.emplace_back("grid must have at least 2 cells");
  if (spec.reward_count == 0) errors.emplace_back("reward count must be positive");
  if (spec.reward_count > spec.width * spec.height) {
    errors.push_back("reward count " + std::to_string(spec.reward_count) + " exceeds state count " +
                     std::to_string(spec.width * spec.height));
  }
  if (!(spec.value_lo > 0.0) || !std::isfinite(spec.value_hi) || spec.value_lo > spec.value_hi) {
    errors.emplace_back("value range must satisfy 0 < lo <= hi");
  }
  if (!(spec.gamma > 0.0 && spec.gamma < 1.0)) errors.emplace_back("gamma must lie in (0,1)");
  return errors;
}

Scenario random_scenario(const GenSpec& spec) {
  if (const auto errors = genspec_violations(spec); !errors.empty()) {
    std::string msg = "invalid generator spec:";
    for (const auto& e : errors) msg += " " + e + ";";
    throw std::invalid_argument(msg);
  }
  GridWorld grid(spec.width, spec.height);
  const std::size_t n = grid.state_count();
  SplitMix64 rng(spec.seed);

  std::vector<StateId> cells(n);
  std::iota(cells.begin(), cells.end(), StateId{0});
  for (std::size_t i = 0; i < spec.reward_count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(cells[i], cells[j]);
  }

  std::vector<RewardSource> rewards;
  rewards.reserve(spec.reward_count);
  for (std::size_t i = 0; i < spec.reward_count; ++i) {
    rewards.push_back({cells[i], rng.uniform(spec.value_lo, spec.value_hi)});
  }
  return Scenario(World(grid), spec.gamma, std::move(rewards));
}

}  // namespace peakmdp

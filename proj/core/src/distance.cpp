#include "peakmdp/distance.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace peakmdp {

namespace {

constexpr std::size_t kNoSlot = static_cast<std::size_t>(-1);

Distance abs_diff(std::size_t a, std::size_t b) {
  return static_cast<Distance>(a > b ? a - b : b - a);
}

DistanceField grid_field(StateId target, const GridWorld& grid) {
  DistanceField field{target, std::vector<Distance>(grid.state_count())};
  const std::size_t tx = target % grid.width();
  const std::size_t ty = target / grid.width();
  for (std::size_t y = 0; y < grid.height(); ++y) {
    const Distance dy = abs_diff(y, ty);
    Distance* row = field.dist.data() + y * grid.width();
    for (std::size_t x = 0; x < grid.width(); ++x) row[x] = dy + abs_diff(x, tx);
  }
  return field;
}

// BFS from the target along reversed edges yields distances *to* the target.
DistanceField graph_field(StateId target, const World& world) {
  const std::size_t n = world.state_count();
  std::vector<std::vector<StateId>> predecessors(n);
  for (StateId s = 0; s < n; ++s) {
    for (StateId t : world.successors(s)) {
      if (t != kUnavailable) predecessors[t].push_back(s);
    }
  }
  DistanceField field{target, std::vector<Distance>(n, kUnreachable)};
  std::deque<StateId> frontier{target};
  field.dist[target] = 0;
  while (!frontier.empty()) {
    const StateId u = frontier.front();
    frontier.pop_front();
    for (StateId p : predecessors[u]) {
      if (field.dist[p] == kUnreachable) {
        field.dist[p] = field.dist[u] + 1;
        frontier.push_back(p);
      }
    }
  }
  return field;
}

}  // namespace

Distance manhattan_distance(StateId s, StateId t, const GridWorld& world) {
  const std::size_t w = world.width();
  return abs_diff(s % w, t % w) + abs_diff(s / w, t / w);
}

DistanceField distance_field_to(StateId target, const World& world) {
  if (target >= world.state_count()) {
    throw std::out_of_range("distance target " + std::to_string(target) + " out of range");
  }
  if (const auto* grid = world.grid()) return grid_field(target, *grid);
  return graph_field(target, world);
}

Distance min_cycle_length(StateId s, const World& world, const DistanceField& to_s) {
  Distance best = kUnreachable;
  for (StateId t : world.successors(s)) {
    if (t == kUnavailable || to_s.dist[t] == kUnreachable) continue;
    best = std::min(best, to_s.dist[t] + 1);
  }
  return best;
}

Distance min_cycle_length(StateId s, const World& world) {
  if (world.is_grid()) return 2;
  return min_cycle_length(s, world, distance_field_to(s, world));
}

DiscountPowers::DiscountPowers(double gamma, Distance max_distance) : gamma_(gamma) {
  powers_.resize(static_cast<std::size_t>(max_distance) + 1);
  for (std::size_t d = 0; d < powers_.size(); ++d) {
    powers_[d] = std::pow(gamma, static_cast<double>(d));
  }
}

Distance distance_upper_bound(const World& world) {
  if (const auto* grid = world.grid()) {
    return static_cast<Distance>(grid->width() + grid->height() - 2);
  }
  return static_cast<Distance>(world.state_count() - 1);
}

DistanceCache::DistanceCache(const World& world, const std::vector<StateId>& targets)
    : world_(&world) {
  if (world.is_grid()) return;
  slot_.assign(world.state_count(), kNoSlot);
  for (StateId t : targets) {
    if (slot_.at(t) != kNoSlot) continue;
    slot_[t] = fields_.size();
    fields_.push_back(distance_field_to(t, world));
  }
}

Distance DistanceCache::distance(StateId from, StateId to) const {
  if (const auto* grid = world_->grid()) return manhattan_distance(from, to, *grid);
  return field_to(to).dist[from];
}

const DistanceField& DistanceCache::field_to(StateId target) const {
  if (world_->is_grid()) {
    throw std::logic_error("grid distances are computed, not cached");
  }
  if (target >= slot_.size() || slot_[target] == kNoSlot) {
    throw std::out_of_range("no cached distance field for state " + std::to_string(target));
  }
  return fields_[slot_[target]];
}

}  // namespace peakmdp

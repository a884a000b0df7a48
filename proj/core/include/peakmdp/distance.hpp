#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "peakmdp/mdp.hpp"

namespace peakmdp {

/// Number of actions between two states.
using Distance = std::uint32_t;
/// No action sequence connects the two states.
inline constexpr Distance kUnreachable = std::numeric_limits<Distance>::max();

/// dist[s] = minimum number of actions from s to `target`.
struct DistanceField {
  StateId target = 0;
  std::vector<Distance> dist;
};

Distance manhattan_distance(StateId s, StateId t, const GridWorld& world);

/// Distances from every state to `target`. Closed form on grids; breadth
/// first search over reversed transitions otherwise.
DistanceField distance_field_to(StateId target, const World& world);

/// Length of the shortest action sequence leaving s and returning to it,
/// or kUnreachable when s lies on no cycle. Always 2 on grid worlds.
Distance min_cycle_length(StateId s, const World& world);
Distance min_cycle_length(StateId s, const World& world, const DistanceField& to_s);

/// gamma^d for every finite distance up to `max_distance`; 0 for kUnreachable.
class DiscountPowers {
 public:
  DiscountPowers(double gamma, Distance max_distance);

  double operator()(Distance d) const noexcept {
    return d < powers_.size() ? powers_[d] : 0.0;
  }
  double gamma() const noexcept { return gamma_; }

 private:
  double gamma_;
  std::vector<double> powers_;
};

/// Largest finite distance any pair of states can have: width + height - 2
/// on grids, |S| - 1 on graphs.
Distance distance_upper_bound(const World& world);

/// Distance fields for a fixed set of targets, built up front so the cache
/// is read-only afterwards. Grid lookups bypass the table.
class DistanceCache {
 public:
  DistanceCache(const World& world, const std::vector<StateId>& targets);

  /// delta(from, to). `to` must be one of the cached targets unless the
  /// world is a grid.
  Distance distance(StateId from, StateId to) const;
  const DistanceField& field_to(StateId target) const;

 private:
  const World* world_;
  std::vector<std::size_t> slot_;  // target -> index into fields_, or npos
  std::vector<DistanceField> fields_;
};

}  // namespace peakmdp

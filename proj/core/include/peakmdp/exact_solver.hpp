#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "peakmdp/distance.hpp"
#include "peakmdp/mdp.hpp"

namespace peakmdp {

/// Enumerator order is the tie-break priority (higher wins).
enum class PeakKind : std::uint8_t { Delta = 0, Baseline = 1, Combined = 2 };

std::string_view to_string(PeakKind kind);

/// A candidate local maximum of the value function.
///
/// Baseline: one reward collected forever on its own minimum cycle,
///   value = r / (1 - gamma^phi).
/// Combined: a reward and a mutually adjacent rewarded neighbour collected
///   alternately on a two-step cycle, value = h_p + gamma * h_s with
///   h = r / (1 - gamma^2).
/// Delta: a reward collected once on top of the current value function,
///   value = r + v(anchor).
struct Peak {
  PeakKind kind = PeakKind::Baseline;
  StateId anchor = 0;
  std::optional<StateId> secondary;
  /// Height of the value function at the anchor.
  double value = 0.0;
  /// Ordering key. Equals `value` except for deltas, which rank at the
  /// larger of their height and the best neighbouring value.
  double rank = 0.0;
  /// Combined peaks only: h_p and h_s.
  double primary_height = 0.0;
  double secondary_height = 0.0;
  /// 1-based iteration in which the peak was selected; 0 while queued.
  std::size_t iteration = 0;

  bool affects(StateId reward_state) const noexcept {
    return reward_state == anchor || (secondary && *secondary == reward_state);
  }
  bool shares_reward_with(const Peak& other) const noexcept {
    return other.affects(anchor) || (secondary && other.affects(*secondary));
  }
  std::vector<StateId> affected_rewards() const;
};

/// Strict total order used for every selection: rank descending, then kind
/// (Combined > Baseline > Delta), then anchor ascending, then secondary.
bool outranks(const Peak& a, const Peak& b) noexcept;

/// Sorted list of pending Baseline and Combined peaks; the head is the best.
class PeakQueue {
 public:
  PeakQueue() = default;
  explicit PeakQueue(std::vector<Peak> peaks);

  void push(Peak peak);
  const Peak* head() const noexcept { return entries_.empty() ? nullptr : &entries_.front(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<Peak>& entries() const noexcept { return entries_; }

  template <class Pred>
  std::size_t remove_if(Pred pred) {
    const auto before = entries_.size();
    std::erase_if(entries_, pred);
    return before - entries_.size();
  }

 private:
  std::vector<Peak> entries_;
};

class UnsupportedScenario : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Read-only data shared by every step of one solve: distances to each
/// reward state, minimum cycle lengths and a gamma power table. Keeps a
/// reference to the scenario, which must outlive the context.
///
/// Throws InvalidScenario for a scenario that fails validation and
/// UnsupportedScenario for a transition graph with a one-way edge.
class PeakContext {
 public:
  explicit PeakContext(const Scenario& scenario);

  const Scenario& scenario() const noexcept { return *scenario_; }
  const World& world() const noexcept { return scenario_->world(); }
  double gamma() const noexcept { return powers_.gamma(); }

  /// delta(from, to); `to` must be a reward state on general graphs.
  Distance distance(StateId from, StateId to) const { return distances_.distance(from, to); }
  const DistanceCache& distances() const noexcept { return distances_; }
  double discount(Distance d) const noexcept { return powers_(d); }
  /// phi(s) for a reward state s.
  Distance min_cycle(StateId reward_state) const;

  /// Each state reaches the other in one action.
  bool mutual_neighbors(StateId a, StateId b) const noexcept;
  /// max over available actions of v[T(s, a)].
  double max_neighbor_value(std::span<const double> v, StateId s) const noexcept;

 private:
  const Scenario* scenario_;
  DistanceCache distances_;
  DiscountPowers powers_;
  std::vector<Distance> cycle_;  // indexed by state, set for reward states
};

/// Working data of one solve.
struct SolveState {
  ValueFunction v;
  PeakQueue queue;
  /// Reward states not yet covered by a processed peak, ascending.
  std::vector<StateId> remaining;
  /// Selected peaks in selection order.
  std::vector<Peak> processed;
};

struct SolveStats {
  std::size_t iterations = 0;
  /// Candidate peaks constructed: precomputed ones plus every delta.
  std::size_t candidate_evaluations = 0;
  /// Queue entries examined by pruning.
  std::size_t prune_checks = 0;
  std::size_t pruned = 0;
};

struct ExactResult {
  ValueFunction values;
  std::vector<Peak> processed;
  SolveStats stats;
};

Peak baseline_peak(const RewardSource& reward, const PeakContext& context);

/// Throws std::invalid_argument unless the two reward states are mutual
/// one-step neighbours.
Peak combined_peak(const RewardSource& primary, const RewardSource& secondary,
                   const PeakContext& context);

/// One Baseline per reward plus, for each reward with a rewarded mutual
/// neighbour, one Combined peak pairing it with the highest such neighbour.
PeakQueue precompute_peaks(const PeakContext& context);

/// Fresh state: zero value function, precomputed queue, all rewards remaining.
SolveState initial_state(const PeakContext& context);

/// One Delta per remaining reward, in ascending anchor order.
std::vector<Peak> compute_deltas(const SolveState& state, const PeakContext& context);

/// Drops queued peaks whose anchor already has a neighbour valued strictly
/// above the peak. Returns the number removed.
std::size_t prune_invalid_peaks(SolveState& state, const PeakContext& context);

/// Drops every queued peak sharing a reward with `selected` and retires the
/// selected peak's rewards from `remaining`.
void remove_affected_peaks(SolveState& state, const Peak& selected);

/// Value function generated by a single peak.
ValueFunction propagate(const Peak& peak, const PeakContext& context);
void propagate_into(const Peak& peak, const PeakContext& context, std::span<double> out);

/// Element-wise max. Throws std::invalid_argument on a length mismatch.
ValueFunction update_value_function(std::span<const double> v, std::span<const double> interim);

/// Optimal value function by iterated peak selection. Throws InvalidScenario,
/// UnsupportedScenario, or std::logic_error if an internal invariant breaks.
ExactResult exact_solve(const Scenario& scenario);
ExactResult exact_solve(const PeakContext& context);

}  // namespace peakmdp

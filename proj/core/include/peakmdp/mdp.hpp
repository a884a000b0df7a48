#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace peakmdp {

using StateId = std::size_t;
using ActionId = std::size_t;

/// Marks a (state, action) pair with no successor.
inline constexpr StateId kUnavailable = std::numeric_limits<StateId>::max();

/// Grid moves. The enumerator values are the action indices and also the
/// order used to break argmax ties. Up decreases y (row 0 is the top row).
enum class GridAction : ActionId { Up = 0, Down = 1, Left = 2, Right = 3 };
inline constexpr ActionId kGridActionCount = 4;

std::string_view to_string(GridAction action);

struct Cell {
  std::size_t x = 0;
  std::size_t y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Rectangular grid world with row-major state numbering (y * width + x).
/// Moves that would leave the grid are not available, so border cells have
/// two or three actions and no cell has a self-transition.
class GridWorld {
 public:
  /// Throws std::invalid_argument for a zero dimension or a 1x1 grid.
  GridWorld(std::size_t width, std::size_t height);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t state_count() const noexcept { return width_ * height_; }

  /// Throws std::out_of_range for coordinates outside the grid.
  StateId state_index(std::size_t x, std::size_t y) const;
  /// Inverse of state_index. Throws std::out_of_range.
  Cell cell(StateId s) const;

  /// Successor of s under a, or kUnavailable. s must be a valid state.
  StateId next(StateId s, ActionId a) const noexcept;

  friend bool operator==(const GridWorld&, const GridWorld&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
};

/// Explicit deterministic successor table over |S| x |A|.
class TransitionGraph {
 public:
  /// `next` is row-major: next[s * action_count + a]. Entries are either a
  /// valid state id or kUnavailable. Throws std::invalid_argument when the
  /// table has the wrong size, names an unknown state, or leaves a state
  /// with no available action.
  TransitionGraph(std::size_t state_count, std::size_t action_count, std::vector<StateId> next);

  std::size_t state_count() const noexcept { return state_count_; }
  std::size_t action_count() const noexcept { return action_count_; }
  StateId next(StateId s, ActionId a) const noexcept { return next_[s * action_count_ + a]; }
  std::span<const StateId> table() const noexcept { return next_; }

  /// Every state reaches every other state.
  bool strongly_connected() const { return !unreachable_pair().has_value(); }
  /// Some (from, to) pair with no path from `from` to `to`, if any exists.
  std::optional<std::pair<StateId, StateId>> unreachable_pair() const;
  /// Every edge s -> t has a reverse edge t -> s under some action.
  bool reversible() const;

  friend bool operator==(const TransitionGraph&, const TransitionGraph&) = default;

 private:
  std::size_t state_count_;
  std::size_t action_count_;
  std::vector<StateId> next_;
};

class InvalidAction : public std::invalid_argument {
 public:
  InvalidAction(StateId s, ActionId a);
};

/// Either a grid world or a general transition graph, plus a flattened
/// successor table shared by both solvers.
class World {
 public:
  World(GridWorld grid);            // NOLINT(google-explicit-constructor)
  World(TransitionGraph graph);     // NOLINT(google-explicit-constructor)

  bool is_grid() const noexcept { return std::holds_alternative<GridWorld>(impl_); }
  const GridWorld* grid() const noexcept { return std::get_if<GridWorld>(&impl_); }
  const TransitionGraph* graph() const noexcept { return std::get_if<TransitionGraph>(&impl_); }

  std::size_t state_count() const noexcept { return state_count_; }
  std::size_t action_count() const noexcept { return action_count_; }

  /// Successor under a, or kUnavailable.
  StateId next(StateId s, ActionId a) const noexcept { return successors_[s * action_count_ + a]; }
  /// All action slots of s, kUnavailable where the action is absent.
  std::span<const StateId> successors(StateId s) const noexcept {
    return {successors_.data() + s * action_count_, action_count_};
  }

  std::vector<ActionId> available_actions(StateId s) const;
  /// Throws InvalidAction when a is not available at s.
  StateId transition(StateId s, ActionId a) const;

  /// "up"/"down"/"left"/"right" on grids, the decimal index on graphs.
  std::string action_name(ActionId a) const;

  bool strongly_connected() const;
  bool reversible() const;

 private:
  void build_successors();

  std::variant<GridWorld, TransitionGraph> impl_;
  std::size_t state_count_ = 0;
  std::size_t action_count_ = 0;
  std::vector<StateId> successors_;
};

struct RewardSource {
  StateId state = 0;
  double value = 0.0;
  friend bool operator==(const RewardSource&, const RewardSource&) = default;
};

/// A full problem instance. Construction only stores the pieces; use
/// validate_scenario / require_valid to check the solver preconditions.
class Scenario {
 public:
  Scenario(World world, double gamma, std::vector<RewardSource> rewards);

  const World& world() const noexcept { return world_; }
  double gamma() const noexcept { return gamma_; }
  const std::vector<RewardSource>& rewards() const noexcept { return rewards_; }
  std::size_t state_count() const noexcept { return world_.state_count(); }

  /// Dense R(s). Out-of-range reward states are ignored here and reported
  /// by validate_scenario.
  std::span<const double> reward_table() const noexcept { return reward_table_; }
  double reward_at(StateId s) const noexcept { return reward_table_[s]; }

 private:
  World world_;
  double gamma_;
  std::vector<RewardSource> rewards_;
  std::vector<double> reward_table_;
};

using ValueFunction = std::vector<double>;
using Policy = std::vector<ActionId>;

class InvalidScenario : public std::runtime_error {
 public:
  explicit InvalidScenario(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  std::vector<std::string> errors_;
};

StateId state_index(std::size_t x, std::size_t y, const GridWorld& world);
std::vector<ActionId> available_actions(const World& world, StateId s);
StateId transition(const World& world, StateId s, ActionId a);

/// Returns every violated precondition; empty means valid.
std::vector<std::string> validate_scenario(const Scenario& scenario);
/// Throws InvalidScenario listing the violations.
void require_valid(const Scenario& scenario);

}  // namespace peakmdp

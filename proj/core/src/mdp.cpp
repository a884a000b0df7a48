#include "peakmdp/mdp.hpp"

#include <cmath>
#include <queue>
#include <sstream>
#include <unordered_set>

namespace peakmdp {

std::string_view to_string(GridAction action) {
  switch (action) {
    case GridAction::Up:
      return "up";
    case GridAction::Down:
      return "down";
    case GridAction::Left:
      return "left";
    case GridAction::Right:
      return "right";
  }
  return "?";
}

GridWorld::GridWorld(std::size_t width, std::size_t height) : width_(width), height_(height) {
  if (width == 0 || height == 0) {
    throw std::invalid_argument("grid dimensions must be positive");
  }
  if (width * height < 2) {
    throw std::invalid_argument("grid must have at least 2 cells (a 1x1 grid has no legal action)");
  }
}

StateId GridWorld::state_index(std::size_t x, std::size_t y) const {
  if (x >= width_ || y >= height_) {
    std::ostringstream msg;
    msg << "cell (" << x << "," << y << ") outside " << width_ << "x" << height_ << " grid";
    throw std::out_of_range(msg.str());
  }
  return y * width_ + x;
}

Cell GridWorld::cell(StateId s) const {
  if (s >= state_count()) {
    throw std::out_of_range("state " + std::to_string(s) + " outside grid");
  }
  return {s % width_, s / width_};
}

StateId GridWorld::next(StateId s, ActionId a) const noexcept {
  const std::size_t x = s % width_;
  const std::size_t y = s / width_;
  switch (static_cast<GridAction>(a)) {
    case GridAction::Up:
      return y > 0 ? s - width_ : kUnavailable;
    case GridAction::Down:
      return y + 1 < height_ ? s + width_ : kUnavailable;
    case GridAction::Left:
      return x > 0 ? s - 1 : kUnavailable;
    case GridAction::Right:
      return x + 1 < width_ ? s + 1 : kUnavailable;
  }
  return kUnavailable;
}

TransitionGraph::TransitionGraph(std::size_t state_count, std::size_t action_count,
                                 std::vector<StateId> next)
    : state_count_(state_count), action_count_(action_count), next_(std::move(next)) {
  if (state_count == 0 || action_count == 0) {
    throw std::invalid_argument("transition graph needs at least one state and one action");
  }
  if (next_.size() != state_count * action_count) {
    throw std::invalid_argument("transition table has " + std::to_string(next_.size()) +
                                " entries, expected " +
                                std::to_string(state_count * action_count));
  }
  for (StateId s = 0; s < state_count_; ++s) {
    bool any = false;
    for (ActionId a = 0; a < action_count_; ++a) {
      const StateId t = next_[s * action_count_ + a];
      if (t == kUnavailable) continue;
      if (t >= state_count_) {
        throw std::invalid_argument("transition from state " + std::to_string(s) +
                                    " names unknown state " + std::to_string(t));
      }
      any = true;
    }
    if (!any) {
      throw std::invalid_argument("state " + std::to_string(s) + " has no available action");
    }
  }
}

namespace {

std::vector<bool> reachable(std::size_t n, const std::vector<std::vector<StateId>>& adj,
                            StateId from) {
  std::vector<bool> seen(n, false);
  std::queue<StateId> frontier;
  seen[from] = true;
  frontier.push(from);
  while (!frontier.empty()) {
    const StateId u = frontier.front();
    frontier.pop();
    for (StateId v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        frontier.push(v);
      }
    }
  }
  return seen;
}

}  // namespace

std::optional<std::pair<StateId, StateId>> TransitionGraph::unreachable_pair() const {
  std::vector<std::vector<StateId>> forward(state_count_), backward(state_count_);
  for (StateId s = 0; s < state_count_; ++s) {
    for (ActionId a = 0; a < action_count_; ++a) {
      const StateId t = next(s, a);
      if (t == kUnavailable) continue;
      forward[s].push_back(t);
      backward[t].push_back(s);
    }
  }
  const auto out = reachable(state_count_, forward, 0);
  const auto in = reachable(state_count_, backward, 0);
  for (StateId s = 0; s < state_count_; ++s) {
    if (!out[s]) return std::pair{StateId{0}, s};
    if (!in[s]) return std::pair{s, StateId{0}};
  }
  return std::nullopt;
}

bool TransitionGraph::reversible() const {
  for (StateId s = 0; s < state_count_; ++s) {
    for (ActionId a = 0; a < action_count_; ++a) {
      const StateId t = next(s, a);
      if (t == kUnavailable || t == s) continue;
      bool back = false;
      for (ActionId b = 0; b < action_count_ && !back; ++b) back = next(t, b) == s;
      if (!back) return false;
    }
  }
  return true;
}

InvalidAction::InvalidAction(StateId s, ActionId a)
    : std::invalid_argument("action " + std::to_string(a) + " is not available at state " +
                            std::to_string(s)) {}

World::World(GridWorld grid) : impl_(std::move(grid)) { build_successors(); }

World::World(TransitionGraph graph) : impl_(std::move(graph)) { build_successors(); }

void World::build_successors() {
  if (const auto* g = grid()) {
    state_count_ = g->state_count();
    action_count_ = kGridActionCount;
    successors_.resize(state_count_ * action_count_);
    for (StateId s = 0; s < state_count_; ++s) {
      for (ActionId a = 0; a < action_count_; ++a) successors_[s * action_count_ + a] = g->next(s, a);
    }
  } else {
    const auto& t = *graph();
    state_count_ = t.state_count();
    action_count_ = t.action_count();
    successors_.assign(t.table().begin(), t.table().end());
  }
}

std::vector<ActionId> World::available_actions(StateId s) const {
  std::vector<ActionId> out;
  for (ActionId a = 0; a < action_count_; ++a) {
    if (next(s, a) != kUnavailable) out.push_back(a);
  }
  return out;
}

StateId World::transition(StateId s, ActionId a) const {
  if (s >= state_count_ || a >= action_count_ || next(s, a) == kUnavailable) {
    throw InvalidAction(s, a);
  }
  return next(s, a);
}

std::string World::action_name(ActionId a) const {
  if (is_grid() && a < kGridActionCount) return std::string(to_string(static_cast<GridAction>(a)));
  return std::to_string(a);
}

bool World::strongly_connected() const {
  // Every cell of a grid with at least two cells reaches every other.
  return is_grid() || graph()->strongly_connected();
}

bool World::reversible() const { return is_grid() || graph()->reversible(); }

Scenario::Scenario(World world, double gamma, std::vector<RewardSource> rewards)
    : world_(std::move(world)), gamma_(gamma), rewards_(std::move(rewards)) {
  reward_table_.assign(world_.state_count(), 0.0);
  for (const auto& r : rewards_) {
    if (r.state < reward_table_.size()) reward_table_[r.state] = r.value;
  }
}

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += "; ";
    out += item;
  }
  return out;
}

}  // namespace

InvalidScenario::InvalidScenario(std::vector<std::string> errors)
    : std::runtime_error("invalid scenario: " + join(errors)), errors_(std::move(errors)) {}

StateId state_index(std::size_t x, std::size_t y, const GridWorld& world) {
  return world.state_index(x, y);
}

std::vector<ActionId> available_actions(const World& world, StateId s) {
  return world.available_actions(s);
}

StateId transition(const World& world, StateId s, ActionId a) { return world.transition(s, a); }

std::vector<std::string> validate_scenario(const Scenario& scenario) {
  std::vector<std::string> errors;
  const double gamma = scenario.gamma();
  if (!(gamma > 0.0 && gamma < 1.0)) errors.emplace_back("gamma must lie in (0,1)");

  if (scenario.rewards().empty()) errors.emplace_back("at least one reward source is required");

  std::unordered_set<StateId> seen;
  for (const auto& r : scenario.rewards()) {
    if (r.state >= scenario.state_count()) {
      errors.push_back("reward state " + std::to_string(r.state) + " is out of range");
      continue;
    }
    if (!seen.insert(r.state).second) {
      errors.push_back("duplicate reward state " + std::to_string(r.state));
    }
    if (!(r.value > 0.0) || !std::isfinite(r.value)) {
      errors.push_back("reward at state " + std::to_string(r.state) +
                       " must be positive and finite");
    }
  }

  if (const auto* graph = scenario.world().graph()) {
    if (const auto pair = graph->unreachable_pair()) {
      errors.push_back("state " + std::to_string(pair->second) + " is unreachable from state " +
                       std::to_string(pair->first) + " (world is not fully connected)");
    }
  }
  return errors;
}

void require_valid(const Scenario& scenario) {
  auto errors = validate_scenario(scenario);
  if (!errors.empty()) throw InvalidScenario(std::move(errors));
}

}  // namespace peakmdp

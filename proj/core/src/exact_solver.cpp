#include "peakmdp/exact_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace peakmdp {

std::string_view to_string(PeakKind kind) {
  switch (kind) {
    case PeakKind::Delta:
      return "delta";
    case PeakKind::Baseline:
      return "baseline";
    case PeakKind::Combined:
      return "combined";
  }
  return "?";
}

std::vector<StateId> Peak::affected_rewards() const {
  if (secondary) return {anchor, *secondary};
  return {anchor};
}

bool outranks(const Peak& a, const Peak& b) noexcept {
  if (a.rank != b.rank) return a.rank > b.rank;
  if (a.kind != b.kind) return a.kind > b.kind;
  if (a.anchor != b.anchor) return a.anchor < b.anchor;
  return a.secondary.value_or(kUnavailable) < b.secondary.value_or(kUnavailable);
}

PeakQueue::PeakQueue(std::vector<Peak> peaks) : entries_(std::move(peaks)) {
  std::sort(entries_.begin(), entries_.end(), outranks);
}

void PeakQueue::push(Peak peak) {
  const auto at = std::upper_bound(entries_.begin(), entries_.end(), peak, outranks);
  entries_.insert(at, std::move(peak));
}

namespace {

std::vector<StateId> reward_states(const Scenario& scenario) {
  std::vector<StateId> out;
  out.reserve(scenario.rewards().size());
  for (const auto& r : scenario.rewards()) out.push_back(r.state);
  std::sort(out.begin(), out.end());
  return out;
}

const Scenario& checked(const Scenario& scenario) {
  require_valid(scenario);
  if (!scenario.world().reversible()) {
    throw UnsupportedScenario(
        "exact solver needs a reversible transition graph (every edge s->t paired with t->s)");
  }
  return scenario;
}

}  // namespace

PeakContext::PeakContext(const Scenario& scenario)
    : scenario_(&checked(scenario)),
      distances_(scenario.world(), reward_states(scenario)),
      powers_(scenario.gamma(), distance_upper_bound(scenario.world())) {
  cycle_.assign(scenario.state_count(), kUnreachable);
  for (const auto& r : scenario.rewards()) {
    cycle_[r.state] = world().is_grid()
                          ? 2
                          : min_cycle_length(r.state, world(), distances_.field_to(r.state));
  }
}

Distance PeakContext::min_cycle(StateId reward_state) const { return cycle_.at(reward_state); }

bool PeakContext::mutual_neighbors(StateId a, StateId b) const noexcept {
  if (a == b) return false;
  const auto out = world().successors(a);
  const auto back = world().successors(b);
  return std::find(out.begin(), out.end(), b) != out.end() &&
         std::find(back.begin(), back.end(), a) != back.end();
}

double PeakContext::max_neighbor_value(std::span<const double> v, StateId s) const noexcept {
  double best = -std::numeric_limits<double>::infinity();
  for (StateId t : world().successors(s)) {
    if (t != kUnavailable) best = std::max(best, v[t]);
  }
  return best;
}

Peak baseline_peak(const RewardSource& reward, const PeakContext& context) {
  const double height = reward.value / (1.0 - context.discount(context.min_cycle(reward.state)));
  Peak peak;
  peak.kind = PeakKind::Baseline;
  peak.anchor = reward.state;
  peak.value = height;
  peak.rank = height;
  return peak;
}

Peak combined_peak(const RewardSource& primary, const RewardSource& secondary,
                   const PeakContext& context) {
  if (!context.mutual_neighbors(primary.state, secondary.state)) {
    throw std::invalid_argument("combined peak needs mutually adjacent reward states, got " +
                                std::to_string(primary.state) + " and " +
                                std::to_string(secondary.state));
  }
  const double gamma = context.gamma();
  const double two_cycle = 1.0 - gamma * gamma;
  Peak peak;
  peak.kind = PeakKind::Combined;
  peak.anchor = primary.state;
  peak.secondary = secondary.state;
  peak.primary_height = primary.value / two_cycle;
  peak.secondary_height = secondary.value / two_cycle;
  peak.value = peak.primary_height + gamma * peak.secondary_height;
  peak.rank = peak.value;
  return peak;
}

PeakQueue precompute_peaks(const PeakContext& context) {
  const Scenario& scenario = context.scenario();
  std::vector<Peak> peaks;
  peaks.reserve(scenario.rewards().size() * 2);
  for (const auto& r : scenario.rewards()) peaks.push_back(baseline_peak(r, context));

  for (const auto& r : scenario.rewards()) {
    std::optional<RewardSource> best;
    for (StateId t : context.world().successors(r.state)) {
      if (t == kUnavailable || scenario.reward_at(t) <= 0.0) continue;
      if (!context.mutual_neighbors(r.state, t)) continue;
      const double value = scenario.reward_at(t);
      if (!best || value > best->value || (value == best->value && t < best->state)) {
        best = RewardSource{t, value};
      }
    }
    if (best) peaks.push_back(combined_peak(r, *best, context));
  }
  return PeakQueue(std::move(peaks));
}

SolveState initial_state(const PeakContext& context) {
  SolveState state;
  state.v.assign(context.scenario().state_count(), 0.0);
  state.queue = precompute_peaks(context);
  state.remaining = reward_states(context.scenario());
  return state;
}

std::vector<Peak> compute_deltas(const SolveState& state, const PeakContext& context) {
  const Scenario& scenario = context.scenario();
  std::vector<Peak> deltas;
  deltas.reserve(state.remaining.size());
  for (StateId s : state.remaining) {
    Peak peak;
    peak.kind = PeakKind::Delta;
    peak.anchor = s;
    peak.value = scenario.reward_at(s) + state.v[s];
    // A reward whose neighbour already sits higher is not a local maximum;
    // it ranks with that neighbour so it is collected before anything lower.
    peak.rank = std::max(peak.value, context.max_neighbor_value(state.v, s));
    deltas.push_back(peak);
  }
  return deltas;
}

std::size_t prune_invalid_peaks(SolveState& state, const PeakContext& context) {
  return state.queue.remove_if([&](const Peak& peak) {
    return context.max_neighbor_value(state.v, peak.anchor) > peak.value;
  });
}

void remove_affected_peaks(SolveState& state, const Peak& selected) {
  state.queue.remove_if([&](const Peak& peak) { return peak.shares_reward_with(selected); });
  std::erase_if(state.remaining, [&](StateId s) { return selected.affects(s); });
}

namespace {

// Calls f(state, distance to target) for every state.
template <class F>
void for_each_distance_to(const PeakContext& context, StateId target, F&& f) {
  if (const auto* grid = context.world().grid()) {
    const std::size_t w = grid->width();
    const std::size_t tx = target % w;
    const std::size_t ty = target / w;
    StateId s = 0;
    for (std::size_t y = 0; y < grid->height(); ++y) {
      const std::size_t dy = y > ty ? y - ty : ty - y;
      for (std::size_t x = 0; x < w; ++x, ++s) {
        const std::size_t dx = x > tx ? x - tx : tx - x;
        f(s, static_cast<Distance>(dx + dy));
      }
    }
    return;
  }
  const auto& field = context.distances().field_to(target);
  for (StateId s = 0; s < field.dist.size(); ++s) f(s, field.dist[s]);
}

}  // namespace

void propagate_into(const Peak& peak, const PeakContext& context, std::span<double> out) {
  if (out.size() != context.scenario().state_count()) {
    throw std::invalid_argument("propagation buffer length does not match state count");
  }
  if (peak.kind != PeakKind::Combined) {
    for_each_distance_to(context, peak.anchor, [&](StateId s, Distance d) {
      out[s] = context.discount(d) * peak.value;
    });
    return;
  }

  // Sum of the two decaying baselines. Where the two anchors are equally far
  // (impossible on bipartite worlds such as grids) the sum would overcount,
  // so take the better of entering the cycle at either end instead.
  const StateId secondary = *peak.secondary;
  const double gamma = context.gamma();
  const double enter_primary = peak.primary_height + gamma * peak.secondary_height;
  const double enter_secondary = peak.secondary_height + gamma * peak.primary_height;
  for_each_distance_to(context, peak.anchor, [&](StateId s, Distance dp) {
    const Distance ds = context.distance(s, secondary);
    if (dp + 1 == ds || ds + 1 == dp) {
      out[s] = context.discount(dp) * peak.primary_height +
               context.discount(ds) * peak.secondary_height;
    } else {
      out[s] = std::max(context.discount(dp) * enter_primary,
                        context.discount(ds) * enter_secondary);
    }
  });
}

ValueFunction propagate(const Peak& peak, const PeakContext& context) {
  ValueFunction out(context.scenario().state_count(), 0.0);
  propagate_into(peak, context, out);
  return out;
}

ValueFunction update_value_function(std::span<const double> v, std::span<const double> interim) {
  if (v.size() != interim.size()) {
    throw std::invalid_argument("value functions differ in length (" + std::to_string(v.size()) +
                                " vs " + std::to_string(interim.size()) + ")");
  }
  ValueFunction out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i], interim[i]);
  return out;
}

ExactResult exact_solve(const PeakContext& context) {
  SolveState state = initial_state(context);
  SolveStats stats;
  stats.candidate_evaluations = state.queue.size();
  ValueFunction interim(state.v.size());

  while (!state.remaining.empty()) {
    const std::size_t iteration = stats.iterations + 1;
    if (iteration > context.scenario().rewards().size()) {
      throw std::logic_error("exact solver exceeded one iteration per reward");
    }

    const auto deltas = compute_deltas(state, context);
    stats.candidate_evaluations += deltas.size();
    stats.prune_checks += state.queue.size();
    stats.pruned += prune_invalid_peaks(state, context);

    const Peak* best = state.queue.head();
    for (const auto& d : deltas) {
      if (best == nullptr || outranks(d, *best)) best = &d;
    }
    if (best == nullptr) {
      std::ostringstream msg;
      msg << "no candidate peak with " << state.remaining.size()
          << " reward(s) remaining at iteration " << iteration;
      throw std::logic_error(msg.str());
    }

    Peak selected = *best;
    selected.iteration = iteration;
    remove_affected_peaks(state, selected);

    propagate_into(selected, context, interim);
    for (std::size_t s = 0; s < state.v.size(); ++s) state.v[s] = std::max(state.v[s], interim[s]);

    state.processed.push_back(selected);
    stats.iterations = iteration;
  }
  return {std::move(state.v), std::move(state.processed), stats};
}

ExactResult exact_solve(const Scenario& scenario) { return exact_solve(PeakContext(scenario)); }

}  // namespace peakmdp

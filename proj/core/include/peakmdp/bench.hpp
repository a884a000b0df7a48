#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "peakmdp/mdp.hpp"
#include "peakmdp/value_iteration.hpp"

namespace peakmdp {

enum class SolverId { Exact, ValueIteration };

std::string_view to_string(SolverId solver);
/// Accepts "exact", "value_iteration" and "vi".
SolverId parse_solver_id(std::string_view name);

/// One timed solve.
struct BenchmarkRecord {
  SolverId solver = SolverId::Exact;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t reward_count = 0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  /// Fastest of the repetitions, seconds.
  double wall_time_s = 0.0;
  /// VI sweeps, or processed peaks for the exact solver.
  std::size_t iterations_or_peaks = 0;
  /// Sum of the value function.
  double checksum = 0.0;

  friend bool operator==(const BenchmarkRecord&, const BenchmarkRecord&) = default;
};

struct TimingOptions {
  std::size_t repetitions = 3;
  ViConfig vi{1e-6, 1'000'000, false};
};

/// Calls `run` `repetitions` times and returns the fastest wall time in seconds.
double min_wall_time(std::size_t repetitions, const std::function<void()>& run);

/// Runs the solver `repetitions` times on the calling thread and keeps the
/// minimum wall time. Grid dimensions are 0 for graph scenarios. Solver
/// exceptions propagate with the seed prepended to the message.
BenchmarkRecord time_solver(SolverId solver, const Scenario& scenario, std::uint64_t seed,
                            const TimingOptions& options = {});

/// Largest checksum difference the two solvers may show on one scenario.
double checksum_tolerance(const Scenario& scenario, double epsilon);

enum class SweepVariable { Rewards, States, Discount };

std::string_view to_string(SweepVariable variable);
SweepVariable parse_sweep_variable(std::string_view name);

struct SweepPoint {
  std::size_t width = 50;
  std::size_t height = 50;
  std::size_t reward_count = 5;
  double gamma = 0.9;
  friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

struct SweepSpec {
  SweepVariable variable = SweepVariable::Rewards;
  std::vector<SweepPoint> points;
  std::size_t trials = 50;
  std::uint64_t base_seed = 1;
  double value_lo = 1.0;
  double value_hi = 10.0;
  TimingOptions timing;
};

/// Sweep over one variable with the others fixed at `base`.
SweepSpec make_sweep(SweepVariable variable, const SweepPoint& base,
                     const std::vector<double>& values);
/// States sweep from explicit grid sizes.
SweepSpec make_states_sweep(const SweepPoint& base,
                            const std::vector<std::pair<std::size_t, std::size_t>>& sizes);

std::vector<std::string> sweep_violations(const SweepSpec& spec);

/// Seed of trial t at every point; the same layout seed is reused across
/// points so a discount sweep compares identical reward layouts.
std::uint64_t trial_seed(const SweepSpec& spec, std::size_t trial);

struct SweepFailure {
  enum class Kind { SolverError, ChecksumMismatch };
  Kind kind = Kind::SolverError;
  std::size_t point = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct SweepResult {
  /// Point-major, then trial, then exact before value iteration.
  std::vector<BenchmarkRecord> records;
  std::vector<SweepFailure> failures;
};

/// Throws std::invalid_argument for an invalid spec. Per-scenario failures
/// (solver errors, checksum disagreement) are collected and the sweep continues.
SweepResult run_sweep(const SweepSpec& spec);

enum class ResultFormat { Csv, Json };
ResultFormat parse_result_format(std::string_view name);

/// Header `solver,width,height,rewards,gamma,seed,wall_time_s,iters,checksum`,
/// LF line endings, shortest round-trip decimal formatting.
/// Throws std::invalid_argument("no records") for an empty list.
void emit_results(const std::vector<BenchmarkRecord>& records, ResultFormat format,
                  std::ostream& out);
/// Throws std::runtime_error naming the path on I/O failure.
void emit_results(const std::vector<BenchmarkRecord>& records, ResultFormat format,
                  const std::filesystem::path& destination);

std::vector<BenchmarkRecord> parse_results_csv(std::string_view text);
std::vector<BenchmarkRecord> parse_results_json(std::string_view text);

/// Wall-time statistics for one (solver, point) group.
struct TimingSummary {
  SolverId solver = SolverId::Exact;
  SweepPoint point;
  std::size_t samples = 0;
  double mean_s = 0.0;
  double stddev_s = 0.0;
  double min_s = 0.0;
  double median_s = 0.0;
};

/// Groups in first-appearance order. Standard deviation is the population one.
std::vector<TimingSummary> summarize(const std::vector<BenchmarkRecord>& records);
void print_summary(const std::vector<TimingSummary>& summary, std::ostream& out);

/// SweepSpec JSON:
///   {"variable": "rewards"|"states"|"discount", "values": [...],
///    "grid": {"width": W, "height": H}, "rewards": K, "gamma": G,
///    "trials": T, "seed": S, "repetitions": N, "epsilon": E,
///    "values_range": [lo, hi]}
/// States values are "WxH" strings or [W, H] pairs.
SweepSpec parse_sweep_spec(std::string_view json_text);

}  // namespace peakmdp

#include "peakmdp/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "peakmdp/exact_solver.hpp"
#include "peakmdp/scenario_gen.hpp"

namespace peakmdp {

using nlohmann::json;

std::string_view to_string(SolverId solver) {
  return solver == SolverId::Exact ? "exact" : "value_iteration";
}

SolverId parse_solver_id(std::string_view name) {
  if (name == "exact") return SolverId::Exact;
  if (name == "value_iteration" || name == "vi") return SolverId::ValueIteration;
  throw std::invalid_argument("unknown solver \"" + std::string(name) + "\"");
}

std::string_view to_string(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::Rewards:
      return "rewards";
    case SweepVariable::States:
      return "states";
    case SweepVariable::Discount:
      return "discount";
  }
  return "?";
}

SweepVariable parse_sweep_variable(std::string_view name) {
  if (name == "rewards") return SweepVariable::Rewards;
  if (name == "states") return SweepVariable::States;
  if (name == "discount") return SweepVariable::Discount;
  throw std::invalid_argument("unknown sweep variable \"" + std::string(name) + "\"");
}

ResultFormat parse_result_format(std::string_view name) {
  if (name == "csv") return ResultFormat::Csv;
  if (name == "json") return ResultFormat::Json;
  throw std::invalid_argument("unknown result format \"" + std::string(name) + "\"");
}

namespace {

using Clock = std::chrono::steady_clock;

double checksum_of(const ValueFunction& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

double min_wall_time(std::size_t repetitions, const std::function<void()>& run) {
  if (repetitions == 0) throw std::invalid_argument("repetitions must be positive");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    const auto start = Clock::now();
    run();
    const std::chrono::duration<double> elapsed = Clock::now() - start;
    best = std::min(best, elapsed.count());
  }
  return best;
}

BenchmarkRecord time_solver(SolverId solver, const Scenario& scenario, std::uint64_t seed,
                            const TimingOptions& options) {
  if (options.repetitions == 0) throw std::invalid_argument("repetitions must be positive");
  BenchmarkRecord record;
  record.solver = solver;
  if (const auto* grid = scenario.world().grid()) {
    record.width = grid->width();
    record.height = grid->height();
  }
  record.reward_count = scenario.rewards().size();
  record.gamma = scenario.gamma();
  record.seed = seed;

  ValueFunction values;
  try {
    record.wall_time_s = min_wall_time(options.repetitions, [&] {
      if (solver == SolverId::Exact) {
        auto result = exact_solve(scenario);
        record.iterations_or_peaks = result.processed.size();
        values = std::move(result.values);
      } else {
        auto result = value_iteration(scenario, options.vi);
        record.iterations_or_peaks = result.iterations;
        values = std::move(result.values);
      }
    });
  } catch (const std::exception& e) {
    throw std::runtime_error("seed " + std::to_string(seed) + ": " + std::string(to_string(solver)) +
                             " failed: " + e.what());
  }
  record.checksum = checksum_of(values);
  // A coarse clock can report zero for a tiny solve.
  record.wall_time_s = std::max(record.wall_time_s, 1e-9);
  return record;
}

double checksum_tolerance(const Scenario& scenario, double epsilon) {
  return vi_error_bound(epsilon, scenario.gamma()) * static_cast<double>(scenario.state_count());
}

SweepSpec make_sweep(SweepVariable variable, const SweepPoint& base,
                     const std::vector<double>& values) {
  SweepSpec spec;
  spec.variable = variable;
  for (double value : values) {
    SweepPoint p = base;
    switch (variable) {
      case SweepVariable::Rewards:
        p.reward_count = static_cast<std::size_t>(value);
        break;
      case SweepVariable::States:
        p.width = p.height = static_cast<std::size_t>(value);
        break;
      case SweepVariable::Discount:
        p.gamma = value;
        break;
    }
    spec.points.push_back(p);
  }
  return spec;
}

SweepSpec make_states_sweep(const SweepPoint& base,
                            const std::vector<std::pair<std::size_t, std::size_t>>& sizes) {
  SweepSpec spec;
  spec.variable = SweepVariable::States;
  for (const auto& [w, h] : sizes) {
    SweepPoint p = base;
    p.width = w;
    p.height = h;
    spec.points.push_back(p);
  }
  return spec;
}

std::vector<std::string> sweep_violations(const SweepSpec& spec) {
  std::vector<std::string> errors;
  if (spec.points.size() < 2) errors.emplace_back("a sweep needs at least 2 points");
  if (spec.trials == 0) errors.emplace_back("trials per point must be positive");
  if (spec.timing.repetitions == 0) errors.emplace_back("repetitions must be positive");
  if (!(spec.timing.vi.epsilon > 0.0)) errors.emplace_back("epsilon must be positive");
  for (std::size_t i = 0; i < spec.points.size(); ++i) {
    const auto& p = spec.points[i];
    GenSpec gen{p.width, p.height, p.reward_count, spec.value_lo, spec.value_hi, p.gamma, 0};
    for (const auto& e : genspec_violations(gen)) {
      errors.push_back("point " + std::to_string(i) + ": " + e);
    }
  }
  return errors;
}

std::uint64_t trial_seed(const SweepSpec& spec, std::size_t trial) {
  return spec.base_seed + static_cast<std::uint64_t>(trial);
}

SweepResult run_sweep(const SweepSpec& spec) {
  if (const auto errors = sweep_violations(spec); !errors.empty()) {
    std::string msg = "invalid sweep spec:";
    for (const auto& e : errors) msg += " " + e + ";";
    throw std::invalid_argument(msg);
  }
  SweepResult result;
  result.records.reserve(spec.points.size() * spec.trials * 2);
  for (std::size_t pi = 0; pi < spec.points.size(); ++pi) {
    const SweepPoint& p = spec.points[pi];
    for (std::size_t t = 0; t < spec.trials; ++t) {
      const std::uint64_t seed = trial_seed(spec, t);
      const Scenario scenario = random_scenario(
          {p.width, p.height, p.reward_count, spec.value_lo, spec.value_hi, p.gamma, seed});
      std::optional<BenchmarkRecord> exact;
      std::optional<BenchmarkRecord> vi;
      try {
        exact = time_solver(SolverId::Exact, scenario, seed, spec.timing);
        result.records.push_back(*exact);
      } catch (const std::exception& e) {
        result.failures.push_back({SweepFailure::Kind::SolverError, pi, seed, e.what()});
      }
      try {
        vi = time_solver(SolverId::ValueIteration, scenario, seed, spec.timing);
        result.records.push_back(*vi);
      } catch (const std::exception& e) {
        result.failures.push_back({SweepFailure::Kind::SolverError, pi, seed, e.what()});
      }
      if (exact && vi) {
        const double diff = std::abs(exact->checksum - vi->checksum);
        const double tol = checksum_tolerance(scenario, spec.timing.vi.epsilon);
        if (!(diff <= tol)) {
          std::ostringstream msg;
          msg << "seed " << seed << ": checksum mismatch exact=" << exact->checksum
              << " vi=" << vi->checksum << " (|diff|=" << diff << " > " << tol << ")";
          result.failures.push_back({SweepFailure::Kind::ChecksumMismatch, pi, seed, msg.str()});
        }
      }
    }
  }
  return result;
}

namespace {

constexpr std::string_view kCsvHeader =
    "solver,width,height,rewards,gamma,seed,wall_time_s,iters,checksum";

std::string format_real(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("cannot format number");
  return std::string(buf, end);
}

template <class T>
T parse_field(std::string_view text, std::size_t line, const char* name) {
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw std::invalid_argument("line " + std::to_string(line) + ": bad " + name + " \"" +
                                std::string(text) + "\"");
  }
  return value;
}

json record_to_json(const BenchmarkRecord& r) {
  return {{"solver", to_string(r.solver)}, {"width", r.width},
          {"height", r.height},            {"rewards", r.reward_count},
          {"gamma", r.gamma},              {"seed", r.seed},
          {"wall_time_s", r.wall_time_s},  {"iters", r.iterations_or_peaks},
          {"checksum", r.checksum}};
}

}  // namespace

void emit_results(const std::vector<BenchmarkRecord>& records, ResultFormat format,
                  std::ostream& out) {
  if (records.empty()) throw std::invalid_argument("no records");
  if (format == ResultFormat::Json) {
    json doc = json::array();
    for (const auto& r : records) doc.push_back(record_to_json(r));
    out << doc.dump(2) << '\n';
    return;
  }
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << to_string(r.solver) << ',' << r.width << ',' << r.height << ',' << r.reward_count << ','
        << format_real(r.gamma) << ',' << r.seed << ',' << format_real(r.wall_time_s) << ','
        << r.iterations_or_peaks << ',' << format_real(r.checksum) << '\n';
  }
}

void emit_results(const std::vector<BenchmarkRecord>& records, ResultFormat format,
                  const std::filesystem::path& destination) {
  if (records.empty()) throw std::invalid_argument("no records");
  std::ofstream out(destination, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + destination.string() + " for writing");
  emit_results(records, format, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + destination.string());
}

std::vector<BenchmarkRecord> parse_results_csv(std::string_view text) {
  std::vector<BenchmarkRecord> records;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line_no == 1) {
      if (line != kCsvHeader) throw std::invalid_argument("unexpected CSV header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::size_t from = 0;
    for (;;) {
      const auto comma = line.find(',', from);
      f.push_back(line.substr(from, comma - from));
      if (comma == std::string_view::npos) break;
      from = comma + 1;
    }
    if (f.size() != 9) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 9 fields");
    }
    BenchmarkRecord r;
    r.solver = parse_solver_id(f[0]);
    r.width = parse_field<std::size_t>(f[1], line_no, "width");
    r.height = parse_field<std::size_t>(f[2], line_no, "height");
    r.reward_count = parse_field<std::size_t>(f[3], line_no, "rewards");
    r.gamma = parse_field<double>(f[4], line_no, "gamma");
    r.seed = parse_field<std::uint64_t>(f[5], line_no, "seed");
    r.wall_time_s = parse_field<double>(f[6], line_no, "wall_time_s");
    r.iterations_or_peaks = parse_field<std::size_t>(f[7], line_no, "iters");
    r.checksum = parse_field<double>(f[8], line_no, "checksum");
    records.push_back(r);
  }
  return records;
}

std::vector<BenchmarkRecord> parse_results_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_array()) throw std::invalid_argument("results JSON must be an array");
  std::vector<BenchmarkRecord> records;
  for (const auto& item : doc) {
    BenchmarkRecord r;
    r.solver = parse_solver_id(item.at("solver").get<std::string>());
    r.width = item.at("width").get<std::size_t>();
    r.height = item.at("height").get<std::size_t>();
    r.reward_count = item.at("rewards").get<std::size_t>();
    r.gamma = item.at("gamma").get<double>();
    r.seed = item.at("seed").get<std::uint64_t>();
    r.wall_time_s = item.at("wall_time_s").get<double>();
    r.iterations_or_peaks = item.at("iters").get<std::size_t>();
    r.checksum = item.at("checksum").get<double>();
    records.push_back(r);
  }
  return records;
}

std::vector<TimingSummary> summarize(const std::vector<BenchmarkRecord>& records) {
  std::vector<TimingSummary> out;
  std::vector<std::vector<double>> samples;
  for (const auto& r : records) {
    const SweepPoint p{r.width, r.height, r.reward_count, r.gamma};
    auto it = std::find_if(out.begin(), out.end(), [&](const TimingSummary& s) {
      return s.solver == r.solver && s.point == p;
    });
    if (it == out.end()) {
      out.push_back({r.solver, p, 0, 0, 0, 0, 0});
      samples.emplace_back();
      it = out.end() - 1;
    }
    samples[static_cast<std::size_t>(it - out.begin())].push_back(r.wall_time_s);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& xs = samples[i];
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    out[i].samples = xs.size();
    out[i].mean_s = mean;
    out[i].stddev_s = std::sqrt(var / n);
    out[i].min_s = xs.front();
    out[i].median_s = xs.size() % 2 == 1 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
  }
  return out;
}

void print_summary(const std::vector<TimingSummary>& summary, std::ostream& out) {
  out << std::left << std::setw(16) << "solver" << std::right << std::setw(10) << "grid"
      << std::setw(9) << "rewards" << std::setw(8) << "gamma" << std::setw(7) << "n"
      << std::setw(14) << "mean_s" << std::setw(14) << "std_s" << std::setw(14) << "min_s" << '\n';
  for (const auto& s : summary) {
    const std::string grid = std::to_string(s.point.width) + "x" + std::to_string(s.point.height);
    out << std::left << std::setw(16) << to_string(s.solver) << std::right << std::setw(10) << grid
        << std::setw(9) << s.point.reward_count << std::setw(8) << s.point.gamma << std::setw(7)
        << s.samples << std::scientific << std::setprecision(4) << std::setw(14) << s.mean_s
        << std::setw(14) << s.stddev_s << std::setw(14) << s.min_s << std::defaultfloat
        << std::setprecision(6) << '\n';
  }
}

namespace {

std::pair<std::size_t, std::size_t> parse_size(const json& v) {
  if (v.is_array() && v.size() == 2) return {v[0].get<std::size_t>(), v[1].get<std::size_t>()};
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const auto x = s.find('x');
    if (x != std::string::npos) {
      return {parse_field<std::size_t>(std::string_view(s).substr(0, x), 0, "width"),
              parse_field<std::size_t>(std::string_view(s).substr(x + 1), 0, "height")};
    }
  }
  throw std::invalid_argument("states sweep values must be \"WxH\" or [W, H]");
}

}  // namespace

SweepSpec parse_sweep_spec(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
  try {
    SweepPoint base;
    if (doc.contains("grid")) {
      base.width = doc.at("grid").at("width").get<std::size_t>();
      base.height = doc.at("grid").at("height").get<std::size_t>();
    }
    if (doc.contains("rewards")) base.reward_count = doc.at("rewards").get<std::size_t>();
    if (doc.contains("gamma")) base.gamma = doc.at("gamma").get<double>();

    const SweepVariable variable = parse_sweep_variable(doc.at("variable").get<std::string>());
    SweepSpec spec;
    if (variable == SweepVariable::States) {
      std::vector<std::pair<std::size_t, std::size_t>> sizes;
      for (const auto& v : doc.at("values")) sizes.push_back(parse_size(v));
      spec = make_states_sweep(base, sizes);
    } else {
      spec = make_sweep(variable, base, doc.at("values").get<std::vector<double>>());
    }
    if (doc.contains("trials")) spec.trials = doc.at("trials").get<std::size_t>();
    if (doc.contains("seed")) spec.base_seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("repetitions")) spec.timing.repetitions = doc.at("repetitions").get<std::size_t>();
    if (doc.contains("epsilon")) spec.timing.vi.epsilon = doc.at("epsilon").get<double>();
    if (doc.contains("values_range")) {
      spec.value_lo = doc.at("values_range").at(0).get<double>();
      spec.value_hi = doc.at("values_range").at(1).get<double>();
    }
    return spec;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad sweep spec: ") + e.what());
  }
}

}  // namespace peakmdp

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "peakmdp/bench.hpp"
#include "peakmdp/scenario_gen.hpp"
#include "peakmdp/scenario_io.hpp"
#include "peakmdp/value_iteration.hpp"

namespace peakmdp::cli {
namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class T>
T number(std::string_view text, const std::string& what) {
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
    throw UsageError("bad " + what + " \"" + std::string(text) + "\"");
  }
  return value;
}

std::pair<std::size_t, std::size_t> parse_dims(std::string_view text) {
  const auto x = text.find('x');
  if (x == std::string_view::npos) {
    const auto n = number<std::size_t>(text, "grid size");
    return {n, n};
  }
  return {number<std::size_t>(text.substr(0, x), "grid width"),
          number<std::size_t>(text.substr(x + 1), "grid height")};
}

// "a..b" or a single value "a".
template <class T>
std::pair<T, T> parse_range(std::string_view text, const std::string& what) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    const T v = number<T>(text, what);
    return {v, v};
  }
  const T lo = number<T>(text.substr(0, dots), what);
  const T hi = number<T>(text.substr(dots + 2), what);
  if (hi < lo) throw UsageError(what + " range \"" + std::string(text) + "\" is empty");
  return {lo, hi};
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t from = 0;
  for (;;) {
    const auto at = text.find(sep, from);
    parts.push_back(text.substr(from, at - from));
    if (at == std::string_view::npos) return parts;
    from = at + 1;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_text(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw FormatError("cannot write " + path);
  file << text;
  if (!file) throw FormatError("failed writing " + path);
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_g(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

int report_invalid(const std::vector<std::string>& errors, std::ostream& err) {
  err << "invalid scenario:\n";
  for (const auto& e : errors) err << "  - " << e << '\n';
  return kInputError;
}

// ---------------------------------------------------------------- solve

struct SolveOptions {
  std::string scenario;
  std::string solver = "exact";
  double epsilon = 1e-8;
  std::size_t max_iterations = 1'000'000;
  std::string output = "values-json";
  bool audit = false;
  std::string out_path;
};

json audit_json(const std::vector<Peak>& peaks, const World& world) {
  json trail = json::array();
  for (const auto& p : peaks) {
    json entry = {{"iteration", p.iteration},
                  {"kind", to_string(p.kind)},
                  {"anchor", p.anchor},
                  {"value", p.value}};
    if (p.secondary) entry["secondary"] = *p.secondary;
    if (const auto* g = world.grid()) {
      const Cell c = g->cell(p.anchor);
      entry["x"] = c.x;
      entry["y"] = c.y;
    }
    trail.push_back(std::move(entry));
  }
  return trail;
}

int cmd_solve(const SolveOptions& o, std::ostream& out, std::ostream& err) {
  if (o.audit && o.solver != "exact") throw UsageError("--audit needs --solver exact");
  const Scenario scenario = load_scenario(o.scenario);
  if (auto errors = validate_scenario(scenario); !errors.empty()) {
    return report_invalid(errors, err);
  }

  ValueFunction values;
  std::vector<Peak> processed;
  std::size_t work = 0;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (o.solver == "exact") {
      auto r = exact_solve(scenario);
      values = std::move(r.values);
      processed = std::move(r.processed);
      work = r.stats.iterations;
    } else {
      auto r = value_iteration(scenario, {o.epsilon, o.max_iterations, false});
      values = std::move(r.values);
      work = r.iterations;
    }
  } catch (const std::exception& e) {
    err << "solver failed on " << o.scenario << ": " << e.what() << '\n';
    return kSolverError;
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  std::string text;
  if (o.output == "summary") {
    std::ostringstream s;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s << "solver      " << (o.solver == "exact" ? "exact" : "value_iteration") << '\n'
      << "states      " << scenario.state_count() << '\n'
      << "rewards     " << scenario.rewards().size() << '\n'
      << "gamma       " << scenario.gamma() << '\n'
      << (o.solver == "exact" ? "peaks       " : "iterations  ") << work << '\n'
      << "max value   " << format_g(*hi) << '\n'
      << "min value   " << format_g(*lo) << '\n'
      << "wall time   " << format_g(elapsed.count()) << " s\n";
    if (o.audit) {
      s << "audit:\n";
      for (const auto& p : processed) {
        s << "  " << p.iteration << ' ' << to_string(p.kind) << " at " << p.anchor;
        if (p.secondary) s << '+' << *p.secondary;
        s << " value " << format_g(p.value) << '\n';
      }
    }
    text = s.str();
  } else {
    json doc = {{"solver", o.solver == "exact" ? "exact" : "value_iteration"},
                {"states", scenario.state_count()},
                {"values", values}};
    if (o.output == "policy-json") {
      json names = json::array();
      for (ActionId a : extract_policy(values, scenario)) {
        names.push_back(scenario.world().action_name(a));
      }
      doc["policy"] = std::move(names);
    }
    if (o.audit) doc["audit"] = audit_json(processed, scenario.world());
    text = doc.dump(2) + "\n";
  }
  write_text(text, o.out_path, out);
  return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyOptions {
  std::string scenario;
  std::string grid = "10x10";
  std::string rewards = "1..10";
  std::string values = "1..10";
  double gamma = 0.9;
  std::uint64_t seed = 1;
  long long count = 100;
  double epsilon = 1e-8;
  std::optional<double> tolerance;
};

double max_deviation(const ValueFunction& a, const ValueFunction& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double dev = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (!(d <= dev)) dev = std::isnan(d) ? std::numeric_limits<double>::infinity() : d;
  }
  return dev;
}

int cmd_verify(const VerifyOptions& o, const Hooks& hooks, std::ostream& out, std::ostream& err) {
  if (o.count <= 0) throw UsageError("--count must be a positive integer");
  if (!(o.epsilon > 0.0)) throw UsageError("--epsilon must be positive");

  struct Case {
    std::string label;
    std::string replay;
    Scenario scenario;
  };
  auto verify_one = [&](const Case& c, double& worst, double& tol_used) -> int {
    const Scenario& sc = c.scenario;
    const double tol = o.tolerance ? *o.tolerance : vi_error_bound(o.epsilon, sc.gamma());
    tol_used = std::max(tol_used, tol);
    ValueFunction exact;
    ValueFunction vi;
    try {
      exact = hooks.exact(sc).values;
      vi = value_iteration(sc, {o.epsilon, 1'000'000, false}).values;
    } catch (const std::exception& e) {
      err << "solver failed on " << c.label << ": " << e.what() << '\n';
      if (!c.replay.empty()) err << "replay: " << c.replay << '\n';
      return kSolverError;
    }
    const double dev = max_deviation(exact, vi);
    worst = std::max(worst, dev);
    if (dev <= tol) return kOk;
    err << "FAIL " << c.label << ": deviation " << dev << " exceeds tolerance " << tol << '\n';
    if (!c.replay.empty()) err << "replay: " << c.replay << '\n';
    return kVerifyFailed;
  };

  double worst = 0.0;
  double tol_used = 0.0;
  std::size_t failed = 0;
  std::size_t total = 0;
  if (!o.scenario.empty()) {
    Scenario sc = load_scenario(o.scenario);
    if (auto errors = validate_scenario(sc); !errors.empty()) return report_invalid(errors, err);
    total = 1;
    const int rc = verify_one({o.scenario, "", std::move(sc)}, worst, tol_used);
    if (rc == kSolverError) return rc;
    failed = rc == kOk ? 0 : 1;
  } else {
    const auto [w, h] = parse_dims(o.grid);
    const auto [k_lo, k_hi] = parse_range<std::size_t>(o.rewards, "reward count");
    const auto [v_lo, v_hi] = parse_range<double>(o.values, "reward value");
    if (k_lo == 0) throw UsageError("reward count must be positive");
    const GenSpec base{w, h, k_hi, v_lo, v_hi, o.gamma, o.seed};
    if (auto errors = genspec_violations(base); !errors.empty()) {
      for (const auto& e : errors) err << "error: " << e << '\n';
      return kInputError;
    }
    // Reward counts cycle through the range so every count is exercised.
    for (long long i = 0; i < o.count; ++i) {
      GenSpec spec = base;
      spec.seed = o.seed + static_cast<std::uint64_t>(i);
      spec.reward_count = k_lo + static_cast<std::size_t>(i) % (k_hi - k_lo + 1);
      std::ostringstream label;
      label << "seed " << spec.seed << " (" << w << 'x' << h << ", " << spec.reward_count
            << " rewards, gamma " << o.gamma << ')';
      std::ostringstream replay;
      replay << "peakmdp gen --grid " << w << 'x' << h << " --rewards " << spec.reward_count
             << " --values " << shortest(v_lo) << ".." << shortest(v_hi) << " --gamma "
             << shortest(o.gamma) << " --seed "
             << spec.seed;
      const int rc = verify_one({label.str(), replay.str(), random_scenario(spec)}, worst, tol_used);
      if (rc == kSolverError) return rc;
      if (rc != kOk) ++failed;
      ++total;
    }
  }

  out << "verified " << total << " scenario" << (total == 1 ? "" : "s") << ": max deviation "
      << worst << " (tolerance " << tol_used << ")\n";
  if (failed) {
    out << failed << " of " << total << " exceeded the tolerance\n";
    return kVerifyFailed;
  }
  return kOk;
}

// ---------------------------------------------------------------- gen

struct GenOptions {
  std::string spec_path;
  std::string grid = "10x10";
  std::size_t rewards = 1;
  double gamma = 0.9;
  std::uint64_t seed = 0;
  std::string values = "1..10";
  std::string out_path;
};

int cmd_gen(const GenOptions& o, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  GenSpec spec;
  if (!o.spec_path.empty()) spec = parse_genspec(read_file(o.spec_path));
  const bool from_file = !o.spec_path.empty();
  auto given = [&](const char* name) { return !from_file || sub.count(name) > 0; };
  if (given("--grid")) std::tie(spec.width, spec.height) = parse_dims(o.grid);
  if (given("--rewards")) spec.reward_count = o.rewards;
  if (given("--gamma")) spec.gamma = o.gamma;
  if (given("--seed")) spec.seed = o.seed;
  if (given("--values")) std::tie(spec.value_lo, spec.value_hi) = parse_range<double>(o.values, "reward value");

  if (auto errors = genspec_violations(spec); !errors.empty()) {
    for (const auto& e : errors) err << "error: " << e << '\n';
    return kInputError;
  }
  write_text(scenario_to_json(random_scenario(spec)), o.out_path, out);
  return kOk;
}

// ---------------------------------------------------------------- bench

struct BenchOptions {
  std::string spec_path;
  std::string sweep;
  std::string values;
  std::string grid = "50x50";
  std::size_t rewards = 5;
  double gamma = 0.9;
  std::size_t trials = 50;
  std::uint64_t seed = 1;
  std::size_t repetitions = 3;
  double epsilon = 1e-6;
  std::string value_range = "1..10";
  std::string format = "csv";
  std::string out_path;
};

SweepSpec sweep_from_flags(const BenchOptions& o) {
  if (o.sweep.empty()) throw UsageError("bench needs --sweep or --spec");
  if (o.values.empty()) throw UsageError("bench needs --values");
  const SweepVariable variable = parse_sweep_variable(o.sweep);
  SweepPoint base;
  std::tie(base.width, base.height) = parse_dims(o.grid);
  base.reward_count = o.rewards;
  base.gamma = o.gamma;
  SweepSpec spec;
  if (variable == SweepVariable::States) {
    std::vector<std::pair<std::size_t, std::size_t>> sizes;
    for (auto item : split(o.values, ',')) sizes.push_back(parse_dims(item));
    spec = make_states_sweep(base, sizes);
  } else {
    std::vector<double> xs;
    for (auto item : split(o.values, ',')) xs.push_back(number<double>(item, "sweep value"));
    spec = make_sweep(variable, base, xs);
  }
  std::tie(spec.value_lo, spec.value_hi) = parse_range<double>(o.value_range, "reward value");
  return spec;
}

int cmd_bench(const BenchOptions& o, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  const ResultFormat format = parse_result_format(o.format);
  const bool from_file = !o.spec_path.empty();
  SweepSpec spec = from_file ? parse_sweep_spec(read_file(o.spec_path)) : sweep_from_flags(o);
  auto given = [&](const char* name) { return !from_file || sub.count(name) > 0; };
  if (given("--trials")) spec.trials = o.trials;
  if (given("--seed")) spec.base_seed = o.seed;
  if (given("--repetitions")) spec.timing.repetitions = o.repetitions;
  if (given("--epsilon")) spec.timing.vi.epsilon = o.epsilon;

  if (auto errors = sweep_violations(spec); !errors.empty()) {
    for (const auto& e : errors) err << "error: " << e << '\n';
    return kInputError;
  }

  const SweepResult result = run_sweep(spec);
  bool mismatch = false;
  for (const auto& f : result.failures) {
    err << "point " << f.point << ", " << f.message << '\n';
    mismatch = mismatch || f.kind == SweepFailure::Kind::ChecksumMismatch;
  }
  if (result.records.empty()) {
    err << "error: no records\n";
    return kSolverError;
  }

  std::ostringstream emitted;
  emit_results(result.records, format, emitted);
  write_text(emitted.str(), o.out_path, out);
  // Keep stdout clean for the records when they go there.
  std::ostream& table = (o.out_path.empty() || o.out_path == "-") ? err : out;
  print_summary(summarize(result.records), table);

  if (mismatch) return kVerifyFailed;
  if (!result.failures.empty()) return kSolverError;
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Hooks& hooks) {
  CLI::App app{"Exact peak-based solver for deterministic grid MDPs", "peakmdp"};
  app.require_subcommand(1, 1);

  SolveOptions so;
  auto* solve = app.add_subcommand("solve", "Solve one scenario file");
  solve->add_option("--scenario", so.scenario, "Scenario JSON file")->required();
  solve->add_option("--solver", so.solver, "exact or vi")
      ->check(CLI::IsMember({"exact", "vi"}))
      ->capture_default_str();
  solve->add_option("--epsilon", so.epsilon, "VI residual threshold")->capture_default_str();
  solve->add_option("--max-iterations", so.max_iterations, "VI sweep limit")->capture_default_str();
  solve->add_option("--output", so.output, "values-json, policy-json or summary")
      ->check(CLI::IsMember({"values-json", "policy-json", "summary"}))
      ->capture_default_str();
  solve->add_flag("--audit", so.audit, "Include the processed peaks (exact only)");
  solve->add_option("-o,--out", so.out_path, "Output file (default stdout)");

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "Compare exact and VI on seeded scenarios");
  verify->add_option("--scenario", vo.scenario, "Verify one scenario file instead");
  verify->add_option("--grid", vo.grid, "WxH")->capture_default_str();
  verify->add_option("--rewards", vo.rewards, "Reward count or range a..b")->capture_default_str();
  verify->add_option("--values", vo.values, "Reward value range lo..hi")->capture_default_str();
  verify->add_option("--gamma", vo.gamma)->capture_default_str();
  verify->add_option("--seed", vo.seed, "First seed")->capture_default_str();
  verify->add_option("--count", vo.count, "Number of scenarios")->capture_default_str();
  verify->add_option("--epsilon", vo.epsilon, "VI residual threshold")->capture_default_str();
  verify->add_option("--tolerance", vo.tolerance, "Default eps*gamma/(1-gamma)");

  BenchOptions bo;
  auto* bench = app.add_subcommand("bench", "Timed sweep over rewards, states or discount");
  bench->add_option("--spec", bo.spec_path, "Sweep spec JSON file");
  bench->add_option("--sweep", bo.sweep, "rewards, states or discount")
      ->check(CLI::IsMember({"rewards", "states", "discount"}));
  bench->add_option("--values", bo.values, "Comma-separated points, e.g. 1,5,10 or 10x10,20x20");
  bench->add_option("--grid", bo.grid, "WxH")->capture_default_str();
  bench->add_option("--rewards", bo.rewards)->capture_default_str();
  bench->add_option("--gamma", bo.gamma)->capture_default_str();
  bench->add_option("--trials", bo.trials, "Scenarios per point")->capture_default_str();
  bench->add_option("--seed", bo.seed, "Base seed")->capture_default_str();
  bench->add_option("--repetitions", bo.repetitions, "Timed runs per solve")->capture_default_str();
  bench->add_option("--epsilon", bo.epsilon, "VI residual threshold")->capture_default_str();
  bench->add_option("--value-range", bo.value_range, "Reward value range lo..hi")
      ->capture_default_str();
  bench->add_option("--format", bo.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  bench->add_option("-o,--out", bo.out_path, "Results file (default stdout)");

  GenOptions go;
  auto* gen = app.add_subcommand("gen", "Write a random grid scenario");
  gen->add_option("--spec", go.spec_path, "Generator spec JSON file");
  gen->add_option("--grid", go.grid, "WxH")->capture_default_str();
  gen->add_option("--rewards", go.rewards, "Reward count")->capture_default_str();
  gen->add_option("--gamma", go.gamma)->capture_default_str();
  gen->add_option("--seed", go.seed)->capture_default_str();
  gen->add_option("--values", go.values, "Reward value range lo..hi")->capture_default_str();
  gen->add_option("-o,--out", go.out_path, "Scenario file (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (solve->parsed()) return cmd_solve(so, out, err);
    if (verify->parsed()) return cmd_verify(vo, hooks, out, err);
    if (bench->parsed()) return cmd_bench(bo, *bench, out, err);
    return cmd_gen(go, *gen, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const InvalidScenario& e) {
    return report_invalid(e.errors(), err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSolverError;
  }
}

}  // namespace peakmdp::cli
